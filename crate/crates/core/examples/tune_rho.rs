// In-sample and 5-fold accuracy over the rho grid on an imbalanced network,
// next to the accuracy each rho actually achieves on the hidden nodes.
//
// ```text
// cargo run --example tune_rho
// ```

use netprop::bench::err_rate;
use netprop::pdcbm::{generate, BlockModelParams};
use netprop::propagate::{default_alpha, predict, rho_grid, tune_rho, RhoTuning, Solver, WilComponents};

pub fn run_example() -> netprop::Result<()> {
    let params = BlockModelParams::simulation(1000, vec![0.1, 0.9], 7.0, 0.2, 0.0, 0.1)?;
    let inst = generate(&params, 5)?;
    let alpha = default_alpha();
    let solver = Solver::default_for(alpha);
    let grid = rho_grid();

    let comps = WilComponents::compute(&inst.graph, &inst.observed, alpha, solver)?;
    let in_sample = comps.select_rho(&grid)?;
    let kfold = tune_rho(
        &inst.graph,
        &inst.observed,
        alpha,
        &grid,
        solver,
        RhoTuning::KFold { folds: 5, seed: 1 },
    )?;
    let hidden = inst.observed.unknown();

    println!(" rho  in-sample  5-fold  hidden");
    for (i, &rho) in grid.iter().enumerate() {
        let pred = predict(&comps.combine(rho), &inst.observed)?;
        let acc = 1.0 - err_rate(&pred.labels, &inst.truth, &hidden)?;
        println!(
            "{rho:>4.1}  {:>9.3}  {:>6.3}  {acc:>6.3}",
            in_sample.accuracy[i].1, kfold.accuracy[i].1
        );
    }
    println!("selected: in-sample {}, 5-fold {}", in_sample.rho, kfold.rho);
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
