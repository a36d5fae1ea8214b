// The two propagation fixed points minimize their quadratic objectives:
// gradients vanish there and any perturbation raises the objective.
//
// ```text
// cargo run --example objective_check
// ```

use netprop::pdcbm::{generate, BlockModelParams};
use netprop::propagate::{q1_gradient, q1_objective, q2_gradient, q2_objective, solve_kernel};
use netprop::{Kernel, PropagationConfig, Solver};

pub fn run_example() -> netprop::Result<()> {
    let params = BlockModelParams::simulation(300, vec![0.5, 0.5], 8.0, 0.3, 0.0, 0.2)?;
    let inst = generate(&params, 9)?;
    let (g, members) = inst.graph.largest_component()?;
    let n = g.node_count();
    let y = inst.observed.restrict(&members).indicator();
    let cfg = PropagationConfig::new(0.8, 0.5)?;
    let mu = cfg.mu();

    for (name, kernel, obj, grad) in [
        ("Q1", Kernel::RandomWalk, q1_objective as Objective, q1_gradient as Gradient),
        ("Q2", Kernel::SourceNormalized, q2_objective, q2_gradient),
    ] {
        let mut f = solve_kernel(&g, &y, cfg.alpha, kernel, Solver::Direct)?;
        f.scale(1.0 - cfg.alpha);
        let base = obj(&g, &f, &y, mu);
        let mut nudged = f.clone();
        nudged.as_mut_slice()[0] += 1e-3;
        println!(
            "{name} on {n} nodes: objective {base:.6}, gradient norm {:.1e}, nudge raises it by {:.2e}",
            grad(&g, &f, &y, mu).max_abs(),
            obj(&g, &nudged, &y, mu) - base
        );
    }
    Ok(())
}

type Objective = fn(&netprop::Graph, &netprop::ScoreMatrix, &netprop::ScoreMatrix, f64) -> f64;
type Gradient =
    fn(&netprop::Graph, &netprop::ScoreMatrix, &netprop::ScoreMatrix, f64) -> netprop::ScoreMatrix;

fn main() -> netprop::Result<()> {
    run_example()
}
