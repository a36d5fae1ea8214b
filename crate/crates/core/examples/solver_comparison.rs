// Truncated series, dense LU and fixed-point iteration on the same network.
//
// ```text
// cargo run --release --example solver_comparison
// ```

use std::time::Instant;

use netprop::pdcbm::{generate, BlockModelParams};
use netprop::propagate::{default_alpha, iterate_propagation, series_terms_for, solve_kernel};
use netprop::{Kernel, Solver};

pub fn run_example() -> netprop::Result<()> {
    let params = BlockModelParams::simulation(1500, vec![0.5, 0.5], 10.0, 0.2, 0.5, 0.1)?;
    let inst = generate(&params, 3)?;
    let y = inst.observed.indicator();
    let alpha = default_alpha();
    let m = series_terms_for(alpha, 1e-6);
    println!("alpha = {alpha:.4}, series length m = {m}");

    for kernel in Kernel::ALL {
        let t = Instant::now();
        let direct = solve_kernel(&inst.graph, &y, alpha, kernel, Solver::Direct)?;
        let t_direct = t.elapsed();
        let t = Instant::now();
        let series = solve_kernel(&inst.graph, &y, alpha, kernel, Solver::Series { terms: m })?;
        let t_series = t.elapsed();
        let t = Instant::now();
        let fixed = iterate_propagation(&inst.graph, &y, alpha, kernel, 1e-10, 10_000)?;
        let t_fixed = t.elapsed();
        let mut scaled = direct.clone();
        scaled.scale(1.0 - alpha);
        println!(
            "{kernel:<22} series-direct {:.1e} ({:?} vs {:?}); fixed point {} iterations, gap {:.1e} ({:?})",
            series.max_abs_diff(&direct),
            t_series,
            t_direct,
            fixed.iterations,
            fixed.scores.max_abs_diff(&scaled),
            t_fixed
        );
    }
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
