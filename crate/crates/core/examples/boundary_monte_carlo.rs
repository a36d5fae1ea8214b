// Minority-class recall of each kernel on simulated two-block networks,
// against the analytic boundary. Pass `full` for the 4000-node, 20-rep
// setting.
//
// ```text
// cargo run --release --example boundary_monte_carlo [full]
// ```

use netprop::bench::{boundary_experiment, BoundaryConfig};

pub fn run_example() -> netprop::Result<()> {
    let full = std::env::args().any(|a| a == "full");
    let cfg = if full {
        BoundaryConfig::default()
    } else {
        BoundaryConfig {
            n: 1500,
            lambda: 30.0,
            reps: 4,
            s_grid: vec![0.1, 0.2, 0.5, 1.0],
            ..BoundaryConfig::default()
        }
    };
    println!(
        "n = {}, mean degree {}, beta = {}, {} reps, alpha = {}",
        cfg.n, cfg.lambda, cfg.beta, cfg.reps, cfg.alpha
    );
    println!("   s  kernel                  predicted  minority recall  accuracy");
    for r in boundary_experiment(&cfg)? {
        println!(
            "{:>4.2}  {:<22}  {:>9}  {:>15.3}  {:>8.3}",
            r.s, r.kernel, r.predicted, r.minority_recall, r.accuracy
        );
    }
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
