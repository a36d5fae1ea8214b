// WIL error on balanced two-block networks as the mean degree grows, with
// the fitted log-log slope.
//
// ```text
// cargo run --release --example degree_rate
// ```

use netprop::bench::{rate_experiment, RateConfig};

pub fn run_example() -> netprop::Result<()> {
    let cfg = RateConfig {
        d_grid: vec![4.0, 6.0, 8.0, 12.0, 16.0],
        n: 1000,
        reps: 5,
        ..RateConfig::default()
    };
    let table = rate_experiment(&cfg)?;
    println!("   d  mean err");
    for r in &table.rows {
        println!("{:>4}  {:.4}", r.d, r.mean_err);
    }
    match table.slope {
        Some(s) => println!("slope of ln err on ln d: {s:.2}"),
        None => println!("error reached zero; slope undefined"),
    }
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
