// Accuracy of WIL and its endpoints as the mean degree grows, on
// imbalanced networks with heterogeneous degrees. Writes the raw CSV and a
// line chart.
//
// ```text
// cargo run --release --example lambda_sweep
// ```

use netprop::bench::{emit_svg_lines, run_sweep, summarize, write_csv, ExperimentConfig, Field};

pub fn run_example() -> netprop::Result<()> {
    let cfg = ExperimentConfig {
        n: 600,
        lambda: vec![3.0, 5.0, 7.0, 9.0],
        delta_imbalance: vec![0.3],
        gamma: vec![0.5],
        reps: 4,
        seed: 7,
        ..ExperimentConfig::default()
    };
    let out = run_sweep(&cfg)?;
    for f in &out.failures {
        eprintln!("skipped {:?}: {}", f.point, f.message);
    }
    println!("lambda  method                mean accuracy  mean rho");
    for row in summarize(&out.records) {
        let rho = row.mean_rho.map_or_else(|| "-".to_string(), |r| format!("{r:.2}"));
        println!(
            "{:>6}  {:<20}  {:>13.3}  {rho:>8}",
            row.point.lambda,
            row.method.name(),
            row.mean_accuracy
        );
    }

    let dir = std::env::temp_dir().join("netprop-examples");
    std::fs::create_dir_all(&dir).map_err(|e| netprop::Error::Input(e.to_string()))?;
    write_csv(&out.records, &dir.join("lambda_sweep.csv"))?;
    let svg = emit_svg_lines(&out.records, Field::Lambda, Field::Accuracy);
    std::fs::write(dir.join("lambda_sweep.svg"), svg).map_err(|e| netprop::Error::Input(e.to_string()))?;
    println!("wrote lambda_sweep.csv and lambda_sweep.svg to {}", dir.display());
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
