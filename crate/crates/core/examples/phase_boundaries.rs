// Analytic consistency regions of the three kernels and their expected
// minority-class scores, plus an SVG map of the (s, beta) plane.
//
// ```text
// cargo run --example phase_boundaries
// ```

use netprop::bench::region_svg;
use netprop::theory::{boundary_condition, closed_form_score, g_beta};
use netprop::Kernel;

pub fn run_example() -> netprop::Result<()> {
    let beta = 0.3;
    println!("beta = {beta}: source-normalized boundary at s = {:.4}", g_beta(beta)?);
    println!("   s  random-walk  norm-laplacian  source-norm");
    for s in [0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0] {
        let cells: Vec<String> = Kernel::ALL
            .iter()
            .map(|&k| {
                let v = closed_form_score(k, 0.1, 0.1, s, beta).unwrap();
                let mark = if boundary_condition(k, s, beta) { '+' } else { '-' };
                format!("{v:>12.2e} {mark}")
            })
            .collect();
        println!("{s:>4.2} {}", cells.join(" "));
    }

    let dir = std::env::temp_dir().join("netprop-examples");
    std::fs::create_dir_all(&dir).map_err(|e| netprop::Error::Input(e.to_string()))?;
    let path = dir.join("regions.svg");
    std::fs::write(&path, region_svg(100, Some(beta))).map_err(|e| netprop::Error::Input(e.to_string()))?;
    println!("region map written to {}", path.display());
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
