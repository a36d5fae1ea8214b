// Loads a labeled network, reduces it to its largest component, hides 90%
// of the labels and predicts them.
//
// With `NETPROP_DATA_DIR` pointing at a directory holding
// `polblogs.edges`/`polblogs.labels.csv` (and likewise `simmons`,
// `caltech`) those networks are used; otherwise the bundled fixture is.
//
// ```text
// NETPROP_DATA_DIR=/path/to/data cargo run --release --example real_data
// ```

use std::path::Path;

use netprop::bench::err_rate;
use netprop::ingest::{dataset_stats, mask_labels, preprocess, DatasetBundle, Preprocess, RECIPES};
use netprop::propagate::{default_alpha, predict, rho_grid, Solver, WilComponents};

fn evaluate(b: &DatasetBundle) -> netprop::Result<()> {
    let stats = dataset_stats(b);
    let observed = mask_labels(&b.labels, 0.9, 1)?;
    let hidden: Vec<usize> = b
        .labels
        .known()
        .into_iter()
        .filter(|&i| !observed.is_known(i))
        .collect();
    let alpha = default_alpha();
    let comps = WilComponents::compute(&b.graph, &observed, alpha, Solver::default_for(alpha))?;
    let sel = comps.select_rho(&rho_grid())?;
    let pred = predict(&comps.combine(sel.rho), &observed)?;
    let acc = 1.0 - err_rate(&pred.labels, &b.labels, &hidden)?;
    println!("{}: {stats}; rho = {}, accuracy on hidden labels {acc:.3}", b.name, sel.rho);
    Ok(())
}

pub fn run_example() -> netprop::Result<()> {
    if let Some(dir) = std::env::var_os("NETPROP_DATA_DIR") {
        let mut any = false;
        for recipe in RECIPES {
            if let Some(b) = recipe.load(Path::new(&dir))? {
                any = true;
                evaluate(&b)?;
                let (n, k, d) = recipe.reference;
                println!("  published: {n} nodes, {k} classes, average degree {d}");
            }
        }
        if any {
            return Ok(());
        }
    }
    let data = Path::new(env!("CARGO_MANIFEST_DIR")).join("data");
    let raw = DatasetBundle::load(
        "pdcbm_small",
        &data.join("pdcbm_small.edges"),
        &data.join("pdcbm_small.labels.csv"),
    )?;
    evaluate(&preprocess(&raw, &Preprocess::default())?)
}

fn main() -> netprop::Result<()> {
    run_example()
}
