// Draws a degree-heterogeneous, imbalanced block-model network and writes
// it in the edge-list and label formats the CLI reads.
//
// ```text
// cargo run --example generate_pdcbm
// ```

use netprop::ingest::{without_isolated, write_edge_list, write_labels};
use netprop::pdcbm::{generate, BlockModelParams};

pub fn run_example() -> netprop::Result<()> {
    // 30/70 classes, mean degree 7, 90% of nodes at low popularity, 10% labeled
    let params = BlockModelParams::simulation(2000, vec![0.3, 0.7], 7.0, 0.2, 0.9, 0.1)?;
    let inst = generate(&params, 42)?;

    let degrees = inst.graph.degrees();
    let isolated = degrees.iter().filter(|&&d| d == 0).count();
    let max = degrees.iter().max().copied().unwrap_or(0);
    println!(
        "p = {:.3e}, q = {:.3e}",
        params.block.get(0, 0),
        params.block.get(0, 1)
    );
    println!(
        "{} nodes, {} edges, mean degree {:.2}, max degree {max}, {isolated} isolated",
        inst.graph.node_count(),
        inst.graph.edge_count(),
        2.0 * inst.graph.edge_count() as f64 / inst.graph.node_count() as f64
    );
    println!(
        "class sizes {:?}, realized balance {:.3}, {} labels revealed",
        inst.truth.class_counts(),
        inst.realized_balance(),
        inst.observed.known_count()
    );

    let dir = std::env::temp_dir().join("netprop-examples");
    std::fs::create_dir_all(&dir).map_err(|e| netprop::Error::Input(e.to_string()))?;
    let file = |name: &str| {
        std::fs::File::create(dir.join(name)).map_err(|e| netprop::Error::Input(e.to_string()))
    };
    write_edge_list(&inst.graph, None, file("pdcbm.edges")?)?;
    write_labels(&without_isolated(&inst.truth, &inst.graph), None, None, file("pdcbm.labels.csv")?)?;
    write_labels(&without_isolated(&inst.observed, &inst.graph), None, None, file("pdcbm.observed.csv")?)?;
    println!("wrote pdcbm.edges, pdcbm.labels.csv, pdcbm.observed.csv to {}", dir.display());
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
