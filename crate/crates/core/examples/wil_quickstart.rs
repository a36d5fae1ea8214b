// Two triangles joined by a bridge, one labeled node on each side.
//
// ```text
// cargo run --example wil_quickstart
// ```

use netprop::propagate::{predict, rho_grid, WilComponents};
use netprop::{Graph, LabelSet, PropagationConfig};

pub fn run_example() -> netprop::Result<()> {
    let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)])?;
    let labels = LabelSet::new(2, vec![Some(0), None, None, None, None, Some(1)])?;

    let cfg = PropagationConfig::default();
    let comps = WilComponents::compute(&g, &labels, cfg.alpha, cfg.solver)?;
    let sel = comps.select_rho(&rho_grid())?;
    let scores = comps.combine(sel.rho);
    let pred = predict(&scores, &labels)?;

    println!("alpha = {:.4}, tuned rho = {}", cfg.alpha, sel.rho);
    println!("node  score_1   score_2   label");
    for i in 0..g.node_count() {
        println!(
            "{i:>4}  {:>8.4}  {:>8.4}  {}",
            scores.get(i, 0),
            scores.get(i, 1),
            pred.labels.get(i).unwrap() + 1
        );
    }
    Ok(())
}

fn main() -> netprop::Result<()> {
    run_example()
}
