use std::io::Write;

use rayon::prelude::*;

use super::{err_rate, per_class_recall};
use crate::error::{Error, Result};
use crate::pdcbm::{self, block_matrix, BlockModelParams, GeneratedInstance, LabelSampling, ThetaLaw};
use crate::propagate::{self, predict, rho_grid, Kernel, Solver, WilComponents};
use crate::theory::boundary_condition;

/// `[n1, n2]` with `n1 + n2 = n` and `n1 / n2` as close to `s` as rounding
/// allows: `n2 = round(n / (1 + s))`.
pub fn class_sizes(n: usize, s: f64) -> Result<[usize; 2]> {
    if !(s > 0.0 && s <= 1.0) {
        return Err(Error::Parameter(format!("s = {s} outside (0, 1]")));
    }
    let n2 = (n as f64 / (1.0 + s)).round() as usize;
    if n2 == 0 || n2 >= n {
        return Err(Error::Parameter(format!("{n} nodes cannot be split at ratio {s}")));
    }
    Ok([n - n2, n2])
}

/// Two classes of fixed sizes, homogeneous degrees, mean degree `lambda`.
fn two_block_instance(
    n: usize,
    s: f64,
    lambda: f64,
    beta: f64,
    delta: f64,
    seed: u64,
    rep: usize,
) -> Result<GeneratedInstance> {
    let sizes = class_sizes(n, s)?;
    let pi: Vec<f64> = sizes.iter().map(|&m| m as f64 / n as f64).collect();
    let params = BlockModelParams {
        n,
        block: block_matrix(n, lambda, beta, &pi, 1.0)?,
        pi,
        theta: ThetaLaw::homogeneous(),
        nu: 1.0,
        delta,
        sampling: LabelSampling::Uniform,
    };
    pdcbm::generate_with_sizes(&params, &sizes, seed, rep as u64)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryConfig {
    pub beta: f64,
    pub s_grid: Vec<f64>,
    pub n: usize,
    pub lambda: f64,
    pub delta: f64,
    pub reps: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for BoundaryConfig {
    /// Dense graphs (mean degree 40) and a short propagation range, where
    /// the finite-sample sign of each kernel's score follows its boundary
    /// condition.
    fn default() -> Self {
        BoundaryConfig {
            beta: 0.3,
            s_grid: vec![0.2, 0.5],
            n: 4000,
            lambda: 40.0,
            delta: 0.1,
            reps: 20,
            seed: 1,
            alpha: 0.1,
        }
    }
}

/// Mean over replications for one kernel at one balance ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRow {
    pub s: f64,
    pub kernel: Kernel,
    /// The kernel's analytic boundary condition at `(s, beta)`.
    pub predicted: bool,
    /// Recall of the smaller class among unlabeled nodes.
    pub minority_recall: f64,
    pub accuracy: f64,
}

/// Runs the three single kernels on two-block instances with class ratio
/// `s` and records how well each recovers the smaller class.
pub fn boundary_experiment(cfg: &BoundaryConfig) -> Result<Vec<BoundaryRow>> {
    if cfg.s_grid.is_empty() || cfg.reps == 0 {
        return Err(Error::Input("boundary experiment needs an s grid and reps >= 1".into()));
    }
    propagate::PropagationConfig::new(cfg.alpha, 0.5)?;
    for &s in &cfg.s_grid {
        class_sizes(cfg.n, s)?;
    }
    let solver = Solver::default_for(cfg.alpha);
    let tasks: Vec<(f64, usize)> = cfg
        .s_grid
        .iter()
        .flat_map(|&s| (0..cfg.reps).map(move |r| (s, r)))
        .collect();
    let per_rep: Vec<Vec<(f64, f64)>> = tasks
        .par_iter()
        .map(|&(s, rep)| {
            let inst = two_block_instance(cfg.n, s, cfg.lambda, cfg.beta, cfg.delta, cfg.seed, rep)?;
            let unlabeled = inst.observed.unknown();
            let y = inst.observed.indicator();
            Kernel::ALL
                .iter()
                .map(|&kernel| {
                    let scores = propagate::solve_kernel(&inst.graph, &y, cfg.alpha, kernel, solver)?;
                    let pred = predict(&scores, &inst.observed)?;
                    let recall = per_class_recall(&pred.labels, &inst.truth, &unlabeled)[0];
                    let acc = 1.0 - err_rate(&pred.labels, &inst.truth, &unlabeled)?;
                    Ok((recall, acc))
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for (si, &s) in cfg.s_grid.iter().enumerate() {
        let chunk = &per_rep[si * cfg.reps..(si + 1) * cfg.reps];
        for (ki, &kernel) in Kernel::ALL.iter().enumerate() {
            let mut recall = 0.0;
            let mut acc = 0.0;
            for r in chunk {
                let v = r[ki];
                recall += v.0;
                acc += v.1;
            }
            rows.push(BoundaryRow {
                s,
                kernel,
                predicted: boundary_condition(kernel, s, cfg.beta),
                minority_recall: recall / cfg.reps as f64,
                accuracy: acc / cfg.reps as f64,
            });
        }
    }
    Ok(rows)
}

/// CSV with header `s,beta,kernel,predicted,minority_recall,accuracy`.
pub fn write_boundary_rows_csv<W: Write>(rows: &[BoundaryRow], beta: f64, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["s", "beta", "kernel", "predicted", "minority_recall", "accuracy"])?;
    for r in rows {
        w.write_record([
            r.s.to_string(),
            beta.to_string(),
            r.kernel.name().to_string(),
            r.predicted.to_string(),
            r.minority_recall.to_string(),
            r.accuracy.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("writing boundary table", e))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateConfig {
    /// Mean degrees to visit.
    pub d_grid: Vec<f64>,
    pub beta: f64,
    pub s: f64,
    pub delta: f64,
    pub n: usize,
    pub reps: usize,
    pub seed: u64,
    pub alpha: f64,
}

impl Default for RateConfig {
    fn default() -> Self {
        RateConfig {
            d_grid: vec![4.0, 8.0, 12.0],
            beta: 0.2,
            s: 1.0,
            delta: 0.1,
            n: 2000,
            reps: 20,
            seed: 1,
            alpha: propagate::default_alpha(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateRow {
    pub d: f64,
    pub mean_err: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RateTable {
    pub rows: Vec<RateRow>,
    /// Least-squares slope of `ln err` against `ln d`; `None` when fewer
    /// than two rows have a positive error.
    pub slope: Option<f64>,
}

/// WIL error rate (tuned `rho`) as the mean degree grows.
pub fn rate_experiment(cfg: &RateConfig) -> Result<RateTable> {
    if cfg.d_grid.is_empty() || cfg.reps == 0 {
        return Err(Error::Input("rate experiment needs a degree grid and reps >= 1".into()));
    }
    propagate::PropagationConfig::new(cfg.alpha, 0.5)?;
    let solver = Solver::default_for(cfg.alpha);
    let tasks: Vec<(f64, usize)> = cfg
        .d_grid
        .iter()
        .flat_map(|&d| (0..cfg.reps).map(move |r| (d, r)))
        .collect();
    let errs = tasks
        .par_iter()
        .map(|&(d, rep)| {
            let inst = two_block_instance(cfg.n, cfg.s, d, cfg.beta, cfg.delta, cfg.seed, rep)?;
            let comps = WilComponents::compute(&inst.graph, &inst.observed, cfg.alpha, solver)?;
            let rho = comps.select_rho(&rho_grid())?.rho;
            let pred = predict(&comps.combine(rho), &inst.observed)?;
            err_rate(&pred.labels, &inst.truth, &inst.observed.unknown())
        })
        .collect::<Result<Vec<f64>>>()?;
    let rows: Vec<RateRow> = cfg
        .d_grid
        .iter()
        .zip(errs.chunks(cfg.reps))
        .map(|(&d, e)| RateRow {
            d,
            mean_err: e.iter().sum::<f64>() / cfg.reps as f64,
            reps: cfg.reps,
        })
        .collect();
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.mean_err > 0.0)
        .map(|r| (r.d.ln(), r.mean_err.ln()))
        .collect();
    let slope = (pts.len() >= 2).then(|| {
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    });
    Ok(RateTable { rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sizes_follow_ratio() {
        assert_eq!(class_sizes(4000, 0.2).unwrap(), [667, 3333]);
        assert_eq!(class_sizes(4000, 0.5).unwrap(), [1333, 2667]);
        assert_eq!(class_sizes(10, 1.0).unwrap(), [5, 5]);
        assert!(class_sizes(10, 0.0).is_err());
        assert!(class_sizes(10, 1.5).is_err());
    }

    #[test]
    fn boundary_rows_carry_predicates() {
        let cfg = BoundaryConfig {
            n: 300,
            lambda: 20.0,
            reps: 2,
            s_grid: vec![0.2, 0.5],
            ..BoundaryConfig::default()
        };
        let rows = boundary_experiment(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        for r in &rows {
            assert_eq!(r.predicted, boundary_condition(r.kernel, r.s, 0.3));
            assert!((0.0..=1.0).contains(&r.minority_recall));
        }
        assert_eq!(rows, boundary_experiment(&cfg).unwrap());
        let mut buf = Vec::new();
        write_boundary_rows_csv(&rows, 0.3, &mut buf).unwrap();
        assert!(String::from_utf8(buf)
            .unwrap()
            .starts_with("s,beta,kernel,predicted,minority_recall,accuracy\n"));
    }

    #[test]
    fn rate_table_shape() {
        let cfg = RateConfig {
            n: 200,
            reps: 2,
            d_grid: vec![4.0, 12.0],
            ..RateConfig::default()
        };
        let t = rate_experiment(&cfg).unwrap();
        assert_eq!(t.rows.len(), 2);
        assert!(t.rows.iter().all(|r| (0.0..=1.0).contains(&r.mean_err)));
        assert_eq!(t, rate_experiment(&cfg).unwrap());
    }
}
