//! Monte Carlo harness: parameter sweeps over the block model, the
//! two-kernel phase experiment and the degree-rate experiment.

mod experiments;
mod report;

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::labels::LabelSet;
use crate::pdcbm::{self, BlockModelParams};
use crate::propagate::{
    self, default_alpha, predict, rho_grid, tune_rho, RhoTuning, Solver, WilComponents,
};

pub use experiments::{
    boundary_experiment, class_sizes, rate_experiment, write_boundary_rows_csv, BoundaryConfig,
    BoundaryRow, RateConfig, RateRow, RateTable,
};
pub use report::{
    emit_csv, emit_svg_lines, read_csv, region_svg, write_csv, Field, LinePlot, CSV_HEADER,
};

/// Prediction method compared in a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// WIL with `rho` tuned on the grid.
    Wil,
    /// WIL at `rho = 1`: random-walk kernel only.
    RowKernel,
    /// WIL at `rho = 0`: source-normalized kernel only.
    ColKernel,
    NormalizedLaplacian,
}

impl Method {
    pub const ALL: [Method; 4] = [
        Method::Wil,
        Method::RowKernel,
        Method::ColKernel,
        Method::NormalizedLaplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Wil => "wil",
            Method::RowKernel => "row-kernel",
            Method::ColKernel => "col-kernel",
            Method::NormalizedLaplacian => "normalized-laplacian",
        }
    }

    pub fn from_name(s: &str) -> Option<Method> {
        Method::ALL.into_iter().find(|m| m.name() == s)
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub n: usize,
    pub k: usize,
    pub lambda: Vec<f64>,
    pub beta: Vec<f64>,
    /// Two-class imbalance: `pi = (1/2 - d, 1/2 + d)`.
    pub delta_imbalance: Vec<f64>,
    /// Weight of the low-popularity value in the degree law.
    pub gamma: Vec<f64>,
    pub unknown_rate: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    pub methods: Vec<Method>,
    pub alpha: f64,
    pub tuning: RhoTuning,
    /// Fill the `seconds` column. Off by default so reruns are byte-identical.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            n: 1000,
            k: 2,
            lambda: vec![7.0],
            beta: vec![0.2],
            delta_imbalance: vec![0.0],
            gamma: vec![0.0],
            unknown_rate: vec![0.9],
            reps: 20,
            seed: 1,
            methods: Method::ALL.to_vec(),
            alpha: default_alpha(),
            tuning: RhoTuning::InSample,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    /// Switches to the full-size design: 2000 nodes, 50 replications.
    pub fn paper_scale(mut self) -> Self {
        self.n = 2000;
        self.reps = 50;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let grids = [
            ("lambda", &self.lambda),
            ("beta", &self.beta),
            ("delta_imbalance", &self.delta_imbalance),
            ("gamma", &self.gamma),
            ("unknown_rate", &self.unknown_rate),
        ];
        if let Some((name, _)) = grids.iter().find(|(_, g)| g.is_empty()) {
            return Err(Error::Input(format!("{name} grid is empty")));
        }
        if self.reps == 0 {
            return Err(Error::Parameter("reps must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Input("no methods selected".into()));
        }
        if self.k < 2 {
            return Err(Error::Parameter(format!("need at least two classes (got {})", self.k)));
        }
        if self.k != 2 && self.delta_imbalance.iter().any(|&d| d != 0.0) {
            return Err(Error::Parameter("delta_imbalance is defined for two classes only".into()));
        }
        if let Some(d) = self.delta_imbalance.iter().find(|d| !(**d >= 0.0 && **d < 0.5)) {
            return Err(Error::Parameter(format!("delta_imbalance = {d} outside [0, 0.5)")));
        }
        if let Some(r) = self.unknown_rate.iter().find(|r| !(**r >= 0.0 && **r < 1.0)) {
            return Err(Error::Parameter(format!("unknown_rate = {r} outside [0, 1)")));
        }
        propagate::PropagationConfig::new(self.alpha, 0.5)?;
        Ok(())
    }

    /// All grid points, `lambda` slowest and `unknown_rate` fastest.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &lambda in &self.lambda {
            for &beta in &self.beta {
                for &delta_imbalance in &self.delta_imbalance {
                    for &gamma in &self.gamma {
                        for &unknown_rate in &self.unknown_rate {
                            out.push(GridPoint {
                                lambda,
                                beta,
                                delta_imbalance,
                                gamma,
                                unknown_rate,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// The first grid with more than one value, or `lambda`.
    pub fn varying_field(&self) -> Field {
        [
            (Field::Lambda, &self.lambda),
            (Field::Beta, &self.beta),
            (Field::DeltaImbalance, &self.delta_imbalance),
            (Field::Gamma, &self.gamma),
            (Field::UnknownRate, &self.unknown_rate),
        ]
        .into_iter()
        .find(|(_, g)| g.len() > 1)
        .map_or(Field::Lambda, |(f, _)| f)
    }

    /// Parses a flat `key = value` file. `#` starts a comment and blank lines
    /// are ignored; grids are comma lists or `start:step:stop` ranges.
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        let mut cfg = ExperimentConfig::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: path.to_path_buf(),
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key = value, found {line:?}")))?;
            cfg.set(key.trim(), value.trim()).map_err(|e| match e {
                Error::Input(m) => parse_err(m),
                other => other,
            })?;
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        Self::parse(&text, path)
    }

    /// Sets one option by its config-file key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::Input(format!("{key}: cannot parse {v:?}")))
        }
        match key {
            "n" => self.n = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "reps" => self.reps = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "alpha" => self.alpha = num(key, value)?,
            "lambda" => self.lambda = parse_grid(value)?,
            "beta" => self.beta = parse_grid(value)?,
            "delta_imbalance" => self.delta_imbalance = parse_grid(value)?,
            "gamma" => self.gamma = parse_grid(value)?,
            "unknown_rate" => self.unknown_rate = parse_grid(value)?,
            "record_timing" => self.record_timing = num(key, value)?,
            "methods" => {
                self.methods = value
                    .split(',')
                    .map(|m| {
                        Method::from_name(m.trim())
                            .ok_or_else(|| Error::Input(format!("unknown method {:?}", m.trim())))
                    })
                    .collect::<Result<_>>()?
            }
            "tuning" => {
                self.tuning = match value.split_once(':') {
                    None if value == "in-sample" => RhoTuning::InSample,
                    // the fold seed is re-derived per replication
                    Some(("kfold", folds)) => RhoTuning::KFold {
                        folds: num(key, folds)?,
                        seed: 0,
                    },
                    _ => {
                        return Err(Error::Input(format!(
                            "tuning must be in-sample or kfold:<folds>, found {value:?}"
                        )))
                    }
                }
            }
            _ => return Err(Error::Input(format!("unknown key {key:?}"))),
        }
        Ok(())
    }
}

/// Parses `a,b,c` or an inclusive `start:step:stop` range.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::Input(format!("cannot parse grid {spec:?}"));
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let values = match parts.as_slice() {
        [start, step, stop] => {
            let (start, step, stop): (f64, f64, f64) = (
                start.parse().map_err(|_| bad())?,
                step.parse().map_err(|_| bad())?,
                stop.parse().map_err(|_| bad())?,
            );
            if !(step > 0.0) || stop < start {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            (0..count)
                .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
                .collect()
        }
        [list] => list
            .split(',')
            .map(|v| v.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

/// One setting of the swept parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub lambda: f64,
    pub beta: f64,
    pub delta_imbalance: f64,
    pub gamma: f64,
    pub unknown_rate: f64,
}

impl GridPoint {
    fn params(&self, cfg: &ExperimentConfig) -> Result<BlockModelParams> {
        let pi = if cfg.k == 2 {
            vec![0.5 - self.delta_imbalance, 0.5 + self.delta_imbalance]
        } else {
            vec![1.0 / cfg.k as f64; cfg.k]
        };
        BlockModelParams::simulation(cfg.n, pi, self.lambda, self.beta, self.gamma, 1.0 - self.unknown_rate)
    }
}

/// One method on one replication of one grid point. Field order is the CSV
/// column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub lambda: f64,
    pub beta: f64,
    pub delta_imbalance: f64,
    pub gamma: f64,
    pub unknown_rate: f64,
    pub rep: usize,
    /// `min(n1/n2, n2/n1)` of the drawn instance.
    pub realized_s: f64,
    pub method: Method,
    pub accuracy: f64,
    pub rho_selected: Option<f64>,
    pub seconds: f64,
}

impl RunRecord {
    pub fn point(&self) -> GridPoint {
        GridPoint {
            lambda: self.lambda,
            beta: self.beta,
            delta_imbalance: self.delta_imbalance,
            gamma: self.gamma,
            unknown_rate: self.unknown_rate,
        }
    }
}

/// A grid point or replication that could not be run.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepFailure {
    pub point: GridPoint,
    pub rep: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepOutcome {
    /// Sorted by grid point, then replication, then method order.
    pub records: Vec<RunRecord>,
    pub failures: Vec<SweepFailure>,
}

/// Fraction of `unlabeled` nodes whose predicted class differs from the truth.
pub fn err_rate(predicted: &LabelSet, truth: &LabelSet, unlabeled: &[usize]) -> Result<f64> {
    if unlabeled.is_empty() {
        return Err(Error::Input("error rate needs at least one unlabeled node".into()));
    }
    let wrong = unlabeled
        .iter()
        .filter(|&&i| predicted.get(i) != truth.get(i))
        .count();
    Ok(wrong as f64 / unlabeled.len() as f64)
}

/// Recall of each true class over `unlabeled`; classes with no member there
/// report 1.
pub fn per_class_recall(predicted: &LabelSet, truth: &LabelSet, unlabeled: &[usize]) -> Vec<f64> {
    let k = truth.num_classes();
    let mut hit = vec![0usize; k];
    let mut total = vec![0usize; k];
    for &i in unlabeled {
        if let Some(c) = truth.get(i) {
            total[c] += 1;
            if predicted.get(i) == Some(c) {
                hit[c] += 1;
            }
        }
    }
    hit.iter()
        .zip(&total)
        .map(|(&h, &t)| if t == 0 { 1.0 } else { h as f64 / t as f64 })
        .collect()
}

fn solver_for(alpha: f64) -> Solver {
    Solver::default_for(alpha)
}

fn run_replication(
    cfg: &ExperimentConfig,
    point: &GridPoint,
    params: &BlockModelParams,
    rep: usize,
) -> Result<Vec<RunRecord>> {
    let inst = pdcbm::generate_replication(params, cfg.seed, rep as u64)?;
    let unlabeled = inst.observed.unknown();
    let solver = solver_for(cfg.alpha);
    let needs_wil = cfg.methods.iter().any(|m| *m != Method::NormalizedLaplacian);
    let clock = Instant::now();
    let comps = if needs_wil {
        Some(WilComponents::compute(&inst.graph, &inst.observed, cfg.alpha, solver)?)
    } else {
        None
    };
    let shared = clock.elapsed().as_secs_f64();
    let mut out = Vec::with_capacity(cfg.methods.len());
    for &method in &cfg.methods {
        let clock = Instant::now();
        let (scores, rho, base) = match (method, &comps) {
            (Method::NormalizedLaplacian, _) => (
                propagate::normalized_laplacian_scores(
                    &inst.graph,
                    &inst.observed.indicator(),
                    cfg.alpha,
                    solver,
                )?,
                None,
                0.0,
            ),
            (Method::Wil, Some(c)) => {
                let sel = match cfg.tuning {
                    RhoTuning::InSample => c.select_rho(&rho_grid())?,
                    RhoTuning::KFold { folds, .. } => {
                        let mode = RhoTuning::KFold {
                            folds,
                            seed: cfg.seed.wrapping_add(rep as u64),
                        };
                        tune_rho(&inst.graph, &inst.observed, cfg.alpha, &rho_grid(), solver, mode)?
                    }
                };
                (c.combine(sel.rho), Some(sel.rho), shared)
            }
            (Method::RowKernel, Some(c)) => (c.combine(1.0), Some(1.0), shared),
            (Method::ColKernel, Some(c)) => (c.combine(0.0), Some(0.0), shared),
            _ => unreachable!("WIL components are computed whenever a WIL method is selected"),
        };
        let prediction = predict(&scores, &inst.observed)?;
        let err = err_rate(&prediction.labels, &inst.truth, &unlabeled)?;
        out.push(RunRecord {
            lambda: point.lambda,
            beta: point.beta,
            delta_imbalance: point.delta_imbalance,
            gamma: point.gamma,
            unknown_rate: point.unknown_rate,
            rep,
            realized_s: inst.realized_balance(),
            method,
            accuracy: 1.0 - err,
            rho_selected: rho,
            seconds: if cfg.record_timing {
                base + clock.elapsed().as_secs_f64()
            } else {
                0.0
            },
        });
    }
    Ok(out)
}

/// Runs every method on every replication of every grid point.
///
/// Replications run in parallel on the current rayon pool. Each draws from
/// its own seed stream and results are collected in grid order, so the
/// output does not depend on the number of workers. Replication `r` uses the
/// same random streams at every grid point. A point whose parameters are
/// invalid is reported in `failures` and the sweep moves on.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<SweepOutcome> {
    cfg.validate()?;
    let mut outcome = SweepOutcome::default();
    let mut tasks = Vec::new();
    for point in cfg.points() {
        match point.params(cfg) {
            Ok(params) => tasks.extend((0..cfg.reps).map(|rep| (point, params.clone(), rep))),
            Err(e) => outcome.failures.push(SweepFailure {
                point,
                rep: None,
                message: e.to_string(),
            }),
        }
    }
    let results: Vec<_> = tasks
        .par_iter()
        .map(|(point, params, rep)| run_replication(cfg, point, params, *rep))
        .collect();
    for ((point, _, rep), result) in tasks.iter().zip(results) {
        match result {
            Ok(records) => outcome.records.extend(records),
            Err(e) => outcome.failures.push(SweepFailure {
                point: *point,
                rep: Some(*rep),
                message: e.to_string(),
            }),
        }
    }
    Ok(outcome)
}

/// Mean over replications of one method at one grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub point: GridPoint,
    pub method: Method,
    pub reps: usize,
    pub mean_accuracy: f64,
    pub mean_rho: Option<f64>,
    pub mean_realized_s: f64,
}

/// Groups records by (grid point, method) in first-seen order.
pub fn summarize(records: &[RunRecord]) -> Vec<SummaryRow> {
    let mut rows: Vec<(SummaryRow, usize)> = Vec::new();
    for r in records {
        let point = r.point();
        let slot = match rows
            .iter()
            .position(|(s, _)| s.point == point && s.method == r.method)
        {
            Some(i) => i,
            None => {
                rows.push((
                    SummaryRow {
                        point,
                        method: r.method,
                        reps: 0,
                        mean_accuracy: 0.0,
                        mean_rho: Some(0.0),
                        mean_realized_s: 0.0,
                    },
                    0,
                ));
                rows.len() - 1
            }
        };
        let (row, rho_count) = &mut rows[slot];
        row.reps += 1;
        row.mean_accuracy += r.accuracy;
        row.mean_realized_s += r.realized_s;
        if let Some(rho) = r.rho_selected {
            *row.mean_rho.as_mut().unwrap() += rho;
            *rho_count += 1;
        }
    }
    rows.into_iter()
        .map(|(mut row, rho_count)| {
            let m = row.reps as f64;
            row.mean_accuracy /= m;
            row.mean_realized_s /= m;
            row.mean_rho = row
                .mean_rho
                .filter(|_| rho_count > 0)
                .map(|s| s / rho_count as f64);
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> ExperimentConfig {
        ExperimentConfig {
            n: 120,
            lambda: vec![6.0],
            reps: 2,
            ..ExperimentConfig::default()
        }
    }

    #[test]
    fn err_rate_counts() {
        let truth = LabelSet::full(2, &[0, 0, 0, 1, 1, 1, 0, 1, 0, 1]).unwrap();
        let all: Vec<usize> = (0..10).collect();
        assert_eq!(err_rate(&truth, &truth, &all).unwrap(), 0.0);
        let flipped = LabelSet::full(2, &[1, 1, 1, 0, 0, 0, 1, 0, 1, 0]).unwrap();
        assert_eq!(err_rate(&flipped, &truth, &all).unwrap(), 1.0);
        let three = LabelSet::full(2, &[1, 1, 1, 1, 1, 1, 0, 1, 0, 1]).unwrap();
        assert!((err_rate(&three, &truth, &all).unwrap() - 0.3).abs() < 1e-15);
        assert!(err_rate(&truth, &truth, &[]).is_err());
    }

    #[test]
    fn recall_conventions() {
        let truth = LabelSet::full(3, &[0, 0, 1, 1, 1, 1]).unwrap();
        let all: Vec<usize> = (0..6).collect();
        assert_eq!(per_class_recall(&truth, &truth, &all), vec![1.0, 1.0, 1.0]);
        let majority = LabelSet::full(3, &[1; 6]).unwrap();
        assert_eq!(per_class_recall(&majority, &truth, &all), vec![0.0, 1.0, 1.0]);
        let mixed = LabelSet::full(3, &[0, 1, 1, 0, 1, 1]).unwrap();
        assert_eq!(per_class_recall(&mixed, &truth, &all), vec![0.5, 0.75, 1.0]);
    }

    #[test]
    fn grid_specs() {
        assert_eq!(parse_grid("0.1, 0.2,0.5").unwrap(), vec![0.1, 0.2, 0.5]);
        assert_eq!(parse_grid("0.1:0.1:0.5").unwrap(), vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        assert_eq!(parse_grid("2:2:12").unwrap().len(), 6);
        assert!(parse_grid("").is_err());
        assert!(parse_grid("1:0:2").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn config_file_parsing() {
        let text = "# demo\nn = 500  # nodes\nlambda = 4,8,12\nmethods = wil, row-kernel\n\ntuning = kfold:5\n";
        let cfg = ExperimentConfig::parse(text, Path::new("demo.cfg")).unwrap();
        assert_eq!(cfg.n, 500);
        assert_eq!(cfg.lambda, vec![4.0, 8.0, 12.0]);
        assert_eq!(cfg.methods, vec![Method::Wil, Method::RowKernel]);
        assert_eq!(cfg.tuning, RhoTuning::KFold { folds: 5, seed: 0 });
        assert_eq!(cfg.varying_field(), Field::Lambda);
        let err = ExperimentConfig::parse("n = 5\nbogus = 1\n", Path::new("x.cfg")).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(ExperimentConfig::parse("lambda\n", Path::new("x.cfg")).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = tiny();
        cfg.reps = 0;
        assert!(cfg.validate().is_err());
        let mut cfg = tiny();
        cfg.beta.clear();
        assert!(matches!(cfg.validate(), Err(Error::Input(_))));
        let mut cfg = tiny();
        cfg.delta_imbalance = vec![0.5];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn sweep_is_reproducible_and_sorted() {
        let cfg = tiny();
        let a = run_sweep(&cfg).unwrap();
        let b = run_sweep(&cfg).unwrap();
        assert!(a.failures.is_empty());
        assert_eq!(a.records, b.records);
        assert_eq!(a.records.len(), 2 * Method::ALL.len());
        assert_eq!(a.records[0].rep, 0);
        assert_eq!(a.records[4].rep, 1);
        for r in &a.records {
            assert!((0.0..=1.0).contains(&r.accuracy));
            assert_eq!(r.seconds, 0.0);
            if let Some(rho) = r.rho_selected {
                assert!(rho_grid().contains(&rho));
            }
        }
        let nl = a.records.iter().find(|r| r.method == Method::NormalizedLaplacian).unwrap();
        assert_eq!(nl.rho_selected, None);
    }

    #[test]
    fn bad_point_does_not_stop_sweep() {
        let mut cfg = tiny();
        // a mean degree above n - 1 cannot be rescaled into probabilities
        cfg.lambda = vec![6.0, 500.0];
        let out = run_sweep(&cfg).unwrap();
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.failures[0].point.lambda, 500.0);
        assert_eq!(out.records.len(), 2 * Method::ALL.len());
    }

    #[test]
    fn summary_means() {
        let out = run_sweep(&tiny()).unwrap();
        let rows = summarize(&out.records);
        assert_eq!(rows.len(), Method::ALL.len());
        let wil: Vec<f64> = out
            .records
            .iter()
            .filter(|r| r.method == Method::Wil)
            .map(|r| r.accuracy)
            .collect();
        assert!((rows[0].mean_accuracy - (wil[0] + wil[1]) / 2.0).abs() < 1e-15);
        assert_eq!(rows[0].reps, 2);
        assert_eq!(rows[3].mean_rho, None);
        assert_eq!(rows[1].mean_rho, Some(1.0));
    }
}
