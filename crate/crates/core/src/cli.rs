//! Command-line front end. `netprop <subcommand> --help` lists every flag.
//!
//! Exit codes: 0 on success, 1 for unreadable or malformed input (including
//! bad flags), 2 for parameters outside their domain.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bench::{self, BoundaryConfig, ExperimentConfig, Field, RateConfig};
use crate::error::{Error, Result};
use crate::ingest::{self, DatasetBundle, Preprocess};
use crate::pdcbm::{self, BlockModelParams, LabelSampling};
use crate::propagate::{
    self, default_alpha, predict, rho_grid, series_terms_for, tune_rho, PropagationConfig,
    RhoTuning, Solver,
};
use crate::theory;

#[derive(Debug, Parser)]
#[command(name = "netprop", version, about = "Label propagation on degree-heterogeneous, imbalanced networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Draw a block-model network and write it as an edge list plus label files.
    Generate(GenerateArgs),
    /// Predict the labels of unlabeled nodes with WIL.
    Predict(PredictArgs),
    /// Report in-sample (or k-fold) accuracy over the rho grid.
    Tune(TuneArgs),
    /// Monte Carlo sweep over block-model parameters.
    Sweep(SweepArgs),
    /// Analytic consistency regions, optionally with a Monte Carlo check.
    Boundary(BoundaryArgs),
    /// Error rate as the mean degree grows.
    Rate(RateArgs),
    /// Node, edge and class counts of a dataset.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// Decay in (0, 1).
    #[arg(long, default_value_t = default_alpha())]
    pub alpha: f64,
    /// `series` (truncated power series) or `direct` (dense LU, small graphs).
    #[arg(long, default_value = "series")]
    pub solver: String,
    /// Series truncation order; defaults to ceil(ln 1e-6 / ln alpha).
    #[arg(long)]
    pub m: Option<usize>,
}

impl SolverArgs {
    fn solver(&self) -> Result<Solver> {
        PropagationConfig::new(self.alpha, 0.5)?;
        match self.solver.as_str() {
            "series" => Ok(Solver::Series {
                terms: self.m.unwrap_or_else(|| series_terms_for(self.alpha, 1e-6)),
            }),
            "direct" => Ok(Solver::Direct),
            other => Err(Error::Input(format!("unknown solver {other:?} (series|direct)"))),
        }
    }
}

#[derive(Debug, Args)]
pub struct DatasetArgs {
    /// Edge list: one `u v` pair per line, `#` comments.
    #[arg(long)]
    pub edges: PathBuf,
    /// CSV `id,label` (optional header); missing ids are unlabeled.
    #[arg(long)]
    pub labels: PathBuf,
}

impl DatasetArgs {
    fn load(&self) -> Result<DatasetBundle> {
        let name = self
            .edges
            .file_stem()
            .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
        DatasetBundle::load(&name, &self.edges, &self.labels)
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Number of classes (uniform prior unless --delta-imbalance is set).
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    /// Mean degree.
    #[arg(long, default_value_t = 7.0)]
    pub lambda: f64,
    /// Out-in ratio of the block matrix.
    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,
    /// Weight of the low popularity value 0.2.
    #[arg(long, default_value_t = 0.0)]
    pub gamma: f64,
    /// Two-class imbalance: pi = (1/2 - d, 1/2 + d).
    #[arg(long, default_value_t = 0.0)]
    pub delta_imbalance: f64,
    /// Fraction of labels withheld.
    #[arg(long, default_value_t = 0.9)]
    pub unknown_rate: f64,
    /// Probability that a revealed label is correct.
    #[arg(long, default_value_t = 1.0)]
    pub nu: f64,
    /// Reveal round(delta n_c) labels in every class.
    #[arg(long)]
    pub stratified: bool,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    /// File name stem for `<stem>.edges`, `<stem>.labels.csv`, `<stem>.observed.csv`.
    #[arg(long, default_value = "pdcbm")]
    pub stem: String,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Mixing weight in [0, 1], or `auto` to tune on the grid {0, 0.1, ..., 1}.
    #[arg(long, default_value = "auto")]
    pub rho: String,
    /// Output CSV; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Use k-fold tuning with this many folds instead of in-sample.
    #[arg(long)]
    pub folds: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Flat `key = value` file; flags below override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// 2000 nodes and 50 replications.
    #[arg(long)]
    pub paper_scale: bool,
    #[arg(long, default_value = ".")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub reps: Option<usize>,
    /// Grid: `a,b,c` or `start:step:stop`.
    #[arg(long)]
    pub lambda: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(long)]
    pub delta_imbalance: Option<String>,
    #[arg(long)]
    pub gamma: Option<String>,
    #[arg(long)]
    pub unknown_rate: Option<String>,
    /// Comma list from wil, row-kernel, col-kernel, normalized-laplacian.
    #[arg(long)]
    pub methods: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Fill the `seconds` column (output is then no longer reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct BoundaryArgs {
    #[arg(long, default_value_t = 0.3)]
    pub beta: f64,
    /// Balance ratios: `a,b,c` or `start:step:stop`, each in (0, 1].
    #[arg(long, default_value = "0.05:0.05:1")]
    pub s_grid: String,
    /// Region-map CSV; the chart goes next to it with an `.svg` extension.
    #[arg(long, default_value = "boundary.csv")]
    pub out: PathBuf,
    /// Also run the kernels on simulated networks (`<out stem>.mc.csv`).
    #[arg(long)]
    pub monte_carlo: bool,
    #[arg(long, default_value_t = 4000)]
    pub n: usize,
    #[arg(long, default_value_t = 40.0)]
    pub lambda: f64,
    /// Fraction of labels revealed.
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.1)]
    pub alpha: f64,
}

#[derive(Debug, Args)]
pub struct RateArgs {
    /// Mean degrees: `a,b,c` or `start:step:stop`.
    #[arg(long, default_value = "4,8,12")]
    pub d_grid: String,
    #[arg(long, default_value_t = 0.2)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    #[arg(long, default_value_t = 0.1)]
    pub delta: f64,
    #[arg(long, default_value_t = 2000)]
    pub n: usize,
    #[arg(long, default_value_t = 20)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, default_value_t = default_alpha())]
    pub alpha: f64,
    /// CSV `d,mean_err,reps`; stdout if omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub data: DatasetArgs,
    /// Restrict to the largest connected component first.
    #[arg(long)]
    pub lcc: bool,
    /// Remove unlabeled nodes before taking the component.
    #[arg(long)]
    pub drop_unlabeled: bool,
    /// Comma list of class names to keep.
    #[arg(long)]
    pub keep_classes: Option<String>,
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match with_thread_cap(|| execute(cli.command)) {
        Ok(()) => 0,
        // downstream reader closed early (`netprop predict ... | head`)
        Err(e) if is_broken_pipe(&e) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn is_broken_pipe(e: &Error) -> bool {
    let io = match e {
        Error::Io { source, .. } => Some(source),
        Error::Csv(c) => match c.kind() {
            csv::ErrorKind::Io(io) => Some(io),
            _ => None,
        },
        _ => None,
    };
    io.is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe)
}

fn with_thread_cap(f: impl FnOnce() -> Result<()> + Send) -> Result<()> {
    let Ok(raw) = std::env::var("NETPROP_THREADS") else {
        return f();
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| Error::Parameter(format!("NETPROP_THREADS={raw:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Parameter(format!("cannot start {threads} threads: {e}")))?
        .install(f)
}

pub fn execute(cmd: Command) -> Result<()> {
    match cmd {
        Command::Generate(a) => generate(a),
        Command::Predict(a) => predict_cmd(a),
        Command::Tune(a) => tune(a),
        Command::Sweep(a) => sweep(a),
        Command::Boundary(a) => boundary(a),
        Command::Rate(a) => rate(a),
        Command::Stats(a) => stats(a),
    }
}

fn create(path: &Path) -> Result<std::io::BufWriter<std::fs::File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| Error::io(format!("creating {}", dir.display()), e))?;
    }
    std::fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| Error::io(format!("creating {}", path.display()), e))
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn generate(a: GenerateArgs) -> Result<()> {
    let pi = if a.k == 2 {
        vec![0.5 - a.delta_imbalance, 0.5 + a.delta_imbalance]
    } else if a.delta_imbalance == 0.0 {
        vec![1.0 / a.k as f64; a.k]
    } else {
        return Err(Error::Parameter("--delta-imbalance needs --k 2".into()));
    };
    if !(0.0..1.0).contains(&a.unknown_rate) {
        return Err(Error::Parameter(format!("unknown rate {} outside [0, 1)", a.unknown_rate)));
    }
    let mut params =
        BlockModelParams::simulation(a.n, pi, a.lambda, a.beta, a.gamma, 1.0 - a.unknown_rate)?;
    params.nu = a.nu;
    if a.stratified {
        params.sampling = LabelSampling::Stratified;
    }
    params.validate()?;
    let inst = pdcbm::generate(&params, a.seed)?;
    let ep = a.out_dir.join(format!("{}.edges", a.stem));
    let lp = a.out_dir.join(format!("{}.labels.csv", a.stem));
    let op = a.out_dir.join(format!("{}.observed.csv", a.stem));
    ingest::write_edge_list(&inst.graph, None, create(&ep)?)?;
    let truth = ingest::without_isolated(&inst.truth, &inst.graph);
    let observed = ingest::without_isolated(&inst.observed, &inst.graph);
    ingest::write_labels(&truth, None, None, create(&lp)?)?;
    ingest::write_labels(&observed, None, None, create(&op)?)?;
    let isolated = (0..a.n).filter(|&i| inst.graph.degree(i) == 0).count();
    println!(
        "nodes={} edges={} isolated={} revealed={} realized_s={:.4}",
        a.n,
        inst.graph.edge_count(),
        isolated,
        inst.observed.known_count(),
        inst.realized_balance()
    );
    println!("{}\n{}\n{}", ep.display(), lp.display(), op.display());
    Ok(())
}

fn parse_rho(raw: &str) -> Result<Option<f64>> {
    if raw == "auto" {
        return Ok(None);
    }
    let rho: f64 = raw
        .parse()
        .map_err(|_| Error::Input(format!("--rho expects a number or auto, found {raw:?}")))?;
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::Parameter(format!("rho = {rho} outside [0, 1]")));
    }
    Ok(Some(rho))
}

fn predict_cmd(a: PredictArgs) -> Result<()> {
    let rho = parse_rho(&a.rho)?;
    let solver = a.solver.solver()?;
    let bundle = a.data.load()?;
    let comps =
        propagate::WilComponents::compute(&bundle.graph, &bundle.labels, a.solver.alpha, solver)?;
    let rho = match rho {
        Some(r) => r,
        None => {
            let sel = comps.select_rho(&rho_grid())?;
            eprintln!("selected rho = {}", sel.rho);
            sel.rho
        }
    };
    let scores = comps.combine(rho);
    let pred = predict(&scores, &bundle.labels)?;
    if !pred.zero_rows.is_empty() {
        eprintln!(
            "warning: {} unlabeled nodes received no score (no labeled node in their component)",
            pred.zero_rows.len()
        );
    }
    let mut w = csv::Writer::from_writer(output(a.out.as_deref())?);
    let k = scores.cols();
    let mut header = vec!["id".to_string(), "predicted_label".to_string()];
    header.extend((1..=k).map(|c| format!("score_{c}")));
    w.write_record(&header)?;
    for i in 0..bundle.graph.node_count() {
        let c = pred.labels.get(i).unwrap();
        let mut row = vec![
            bundle.ids.name(i).to_string(),
            bundle.classes.get(c).cloned().unwrap_or_else(|| (c + 1).to_string()),
        ];
        row.extend(scores.row(i).iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("writing predictions", e))
}

fn tune(a: TuneArgs) -> Result<()> {
    let solver = a.solver.solver()?;
    let bundle = a.data.load()?;
    let mode = match a.folds {
        None => RhoTuning::InSample,
        Some(folds) => RhoTuning::KFold { folds, seed: a.seed },
    };
    let sel = tune_rho(&bundle.graph, &bundle.labels, a.solver.alpha, &rho_grid(), solver, mode)?;
    println!("rho,accuracy");
    for (rho, acc) in &sel.accuracy {
        println!("{rho},{acc:.6}");
    }
    eprintln!("selected rho = {}", sel.rho);
    Ok(())
}

fn sweep_config(a: &SweepArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(p) => ExperimentConfig::from_file(p)?,
        None => ExperimentConfig::default(),
    };
    if a.paper_scale {
        cfg = cfg.paper_scale();
    }
    let grids = [
        ("lambda", &a.lambda),
        ("beta", &a.beta),
        ("delta_imbalance", &a.delta_imbalance),
        ("gamma", &a.gamma),
        ("unknown_rate", &a.unknown_rate),
        ("methods", &a.methods),
    ];
    for (key, value) in grids {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    if let Some(n) = a.n {
        cfg.n = n;
    }
    if let Some(r) = a.reps {
        cfg.reps = r;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(alpha) = a.alpha {
        cfg.alpha = alpha;
    }
    cfg.record_timing |= a.timing;
    Ok(cfg)
}

fn sweep(a: SweepArgs) -> Result<()> {
    let cfg = sweep_config(&a)?;
    let outcome = bench::run_sweep(&cfg)?;
    for f in &outcome.failures {
        eprintln!(
            "skipped lambda={} beta={} delta_imbalance={} gamma={} unknown_rate={}{}: {}",
            f.point.lambda,
            f.point.beta,
            f.point.delta_imbalance,
            f.point.gamma,
            f.point.unknown_rate,
            f.rep.map_or(String::new(), |r| format!(" rep={r}")),
            f.message
        );
    }
    let csv_path = a.out_dir.join("sweep.csv");
    let svg_path = a.out_dir.join("sweep.svg");
    bench::emit_csv(&outcome.records, create(&csv_path)?)?;
    let svg = bench::emit_svg_lines(&outcome.records, cfg.varying_field(), Field::Accuracy);
    create(&svg_path)?
        .write_all(svg.as_bytes())
        .map_err(|e| Error::io("writing sweep chart", e))?;
    println!(
        "{:>7} {:>6} {:>6} {:>6} {:>7}  {:<21} {:>5} {:>9} {:>7}",
        "lambda", "beta", "imbal", "gamma", "unknown", "method", "reps", "accuracy", "rho"
    );
    for row in bench::summarize(&outcome.records) {
        let p = row.point;
        println!(
            "{:>7} {:>6} {:>6} {:>6} {:>7}  {:<21} {:>5} {:>9.4} {:>7}",
            p.lambda,
            p.beta,
            p.delta_imbalance,
            p.gamma,
            p.unknown_rate,
            row.method.name(),
            row.reps,
            row.mean_accuracy,
            row.mean_rho.map_or("-".to_string(), |r| format!("{r:.3}"))
        );
    }
    println!("{}\n{}", csv_path.display(), svg_path.display());
    if !outcome.failures.is_empty() && outcome.records.is_empty() {
        return Err(Error::Parameter("every grid point failed".into()));
    }
    Ok(())
}

fn boundary(a: BoundaryArgs) -> Result<()> {
    if !(a.beta > 0.0 && a.beta < 1.0) {
        return Err(Error::Parameter(format!("beta = {} outside (0, 1)", a.beta)));
    }
    let s_grid = bench::parse_grid(&a.s_grid)?;
    if let Some(s) = s_grid.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
        return Err(Error::Parameter(format!("s = {s} outside (0, 1]")));
    }
    let map = theory::boundary_map(&s_grid, &[a.beta]);
    theory::write_boundary_csv(&map, create(&a.out)?)?;
    let svg_path = a.out.with_extension("svg");
    create(&svg_path)?
        .write_all(bench::region_svg(100, Some(a.beta)).as_bytes())
        .map_err(|e| Error::io("writing region chart", e))?;
    println!("{}\n{}", a.out.display(), svg_path.display());
    if a.monte_carlo {
        let cfg = BoundaryConfig {
            beta: a.beta,
            s_grid,
            n: a.n,
            lambda: a.lambda,
            delta: a.delta,
            reps: a.reps,
            seed: a.seed,
            alpha: a.alpha,
        };
        let rows = bench::boundary_experiment(&cfg)?;
        let stem = a.out.file_stem().map_or("boundary".into(), |s| s.to_string_lossy().into_owned());
        let mc_path = a.out.with_file_name(format!("{stem}.mc.csv"));
        bench::write_boundary_rows_csv(&rows, a.beta, create(&mc_path)?)?;
        println!("{:>6}  {:<21} {:>9} {:>15}", "s", "kernel", "predicted", "minority_recall");
        for r in &rows {
            println!(
                "{:>6}  {:<21} {:>9} {:>15.4}",
                r.s,
                r.kernel.name(),
                r.predicted,
                r.minority_recall
            );
        }
        println!("{}", mc_path.display());
    }
    Ok(())
}

fn rate(a: RateArgs) -> Result<()> {
    let cfg = RateConfig {
        d_grid: bench::parse_grid(&a.d_grid)?,
        beta: a.beta,
        s: a.s,
        delta: a.delta,
        n: a.n,
        reps: a.reps,
        seed: a.seed,
        alpha: a.alpha,
    };
    let table = bench::rate_experiment(&cfg)?;
    let mut out = output(a.out.as_deref())?;
    let io = |e| Error::io("writing rate table", e);
    writeln!(out, "d,mean_err,reps").map_err(io)?;
    for r in &table.rows {
        writeln!(out, "{},{},{}", r.d, r.mean_err, r.reps).map_err(io)?;
    }
    out.flush().map_err(io)?;
    match table.slope {
        Some(s) => eprintln!("log-log slope of err against d: {s:.3}"),
        None => eprintln!("log-log slope undefined (zero error)"),
    }
    Ok(())
}

fn stats(a: StatsArgs) -> Result<()> {
    let mut bundle = a.data.load()?;
    if a.lcc || a.drop_unlabeled || a.keep_classes.is_some() {
        let opts = Preprocess {
            drop_unlabeled: a.drop_unlabeled,
            keep_classes: a
                .keep_classes
                .as_ref()
                .map(|s| s.split(',').map(|c| c.trim().to_string()).collect()),
        };
        bundle = ingest::preprocess(&bundle, &opts)?;
    }
    let s = ingest::dataset_stats(&bundle);
    println!("name,nodes,edges,classes,average_degree");
    println!(
        "{},{},{},{},{}",
        bundle.name,
        s.nodes,
        s.edges,
        s.classes,
        s.average_degree_2dp()
    );
    Ok(())
}
