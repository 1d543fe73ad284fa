//! Subcommands of the `npstm` binary.
//!
//! Exit codes: 0 success, 2 usage, 3 data or I/O, 4 numeric failure.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use npstm::dataset::{
    generate_synthetic, read_csv, read_csv_unlabeled, read_tds, write_csv, write_tds, TensorDataset,
};
use npstm::eval::{
    crossval, emit_report, friedman_chi2, nemenyi_cd, nemenyi_q, rank_row, summarize, Cell,
    Classifier, CvConfig, GridParam, GridSpec, RankTable, ReportFormat, ResultTable,
};
use npstm::model::{
    decide, distances, load_model, primal_objective, save_model, train_with_report, Hyperparams,
    Label, Plane,
};
use npstm::multilinear::DenseTensor;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] npstm::Error),
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Lib(e.into())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Lib(npstm::Error::Argument(_)) => 2,
            CliError::Lib(npstm::Error::Numeric(_)) => 4,
            CliError::Lib(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(
    name = "npstm",
    version,
    about = "Large-margin-distribution nonparallel support tensor machine"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a seeded synthetic two-class dataset
    Synth(SynthArgs),
    /// Convert between CSV and TDS dataset files
    Convert(ConvertArgs),
    /// Train a model and save it
    Train(TrainArgs),
    /// Apply a saved model to a dataset
    Predict(PredictArgs),
    /// Repeated stratified cross-validation of one classifier
    Crossval(CrossvalArgs),
    /// Cross-validate classifiers over datasets and report ranks and statistics
    Bench(BenchArgs),
    /// Ranks, Friedman test and Nemenyi critical difference from a metric table
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
pub struct HyperArgs {
    /// CP rank of both weight tensors
    #[arg(long, default_value_t = 1)]
    pub rank: usize,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c3: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c4: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l3: f64,
    #[arg(long, default_value_t = 1.0)]
    pub l4: f64,
    /// Relative weight change at which training stops
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    /// Outer iteration cap
    #[arg(long = "max-iter", default_value_t = 5000)]
    pub max_iter: usize,
    /// Ridge on the dual Gram matrices, relative to their mean diagonal
    #[arg(long, default_value_t = 1e-8)]
    pub ridge: f64,
    /// Seed for initialization and fold assignment
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl HyperArgs {
    pub fn to_hyper(&self) -> Hyperparams {
        Hyperparams {
            c1: self.c1,
            c2: self.c2,
            c3: self.c3,
            c4: self.c4,
            lambda1: self.l1,
            lambda2: self.l2,
            lambda3: self.l3,
            lambda4: self.l4,
            rank: self.rank,
            eps: self.eps,
            max_outer: self.max_iter,
            ridge: self.ridge,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Dataset file (.tds, or .csv with --dims)
    #[arg(long)]
    pub data: PathBuf,
    /// Sample shape for CSV input, e.g. 4,4
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    pub dims: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub m1: usize,
    #[arg(long, default_value_t = 20)]
    pub m2: usize,
    #[arg(long, default_value_t = 3.0)]
    pub sep: f64,
    #[arg(long, default_value_t = 1.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ConvertArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output file; a .csv extension writes CSV, anything else TDS
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    /// Model file to write
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub data: DataArgs,
    /// Input rows carry no label column
    #[arg(long)]
    pub unlabeled: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Select hyperparameters by inner cross-validation on each training split
    #[arg(long)]
    pub grid: bool,
    /// Candidate values; defaults to 2^-5, 2^-3, ..., 2^7
    #[arg(long = "grid-values", value_delimiter = ',')]
    pub grid_values: Option<Vec<f64>>,
    /// Tied pairs to search: c12, c34, l12, l34
    #[arg(long = "grid-params", value_delimiter = ',')]
    pub grid_params: Option<Vec<String>>,
    #[arg(long = "inner-folds", default_value_t = 3)]
    pub inner_folds: usize,
}

impl GridArgs {
    fn spec(&self) -> Result<Option<GridSpec>> {
        if !self.grid {
            return Ok(None);
        }
        let mut spec = GridSpec::default_theta();
        if let Some(v) = &self.grid_values {
            if v.is_empty() || v.iter().any(|x| !x.is_finite() || *x <= 0.0) {
                return Err(CliError::Usage("grid values must be positive".into()));
            }
            spec.values = v.clone();
        }
        if let Some(p) = &self.grid_params {
            spec.params = p
                .iter()
                .map(|s| s.parse::<GridParam>())
                .collect::<npstm::Result<_>>()?;
        }
        spec.inner_folds = self.inner_folds;
        Ok(Some(spec))
    }
}

#[derive(Debug, Args)]
pub struct CvArgs {
    #[arg(long, default_value_t = 10)]
    pub folds: usize,
    #[arg(long, default_value_t = 10)]
    pub repeats: usize,
    /// Penalty of the SVM baseline
    #[arg(long = "svm-c", default_value_t = 1.0)]
    pub svm_c: f64,
    /// Report zero times so output is reproducible byte for byte
    #[arg(long = "no-timing")]
    pub no_timing: bool,
    #[command(flatten)]
    pub grid: GridArgs,
}

#[derive(Debug, Args)]
pub struct CrossvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, default_value = "ldm-npstm")]
    pub classifier: String,
    #[command(flatten)]
    pub cv: CvArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Dataset files (.tds, or .csv with --dims); repeat or comma-separate
    #[arg(long, value_delimiter = ',', required = true)]
    pub data: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub dims: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', default_value = "ldm-npstm,svm")]
    pub classifiers: Vec<String>,
    /// Classifier the W/T/L tallies are computed against (default: first)
    #[arg(long)]
    pub reference: Option<String>,
    #[arg(long, default_value = "markdown")]
    pub format: String,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Dataset count used in the Friedman statistic (default: number of datasets)
    #[arg(long = "stats-n")]
    pub stats_n: Option<usize>,
    #[command(flatten)]
    pub cv: CvArgs,
    #[command(flatten)]
    pub hyper: HyperArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// CSV with a header `dataset,<classifier>,...` and one metric row per dataset
    #[arg(long, conflicts_with = "avg_ranks")]
    pub input: Option<PathBuf>,
    /// Average ranks given directly, e.g. 2.2222,3.0185,...
    #[arg(long = "avg-ranks", value_delimiter = ',', requires = "n")]
    pub avg_ranks: Option<Vec<f64>>,
    /// Number of datasets behind the ranks (default: rows of --input)
    #[arg(long)]
    pub n: Option<usize>,
    /// Smaller metric values are better (e.g. times)
    #[arg(long = "lower-is-better")]
    pub lower_is_better: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth(a) => cmd_synth(a),
        Command::Convert(a) => cmd_convert(a),
        Command::Train(a) => cmd_train(a),
        Command::Predict(a) => cmd_predict(a),
        Command::Crossval(a) => cmd_crossval(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

fn is_csv(path: &Path) -> bool {
    path.extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| data_error(format!("{}: {e}", path.display())).into())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| data_error(format!("{}: {e}", path.display())).into())
}

fn sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(io::stdout().lock()),
    })
}

fn load(path: &Path, dims: Option<&[usize]>) -> Result<TensorDataset> {
    let f = open(path)?;
    if is_csv(path) {
        let dims = dims.ok_or_else(|| {
            CliError::Usage(format!("{}: CSV input needs --dims", path.display()))
        })?;
        Ok(read_csv(f, dims)?)
    } else {
        Ok(read_tds(f)?)
    }
}

fn require_both_classes(ds: &TensorDataset, path: &Path) -> Result<()> {
    let (p, n) = ds.class_counts();
    if p == 0 || n == 0 {
        return Err(data_error(format!(
            "{}: needs samples of both classes, found {p} positive and {n} negative",
            path.display()
        ))
        .into());
    }
    Ok(())
}

fn shape(dims: &[usize]) -> String {
    dims.iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("x")
}

fn check_alpha(alpha: f64) -> Result<()> {
    if (alpha - 0.05).abs() < 1e-12 || (alpha - 0.10).abs() < 1e-12 {
        Ok(())
    } else {
        Err(CliError::Usage(format!(
            "--alpha must be 0.05 or 0.10, got {alpha}"
        )))
    }
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let ds = generate_synthetic(&a.dims, a.m1, a.m2, a.sep, a.noise, a.seed)?;
    let mut w = create(&a.out)?;
    write_tds(&ds, &mut w)?;
    println!(
        "wrote {} samples ({} positive, {} negative) of shape {} to {}",
        ds.count(),
        a.m1,
        a.m2,
        shape(ds.dims()),
        a.out.display()
    );
    Ok(())
}

fn cmd_convert(a: ConvertArgs) -> Result<()> {
    let ds = load(&a.input, a.dims.as_deref())?;
    let mut w = create(&a.out)?;
    if is_csv(&a.out) {
        write_csv(&ds, &mut w)?;
    } else {
        write_tds(&ds, &mut w)?;
    }
    println!(
        "converted {} samples of shape {} to {}",
        ds.count(),
        shape(ds.dims()),
        a.out.display()
    );
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let hyper = a.hyper.to_hyper();
    hyper.validate()?;
    let ds = load(&a.data.data, a.data.dims.as_deref())?;
    require_both_classes(&ds, &a.data.data)?;
    let ts = ds.training_set(&(0..ds.count()).collect::<Vec<_>>())?;
    let (model, report) = train_with_report(&ts, &hyper)?;
    let mut w = create(&a.out)?;
    save_model(&model, &mut w)?;
    w.flush()?;
    let obj1 = primal_objective(model.factors(Plane::Positive), &ts, &hyper, Plane::Positive)?;
    let obj2 = primal_objective(model.factors(Plane::Negative), &ts, &hyper, Plane::Negative)?;
    println!("outer_iters={}", model.outer_iters());
    println!("converged={}", model.converged());
    println!("objective1={obj1:.10e}");
    println!("objective2={obj2:.10e}");
    println!(
        "qp_solves={} qp_unconverged={}",
        report.qp_solves, report.qp_unconverged
    );
    println!("model written to {}", a.out.display());
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let model = load_model(open(&a.model)?)?;
    let path = &a.data.data;
    let dims = a.data.dims.clone().unwrap_or_else(|| model.dims().to_vec());
    let (samples, labels): (Vec<DenseTensor>, Option<Vec<Label>>) = if is_csv(path) {
        if a.unlabeled {
            (read_csv_unlabeled(open(path)?, &dims)?, None)
        } else {
            let ds = read_csv(open(path)?, &dims)?;
            (ds.samples().to_vec(), Some(ds.labels().to_vec()))
        }
    } else {
        let ds = read_tds(open(path)?)?;
        let labels = (!a.unlabeled).then(|| ds.labels().to_vec());
        (ds.samples().to_vec(), labels)
    };
    if let Some(s) = samples.first() {
        if s.dims() != model.dims() {
            return Err(npstm::Error::Dimension(format!(
                "data shape {} does not match model shape {}",
                shape(s.dims()),
                shape(model.dims())
            ))
            .into());
        }
    }
    let mut out = sink(&a.out)?;
    writeln!(out, "index,label,distance1,distance2")?;
    let mut correct = 0;
    for (i, x) in samples.iter().enumerate() {
        let [d1, d2] = distances(&model, x)?;
        let label = decide(&model, x)?;
        writeln!(out, "{i},{label},{d1:.10e},{d2:.10e}")?;
        if labels.as_ref().is_some_and(|l| l[i] == label) {
            correct += 1;
        }
    }
    if labels.is_some() {
        let n = samples.len();
        writeln!(
            out,
            "# ACCU={:.6} ({correct}/{n})",
            correct as f64 / n as f64
        )?;
    }
    out.flush()?;
    Ok(())
}

fn cv_config(cv: &CvArgs, hyper: &HyperArgs) -> Result<CvConfig> {
    let h = hyper.to_hyper();
    h.validate()?;
    Ok(CvConfig {
        hyper: h,
        svm_c: cv.svm_c,
        folds: cv.folds,
        repeats: cv.repeats,
        seed: hyper.seed,
        timing: !cv.no_timing,
        grid: cv.grid.spec()?,
    })
}

fn cmd_crossval(a: CrossvalArgs) -> Result<()> {
    let classifier: Classifier = a.classifier.parse()?;
    let cfg = cv_config(&a.cv, &a.hyper)?;
    let ds = load(&a.data.data, a.data.dims.as_deref())?;
    require_both_classes(&ds, &a.data.data)?;
    let res = crossval(&ds, classifier, &cfg)?;
    let mut out = sink(&a.out)?;
    writeln!(out, "repeat,fold,accuracy,time")?;
    let per = res.fold_accuracies.len() / cfg.repeats;
    for (i, (acc, t)) in res.fold_accuracies.iter().zip(&res.fold_times).enumerate() {
        writeln!(out, "{},{},{acc:.6},{t:.6}", i / per.max(1), i % per.max(1))?;
    }
    let c = res.cell;
    writeln!(
        out,
        "# classifier={classifier} folds={} repeats={} accuracy={:.6}±{:.6} time={:.6}±{:.6}",
        cfg.folds, cfg.repeats, c.acc_mean, c.acc_std, c.time_mean, c.time_std
    )?;
    out.flush()?;
    Ok(())
}

fn dataset_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let format: ReportFormat = a.format.parse()?;
    check_alpha(a.alpha)?;
    let classifiers: Vec<Classifier> = a
        .classifiers
        .iter()
        .map(|c| c.parse())
        .collect::<npstm::Result<_>>()?;
    if classifiers.is_empty() {
        return Err(CliError::Usage("no classifiers given".into()));
    }
    let reference = a
        .reference
        .clone()
        .unwrap_or_else(|| classifiers[0].to_string());
    if !classifiers.iter().any(|c| c.to_string() == reference) {
        return Err(CliError::Usage(format!(
            "reference {reference:?} is not among the classifiers"
        )));
    }
    let cfg = cv_config(&a.cv, &a.hyper)?;
    let mut names = Vec::new();
    let mut rows = Vec::new();
    for path in &a.data {
        let ds = load(path, a.dims.as_deref())?;
        require_both_classes(&ds, path)?;
        let row = classifiers
            .iter()
            .map(|&c| crossval(&ds, c, &cfg).map(|o| o.cell))
            .collect::<npstm::Result<Vec<Cell>>>()?;
        names.push(dataset_name(path));
        rows.push(row);
    }
    let table = ResultTable::new(
        names,
        classifiers.iter().map(|c| c.to_string()).collect(),
        rows,
    )?;
    let ranks = RankTable::by_accuracy(&table)?;
    let stats = summarize(&ranks, a.stats_n, a.alpha)?;
    let mut out = sink(&a.out)?;
    emit_report(&table, &ranks, &stats, Some(&reference), &mut out, format)?;
    out.flush()?;
    Ok(())
}

/// Metric table: header `dataset,<name>,...`, one row per dataset.
struct MetricTable {
    datasets: Vec<String>,
    classifiers: Vec<String>,
    values: Vec<Vec<f64>>,
}

fn read_metric_table(path: &Path) -> Result<MetricTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(open(path)?);
    let data_err = |msg: String| CliError::Lib(data_error(msg));
    let header = rdr.headers().map_err(|e| data_err(e.to_string()))?.clone();
    let classifiers: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    if classifiers.is_empty() {
        return Err(data_err("metric table has no classifier columns".into()));
    }
    let mut datasets = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| data_err(e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() != header.len() {
            return Err(data_err(format!(
                "line {line}: {} fields, header has {}",
                rec.len(),
                header.len()
            )));
        }
        datasets.push(rec[0].to_string());
        let row = rec
            .iter()
            .skip(1)
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| data_err(format!("line {line}: bad value {f:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        values.push(row);
    }
    if values.is_empty() {
        return Err(data_err("metric table has no rows".into()));
    }
    Ok(MetricTable {
        datasets,
        classifiers,
        values,
    })
}

fn fmt_list(v: &[f64], prec: usize) -> String {
    v.iter()
        .map(|x| format!("{x:.prec$}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    check_alpha(a.alpha)?;
    let mut out = sink(&a.out)?;
    let (avg, n) = match (&a.input, &a.avg_ranks) {
        (Some(path), _) => {
            let MetricTable {
                datasets,
                classifiers,
                values,
            } = read_metric_table(path)?;
            if classifiers.len() < 2 {
                return Err(data_error("ranking needs at least two classifier columns").into());
            }
            writeln!(out, "dataset,{}", classifiers.join(","))?;
            let mut sums = vec![0.0; classifiers.len()];
            for (d, row) in datasets.iter().zip(&values) {
                let r = rank_row(row, !a.lower_is_better)?;
                sums.iter_mut().zip(&r).for_each(|(s, v)| *s += v);
                writeln!(
                    out,
                    "{d},{}",
                    r.iter()
                        .map(|v| v.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                )?;
            }
            let rows = datasets.len() as f64;
            let avg: Vec<f64> = sums.iter().map(|s| s / rows).collect();
            (avg, a.n.unwrap_or(datasets.len()))
        }
        (None, Some(r)) => (r.clone(), a.n.expect("required by clap")),
        (None, None) => return Err(CliError::Usage("give --input or --avg-ranks".into())),
    };
    let (chi2, dof, p) = friedman_chi2(&avg, n)?;
    writeln!(out, "average_ranks={}", fmt_list(&avg, 4))?;
    writeln!(out, "n={n} k={}", avg.len())?;
    writeln!(out, "chi2={chi2:.4} dof={dof} p={p:.4e}")?;
    match nemenyi_q(avg.len(), a.alpha) {
        Ok(q) => writeln!(
            out,
            "alpha={} q={q} cd={:.4}",
            a.alpha,
            nemenyi_cd(avg.len(), n, a.alpha)?
        )?,
        Err(_) => writeln!(
            out,
            "alpha={} cd=n/a (table covers 2 to 10 classifiers)",
            a.alpha
        )?,
    }
    out.flush()?;
    Ok(())
}

fn data_error(msg: impl Into<String>) -> npstm::Error {
    npstm::Error::Data(msg.into())
}
