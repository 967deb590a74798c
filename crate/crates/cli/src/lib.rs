//! Argument handling for the `iqkit` binary.
//!
//! [`run`] parses arguments, executes one subcommand and returns the process
//! exit code: 0 on success, 2 for usage errors, 3 for bad input data and 4
//! for numerical failures.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use iqkit::db::{patchify, raw_features};
use iqkit::eval::{bench, evaluate};
use iqkit::nr::TvNorm;
use iqkit::{
    load_image, BrisqueModel, DatasetManifest, ErrorKind, FeatureMatrix, IqaError, MetricContext,
    MetricId, MetricKind,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "iqkit",
    version,
    about = "Image quality metrics and their evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score one image, or one distorted/reference pair.
    Compute(ComputeArgs),
    /// Correlate metric scores with the subjective scores of a manifest.
    Evaluate(EvaluateArgs),
    /// Time metrics over the pairs of a manifest.
    Bench(BenchArgs),
    /// Write patch features of images as an FMX1 matrix.
    Features(FeaturesArgs),
    /// List the registered metrics.
    List,
}

#[derive(Debug, Args)]
struct MetricOptions {
    /// Seed for stochastic steps.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// BRISQUE SVR model file.
    #[arg(long)]
    model: Option<PathBuf>,
    /// Total-variation norm: anisotropic or isotropic.
    #[arg(long, default_value_t = TvNorm::Anisotropic)]
    tv_norm: TvNorm,
}

#[derive(Debug, Args)]
struct ComputeArgs {
    #[arg(long)]
    metric: String,
    /// Reference image (full-reference and distribution-based metrics).
    #[arg(long = "ref")]
    reference: Option<PathBuf>,
    #[arg(long)]
    dist: PathBuf,
    #[command(flatten)]
    options: MetricOptions,
    /// Human-readable output.
    #[arg(long)]
    pretty: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Text,
}

#[derive(Debug, Args)]
struct ReportOutput {
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Same as `--format text`.
    #[arg(long)]
    pretty: bool,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Metric names, repeated or comma-separated.
    #[arg(long, value_delimiter = ',')]
    metric: Vec<String>,
    /// Worker threads over image pairs.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    options: MetricOptions,
    #[command(flatten)]
    output: ReportOutput,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Metric names, repeated or comma-separated.
    #[arg(long, value_delimiter = ',')]
    metric: Vec<String>,
    /// Timed passes per metric (at least 3).
    #[arg(long, default_value_t = 5)]
    reps: usize,
    /// Untimed passes per metric before timing.
    #[arg(long, default_value_t = 1)]
    warmup: usize,
    /// Accepted for symmetry with `evaluate`; timing always runs on one thread.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[command(flatten)]
    options: MetricOptions,
    #[command(flatten)]
    output: ReportOutput,
}

#[derive(Debug, Args)]
struct FeaturesArgs {
    #[arg(required = true)]
    images: Vec<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

enum Failure {
    Usage(String),
    Iqa(IqaError),
}

impl From<IqaError> for Failure {
    fn from(e: IqaError) -> Self {
        Failure::Iqa(e)
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line `args` (including the program name) and returns the
/// exit code. Regular output goes to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::Compute(a) => compute(a, out, err),
        Command::Evaluate(a) => cmd_evaluate(a, out, err),
        Command::Bench(a) => cmd_bench(a, out, err),
        Command::Features(a) => features(a, out),
        Command::List => list(out),
    };
    match outcome {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(message)) => {
            let _ = writeln!(err, "error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Iqa(e)) => {
            let _ = writeln!(err, "error: {e}");
            if let IqaError::UnknownMetric(_) = e {
                let _ = writeln!(err, "available metrics: {}", MetricId::catalog());
            }
            match e.kind() {
                ErrorKind::Usage => EXIT_USAGE,
                ErrorKind::InputData => EXIT_INPUT,
                ErrorKind::Numerical => EXIT_NUMERICAL,
            }
        }
    }
}

fn io_failure(path: &Path) -> impl FnOnce(std::io::Error) -> Failure + '_ {
    move |source| {
        Failure::Iqa(IqaError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

fn stdout_failure(source: std::io::Error) -> Failure {
    io_failure(Path::new("<stdout>"))(source)
}

fn parse_metrics(names: &[String]) -> Result<Vec<MetricId>, Failure> {
    let names: Vec<&str> = names
        .iter()
        .map(|s| s.trim())
        .filter(|s| !s.is_empty())
        .collect();
    if names.is_empty() {
        return Err(Failure::Usage(format!(
            "at least one --metric is required; available: {}",
            MetricId::catalog()
        )));
    }
    Ok(names
        .iter()
        .map(|n| n.parse())
        .collect::<iqkit::Result<_>>()?)
}

fn context(options: &MetricOptions, err: &mut dyn Write) -> Result<MetricContext, Failure> {
    let brisque_model = options.model.as_ref().map(BrisqueModel::load).transpose()?;
    let _ = writeln!(err, "seed={}", options.seed);
    Ok(MetricContext {
        brisque_model,
        seed: options.seed,
        tv_norm: options.tv_norm,
        ..MetricContext::default()
    })
}

fn compute(a: ComputeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let metric: MetricId = a.metric.parse()?;
    match (metric.kind(), &a.reference) {
        (MetricKind::NoReference, Some(_)) => {
            return Err(Failure::Usage(format!(
                "`{metric}` is a no-reference metric; drop --ref"
            )));
        }
        (MetricKind::FullReference | MetricKind::DistributionBased, None) => {
            return Err(Failure::Usage(format!("`{metric}` needs --ref")));
        }
        _ => {}
    }
    let ctx = context(&a.options, err)?;
    let reference = a.reference.as_ref().map(load_image).transpose()?;
    let distorted = load_image(&a.dist)?;
    let score = metric.compute(reference.as_ref(), &distorted, &ctx)?;
    let line = if a.pretty {
        format!("{metric}: {score:.6}")
    } else {
        format!("metric={metric} score={score:?}")
    };
    writeln!(out, "{line}").map_err(stdout_failure)
}

fn emit(output: &ReportOutput, csv: String, text: String, out: &mut dyn Write) -> Outcome {
    let body = match (output.pretty, output.format) {
        (true, _) | (false, Format::Text) => text,
        (false, Format::Csv) => csv,
    };
    match &output.out {
        Some(path) => std::fs::write(path, body).map_err(io_failure(path)),
        None => out.write_all(body.as_bytes()).map_err(stdout_failure),
    }
}

fn cmd_evaluate(a: EvaluateArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let metrics = parse_metrics(&a.metric)?;
    if a.jobs == 0 {
        return Err(Failure::Usage("--jobs must be at least 1".into()));
    }
    let ctx = context(&a.options, err)?;
    let manifest = DatasetManifest::load(&a.manifest)?;
    let report = evaluate(&manifest, &metrics, &ctx, a.jobs)?;
    emit(&a.output, report.to_csv(), report.to_text(), out)
}

fn cmd_bench(a: BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Outcome {
    let metrics = parse_metrics(&a.metric)?;
    if a.reps < 3 {
        return Err(Failure::Usage(format!(
            "--reps must be at least 3, got {}",
            a.reps
        )));
    }
    if a.jobs != 1 {
        log::info!("bench ignores --jobs {}; timing runs on one thread", a.jobs);
    }
    let ctx = context(&a.options, err)?;
    let manifest = DatasetManifest::load(&a.manifest)?;
    let report = bench(&manifest, &metrics, &ctx, a.reps, a.warmup)?;
    emit(&a.output, report.to_csv(), report.to_text(), out)
}

fn features(a: FeaturesArgs, out: &mut dyn Write) -> Outcome {
    let mut rows = Vec::new();
    for path in &a.images {
        let img = load_image(path)?;
        let m = raw_features(&patchify(&img)?)?;
        rows.extend((0..m.rows()).map(|i| m.row(i).to_vec()));
    }
    let matrix = FeatureMatrix::from_rows(&rows)?;
    matrix.save_binary(&a.out)?;
    writeln!(
        out,
        "rows={} cols={} out={}",
        matrix.rows(),
        matrix.cols(),
        a.out.display()
    )
    .map_err(stdout_failure)
}

fn list(out: &mut dyn Write) -> Outcome {
    for m in MetricId::ALL {
        let kind = match m.kind() {
            MetricKind::FullReference => "full-reference",
            MetricKind::NoReference => "no-reference",
            MetricKind::DistributionBased => "distribution-based",
        };
        let direction = if m.higher_is_better() {
            "higher"
        } else {
            "lower"
        };
        writeln!(out, "{:<9} {kind:<19} {direction} is better", m.name())
            .map_err(stdout_failure)?;
    }
    Ok(())
}
