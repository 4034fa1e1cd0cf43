use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use cwsa_core::io::{
    self, Format, IngestOptions, PointReportFile, RankingFile, ReportFile, SweepReportFile,
    ToolInfo,
};
use cwsa_core::metrics::{cwsa_generalized, point_metrics};
use cwsa_core::sweep::{rank, sweep_with_bins};
use cwsa_core::{
    expected_point_metrics, generate, ArchetypeKind, ArchetypeSpec, BinningSpec, Interval,
    MetricKind, Threshold, ThresholdGrid,
};
use sha2::{Digest, Sha256};

const THREADS_ENV: &str = "CWSA_EVAL_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "cwsa-eval",
    version,
    about = "Selective-prediction evaluation with confidence-weighted metrics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Score a prediction file at one threshold or over a threshold grid.
    Evaluate(EvaluateArgs),
    /// Write a synthetic archetype's predictions as CSV.
    Synth(SynthArgs),
    /// Rank several prediction files by the AUC-MCC of one metric.
    Compare(CompareArgs),
    /// Emit per-metric CSV curves and SVG charts from a sweep report.
    Curves(CurvesArgs),
    /// Print closed-form expected metrics of an archetype at a threshold.
    Expect(ExpectArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// csv or jsonl; detected from the file extension when omitted.
    #[arg(long)]
    format: Option<Format>,
    /// Number of classes; inferred from the labels when omitted.
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long, default_value_t = cwsa_core::baselines::DEFAULT_BIN_COUNT)]
    bins: usize,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    input: PathBuf,
    /// Evaluate a single threshold instead of a sweep.
    #[arg(long, conflicts_with = "grid")]
    tau: Option<f64>,
    /// Sweep grid as start:end:step (default 0.5:0.99:0.01).
    #[arg(long)]
    grid: Option<ThresholdGrid>,
    #[command(flatten)]
    input_opts: InputArgs,
    /// Report path; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ArchetypeArgs {
    #[arg(long)]
    kind: ArchetypeKind,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    classes: Option<usize>,
    #[arg(long)]
    p_correct: Option<f64>,
    /// Confidence interval of correct predictions as lo,hi.
    #[arg(long, value_parser = parse_interval)]
    conf_correct: Option<Interval>,
    /// Confidence interval of wrong predictions as lo,hi.
    #[arg(long, value_parser = parse_interval)]
    conf_wrong: Option<Interval>,
}

impl ArchetypeArgs {
    fn spec(&self, seed: u64) -> Result<ArchetypeSpec> {
        let mut spec = ArchetypeSpec::defaults(self.kind, seed);
        if let Some(n) = self.n {
            spec.n = n;
        }
        if let Some(k) = self.classes {
            spec.class_count = k;
        }
        if let Some(p) = self.p_correct {
            spec.p_correct = p;
        }
        if let Some(iv) = self.conf_correct {
            spec.conf_correct = iv;
        }
        if let Some(iv) = self.conf_wrong {
            spec.conf_wrong = iv;
        }
        spec.validate()?;
        Ok(spec)
    }
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[command(flatten)]
    archetype: ArchetypeArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV path; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[arg(long, value_delimiter = ',', required = true, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[arg(long, default_value = "cwsa_plus")]
    by: MetricKind,
    #[arg(long)]
    grid: Option<ThresholdGrid>,
    #[command(flatten)]
    input_opts: InputArgs,
    /// Ranking JSON path; only the text table is printed when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CurvesArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct ExpectArgs {
    #[command(flatten)]
    archetype: ArchetypeArgs,
    #[arg(long)]
    tau: f64,
}

fn parse_interval(s: &str) -> Result<Interval, String> {
    let (lo, hi) = s
        .split_once(',')
        .ok_or_else(|| format!("expected lo,hi, got {s:?}"))?;
    let lo: f64 = lo
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {lo:?}"))?;
    let hi: f64 = hi
        .trim()
        .parse()
        .map_err(|_| format!("not a number: {hi:?}"))?;
    Interval::new(lo, hi).map_err(|e| e.to_string())
}

fn tool() -> ToolInfo {
    ToolInfo {
        name: "cwsa-eval".to_string(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    }
}

fn digest(path: &Path) -> Result<String> {
    let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn emit(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(path) => write_file(path, bytes),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .context("writing to standard output"),
    }
}

fn load(path: &Path, opts: &InputArgs) -> Result<cwsa_core::EvaluationSet> {
    let options = IngestOptions {
        format: opts.format,
        class_count: opts.classes,
    };
    Ok(io::ingest(path, &options)?)
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let bins = BinningSpec::new(args.input_opts.bins)?;
    let set = load(&args.input, &args.input_opts)?;
    let input_digest = digest(&args.input)?;
    let report = match args.tau {
        Some(t) => {
            let tau = Threshold::new(t)?;
            let point = point_metrics(&set, tau);
            let graded = if set.records().iter().any(|r| r.credit.is_some()) {
                Some(cwsa_generalized(&set, tau).with_context(|| {
                    format!("{}: graded credit incomplete", args.input.display())
                })?)
            } else {
                None
            };
            ReportFile::Point(PointReportFile::new(
                &point,
                &set,
                bins,
                graded,
                tool(),
                input_digest,
            ))
        }
        None => {
            let grid = args.grid.unwrap_or_default();
            let sweep = sweep_with_bins(&set, grid, bins);
            ReportFile::Sweep(SweepReportFile::new(
                &sweep,
                set.len(),
                tool(),
                input_digest,
            ))
        }
    };
    emit(args.output.as_deref(), &io::to_json_bytes(&report)?)
}

fn synth(args: &SynthArgs) -> Result<()> {
    let spec = args.archetype.spec(args.seed)?;
    let set = generate(&spec)?;
    let mut csv = Vec::new();
    io::write_predictions_csv(&set, &mut csv)?;
    emit(args.output.as_deref(), &csv)
}

fn compare(args: &CompareArgs) -> Result<()> {
    let bins = BinningSpec::new(args.input_opts.bins)?;
    let grid = args.grid.unwrap_or_default();
    let reports = args
        .inputs
        .iter()
        .map(|path| {
            let set = load(path, &args.input_opts)?;
            Ok(sweep_with_bins(&set, grid, bins))
        })
        .collect::<Result<Vec<_>>>()?;
    let entries = rank(&reports, args.by)?;
    let file = RankingFile::new(tool(), args.by, grid, &entries);
    if let Some(path) = &args.output {
        write_file(path, &io::to_json_bytes(&file)?)?;
    }

    let width = entries
        .iter()
        .map(|e| e.source_id.len())
        .max()
        .unwrap_or(0)
        .max("source".len());
    println!("{:>4}  {:<width$}  auc_mcc({})", "rank", "source", args.by);
    for row in &file.ranking {
        let score = row
            .score
            .map(|s| format!("{s:.6}"))
            .unwrap_or_else(|| "undefined".into());
        println!("{:>4}  {:<width$}  {score}", row.rank, row.source_id);
    }
    Ok(())
}

fn curves(args: &CurvesArgs) -> Result<()> {
    let bytes =
        fs::read(&args.report).with_context(|| format!("reading {}", args.report.display()))?;
    let report: ReportFile = serde_json::from_slice(&bytes)
        .with_context(|| format!("{} is not a report file", args.report.display()))?;
    let ReportFile::Sweep(sweep) = report else {
        bail!(
            "{} holds a single-threshold report; curves need a sweep",
            args.report.display()
        );
    };
    fs::create_dir_all(&args.output)
        .with_context(|| format!("creating {}", args.output.display()))?;
    for (metric, arrays) in &sweep.curves {
        let points = arrays.points();
        let csv = io::svg::curve_csv(&points);
        let svg = io::svg::metric_chart(*metric, &sweep.source_id, &points);
        write_file(&args.output.join(format!("{metric}.csv")), csv.as_bytes())?;
        write_file(&args.output.join(format!("{metric}.svg")), svg.as_bytes())?;
    }
    Ok(())
}

fn expect(args: &ExpectArgs) -> Result<()> {
    let spec = args.archetype.spec(0)?;
    let tau = Threshold::new(args.tau)?;
    let e = expected_point_metrics(&spec, tau);
    let acc = e
        .selective_accuracy
        .map(|a| a.to_string())
        .unwrap_or_else(|| "null".into());
    println!("kind                {}", spec.kind);
    println!("tau                 {}", tau);
    println!("coverage            {}", e.coverage);
    println!("selective_accuracy  {acc}");
    println!("cwsa                {}", e.cwsa);
    println!("cwsa_plus           {}", e.cwsa_plus);
    Ok(())
}

fn configure_threads() -> Result<()> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(raw) => raw
            .trim()
            .parse()
            .ok()
            .filter(|&n: &usize| n > 0)
            .with_context(|| format!("{THREADS_ENV} must be a positive integer, got {raw:?}"))?,
        Err(_) => 1,
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("configuring worker threads")?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    configure_threads()?;
    match &cli.command {
        Command::Evaluate(args) => evaluate(args),
        Command::Synth(args) => synth(args),
        Command::Compare(args) => compare(args),
        Command::Curves(args) => curves(args),
        Command::Expect(args) => expect(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
