//! `tsdtw`: nearest-neighbor retrieval under constrained DTW, plus the
//! dataset generator and the experiment harness.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use tsdtw::experiments::{
    run_classification, run_pruning_bench, run_triangle, BenchConfig, ClassifyConfig,
    TriangleConfig,
};
use tsdtw::{
    build_index, load_dataset, nn_search, save_dataset, Dataset64, DatasetFormat, Exponent,
    Family, SearchOptions, SearchParams, Strategy, TimeSeries64,
};

#[derive(Parser)]
#[command(
    name = "tsdtw",
    version,
    about = "Time-series nearest-neighbor retrieval under constrained dynamic time warping",
    after_help = "All randomness flows from --seed; identical invocations produce identical reports."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset file.
    Gen(GenArgs),
    /// Nearest-neighbor search for each series in a query file.
    Nn(NnArgs),
    /// Pruning-power / retrieval benchmark over database fractions.
    Bench(BenchArgs),
    /// Triangle-inequality violation rates over random triples.
    Triangle(TriangleArgs),
    /// 1-NN classification accuracy across norm exponents.
    Classify(ClassifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    RandomWalk,
    WhiteNoise,
    Cbf,
    ControlChart,
    Waveform,
    WaveNoise,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::RandomWalk => Family::RandomWalk,
            FamilyArg::WhiteNoise => Family::WhiteNoise,
            FamilyArg::Cbf => Family::Cbf,
            FamilyArg::ControlChart => Family::ControlChart,
            FamilyArg::Waveform => Family::Waveform,
            FamilyArg::WaveNoise => Family::WaveNoise,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Bin,
    Csv,
}

/// Locality constraint: absolute samples ("12") or a percentage ("10%").
#[derive(Clone, Copy, Debug)]
enum WindowSpec {
    Absolute(usize),
    Fraction(f64),
}

impl WindowSpec {
    fn resolve(self, n: usize) -> usize {
        match self {
            WindowSpec::Absolute(w) => w,
            WindowSpec::Fraction(f) => (f * n as f64).floor() as usize,
        }
    }

    fn as_fraction(self, n: usize) -> f64 {
        match self {
            WindowSpec::Fraction(f) => f,
            WindowSpec::Absolute(w) => w as f64 / n as f64,
        }
    }
}

impl FromStr for WindowSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let t = s.trim();
        if let Some(percent) = t.strip_suffix('%') {
            let v: f64 = percent
                .parse()
                .map_err(|_| format!("bad percentage {t:?}"))?;
            if !(0.0..=100.0).contains(&v) {
                return Err(format!("percentage {v} out of [0, 100]"));
            }
            Ok(WindowSpec::Fraction(v / 100.0))
        } else {
            let w: usize = t
                .parse()
                .map_err(|_| format!("bad window {t:?} (absolute samples or \"P%\")"))?;
            Ok(WindowSpec::Absolute(w))
        }
    }
}

fn parse_exponent(s: &str) -> Result<Exponent, String> {
    Exponent::from_str(s).map_err(|e| e.to_string())
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    Strategy::from_str(s).map_err(|e| e.to_string())
}

#[derive(Args)]
struct GenArgs {
    /// Series family.
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Number of classes to generate (labeled families only; default all).
    #[arg(long)]
    classes: Option<u32>,
    /// Series per class (or total, for the unlabeled families).
    #[arg(long)]
    per_class: usize,
    /// Series length; default is the family's customary length.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Output path; labels go to `<out>.labels` (binary) or the first
    /// column (CSV).
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "bin")]
    format: FormatArg,
}

#[derive(Args)]
#[command(after_help = "Output columns: query,best_id,best_dist,candidates_seen,\
pruned_by_index,pruned_by_lb_keogh,pruned_by_lb_improved,dtw_evaluations,comparisons")]
struct NnArgs {
    /// Database file (binary, or CSV when the extension is .csv).
    #[arg(long)]
    db: PathBuf,
    /// One or more query series, same format rules as --db.
    #[arg(long)]
    query_file: PathBuf,
    /// Treat the first CSV column of --db and --query-file as a class id.
    #[arg(long)]
    csv_labels: bool,
    #[arg(long, value_parser = parse_strategy, default_value = "linear-improved")]
    strategy: Strategy,
    /// Norm exponent: an integer >= 1 or "inf".
    #[arg(long, value_parser = parse_exponent, default_value = "1")]
    p: Exponent,
    /// Locality constraint: absolute samples or a percentage of n.
    #[arg(long, default_value = "10%")]
    w: WindowSpec,
    /// Reduced dimension for the index-backed strategies.
    #[arg(long, default_value_t = 8)]
    d: usize,
    /// Abandon lower-bound computations at the running best distance.
    #[arg(long)]
    early_abandon: bool,
}

#[derive(Args)]
#[command(after_help = "Output columns: fraction,db_size,strategy,queries,\
avg_candidates_seen,avg_pruned_by_index,avg_pruned_by_lb_keogh,\
avg_pruned_by_lb_improved,avg_dtw_evaluations,pruning_fraction,avg_comparisons,\
wall_time_ms. Wall times are informational. Queries are sampled from the \
database by --seed and excluded from the searched candidates.")]
struct BenchArgs {
    #[arg(long)]
    db: PathBuf,
    #[arg(long)]
    csv_labels: bool,
    /// Number of query series sampled from the database.
    #[arg(long, default_value_t = 20)]
    queries: usize,
    /// Comma-separated database fractions to sweep.
    #[arg(long, default_value = "0.2,0.4,0.6,0.8,1.0")]
    fractions: String,
    /// Comma-separated strategies.
    #[arg(long, default_value = "tree,tree-keogh,tree-improved,linear-keogh,linear-improved")]
    strategies: String,
    #[arg(long, value_parser = parse_exponent, default_value = "1")]
    p: Exponent,
    #[arg(long, default_value = "10%")]
    w: WindowSpec,
    #[arg(long, default_value_t = 8)]
    d: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Write the CSV report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    early_abandon: bool,
}

#[derive(Args)]
#[command(after_help = "Output: one summary row \
(family,p,n,trials,degenerate,violations,violation_rate), a blank line, then \
histogram rows (bin_lo,bin_hi,count).")]
struct TriangleArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Series length; default is the family's customary length.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = 10_000)]
    trials: usize,
    #[arg(long, value_parser = parse_exponent, default_value = "1")]
    p: Exponent,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(after_help = "Output columns: family,classes,n,w,reps,queries_per_rep,\
instances_per_class,p,mean_accuracy. --per-class-range accepts \"a..b\" \
(inclusive) or a comma-separated list.")]
struct ClassifyArgs {
    #[arg(long, value_enum)]
    family: FamilyArg,
    /// Database sizes to sweep, per class.
    #[arg(long, default_value = "1..9")]
    per_class_range: String,
    /// Comma-separated exponents.
    #[arg(long, default_value = "1,2,4,inf")]
    p_list: String,
    #[arg(long, default_value_t = 10)]
    reps: usize,
    /// Query instances per repetition.
    #[arg(long, default_value_t = 100)]
    queries: usize,
    #[arg(long, default_value = "10%")]
    w: WindowSpec,
    /// Series length; default is the family's customary length.
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum AppError {
    Usage(String),
    Data(String),
}

impl From<tsdtw::Error> for AppError {
    fn from(e: tsdtw::Error) -> Self {
        match e {
            tsdtw::Error::InvalidParameter(_)
            | tsdtw::Error::UnsupportedExponent(_)
            | tsdtw::Error::EmptyInput(_) => AppError::Usage(e.to_string()),
            _ => AppError::Data(e.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = e.print();
                return ExitCode::SUCCESS;
            }
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Data(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Gen(args) => cmd_gen(args),
        Command::Nn(args) => cmd_nn(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Triangle(args) => cmd_triangle(args),
        Command::Classify(args) => cmd_classify(args),
    }
}

fn load(path: &Path, csv_labels: bool) -> Result<Dataset64, AppError> {
    let format = DatasetFormat::from_path(path, csv_labels);
    Ok(load_dataset(path, format)?)
}

fn output(out: Option<&Path>) -> Result<Box<dyn Write>, AppError> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn parse_list<T: FromStr>(s: &str, what: &str) -> Result<Vec<T>, AppError>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<T>()
                .map_err(|e| AppError::Usage(format!("bad {what} {t:?}: {e}")))
        })
        .collect()
}

fn parse_count_range(s: &str) -> Result<Vec<usize>, AppError> {
    let t = s.trim();
    if let Some((a, b)) = t.split_once("..") {
        let lo: usize = a
            .trim()
            .parse()
            .map_err(|_| AppError::Usage(format!("bad range start {a:?}")))?;
        let hi: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .map_err(|_| AppError::Usage(format!("bad range end {b:?}")))?;
        if lo == 0 || hi < lo {
            return Err(AppError::Usage(format!("empty range {t:?}")));
        }
        Ok((lo..=hi).collect())
    } else {
        parse_list(t, "per-class count")
    }
}

fn cmd_gen(args: GenArgs) -> Result<(), AppError> {
    let family: Family = args.family.into();
    let classes = args.classes.unwrap_or_else(|| family.class_count().unwrap_or(1));
    let n = args.length.unwrap_or_else(|| family.default_length());
    let ds = tsdtw::generate_database::<f64>(family, classes, args.per_class, n, args.seed)?;
    let format = match args.format {
        FormatArg::Bin => DatasetFormat::Binary,
        FormatArg::Csv => DatasetFormat::Csv {
            labeled: ds.labels().is_some(),
        },
    };
    save_dataset(&ds, &args.out, format)?;
    eprintln!(
        "wrote {} series of length {n} to {}",
        ds.len(),
        args.out.display()
    );
    Ok(())
}

fn cmd_nn(args: NnArgs) -> Result<(), AppError> {
    let db = load(&args.db, args.csv_labels)?;
    let queries = load(&args.query_file, args.csv_labels)?;
    if queries.series_len() != db.series_len() {
        return Err(AppError::Data(format!(
            "query length {} does not match database length {}",
            queries.series_len(),
            db.series_len()
        )));
    }
    let params = SearchParams::new(args.p, args.w.resolve(db.series_len()));
    let opts = SearchOptions {
        early_abandon: args.early_abandon,
    };
    let index = if args.strategy.uses_index() {
        Some(build_index(&db, args.d)?)
    } else {
        None
    };
    let index_ref = index.as_ref().map(|(i, c)| (i, c));

    let mut out = std::io::stdout().lock();
    writeln!(
        out,
        "query,best_id,best_dist,candidates_seen,pruned_by_index,pruned_by_lb_keogh,\
         pruned_by_lb_improved,dtw_evaluations,comparisons"
    )?;
    for (qi, query) in queries.iter().enumerate() {
        let r = nn_search(query, &db, args.strategy, &params, index_ref, opts)?;
        let c = r.counters;
        let comparisons = r
            .comparison_count
            .map(|v| v.to_string())
            .unwrap_or_default();
        writeln!(
            out,
            "{qi},{},{},{},{},{},{},{},{comparisons}",
            r.best_id,
            r.best_dist,
            c.candidates_seen,
            c.pruned_by_index,
            c.pruned_by_lb_keogh,
            c.pruned_by_lb_improved,
            c.dtw_evaluations,
        )?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), AppError> {
    let db = load(&args.db, args.csv_labels)?;
    if args.queries == 0 {
        return Err(AppError::Usage("--queries must be positive".into()));
    }
    if args.queries >= db.len() {
        return Err(AppError::Usage(format!(
            "--queries {} must be smaller than the database ({} series)",
            args.queries,
            db.len()
        )));
    }
    let fractions: Vec<f64> = parse_list(&args.fractions, "fraction")?;
    let strategies: Vec<Strategy> = args
        .strategies
        .split(',')
        .map(|t| Strategy::from_str(t.trim()).map_err(|e| AppError::Usage(e.to_string())))
        .collect::<Result<_, _>>()?;

    // sample query indices, search the remainder
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let picked = rand::seq::index::sample(&mut rng, db.len(), args.queries);
    let mut is_query = vec![false; db.len()];
    for i in picked.iter() {
        is_query[i] = true;
    }
    let queries: Vec<TimeSeries64> = picked.iter().map(|i| db.get(i).clone()).collect();
    let rest: Vec<TimeSeries64> = db
        .iter()
        .enumerate()
        .filter(|(i, _)| !is_query[*i])
        .map(|(_, s)| s.clone())
        .collect();
    let searched = Dataset64::new(rest, None)?;

    let config = BenchConfig {
        params: SearchParams::new(args.p, args.w.resolve(db.series_len())),
        d: args.d,
        strategies,
        fractions,
        early_abandon: args.early_abandon,
    };
    let report = run_pruning_bench(&searched, &queries, &config)?;
    for f in &report.skipped_fractions {
        eprintln!("warning: skipped fraction {f} (outside (0, 1])");
    }
    let mut out = output(args.out.as_deref())?;
    report.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_triangle(args: TriangleArgs) -> Result<(), AppError> {
    let family: Family = args.family.into();
    let config = TriangleConfig {
        family,
        n: args.n.unwrap_or_else(|| family.default_length()),
        trials: args.trials,
        p: args.p,
        seed: args.seed,
    };
    let report = run_triangle(&config)?;
    let mut out = output(args.out.as_deref())?;
    report.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}

fn cmd_classify(args: ClassifyArgs) -> Result<(), AppError> {
    let family: Family = args.family.into();
    let n = args.length.unwrap_or_else(|| family.default_length());
    let config = ClassifyConfig {
        family,
        classes: None,
        instance_counts: parse_count_range(&args.per_class_range)?,
        p_list: parse_list(&args.p_list, "exponent")?,
        repetitions: args.reps,
        queries_per_rep: args.queries,
        w_fraction: args.w.as_fraction(n),
        n: Some(n),
        seed: args.seed,
    };
    let report = run_classification(&config)?;
    let mut out = output(args.out.as_deref())?;
    report.write_csv(&mut out)?;
    out.flush()?;
    Ok(())
}
