//! The `rpens` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand_distr::{Distribution, StandardNormal};

use rpens_core::projection::{check_distortion, jl_dimension_bound, JlParams};
use rpens_core::{Classifier, ProjectionFamily, RngSeed};

use crate::config::{ExperimentConfig, MethodId, MethodSpec, Overrides};
use crate::error::{HarnessError, Result};
use crate::fetch::{default_cache_dir, epilepsy_url, fetch_epilepsy_dataset, HttpDownloader};
use crate::loader::{load_csv, read_table, CsvOptions};
use crate::model::{fit_method, ModelFile};
use crate::report::{render_report, sweep_csv, ReportFormat};
use crate::runner::{b1_sweep_from_config, run_experiment};

/// Exit status for invalid invocations, including unreadable or invalid config files.
pub const EXIT_USAGE: i32 = 2;
/// Exit status for failures while running a valid command.
pub const EXIT_RUNTIME: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "rpens", version, about = "Random-projection ensemble classification")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a repeated-trial experiment described by a JSON config.
    Bench(BenchArgs),
    /// Fit one method to a CSV file and save the model as JSON.
    Train(TrainArgs),
    /// Apply a saved model to a CSV file.
    Predict(PredictArgs),
    /// Print the Johnson-Lindenstrauss dimension bound, optionally checking it empirically.
    JlCheck(JlArgs),
    /// Download (or verify the cached copy of) the epileptic seizure dataset.
    FetchData(FetchArgs),
    /// Test-error mean and standard deviation against the number of ensemble groups.
    B1Sweep(SweepArgs),
}

#[derive(Debug, Args, Default)]
pub struct MethodOverrides {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub b1: Option<usize>,
    #[arg(long)]
    pub b2: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    /// gaussian, haar, axis, sparse or sparse:<s>
    #[arg(long)]
    pub family: Option<ProjectionFamily>,
    /// Fixed voting threshold in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "csv")]
    pub format: ReportFormat,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub overrides: MethodOverrides,
}

#[derive(Debug, Args)]
pub struct CsvArgs {
    /// Label column; negative values count from the end.
    #[arg(long, default_value_t = -1, allow_negative_numbers = true)]
    pub label_column: i64,
    #[arg(long)]
    pub header: bool,
    #[arg(long, default_value_t = ',')]
    pub delimiter: char,
    /// Drop columns whose first row is not numeric.
    #[arg(long)]
    pub drop_non_numeric: bool,
}

impl CsvArgs {
    fn options(&self, labelled: bool) -> CsvOptions {
        CsvOptions {
            label_column: labelled.then_some(self.label_column),
            header: self.header,
            delimiter: self.delimiter,
            label_map: None,
            drop_non_numeric: self.drop_non_numeric,
        }
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub method: MethodId,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
    /// Ensemble size for LDA_1 / LDA_1000.
    #[arg(long)]
    pub b: Option<usize>,
    #[command(flatten)]
    pub csv: CsvArgs,
    #[command(flatten)]
    pub overrides: MethodOverrides,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// The file has a label column; the test error is reported.
    #[arg(long)]
    pub labelled: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub csv: CsvArgs,
}

#[derive(Debug, Args)]
pub struct JlArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub eps: f64,
    #[arg(long)]
    pub delta: f64,
    /// Ambient dimension for an empirical check with standard normal points.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Defaults to $RPENS_CACHE_DIR, else a directory under the system temp dir.
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    #[arg(long)]
    pub url: Option<String>,
    /// Expected SHA-256 of the file.
    #[arg(long)]
    pub sha256: Option<String>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_delimiter = ',', default_value = "10,40,160")]
    pub grid: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub ensembles: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[command(flatten)]
    pub overrides: MethodOverrides,
}

enum Failure {
    Usage(String),
    Runtime(String),
}

fn runtime(e: HarnessError) -> Failure {
    Failure::Runtime(e.to_string())
}

fn load_config(path: &Path, seed: Option<u64>, o: &MethodOverrides, threads: Option<usize>) -> std::result::Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::load(path).map_err(|e| Failure::Usage(format!("config: {e}")))?;
    config.apply_overrides(&Overrides {
        seed,
        d: o.d,
        b1: o.b1,
        b2: o.b2,
        k: o.k,
        family: o.family,
        alpha: o.alpha,
    });
    if threads.is_some() {
        config.threads = threads;
    }
    config.validate().map_err(|e| Failure::Usage(format!("config: {e}")))?;
    Ok(config)
}

fn write_output(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| HarnessError::io(path, e)),
        None => stdout.write_all(text.as_bytes()).map_err(|e| HarnessError::io("<stdout>", e)),
    }
}

fn bench(args: &BenchArgs, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let config = load_config(&args.config, args.seed, &args.overrides, args.threads)?;
    let report = run_experiment(&config).map_err(runtime)?;
    let text = render_report(&report, args.format).map_err(runtime)?;
    write_output(args.out.as_deref(), &text, stdout).map_err(runtime)
}

fn train(args: &TrainArgs, stdout: &mut dyn Write) -> Result<()> {
    let data = load_csv(&args.data, &args.csv.options(true))?;
    let o = &args.overrides;
    let spec = MethodSpec {
        d: o.d,
        b1: o.b1,
        b2: o.b2,
        k: o.k,
        family: o.family,
        alpha: o.alpha,
        b: args.b,
        ..MethodSpec::new(args.method)
    };
    let seed = RngSeed(args.seed);
    let model = fit_method(&spec, &data, seed)?;
    let training_error = rpens_core::test_error(&model, &data)?;
    ModelFile::new(spec, seed, model).save(&args.out)?;
    writeln!(stdout, "method {}\nn {}\np {}\ntraining_error {training_error}", args.method, data.n(), data.dim())
        .map_err(|e| HarnessError::io("<stdout>", e))
}

fn predict(args: &PredictArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    let file = ModelFile::load(&args.model)?;
    let table = read_table(&args.data, &args.csv.options(args.labelled))?;
    let p = table.p;
    if p != file.model.dim() {
        return Err(rpens_core::Error::DimMismatch { expected: file.model.dim(), found: p }.into());
    }
    let predictions: Vec<u8> = table.features.chunks_exact(p).map(|x| file.model.classify(x)).collect();
    let mut text = String::from("prediction\n");
    for y in &predictions {
        text.push_str(&format!("{y}\n"));
    }
    write_output(args.out.as_deref(), &text, stdout)?;
    if let Some(labels) = &table.labels {
        let error = rpens_core::classifier::misclassification_rate(&predictions, labels);
        writeln!(stderr, "test_error {error}").map_err(|e| HarnessError::io("<stderr>", e))?;
    }
    Ok(())
}

fn jl_check(args: &JlArgs, stdout: &mut dyn Write) -> Result<()> {
    let params = JlParams::new(args.eps, args.delta, args.n)?;
    let d = jl_dimension_bound(&params);
    let mut text = format!("n {}\neps {}\ndelta {}\nbound {d}\n", args.n, args.eps, args.delta);
    if let Some(p) = args.p {
        if d > p {
            text.push_str(&format!("bound exceeds p={p}; no empirical check\n"));
        } else {
            let mut within = 0;
            for t in 0..args.trials {
                let seed = RngSeed(args.seed).derive(&[t as u64]);
                let mut rng = seed.derive(&[0]).rng();
                let points: Vec<Vec<f64>> =
                    (0..args.n).map(|_| (0..p).map(|_| StandardNormal.sample(&mut rng)).collect()).collect();
                let a = ProjectionFamily::Gaussian.sample(d, p, seed.derive(&[1]))?;
                let r = check_distortion(&a, &points)?;
                if r.within(args.eps) {
                    within += 1;
                }
                if args.trials == 1 {
                    text.push_str(&format!("min_ratio {}\nmax_ratio {}\npairs {}\n", r.min_ratio, r.max_ratio, r.pairs));
                }
            }
            text.push_str(&format!("trials {}\nwithin {within}\n", args.trials));
        }
    }
    stdout.write_all(text.as_bytes()).map_err(|e| HarnessError::io("<stdout>", e))
}

fn fetch(args: &FetchArgs, stdout: &mut dyn Write) -> Result<()> {
    let dir = args.cache_dir.clone().unwrap_or_else(default_cache_dir);
    let url = args.url.clone().unwrap_or_else(epilepsy_url);
    let file = fetch_epilepsy_dataset(&dir, &url, args.sha256.as_deref(), &HttpDownloader::default())?;
    let table = read_table(&file.path, &file.options)?;
    let (rows, p, raw, dropped) = (table.rows(), table.p, table.raw_columns, table.dropped_columns.clone());
    let [n0, n1] = table.into_dataset()?.class_counts();
    writeln!(
        stdout,
        "path {}\nsha256 {}\ndownloaded {}\nrows {rows}\ncolumns {raw}\ndropped {dropped:?}\nfeatures {p}\nclass0 {n0}\nclass1 {n1}",
        file.path.display(),
        file.sha256,
        file.downloaded
    )
    .map_err(|e| HarnessError::io("<stdout>", e))
}

fn sweep(args: &SweepArgs, stdout: &mut dyn Write) -> std::result::Result<(), Failure> {
    let config = load_config(&args.config, args.seed, &args.overrides, args.threads)?;
    if args.grid.is_empty() || args.grid.contains(&0) {
        return Err(Failure::Usage("--grid needs positive values".into()));
    }
    let points = b1_sweep_from_config(&config, &args.grid, args.ensembles).map_err(runtime)?;
    let text = sweep_csv(&points).map_err(runtime)?;
    write_output(args.out.as_deref(), &text, stdout).map_err(runtime)
}

/// Parse `argv` and run; returns the process exit status.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let outcome = match &cli.command {
        Command::Bench(a) => bench(a, stdout),
        Command::Train(a) => train(a, stdout).map_err(runtime),
        Command::Predict(a) => predict(a, stdout, stderr).map_err(runtime),
        Command::JlCheck(a) => jl_check(a, stdout).map_err(|e| match e {
            HarnessError::Core(c) => Failure::Usage(c.to_string()),
            other => runtime(other),
        }),
        Command::FetchData(a) => fetch(a, stdout).map_err(runtime),
        Command::B1Sweep(a) => sweep(a, stdout),
    };
    match outcome {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Runtime(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_RUNTIME
        }
    }
}
