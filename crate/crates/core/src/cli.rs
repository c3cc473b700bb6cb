//! Command-line front end. `run` parses arguments, executes one subcommand
//! and returns the process exit code:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 2 | usage or configuration error |
//! | 3 | signal invariant violated |
//! | 4 | precondition not met |
//! | 5 | solver did not converge (outputs still written) |

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{sha256_hex, ExperimentConfig};
use crate::numeric::parse_real;
use crate::reconstruct::{sinc_reconstruct_with, Taper};
use crate::recovery::{
    recover, Method, PgParams, RecoveryProblem, DEFAULT_MAX_ITER, DEFAULT_SV_CUTOFF, DEFAULT_TOL,
};
use crate::signal::{BandLimitedSignal, SamplingGrid, SignalSpec};
use crate::window::SampleWindow;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;
pub const EXIT_PRECONDITION: i32 = 4;
pub const EXIT_NOT_CONVERGED: i32 = 5;

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::OutOfBand { .. } | Error::InvalidSignal(_) => EXIT_INVARIANT,
        Error::OversamplingRequired(_)
        | Error::Underdetermined { .. }
        | Error::UnknownSamples(_)
        | Error::GapNotInterior
        | Error::NoKnownSamples
        | Error::ZeroWindow
        | Error::AliasingBand(_) => EXIT_PRECONDITION,
        Error::InvalidArgument(_)
        | Error::InvalidBand(_)
        | Error::TransformSize { .. }
        | Error::Parse(_)
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_USAGE,
    }
}

fn real(text: &str) -> std::result::Result<f64, String> {
    parse_real(text).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "bandex", version, about = "Recover band-limited signals from one-sided sample series")]
pub struct Cli {
    /// Seed for randomized experiments (overrides the config's seed).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Directory receiving every output file; must exist.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,
    /// Suppress progress messages on stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Validate a signal description and write it as a signal file.
    Generate(GenerateArgs),
    /// Sample a signal on t_k = t0 + k*tau and write a window CSV.
    Sample(SampleArgs),
    /// Recover the unknown samples of a window.
    Recover(RecoverArgs),
    /// Evaluate the sinc series of an all-known window on a time grid.
    Reconstruct(ReconstructArgs),
    /// Run an experiment described by a JSON config.
    Experiment(ExperimentArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    pub config: PathBuf,
    #[arg(long, default_value = "signal.json")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[arg(long)]
    pub signal: PathBuf,
    #[arg(long, value_parser = real)]
    pub tau: f64,
    #[arg(long, value_parser = real, default_value = "0")]
    pub t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub k_min: i64,
    #[arg(long, allow_hyphen_values = true)]
    pub k_max: i64,
    /// none | onesided:S | gaps:K1,K2,... | decimate-odd
    #[arg(long, default_value = "none")]
    pub drop: String,
    #[arg(long, default_value = "window.csv")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub window: PathBuf,
    /// pg | tsvd | gap
    #[arg(long)]
    pub method: String,
    /// Band fraction W = tau*Omega, e.g. 0.4pi.
    #[arg(long, value_parser = real)]
    pub band: f64,
    /// Transform size N (even, at least the window length); defaults to
    /// the window length rounded up to even.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    #[arg(long, value_parser = real, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, value_parser = real, default_value = "1")]
    pub relaxation: f64,
    #[arg(long, value_parser = real, default_value_t = DEFAULT_SV_CUTOFF)]
    pub sv_cutoff: f64,
    /// Writes `<prefix>.csv` and `<prefix>.json`.
    #[arg(long, default_value = "recovered")]
    pub prefix: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TaperArg {
    None,
    Hann,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub window: PathBuf,
    /// Sampling step; defaults to the window file's `step` comment.
    #[arg(long, value_parser = real)]
    pub tau: Option<f64>,
    /// Grid origin; defaults to the window file's `origin` comment or 0.
    #[arg(long, value_parser = real, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// `A:B:COUNT` (inclusive, evenly spaced) or `samples` for the window's
    /// own grid points.
    #[arg(long, default_value = "samples", allow_hyphen_values = true)]
    pub grid: String,
    /// Oracle signal; adds an `abs_error` column.
    #[arg(long)]
    pub signal: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "none")]
    pub taper: TaperArg,
    #[arg(long, default_value = "trace.csv")]
    pub output: String,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    pub config: PathBuf,
}

/// Provenance record of one invocation. Its hash is embedded in every
/// output file of the run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config: Value,
    pub inputs: Vec<InputRecord>,
    pub outputs: Vec<String>,
    pub version: String,
    pub config_hash: String,
    pub manifest_hash: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

impl RunManifest {
    pub fn new(command: &str, config: Value, inputs: &[(&Path, &[u8])], outputs: &[&Path]) -> Result<Self> {
        let inputs: Vec<InputRecord> = inputs
            .iter()
            .map(|(path, bytes)| InputRecord {
                path: path.display().to_string(),
                sha256: sha256_hex(bytes),
            })
            .collect();
        let outputs: Vec<String> = outputs.iter().map(|p| p.display().to_string()).collect();
        let version = crate::VERSION.to_string();
        let config_hash = sha256_hex(serde_json::to_string(&config)?.as_bytes());
        let hashed = json!({
            "command": command,
            "config": config,
            "inputs": inputs,
            "outputs": outputs,
            "version": version,
        });
        let manifest_hash = sha256_hex(serde_json::to_string(&hashed)?.as_bytes());
        Ok(Self {
            command: command.to_string(),
            config,
            inputs,
            outputs,
            version,
            config_hash,
            manifest_hash,
        })
    }

    fn write(&self, out_dir: &Path) -> Result<PathBuf> {
        let path = out_dir.join(format!("{}.manifest.json", self.command));
        fs::write(&path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(path)
    }
}

/// How samples are dropped from a freshly sampled window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DropSpec {
    None,
    Onesided(i64),
    Gaps(Vec<i64>),
    DecimateOdd,
}

impl FromStr for DropSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!(
            "drop spec `{s}` must be none | onesided:S | gaps:K1,K2,... | decimate-odd"
        ));
        let int = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
        match s.trim() {
            "none" => Ok(DropSpec::None),
            "decimate-odd" => Ok(DropSpec::DecimateOdd),
            other => match other.split_once(':') {
                Some(("onesided", v)) => Ok(DropSpec::Onesided(int(v)?)),
                Some(("gaps", v)) => Ok(DropSpec::Gaps(v.split(',').map(int).collect::<Result<_>>()?)),
                _ => Err(bad()),
            },
        }
    }
}

impl DropSpec {
    pub fn apply(&self, window: &mut SampleWindow) -> Result<()> {
        match self {
            DropSpec::None => {}
            DropSpec::Onesided(s) => window.mark_onesided(*s),
            DropSpec::Gaps(ks) => {
                for &k in ks {
                    window.mark_unknown(k)?;
                }
            }
            DropSpec::DecimateOdd => window.mark_odd_unknown(),
        }
        Ok(())
    }
}

/// Evaluation times of `A:B:COUNT`, inclusive of both ends.
pub fn parse_time_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, count] = parts.as_slice() else {
        return Err(Error::InvalidArgument(format!(
            "time grid `{spec}` must be `samples` or A:B:COUNT"
        )));
    };
    let (a, b) = (parse_real(a)?, parse_real(b)?);
    let count: usize = count
        .trim()
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("grid count `{count}` is not a positive integer")))?;
    match count {
        0 => Err(Error::InvalidArgument("grid count must be at least 1".into())),
        1 => Ok(vec![a]),
        _ => Ok((0..count)
            .map(|i| a + (b - a) * i as f64 / (count - 1) as f64)
            .collect()),
    }
}

struct Context {
    out_dir: PathBuf,
    quiet: bool,
    seed: Option<u64>,
}

impl Context {
    fn output(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    fn say(&self, msg: impl std::fmt::Display) {
        if !self.quiet {
            println!("{msg}");
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| {
        Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display())))
    })
}

fn text(bytes: &[u8]) -> Result<&str> {
    std::str::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))
}

fn with_hash_comment(hash: &str, body: &[u8]) -> Vec<u8> {
    let mut out = format!("# manifest_hash={hash}\n").into_bytes();
    out.extend_from_slice(body);
    out
}

fn generate(ctx: &Context, args: &GenerateArgs) -> Result<i32> {
    let raw = read(&args.config)?;
    let spec: SignalSpec = serde_json::from_slice(&raw)?;
    let signal = BandLimitedSignal::try_from(spec)?;
    let out = ctx.output(&args.output);
    let config = json!({ "config": args.config.display().to_string(), "output": args.output });
    let manifest = RunManifest::new("generate", config, &[(&args.config, &raw)], &[&out])?;
    let mut spec = signal.to_spec();
    spec.manifest_hash = Some(manifest.manifest_hash.clone());
    fs::write(&out, serde_json::to_string_pretty(&spec)? + "\n")?;
    manifest.write(&ctx.out_dir)?;
    ctx.say(format_args!("wrote {} ({} atoms)", out.display(), signal.atoms().len()));
    Ok(EXIT_OK)
}

fn sample(ctx: &Context, args: &SampleArgs) -> Result<i32> {
    let raw = read(&args.signal)?;
    let signal = BandLimitedSignal::from_json(text(&raw)?)?;
    let drop: DropSpec = args.drop.parse()?;
    let cutoff = match drop {
        DropSpec::Onesided(s) => s,
        _ => args.k_max,
    };
    let grid = SamplingGrid::new(args.tau, args.t0, cutoff)?;
    if matches!(drop, DropSpec::Onesided(_)) && !grid.oversamples(signal.band_limit()) {
        return Err(Error::OversamplingRequired(grid.band_fraction(signal.band_limit())));
    }
    let mut window = signal.sample(&grid, args.k_min, args.k_max)?;
    drop.apply(&mut window)?;
    let out = ctx.output(&args.output);
    let config = json!({
        "signal": args.signal.display().to_string(),
        "tau": args.tau,
        "t0": args.t0,
        "k_min": args.k_min,
        "k_max": args.k_max,
        "drop": args.drop,
        "output": args.output,
    });
    let manifest = RunManifest::new("sample", config, &[(&args.signal, &raw)], &[&out])?;
    let body = window.to_csv_string()?;
    fs::write(&out, with_hash_comment(&manifest.manifest_hash, body.as_bytes()))?;
    manifest.write(&ctx.out_dir)?;
    ctx.say(format_args!(
        "wrote {} ({} samples, {} unknown, W = {})",
        out.display(),
        window.len(),
        window.unknown_count(),
        grid.band_fraction(signal.band_limit())
    ));
    Ok(EXIT_OK)
}

fn recover_cmd(ctx: &Context, args: &RecoverArgs) -> Result<i32> {
    let method: Method = args.method.parse()?;
    let raw = read(&args.window)?;
    let window = SampleWindow::read_csv(raw.as_slice())?;
    let n = args.n.unwrap_or(window.len() + window.len() % 2);
    let problem = RecoveryProblem::new(window, args.band, n)?;
    let pg = PgParams {
        max_iter: args.max_iter,
        tol: args.tol,
        relaxation: args.relaxation,
    };
    let report = recover(&problem, method, &pg, args.sv_cutoff)?;
    let csv_path = ctx.output(&format!("{}.csv", args.prefix));
    let json_path = ctx.output(&format!("{}.json", args.prefix));
    let config = json!({
        "window": args.window.display().to_string(),
        "method": method,
        "band": args.band,
        "n": n,
        "max_iter": args.max_iter,
        "tol": args.tol,
        "relaxation": args.relaxation,
        "sv_cutoff": args.sv_cutoff,
        "prefix": args.prefix,
    });
    let manifest = RunManifest::new("recover", config, &[(&args.window, &raw)], &[&csv_path, &json_path])?;
    let mut body = Vec::new();
    report.write_csv(&mut body)?;
    fs::write(&csv_path, with_hash_comment(&manifest.manifest_hash, &body))?;
    let mut diagnostics = report.diagnostics(&problem);
    diagnostics.manifest_hash = Some(manifest.manifest_hash.clone());
    fs::write(&json_path, serde_json::to_string_pretty(&diagnostics)? + "\n")?;
    manifest.write(&ctx.out_dir)?;
    ctx.say(format_args!(
        "wrote {} and {} (method {}, {} iterations, converged = {})",
        csv_path.display(),
        json_path.display(),
        args.method,
        report.iterations_used,
        report.converged
    ));
    if report.converged {
        Ok(EXIT_OK)
    } else {
        eprintln!("error: {} did not converge within {} iterations", args.method, args.max_iter);
        Ok(EXIT_NOT_CONVERGED)
    }
}

fn reconstruct_cmd(ctx: &Context, args: &ReconstructArgs) -> Result<i32> {
    let raw = read(&args.window)?;
    let window = SampleWindow::read_csv(raw.as_slice())?;
    if window.unknown_count() > 0 {
        return Err(Error::UnknownSamples(window.unknown_count()));
    }
    let tau = args.tau.or(window.step()).ok_or_else(|| {
        Error::InvalidArgument("sampling step unknown: pass --tau or use a window with a `# step=` line".into())
    })?;
    let t0 = args.t0.or(window.origin()).unwrap_or(0.0);
    let times = if args.grid.trim() == "samples" {
        window.iter().map(|(k, _)| t0 + k as f64 * tau).collect()
    } else {
        parse_time_grid(&args.grid)?
    };
    let oracle = match &args.signal {
        Some(path) => {
            let bytes = read(path)?;
            Some((BandLimitedSignal::from_json(text(&bytes)?)?, bytes))
        }
        None => None,
    };
    let taper = match args.taper {
        TaperArg::None => Taper::None,
        TaperArg::Hann => Taper::Hann,
    };
    let out = ctx.output(&args.output);
    let config = json!({
        "window": args.window.display().to_string(),
        "tau": tau,
        "t0": t0,
        "grid": args.grid,
        "signal": args.signal.as_ref().map(|p| p.display().to_string()),
        "taper": format!("{:?}", args.taper).to_lowercase(),
        "output": args.output,
    });
    let mut inputs: Vec<(&Path, &[u8])> = vec![(&args.window, &raw)];
    if let (Some(path), Some((_, bytes))) = (&args.signal, &oracle) {
        inputs.push((path, bytes));
    }
    let manifest = RunManifest::new("reconstruct", config, &inputs, &[&out])?;
    let mut body = format!("# manifest_hash={}\n", manifest.manifest_hash).into_bytes();
    let header = if oracle.is_some() { "t,re,im,abs_error" } else { "t,re,im" };
    writeln!(body, "{header}")?;
    for &t in &times {
        let value = sinc_reconstruct_with(&window, tau, t0, t, taper)?.value;
        match &oracle {
            Some((signal, _)) => {
                let err = (value - signal.evaluate(t)).norm();
                writeln!(body, "{t},{},{},{err}", value.re, value.im)?;
            }
            None => writeln!(body, "{t},{},{}", value.re, value.im)?,
        }
    }
    fs::write(&out, body)?;
    manifest.write(&ctx.out_dir)?;
    ctx.say(format_args!("wrote {} ({} points)", out.display(), times.len()));
    Ok(EXIT_OK)
}

fn experiment_cmd(ctx: &Context, args: &ExperimentArgs) -> Result<i32> {
    let raw = read(&args.config)?;
    let mut config = ExperimentConfig::from_json(text(&raw)?)?;
    if let Some(seed) = ctx.seed {
        config.seed = seed;
    }
    let out = ctx.output(&config.output);
    let manifest = RunManifest::new(
        "experiment",
        serde_json::to_value(&config)?,
        &[(&args.config, &raw)],
        &[&out],
    )?;
    let mut table = config.run()?;
    table.meta("manifest_hash", &manifest.manifest_hash);
    fs::write(&out, table.to_csv_string())?;
    manifest.write(&ctx.out_dir)?;
    ctx.say(format_args!(
        "wrote {} ({} rows, experiment {})",
        out.display(),
        table.rows.len(),
        config.kind.name()
    ));
    Ok(EXIT_OK)
}

fn execute(cli: &Cli) -> Result<i32> {
    if !cli.out_dir.is_dir() {
        return Err(Error::InvalidArgument(format!(
            "output directory {} does not exist",
            cli.out_dir.display()
        )));
    }
    let ctx = Context {
        out_dir: cli.out_dir.clone(),
        quiet: cli.quiet,
        seed: cli.seed,
    };
    match &cli.command {
        Command::Generate(a) => generate(&ctx, a),
        Command::Sample(a) => sample(&ctx, a),
        Command::Recover(a) => recover_cmd(&ctx, a),
        Command::Reconstruct(a) => reconstruct_cmd(&ctx, a),
        Command::Experiment(a) => experiment_cmd(&ctx, a),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}
