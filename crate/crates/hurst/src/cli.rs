//! `hurst` command line. Exit codes: 0 success, 1 runtime error, 2 usage.

use std::f64::consts::PI;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use hurst_core::{
    estimate_from_pyramid, gtlme_asymptotics, gtme_asymptotics, ndwt_forward,
    optimal_gtlme_weights, optimal_gtme_weights, pollen_filter, EstimatorConfig, Method,
    TrimeanWeights,
};

use crate::fbm::{generate_fbm, FbmSpec};
use crate::io::{format_coefficients, format_signal, read_coefficients, read_signal, write_file};
use crate::sim::{format_csv, format_json, run_simulation, RunOptions, SimulationPlan};
use crate::Result;

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "hurst",
    version,
    about = "Robust wavelet Hurst exponent estimation"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate H from a signal file and print the estimate as JSON.
    Estimate(EstimateArgs),
    /// Run a Monte Carlo plan and write the summary CSV.
    Simulate(SimulateArgs),
    /// Synthesize a fractional Brownian motion path.
    Fbm(FbmArgs),
    /// Write NDWT detail coefficients as CSV, or dump the filter.
    Ndwt(NdwtArgs),
    /// Print optimal trimean weights and their variance factor.
    Params(ParamsArgs),
}

#[derive(Debug, Args)]
pub struct WaveletArgs {
    /// Pollen angle in radians, or one of haar, daub2, pi4, pi3.
    #[arg(long, default_value = "haar", value_parser = parse_angle)]
    pub angle: f64,
    /// Decomposition depth J.
    #[arg(long, default_value_t = 10)]
    pub levels: usize,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Signal file (or coefficient CSV with --coefficients).
    pub input: PathBuf,
    /// Estimator.
    #[arg(long, default_value = "ttme", value_parser = parse_method)]
    pub method: Method,
    /// Run every method; one JSON object per line.
    #[arg(long, conflicts_with = "method")]
    pub all_methods: bool,
    #[command(flatten)]
    pub wavelet: WaveletArgs,
    /// Lowest level used in the regression.
    #[arg(long, default_value_t = 4)]
    pub lo: usize,
    /// Highest level used in the regression.
    #[arg(long, default_value_t = 10)]
    pub hi: usize,
    /// Number of strided groups M.
    #[arg(long, default_value_t = 8)]
    pub groups: usize,
    /// Include the trimean weights in the output.
    #[arg(long)]
    pub print_weights: bool,
    /// Treat INPUT as a `level,index,value` coefficient CSV.
    #[arg(long)]
    pub coefficients: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Preset plan 1, 2 or 3: the defaults at N = 2^10, 2^11, 2^12.
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub table: Option<u8>,
    /// TOML plan file.
    #[arg(long, conflicts_with = "table")]
    pub config: Option<PathBuf>,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',', value_parser = parse_method)]
    pub methods: Option<Vec<Method>>,
    /// Comma-separated true H values.
    #[arg(long, value_delimiter = ',')]
    pub h: Option<Vec<f64>>,
    /// Comma-separated path lengths.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Replications per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated Pollen angles (radians or aliases).
    #[arg(long, value_delimiter = ',', value_parser = parse_angle)]
    pub angles: Option<Vec<f64>>,
    /// CSV output path; standard output if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Also write the rows as JSON here.
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// Worker threads (default: HURST_WORKERS, else all cores).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub workers: Option<u64>,
}

#[derive(Debug, Args)]
pub struct FbmArgs {
    /// Path length.
    #[arg(long)]
    pub n: usize,
    /// Hurst exponent in (0, 1).
    #[arg(long)]
    pub h: f64,
    /// Scale.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; standard output if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NdwtArgs {
    /// Signal file (not needed with --dump-filter).
    #[arg(required_unless_present = "dump_filter")]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub wavelet: WaveletArgs,
    /// Print the filter taps as JSON instead of transforming.
    #[arg(long)]
    pub dump_filter: bool,
    /// Output path; standard output if omitted.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Family {
    Gtme,
    Gtlme,
}

#[derive(Debug, Args)]
pub struct ParamsArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Search tolerance in p (gtlme only).
    #[arg(long, default_value_t = 1e-9, value_parser = parse_tolerance, allow_hyphen_values = true)]
    pub tolerance: f64,
}

fn parse_angle(s: &str) -> Result<f64, String> {
    match s.trim().to_ascii_lowercase().as_str() {
        "haar" => Ok(PI / 2.0),
        "daub2" => Ok(PI / 6.0),
        "pi4" => Ok(PI / 4.0),
        "pi3" => Ok(PI / 3.0),
        other => other
            .parse::<f64>()
            .ok()
            .filter(|a| a.is_finite())
            .ok_or_else(|| format!("expected radians or haar/daub2/pi4/pi3, got {s:?}")),
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = Method::ALL
            .iter()
            .map(|m| m.name().to_ascii_lowercase())
            .collect();
        format!(
            "unknown method {s:?} (expected one of {})",
            names.join(", ")
        )
    })
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(t) if t > 0.0 && t.is_finite() => Ok(t),
        _ => Err(format!("tolerance must be a positive number, got {s:?}")),
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let rendered = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = sink.write_all(rendered.as_bytes());
            return code;
        }
    };
    match dispatch(cli.command, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            EXIT_RUNTIME
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<()> {
    match cmd {
        Command::Estimate(a) => estimate(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Fbm(a) => fbm(a, out),
        Command::Ndwt(a) => ndwt(a, out),
        Command::Params(a) => params(a, out),
    }
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| crate::Error::io("<stdout>", e)),
    }
}

fn estimate(a: EstimateArgs, out: &mut dyn Write) -> Result<()> {
    let filter = pollen_filter(a.wavelet.angle);
    let pyramid = if a.coefficients {
        read_coefficients(&a.input, filter)?
    } else {
        let signal = read_signal(&a.input)?;
        ndwt_forward(signal.values(), &filter, a.wavelet.levels)?
    };
    let base = EstimatorConfig {
        wavelet_angle: a.wavelet.angle,
        levels: pyramid.levels(),
        level_range: (a.lo, a.hi),
        groups: a.groups,
        ..EstimatorConfig::new(a.method)
    };
    let methods: Vec<Method> = if a.all_methods {
        Method::ALL.to_vec()
    } else {
        vec![a.method]
    };
    let mut text = String::new();
    for m in methods {
        let mut est = estimate_from_pyramid(&pyramid, &base.with_method(m))?;
        if !a.print_weights {
            est.weights = None;
        }
        text.push_str(&serde_json::to_string(&est)?);
        text.push('\n');
    }
    emit(out, None, &text)
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let mut plan = match (&a.config, a.table) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| crate::Error::io(path, e))?;
            SimulationPlan::from_toml(&text)?
        }
        (None, Some(t)) => SimulationPlan::table(t)?,
        (None, None) => SimulationPlan::default(),
    };
    if let Some(m) = a.methods {
        plan.methods = m;
    }
    if let Some(h) = a.h {
        plan.h_values = h;
    }
    if let Some(n) = a.n {
        plan.n_values = n;
    }
    if let Some(r) = a.reps {
        plan.replications = r;
    }
    if let Some(s) = a.seed {
        plan.master_seed = s;
    }
    if let Some(angles) = a.angles {
        plan.wavelet_angles = angles;
    }
    let options = RunOptions {
        workers: a.workers.map(|w| w as usize),
        observer: None,
    };
    let rows = run_simulation(&plan, &options)?;
    if let Some(path) = &a.json {
        write_file(path, &format_json(&rows)?)?;
    }
    emit(out, a.output.as_deref(), &format_csv(&rows))
}

fn fbm(a: FbmArgs, out: &mut dyn Write) -> Result<()> {
    let spec = FbmSpec {
        n: a.n,
        hurst: a.h,
        sigma: a.sigma,
        seed: a.seed,
    };
    let signal = generate_fbm(&spec)?;
    emit(out, a.output.as_deref(), &format_signal(&signal))
}

fn ndwt(a: NdwtArgs, out: &mut dyn Write) -> Result<()> {
    let filter = pollen_filter(a.wavelet.angle);
    if a.dump_filter {
        let mut text = serde_json::to_string(&filter)?;
        text.push('\n');
        return emit(out, a.output.as_deref(), &text);
    }
    let input = a.input.expect("clap requires INPUT without --dump-filter");
    let signal = read_signal(&input)?;
    let pyramid = ndwt_forward(signal.values(), &filter, a.wavelet.levels)?;
    emit(out, a.output.as_deref(), &format_coefficients(&pyramid))
}

#[derive(serde::Serialize)]
struct ParamsOutput {
    alpha: f64,
    p: f64,
    f: f64,
}

fn params(a: ParamsArgs, out: &mut dyn Write) -> Result<()> {
    let (w, f): (TrimeanWeights, f64) = match a.family {
        Family::Gtme => {
            let w = optimal_gtme_weights();
            (w, gtme_asymptotics(w).f)
        }
        Family::Gtlme => {
            let w = optimal_gtlme_weights(a.tolerance)?;
            (w, gtlme_asymptotics(w).f)
        }
    };
    let mut text = serde_json::to_string(&ParamsOutput {
        alpha: w.alpha(),
        p: w.p(),
        f,
    })?;
    text.push('\n');
    emit(out, None, &text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn angle_aliases() {
        assert_eq!(parse_angle("haar").unwrap(), PI / 2.0);
        assert_eq!(parse_angle("DAUB2").unwrap(), PI / 6.0);
        assert_eq!(parse_angle("pi4").unwrap(), PI / 4.0);
        assert_eq!(parse_angle("pi3").unwrap(), PI / 3.0);
        assert_eq!(parse_angle("0.25").unwrap(), 0.25);
        assert!(parse_angle("inf").is_err());
        assert!(parse_angle("db4").is_err());
    }

    #[test]
    fn tolerance_must_be_positive() {
        assert!(parse_tolerance("1e-4").is_ok());
        assert!(parse_tolerance("-1").is_err());
        assert!(parse_tolerance("0").is_err());
    }

    #[test]
    fn clap_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
