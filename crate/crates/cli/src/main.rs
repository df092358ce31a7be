//! Command-line front end: generate point sets, peel them into convex
//! layers, check evenness, run growth sweeps, and cross-check the peeler
//! against the brute-force oracle.
//!
//! Exit codes: 0 success, 1 validation or I/O error (one-line diagnostic on
//! stderr), 2 analysis ran and refuted the property under test (uneven set,
//! oracle mismatch).

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use convex_layers::evenness::{certify_min_distance, probe_evenness, EvennessVerdict};
use convex_layers::experiments::{fit_exponent, run_sweep, ExperimentRecord, Family, SweepConfig};
use convex_layers::generators;
use convex_layers::geom;
use convex_layers::peel::{extreme_points, extreme_points_oracle, peel};
use convex_layers::PointSet64;

#[derive(Parser)]
#[command(
    name = "convex-layers",
    version,
    about = "Convex-layer peeling, evenness checks, and layer-growth experiments",
    arg_required_else_help = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a point set and write it in the point-set file format.
    ///
    /// Families: collinear (n points on a horizontal segment), convex
    /// (regular n-gon), uniform_ball (n uniform points in the unit d-ball),
    /// grid (the ceil(n^(1/d))^d lattice cube inscribed in the unit ball),
    /// onion (nested rings whose layer number grows like |X|^(3/4)).
    /// The onion family also emits its parameters as a JSON sidecar.
    Generate(GenerateArgs),
    /// Peel a point set into convex layers and write index,layer CSV.
    ///
    /// The CSV carries a `# format=1` first line, an `index,layer` header,
    /// one row per point in file order, and a trailing `# L=<count>` line
    /// with the total number of layers.
    Peel(PeelArgs),
    /// Check whether a point set is alpha-evenly distributed.
    ///
    /// Tries a minimum-distance certificate first; if that is not
    /// conclusive, probes random balls and nearest-neighbor balls for a
    /// counting violation. Verdicts: certified (proof), refuted (explicit
    /// witness ball, exit code 2), inconclusive (no violation found).
    /// Probe i draws from an independent stream seeded with
    /// splitmix64(seed XOR i*0x9E3779B97F4A7C15), so one --seed reproduces
    /// the whole probe sequence.
    CheckEven(CheckEvenArgs),
    /// Sweep a generator family over sizes and seeds, fit the growth exponent.
    ///
    /// Emits one CSV record per (n, seed) pair in canonical order plus an
    /// ordinary-least-squares fit of log layer_number against log size
    /// (seeds averaged within each size before fitting) as JSON.
    Experiment(ExperimentArgs),
    /// Compare the peeler's extreme points with a brute-force oracle.
    ///
    /// The oracle tests hull membership by exhaustive simplex enumeration
    /// and accepts at most 60 points in dimension at most 4. Exit code 2
    /// on mismatch.
    OracleVerify(OracleVerifyArgs),
}

#[derive(clap::Args)]
struct GenerateArgs {
    /// Family: collinear, convex, uniform_ball, grid, or onion.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Size parameter n passed to the generator.
    #[arg(long)]
    n: usize,
    /// Ambient dimension (uniform_ball and grid; the other families are planar).
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Evenness level alpha (onion family only).
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    /// Random seed (uniform_ball family only).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Expert override for the onion ring-pitch constant C
    /// (default: max{2 beta, 4 pi^2}, the value the layer-count guarantee assumes).
    #[arg(long)]
    onion_constant: Option<f64>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Onion parameter JSON destination
    /// (default: <output>.params.json when --output is set, otherwise skipped).
    #[arg(long)]
    params_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct PeelArgs {
    /// Input point-set file; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output CSV file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct CheckEvenArgs {
    /// Input point-set file; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Evenness level alpha to check (must exceed 1).
    #[arg(long)]
    alpha: f64,
    /// Number of probe balls.
    #[arg(long, default_value_t = 10_000)]
    probes: usize,
    /// Master seed for the probe sequence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output JSON file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args)]
struct ExperimentArgs {
    /// Family: collinear, convex, uniform_ball, grid, or onion.
    #[arg(long, value_parser = parse_family)]
    family: Family,
    /// Ambient dimension (uniform_ball and grid; the other families are planar).
    #[arg(long, default_value_t = 2)]
    d: usize,
    /// Comma-separated strictly increasing sizes, e.g. 1024,2048,4096.
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<usize>,
    /// Comma-separated seeds; every (n, seed) pair becomes one record.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    /// Evenness level alpha (onion family only).
    #[arg(long, default_value_t = 4.0)]
    alpha: f64,
    /// Worker threads; 1 keeps the sweep on a single thread.
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Record wall times in the CSV (omitting keeps output byte-reproducible).
    #[arg(long)]
    timings: bool,
    /// Records CSV destination; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Fit JSON destination; standard output when omitted.
    #[arg(long)]
    fit_out: Option<PathBuf>,
    /// Optional log-log table CSV (one row per size: mean size, mean layers, natural logs).
    #[arg(long)]
    loglog_out: Option<PathBuf>,
}

#[derive(clap::Args)]
struct OracleVerifyArgs {
    /// Input point-set file; standard input when omitted.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output JSON file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn parse_family(s: &str) -> Result<Family, String> {
    s.parse::<Family>().map_err(|e| e.to_string())
}

/// `# format=1`-style version stamp carried inside JSON outputs.
#[derive(Serialize)]
struct Versioned<T: Serialize> {
    format: u32,
    #[serde(flatten)]
    body: T,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
                    let _ = e.print();
                    ExitCode::from(1)
                }
                _ => {
                    let msg = e.to_string();
                    let first = msg
                        .lines()
                        .find(|l| !l.trim().is_empty())
                        .unwrap_or("error: invalid arguments");
                    eprintln!("{first}");
                    ExitCode::from(1)
                }
            };
        }
    };
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<u8, String> {
    match command {
        Command::Generate(a) => cmd_generate(a),
        Command::Peel(a) => cmd_peel(a),
        Command::CheckEven(a) => cmd_check_even(a),
        Command::Experiment(a) => cmd_experiment(a),
        Command::OracleVerify(a) => cmd_oracle_verify(a),
    }
}

fn cmd_generate(a: GenerateArgs) -> Result<u8, String> {
    if a.family != Family::Onion {
        if a.onion_constant.is_some() {
            return Err(format!("--onion-constant applies to the onion family, not {}", a.family));
        }
        if a.params_out.is_some() {
            return Err(format!("--params-out applies to the onion family, not {}", a.family));
        }
    }
    let planar = |d: usize| -> Result<(), String> {
        if d == 2 {
            Ok(())
        } else {
            Err(format!("family {} is 2-dimensional, got --d {d}", a.family))
        }
    };
    let mut params_json = None;
    let set = match a.family {
        Family::Collinear => {
            planar(a.d)?;
            generators::gen_collinear(a.n).map_err(|e| e.to_string())?
        }
        Family::Convex => {
            planar(a.d)?;
            generators::gen_convex_position(a.n).map_err(|e| e.to_string())?
        }
        Family::UniformBall => {
            generators::gen_uniform_ball(a.d, a.n, a.seed).map_err(|e| e.to_string())?
        }
        Family::Grid => generators::gen_grid(a.d, a.n).map_err(|e| e.to_string())?,
        Family::Onion => {
            planar(a.d)?;
            let (set, params) = generators::gen_onion_with_constant(a.n, a.alpha, a.onion_constant)
                .map_err(|e| e.to_string())?;
            let json = serde_json::to_string_pretty(&Versioned { format: 1, body: params })
                .map_err(|e| e.to_string())?;
            params_json = Some(json);
            set
        }
    };

    match &a.output {
        Some(path) => geom::save_point_set(path, &set)
            .map_err(|e| format!("{}: {e}", path.display()))?,
        None => {
            let stdout = io::stdout();
            geom::write_point_set(stdout.lock(), &set).map_err(|e| e.to_string())?;
        }
    }
    if let Some(json) = params_json {
        let target = a
            .params_out
            .clone()
            .or_else(|| a.output.as_ref().map(default_sidecar));
        if let Some(path) = target {
            std::fs::write(&path, json + "\n")
                .map_err(|e| format!("{}: {e}", path.display()))?;
        }
    }
    Ok(0)
}

fn default_sidecar(output: &PathBuf) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".params.json");
    PathBuf::from(name)
}

fn cmd_peel(a: PeelArgs) -> Result<u8, String> {
    let set = read_input(a.input.as_deref())?;
    let assignment = peel(&set).map_err(|e| e.to_string())?;
    let mut w = out_writer(a.output.as_deref())?;
    let mut emit = || -> io::Result<()> {
        writeln!(w, "# format=1")?;
        writeln!(w, "index,layer")?;
        for (i, layer) in assignment.layer_of().iter().enumerate() {
            writeln!(w, "{i},{layer}")?;
        }
        writeln!(w, "# L={}", assignment.layer_count())?;
        w.flush()
    };
    emit().map_err(|e| e.to_string())?;
    Ok(0)
}

fn cmd_check_even(a: CheckEvenArgs) -> Result<u8, String> {
    let set = read_input(a.input.as_deref())?;
    let report = {
        let cert = if set.len() >= 2 {
            Some(certify_min_distance(&set, a.alpha).map_err(|e| e.to_string())?)
        } else {
            None
        };
        match cert {
            Some(c) if c.verdict == EvennessVerdict::Certified => c,
            _ => probe_evenness(&set, a.alpha, a.probes, a.seed).map_err(|e| e.to_string())?,
        }
    };
    let refuted = report.verdict == EvennessVerdict::Refuted;
    let json = serde_json::to_string_pretty(&Versioned { format: 1, body: report })
        .map_err(|e| e.to_string())?;
    let mut w = out_writer(a.output.as_deref())?;
    writeln!(w, "{json}").and_then(|_| w.flush()).map_err(|e| e.to_string())?;
    Ok(if refuted { 2 } else { 0 })
}

fn cmd_experiment(a: ExperimentArgs) -> Result<u8, String> {
    let mut cfg = SweepConfig::new(a.family, a.d, a.n_list, a.seeds);
    cfg.alpha = a.alpha;
    cfg.threads = a.threads;
    cfg.record_timings = a.timings;
    let records = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let fit = fit_exponent(&records).map_err(|e| e.to_string())?;

    let mut w = out_writer(a.output.as_deref())?;
    let mut emit = || -> io::Result<()> {
        writeln!(w, "# format=1")?;
        writeln!(w, "family,d,n_param,actual_size,layer_number,seed,wall_time_ms")?;
        for r in &records {
            writeln!(
                w,
                "{},{},{},{},{},{},{}",
                r.family, r.d, r.n_param, r.actual_size, r.layer_number, r.seed, r.wall_time_ms
            )?;
        }
        w.flush()
    };
    emit().map_err(|e| e.to_string())?;

    if let Some(path) = &a.loglog_out {
        write_loglog_table(path, &records)?;
    }

    let json = serde_json::to_string_pretty(&Versioned { format: 1, body: fit })
        .map_err(|e| e.to_string())?;
    let mut w = out_writer(a.fit_out.as_deref())?;
    writeln!(w, "{json}").and_then(|_| w.flush()).map_err(|e| e.to_string())?;
    Ok(0)
}

fn write_loglog_table(path: &Path, records: &[ExperimentRecord]) -> Result<(), String> {
    let mut groups: Vec<(usize, Vec<&ExperimentRecord>)> = Vec::new();
    for r in records {
        match groups.iter_mut().find(|(n, _)| *n == r.n_param) {
            Some((_, v)) => v.push(r),
            None => groups.push((r.n_param, vec![r])),
        }
    }
    let mut w = out_writer(Some(path))?;
    let mut emit = || -> io::Result<()> {
        writeln!(w, "# format=1")?;
        writeln!(w, "n_param,mean_size,mean_layers,log_size,log_layers")?;
        for (n_param, group) in &groups {
            let mean_size: f64 =
                group.iter().map(|r| r.actual_size as f64).sum::<f64>() / group.len() as f64;
            let mean_layers: f64 =
                group.iter().map(|r| r.layer_number as f64).sum::<f64>() / group.len() as f64;
            writeln!(
                w,
                "{n_param},{mean_size},{mean_layers},{},{}",
                mean_size.ln(),
                mean_layers.ln()
            )?;
        }
        w.flush()
    };
    emit().map_err(|e| e.to_string())
}

fn cmd_oracle_verify(a: OracleVerifyArgs) -> Result<u8, String> {
    let set = read_input(a.input.as_deref())?;
    let engine = extreme_points(&set).map_err(|e| e.to_string())?;
    let oracle = extreme_points_oracle(&set).map_err(|e| e.to_string())?;
    let matches = engine == oracle;
    let json = if matches {
        serde_json::json!({
            "format": 1,
            "verdict": "match",
            "extreme_count": engine.len(),
        })
    } else {
        let engine_only: Vec<usize> =
            engine.iter().copied().filter(|i| !oracle.contains(i)).collect();
        let oracle_only: Vec<usize> =
            oracle.iter().copied().filter(|i| !engine.contains(i)).collect();
        serde_json::json!({
            "format": 1,
            "verdict": "mismatch",
            "engine": engine,
            "oracle": oracle,
            "engine_only": engine_only,
            "oracle_only": oracle_only,
        })
    };
    let mut w = out_writer(a.output.as_deref())?;
    writeln!(w, "{}", serde_json::to_string_pretty(&json).map_err(|e| e.to_string())?)
        .and_then(|_| w.flush())
        .map_err(|e| e.to_string())?;
    Ok(if matches { 0 } else { 2 })
}

fn read_input(path: Option<&Path>) -> Result<PointSet64, String> {
    match path {
        Some(p) => geom::load_point_set(p).map_err(|e| format!("{}: {e}", p.display())),
        None => geom::read_point_set(io::stdin().lock())
            .map_err(|e| format!("standard input: {e}")),
    }
}

fn out_writer(path: Option<&Path>) -> Result<Box<dyn Write>, String> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout())),
    })
}
