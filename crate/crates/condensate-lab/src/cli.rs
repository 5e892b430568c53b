//! Command-line interface.
//!
//! Subcommands: spectrum, solve, sweep, verify, critical, cache-clear.
//! Exit codes: 0 ok, 1 solver failure, 2 invalid configuration, 3 verification
//! verdict failure. Validation failures print a machine-readable JSON object
//! on standard error with the offending config field.

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::bulk_spectrum::{statmech_spectrum, BulkMethod, SpectrumCache, WireParams};
use crate::config::{BulkMethodConfig, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::graph_spectrum::{lattice_spectrum, DefectLattice};
use crate::output;
use crate::statmech::solve_mu;
use crate::thermo::{self, verify};

pub const CACHE_ENV_VAR: &str = "CONDENSATE_LAB_CACHE";

#[derive(Parser)]
#[command(
    name = "condensate-lab",
    version,
    about = "Grand-canonical laboratory for electron-pair condensates on a wire with surface defects"
)]
pub struct Cli {
    /// Path to the JSON run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write results to this file instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format (default: json, or the config's output.format).
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Spectrum cache directory (overrides CONDENSATE_LAB_CACHE and config).
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker threads for parallel per-L solves (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SpectrumKind {
    Bulk,
    Graph,
}

#[derive(Subcommand)]
pub enum Command {
    /// Compute and emit a bulk or graph spectrum.
    Spectrum {
        #[arg(long, value_enum)]
        which: SpectrumKind,
    },
    /// Solve the grand-canonical density constraint at one wire length.
    Solve {
        /// Wire length (defaults to wire.length from the config).
        #[arg(long)]
        length: Option<f64>,
    },
    /// Solve every length of the configured schedule and extrapolate.
    Sweep,
    /// Run the four scripted theorem suites.
    Verify,
    /// Bisect the pair density for the condensation onset.
    Critical,
    /// Empty the spectrum cache.
    CacheClear,
}

/// Entry point: returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => code,
        Err(err) => {
            let field = err.field().map(str::to_owned);
            let payload = match &field {
                Some(f) => serde_json::json!({ "error": err.to_string(), "field": f }),
                None => serde_json::json!({ "error": err.to_string() }),
            };
            eprintln!("{payload}");
            match err {
                Error::InvalidInput { .. } => 2,
                _ => 1,
            }
        }
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    if let Some(jobs) = cli.jobs {
        // Ignore the error when a pool already exists (e.g. repeated calls in tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
    }

    if matches!(cli.command, Command::CacheClear) {
        return cache_clear(cli);
    }

    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| Error::invalid("config", "--config PATH is required"))?;
    let config = RunConfig::from_path(config_path)?;
    let fingerprint = config.fingerprint();
    let format = resolve_format(cli, &config);
    let cache_dir = resolve_cache_dir(cli, &config);

    let mut sink = open_sink(cli, &config)?;
    let out: &mut dyn Write = &mut *sink;

    match &cli.command {
        Command::Spectrum { which } => {
            cmd_spectrum(out, format, &fingerprint, &config, *which, &cache_dir)?;
            Ok(0)
        }
        Command::Solve { length } => {
            cmd_solve(out, format, &fingerprint, &config, *length, &cache_dir)?;
            Ok(0)
        }
        Command::Sweep => {
            let ctx = config.sweep_context(Some(cache_dir));
            let sweep = thermo::run_sweep(&ctx, &config.schedule_points()?)?;
            output::emit_sweep(out, format, &fingerprint, &sweep)?;
            Ok(0)
        }
        Command::Verify => {
            let report = verify::run_verification()?;
            output::emit_verify(out, format, &fingerprint, &report)?;
            Ok(if report.all_pass { 0 } else { 3 })
        }
        Command::Critical => {
            let critical_cfg = config.critical.clone().ok_or_else(|| {
                Error::invalid("critical", "the critical command needs a critical section")
            })?;
            let ctx = config.sweep_context(Some(cache_dir));
            let result = thermo::find_critical_density(
                &ctx,
                &config.schedule_points()?,
                (critical_cfg.rho_min, critical_cfg.rho_max),
                critical_cfg.eps_cond,
            )?;
            output::emit_critical(out, format, &fingerprint, &result)?;
            Ok(0)
        }
        Command::CacheClear => unreachable!("handled above"),
    }
}

fn cache_clear(cli: &Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(path) => Some(RunConfig::from_path(path)?),
        None => None,
    };
    let dir = cli
        .cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV_VAR).map(PathBuf::from))
        .or_else(|| config.as_ref().and_then(|c| c.cache_dir.clone()))
        .unwrap_or_else(default_cache_dir);
    let removed = SpectrumCache::new(&dir)?.clear()?;
    println!("{}", serde_json::json!({ "cache_dir": dir, "removed": removed }));
    Ok(0)
}

fn default_cache_dir() -> PathBuf {
    PathBuf::from("condensate-lab-cache")
}

fn resolve_cache_dir(cli: &Cli, config: &RunConfig) -> PathBuf {
    cli.cache_dir
        .clone()
        .or_else(|| std::env::var_os(CACHE_ENV_VAR).map(PathBuf::from))
        .or_else(|| config.cache_dir.clone())
        .unwrap_or_else(default_cache_dir)
}

fn resolve_format(cli: &Cli, config: &RunConfig) -> OutputFormat {
    match cli.format {
        Some(FormatArg::Csv) => OutputFormat::Csv,
        Some(FormatArg::Json) => OutputFormat::Json,
        None => config
            .output
            .as_ref()
            .map(|o| o.format)
            .unwrap_or(OutputFormat::Json),
    }
}

fn open_sink(cli: &Cli, config: &RunConfig) -> Result<Box<dyn Write>> {
    let path = cli
        .output
        .clone()
        .or_else(|| config.output.as_ref().and_then(|o| o.path.clone()));
    Ok(match path {
        Some(p) => Box::new(std::fs::File::create(p)?),
        None => Box::new(std::io::stdout()),
    })
}

fn required_length(config: &RunConfig, arg: Option<f64>) -> Result<f64> {
    arg.or(config.wire.length).ok_or_else(|| {
        Error::invalid("wire.length", "set wire.length in the config or pass --length")
    })
}

fn bulk_spectrum_for(
    config: &RunConfig,
    wire: &WireParams,
    cache_dir: &PathBuf,
) -> Result<crate::bulk_spectrum::Spectrum> {
    match &config.bulk_method {
        BulkMethodConfig::Separable { cutoff_energy: Some(cutoff) } => {
            let cache = SpectrumCache::new(cache_dir)?;
            cache.fetch_or_compute(wire, &BulkMethod::Separable { cutoff_energy: *cutoff })
        }
        BulkMethodConfig::Separable { cutoff_energy: None } => {
            statmech_spectrum(wire, config.physics.beta, config.physics.rho)
        }
        BulkMethodConfig::Fd2d { h, n_lowest } => {
            let cache = SpectrumCache::new(cache_dir)?;
            cache.fetch_or_compute(wire, &BulkMethod::Fd2d { h: *h, n_lowest: *n_lowest })
        }
    }
}

fn cmd_spectrum(
    out: &mut dyn Write,
    format: OutputFormat,
    fingerprint: &str,
    config: &RunConfig,
    which: SpectrumKind,
    cache_dir: &PathBuf,
) -> Result<()> {
    match which {
        SpectrumKind::Graph => {
            let count = match (config.lattice.count, config.wire.length) {
                (Some(count), _) => count,
                (None, Some(length)) => config.lattice_rule().defect_count(length),
                (None, None) => {
                    return Err(Error::invalid(
                        "lattice.count",
                        "graph spectrum needs lattice.count or wire.length",
                    ))
                }
            };
            let lattice = DefectLattice::new(
                count,
                config.lattice.delta,
                config.lattice.weight_spec.clone(),
            )?;
            let eigenvalues = lattice_spectrum(&lattice)?;
            output::emit_spectrum(
                out,
                format,
                fingerprint,
                "graph_spectrum",
                &eigenvalues,
                serde_json::json!({ "count": count, "delta": config.lattice.delta }),
            )
        }
        SpectrumKind::Bulk => {
            let length = required_length(config, None)?;
            let wire = WireParams::new(config.wire.d, length, config.wire.outer_bc)?;
            let spectrum = bulk_spectrum_for(config, &wire, cache_dir)?;
            output::emit_spectrum(
                out,
                format,
                fingerprint,
                "bulk_spectrum",
                &spectrum.eigenvalues,
                serde_json::json!({
                    "source": spectrum.source,
                    "cutoff_energy": spectrum.cutoff_energy,
                    "mesh_h": spectrum.mesh_h,
                    "fingerprint": spectrum.fingerprint,
                }),
            )
        }
    }
}

fn cmd_solve(
    out: &mut dyn Write,
    format: OutputFormat,
    fingerprint: &str,
    config: &RunConfig,
    length_arg: Option<f64>,
    cache_dir: &PathBuf,
) -> Result<()> {
    let length = required_length(config, length_arg)?;
    let wire = WireParams::new(config.wire.d, length, config.wire.outer_bc)?;
    let spectrum = bulk_spectrum_for(config, &wire, cache_dir)?;
    let count = config.defect_count_at(length);
    let lattice =
        DefectLattice::new(count, config.lattice.delta, config.lattice.weight_spec.clone())?;
    let graph_eigs = lattice_spectrum(&lattice)?;
    let params = config.physics_params();
    let solution = solve_mu(params.rho, &spectrum, Some(&graph_eigs), &params, length)?;
    output::emit_solution(out, format, fingerprint, length, &solution)
}
