//! Result serialization. Every emitted document embeds the tool version and
//! the config fingerprint; identical configs and cache state produce
//! byte-identical output.

use std::io::Write;

use serde::Serialize;

use crate::config::OutputFormat;
use crate::error::Result;
use crate::statmech::GrandCanonicalSolution;
use crate::thermo::verify::VerifyReport;
use crate::thermo::{CriticalDensity, ThermoSweep};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool_version: &'static str,
    config_fingerprint: &'a str,
    kind: &'static str,
    data: T,
}

fn emit_json<T: Serialize>(
    out: &mut dyn Write,
    fingerprint: &str,
    kind: &'static str,
    data: T,
) -> Result<()> {
    let envelope = Envelope { tool_version: TOOL_VERSION, config_fingerprint: fingerprint, kind, data };
    serde_json::to_writer_pretty(&mut *out, &envelope)?;
    out.write_all(b"\n")?;
    Ok(())
}

fn csv_preamble(out: &mut dyn Write, fingerprint: &str) -> Result<()> {
    writeln!(out, "# condensate-lab {TOOL_VERSION}")?;
    writeln!(out, "# config {fingerprint}")?;
    Ok(())
}

/// Eigenvalue list (graph or bulk spectrum).
pub fn emit_spectrum(
    out: &mut dyn Write,
    format: OutputFormat,
    fingerprint: &str,
    kind: &'static str,
    eigenvalues: &[f64],
    metadata: serde_json::Value,
) -> Result<()> {
    match format {
        OutputFormat::Json => emit_json(
            out,
            fingerprint,
            kind,
            serde_json::json!({ "metadata": metadata, "eigenvalues": eigenvalues }),
        ),
        OutputFormat::Csv => {
            csv_preamble(out, fingerprint)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["index", "eigenvalue"])?;
            for (i, v) in eigenvalues.iter().enumerate() {
                w.write_record(&[i.to_string(), format!("{v}")])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn emit_solution(
    out: &mut dyn Write,
    format: OutputFormat,
    fingerprint: &str,
    length: f64,
    solution: &GrandCanonicalSolution,
) -> Result<()> {
    match format {
        OutputFormat::Json => emit_json(
            out,
            fingerprint,
            "grand_canonical_solution",
            serde_json::json!({ "length": length, "solution": solution }),
        ),
        OutputFormat::Csv => {
            csv_preamble(out, fingerprint)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "length",
                "mu",
                "rho_s",
                "rho0",
                "bulk_gap",
                "density_residual",
                "fixed_point_residual",
            ])?;
            w.write_record(&[
                format!("{length}"),
                format!("{}", solution.mu),
                format!("{}", solution.rho_s),
                format!("{}", solution.rho0),
                format!("{}", solution.bulk_gap),
                format!("{}", solution.density_residual),
                format!("{}", solution.fixed_point_residual),
            ])?;
            w.flush()?;
            Ok(())
        }
    }
}

pub fn emit_sweep(
    out: &mut dyn Write,
    format: OutputFormat,
    fingerprint: &str,
    sweep: &ThermoSweep,
) -> Result<()> {
    match format {
        OutputFormat::Json => emit_json(out, fingerprint, "thermo_sweep", sweep),
        OutputFormat::Csv => {
            csv_preamble(out, fingerprint)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record([
                "L",
                "n_L",
                "mu",
                "rho_s",
                "rho0",
                "ground_occupation",
                "balance_residual",
            ])?;
            for p in &sweep.per_l {
                w.write_record(&[
                    format!("{}", p.length),
                    format!("{}", p.n_defects),
                    format!("{}", p.solution.mu),
                    format!("{}", p.solution.rho_s),
                    format!("{}", p.solution.rho0),
                    format!("{}", p.solution.bulk_occupations[0]),
                    format!("{}", p.balance_residual),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn emit_critical(
    out: &mut dyn Write,
    format: OutputFormat,
    fingerprint: &str,
    critical: &CriticalDensity,
) -> Result<()> {
    match format {
        OutputFormat::Json => emit_json(out, fingerprint, "critical_density", critical),
        OutputFormat::Csv => {
            csv_preamble(out, fingerprint)?;
            writeln!(out, "# rho_crit {}", critical.rho_crit)?;
            writeln!(out, "# bracket {} {}", critical.bracket_lo, critical.bracket_hi)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["probe", "rho", "rho0_extrapolated", "condensed"])?;
            for (i, p) in critical.history.iter().enumerate() {
                w.write_record(&[
                    i.to_string(),
                    format!("{}", p.rho),
                    format!("{}", p.rho0_limit),
                    p.condensed.to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

pub fn emit_verify(
    out: &mut dyn Write,
    format: OutputFormat,
    fingerprint: &str,
    report: &VerifyReport,
) -> Result<()> {
    match format {
        OutputFormat::Json => emit_json(out, fingerprint, "verification", report),
        OutputFormat::Csv => {
            csv_preamble(out, fingerprint)?;
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["suite", "pass", "details"])?;
            for s in &report.suites {
                w.write_record(&[s.name.clone(), s.pass.to_string(), s.details.clone()])?;
            }
            w.flush()?;
            Ok(())
        }
    }
}
