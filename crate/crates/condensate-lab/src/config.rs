//! Run configuration: one JSON document, validated up front with dotted
//! field paths in every error so the CLI can report machine-readable
//! diagnostics.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bulk_spectrum::OuterBc;
use crate::error::{Error, Result};
use crate::graph_spectrum::WeightSpec;
use crate::statmech::PhysicalParams;
use crate::thermo::{LatticeRule, SweepBulkModel, SweepContext, EPS_COND_DEFAULT};
use crate::util;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub wire: WireConfig,
    pub lattice: LatticeConfig,
    pub physics: PhysicsConfig,
    #[serde(default)]
    pub bulk_method: BulkMethodConfig,
    #[serde(default)]
    pub schedule: Option<ScheduleConfig>,
    #[serde(default)]
    pub critical: Option<CriticalConfig>,
    #[serde(default)]
    pub output: Option<OutputConfig>,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WireConfig {
    pub d: f64,
    /// Wire length for single-L commands (spectrum, solve); sweeps take
    /// lengths from the schedule instead.
    #[serde(default)]
    pub length: Option<f64>,
    #[serde(default)]
    pub outer_bc: OuterBc,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    /// Target of lim L / n(L); 0 selects super-linear defect growth.
    pub delta: f64,
    #[serde(default)]
    pub weight_spec: WeightSpec,
    /// Explicit defect count for single-L commands; defaults to the n(L) rule.
    #[serde(default)]
    pub count: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub beta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub rho: f64,
    #[serde(default = "default_nu")]
    pub nu: f64,
}

fn default_nu() -> f64 {
    2.0
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum BulkMethodConfig {
    Separable {
        /// Explicit cutoff for spectrum dumps; solves pick it adaptively.
        #[serde(default)]
        cutoff_energy: Option<f64>,
    },
    Fd2d { h: f64, n_lowest: usize },
}

impl Default for BulkMethodConfig {
    fn default() -> Self {
        BulkMethodConfig::Separable { cutoff_energy: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    Linear,
    Geometric,
}

impl Default for Spacing {
    fn default() -> Self {
        Spacing::Geometric
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScheduleConfig {
    List(Vec<f64>),
    Range {
        l_min: f64,
        l_max: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CriticalConfig {
    pub rho_min: f64,
    pub rho_max: f64,
    #[serde(default = "default_eps_cond")]
    pub eps_cond: f64,
}

fn default_eps_cond() -> f64 {
    EPS_COND_DEFAULT
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub format: OutputFormat,
    #[serde(default)]
    pub path: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let config: RunConfig = serde_json::from_str(&text).map_err(|e| Error::InvalidInput {
            field: "config".into(),
            message: format!("failed to parse {}: {e}", path.display()),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wire.d > 0.0) {
            return Err(Error::invalid("wire.d", format!("d must be positive, got {}", self.wire.d)));
        }
        if let Some(length) = self.wire.length {
            if !(self.wire.d < length) {
                return Err(Error::invalid(
                    "wire.d",
                    format!("need 0 < d < L, got d = {}, L = {length}", self.wire.d),
                ));
            }
        }
        if !(self.lattice.delta >= 0.0) {
            return Err(Error::invalid(
                "lattice.delta",
                format!("delta must be nonnegative, got {}", self.lattice.delta),
            ));
        }
        if let Some(count) = self.lattice.count {
            if count < 1 {
                return Err(Error::invalid("lattice.count", "defect count must be >= 1"));
            }
        }
        match &self.lattice.weight_spec {
            WeightSpec::Constant { value } if !(*value > 0.0) => {
                return Err(Error::invalid(
                    "lattice.weight_spec.value",
                    format!("constant weight must be positive, got {value}"),
                ));
            }
            WeightSpec::Random { min, max, .. } if !(*min >= 0.0 && min < max) => {
                return Err(Error::invalid(
                    "lattice.weight_spec",
                    format!("random weights need 0 <= min < max, got ({min}, {max})"),
                ));
            }
            _ => {}
        }
        self.physics_params().validate()?;
        if let BulkMethodConfig::Fd2d { h, n_lowest } = &self.bulk_method {
            if !(*h > 0.0) {
                return Err(Error::invalid("bulk_method.h", "mesh size must be positive"));
            }
            if *n_lowest < 1 {
                return Err(Error::invalid("bulk_method.n_lowest", "need n_lowest >= 1"));
            }
        }
        if let Some(schedule) = &self.schedule {
            match schedule {
                ScheduleConfig::List(list) => {
                    if list.is_empty() {
                        return Err(Error::invalid("schedule", "schedule must be nonempty"));
                    }
                    if list.windows(2).any(|w| !(w[0] < w[1])) || !(list[0] > 0.0) {
                        return Err(Error::invalid(
                            "schedule",
                            "lengths must be positive and strictly increasing",
                        ));
                    }
                }
                ScheduleConfig::Range { l_min, l_max, count, .. } => {
                    if !(*l_min > 0.0 && l_max > l_min) {
                        return Err(Error::invalid(
                            "schedule.l_min",
                            format!("need 0 < l_min < l_max, got ({l_min}, {l_max})"),
                        ));
                    }
                    if *count < 2 {
                        return Err(Error::invalid("schedule.count", "need at least 2 points"));
                    }
                }
            }
        }
        if let Some(critical) = &self.critical {
            if !(critical.rho_min > 0.0 && critical.rho_max > critical.rho_min) {
                return Err(Error::invalid(
                    "critical.rho_min",
                    format!(
                        "need 0 < rho_min < rho_max, got ({}, {})",
                        critical.rho_min, critical.rho_max
                    ),
                ));
            }
            if !(critical.eps_cond > 0.0) {
                return Err(Error::invalid("critical.eps_cond", "eps_cond must be positive"));
            }
        }
        Ok(())
    }

    pub fn physics_params(&self) -> PhysicalParams {
        PhysicalParams {
            beta: self.physics.beta,
            alpha: self.physics.alpha,
            lambda: self.physics.lambda,
            rho: self.physics.rho,
            nu: self.physics.nu,
        }
    }

    pub fn lattice_rule(&self) -> LatticeRule {
        LatticeRule { delta: self.lattice.delta, weight_spec: self.lattice.weight_spec.clone() }
    }

    /// Defect count at a given length: the explicit override or the n(L) rule.
    pub fn defect_count_at(&self, length: f64) -> usize {
        self.lattice.count.unwrap_or_else(|| self.lattice_rule().defect_count(length))
    }

    pub fn sweep_bulk_model(&self) -> SweepBulkModel {
        match &self.bulk_method {
            BulkMethodConfig::Separable { .. } => SweepBulkModel::Separable,
            BulkMethodConfig::Fd2d { h, n_lowest } => {
                SweepBulkModel::Fd2d { h: *h, n_lowest: *n_lowest }
            }
        }
    }

    pub fn sweep_context(&self, cache_dir: Option<PathBuf>) -> SweepContext {
        SweepContext {
            d: self.wire.d,
            outer_bc: self.wire.outer_bc,
            lattice: Some(self.lattice_rule()),
            params: self.physics_params(),
            bulk: self.sweep_bulk_model(),
            cache_dir,
        }
    }

    /// Expanded L-schedule.
    pub fn schedule_points(&self) -> Result<Vec<f64>> {
        let schedule = self.schedule.as_ref().ok_or_else(|| {
            Error::invalid("schedule", "this command requires a schedule")
        })?;
        Ok(match schedule {
            ScheduleConfig::List(list) => list.clone(),
            ScheduleConfig::Range { l_min, l_max, count, spacing } => match spacing {
                Spacing::Geometric => crate::thermo::geometric_schedule(*l_min, *l_max, *count),
                Spacing::Linear => {
                    let step = (l_max - l_min) / (*count as f64 - 1.0);
                    (0..*count).map(|k| l_min + step * k as f64).collect()
                }
            },
        })
    }

    /// Stable fingerprint of the full configuration.
    pub fn fingerprint(&self) -> String {
        let canonical = serde_json::to_string(self).expect("config serializes");
        util::fingerprint(&canonical)
    }
}
