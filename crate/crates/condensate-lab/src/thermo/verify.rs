//! Scripted theorem-verification suites on desk-scale defaults: the two
//! destruction regimes, the vanishing-delta corollary, and reconstruction of
//! the bulk condensate above a critical density.

use serde::{Deserialize, Serialize};

use super::{
    check_condition_lemma, check_destruction_i, find_critical_density, geometric_schedule,
    run_sweep, LatticeRule, SweepBulkModel, SweepContext, EPS_COND_DEFAULT, LIMIT_TOL,
};
use crate::bulk_spectrum::OuterBc;
use crate::error::Result;
use crate::graph_spectrum::WeightSpec;
use crate::statmech::PhysicalParams;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteVerdict {
    pub name: String,
    pub pass: bool,
    pub details: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub suites: Vec<SuiteVerdict>,
    pub all_pass: bool,
}

fn base_ctx(params: PhysicalParams, delta: f64) -> SweepContext {
    SweepContext {
        d: 1.0,
        outer_bc: OuterBc::Dirichlet,
        lattice: Some(LatticeRule { delta, weight_spec: WeightSpec::Constant { value: 1.0 } }),
        params,
        bulk: SweepBulkModel::Separable,
        cache_dir: None,
    }
}

fn default_schedule() -> Vec<f64> {
    geometric_schedule(25.0, 400.0, 8)
}

/// Non-interacting destruction: lambda = 0, alpha = 1, beta = 1, rho = 1,
/// delta = 1, unit weights.
pub fn verify_destruction_i() -> Result<SuiteVerdict> {
    let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 0.0, rho: 1.0, nu: 2.0 };
    let sweep = run_sweep(&base_ctx(params, 1.0), &default_schedule())?;
    let verdict = check_destruction_i(&sweep)?;
    Ok(SuiteVerdict {
        name: "destruction-I".into(),
        pass: verdict.pass,
        details: format!(
            "ground ratio limit {:.3e} (tol {:.1e}), strictly decreasing: {}, mu < -alpha: {}",
            verdict.ground_limit, verdict.tolerance, verdict.ground_strictly_decreasing,
            verdict.mu_below_minus_alpha
        ),
    })
}

/// Interacting destruction under the smallness condition: delta = 1, nu = 2,
/// parameters with delta * rho < (E_0 + alpha)/(nu lambda).
pub fn verify_destruction_ii() -> Result<SuiteVerdict> {
    let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 1.0, rho: 1.0, nu: 2.0 };
    let sweep = run_sweep(&base_ctx(params, 1.0), &default_schedule())?;
    let record = check_condition_lemma(&params, 1.0, sweep.extrapolated.mu_limit, 1.0)?;
    let rho0 = sweep.extrapolated.rho0_limit;
    let pass = record.condition_met && record.corollary_met && rho0.abs() <= LIMIT_TOL;
    Ok(SuiteVerdict {
        name: "destruction-II".into(),
        pass,
        details: format!(
            "rho_tilde {:.4} < bound {:.4}: {}; extrapolated rho_0 {:.3e}",
            record.rho_tilde, record.bound, record.condition_met, rho0
        ),
    })
}

/// Vanishing-delta corollary: super-linear defect growth kills the bulk
/// condensate for every interaction strength.
pub fn verify_corollary_delta_zero() -> Result<SuiteVerdict> {
    let mut worst: f64 = 0.0;
    for lambda in [0.1, 1.0, 10.0] {
        let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda, rho: 1.0, nu: 2.0 };
        let sweep = run_sweep(&base_ctx(params, 0.0), &default_schedule())?;
        worst = worst.max(sweep.extrapolated.rho0_limit.abs());
    }
    Ok(SuiteVerdict {
        name: "corollary-delta-zero".into(),
        pass: worst <= LIMIT_TOL,
        details: format!("worst extrapolated rho_0 over lambda in {{0.1, 1, 10}}: {worst:.3e}"),
    })
}

/// Reconstruction: delta = 1, lambda = 1, alpha = 0.5, beta = 1. A critical
/// density exists in the bracket and doubling it leaves the indicator
/// decisively condensed.
pub fn verify_reconstruction() -> Result<SuiteVerdict> {
    let params = PhysicalParams { beta: 1.0, alpha: 0.5, lambda: 1.0, rho: 1.0, nu: 2.0 };
    let ctx = base_ctx(params, 1.0);
    let schedule = default_schedule();
    let critical = find_critical_density(&ctx, &schedule, (2.0, 150.0), EPS_COND_DEFAULT)?;
    let mut above_ctx = ctx.clone();
    above_ctx.params.rho = 2.0 * critical.rho_crit;
    let above = run_sweep(&above_ctx, &schedule)?;
    let rho0_above = above.extrapolated.rho0_limit;
    let pass = critical.rho_crit > 0.0
        && (critical.bracket_hi - critical.bracket_lo) <= 0.01 * critical.rho_crit
        && rho0_above > EPS_COND_DEFAULT;
    Ok(SuiteVerdict {
        name: "reconstruction".into(),
        pass,
        details: format!(
            "rho_crit {:.4} (bracket [{:.4}, {:.4}]), rho_0 at 2 rho_crit: {:.4e}",
            critical.rho_crit, critical.bracket_lo, critical.bracket_hi, rho0_above
        ),
    })
}

/// Run all four scripted verdicts.
pub fn run_verification() -> Result<VerifyReport> {
    let suites = vec![
        verify_destruction_i()?,
        verify_destruction_ii()?,
        verify_corollary_delta_zero()?,
        verify_reconstruction()?,
    ];
    let all_pass = suites.iter().all(|s| s.pass);
    Ok(VerifyReport { suites, all_pass })
}
