//! Thermodynamic-limit machinery: L-schedules, per-L grand-canonical solves,
//! 1/L extrapolation, the limit-balance check, destruction/reconstruction
//! verdicts, and the critical-density finder.

pub mod fit;
pub mod polylog;
pub mod rho_exc;
pub mod verify;

use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bulk_spectrum::{
    continuum_ground_energy, statmech_spectrum, BulkMethod, OuterBc, SpectrumCache, WireParams,
};
use crate::error::{Error, Result};
use crate::graph_spectrum::{lattice_spectrum, DefectLattice, WeightSpec};
use crate::statmech::{solve_mu, GrandCanonicalSolution, PhysicalParams};

pub use fit::AffineFit;
pub use rho_exc::{rho_exc, rho_exc_dmu, RhoExcMethod};

/// Condensation indicator threshold on the extrapolated rho_0.
pub const EPS_COND_DEFAULT: f64 = 1e-3;
/// Tolerance floor for destruction verdicts and the limit balance.
pub const LIMIT_TOL: f64 = 1e-3;

/// Rule generating the defect count n(L) along a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LatticeRule {
    pub delta: f64,
    pub weight_spec: WeightSpec,
}

impl LatticeRule {
    /// n(L) = max(1, round(L / delta)) for delta > 0. delta = 0 encodes
    /// super-linear defect growth, n(L) = round(L ln(1 + L)): any growth
    /// faster than L realizes lim L/n(L) = 0, and the logarithmic factor
    /// keeps the matrices small.
    pub fn defect_count(&self, length: f64) -> usize {
        if self.delta > 0.0 {
            ((length / self.delta).round() as usize).max(1)
        } else {
            ((length * (1.0 + length).ln()).round() as usize).max(1)
        }
    }

    pub fn lattice(&self, length: f64) -> Result<DefectLattice> {
        DefectLattice::new(self.defect_count(length), self.delta, self.weight_spec.clone())
    }
}

/// Bulk spectra used inside sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SweepBulkModel {
    /// Separable model with the adaptive statmech cutoff.
    Separable,
    /// Finite-difference spectra; `n_lowest` levels enter the Bose sums.
    Fd2d { h: f64, n_lowest: usize },
}

/// Everything a sweep needs besides the L-schedule.
#[derive(Clone, Debug)]
pub struct SweepContext {
    pub d: f64,
    pub outer_bc: OuterBc,
    /// None runs the bulk-only system (no surface summand).
    pub lattice: Option<LatticeRule>,
    pub params: PhysicalParams,
    pub bulk: SweepBulkModel,
    pub cache_dir: Option<PathBuf>,
}

/// One solved point of a sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepPoint {
    pub length: f64,
    pub n_defects: usize,
    pub solution: GrandCanonicalSolution,
    /// |(n/L) rho_s + rho_0 - (rho - rho_exc(beta, mu_L))| at this L.
    pub balance_residual: f64,
}

/// Intercepts of the a + b/L fits over the schedule tail, with standard errors.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Extrapolated {
    pub mu_limit: f64,
    pub mu_se: f64,
    pub rho_s_limit: f64,
    pub rho_s_se: f64,
    pub rho0_limit: f64,
    pub rho0_se: f64,
    /// Limit of (n(L)/L) rho_s, fitted directly.
    pub surface_density_limit: f64,
    pub surface_density_se: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ThermoSweep {
    pub schedule: Vec<f64>,
    pub delta: f64,
    pub d: f64,
    pub params: PhysicalParams,
    pub per_l: Vec<SweepPoint>,
    pub extrapolated: Extrapolated,
    /// rho_exc(beta, mu_limit, d).
    pub rho_exc_value: f64,
    /// |surface_density_limit + rho0_limit - (rho - rho_exc_value)|.
    pub balance_residual: f64,
    /// max(1e-3, propagated fit error).
    pub balance_tolerance: f64,
    pub warnings: Vec<String>,
}

/// Geometric L-schedule with `count` points from `l_min` to `l_max` inclusive.
pub fn geometric_schedule(l_min: f64, l_max: f64, count: usize) -> Vec<f64> {
    assert!(count >= 2 && l_min > 0.0 && l_max > l_min);
    let ratio = (l_max / l_min).powf(1.0 / (count - 1) as f64);
    (0..count)
        .map(|k| {
            if k == count - 1 {
                l_max
            } else {
                l_min * ratio.powi(k as i32)
            }
        })
        .collect()
}

fn validate_schedule(schedule: &[f64]) -> Result<()> {
    if schedule.len() < 4 {
        return Err(Error::invalid(
            "schedule",
            format!("extrapolation needs at least 4 lengths, got {}", schedule.len()),
        ));
    }
    if schedule.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::invalid("schedule", "lengths must be strictly increasing"));
    }
    if !(schedule[0] > 0.0) {
        return Err(Error::invalid("schedule", "lengths must be positive"));
    }
    Ok(())
}

/// rho_exc with mu clamped just below the continuum threshold; the flag
/// reports whether clamping was needed.
fn rho_exc_clamped(beta: f64, mu: f64, d: f64) -> Result<(f64, f64, bool)> {
    if mu == f64::NEG_INFINITY {
        return Ok((0.0, 0.0, false));
    }
    let e0 = continuum_ground_energy(d);
    let margin = 1e-12 * e0.max(1.0);
    let (mu_eff, clamped) = if mu > e0 - margin { (e0 - margin, true) } else { (mu, false) };
    let value = rho_exc(beta, mu_eff, d, RhoExcMethod::Series)?;
    let slope = rho_exc_dmu(beta, mu_eff, d)?;
    Ok((value, slope, clamped))
}

/// Solve one schedule point.
fn solve_point(ctx: &SweepContext, length: f64) -> Result<SweepPoint> {
    let wire = WireParams::new(ctx.d, length, ctx.outer_bc)?;
    let spectrum = match &ctx.bulk {
        SweepBulkModel::Separable => statmech_spectrum(&wire, ctx.params.beta, ctx.params.rho)?,
        SweepBulkModel::Fd2d { h, n_lowest } => {
            let method = BulkMethod::Fd2d { h: *h, n_lowest: *n_lowest };
            match &ctx.cache_dir {
                Some(dir) => SpectrumCache::new(dir)?.fetch_or_compute(&wire, &method)?,
                None => crate::bulk_spectrum::fd2d_spectrum(&wire, *h, *n_lowest)?,
            }
        }
    };
    let (n_defects, graph_eigs) = match &ctx.lattice {
        Some(rule) => {
            let lattice = rule.lattice(length)?;
            let eigs = lattice_spectrum(&lattice)?;
            (lattice.count(), Some(eigs))
        }
        None => (0, None),
    };
    let solution = solve_mu(ctx.params.rho, &spectrum, graph_eigs.as_deref(), &ctx.params, length)?;
    let (rexc, _, _) = rho_exc_clamped(ctx.params.beta, solution.mu, ctx.d)?;
    let balance_residual = ((n_defects as f64 / length) * solution.rho_s + solution.rho0
        - (ctx.params.rho - rexc))
        .abs();
    Ok(SweepPoint { length, n_defects, solution, balance_residual })
}

/// Solve every length of the schedule (in parallel), extrapolate to L -> inf,
/// and evaluate the limit balance.
pub fn run_sweep(ctx: &SweepContext, schedule: &[f64]) -> Result<ThermoSweep> {
    validate_schedule(schedule)?;
    ctx.params.validate()?;
    let per_l: Vec<SweepPoint> = schedule
        .par_iter()
        .map(|&l| {
            solve_point(ctx, l).map_err(|e| Error::SweepPoint { length: l, source: Box::new(e) })
        })
        .collect::<Result<Vec<_>>>()?;

    let lengths: Vec<f64> = per_l.iter().map(|p| p.length).collect();
    let mu: Vec<f64> = per_l.iter().map(|p| p.solution.mu).collect();
    let rho_s: Vec<f64> = per_l.iter().map(|p| p.solution.rho_s).collect();
    let rho0: Vec<f64> = per_l.iter().map(|p| p.solution.rho0).collect();
    let surf_density: Vec<f64> = per_l
        .iter()
        .map(|p| (p.n_defects as f64 / p.length) * p.solution.rho_s)
        .collect();

    let mu_fit = fit::extrapolate_in_inverse_length(&lengths, &mu);
    let rho_s_fit = fit::extrapolate_in_inverse_length(&lengths, &rho_s);
    let rho0_fit = fit::extrapolate_in_inverse_length(&lengths, &rho0);
    let surf_fit = fit::extrapolate_in_inverse_length(&lengths, &surf_density);

    let mut warnings = Vec::new();
    if !is_monotone(&mu) {
        warnings.push("mu_L is not monotone across the schedule".to_string());
    }
    if !is_monotone(&rho0) {
        warnings.push("rho0(L) is not monotone across the schedule".to_string());
    }

    let (rho_exc_value, rexc_slope, clamped) =
        rho_exc_clamped(ctx.params.beta, mu_fit.intercept, ctx.d)?;
    if clamped {
        warnings.push(format!(
            "extrapolated mu {} reached the continuum threshold; rho_exc evaluated at the clamp",
            mu_fit.intercept
        ));
    }
    let balance_residual = (surf_fit.intercept + rho0_fit.intercept
        - (ctx.params.rho - rho_exc_value))
        .abs();
    let fit_error =
        surf_fit.intercept_se + rho0_fit.intercept_se + rexc_slope.abs() * mu_fit.intercept_se;
    let balance_tolerance = LIMIT_TOL.max(fit_error);

    Ok(ThermoSweep {
        schedule: schedule.to_vec(),
        delta: ctx.lattice.as_ref().map_or(f64::INFINITY, |r| r.delta),
        d: ctx.d,
        params: ctx.params,
        per_l,
        extrapolated: Extrapolated {
            mu_limit: mu_fit.intercept,
            mu_se: mu_fit.intercept_se,
            rho_s_limit: rho_s_fit.intercept,
            rho_s_se: rho_s_fit.intercept_se,
            rho0_limit: rho0_fit.intercept,
            rho0_se: rho0_fit.intercept_se,
            surface_density_limit: surf_fit.intercept,
            surface_density_se: surf_fit.intercept_se,
        },
        rho_exc_value,
        balance_residual,
        balance_tolerance,
        warnings,
    })
}

fn is_monotone(values: &[f64]) -> bool {
    values.windows(2).all(|w| w[1] >= w[0]) || values.windows(2).all(|w| w[1] <= w[0])
}

/// Verdict of the non-interacting destruction check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DestructionVerdict {
    pub pass: bool,
    pub ground_strictly_decreasing: bool,
    pub ground_limit: f64,
    pub first_excited_limit: f64,
    pub tolerance: f64,
    /// Fitted 1/L decay coefficients of the two ratios.
    pub ground_decay: f64,
    pub first_excited_decay: f64,
    pub mu_below_minus_alpha: bool,
}

/// For lambda = 0: occupation(E_n(L))/L must decrease along the schedule and
/// extrapolate to zero for the ground and first excited bulk states, and
/// every mu_L must sit below -alpha.
pub fn check_destruction_i(sweep: &ThermoSweep) -> Result<DestructionVerdict> {
    check_destruction_i_with_tolerance(sweep, LIMIT_TOL)
}

pub fn check_destruction_i_with_tolerance(
    sweep: &ThermoSweep,
    tolerance: f64,
) -> Result<DestructionVerdict> {
    if sweep.params.lambda != 0.0 {
        return Err(Error::invalid(
            "physics.lambda",
            "destruction-I applies to the non-interacting system (lambda = 0)",
        ));
    }
    let lengths: Vec<f64> = sweep.per_l.iter().map(|p| p.length).collect();
    let ground: Vec<f64> = sweep.per_l.iter().map(|p| p.solution.rho0).collect();
    let first: Vec<f64> = sweep
        .per_l
        .iter()
        .map(|p| {
            p.solution
                .bulk_occupations
                .get(1)
                .map(|occ| occ / p.length)
                .ok_or_else(|| Error::invalid("spectrum", "need at least two bulk levels"))
        })
        .collect::<Result<Vec<_>>>()?;

    let ground_strictly_decreasing = ground.windows(2).all(|w| w[1] < w[0]);
    let ground_fit = fit::extrapolate_in_inverse_length(&lengths, &ground);
    let first_fit = fit::extrapolate_in_inverse_length(&lengths, &first);
    let mu_below_minus_alpha = sweep
        .per_l
        .iter()
        .all(|p| p.solution.mu < -sweep.params.alpha);

    let pass = ground_strictly_decreasing
        && ground_fit.intercept.abs() <= tolerance
        && first_fit.intercept.abs() <= tolerance
        && mu_below_minus_alpha;
    Ok(DestructionVerdict {
        pass,
        ground_strictly_decreasing,
        ground_limit: ground_fit.intercept,
        first_excited_limit: first_fit.intercept,
        tolerance,
        ground_decay: ground_fit.slope,
        first_excited_decay: first_fit.slope,
        mu_below_minus_alpha,
    })
}

/// The interacting destruction condition and its density-only corollary.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ConditionRecord {
    /// rho_tilde(mu, delta) = delta (rho - rho_exc(beta, mu)).
    pub rho_tilde: f64,
    /// (E_0 + alpha) / (nu lambda).
    pub bound: f64,
    pub condition_met: bool,
    /// delta * rho, the corollary's left-hand side.
    pub corollary_product: f64,
    pub corollary_met: bool,
    pub rho_exc_value: f64,
}

pub fn check_condition_lemma(
    params: &PhysicalParams,
    delta: f64,
    mu_limit: f64,
    d: f64,
) -> Result<ConditionRecord> {
    params.validate()?;
    if !(params.lambda > 0.0) {
        return Err(Error::invalid(
            "physics.lambda",
            "the destruction-II condition needs lambda > 0",
        ));
    }
    let (rho_exc_value, _, _) = rho_exc_clamped(params.beta, mu_limit, d)?;
    let rho_tilde = delta * (params.rho - rho_exc_value);
    let bound = (continuum_ground_energy(d) + params.alpha) / (params.nu * params.lambda);
    let corollary_product = delta * params.rho;
    Ok(ConditionRecord {
        rho_tilde,
        bound,
        condition_met: rho_tilde < bound,
        corollary_product,
        corollary_met: corollary_product < bound,
        rho_exc_value,
    })
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct CriticalProbe {
    pub rho: f64,
    pub rho0_limit: f64,
    pub condensed: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriticalDensity {
    pub rho_crit: f64,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub eps_cond: f64,
    /// Every probe evaluated during bracketing and bisection, in order.
    pub history: Vec<CriticalProbe>,
}

/// Bisect the pair density for the onset of a positive extrapolated ground
/// ratio (indicator: rho0_limit > eps_cond). The bracket must straddle the
/// indicator; the returned bracket width is at most 1% of rho_crit.
pub fn find_critical_density(
    ctx: &SweepContext,
    schedule: &[f64],
    rho_bracket: (f64, f64),
    eps_cond: f64,
) -> Result<CriticalDensity> {
    let rule = ctx.lattice.as_ref().ok_or_else(|| {
        Error::invalid("lattice", "critical-density search needs a defect lattice")
    })?;
    if !(rule.delta > 0.0) {
        return Err(Error::invalid("lattice.delta", "critical-density search needs delta > 0"));
    }
    if !(ctx.params.lambda > 0.0) {
        return Err(Error::invalid("physics.lambda", "critical-density search needs lambda > 0"));
    }
    let (mut lo, mut hi) = rho_bracket;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::invalid("critical.rho_bracket", "need 0 < rho_min < rho_max"));
    }

    let mut history = Vec::new();
    let probe = |rho: f64, history: &mut Vec<CriticalProbe>| -> Result<bool> {
        let mut probe_ctx = ctx.clone();
        probe_ctx.params.rho = rho;
        let sweep = run_sweep(&probe_ctx, schedule)?;
        let rho0_limit = sweep.extrapolated.rho0_limit;
        let condensed = rho0_limit > eps_cond;
        history.push(CriticalProbe { rho, rho0_limit, condensed });
        Ok(condensed)
    };

    let lo_condensed = probe(lo, &mut history)?;
    let hi_condensed = probe(hi, &mut history)?;
    if lo_condensed || !hi_condensed {
        return Err(Error::BracketFailure {
            context: "critical density",
            lo,
            hi,
            f_lo: history[0].rho0_limit,
            f_hi: history[1].rho0_limit,
        });
    }

    for _ in 0..64 {
        if hi - lo <= 0.01 * 0.5 * (hi + lo) {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if probe(mid, &mut history)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    Ok(CriticalDensity {
        rho_crit: 0.5 * (lo + hi),
        bracket_lo: lo,
        bracket_hi: hi,
        eps_cond,
        history,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn unit_rule(delta: f64) -> LatticeRule {
        LatticeRule { delta, weight_spec: WeightSpec::Constant { value: 1.0 } }
    }

    fn ctx(params: PhysicalParams, delta: f64) -> SweepContext {
        SweepContext {
            d: 1.0,
            outer_bc: OuterBc::Dirichlet,
            lattice: Some(unit_rule(delta)),
            params,
            bulk: SweepBulkModel::Separable,
            cache_dir: None,
        }
    }

    #[test]
    fn geometric_schedule_hits_the_endpoints() {
        let s = geometric_schedule(25.0, 400.0, 8);
        assert_eq!(s.len(), 8);
        assert_abs_diff_eq!(s[0], 25.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s[7], 400.0, epsilon = 1e-12);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn defect_count_rules() {
        assert_eq!(unit_rule(1.0).defect_count(25.0), 25);
        assert_eq!(unit_rule(0.5).defect_count(25.0), 50);
        assert_eq!(unit_rule(2.0).defect_count(1.0), 1); // max(1, ...)
        // delta = 0: super-linear growth
        let n100 = unit_rule(0.0).defect_count(100.0);
        assert_eq!(n100, (100.0f64 * 101.0f64.ln()).round() as usize);
        assert!(n100 > 400);
    }

    #[test]
    fn sweep_rejects_bad_schedules() {
        let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 0.0, rho: 1.0, nu: 2.0 };
        let c = ctx(params, 1.0);
        assert!(run_sweep(&c, &[10.0, 20.0, 30.0]).is_err());
        assert!(run_sweep(&c, &[10.0, 20.0, 15.0, 40.0]).is_err());
    }

    #[test]
    fn noninteracting_sweep_destroys_the_bulk_condensate() {
        let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 0.0, rho: 1.0, nu: 2.0 };
        let c = ctx(params, 1.0);
        let schedule = geometric_schedule(25.0, 200.0, 6);
        let sweep = run_sweep(&c, &schedule).unwrap();
        let verdict = check_destruction_i(&sweep).unwrap();
        assert!(verdict.pass, "verdict: {verdict:?}");
        assert!(verdict.ground_limit.abs() <= 1e-3);
        // Surface holds everything: per-length surface density ~ rho.
        assert_abs_diff_eq!(sweep.extrapolated.surface_density_limit, 1.0, epsilon = 1e-2);
        // Limit balance.
        assert!(sweep.balance_residual <= sweep.balance_tolerance);
    }

    #[test]
    fn destruction_check_rejects_interacting_sweeps() {
        let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 1.0, rho: 1.0, nu: 2.0 };
        let c = ctx(params, 1.0);
        let schedule = geometric_schedule(25.0, 100.0, 4);
        let sweep = run_sweep(&c, &schedule).unwrap();
        assert!(check_destruction_i(&sweep).is_err());
    }

    #[test]
    fn condition_record_flips_exactly_at_the_bound() {
        // With mu_limit -> -inf, rho_exc = 0 and rho_tilde = delta * rho: the
        // lemma and corollary conditions coincide and flip at the bound.
        let d = 1.0;
        let delta = 0.25;
        let base = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 1.0, rho: 1.0, nu: 2.0 };
        let bound = (continuum_ground_energy(d) + base.alpha) / (base.nu * base.lambda);
        for scale in [0.5, 0.99, 1.01, 2.0] {
            let mut p = base;
            p.rho = bound / delta * scale;
            let rec = check_condition_lemma(&p, delta, f64::NEG_INFINITY, d).unwrap();
            assert_eq!(rec.condition_met, scale < 1.0, "scale {scale}");
            assert_eq!(rec.corollary_met, scale < 1.0);
            assert_abs_diff_eq!(rec.rho_tilde, delta * p.rho, epsilon = 1e-12);
        }
    }

    #[test]
    fn delta_zero_makes_rho_tilde_vanish() {
        let p = PhysicalParams { beta: 1.0, alpha: 0.0, lambda: 5.0, rho: 100.0, nu: 2.0 };
        let rec = check_condition_lemma(&p, 0.0, 10.0, 1.0).unwrap();
        assert_eq!(rec.rho_tilde, 0.0);
        assert!(rec.condition_met);
    }

    #[test]
    fn balance_holds_along_a_lemma_regime_sweep() {
        // delta rho = 1 < (E_0 + alpha)/(nu lambda) ~ 10.4: destruction-II regime.
        let params = PhysicalParams { beta: 1.0, alpha: 1.0, lambda: 1.0, rho: 1.0, nu: 2.0 };
        let c = ctx(params, 1.0);
        let schedule = geometric_schedule(25.0, 200.0, 6);
        let sweep = run_sweep(&c, &schedule).unwrap();
        assert!(sweep.extrapolated.rho0_limit.abs() <= 1e-3);
        assert!(sweep.balance_residual <= sweep.balance_tolerance);
        let rec =
            check_condition_lemma(&params, 1.0, sweep.extrapolated.mu_limit, 1.0).unwrap();
        assert!(rec.condition_met);
        // Eq-(20)-style identity: rho_s limit = rho_tilde - delta rho_0.
        let identity_gap = (sweep.extrapolated.rho_s_limit
            - (rec.rho_tilde - 1.0 * sweep.extrapolated.rho0_limit))
            .abs();
        assert!(identity_gap <= sweep.balance_tolerance.max(2e-2), "gap {identity_gap}");
    }
}
