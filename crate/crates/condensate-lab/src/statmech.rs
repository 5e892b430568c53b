//! Grand-canonical occupation statistics and the coupled solve for
//! (mu_L, rho_s) at fixed wire length.
//!
//! The surface fixed point is nested inside the chemical-potential bisection:
//! for every trial mu the defect chain is first brought to self-consistency
//! under the mean-field level shift lambda * rho_s, then the total density is
//! compared against the target. Monotonicity of the density in mu makes the
//! outer bisection safe.
//!
//! Internally mu is parametrized by the gap g = mu_max(L) - mu > 0 and the
//! bisection runs geometrically in g. Energies enter occupations only through
//! precomputed differences plus g, so occupations keep full relative accuracy
//! arbitrarily close to the condensation pole instead of dissolving into
//! cancellation noise at mu ~ E_0(L).

use serde::{Deserialize, Serialize};

use crate::bulk_spectrum::Spectrum;
use crate::error::{Error, Result};

/// Target on |total_density - rho| relative to max(1, rho).
pub const DENSITY_TOL_REL: f64 = 1e-10;
/// Target on the mu bracket width (absolute, with an ULP-scale relative floor).
pub const MU_TOL_ABS: f64 = 1e-12;
/// Target on the surface fixed-point residual |rho_s - mean occupation|.
pub const FIXED_POINT_TOL: f64 = 1e-12;

/// Inverse temperature, surface tension, pair interaction strength, target
/// density, and the condition parameter nu.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub beta: f64,
    pub alpha: f64,
    pub lambda: f64,
    pub rho: f64,
    pub nu: f64,
}

impl PhysicalParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0) {
            return Err(Error::invalid("physics.beta", format!("beta must be > 0, got {}", self.beta)));
        }
        if !(self.alpha >= 0.0) {
            return Err(Error::invalid("physics.alpha", format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if !(self.lambda >= 0.0) {
            return Err(Error::invalid("physics.lambda", format!("lambda must be >= 0, got {}", self.lambda)));
        }
        if !(self.rho > 0.0) {
            return Err(Error::invalid("physics.rho", format!("rho must be > 0, got {}", self.rho)));
        }
        if !(self.nu > 1.0) {
            return Err(Error::invalid("physics.nu", format!("nu must be > 1, got {}", self.nu)));
        }
        Ok(())
    }
}

/// Bose occupation 1 / (e^{beta (E - mu)} - 1); requires E > mu.
pub fn occupation(energy: f64, mu: f64, beta: f64) -> Result<f64> {
    let x = beta * (energy - mu);
    if !(x > 0.0) {
        return Err(Error::OccupationDomain { energy, mu });
    }
    Ok(occ_x(x))
}

#[inline]
fn occ_x(x: f64) -> f64 {
    1.0 / x.exp_m1()
}

/// Result of the surface self-consistency solve at fixed mu.
#[derive(Clone, Copy, Debug)]
pub struct SurfaceFixedPoint {
    pub rho_s: f64,
    pub residual: f64,
}

/// Self-consistent surface density per defect at chemical potential `mu`.
///
/// For lambda > 0 this is the unique rho_s > max(0, (mu + alpha)/lambda) with
/// rho_s = (1/n) sum_j occ(lambda_j - alpha + lambda rho_s, mu); for
/// lambda = 0 it is the direct mean, defined only for mu < -alpha.
pub fn surface_fixed_point(
    graph_eigs: &[f64],
    mu: f64,
    params: &PhysicalParams,
) -> Result<SurfaceFixedPoint> {
    let bases: Vec<f64> = graph_eigs.iter().map(|l| l - params.alpha - mu).collect();
    let (rho_s, residual) = solve_surface(params.beta, params.lambda, &bases)?;
    Ok(SurfaceFixedPoint { rho_s, residual })
}

/// Core surface solver. `bases[j]` is the occupation exponent of mode j up to
/// the interaction shift: exponent_j(r) = beta * (bases[j] + lambda * r).
fn solve_surface(beta: f64, lambda: f64, bases: &[f64]) -> Result<(f64, f64)> {
    let n = bases.len();
    assert!(n > 0, "surface solver needs at least one mode");
    let min_base = bases.iter().copied().fold(f64::INFINITY, f64::min);

    if lambda == 0.0 {
        if !(min_base > 0.0) {
            return Err(Error::OccupationDomain {
                energy: min_base,
                mu: 0.0,
            });
        }
        let mean = bases.iter().map(|b| occ_x(beta * b)).sum::<f64>() / n as f64;
        return Ok((mean, 0.0));
    }

    let mean_occ = |r: f64| -> f64 {
        bases.iter().map(|b| occ_x(beta * (b + lambda * r))).sum::<f64>() / n as f64
    };
    let f = |r: f64| mean_occ(r) - r;
    // d/dr of the mean occupation is -beta lambda occ (occ + 1), so f' < -1.
    let f_and_deriv = |r: f64| -> (f64, f64) {
        let mut sum = 0.0;
        let mut dsum = 0.0;
        for b in bases {
            let occ = occ_x(beta * (b + lambda * r));
            sum += occ;
            dsum += occ * (1.0 + occ);
        }
        let mean = sum / n as f64;
        (mean - r, -beta * lambda * dsum / n as f64 - 1.0)
    };

    // Domain: all exponents positive, i.e. r > r_lo.
    let r_lo = -min_base / lambda;
    let mut lo;
    if r_lo < 0.0 {
        lo = 0.0;
        let at_zero = mean_occ(0.0);
        if at_zero == 0.0 {
            return Ok((0.0, 0.0));
        }
    } else {
        // Nudge just inside the domain.
        let mut step = f64::EPSILON * r_lo.abs().max(1e-30);
        loop {
            lo = r_lo + step;
            if beta * (min_base + lambda * lo) > 0.0 {
                break;
            }
            step *= 2.0;
        }
        let f_lo = f(lo);
        if f_lo < 0.0 {
            // Root pinched between the domain edge and the first representable
            // point; the residual is bounded by the nudge itself.
            return Ok((lo, f_lo.abs()));
        }
    }

    let mut hi = (2.0 * lo).max(lo + 1.0);
    let mut expansions = 0usize;
    while f(hi) > 0.0 {
        lo = hi;
        hi *= 2.0;
        expansions += 1;
        if expansions > 800 || !hi.is_finite() {
            return Err(Error::BracketFailure {
                context: "surface fixed point",
                lo,
                hi,
                f_lo: f(lo),
                f_hi: f(hi),
            });
        }
    }

    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    // Newton polish inside the bracket.
    let mut r = 0.5 * (lo + hi);
    let (mut fr, mut dfr) = f_and_deriv(r);
    let mut best = (r, fr.abs());
    for _ in 0..8 {
        if best.1 <= 0.25 * FIXED_POINT_TOL {
            break;
        }
        let next = r - fr / dfr;
        if !next.is_finite() || next <= r_lo.max(0.0) {
            break;
        }
        r = next;
        let (nf, ndf) = f_and_deriv(r);
        fr = nf;
        dfr = ndf;
        if fr.abs() < best.1 {
            best = (r, fr.abs());
        }
    }
    Ok(best)
}

/// Per-length pair density at chemical potential mu:
/// (1/L) [ n rho_s(mu) + sum_n occ(E_n(L), mu) ].
pub fn total_density(
    mu: f64,
    bulk: &Spectrum,
    graph_eigs: Option<&[f64]>,
    params: &PhysicalParams,
    length: f64,
) -> Result<f64> {
    let system = System::new(bulk, graph_eigs, params, length)?;
    let g = system.mu_sup - mu;
    if !(g > 0.0) {
        return Err(Error::OccupationDomain { energy: system.mu_sup, mu });
    }
    Ok(system.density_at_gap(g)?.density)
}

/// Full grand-canonical state at fixed L.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GrandCanonicalSolution {
    pub mu: f64,
    pub rho_s: f64,
    /// Occupation of each surface mode, in graph-eigenvalue order.
    pub surface_occupations: Vec<f64>,
    /// Occupation of each retained bulk level, ascending in energy.
    pub bulk_occupations: Vec<f64>,
    /// Ground bulk occupation divided by L.
    pub rho0: f64,
    pub density_residual: f64,
    pub fixed_point_residual: f64,
    /// E_0(L) - mu, kept explicitly: it stays fully resolved even when mu is
    /// within rounding distance of the ground level.
    pub bulk_gap: f64,
}

struct DensityEval {
    density: f64,
    rho_s: f64,
    fp_residual: f64,
}

struct System<'a> {
    beta: f64,
    lambda: f64,
    length: f64,
    mu_sup: f64,
    /// E_n - mu_sup, ascending, first entry >= 0.
    bulk_gaps: Vec<f64>,
    /// lambda_j - alpha - mu_sup.
    surface_bases: Vec<f64>,
    n_defects: usize,
    e0_minus_sup: f64,
    _marker: std::marker::PhantomData<&'a ()>,
}

impl<'a> System<'a> {
    fn new(
        bulk: &Spectrum,
        graph_eigs: Option<&'a [f64]>,
        params: &PhysicalParams,
        length: f64,
    ) -> Result<Self> {
        params.validate()?;
        bulk.validate()?;
        if !(length > 0.0) {
            return Err(Error::invalid("wire.length", "length must be positive"));
        }
        let e0 = bulk.ground();
        let has_surface = graph_eigs.is_some_and(|e| !e.is_empty());
        let mu_sup = if params.lambda == 0.0 && has_surface {
            // Non-interacting defects cap mu at -alpha as well as at E_0(L).
            e0.min(-params.alpha)
        } else {
            e0
        };
        let base_shift = -params.alpha - mu_sup;
        let surface_bases: Vec<f64> = graph_eigs
            .unwrap_or(&[])
            .iter()
            .map(|l| l + base_shift)
            .collect();
        let bulk_gaps: Vec<f64> = bulk.eigenvalues.iter().map(|e| e - mu_sup).collect();
        Ok(Self {
            beta: params.beta,
            lambda: params.lambda,
            length,
            mu_sup,
            bulk_gaps,
            n_defects: surface_bases.len(),
            surface_bases,
            e0_minus_sup: e0 - mu_sup,
            _marker: std::marker::PhantomData,
        })
    }

    fn surface_at_gap(&self, g: f64) -> Result<(f64, f64)> {
        if self.n_defects == 0 {
            return Ok((0.0, 0.0));
        }
        let bases: Vec<f64> = self.surface_bases.iter().map(|b| b + g).collect();
        solve_surface(self.beta, self.lambda, &bases)
    }

    fn density_at_gap(&self, g: f64) -> Result<DensityEval> {
        let (rho_s, fp_residual) = self.surface_at_gap(g)?;
        let bulk_total: f64 = self
            .bulk_gaps
            .iter()
            .map(|gap| occ_x(self.beta * (gap + g)))
            .sum();
        let density = (self.n_defects as f64 * rho_s + bulk_total) / self.length;
        Ok(DensityEval { density, rho_s, fp_residual })
    }

    fn solution_at_gap(&self, g: f64, eval: &DensityEval, target_rho: f64) -> GrandCanonicalSolution {
        let shift = self.lambda * eval.rho_s + g;
        let surface_occupations: Vec<f64> = self
            .surface_bases
            .iter()
            .map(|b| occ_x(self.beta * (b + shift)))
            .collect();
        let bulk_occupations: Vec<f64> = self
            .bulk_gaps
            .iter()
            .map(|gap| occ_x(self.beta * (gap + g)))
            .collect();
        GrandCanonicalSolution {
            mu: self.mu_sup - g,
            rho_s: eval.rho_s,
            rho0: bulk_occupations[0] / self.length,
            surface_occupations,
            bulk_occupations,
            density_residual: (eval.density - target_rho).abs(),
            fixed_point_residual: eval.fp_residual,
            bulk_gap: self.e0_minus_sup + g,
        }
    }
}

/// Solve the density constraint for mu by geometric bisection on the gap,
/// with the surface fixed point nested inside every density evaluation.
pub fn solve_mu(
    target_rho: f64,
    bulk: &Spectrum,
    graph_eigs: Option<&[f64]>,
    params: &PhysicalParams,
    length: f64,
) -> Result<GrandCanonicalSolution> {
    if !(target_rho > 0.0) {
        return Err(Error::invalid("physics.rho", format!("target density must be > 0, got {target_rho}")));
    }
    let system = System::new(bulk, graph_eigs, params, length)?;
    let tol_rho = DENSITY_TOL_REL * target_rho.max(1.0);

    // Near-pole end of the bracket: density(g_lo) >= rho.
    let mut g_lo = 1e-3;
    loop {
        if system.density_at_gap(g_lo)?.density >= target_rho {
            break;
        }
        g_lo *= 0.125;
        if g_lo < 1e-280 {
            return Err(Error::SolverFailure {
                context: "mu bisection (pole-side bracket)",
                lo: g_lo,
                hi: f64::NAN,
                residual: f64::NAN,
            });
        }
    }
    // Dilute end: density(g_hi) < rho.
    let mut g_hi = (8.0 / params.beta).max(2.0 * g_lo);
    loop {
        if system.density_at_gap(g_hi)?.density < target_rho {
            break;
        }
        g_hi *= 4.0;
        if g_hi > 1e270 {
            return Err(Error::SolverFailure {
                context: "mu bisection (dilute-side bracket)",
                lo: g_lo,
                hi: g_hi,
                residual: f64::NAN,
            });
        }
    }

    let mu_tol = MU_TOL_ABS.max(8.0 * f64::EPSILON * (g_hi.abs() + system.mu_sup.abs()));
    let mut best: Option<(f64, DensityEval)> = None;
    for _ in 0..300 {
        let g_mid = (g_lo * g_hi).sqrt();
        if g_mid <= g_lo || g_mid >= g_hi {
            break;
        }
        let eval = system.density_at_gap(g_mid)?;
        let density = eval.density;
        let residual = (density - target_rho).abs();
        let improved = match &best {
            None => true,
            Some((_, prev)) => residual < (prev.density - target_rho).abs(),
        };
        if improved {
            best = Some((g_mid, eval));
        }
        if density >= target_rho {
            g_lo = g_mid;
        } else {
            g_hi = g_mid;
        }
        if residual <= tol_rho && (g_hi - g_lo) <= mu_tol {
            break;
        }
    }

    let (g_best, eval) = best.ok_or(Error::SolverFailure {
        context: "mu bisection",
        lo: g_lo,
        hi: g_hi,
        residual: f64::NAN,
    })?;
    let residual = (eval.density - target_rho).abs();
    if residual > tol_rho {
        return Err(Error::SolverFailure {
            context: "mu bisection",
            lo: system.mu_sup - g_hi,
            hi: system.mu_sup - g_lo,
            residual,
        });
    }
    Ok(system.solution_at_gap(g_best, &eval, target_rho))
}

/// Occupation of one mode, raw and divided by L.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ModeOccupation {
    pub occupation: f64,
    pub per_length: f64,
}

/// Both macroscopic-occupation readings (raw occupation and occupation / L)
/// for the ground and first excited bulk states and the lowest surface mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OccupationDiagnostics {
    pub ground_bulk: ModeOccupation,
    pub first_excited_bulk: Option<ModeOccupation>,
    pub lowest_surface: Option<ModeOccupation>,
}

pub fn macroscopic_occupation_diagnostics(
    solution: &GrandCanonicalSolution,
    length: f64,
) -> OccupationDiagnostics {
    let mode = |occ: f64| ModeOccupation { occupation: occ, per_length: occ / length };
    OccupationDiagnostics {
        ground_bulk: mode(solution.bulk_occupations[0]),
        first_excited_bulk: solution.bulk_occupations.get(1).copied().map(mode),
        lowest_surface: solution.surface_occupations.first().copied().map(mode),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bulk_spectrum::SpectrumSource;
    use approx::assert_abs_diff_eq;

    fn params(beta: f64, alpha: f64, lambda: f64, rho: f64) -> PhysicalParams {
        PhysicalParams { beta, alpha, lambda, rho, nu: 2.0 }
    }

    fn toy_spectrum(levels: Vec<f64>) -> Spectrum {
        Spectrum {
            cutoff_energy: levels.last().copied().unwrap() + 1.0,
            eigenvalues: levels,
            source: SpectrumSource::Separable,
            mesh_h: None,
            fingerprint: "toy".into(),
        }
    }

    #[test]
    fn occupation_at_log_two_is_one() {
        assert_abs_diff_eq!(occupation(2.0_f64.ln(), 0.0, 1.0).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn occupation_far_tail_is_exponential() {
        let v = occupation(50.0, 0.0, 1.0).unwrap();
        assert!(v < 2e-22);
        assert_abs_diff_eq!(v, (-50.0f64).exp(), epsilon = 1e-36);
    }

    #[test]
    fn occupation_direct_formula_value() {
        // beta = 2, E = 1, mu = 0 -> 1/(e^2 - 1)
        assert_abs_diff_eq!(
            occupation(1.0, 0.0, 2.0).unwrap(),
            0.15651764274966565,
            epsilon = 1e-15
        );
    }

    #[test]
    fn occupation_rejects_energy_at_or_below_mu() {
        assert!(occupation(1.0, 1.0, 1.0).is_err());
        assert!(occupation(0.5, 1.0, 1.0).is_err());
    }

    /// Scalar bisection oracle for the one-defect fixed point, independent of
    /// the production solver.
    fn scalar_fixed_point_oracle(beta: f64, base: f64, lambda: f64) -> f64 {
        let f = |r: f64| 1.0 / (beta * (base + lambda * r)).exp_m1() - r;
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) >= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn single_defect_fixed_point_matches_scalar_oracle() {
        // n = 1, lambda_1 = 0, lambda = 1, alpha = 0, beta = 1, mu = -1:
        // the root of rho = 1/(e^{rho + 1} - 1).
        let p = params(1.0, 0.0, 1.0, 1.0);
        let fp = surface_fixed_point(&[0.0], -1.0, &p).unwrap();
        let oracle = scalar_fixed_point_oracle(1.0, 1.0, 1.0);
        assert_abs_diff_eq!(fp.rho_s, oracle, epsilon = 1e-10);
        assert_abs_diff_eq!(fp.rho_s, 0.34997648540112544, epsilon = 1e-10);
        assert_abs_diff_eq!(fp.rho_s, 0.3500, epsilon = 5e-5);
        assert!(fp.residual <= FIXED_POINT_TOL);
    }

    #[test]
    fn noninteracting_fixed_point_is_the_direct_sum() {
        // lambda = 0, n = 1, lambda_1 = 0, alpha = 1, beta = 1, mu = -2:
        // 1/(e^{1} - 1).
        let p = params(1.0, 1.0, 0.0, 1.0);
        let fp = surface_fixed_point(&[0.0], -2.0, &p).unwrap();
        assert_abs_diff_eq!(fp.rho_s, 1.0 / 1.0f64.exp_m1(), epsilon = 1e-15);
        assert_abs_diff_eq!(fp.rho_s, 0.581977, epsilon = 1e-6);
        assert_eq!(fp.residual, 0.0);
    }

    #[test]
    fn noninteracting_fixed_point_rejects_mu_at_minus_alpha() {
        let p = params(1.0, 1.0, 0.0, 1.0);
        assert!(surface_fixed_point(&[0.0], -1.0, &p).is_err());
        assert!(surface_fixed_point(&[0.0], -0.5, &p).is_err());
    }

    #[test]
    fn fixed_point_vanishes_for_deeply_negative_mu() {
        let p = params(1.0, 0.5, 2.0, 1.0);
        let fp = surface_fixed_point(&[0.0, 1.0, 3.0], -800.0, &p).unwrap();
        assert!(fp.rho_s < 1e-300);
    }

    #[test]
    fn fixed_point_residual_meets_contract_across_parameters() {
        let eigs: Vec<f64> = (0..50)
            .map(|k| 4.0 * (std::f64::consts::PI * k as f64 / 100.0).sin().powi(2))
            .collect();
        for (beta, alpha, lambda, mu) in [
            (1.0, 0.0, 1.0, -0.5),
            (2.0, 1.0, 0.3, 2.0),
            (0.5, 0.2, 5.0, 10.0),
            (1.0, 2.0, 0.05, -1.0),
        ] {
            let p = params(beta, alpha, lambda, 1.0);
            let fp = surface_fixed_point(&eigs, mu, &p).unwrap();
            assert!(
                fp.residual <= FIXED_POINT_TOL,
                "residual {} at beta={beta} lambda={lambda} mu={mu}",
                fp.residual
            );
            // The returned point is inside the admissible domain.
            assert!(lambda * fp.rho_s - alpha > mu);
        }
    }

    #[test]
    fn total_density_matches_two_term_hand_sum() {
        // lambda = 0, one defect (eigenvalue 0), one bulk level: the density is
        // [occ(-alpha) + occ(E_bulk)] / L evaluated directly.
        let p = params(1.0, 1.0, 0.0, 1.0);
        let bulk = toy_spectrum(vec![21.0]);
        let mu = -2.0;
        let by_hand =
            (1.0 / (1.0f64).exp_m1() + 1.0 / (23.0f64).exp_m1()) / 10.0;
        let v = total_density(mu, &bulk, Some(&[0.0]), &p, 10.0).unwrap();
        assert_abs_diff_eq!(v, by_hand, epsilon = 1e-15);
    }

    #[test]
    fn total_density_is_monotone_in_mu() {
        let p = params(1.3, 0.7, 2.0, 1.0);
        let bulk = toy_spectrum(vec![20.0, 20.5, 21.5, 24.0]);
        let eigs = [0.0, 0.8, 2.5];
        let mut prev = 0.0;
        for k in 0..60 {
            let mu = -30.0 + k as f64 * 0.8; // stays below E_0 = 20
            let v = total_density(mu, &bulk, Some(&eigs), &p, 7.0).unwrap();
            assert!(v > prev, "density not increasing at mu = {mu}");
            prev = v;
        }
    }

    #[test]
    fn total_density_diverges_toward_the_ground_level() {
        let p = params(1.0, 0.0, 1.0, 1.0);
        let bulk = toy_spectrum(vec![20.0, 21.0]);
        let near = total_density(20.0 - 1e-9, &bulk, Some(&[0.0]), &p, 5.0).unwrap();
        assert!(near > 1e7);
        let far = total_density(-1e4, &bulk, Some(&[0.0]), &p, 5.0).unwrap();
        assert!(far < 1e-300);
    }

    #[test]
    fn solve_mu_round_trips_a_precomputed_density() {
        let p = params(1.0, 0.5, 1.5, 1.0);
        let bulk = toy_spectrum(vec![19.8, 19.9, 20.3, 21.0, 23.0]);
        let eigs = [0.0, 0.5, 1.5, 2.0];
        let mu_star = 17.0;
        let rho_star = total_density(mu_star, &bulk, Some(&eigs), &p, 12.0).unwrap();
        let sol = solve_mu(rho_star, &bulk, Some(&eigs), &p, 12.0).unwrap();
        assert_abs_diff_eq!(sol.mu, mu_star, epsilon = 1e-9);
        assert!(sol.density_residual <= DENSITY_TOL_REL * rho_star.max(1.0));
        assert!(sol.fixed_point_residual <= FIXED_POINT_TOL);
    }

    #[test]
    fn noninteracting_mu_stays_below_minus_alpha() {
        let p = params(1.0, 1.0, 0.0, 1.0);
        let bulk = toy_spectrum(vec![19.8, 19.9, 20.3]);
        let eigs = [0.0, 1.0, 3.0];
        for rho in [0.1, 1.0, 10.0, 1000.0] {
            let sol = solve_mu(rho, &bulk, Some(&eigs), &p, 6.0).unwrap();
            assert!(sol.mu < -1.0, "mu = {} at rho = {rho}", sol.mu);
        }
    }

    #[test]
    fn tiny_density_pushes_mu_deeply_negative() {
        let p = params(1.0, 0.0, 1.0, 1e-8);
        let bulk = toy_spectrum(vec![19.8, 19.9]);
        let eigs = [0.0, 2.0];
        let length = 6.0;
        let rho = 1e-8;
        let sol = solve_mu(rho, &bulk, Some(&eigs), &p, length).unwrap();
        assert!(sol.mu < -10.0);
        let budget = rho * length;
        for occ in sol.surface_occupations.iter().chain(&sol.bulk_occupations) {
            assert!(*occ <= budget * (1.0 + 1e-9));
        }
    }

    #[test]
    fn solution_satisfies_the_chemical_potential_constraint() {
        // Eq-16-style constraint: mu < min(lambda rho_s - alpha, E_0(L)).
        let bulk = toy_spectrum(vec![19.8, 19.9, 20.3]);
        let eigs = [0.0, 1.0, 3.0];
        for (lambda, rho) in [(1.0, 0.5), (1.0, 30.0), (0.2, 5.0), (5.0, 2.0)] {
            let p = params(1.0, 0.5, lambda, rho);
            let sol = solve_mu(rho, &bulk, Some(&eigs), &p, 4.0).unwrap();
            assert!(sol.mu < bulk.ground());
            assert!(sol.mu < lambda * sol.rho_s - 0.5);
            assert!(sol.surface_occupations.iter().all(|o| *o >= 0.0));
            assert!(sol.bulk_occupations.iter().all(|o| *o >= 0.0));
        }
    }

    #[test]
    fn conservation_splits_rho_between_surface_and_bulk() {
        let p = params(1.0, 0.5, 1.0, 2.0);
        let bulk = toy_spectrum(vec![19.8, 19.85, 19.95, 20.2, 21.0, 22.5]);
        let eigs = [0.0, 0.3, 1.1, 2.4];
        let length = 9.0;
        let rho = 2.0;
        let sol = solve_mu(rho, &bulk, Some(&eigs), &p, length).unwrap();
        let surface: f64 = sol.surface_occupations.iter().sum();
        let bulk_sum: f64 = sol.bulk_occupations.iter().sum();
        assert_abs_diff_eq!((surface + bulk_sum) / length, rho, epsilon = 1e-9);
        // n * rho_s equals the surface occupation sum up to the fixed-point residual.
        assert_abs_diff_eq!(
            surface,
            eigs.len() as f64 * sol.rho_s,
            epsilon = 1e-9 * surface.max(1.0)
        );
    }

    #[test]
    fn bulk_only_solve_works_without_a_lattice() {
        let p = params(1.0, 0.0, 0.0, 0.5);
        let bulk = toy_spectrum(vec![19.8, 19.9, 20.1, 20.6]);
        let sol = solve_mu(0.5, &bulk, None, &p, 8.0).unwrap();
        assert!(sol.surface_occupations.is_empty());
        assert_eq!(sol.rho_s, 0.0);
        assert!(sol.mu < bulk.ground());
        assert!(sol.density_residual <= DENSITY_TOL_REL);
    }

    #[test]
    fn diagnostics_report_both_normalizations() {
        let p = params(1.0, 0.5, 1.0, 1.0);
        let bulk = toy_spectrum(vec![19.8, 19.9, 20.3]);
        let eigs = [0.0, 1.0];
        let length = 5.0;
        let sol = solve_mu(1.0, &bulk, Some(&eigs), &p, length).unwrap();
        let diag = macroscopic_occupation_diagnostics(&sol, length);
        assert_abs_diff_eq!(diag.ground_bulk.per_length, sol.rho0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            diag.ground_bulk.occupation,
            sol.bulk_occupations[0],
            epsilon = 1e-15
        );
        let surf = diag.lowest_surface.unwrap();
        assert_abs_diff_eq!(surf.occupation, sol.surface_occupations[0], epsilon = 1e-15);
        assert!(surf.per_length <= 1.0 + 1e-9); // ratios partition rho = 1
        assert!(diag.first_excited_bulk.unwrap().per_length <= 1.0 + 1e-9);
    }

    /// Independent dense scan over (mu, rho_s) grids reproduces the solver on
    /// a small system, to grid resolution.
    #[test]
    fn brute_force_grid_scan_reproduces_solution() {
        let p = params(1.0, 0.6, 1.2, 0.8);
        let bulk = toy_spectrum(vec![19.9, 20.4, 21.3, 22.8, 24.9]);
        let eigs = [0.0, 0.7, 2.1];
        let length = 5.0;
        let rho = 0.8;
        let sol = solve_mu(rho, &bulk, Some(&eigs), &p, length).unwrap();

        // Brute-force: for each mu on a grid, scan rho_s for the fixed point
        // (coarse pass then a refined pass around the best cell), evaluate the
        // density, and bracket the target between grid points.
        let fixed_point_scan = |mu: f64| -> f64 {
            let gap_at = |r: f64| -> f64 {
                let mean: f64 = eigs
                    .iter()
                    .map(|l| 1.0 / (p.beta * (l - p.alpha + p.lambda * r - mu)).exp_m1())
                    .sum::<f64>()
                    / eigs.len() as f64;
                (mean - r).abs()
            };
            let scan = |lo: f64, hi: f64, step: f64| -> f64 {
                let mut best = (f64::INFINITY, lo);
                let mut r = lo;
                while r < hi {
                    let gap = gap_at(r);
                    if gap < best.0 {
                        best = (gap, r);
                    }
                    r += step;
                }
                best.1
            };
            let floor = (p.lambda.recip() * (mu + p.alpha)).max(0.0) + 1e-6;
            let coarse = scan(floor, floor + 30.0, 1e-2);
            scan((coarse - 2e-2).max(floor), coarse + 2e-2, 1e-5)
        };
        let density_of = |mu: f64| -> f64 {
            let rs = fixed_point_scan(mu);
            let surface: f64 = eigs
                .iter()
                .map(|l| 1.0 / (p.beta * (l - p.alpha + p.lambda * rs - mu)).exp_m1())
                .sum();
            let bulk_sum: f64 = bulk
                .eigenvalues
                .iter()
                .map(|e| 1.0 / (p.beta * (e - mu)).exp_m1())
                .sum();
            (surface + bulk_sum) / length
        };
        let mu_grid: Vec<f64> = (0..=2000).map(|k| -5.0 + k as f64 * 0.005).collect();
        let densities: Vec<f64> = mu_grid.iter().map(|&mu| density_of(mu)).collect();
        let mut bracket = None;
        for (w, dw) in mu_grid.windows(2).zip(densities.windows(2)) {
            if (dw[0] - rho) * (dw[1] - rho) <= 0.0 {
                bracket = Some((w[0], w[1]));
                break;
            }
        }
        let (lo, hi) = bracket.expect("brute-force scan must bracket the target");
        assert!(
            sol.mu >= lo - 1e-9 && sol.mu <= hi + 1e-9,
            "solver mu {} outside brute-force cell [{lo}, {hi}]",
            sol.mu
        );
        let rs_scan = fixed_point_scan(sol.mu);
        assert_abs_diff_eq!(sol.rho_s, rs_scan, epsilon = 2e-5);
    }
}
