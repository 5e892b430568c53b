//! Thermodynamic-limit density of pairs in excited bulk states,
//!
//!   rho_exc(beta, mu) = (sqrt(2)/pi) sum_{n>=1} int_0^inf
//!                        dx / (e^{beta 2 pi^2 n^2 / d^2} e^{beta (x^2 - mu)} - 1),
//!
//! defined for mu <= E_0 = 2 pi^2 / d^2 and divergent at equality.
//!
//! Two independent evaluations serve as each other's oracle: a polylogarithm
//! series (expand the integrand geometrically, integrate the Gaussians) and
//! direct adaptive quadrature of each n-term.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::polylog::{li_half, li_minus_half};
use crate::bulk_spectrum::continuum_ground_energy;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoExcMethod {
    Series,
    Quadrature,
}

/// Excited-state bulk density in the thermodynamic limit.
pub fn rho_exc(beta: f64, mu: f64, d: f64, method: RhoExcMethod) -> Result<f64> {
    let e0 = continuum_ground_energy(d);
    if mu > e0 {
        return Err(Error::RhoExcDomain { mu, e0 });
    }
    // At mu = E_0 the n = 1 term has an infrared divergence.
    if beta * (e0 - mu) < 1e-14 {
        return Ok(f64::INFINITY);
    }
    match method {
        RhoExcMethod::Series => Ok(series(beta, mu, d)),
        RhoExcMethod::Quadrature => Ok(quadrature(beta, mu, d)),
    }
}

/// d(rho_exc)/d(mu), used to propagate extrapolation error through the
/// limit-balance check. Same domain as `rho_exc`.
pub fn rho_exc_dmu(beta: f64, mu: f64, d: f64) -> Result<f64> {
    let e0 = continuum_ground_energy(d);
    if mu > e0 {
        return Err(Error::RhoExcDomain { mu, e0 });
    }
    if beta * (e0 - mu) < 1e-14 {
        return Ok(f64::INFINITY);
    }
    let mut sum = 0.0;
    for n in 1..=MAX_LADDER_TERMS {
        let z = ladder_fugacity(beta, mu, d, n);
        let term = li_minus_half(z);
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    Ok((beta / (2.0 * PI * beta).sqrt()) * sum)
}

const MAX_LADDER_TERMS: usize = 100_000;

fn ladder_fugacity(beta: f64, mu: f64, d: f64, n: usize) -> f64 {
    let e_n = 2.0 * PI * PI * (n * n) as f64 / (d * d);
    (beta * (mu - e_n)).exp()
}

/// (1/sqrt(2 pi beta)) sum_n Li_{1/2}(e^{beta (mu - 2 pi^2 n^2 / d^2)}).
fn series(beta: f64, mu: f64, d: f64) -> f64 {
    let mut sum = 0.0;
    for n in 1..=MAX_LADDER_TERMS {
        let term = li_half(ladder_fugacity(beta, mu, d, n));
        sum += term;
        if term < 1e-16 * sum {
            break;
        }
    }
    sum / (2.0 * PI * beta).sqrt()
}

/// Direct evaluation: substitute t = x sqrt(beta), integrate each ladder term
/// adaptively, truncate the ladder when a rigorous term bound goes negligible.
fn quadrature(beta: f64, mu: f64, d: f64) -> f64 {
    let mut sum = 0.0f64;
    for n in 1..=MAX_LADDER_TERMS {
        let ln_a = beta * (2.0 * PI * PI * (n * n) as f64 / (d * d) - mu);
        // Term bound: integrand <= e^{-(ln_a + t^2)}, so the term is at most
        // e^{-ln_a} sqrt(pi)/2. Stop once that cannot matter.
        let bound = (-ln_a).exp() * PI.sqrt() / 2.0;
        if bound < 1e-17 * sum.max(1e-300) {
            break;
        }
        // Integrand support: beyond t^2 = 37 - ln_a the integrand is < 1e-16
        // relative to its infrared scale.
        let t_max = (37.0 - ln_a).max(1.0).sqrt();
        let integrand = |t: f64| 1.0 / (ln_a + t * t).exp_m1();
        sum += adaptive_simpson(&integrand, 0.0, t_max, 1e-13);
        if n > 1 && bound < 1e-16 * sum {
            break;
        }
    }
    sum * (2.0f64).sqrt() / (PI * beta.sqrt())
}

/// Adaptive Simpson with absolute/relative refinement control.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_recurse(f, a, b, fa, fb, fm, whole, rel_tol * whole.abs().max(1e-300), 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_recurse(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    abs_tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * abs_tol {
        return left + right + delta / 15.0;
    }
    simpson_recurse(f, a, m, fa, fm, flm, left, abs_tol / 2.0, depth - 1)
        + simpson_recurse(f, m, b, fm, fb, frm, right, abs_tol / 2.0, depth - 1)
}
