//! Eigenvalues of the bound-pair Hamiltonian restricted to a wire of length L.
//!
//! Two routes are provided: a fast separable model (relative hard-wall mode of
//! width d/sqrt(2) after rotating to center-of-mass/relative coordinates,
//! stacked on the center-of-mass ladder) and an independent 2D five-point
//! finite-difference solver on the strip domain. The separable model ignores
//! the corner coupling near the wire ends; its error is O(d/L).

pub mod cache;
pub mod fd2d;

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::util;

pub use cache::{BulkMethod, SpectrumCache};
pub use fd2d::fd2d_spectrum;

/// Continuum ground energy E_0 = 2 pi^2 / d^2 of the relative mode.
pub fn continuum_ground_energy(d: f64) -> f64 {
    2.0 * PI * PI / (d * d)
}

/// Boundary condition on the wire-end edges of the pair domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OuterBc {
    Dirichlet,
    Neumann,
}

impl Default for OuterBc {
    fn default() -> Self {
        OuterBc::Dirichlet
    }
}

/// Geometry of the wire and the bound pair: pair extent d, wire length L,
/// and the outer boundary condition at the wire ends.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct WireParams {
    pub d: f64,
    pub length: f64,
    pub outer_bc: OuterBc,
}

impl WireParams {
    pub fn new(d: f64, length: f64, outer_bc: OuterBc) -> Result<Self> {
        let w = Self { d, length, outer_bc };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0) {
            return Err(Error::invalid("wire.d", format!("d must be positive, got {}", self.d)));
        }
        if !(self.d < self.length) {
            return Err(Error::invalid(
                "wire.d",
                format!("need 0 < d < L, got d = {}, L = {}", self.d, self.length),
            ));
        }
        Ok(())
    }

    /// Lowest center-of-mass index: m >= 1 under Dirichlet, m >= 0 under Neumann.
    pub fn m_min(&self) -> usize {
        match self.outer_bc {
            OuterBc::Dirichlet => 1,
            OuterBc::Neumann => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumSource {
    Separable,
    Fd2d,
}

/// Sorted eigenvalues with multiplicity plus provenance metadata.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub source: SpectrumSource,
    pub cutoff_energy: f64,
    pub mesh_h: Option<f64>,
    /// Parameter fingerprint used as the cache key.
    pub fingerprint: String,
}

impl Spectrum {
    pub fn ground(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn validate(&self) -> Result<()> {
        if self.eigenvalues.is_empty() {
            return Err(Error::EmptySpectrum { cutoff: self.cutoff_energy, ground: f64::NAN });
        }
        if self.eigenvalues.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid("spectrum", "eigenvalues must be ascending"));
        }
        Ok(())
    }
}

/// Separable level E_{k,m} = 2 pi^2 k^2 / d^2 + pi^2 m^2 / (2 L^2).
pub fn separable_level(wire: &WireParams, k: usize, m: usize) -> f64 {
    let rel = 2.0 * PI * PI * (k * k) as f64 / (wire.d * wire.d);
    let com = PI * PI * (m * m) as f64 / (2.0 * wire.length * wire.length);
    rel + com
}

/// All separable levels strictly below `cutoff_energy`, ascending.
pub fn separable_spectrum(wire: &WireParams, cutoff_energy: f64) -> Result<Spectrum> {
    wire.validate()?;
    let ground = separable_level(wire, 1, wire.m_min());
    if !(cutoff_energy > ground) {
        return Err(Error::EmptySpectrum { cutoff: cutoff_energy, ground });
    }
    let mut eigenvalues = Vec::new();
    let mut k = 1usize;
    loop {
        let base = separable_level(wire, k, 0);
        if base >= cutoff_energy && wire.m_min() == 0 {
            break;
        }
        let first = separable_level(wire, k, wire.m_min());
        if first >= cutoff_energy && wire.m_min() > 0 {
            break;
        }
        let mut m = wire.m_min();
        loop {
            let e = separable_level(wire, k, m);
            if e >= cutoff_energy {
                break;
            }
            eigenvalues.push(e);
            m += 1;
        }
        k += 1;
    }
    eigenvalues.sort_by(f64::total_cmp);
    let fingerprint = separable_fingerprint(wire, cutoff_energy);
    Ok(Spectrum {
        eigenvalues,
        source: SpectrumSource::Separable,
        cutoff_energy,
        mesh_h: None,
        fingerprint,
    })
}

pub(crate) fn separable_fingerprint(wire: &WireParams, cutoff: f64) -> String {
    util::fingerprint(&format!(
        "separable|d={:e}|L={:e}|bc={:?}|cutoff={:e}|v1",
        wire.d, wire.length, wire.outer_bc, cutoff
    ))
}

/// Geometric-series upper bound on the total Bose occupation carried by all
/// separable levels at or above `cutoff_energy`, evaluated at (beta, mu).
///
/// Uses occ(E) <= e^{-beta(E - mu)} / (1 - e^{-beta(E_c - mu)}) together with
/// sum_{m >= m0} e^{-b m^2} <= e^{-b m0^2} / (1 - e^{-b (2 m0 + 1)}).
pub fn separable_tail_occupation_bound(
    wire: &WireParams,
    cutoff_energy: f64,
    beta: f64,
    mu: f64,
) -> f64 {
    let c = PI * PI / (2.0 * wire.length * wire.length);
    let a = 2.0 * PI * PI / (wire.d * wire.d);
    let x_cut = beta * (cutoff_energy - mu);
    if x_cut <= 0.0 {
        return f64::INFINITY;
    }
    let prefactor = 1.0 / (-(-x_cut).exp_m1()); // 1 / (1 - e^{-x_cut})

    let quad_tail = |m0: f64| -> f64 {
        // sum_{m >= m0} e^{-beta c m^2}, m0 >= 0
        let denom = -(-(beta * c * (2.0 * m0 + 1.0))).exp_m1();
        (-(beta * c * m0 * m0)).exp() / denom
    };

    let mut bound = 0.0f64;
    let mut k = 1usize;
    let mut k_last = 0usize;
    loop {
        let base = a * (k * k) as f64;
        if base >= cutoff_energy {
            break;
        }
        k_last = k;
        // first excluded COM index for this k
        let room = (cutoff_energy - base) / c;
        let mut m0 = room.sqrt().floor() + 1.0;
        // guard against float edges: e_{k,m0-1} must be below cutoff
        while m0 > wire.m_min() as f64 && base + c * (m0 - 1.0) * (m0 - 1.0) >= cutoff_energy {
            m0 -= 1.0;
        }
        let m0 = m0.max(wire.m_min() as f64);
        bound += (-(beta * (base - mu))).exp() * quad_tail(m0);
        k += 1;
    }
    // whole ladders for k beyond the cutoff
    let k0 = (k_last + 1) as f64;
    let full_ladder = quad_tail(wire.m_min() as f64);
    let k_tail = (-(beta * a * k0 * k0)).exp()
        / (-(-(beta * a * (2.0 * k0 + 1.0))).exp_m1());
    bound += (beta * mu).exp() * k_tail * full_ladder;

    prefactor * bound
}

/// Separable spectrum with an energy cutoff chosen adaptively so that the
/// truncated grand-canonical tail is negligible: the occupation of the cutoff
/// level stays below 1e-14 for every admissible mu, and the summed tail
/// occupation stays below 1e-13 * rho * L.
pub fn statmech_spectrum(wire: &WireParams, beta: f64, rho: f64) -> Result<Spectrum> {
    wire.validate()?;
    let e0_l = separable_level(wire, 1, wire.m_min());
    let mut x = 38.0 + (1.0 / rho).ln().max(0.0);
    for _ in 0..60 {
        let cutoff = e0_l + x / beta;
        let spectrum = separable_spectrum(wire, cutoff)?;
        let tail = separable_tail_occupation_bound(wire, cutoff, beta, e0_l);
        if tail <= 1e-13 * rho * wire.length {
            return Ok(spectrum);
        }
        x += 8.0;
    }
    unreachable!("tail bound decays exponentially in the cutoff margin");
}

/// Polynomial-in-h^2 Richardson extrapolation to h = 0 (Neville tableau).
/// `samples` holds (h, value) pairs with distinct h.
pub fn richardson_extrapolate(samples: &[(f64, f64)]) -> f64 {
    assert!(!samples.is_empty());
    let n = samples.len();
    let x: Vec<f64> = samples.iter().map(|(h, _)| h * h).collect();
    let mut t: Vec<f64> = samples.iter().map(|(_, v)| *v).collect();
    for level in 1..n {
        for i in (level..n).rev() {
            t[i] = (x[i - level] * t[i] - x[i] * t[i - 1]) / (x[i - level] - x[i]);
        }
    }
    t[n - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn wire(d: f64, length: f64) -> WireParams {
        WireParams::new(d, length, OuterBc::Dirichlet).unwrap()
    }

    #[test]
    fn rejects_degenerate_geometry() {
        assert!(WireParams::new(1.0, 0.5, OuterBc::Dirichlet).is_err());
        assert!(WireParams::new(0.0, 5.0, OuterBc::Dirichlet).is_err());
        assert!(WireParams::new(1.0, 1.0, OuterBc::Dirichlet).is_err());
    }

    #[test]
    fn lowest_separable_level_closed_form() {
        let w = wire(1.0, 10.0);
        let s = separable_spectrum(&w, 25.0).unwrap();
        let expected = 2.0 * PI * PI + PI * PI / 200.0;
        assert_abs_diff_eq!(s.ground(), expected, epsilon = 1e-12);
        assert_abs_diff_eq!(s.ground(), 19.78858, epsilon = 1e-4);
    }

    #[test]
    fn ground_approaches_continuum_limit_for_long_wires() {
        let w = wire(1.0, 1e6);
        let s = separable_spectrum(&w, 25.0).unwrap();
        assert_abs_diff_eq!(s.ground(), 2.0 * PI * PI, epsilon = 1e-10);
    }

    #[test]
    fn count_matches_exhaustive_enumeration() {
        let w = wire(1.0, 10.0);
        let cutoff = 25.0;
        let s = separable_spectrum(&w, cutoff).unwrap();
        // Independent brute-force enumeration over a generous index box.
        let mut count = 0usize;
        for k in 1..100usize {
            for m in 1..10_000usize {
                if separable_level(&w, k, m) < cutoff {
                    count += 1;
                }
            }
        }
        assert_eq!(s.eigenvalues.len(), count);
        assert!(s.eigenvalues.windows(2).all(|p| p[0] <= p[1]));
    }

    #[test]
    fn cutoff_below_ground_is_an_error() {
        let w = wire(1.0, 10.0);
        match separable_spectrum(&w, 10.0) {
            Err(Error::EmptySpectrum { .. }) => {}
            other => panic!("expected EmptySpectrum, got {other:?}"),
        }
    }

    #[test]
    fn neumann_includes_the_free_com_mode() {
        let w = WireParams::new(1.0, 10.0, OuterBc::Neumann).unwrap();
        let s = separable_spectrum(&w, 25.0).unwrap();
        assert_abs_diff_eq!(s.ground(), 2.0 * PI * PI, epsilon = 1e-12);
        let wd = wire(1.0, 10.0);
        let sd = separable_spectrum(&wd, 25.0).unwrap();
        assert_eq!(s.eigenvalues.len(), sd.eigenvalues.len() + 1);
    }

    #[test]
    fn level_count_grows_linearly_in_length() {
        // Weyl-type sanity: at fixed cutoff the count is ~ linear in L.
        let cutoff = 30.0;
        let counts: Vec<usize> = [20.0, 40.0, 80.0]
            .iter()
            .map(|&l| separable_spectrum(&wire(1.0, l), cutoff).unwrap().eigenvalues.len())
            .collect();
        let ratio1 = counts[1] as f64 / counts[0] as f64;
        let ratio2 = counts[2] as f64 / counts[1] as f64;
        assert!((ratio1 - 2.0).abs() < 0.15, "got {counts:?}");
        assert!((ratio2 - 2.0).abs() < 0.15, "got {counts:?}");
    }

    #[test]
    fn statmech_cutoff_controls_the_tail() {
        let w = wire(1.0, 50.0);
        let beta = 1.0;
        let rho = 1.0;
        let s = statmech_spectrum(&w, beta, rho).unwrap();
        let e0_l = s.ground();
        let tail = separable_tail_occupation_bound(&w, s.cutoff_energy, beta, e0_l);
        assert!(tail <= 1e-13 * rho * w.length);
        // occupation of the cutoff level itself at the most permissive mu
        let occ_cut = 1.0 / (beta * (s.cutoff_energy - e0_l)).exp_m1();
        assert!(occ_cut < 1e-14);
    }

    #[test]
    fn tail_bound_dominates_explicit_tail_sum() {
        let w = wire(1.0, 20.0);
        let beta = 0.7;
        let mu = 15.0;
        let cutoff = 60.0;
        let bound = separable_tail_occupation_bound(&w, cutoff, beta, mu);
        // Explicit sum over a wide window above the cutoff.
        let mut tail = 0.0;
        for k in 1..40usize {
            for m in 1..200_000usize {
                let e = separable_level(&w, k, m);
                if e >= cutoff {
                    tail += 1.0 / (beta * (e - mu)).exp_m1();
                }
                if e > cutoff + 300.0 {
                    break;
                }
            }
        }
        assert!(bound >= tail, "bound {bound} < explicit tail {tail}");
        assert!(bound <= tail * 100.0 + 1e-300, "bound {bound} is far looser than {tail}");
    }

    #[test]
    fn richardson_recovers_polynomial_limit() {
        // y(h) = 3 + 2 h^2 - 5 h^4 extrapolates exactly to 3 from three samples.
        let f = |h: f64| 3.0 + 2.0 * h * h - 5.0 * h.powi(4);
        let samples: Vec<(f64, f64)> =
            [0.25, 0.125, 0.0625].iter().map(|&h| (h, f(h))).collect();
        assert_abs_diff_eq!(richardson_extrapolate(&samples), 3.0, epsilon = 1e-12);
    }
}
