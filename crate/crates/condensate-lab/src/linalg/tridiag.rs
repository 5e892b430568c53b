//! Eigenvalues of real symmetric tridiagonal matrices.
//!
//! Primary path is the implicit-shift QL iteration (values only); a
//! Sturm-sequence bisection fallback covers the rare non-converged case.
//! Both are deterministic for fixed inputs.

use crate::error::{Error, Result};
use crate::util;

/// Maximum QL sweeps per eigenvalue before falling back to bisection.
const MAX_QL_SWEEPS: usize = 50;

/// Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    /// Main diagonal, length n.
    pub diag: Vec<f64>,
    /// Off-diagonal, length n - 1 (empty for n = 1).
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(
            off.len() + 1,
            diag.len().max(1),
            "off-diagonal must have length n - 1"
        );
        Self { diag, off }
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn trace(&self) -> f64 {
        self.diag.iter().sum()
    }

    /// y = M x
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut y = vec![0.0; n];
        for i in 0..n {
            let mut v = self.diag[i] * x[i];
            if i > 0 {
                v += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                v += self.off[i] * x[i + 1];
            }
            y[i] = v;
        }
        y
    }

    /// Short hash of the matrix entries, used in solver diagnostics.
    pub fn fingerprint(&self) -> String {
        let mut s = String::new();
        for v in &self.diag {
            s.push_str(&format!("{v:e};"));
        }
        s.push('|');
        for v in &self.off {
            s.push_str(&format!("{v:e};"));
        }
        util::fingerprint(&s)
    }
}

/// All eigenvalues in ascending order.
///
/// QL with implicit shifts; if a row fails to converge within the sweep
/// bound the whole spectrum is recomputed by Sturm bisection.
pub fn eigenvalues(m: &SymTridiagonal) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut d = m.diag.clone();
    let mut e = m.off.clone();
    e.push(0.0);
    match ql_implicit(&mut d, &mut e) {
        Ok(()) => {
            d.sort_by(f64::total_cmp);
            Ok(d)
        }
        Err(_) => {
            log::warn!(
                "QL iteration exceeded {} sweeps (matrix {}), using Sturm bisection",
                MAX_QL_SWEEPS,
                m.fingerprint()
            );
            eigenvalues_bisection(m)
        }
    }
}

/// Implicit-shift QL, values only. `d` is the diagonal, `e` the off-diagonal
/// padded with a trailing zero. On success `d` holds the (unsorted) eigenvalues.
fn ql_implicit(d: &mut [f64], e: &mut [f64]) -> std::result::Result<(), usize> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0usize;
        loop {
            // Locate the first negligible off-diagonal at or after l.
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_SWEEPS {
                return Err(l);
            }
            // Wilkinson-style shift from the 2x2 at the l corner.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0f64;
            let mut c = 1.0f64;
            let mut p = 0.0f64;
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    // Rotation annihilated early; deflate and restart this row.
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Number of eigenvalues strictly below `x` (Sturm count of the LDL^T pivots).
pub fn count_below(m: &SymTridiagonal, x: f64) -> usize {
    let n = m.dim();
    let max_off_sq = m.off.iter().fold(0.0f64, |a, &v| a.max(v * v));
    let pivmin = f64::MIN_POSITIVE * max_off_sq.max(1.0);
    let mut count = 0usize;
    let mut t = m.diag[0] - x;
    if t.abs() <= pivmin {
        t = -pivmin;
    }
    if t < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let off = m.off[i - 1];
        t = m.diag[i] - x - off * off / t;
        if t.abs() <= pivmin {
            t = -pivmin;
        }
        if t < 0.0 {
            count += 1;
        }
    }
    count
}

/// Gershgorin bounds on the spectrum.
pub fn gershgorin_bounds(m: &SymTridiagonal) -> (f64, f64) {
    let n = m.dim();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += m.off[i - 1].abs();
        }
        if i + 1 < n {
            radius += m.off[i].abs();
        }
        lo = lo.min(m.diag[i] - radius);
        hi = hi.max(m.diag[i] + radius);
    }
    (lo, hi)
}

/// All eigenvalues by Sturm bisection. Slower than QL but unconditionally
/// convergent; used as the fallback path.
pub fn eigenvalues_bisection(m: &SymTridiagonal) -> Result<Vec<f64>> {
    let n = m.dim();
    if n == 0 {
        return Ok(Vec::new());
    }
    let (glo, ghi) = gershgorin_bounds(m);
    let span = (ghi - glo).max(1.0);
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut lo = glo - 1e-3 * span;
        let mut hi = ghi + 1e-3 * span;
        // After enough halvings the interval is at ULP scale.
        for _ in 0..120 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if count_below(m, mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        out.push(0.5 * (lo + hi));
    }
    // Guard: bisection cannot fail to bracket, but keep the diagnostic
    // contract in case of NaN input.
    if out.iter().any(|v| v.is_nan()) {
        return Err(Error::EigenNonConvergence {
            fingerprint: m.fingerprint(),
            sweeps: MAX_QL_SWEEPS,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn dense_oracle(m: &SymTridiagonal) -> Vec<f64> {
        let n = m.dim();
        let mut a = nalgebra::DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            a[(i, i)] = m.diag[i];
            if i + 1 < n {
                a[(i, i + 1)] = m.off[i];
                a[(i + 1, i)] = m.off[i];
            }
        }
        let mut eigs: Vec<f64> = a.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(f64::total_cmp);
        eigs
    }

    #[test]
    fn single_entry() {
        let m = SymTridiagonal::new(vec![3.5], vec![]);
        assert_eq!(eigenvalues(&m).unwrap(), vec![3.5]);
    }

    #[test]
    fn two_by_two_hand_computed() {
        // [[1, -1], [-1, 1]] has eigenvalues 0 and 2.
        let m = SymTridiagonal::new(vec![1.0, 1.0], vec![-1.0]);
        let eigs = eigenvalues(&m).unwrap();
        assert_abs_diff_eq!(eigs[0], 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eigs[1], 2.0, epsilon = 1e-14);
    }

    #[test]
    fn matches_dense_oracle_on_random_matrices() {
        let mut rng = crate::util::SplitMix64::new(0xABCD);
        for n in [2usize, 3, 5, 8, 17, 40] {
            for _ in 0..8 {
                let diag: Vec<f64> = (0..n).map(|_| rng.next_in(-5.0, 5.0)).collect();
                let off: Vec<f64> = (0..n - 1).map(|_| rng.next_in(-3.0, 3.0)).collect();
                let m = SymTridiagonal::new(diag, off);
                let ours = eigenvalues(&m).unwrap();
                let reference = dense_oracle(&m);
                for (a, b) in ours.iter().zip(&reference) {
                    assert_abs_diff_eq!(a, b, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn bisection_matches_ql() {
        let mut rng = crate::util::SplitMix64::new(77);
        for _ in 0..5 {
            let n = 12;
            let diag: Vec<f64> = (0..n).map(|_| rng.next_in(0.0, 4.0)).collect();
            let off: Vec<f64> = (0..n - 1).map(|_| rng.next_in(-2.0, 0.0)).collect();
            let m = SymTridiagonal::new(diag, off);
            let ql = eigenvalues(&m).unwrap();
            let bis = eigenvalues_bisection(&m).unwrap();
            for (a, b) in ql.iter().zip(&bis) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn count_below_is_consistent() {
        let m = SymTridiagonal::new(vec![1.0, 2.0, 1.0], vec![-1.0, -1.0]);
        // Eigenvalues are 0, 1, 3.
        assert_eq!(count_below(&m, -0.5), 0);
        assert_eq!(count_below(&m, 0.5), 1);
        assert_eq!(count_below(&m, 2.0), 2);
        assert_eq!(count_below(&m, 4.0), 3);
    }
}
