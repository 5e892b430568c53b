//! Weighted path-graph Laplacian of the surface-defect chain and its
//! spectrum.
//!
//! The chain of `count` defects carries strictly positive weights e_n on the
//! edges {n, n+1}. The Laplacian is positive semidefinite with row sums zero,
//! so the constant vector is always an exact zero mode and the smallest
//! eigenvalue is 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::tridiag::{self, SymTridiagonal};
use crate::util::SplitMix64;

/// How the edge weights of the chain are generated.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum WeightSpec {
    /// Every edge carries the same weight.
    Constant { value: f64 },
    /// Explicit list; must have length count - 1.
    Explicit { weights: Vec<f64> },
    /// Decaying chain e_n = scale / n^power, n = 1, 2, ...
    Reciprocal { scale: f64, power: f64 },
    /// Uniform in (min, max], deterministic for a given seed.
    Random { min: f64, max: f64, seed: u64 },
}

impl Default for WeightSpec {
    fn default() -> Self {
        WeightSpec::Constant { value: 1.0 }
    }
}

impl WeightSpec {
    fn generate(&self, count: usize) -> Result<Vec<f64>> {
        let n_edges = count.saturating_sub(1);
        let weights = match self {
            WeightSpec::Constant { value } => vec![*value; n_edges],
            WeightSpec::Explicit { weights } => {
                if weights.len() != n_edges {
                    return Err(Error::invalid(
                        "lattice.weight_spec.weights",
                        format!(
                            "explicit weight list has length {}, expected count - 1 = {}",
                            weights.len(),
                            n_edges
                        ),
                    ));
                }
                weights.clone()
            }
            WeightSpec::Reciprocal { scale, power } => (1..=n_edges)
                .map(|n| scale / (n as f64).powf(*power))
                .collect(),
            WeightSpec::Random { min, max, seed } => {
                if !(min < max) || *min < 0.0 {
                    return Err(Error::invalid(
                        "lattice.weight_spec",
                        format!("random weights need 0 <= min < max, got ({min}, {max})"),
                    ));
                }
                let mut rng = SplitMix64::new(*seed);
                (0..n_edges).map(|_| rng.next_in(*min, *max)).collect()
            }
        };
        Ok(weights)
    }
}

/// Chain of surface defects: defect count n(L), edge weights, and the target
/// inverse defect density delta = lim L / n(L).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DefectLattice {
    count: usize,
    weights: Vec<f64>,
    delta: f64,
    weight_spec: WeightSpec,
}

impl DefectLattice {
    pub fn new(count: usize, delta: f64, weight_spec: WeightSpec) -> Result<Self> {
        if count < 1 {
            return Err(Error::invalid("lattice.count", "defect count must be >= 1"));
        }
        if !(delta >= 0.0) {
            return Err(Error::invalid(
                "lattice.delta",
                format!("delta must be nonnegative, got {delta}"),
            ));
        }
        let weights = weight_spec.generate(count)?;
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0)) {
            return Err(Error::invalid(
                "lattice.weight_spec",
                format!("edge weights must be strictly positive, got {w}"),
            ));
        }
        Ok(Self {
            count,
            weights,
            delta,
            weight_spec,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn weight_spec(&self) -> &WeightSpec {
        &self.weight_spec
    }
}

/// Weighted path-graph Laplacian: diagonal[n] = e_{n-1} + e_n (missing edge
/// terms at the chain ends count as zero) and off-diagonal[n] = -e_n.
pub fn build_path_laplacian(lattice: &DefectLattice) -> SymTridiagonal {
    let n = lattice.count();
    let e = lattice.weights();
    let mut diag = vec![0.0; n];
    let mut off = Vec::with_capacity(n.saturating_sub(1));
    for (i, &w) in e.iter().enumerate() {
        diag[i] += w;
        diag[i + 1] += w;
        off.push(-w);
    }
    SymTridiagonal::new(diag, off)
}

/// Ascending eigenvalues with multiplicity of a symmetric tridiagonal matrix.
pub fn eigenvalues_tridiagonal(matrix: &SymTridiagonal) -> Result<Vec<f64>> {
    tridiag::eigenvalues(matrix)
}

/// Max-norm of (matrix . constant vector); exactly zero row sums give zero.
pub fn zero_mode_residual(matrix: &SymTridiagonal) -> f64 {
    let ones = vec![1.0; matrix.dim()];
    matrix
        .matvec(&ones)
        .into_iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

/// Convenience: spectrum of the defect chain itself.
pub fn lattice_spectrum(lattice: &DefectLattice) -> Result<Vec<f64>> {
    eigenvalues_tridiagonal(&build_path_laplacian(lattice))
}
