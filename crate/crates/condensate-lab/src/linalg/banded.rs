//! Symmetric banded matrices with an in-band Cholesky factorization.
//!
//! Used by the 2D finite-difference solver, whose grids are narrow strips:
//! the matrix bandwidth stays near the strip width, so a direct banded
//! factorization is cheap even for large node counts.

/// Symmetric banded matrix in lower-band storage: `bands[r][j] = A[j + r][j]`
/// for r = 0..=bandwidth.
#[derive(Clone, Debug)]
pub struct SymBanded {
    n: usize,
    bandwidth: usize,
    bands: Vec<Vec<f64>>,
}

impl SymBanded {
    pub fn zeros(n: usize, bandwidth: usize) -> Self {
        let bands = (0..=bandwidth).map(|r| vec![0.0; n - r.min(n)]).collect();
        Self { n, bandwidth, bands }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Accumulate into A[i][j] (and implicitly A[j][i]). Requires |i - j| <= bandwidth.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let r = hi - lo;
        assert!(r <= self.bandwidth, "entry ({i},{j}) outside the band");
        self.bands[r][lo] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (hi, lo) = if i >= j { (i, j) } else { (j, i) };
        let r = hi - lo;
        if r > self.bandwidth {
            0.0
        } else {
            self.bands[r][lo]
        }
    }

    /// y = A x
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let n = self.n;
        y[..n].fill(0.0);
        for (j, &d) in self.bands[0].iter().enumerate() {
            y[j] += d * x[j];
        }
        for r in 1..=self.bandwidth {
            let band = &self.bands[r];
            for (j, &v) in band.iter().enumerate() {
                y[j + r] += v * x[j];
                y[j] += v * x[j + r];
            }
        }
    }

    /// A - sigma I
    pub fn shifted(&self, sigma: f64) -> SymBanded {
        let mut out = self.clone();
        for d in out.bands[0].iter_mut() {
            *d -= sigma;
        }
        out
    }

    /// Dense copy (small problems and tests).
    pub fn to_dense(&self) -> super::dense::SymMatrix {
        let mut m = super::dense::SymMatrix::zeros(self.n);
        for r in 0..=self.bandwidth {
            for j in 0..self.bands[r].len() {
                m.set_sym(j + r, j, self.bands[r][j]);
            }
        }
        m
    }

    /// Cholesky factorization A = L L^T kept in band form.
    /// Returns None when the matrix is not positive definite.
    pub fn cholesky(&self) -> Option<BandedCholesky> {
        let n = self.n;
        let bw = self.bandwidth;
        let mut l: Vec<Vec<f64>> = self.bands.clone();
        for j in 0..n {
            let mut s = l[0][j];
            for r in 1..=bw.min(j) {
                s -= l[r][j - r] * l[r][j - r];
            }
            if s <= 0.0 || !s.is_finite() {
                return None;
            }
            let ljj = s.sqrt();
            l[0][j] = ljj;
            let i_max = (j + bw).min(n - 1);
            for i in (j + 1)..=i_max {
                let r0 = i - j;
                let mut s = l[r0][j];
                // sum_k L[i][k] L[j][k], k = j - t, constrained to the band of row i
                let t_max = (bw - r0).min(j);
                for t in 1..=t_max {
                    s -= l[r0 + t][j - t] * l[t][j - t];
                }
                l[r0][j] = s / ljj;
            }
        }
        Some(BandedCholesky { n, bandwidth: bw, l })
    }
}

/// Banded Cholesky factor; solves A x = b by forward/back substitution.
#[derive(Clone, Debug)]
pub struct BandedCholesky {
    n: usize,
    bandwidth: usize,
    l: Vec<Vec<f64>>,
}

impl BandedCholesky {
    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.n;
        let bw = self.bandwidth;
        // L y = b
        for i in 0..n {
            let mut s = x[i];
            for r in 1..=bw.min(i) {
                s -= self.l[r][i - r] * x[i - r];
            }
            x[i] = s / self.l[0][i];
        }
        // L^T x = y
        for i in (0..n).rev() {
            let mut s = x[i];
            let r_max = bw.min(n - 1 - i);
            for r in 1..=r_max {
                s -= self.l[r][i] * x[i + r];
            }
            x[i] = s / self.l[0][i];
        }
    }
}
