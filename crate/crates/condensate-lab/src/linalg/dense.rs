//! Eigenvalues of small dense symmetric matrices via Householder reduction
//! to tridiagonal form followed by the QL iteration.

use super::tridiag::{self, SymTridiagonal};
use crate::error::Result;

/// Dense symmetric matrix, row-major full storage (both triangles kept in sync).
#[derive(Clone, Debug)]
pub struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, a: vec![0.0; n * n] }
    }

    pub fn from_rows(n: usize, a: Vec<f64>) -> Self {
        assert_eq!(a.len(), n * n);
        Self { n, a }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n + j]
    }

    pub fn set_sym(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] = v;
        self.a[j * self.n + i] = v;
    }

    pub fn add_sym(&mut self, i: usize, j: usize, v: f64) {
        self.a[i * self.n + j] += v;
        if i != j {
            self.a[j * self.n + i] += v;
        }
    }
}

/// All eigenvalues of a dense symmetric matrix, ascending.
pub fn eigenvalues_sym(mat: &SymMatrix) -> Result<Vec<f64>> {
    let tri = householder_tridiagonalize(mat);
    tridiag::eigenvalues(&tri)
}

/// Householder reduction of a symmetric matrix to tridiagonal form,
/// values only (classic tred1/tred2 scheme working on the lower triangle).
pub fn householder_tridiagonalize(mat: &SymMatrix) -> SymTridiagonal {
    let n = mat.n;
    if n == 0 {
        return SymTridiagonal::new(vec![], vec![]);
    }
    if n == 1 {
        return SymTridiagonal::new(vec![mat.get(0, 0)], vec![]);
    }
    let mut a = mat.a.clone();
    let mut e = vec![0.0f64; n];
    let idx = |i: usize, j: usize| i * n + j;

    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = 0.0f64;
        if l > 0 {
            let scale: f64 = (0..=l).map(|k| a[idx(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[idx(i, l)];
            } else {
                for k in 0..=l {
                    a[idx(i, k)] /= scale;
                    h += a[idx(i, k)] * a[idx(i, k)];
                }
                let f = a[idx(i, l)];
                let g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[idx(i, l)] = f - g;
                let mut f_acc = 0.0f64;
                for j in 0..=l {
                    // element of A·u
                    let mut g_acc = 0.0f64;
                    for k in 0..=j {
                        g_acc += a[idx(j, k)] * a[idx(i, k)];
                    }
                    for k in (j + 1)..=l {
                        g_acc += a[idx(k, j)] * a[idx(i, k)];
                    }
                    e[j] = g_acc / h;
                    f_acc += e[j] * a[idx(i, j)];
                }
                let hh = f_acc / (h + h);
                // rank-2 update of the reduced block
                for j in 0..=l {
                    let f = a[idx(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 0..=j {
                        a[idx(j, k)] -= f * e[k] + g * a[idx(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[idx(i, l)];
        }
    }

    let diag: Vec<f64> = (0..n).map(|i| a[idx(i, i)]).collect();
    let off: Vec<f64> = (1..n).map(|i| e[i]).collect();
    SymTridiagonal::new(diag, off)
}
