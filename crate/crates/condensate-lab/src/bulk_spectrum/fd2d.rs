//! Five-point finite-difference eigensolver for the pair Hamiltonian on the
//! half-domain {0 <= y < x <= L, x - y <= d}.
//!
//! Boundary data: Dirichlet on the diagonal x = y (antisymmetric sector) and
//! on the hard wall x - y = d; the configured outer condition on the wire-end
//! edges. Neumann edges use mirrored ghosts; the resulting operator is
//! symmetrized by the half-cell diagonal similarity, which preserves the
//! spectrum.
//!
//! The strip grid is narrow (width d/h nodes), so the shifted system factors
//! with a banded Cholesky and the lowest modes come from shift-invert Lanczos.
//! Small grids go through the dense Householder path instead.

use super::{continuum_ground_energy, OuterBc, Spectrum, SpectrumSource, WireParams};
use crate::error::{Error, Result};
use crate::linalg::{banded::SymBanded, dense, lanczos};
use crate::util;

/// Grids at or below this node count are solved densely.
const DENSE_LIMIT: usize = 360;

/// Fixed Lanczos start-vector seed; part of the determinism contract.
const FD2D_SEED: u64 = 0x6c61_6e63_7a6f_7331;

struct Grid {
    n_d: usize,
    i_max: usize,
    /// First admissible j per column i (index 0 unused).
    j_lo: Vec<usize>,
    col_start: Vec<usize>,
    n_nodes: usize,
    neumann: bool,
    n_l: usize,
}

impl Grid {
    fn build(wire: &WireParams, h: f64) -> Result<Grid> {
        let n_d_f = wire.d / h;
        let n_l_f = wire.length / h;
        if (n_d_f - n_d_f.round()).abs() > 1e-6 || (n_l_f - n_l_f.round()).abs() > 1e-6 {
            return Err(Error::invalid(
                "bulk_method.h",
                format!("h = {h} must divide both d = {} and L = {}", wire.d, wire.length),
            ));
        }
        let n_d = n_d_f.round() as usize;
        let n_l = n_l_f.round() as usize;
        if !(h < wire.d / 8.0) {
            return Err(Error::invalid(
                "bulk_method.h",
                format!("need h < d/8, got h = {h}, d = {}", wire.d),
            ));
        }
        let neumann = wire.outer_bc == OuterBc::Neumann;
        let j_min = if neumann { 0usize } else { 1 };
        let i_max = if neumann { n_l } else { n_l - 1 };

        let mut j_lo = vec![0usize; i_max + 2];
        let mut col_start = vec![0usize; i_max + 2];
        let mut n_nodes = 0usize;
        for i in 1..=i_max {
            let lo = j_min.max(i.saturating_sub(n_d - 1));
            j_lo[i] = lo;
            col_start[i] = n_nodes;
            if i >= 1 && lo <= i - 1 {
                n_nodes += i - lo; // j runs lo..=i-1
            }
        }
        col_start[i_max + 1] = n_nodes;
        Ok(Grid { n_d, i_max, j_lo, col_start, n_nodes, neumann, n_l })
    }

    fn index(&self, i: i64, j: i64) -> Option<usize> {
        if i < 1 || i as usize > self.i_max || j < 0 {
            return None;
        }
        let (i, j) = (i as usize, j as usize);
        if j + 1 > i || i - j > self.n_d - 1 {
            return None;
        }
        let lo = self.j_lo[i];
        if j < lo {
            return None;
        }
        Some(self.col_start[i] + (j - lo))
    }

    /// Half-cell measure weight of a node (1 away from Neumann edges).
    fn weight(&self, i: usize, j: usize) -> f64 {
        let mut w = 1.0;
        if self.neumann {
            if j == 0 {
                w *= 0.5;
            }
            if i == self.n_l {
                w *= 0.5;
            }
        }
        w
    }
}

/// Assembled symmetric operator as (diagonal value, lower-triplet list, bandwidth).
fn assemble(grid: &Grid, h: f64) -> (f64, Vec<(usize, usize, f64)>, usize) {
    let inv_h2 = 1.0 / (h * h);
    let mut triplets: Vec<(usize, usize, f64)> = Vec::with_capacity(2 * grid.n_nodes);
    let mut bandwidth = 0usize;
    for i in 1..=grid.i_max {
        let lo = grid.j_lo[i];
        if lo + 1 > i {
            continue;
        }
        for j in lo..=(i - 1) {
            let p = grid.index(i as i64, j as i64).unwrap();
            let wp = grid.weight(i, j);
            for (di, dj) in [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)] {
                let mut ii = i as i64 + di;
                let mut jj = j as i64 + dj;
                if grid.neumann {
                    if jj == -1 {
                        jj = 1;
                    }
                    if ii == grid.n_l as i64 + 1 {
                        ii = grid.n_l as i64 - 1;
                    }
                }
                let Some(q) = grid.index(ii, jj) else { continue };
                if q >= p {
                    continue; // handled from the higher-index row
                }
                let wq = grid.weight(ii as usize, jj as usize);
                triplets.push((p, q, -inv_h2 * (wp / wq).sqrt()));
                bandwidth = bandwidth.max(p - q);
            }
        }
    }
    (4.0 * inv_h2, triplets, bandwidth)
}

/// The `n_lowest` eigenvalues of the pair Hamiltonian on the strip, ascending.
pub fn fd2d_spectrum(wire: &WireParams, h: f64, n_lowest: usize) -> Result<Spectrum> {
    fd2d_spectrum_impl(wire, h, n_lowest, false)
}

pub(crate) fn fd2d_spectrum_impl(
    wire: &WireParams,
    h: f64,
    n_lowest: usize,
    force_iterative: bool,
) -> Result<Spectrum> {
    wire.validate()?;
    if n_lowest < 1 {
        return Err(Error::invalid("bulk_method.n_lowest", "need n_lowest >= 1"));
    }
    let grid = Grid::build(wire, h)?;
    let n = grid.n_nodes;
    if n < n_lowest {
        return Err(Error::MeshSizing {
            h,
            message: format!("{n} interior nodes cannot supply {n_lowest} eigenvalues"),
        });
    }
    let (diag, triplets, bandwidth) = assemble(&grid, h);

    let eigenvalues = if n <= DENSE_LIMIT && !force_iterative {
        let mut m = dense::SymMatrix::zeros(n);
        for i in 0..n {
            m.set_sym(i, i, diag);
        }
        for &(p, q, v) in &triplets {
            m.add_sym(p, q, v);
        }
        let mut eigs = dense::eigenvalues_sym(&m)?;
        eigs.truncate(n_lowest);
        eigs
    } else {
        let mut m = SymBanded::zeros(n, bandwidth);
        for i in 0..n {
            m.add(i, i, diag);
        }
        for &(p, q, v) in &triplets {
            m.add(p, q, v);
        }
        // Shift below the spectrum; halve until the factorization confirms it.
        let mut sigma = 0.75 * continuum_ground_energy(wire.d);
        let chol = loop {
            match m.shifted(sigma).cholesky() {
                Some(c) => break c,
                None => {
                    if sigma <= 0.0 {
                        return Err(Error::EigenNonConvergence {
                            fingerprint: fd2d_fingerprint(wire, h, n_lowest),
                            sweeps: 0,
                        });
                    }
                    sigma = if sigma < 1e-6 { 0.0 } else { sigma * 0.5 };
                }
            }
        };
        lanczos::shift_invert_lowest(n, sigma, |x| chol.solve_in_place(x), n_lowest, FD2D_SEED)?
    };

    let spectrum = Spectrum {
        cutoff_energy: *eigenvalues.last().unwrap(),
        eigenvalues,
        source: SpectrumSource::Fd2d,
        mesh_h: Some(h),
        fingerprint: fd2d_fingerprint(wire, h, n_lowest),
    };
    spectrum.validate()?;
    Ok(spectrum)
}

pub(crate) fn fd2d_fingerprint(wire: &WireParams, h: f64, n_lowest: usize) -> String {
    util::fingerprint(&format!(
        "fd2d|d={:e}|L={:e}|bc={:?}|h={:e}|n={n_lowest}|v1",
        wire.d, wire.length, wire.outer_bc, h
    ))
}
