//! Numerical laboratory for a grand-canonical gas of bound electron pairs on
//! a finite quantum wire coupled to a chain of discrete surface defects.
//!
//! The crate computes the two constituent spectra (the weighted path-graph
//! Laplacian of the defect chain and the pair Hamiltonian on the wire strip),
//! solves the coupled self-consistency equations for the chemical potential
//! and the mean-field surface density, and drives thermodynamic-limit sweeps
//! that test when the bulk condensate is destroyed by the defects and when a
//! large enough pair density reconstructs it.
//!
//! Modules:
//! - [`graph_spectrum`]: defect-chain Laplacian and its eigenvalues.
//! - [`bulk_spectrum`]: separable and finite-difference pair spectra, cached.
//! - [`statmech`]: Bose occupations, surface fixed point, and the mu-solve.
//! - [`thermo`]: sweeps, 1/L extrapolation, theorem verdicts, critical density.
//! - [`cli`]: the `condensate-lab` command-line front end.

pub mod bulk_spectrum;
pub mod cli;
pub mod config;
pub mod error;
pub mod graph_spectrum;
pub mod linalg;
pub mod output;
pub mod statmech;
pub mod thermo;
pub mod util;

pub use bulk_spectrum::{OuterBc, Spectrum, WireParams};
pub use error::{Error, Result};
pub use graph_spectrum::{DefectLattice, WeightSpec};
pub use statmech::{GrandCanonicalSolution, PhysicalParams};
pub use thermo::{SweepBulkModel, SweepContext, ThermoSweep};
