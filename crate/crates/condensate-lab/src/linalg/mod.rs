//! Deterministic symmetric eigenvalue machinery: tridiagonal QL with a
//! Sturm bisection fallback, dense Householder reduction, banded Cholesky,
//! and shift-invert Lanczos. No external linear-algebra backends, so results
//! are bit-reproducible across platforms with the same float semantics.

pub mod banded;
pub mod dense;
pub mod lanczos;
pub mod tridiag;

pub use banded::SymBanded;
pub use dense::SymMatrix;
pub use tridiag::SymTridiagonal;
