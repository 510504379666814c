//! Dense real linear algebra for desk-scale problems (dimension up to ~40).
//!
//! Everything here is a pure function of its inputs. Thresholds are relative
//! to the magnitude of the input with an absolute floor of `1e-12`.

mod chol;
mod eigen;
mod lmi;
mod lu;
mod lyap;
mod mat;
mod rank;
mod symeig;

use core::fmt;

pub use chol::{chol_pd, Cholesky};
pub use eigen::{eigenvalues, Spectrum};
pub use lmi::{lmi_residual, solve_lmi, solve_lmi_with, LmiOptions, LmiSolution};
pub use lu::{inverse, lu_solve};
pub use lyap::solve_lyapunov;
pub use mat::Mat;
pub use num_complex::Complex64;
pub use rank::{is_stabilizable, rank};
pub use symeig::{sym_eig, SymSpectrum};

/// Absolute floor under every relative threshold.
pub const ABS_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub enum LinalgError {
    /// A pivot fell below `1e-12 · max|a|`.
    SingularMatrix,
    /// Shapes are incompatible for the requested operation.
    DimensionMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    /// The Hessenberg QR iteration exhausted its budget.
    NoConvergence,
    NotSymmetric { asymmetry: f64 },
    /// Cholesky pivot at `index` was not positive.
    NotPD { index: usize, pivot: f64 },
    /// Two eigenvalues of the Lyapunov operator sum to (nearly) zero.
    SingularSylvester,
    NotStabilizable,
    RiccatiNoConvergence,
}

impl fmt::Display for LinalgError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LinalgError::SingularMatrix => write!(f, "matrix is singular"),
            LinalgError::DimensionMismatch { expected, got } => write!(
                f,
                "dimension mismatch: expected {}x{}, got {}x{}",
                expected.0, expected.1, got.0, got.1
            ),
            LinalgError::NoConvergence => write!(f, "eigenvalue iteration did not converge"),
            LinalgError::NotSymmetric { asymmetry } => {
                write!(f, "matrix is not symmetric (max asymmetry {asymmetry:e})")
            }
            LinalgError::NotPD { index, pivot } => {
                write!(f, "matrix is not positive definite (pivot {index} = {pivot:e})")
            }
            LinalgError::SingularSylvester => {
                write!(f, "Lyapunov operator is singular: eigenvalues sum to zero")
            }
            LinalgError::NotStabilizable => write!(f, "pair is not stabilizable"),
            LinalgError::RiccatiNoConvergence => write!(f, "Riccati iteration did not converge"),
        }
    }
}

impl core::error::Error for LinalgError {}

pub(crate) fn require_square(a: &Mat) -> Result<(), LinalgError> {
    if a.is_square() {
        Ok(())
    } else {
        Err(LinalgError::DimensionMismatch {
            expected: (a.rows(), a.rows()),
            got: (a.rows(), a.cols()),
        })
    }
}
