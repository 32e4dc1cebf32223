//! Stationary scattering theory for block Jacobi operators
//!
//! ```text
//! (τu)_n = A_{n-1} u_{n-1} + B_n u_n + A_n u_{n+1}
//! ```
//!
//! with hermitian d×d blocks that differ from the free operator (A = I, B = 0)
//! on a finite window. The crate builds Jost solutions, Wronskians, connection
//! coefficients, transfer and scattering matrices (including the extension of
//! the scattering matrix to z = ±1), locates the discrete spectrum three
//! independent ways and evaluates trace-norm eigenvalue bounds.

pub mod block;
pub mod coefficients;
pub mod error;
pub mod jost;
pub mod scattering;
pub mod spectrum;
pub mod tol;
pub mod wronskian;

pub use block::{BlockMatrix2, BlockSequence, OperatorBlock};
pub use coefficients::{CoefficientData, SpectralPoint};
pub use error::{Error, Result};
pub use jost::{JostSeriesData, OperatorSolution, Species, Window};
pub use scattering::ScatteringData;
pub use spectrum::{EigenvalueBounds, EigenvalueItem, EigenvalueReport, Method};
pub use wronskian::{BasisPair, ConnectionCoefficients, WronskianValue};

pub use num_complex::Complex64;
