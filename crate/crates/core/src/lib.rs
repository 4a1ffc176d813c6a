//! Random Hermitian Toeplitz systems and their Strang circulant preconditioner.
//!
//! The crate is organised bottom-up:
//!
//! * [`transforms`] – arbitrary-length DFT (radix-2 plus Bluestein).
//! * [`symbol`] – random-phase generating functions and their coefficient sequences.
//! * [`toeplitz`] – Hermitian Toeplitz operators with FFT matvec.
//! * [`circulant`] – circulant operators and the Strang preconditioner.
//! * [`solver`] – conjugate gradients, plain and preconditioned.
//! * [`spectral`] – Jacobi eigensolver, clustering, equidistribution and Szegő diagnostics.
//!
//! Complex vectors are plain `[Complex64]` slices throughout.

pub mod circulant;
pub mod dense;
pub mod error;
pub mod solver;
pub mod spectral;
pub mod symbol;
pub mod toeplitz;
pub mod transforms;

pub use num_complex::Complex64;

pub use circulant::{CirculantOperator, EvenRule};
pub use dense::DenseMatrix;
pub use error::{Error, Result};
pub use solver::{
    make_rhs, pcg_solve, pcg_solve_with, Definiteness, IdentityPreconditioner, Preconditioner,
    RhsKind, SolveOptions, SolveReport,
};
pub use spectral::{SpectralReport, TestFunction};
pub use symbol::{CoefficientSequence, Magnitudes, PhaseLaw, SymbolModel};
pub use toeplitz::ToeplitzSystem;

/// Euclidean norm of a complex vector.
pub fn norm2(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Inner product `<u, v> = v^* u`.
pub fn inner(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a * b.conj()).sum()
}
