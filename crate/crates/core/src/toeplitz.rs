//! Hermitian Toeplitz operators `(T)_{jk} = c_{j-k}`.
//!
//! Products use the circulant embedding of size `M` (the smallest power of
//! two `>= 2N`) whose first column is
//!
//! ```text
//! c_0 … c_{N-1}, 0 … 0, c_{-(N-1)} … c_{-1}
//! ```
//!
//! so `T x` is the leading block of `C [x; 0]`.

use num_complex::Complex64;

use crate::circulant::CirculantOperator;
use crate::dense::DenseMatrix;
use crate::error::{invalid, Error, Result};
use crate::spectral;
use crate::symbol::CoefficientSequence;

/// Largest dimension that may be materialised densely by default.
pub const DEFAULT_DENSE_CAP: usize = 1024;

#[derive(Debug, Clone)]
pub struct ToeplitzSystem {
    n: usize,
    // c_0 … c_{N-1}
    coeffs: Vec<Complex64>,
    embedding: CirculantOperator,
}

/// Outcome of a positive-definiteness probe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DefinitenessCheck {
    pub positive_definite: bool,
    pub min_eigenvalue: f64,
}

impl ToeplitzSystem {
    pub fn new(c: &CoefficientSequence, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("Toeplitz dimension must be positive"));
        }
        if !c.covers_dimension(n) {
            return Err(invalid(format!(
                "bandwidth {} is insufficient for dimension {n} (needs {})",
                c.bandwidth(),
                n - 1
            )));
        }
        let coeffs: Vec<Complex64> = (0..n as i64).map(|k| c.get(k)).collect();
        let m = (2 * n).next_power_of_two();
        let mut col = vec![Complex64::default(); m];
        col[..n].copy_from_slice(&coeffs);
        for k in 1..n {
            col[m - k] = coeffs[k].conj();
        }
        let embedding = CirculantOperator::new(col)?;
        Ok(Self {
            n,
            coeffs,
            embedding,
        })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// `c_0 … c_{N-1}`.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn embedding_size(&self) -> usize {
        self.embedding.size()
    }

    pub fn entry(&self, j: usize, k: usize) -> Complex64 {
        if j >= k {
            self.coeffs[j - k]
        } else {
            self.coeffs[k - j].conj()
        }
    }

    /// `T x` via the circulant embedding.
    pub fn matvec(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n {
            return Err(invalid(format!(
                "vector length {} vs dimension {}",
                x.len(),
                self.n
            )));
        }
        let mut padded = vec![Complex64::default(); self.embedding.size()];
        padded[..self.n].copy_from_slice(x);
        let mut y = self.embedding.apply(&padded)?;
        y.truncate(self.n);
        Ok(y)
    }

    pub fn materialize_dense(&self) -> Result<DenseMatrix> {
        self.materialize_dense_with_cap(DEFAULT_DENSE_CAP)
    }

    pub fn materialize_dense_with_cap(&self, cap: usize) -> Result<DenseMatrix> {
        if self.n > cap {
            return Err(Error::ResourceLimit {
                requested: self.n,
                cap,
            });
        }
        Ok(DenseMatrix::from_fn(self.n, |j, k| self.entry(j, k)))
    }

    /// Positive definiteness from the smallest dense eigenvalue.
    pub fn is_positive_definite(&self) -> Result<DefinitenessCheck> {
        let eigs = spectral::hermitian_eigenvalues(&self.materialize_dense()?)?;
        let min_eigenvalue = eigs[0];
        Ok(DefinitenessCheck {
            positive_definite: min_eigenvalue > 0.0,
            min_eigenvalue,
        })
    }
}
