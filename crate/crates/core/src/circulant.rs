//! Circulant operators, diagonalised by the DFT.
//!
//! A circulant with first column `s` has eigenvalues `dft_forward(s)` and
//! eigenvectors the Fourier modes, so solves and square roots cost two
//! transforms.

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::symbol::CoefficientSequence;
use crate::transforms::FftPlan;

/// Relative tolerance on imaginary parts of eigenvalues of a Hermitian circulant.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Eigenvalues below this fraction of the largest magnitude count as singular.
pub const SINGULAR_TOL: f64 = 1e-14;

/// Choice of `s_m` for even sizes `N = 2m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvenRule {
    Zero,
    #[default]
    Average,
}

#[derive(Debug, Clone)]
pub struct CirculantOperator {
    first_column: Vec<Complex64>,
    eigenvalues: Vec<Complex64>,
    plan: FftPlan,
}

impl CirculantOperator {
    pub fn new(first_column: Vec<Complex64>) -> Result<Self> {
        if first_column.is_empty() {
            return Err(invalid("circulant needs a non-empty first column"));
        }
        if first_column
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(invalid("circulant first column must be finite"));
        }
        let plan = FftPlan::new(first_column.len())?;
        let mut eigenvalues = first_column.clone();
        plan.forward(&mut eigenvalues);
        Ok(Self {
            first_column,
            eigenvalues,
            plan,
        })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(invalid("circulant size must be positive"));
        }
        let mut col = vec![Complex64::default(); n];
        col[0] = Complex64::new(1.0, 0.0);
        Self::new(col)
    }

    /// Strang preconditioner of the Toeplitz operator of dimension `n` built from `c`.
    ///
    /// Copies the central band `c_0 … c_m` and wraps `c_{l-n}` into the
    /// remaining positions; for even `n` the middle entry follows `rule`.
    pub fn strang(c: &CoefficientSequence, n: usize, rule: EvenRule) -> Result<Self> {
        if n == 0 {
            return Err(invalid("preconditioner size must be positive"));
        }
        let m = n / 2;
        if !c.has_finite_support() && c.bandwidth() < m {
            return Err(invalid(format!(
                "bandwidth {} too small for a Strang circulant of size {n}",
                c.bandwidth()
            )));
        }
        let col = (0..n)
            .map(|l| {
                if n.is_multiple_of(2) && l == m && l > 0 {
                    match rule {
                        EvenRule::Zero => Complex64::default(),
                        EvenRule::Average => (c.get(m as i64) + c.get(-(m as i64))) * 0.5,
                    }
                } else if l <= m {
                    c.get(l as i64)
                } else {
                    c.get(l as i64 - n as i64)
                }
            })
            .collect();
        Self::new(col)
    }

    pub fn size(&self) -> usize {
        self.first_column.len()
    }

    pub fn first_column(&self) -> &[Complex64] {
        &self.first_column
    }

    /// Raw DFT eigenvalues in Fourier order.
    pub fn raw_eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    fn max_abs_eigenvalue(&self) -> f64 {
        self.eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        let scale = self.max_abs_eigenvalue().max(1.0);
        self.eigenvalues
            .iter()
            .all(|z| z.im.abs() <= HERMITIAN_TOL * scale)
    }

    fn real_eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian() {
            let worst = self
                .eigenvalues
                .iter()
                .map(|z| z.im.abs())
                .fold(0.0, f64::max);
            return Err(Error::ContractViolation(format!(
                "circulant is not Hermitian: eigenvalue imaginary part {worst:e}"
            )));
        }
        Ok(self.eigenvalues.iter().map(|z| z.re).collect())
    }

    /// Real eigenvalues sorted ascending; fails unless the operator is Hermitian.
    pub fn sorted_eigenvalues(&self) -> Result<Vec<f64>> {
        let mut eigs = self.real_eigenvalues()?;
        eigs.sort_by(f64::total_cmp);
        Ok(eigs)
    }

    /// Smallest eigenvalue of a Hermitian circulant.
    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .real_eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    pub fn is_positive_definite(&self) -> bool {
        self.min_eigenvalue().is_ok_and(|m| m > 0.0)
    }

    fn check_len(&self, x: &[Complex64]) -> Result<()> {
        if x.len() != self.size() {
            return Err(invalid(format!(
                "vector length {} vs circulant size {}",
                x.len(),
                self.size()
            )));
        }
        Ok(())
    }

    /// Applies `g(lambda_j)` in Fourier space: `idft(g(lambda) .* dft(x))`.
    fn apply_spectral(&self, x: &[Complex64], g: impl Fn(usize) -> Complex64) -> Vec<Complex64> {
        let mut work = x.to_vec();
        self.plan.forward(&mut work);
        for (j, w) in work.iter_mut().enumerate() {
            *w *= g(j);
        }
        self.plan.inverse(&mut work);
        work
    }

    /// `S x`.
    pub fn apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x)?;
        Ok(self.apply_spectral(x, |j| self.eigenvalues[j]))
    }

    /// Solves `S z = b`.
    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(b)?;
        let max_abs = self.max_abs_eigenvalue();
        let min_abs = self
            .eigenvalues
            .iter()
            .map(|z| z.norm())
            .fold(f64::INFINITY, f64::min);
        if max_abs == 0.0 || min_abs < SINGULAR_TOL * max_abs {
            return Err(Error::Singular { min_abs, max_abs });
        }
        Ok(self.apply_spectral(b, |j| 1.0 / self.eigenvalues[j]))
    }

    /// `S^{-1/2} x` for Hermitian positive definite `S`.
    pub fn inverse_sqrt_apply(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check_len(x)?;
        let eigs = self.real_eigenvalues()?;
        if let Some(bad) = eigs.iter().copied().find(|&l| l <= 0.0) {
            return Err(Error::NotPositiveDefinite(format!(
                "circulant eigenvalue {bad:e}"
            )));
        }
        Ok(self.apply_spectral(x, |j| Complex64::new(1.0 / eigs[j].sqrt(), 0.0)))
    }
}
