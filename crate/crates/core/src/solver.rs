//! Conjugate gradients on Hermitian Toeplitz systems, optionally preconditioned.
//!
//! The recurrence, with `<u, v> = v^* u`:
//!
//! ```text
//! x_0 = 0, r_0 = b, z_0 = S^{-1} r_0, d_1 = z_0
//! alpha_j   = <z_{j-1}, r_{j-1}> / <d_j, T d_j>
//! x_j       = x_{j-1} + alpha_j d_j
//! r_j       = r_{j-1} - alpha_j T d_j
//! z_j       = S^{-1} r_j
//! beta_{j+1} = <z_j, r_j> / <z_{j-1}, r_{j-1}>
//! d_{j+1}   = z_j + beta_{j+1} d_j
//! ```
//!
//! stopping once `|r_j| / |r_0| < tol`.
//!
//! Under [`Definiteness::Require`] a nonpositive `<d, T d>` or `<z, r>` aborts.
//! [`Definiteness::Permit`] runs the same recurrence on Hermitian indefinite
//! systems and only stops on an exact breakdown.

use std::time::Instant;

use num_complex::Complex64;

use crate::circulant::CirculantOperator;
use crate::error::{invalid, Error, Result};
use crate::symbol::standard_normal;
use crate::toeplitz::ToeplitzSystem;
use crate::{inner, norm2};

/// Stream index reserved for right-hand sides so they never collide with phase trials.
pub const RHS_STREAM: u64 = u64::MAX;

/// Something that can apply `S^{-1}`.
pub trait Preconditioner {
    fn apply_inverse(&self, r: &[Complex64]) -> Result<Vec<Complex64>>;
}

/// `S = I`; turns PCG into plain CG.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityPreconditioner;

impl Preconditioner for IdentityPreconditioner {
    fn apply_inverse(&self, r: &[Complex64]) -> Result<Vec<Complex64>> {
        Ok(r.to_vec())
    }
}

impl Preconditioner for CirculantOperator {
    fn apply_inverse(&self, r: &[Complex64]) -> Result<Vec<Complex64>> {
        self.solve(r)
    }
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    /// `|r_j| / |r_0|` for `j = 0..=iterations`.
    pub residual_ratios: Vec<f64>,
    pub converged: bool,
    pub solution: Vec<Complex64>,
    /// Seconds.
    pub wall_time: f64,
}

/// `4 N`.
pub fn default_max_iter(n: usize) -> usize {
    4 * n
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Definiteness {
    /// Abort when `<d, T d>` or `<z, r>` is not positive.
    #[default]
    Require,
    /// Allow Hermitian indefinite `T` and `S`; abort only on an exact zero.
    Permit,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub definiteness: Definiteness,
}

impl SolveOptions {
    pub fn new(tol: f64, max_iter: usize) -> Self {
        Self {
            tol,
            max_iter,
            definiteness: Definiteness::Require,
        }
    }

    pub fn permit_indefinite(mut self) -> Self {
        self.definiteness = Definiteness::Permit;
        self
    }
}

/// PCG with positive-definiteness enforced.
pub fn pcg_solve<P>(
    t: &ToeplitzSystem,
    s: &P,
    b: &[Complex64],
    tol: f64,
    max_iter: usize,
) -> Result<SolveReport>
where
    P: Preconditioner + ?Sized,
{
    pcg_solve_with(t, s, b, SolveOptions::new(tol, max_iter))
}

fn check_scalar(value: f64, what: &str, iteration: usize, policy: Definiteness) -> Result<()> {
    match policy {
        Definiteness::Require if value.is_nan() || value <= 0.0 => Err(Error::NotPositiveDefinite(
            format!("{what} = {value:e} at iteration {iteration}"),
        )),
        Definiteness::Permit if value == 0.0 || !value.is_finite() => Err(Error::Breakdown(
            format!("{what} = {value:e} at iteration {iteration}"),
        )),
        _ => Ok(()),
    }
}

pub fn pcg_solve_with<P>(
    t: &ToeplitzSystem,
    s: &P,
    b: &[Complex64],
    opts: SolveOptions,
) -> Result<SolveReport>
where
    P: Preconditioner + ?Sized,
{
    let start = Instant::now();
    let SolveOptions {
        tol,
        max_iter,
        definiteness,
    } = opts;
    let n = t.dim();
    if b.len() != n {
        return Err(invalid(format!(
            "right-hand side length {} vs dimension {n}",
            b.len()
        )));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(invalid(format!("tolerance must be positive, got {tol}")));
    }

    let mut x = vec![Complex64::default(); n];
    let mut r = b.to_vec();
    let r0_norm = norm2(&r);
    let mut ratios = vec![1.0];
    if r0_norm == 0.0 {
        return Ok(SolveReport {
            iterations: 0,
            residual_ratios: ratios,
            converged: true,
            solution: x,
            wall_time: start.elapsed().as_secs_f64(),
        });
    }

    let mut z = s.apply_inverse(&r)?;
    let mut rho = inner(&z, &r).re;
    check_scalar(rho, "<z, r>", 0, definiteness)?;
    let mut d = z.clone();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iter {
        let td = t.matvec(&d)?;
        let curvature = inner(&td, &d).re;
        check_scalar(curvature, "<d, T d>", iterations + 1, definiteness)?;
        let alpha = rho / curvature;
        for i in 0..n {
            x[i] += d[i] * alpha;
            r[i] -= td[i] * alpha;
        }
        iterations += 1;
        let ratio = norm2(&r) / r0_norm;
        ratios.push(ratio);
        if ratio < tol {
            converged = true;
            break;
        }
        z = s.apply_inverse(&r)?;
        let rho_next = inner(&z, &r).re;
        check_scalar(rho_next, "<z, r>", iterations, definiteness)?;
        let beta = rho_next / rho;
        rho = rho_next;
        for i in 0..n {
            d[i] = z[i] + d[i] * beta;
        }
    }

    Ok(SolveReport {
        iterations,
        residual_ratios: ratios,
        converged,
        solution: x,
        wall_time: start.elapsed().as_secs_f64(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RhsKind {
    #[default]
    Ones,
    SeededRandom,
}

/// Right-hand side of length `n`. Random entries are real standard normals
/// drawn from the phase generator on [`RHS_STREAM`].
pub fn make_rhs(n: usize, kind: RhsKind, seed: u64) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(invalid("right-hand side length must be positive"));
    }
    Ok(match kind {
        RhsKind::Ones => vec![Complex64::new(1.0, 0.0); n],
        RhsKind::SeededRandom => (0..n as u64)
            .map(|i| Complex64::new(standard_normal(seed, RHS_STREAM, i + 1), 0.0))
            .collect(),
    })
}
