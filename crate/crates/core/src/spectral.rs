//! Dense Hermitian eigenvalues and the spectral diagnostics built on them:
//! clustering of preconditioned spectra, equidistribution against the symbol,
//! the Szegő geometric-mean limit, and Weyl / Cauchy interlacing checks.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::{self, Write as _};

use num_complex::Complex64;

use crate::circulant::CirculantOperator;
use crate::dense::DenseMatrix;
use crate::error::{invalid, Error, Result};
use crate::symbol::CoefficientSequence;
use crate::toeplitz::{ToeplitzSystem, DEFAULT_DENSE_CAP};

/// Entrywise Hermitian tolerance, relative to the largest entry (at least 1).
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Slack allowed in the Weyl and interlacing inequalities.
pub const INEQUALITY_SLACK: f64 = 1e-10;
/// Quadrature points for symbol log-means.
pub const LOG_MEAN_POINTS: usize = 4096;
/// Grid values below this magnitude are dropped from the log-mean.
pub const LOG_ZERO_CUTOFF: f64 = 1e-13;
/// Highest monomial degree accepted as a test function.
pub const MAX_MONOMIAL_DEGREE: u32 = 8;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix, ascending, by cyclic complex Jacobi rotations.
///
/// Each rotation first removes the phase of `a_pq` and then applies the real
/// symmetric Jacobi rotation, so the pair `(p, q)` is annihilated exactly.
/// Sweeps stop once the off-diagonal Frobenius norm falls below `1e-15 |A|_F`
/// or a sweep makes no rotation.
pub fn hermitian_eigenvalues(a: &DenseMatrix) -> Result<Vec<f64>> {
    let n = a.dim();
    if n == 0 {
        return Err(invalid("eigenvalues of an empty matrix"));
    }
    let entry_scale = a.as_slice().iter().map(|z| z.norm()).fold(1.0, f64::max);
    let defect = a.hermitian_defect();
    if defect.is_nan() || defect > HERMITIAN_TOL * entry_scale {
        return Err(Error::ContractViolation(format!(
            "matrix is not Hermitian (defect {defect:e})"
        )));
    }

    let mut w = a.clone();
    w.symmetrize();
    let norm = w.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(&w);
        if off == 0.0 || off <= 1e-15 * norm {
            break;
        }
        let mut rotated = false;
        for p in 0..n - 1 {
            for q in p + 1..n {
                rotated |= rotate(&mut w, p, q);
            }
        }
        if !rotated {
            break;
        }
    }
    let off = off_diagonal_norm(&w);
    if off > 1e-12 * norm {
        return Err(Error::ContractViolation(format!(
            "Jacobi iteration stalled with off-diagonal norm {off:e}"
        )));
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| w[(i, i)].re).collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

fn off_diagonal_norm(w: &DenseMatrix) -> f64 {
    let n = w.dim();
    let mut sum = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            sum += w[(i, j)].norm_sqr();
        }
    }
    (2.0 * sum).sqrt()
}

/// Annihilates `w[(p, q)]`. Returns false when the entry is negligible.
fn rotate(w: &mut DenseMatrix, p: usize, q: usize) -> bool {
    let apq = w[(p, q)];
    let g = apq.norm();
    let app = w[(p, p)].re;
    let aqq = w[(q, q)].re;
    if g == 0.0 || (app.abs() + 100.0 * g == app.abs() && aqq.abs() + 100.0 * g == aqq.abs()) {
        if g != 0.0 {
            w[(p, q)] = Complex64::default();
            w[(q, p)] = Complex64::default();
        }
        return false;
    }
    let u = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let c = 1.0 / (1.0 + t * t).sqrt();
    let s = t * c;
    // J = [[c, s u], [-s conj(u), c]] on the (p, q) plane
    let jqp = -s * u.conj();
    let jpq = s * u;
    let n = w.dim();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = w[(k, p)];
        let akq = w[(k, q)];
        let new_p = akp * c + akq * jqp;
        let new_q = akp * jpq + akq * c;
        w[(k, p)] = new_p;
        w[(k, q)] = new_q;
        w[(p, k)] = new_p.conj();
        w[(q, k)] = new_q.conj();
    }
    w[(p, p)] = Complex64::new(app - t * g, 0.0);
    w[(q, q)] = Complex64::new(aqq + t * g, 0.0);
    w[(p, q)] = Complex64::default();
    w[(q, p)] = Complex64::default();
    true
}

/// Number of eigenvalues with `|lambda - center| > epsilon`.
pub fn clustering_count(eigs: &[f64], center: f64, epsilon: f64) -> usize {
    eigs.iter()
        .filter(|&&l| (l - center).abs() > epsilon)
        .count()
}

/// `exp(mean log lambda)`; every eigenvalue must be positive.
pub fn geometric_mean(eigs: &[f64]) -> Result<f64> {
    if eigs.is_empty() {
        return Err(invalid("geometric mean of no values"));
    }
    if let Some(bad) = eigs.iter().find(|&&l| l.is_nan() || l <= 0.0) {
        return Err(Error::Domain(format!("nonpositive eigenvalue {bad:e}")));
    }
    Ok((eigs.iter().map(|l| l.ln()).sum::<f64>() / eigs.len() as f64).exp())
}

/// Dense eigenvalues of `T`, ascending.
pub fn toeplitz_eigenvalues(t: &ToeplitzSystem) -> Result<Vec<f64>> {
    hermitian_eigenvalues(&t.materialize_dense()?)
}

/// Spectrum and diagnostics of one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub eigenvalues: Vec<f64>,
    pub center: f64,
    pub epsilon: f64,
    pub cluster_outliers: usize,
    pub discrepancies: BTreeMap<String, f64>,
    pub geometric_mean: Option<f64>,
}

impl SpectralReport {
    pub fn from_eigenvalues(eigenvalues: Vec<f64>, center: f64, epsilon: f64) -> Self {
        let cluster_outliers = clustering_count(&eigenvalues, center, epsilon);
        let geometric_mean = geometric_mean(&eigenvalues).ok();
        Self {
            eigenvalues,
            center,
            epsilon,
            cluster_outliers,
            discrepancies: BTreeMap::new(),
            geometric_mean,
        }
    }

    /// `index,eigenvalue` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,eigenvalue\n");
        for (i, l) in self.eigenvalues.iter().enumerate() {
            let _ = writeln!(out, "{i},{l:.16e}");
        }
        out
    }

    /// Header plus one row: outliers, epsilon, geometric mean, then each discrepancy.
    pub fn summary_csv(&self) -> String {
        let mut header = String::from("outliers,epsilon,geometric_mean");
        let mut row = format!(
            "{},{:.16e},{}",
            self.cluster_outliers,
            self.epsilon,
            self.geometric_mean
                .map_or_else(|| "nan".to_string(), |g| format!("{g:.16e}"))
        );
        for (name, d) in &self.discrepancies {
            let _ = write!(header, ",{name}");
            let _ = write!(row, ",{d:.16e}");
        }
        format!("{header}\n{row}\n")
    }
}

/// Spectrum of `S^{-1} T`, computed as the Hermitian matrix `S^{-1/2} T S^{-1/2}`,
/// with outliers counted around 1.
pub fn preconditioned_spectrum(
    t: &ToeplitzSystem,
    s: &CirculantOperator,
    epsilon: f64,
) -> Result<SpectralReport> {
    let n = t.dim();
    if s.size() != n {
        return Err(invalid(format!(
            "preconditioner size {} vs dimension {n}",
            s.size()
        )));
    }
    if n > DEFAULT_DENSE_CAP {
        return Err(Error::ResourceLimit {
            requested: n,
            cap: DEFAULT_DENSE_CAP,
        });
    }
    let mut h = DenseMatrix::zeros(n);
    let mut e = vec![Complex64::default(); n];
    for k in 0..n {
        e.fill(Complex64::default());
        e[k] = Complex64::new(1.0, 0.0);
        let col = s.inverse_sqrt_apply(&t.matvec(&s.inverse_sqrt_apply(&e)?)?)?;
        for (j, v) in col.into_iter().enumerate() {
            h[(j, k)] = v;
        }
    }
    h.symmetrize();
    Ok(SpectralReport::from_eigenvalues(
        hermitian_eigenvalues(&h)?,
        1.0,
        epsilon,
    ))
}

/// Eigenvalues of a general complex matrix via a Schur decomposition,
/// sorted by real part and then imaginary part.
pub fn general_eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if n == 0 {
        return Err(invalid("eigenvalues of an empty matrix"));
    }
    if let Some(z) = a
        .as_slice()
        .iter()
        .find(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(invalid(format!("non-finite matrix entry {z}")));
    }
    let m = nalgebra::DMatrix::from_row_slice(n, n, a.as_slice());
    let schur = m
        .try_schur(1e-15, 1000 * n)
        .ok_or_else(|| Error::ContractViolation("Schur iteration did not converge".into()))?;
    let mut eigs: Vec<Complex64> = schur
        .eigenvalues()
        .ok_or_else(|| Error::ContractViolation("Schur form is not triangular".into()))?
        .iter()
        .copied()
        .collect();
    eigs.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(eigs)
}

/// Eigenvalues of `S^{-1} T` without assuming `S` is positive definite.
/// When `S` is indefinite the product is not Hermitian and its eigenvalues may be complex.
pub fn preconditioned_eigenvalues_general(
    t: &ToeplitzSystem,
    s: &CirculantOperator,
) -> Result<Vec<Complex64>> {
    let n = t.dim();
    if s.size() != n {
        return Err(invalid(format!(
            "preconditioner size {} vs dimension {n}",
            s.size()
        )));
    }
    let dense = t.materialize_dense()?;
    let mut m = DenseMatrix::zeros(n);
    let mut col = vec![Complex64::default(); n];
    for k in 0..n {
        for (j, v) in col.iter_mut().enumerate() {
            *v = dense[(j, k)];
        }
        for (j, v) in s.solve(&col)?.into_iter().enumerate() {
            m[(j, k)] = v;
        }
    }
    general_eigenvalues(&m)
}

/// Test function for equidistribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TestFunction {
    /// `t^k`.
    Monomial(u32),
    /// `log(1 + x t)`.
    Log1p(f64),
}

impl TestFunction {
    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            TestFunction::Monomial(k) => t.powi(k as i32),
            TestFunction::Log1p(x) => (x * t).ln_1p(),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Monomial(k) => write!(f, "t^{k}"),
            TestFunction::Log1p(x) => write!(f, "log(1+{x:e}*t)"),
        }
    }
}

/// `theta_j = -pi + 2 j pi / (N + 1)`, `j = 1..=N`.
pub fn equidistribution_grid(n: usize) -> Vec<f64> {
    (1..=n)
        .map(|j| -PI + 2.0 * PI * j as f64 / (n + 1) as f64)
        .collect()
}

/// `max(|lambda|, |f|)` over both families; bounds the admissible log parameter.
pub fn value_bound(eigs: &[f64], grid_values: &[f64]) -> f64 {
    eigs.iter()
        .chain(grid_values)
        .fold(0.0, |m, v| m.max(v.abs()))
}

/// `(1/N) |sum_j F(lambda_j) - F(f_j)|` with both families sorted ascending.
pub fn discrepancy_from_values(
    eigs: &[f64],
    grid_values: &[f64],
    func: TestFunction,
) -> Result<f64> {
    if eigs.len() != grid_values.len() || eigs.is_empty() {
        return Err(invalid(
            "eigenvalue and grid families must have equal nonzero length",
        ));
    }
    match func {
        TestFunction::Monomial(k) if k > MAX_MONOMIAL_DEGREE => {
            return Err(invalid(format!(
                "monomial degree {k} exceeds {MAX_MONOMIAL_DEGREE}"
            )));
        }
        TestFunction::Log1p(x) => {
            let bound = value_bound(eigs, grid_values);
            let reach = x.abs() * bound;
            if reach.is_nan() || reach >= 1.0 {
                return Err(invalid(format!(
                    "log parameter {x} outside |x| < 1/{bound}"
                )));
            }
        }
        TestFunction::Monomial(_) => {}
    }
    let mut a = eigs.to_vec();
    let mut b = grid_values.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let sum: f64 = a
        .iter()
        .zip(&b)
        .map(|(&l, &f)| func.eval(l) - func.eval(f))
        .sum();
    Ok(sum.abs() / a.len() as f64)
}

/// Discrepancy between the spectrum of `T` and its symbol sampled on the
/// `N`-point equidistribution grid.
pub fn equidistribution_discrepancy(
    t: &ToeplitzSystem,
    c: &CoefficientSequence,
    func: TestFunction,
) -> Result<f64> {
    let eigs = toeplitz_eigenvalues(t)?;
    let grid = c.evaluate_grid(&equidistribution_grid(t.dim()));
    discrepancy_from_values(&eigs, &grid, func)
}

/// `(det T)^{1/N}` through the eigenvalues.
pub fn szego_geometric_mean(t: &ToeplitzSystem) -> Result<f64> {
    geometric_mean(&toeplitz_eigenvalues(t)?)
}

/// `exp((1/2pi) int log f)` by the periodic rule on [`LOG_MEAN_POINTS`] points
/// offset by half a step, `theta_j = -pi + 2 pi (j + 1/2) / M`.
///
/// Points with `|f| < LOG_ZERO_CUTOFF` are dropped (log-integrable zeros);
/// clearly negative values are a domain error.
pub fn symbol_log_mean(c: &CoefficientSequence) -> Result<f64> {
    let m = LOG_MEAN_POINTS;
    let mut sum = 0.0;
    let mut used = 0usize;
    for j in 0..m {
        let theta = -PI + 2.0 * PI * (j as f64 + 0.5) / m as f64;
        let f = c.evaluate(theta);
        if f.abs() < LOG_ZERO_CUTOFF {
            continue;
        }
        if f < 0.0 {
            return Err(Error::Domain(format!(
                "symbol is negative ({f:e}) at theta = {theta}"
            )));
        }
        sum += f.ln();
        used += 1;
    }
    if used == 0 {
        return Err(Error::Domain("symbol vanishes on the whole grid".into()));
    }
    Ok((sum / used as f64).exp())
}

fn check_pair(a: &DenseMatrix, b: &DenseMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(invalid(format!(
            "dimension mismatch {} vs {}",
            a.dim(),
            b.dim()
        )));
    }
    Ok(())
}

/// `lambda_k(A) + lambda_1(B) <= lambda_k(A + B) <= lambda_k(A) + lambda_n(B)` for all `k`.
pub fn check_weyl(a: &DenseMatrix, b: &DenseMatrix) -> Result<bool> {
    check_pair(a, b)?;
    let la = hermitian_eigenvalues(a)?;
    let lb = hermitian_eigenvalues(b)?;
    let lab = hermitian_eigenvalues(&a.add(b)?)?;
    let slack = INEQUALITY_SLACK * (a.frobenius_norm() + b.frobenius_norm()).max(1.0);
    let (b_min, b_max) = (lb[0], lb[lb.len() - 1]);
    Ok(la
        .iter()
        .zip(&lab)
        .all(|(&x, &y)| x + b_min <= y + slack && y <= x + b_max + slack))
}

/// Cauchy interlacing for the principal submatrix with row/column `delete_index` removed.
pub fn check_interlacing(a_hat: &DenseMatrix, delete_index: usize) -> Result<bool> {
    if a_hat.dim() < 2 {
        return Err(invalid("interlacing needs dimension at least 2"));
    }
    let sub = a_hat.delete_row_col(delete_index)?;
    let big = hermitian_eigenvalues(a_hat)?;
    let small = hermitian_eigenvalues(&sub)?;
    let slack = INEQUALITY_SLACK * a_hat.frobenius_norm().max(1.0);
    Ok(small
        .iter()
        .enumerate()
        .all(|(k, &mu)| big[k] <= mu + slack && mu <= big[k + 1] + slack))
}
