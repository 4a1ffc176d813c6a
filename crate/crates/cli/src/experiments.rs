use std::fmt::Write as _;

use anyhow::{Context, Result};
use rayon::prelude::*;
use toeplitz_pcg::spectral::{
    self, clustering_count, discrepancy_from_values, equidistribution_grid, value_bound,
    MAX_MONOMIAL_DEGREE,
};
use toeplitz_pcg::{
    make_rhs, pcg_solve_with, CirculantOperator, Complex64, IdentityPreconditioner, Preconditioner,
    SolveOptions, SolveReport, TestFunction, ToeplitzSystem,
};

use crate::config::{ExperimentConfig, IndefinitePolicy, PreconditionerKind};
use crate::fmt_float;
use crate::svg::Series;

/// Largest dimension at which the skip policy pays for an upfront dense eigenvalue check.
pub const UPFRONT_CHECK_MAX_N: usize = 257;

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub trial: u64,
    /// `None` marks a failed solve.
    pub cg: Option<usize>,
    pub pcg: Option<usize>,
    pub warnings: Vec<String>,
}

fn solve_options(cfg: &ExperimentConfig, n: usize) -> SolveOptions {
    let opts = SolveOptions::new(cfg.tol, cfg.max_iter_for(n));
    match cfg.indefinite {
        IndefinitePolicy::Solve => opts.permit_indefinite(),
        IndefinitePolicy::Skip => opts,
    }
}

fn attempt<P: Preconditioner + ?Sized>(
    label: &str,
    t: &ToeplitzSystem,
    p: &P,
    b: &[Complex64],
    opts: SolveOptions,
    warnings: &mut Vec<String>,
) -> Option<usize> {
    match pcg_solve_with(t, p, b, opts) {
        Ok(r) if r.converged => Some(r.iterations),
        Ok(r) => {
            warnings.push(format!(
                "{label} did not converge in {} iterations",
                r.iterations
            ));
            None
        }
        Err(e) => {
            warnings.push(format!("{label}: {e}"));
            None
        }
    }
}

fn run_trial(
    cfg: &ExperimentConfig,
    n: usize,
    trial: u64,
    b: &[Complex64],
) -> Result<TrialOutcome> {
    let c = cfg.coefficients(n, trial)?;
    let t = ToeplitzSystem::new(&c, n)?;
    let s = CirculantOperator::strang(&c, n, cfg.even_rule)?;
    let opts = solve_options(cfg, n);
    let mut warnings = Vec::new();

    let (mut run_cg, mut run_pcg) = (true, true);
    if cfg.indefinite == IndefinitePolicy::Skip && n <= UPFRONT_CHECK_MAX_N {
        let check = t.is_positive_definite()?;
        if !check.positive_definite {
            warnings.push(format!(
                "T is not positive definite (lambda_min = {:e})",
                check.min_eigenvalue
            ));
            run_cg = false;
            run_pcg = false;
        } else if !s.is_positive_definite() {
            warnings.push("S is not positive definite".to_string());
            run_pcg = false;
        }
    }
    let cg = if run_cg {
        attempt("cg", &t, &IdentityPreconditioner, b, opts, &mut warnings)
    } else {
        None
    };
    let pcg = if run_pcg {
        attempt("pcg", &t, &s, b, opts, &mut warnings)
    } else {
        None
    };
    Ok(TrialOutcome {
        trial,
        cg,
        pcg,
        warnings,
    })
}

fn run_trials(cfg: &ExperimentConfig, n: usize) -> Result<Vec<TrialOutcome>> {
    let b = make_rhs(n, cfg.rhs, cfg.seed)?;
    (1..=cfg.trials as u64)
        .into_par_iter()
        .map(|trial| {
            run_trial(cfg, n, trial, &b).with_context(|| format!("trial {trial} at n = {n}"))
        })
        .collect()
}

fn mean_of(values: impl Iterator<Item = Option<usize>>) -> (f64, usize) {
    let (mut sum, mut count, mut failed) = (0usize, 0usize, 0usize);
    for v in values {
        match v {
            Some(k) => {
                sum += k;
                count += 1;
            }
            None => failed += 1,
        }
    }
    let mean = if count == 0 {
        f64::NAN
    } else {
        sum as f64 / count as f64
    };
    (mean, failed)
}

fn iter_field(v: Option<usize>) -> String {
    v.map_or_else(|| "-1".to_string(), |k| k.to_string())
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig1Output {
    pub n: usize,
    pub trials: Vec<TrialOutcome>,
}

impl Fig1Output {
    /// Mean CG count over successful trials, with the number of failures.
    pub fn mean_cg(&self) -> (f64, usize) {
        mean_of(self.trials.iter().map(|t| t.cg))
    }

    pub fn mean_pcg(&self) -> (f64, usize) {
        mean_of(self.trials.iter().map(|t| t.pcg))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,iter_cg,iter_pcg\n");
        for t in &self.trials {
            writeln!(
                out,
                "{},{},{}",
                t.trial,
                iter_field(t.cg),
                iter_field(t.pcg)
            )
            .unwrap();
        }
        out
    }

    pub fn summary(&self) -> String {
        let (cg, cg_failed) = self.mean_cg();
        let (pcg, pcg_failed) = self.mean_pcg();
        let total = self.trials.len();
        format!(
            "n = {}: mean iter_cg = {cg:.2} ({cg_failed}/{total} failed), mean iter_pcg = {pcg:.2} ({pcg_failed}/{total} failed)",
            self.n
        )
    }

    pub fn series(&self) -> Vec<Series> {
        let pick = |f: fn(&TrialOutcome) -> Option<usize>| {
            self.trials
                .iter()
                .filter_map(|t| f(t).map(|k| (t.trial as f64, k as f64)))
                .collect()
        };
        vec![
            Series::new("CG", pick(|t| t.cg)),
            Series::new("PCG (Strang)", pick(|t| t.pcg)),
        ]
    }
}

/// Per-trial CG and PCG iteration counts at a single dimension.
pub fn run_fig1(cfg: &ExperimentConfig) -> Result<Fig1Output> {
    let n = cfg.single_n()?;
    Ok(Fig1Output {
        n,
        trials: run_trials(cfg, n)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Row {
    pub n: usize,
    pub avg_cg: f64,
    pub avg_pcg: f64,
    pub failed_cg: usize,
    pub failed_pcg: usize,
    pub trials: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fig2Output {
    pub rows: Vec<Fig2Row>,
}

impl Fig2Output {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,avg_iter_cg,avg_iter_pcg\n");
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{}",
                r.n,
                fmt_float(r.avg_cg),
                fmt_float(r.avg_pcg)
            )
            .unwrap();
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            writeln!(
                out,
                "n = {}: failed cg {}/{}, failed pcg {}/{}",
                r.n, r.failed_cg, r.trials, r.failed_pcg, r.trials
            )
            .unwrap();
        }
        out
    }

    pub fn series(&self) -> Vec<Series> {
        let pick = |f: fn(&Fig2Row) -> f64| self.rows.iter().map(|r| (r.n as f64, f(r))).collect();
        vec![
            Series::new("CG", pick(|r| r.avg_cg)),
            Series::new("PCG (Strang)", pick(|r| r.avg_pcg)),
        ]
    }
}

/// Average iteration counts over the trials for each `n = 2m + 1`.
pub fn run_fig2(cfg: &ExperimentConfig) -> Result<Fig2Output> {
    cfg.validate()?;
    anyhow::ensure!(!cfg.m_values.is_empty(), "at least one m is required");
    if let Some(&m) = cfg.m_values.iter().find(|&&m| m == 0) {
        anyhow::bail!("m must be at least 1, got {m}");
    }
    let rows = cfg
        .m_values
        .iter()
        .map(|&m| {
            let n = 2 * m + 1;
            let trials = run_trials(cfg, n)?;
            let (avg_cg, failed_cg) = mean_of(trials.iter().map(|t| t.cg));
            let (avg_pcg, failed_pcg) = mean_of(trials.iter().map(|t| t.pcg));
            Ok(Fig2Row {
                n,
                avg_cg,
                avg_pcg,
                failed_cg,
                failed_pcg,
                trials: trials.len(),
            })
        })
        .collect::<Result<_>>()?;
    Ok(Fig2Output { rows })
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpectrumTrial {
    /// Eigenvalues of the Hermitian form `S^{-1/2} T S^{-1/2}`, ascending.
    Real {
        trial: u64,
        eigenvalues: Vec<f64>,
        outliers: usize,
    },
    /// Eigenvalues of `S^{-1} T` as a general matrix.
    Complex {
        trial: u64,
        eigenvalues: Vec<Complex64>,
        outliers: usize,
    },
    Failed {
        trial: u64,
        reason: String,
    },
}

impl SpectrumTrial {
    pub fn trial(&self) -> u64 {
        match self {
            SpectrumTrial::Real { trial, .. }
            | SpectrumTrial::Complex { trial, .. }
            | SpectrumTrial::Failed { trial, .. } => *trial,
        }
    }

    pub fn outliers(&self) -> Option<usize> {
        match self {
            SpectrumTrial::Real { outliers, .. } | SpectrumTrial::Complex { outliers, .. } => {
                Some(*outliers)
            }
            SpectrumTrial::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumOutput {
    pub n: usize,
    pub epsilon: f64,
    pub complex: bool,
    pub trials: Vec<SpectrumTrial>,
}

impl SpectrumOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(if self.complex {
            "t,index,re,im\n"
        } else {
            "t,index,eigenvalue\n"
        });
        for trial in &self.trials {
            match trial {
                SpectrumTrial::Real {
                    trial, eigenvalues, ..
                } => {
                    for (i, l) in eigenvalues.iter().enumerate() {
                        writeln!(out, "{trial},{},{}", i + 1, fmt_float(*l)).unwrap();
                    }
                }
                SpectrumTrial::Complex {
                    trial, eigenvalues, ..
                } => {
                    for (i, l) in eigenvalues.iter().enumerate() {
                        writeln!(
                            out,
                            "{trial},{},{},{}",
                            i + 1,
                            fmt_float(l.re),
                            fmt_float(l.im)
                        )
                        .unwrap();
                    }
                }
                SpectrumTrial::Failed { trial, .. } if self.complex => {
                    writeln!(out, "{trial},-1,NaN,NaN").unwrap()
                }
                SpectrumTrial::Failed { trial, .. } => writeln!(out, "{trial},-1,NaN").unwrap(),
            }
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut out = String::new();
        for trial in &self.trials {
            match trial {
                SpectrumTrial::Failed { trial, reason } => {
                    writeln!(out, "t = {trial}: failed ({reason})")
                }
                other => writeln!(
                    out,
                    "t = {}: {} outliers outside |lambda - 1| <= {}",
                    other.trial(),
                    other.outliers().unwrap_or_default(),
                    self.epsilon
                ),
            }
            .unwrap();
        }
        out
    }

    pub fn series(&self) -> Vec<Series> {
        self.trials
            .iter()
            .filter_map(|trial| match trial {
                SpectrumTrial::Real {
                    trial, eigenvalues, ..
                } => Some(Series::new(
                    format!("t = {trial}"),
                    eigenvalues.iter().map(|&l| (l, 0.0)).collect(),
                )),
                SpectrumTrial::Complex {
                    trial, eigenvalues, ..
                } => Some(Series::new(
                    format!("t = {trial}"),
                    eigenvalues.iter().map(|l| (l.re, l.im)).collect(),
                )),
                SpectrumTrial::Failed { .. } => None,
            })
            .collect()
    }
}

fn spectrum_trial(cfg: &ExperimentConfig, n: usize, trial: u64) -> Result<SpectrumTrial> {
    let c = cfg.coefficients(n, trial)?;
    let t = ToeplitzSystem::new(&c, n)?;
    let s = CirculantOperator::strang(&c, n, cfg.even_rule)?;
    if cfg.complex {
        return Ok(match spectral::preconditioned_eigenvalues_general(&t, &s) {
            Ok(eigenvalues) => {
                let outliers = eigenvalues
                    .iter()
                    .filter(|l| (*l - 1.0).norm() > cfg.epsilon)
                    .count();
                SpectrumTrial::Complex {
                    trial,
                    eigenvalues,
                    outliers,
                }
            }
            Err(e) => SpectrumTrial::Failed {
                trial,
                reason: e.to_string(),
            },
        });
    }
    if !s.is_positive_definite() {
        return Ok(SpectrumTrial::Failed {
            trial,
            reason: "S is not positive definite".to_string(),
        });
    }
    Ok(
        match spectral::preconditioned_spectrum(&t, &s, cfg.epsilon) {
            Ok(report) => {
                debug_assert_eq!(
                    report.cluster_outliers,
                    clustering_count(&report.eigenvalues, 1.0, cfg.epsilon)
                );
                SpectrumTrial::Real {
                    trial,
                    outliers: report.cluster_outliers,
                    eigenvalues: report.eigenvalues,
                }
            }
            Err(e) => SpectrumTrial::Failed {
                trial,
                reason: e.to_string(),
            },
        },
    )
}

/// Eigenvalues of `S^{-1} T` for each trial.
pub fn run_spectrum(cfg: &ExperimentConfig) -> Result<SpectrumOutput> {
    let n = cfg.dense_n()?;
    let trials = (1..=cfg.trials as u64)
        .into_par_iter()
        .map(|trial| spectrum_trial(cfg, n, trial).with_context(|| format!("trial {trial}")))
        .collect::<Result<_>>()?;
    Ok(SpectrumOutput {
        n,
        epsilon: cfg.epsilon,
        complex: cfg.complex,
        trials,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquidistRow {
    pub n: usize,
    pub function: TestFunction,
    pub discrepancy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquidistOutput {
    pub rows: Vec<EquidistRow>,
}

impl EquidistOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,test_function,discrepancy\n");
        for r in &self.rows {
            writeln!(out, "{},{},{}", r.n, r.function, fmt_float(r.discrepancy)).unwrap();
        }
        out
    }

    /// Discrepancy for `function` at `n`, if present.
    pub fn get(&self, n: usize, function: TestFunction) -> Option<f64> {
        self.rows
            .iter()
            .find(|r| r.n == n && r.function == function)
            .map(|r| r.discrepancy)
    }

    /// One line per monomial; the log test function changes with `n` and is left out.
    pub fn series(&self) -> Vec<Series> {
        (0..=4)
            .map(|k| {
                let f = TestFunction::Monomial(k);
                let points = self
                    .rows
                    .iter()
                    .filter(|r| r.function == f)
                    .map(|r| (r.n as f64, r.discrepancy))
                    .collect();
                Series::new(f.to_string(), points)
            })
            .collect()
    }
}

const EQUIDIST_MAX_DEGREE: u32 = 4;

fn equidist_rows(cfg: &ExperimentConfig, n: usize, bandwidth: usize) -> Result<Vec<EquidistRow>> {
    let c = cfg.coefficients_banded(n, bandwidth, cfg.trial)?;
    let t = ToeplitzSystem::new(&c, n)?;
    let eigs = spectral::toeplitz_eigenvalues(&t)?;
    let grid = c.evaluate_grid(&equidistribution_grid(n));
    let bound = value_bound(&eigs, &grid);
    let mut functions: Vec<TestFunction> = (0..=EQUIDIST_MAX_DEGREE.min(MAX_MONOMIAL_DEGREE))
        .map(TestFunction::Monomial)
        .collect();
    if bound > 0.0 {
        functions.push(TestFunction::Log1p(1.0 / (2.0 * bound)));
    }
    functions
        .into_iter()
        .map(|function| {
            Ok(EquidistRow {
                n,
                function,
                discrepancy: discrepancy_from_values(&eigs, &grid, function)?,
            })
        })
        .collect()
}

/// Discrepancies between sorted eigenvalues and sorted symbol samples over a ladder of `n`.
/// The symbol is held fixed across the ladder at bandwidth `max(n) - 1`.
pub fn run_equidist(cfg: &ExperimentConfig) -> Result<EquidistOutput> {
    cfg.validate()?;
    if let Some(&n) = cfg
        .n
        .iter()
        .find(|&&n| n > toeplitz_pcg::toeplitz::DEFAULT_DENSE_CAP)
    {
        anyhow::bail!("dimension {n} exceeds the dense cap");
    }
    let bandwidth = cfg.n.iter().max().copied().unwrap_or(1) - 1;
    let per_n: Vec<Vec<EquidistRow>> = cfg
        .n
        .par_iter()
        .map(|&n| equidist_rows(cfg, n, bandwidth).with_context(|| format!("n = {n}")))
        .collect::<Result<_>>()?;
    Ok(EquidistOutput {
        rows: per_n.into_iter().flatten().collect(),
    })
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    pub n: usize,
    pub report: SolveReport,
}

impl SolveOutput {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iteration,residual_ratio\n");
        for (j, r) in self.report.residual_ratios.iter().enumerate() {
            writeln!(out, "{j},{}", fmt_float(*r)).unwrap();
        }
        out
    }

    pub fn summary(&self) -> String {
        format!(
            "n = {}: {} iterations, converged = {}, final ratio {:e}, {:.3} ms",
            self.n,
            self.report.iterations,
            self.report.converged,
            self.report
                .residual_ratios
                .last()
                .copied()
                .unwrap_or(f64::NAN),
            self.report.wall_time * 1e3
        )
    }

    pub fn series(&self) -> Vec<Series> {
        let points = self
            .report
            .residual_ratios
            .iter()
            .enumerate()
            .filter(|(_, r)| **r > 0.0)
            .map(|(j, r)| (j as f64, r.log10()))
            .collect();
        vec![Series::new("log10 residual ratio", points)]
    }
}

/// One solve with its residual history.
pub fn run_solve(cfg: &ExperimentConfig) -> Result<SolveOutput> {
    let n = cfg.single_n()?;
    let c = cfg.coefficients(n, cfg.trial)?;
    let t = ToeplitzSystem::new(&c, n)?;
    let b = make_rhs(n, cfg.rhs, cfg.seed)?;
    let opts = solve_options(cfg, n);
    let report = match cfg.preconditioner {
        PreconditionerKind::Strang => {
            let s = CirculantOperator::strang(&c, n, cfg.even_rule)?;
            pcg_solve_with(&t, &s, &b, opts)?
        }
        PreconditionerKind::None => pcg_solve_with(&t, &IdentityPreconditioner, &b, opts)?,
    };
    Ok(SolveOutput { n, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SymbolKind;

    #[test]
    fn mean_skips_failures() {
        let (m, f) = mean_of([Some(2), None, Some(4)].into_iter());
        assert_eq!((m, f), (3.0, 1));
        assert!(mean_of([None].into_iter()).0.is_nan());
    }

    #[test]
    fn circulant_symbol_converges_in_one_step() {
        let cfg = ExperimentConfig {
            symbol: SymbolKind::Circulant,
            trials: 1,
            ..Default::default()
        };
        let out = run_fig1(&cfg).unwrap();
        assert_eq!(out.trials[0].pcg, Some(1));
    }

    #[test]
    fn failed_rows_use_minus_one() {
        let out = Fig1Output {
            n: 3,
            trials: vec![TrialOutcome {
                trial: 1,
                cg: Some(3),
                pcg: None,
                warnings: vec![],
            }],
        };
        assert_eq!(out.to_csv(), "t,iter_cg,iter_pcg\n1,3,-1\n");
    }
}
