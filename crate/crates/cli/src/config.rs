use anyhow::{bail, ensure, Result};
use toeplitz_pcg::toeplitz::DEFAULT_DENSE_CAP;
use toeplitz_pcg::{
    CirculantOperator, CoefficientSequence, EvenRule, PhaseLaw, RhsKind, SymbolModel,
};

pub const DEFAULT_SEED: u64 = 20240101;

/// Generating function used to build each trial's system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SymbolKind {
    /// `a_0 = 2`, `a_k = (1+i)/(1+k)^1.1` with Gaussian phases per trial.
    #[default]
    RandomPhase,
    /// Same magnitudes, all phases zero. Identical for every trial.
    ZeroPhase,
    /// The Strang circulant of the random-phase realization, read back as a Toeplitz
    /// symbol, so that `T` is circulant and `S = T`.
    Circulant,
    /// `f = 2`.
    Constant,
    /// `f = 2 + 2 cos(theta)`.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IndefinitePolicy {
    /// Run the recurrence on indefinite systems; only breakdown or
    /// non-convergence marks a trial as failed.
    #[default]
    Solve,
    /// Check `T` and `S` for positive definiteness and skip trials that are not.
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreconditionerKind {
    #[default]
    Strang,
    None,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    /// One dimension, or a ladder for `equidist`.
    pub n: Vec<usize>,
    /// Half-sizes for `fig2`; each gives `n = 2m + 1`.
    pub m_values: Vec<usize>,
    pub trials: usize,
    /// Trial index used by single-system commands.
    pub trial: u64,
    pub seed: u64,
    pub tol: f64,
    /// Defaults to `4 n`.
    pub max_iter: Option<usize>,
    pub even_rule: EvenRule,
    pub rhs: RhsKind,
    pub symbol: SymbolKind,
    pub indefinite: IndefinitePolicy,
    pub preconditioner: PreconditionerKind,
    pub epsilon: f64,
    /// Spectrum of the general (possibly non-Hermitian) product `S^{-1} T`.
    pub complex: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: vec![65],
            m_values: vec![10, 30, 60, 120],
            trials: 1,
            trial: 1,
            seed: DEFAULT_SEED,
            tol: 1e-10,
            max_iter: None,
            even_rule: EvenRule::Average,
            rhs: RhsKind::Ones,
            symbol: SymbolKind::RandomPhase,
            indefinite: IndefinitePolicy::Solve,
            preconditioner: PreconditionerKind::Strang,
            epsilon: 0.05,
            complex: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(
            self.tol > 0.0 && self.tol.is_finite(),
            "tol must be positive, got {}",
            self.tol
        );
        ensure!(
            self.epsilon > 0.0 && self.epsilon.is_finite(),
            "epsilon must be positive, got {}",
            self.epsilon
        );
        ensure!(!self.n.is_empty(), "at least one dimension is required");
        if let Some(&n) = self.n.iter().find(|&&n| n < 2) {
            bail!("dimension must be at least 2, got {n}");
        }
        if self.max_iter == Some(0) {
            bail!("max-iter must be positive");
        }
        Ok(())
    }

    pub(crate) fn single_n(&self) -> Result<usize> {
        self.validate()?;
        match self.n.as_slice() {
            [n] => Ok(*n),
            _ => bail!("this command takes exactly one dimension, got {:?}", self.n),
        }
    }

    pub(crate) fn dense_n(&self) -> Result<usize> {
        let n = self.single_n()?;
        ensure!(
            n <= DEFAULT_DENSE_CAP,
            "dimension {n} exceeds the dense cap {DEFAULT_DENSE_CAP}"
        );
        Ok(n)
    }

    pub(crate) fn max_iter_for(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(4 * n)
    }

    /// Coefficients for trial `trial` at dimension `n`, truncated at bandwidth `n - 1`.
    pub fn coefficients(&self, n: usize, trial: u64) -> Result<CoefficientSequence> {
        self.coefficients_banded(n, n - 1, trial)
    }

    /// As [`Self::coefficients`] with an explicit bandwidth (at least `n - 1`).
    pub fn coefficients_banded(
        &self,
        n: usize,
        bandwidth: usize,
        trial: u64,
    ) -> Result<CoefficientSequence> {
        ensure!(
            bandwidth + 1 >= n,
            "bandwidth {bandwidth} is too small for dimension {n}"
        );
        let model = SymbolModel::random_phase(self.seed, bandwidth);
        Ok(match self.symbol {
            SymbolKind::RandomPhase => model.realize(trial),
            SymbolKind::ZeroPhase => model.with_phases(PhaseLaw::Zero).realize(trial),
            SymbolKind::Circulant => {
                let s = CirculantOperator::strang(&model.realize(trial), n, self.even_rule)?;
                CoefficientSequence::new(s.first_column().to_vec(), true)?
            }
            SymbolKind::Constant => CoefficientSequence::from_real(&[2.0])?,
            SymbolKind::Cosine => CoefficientSequence::from_real(&[2.0, 1.0])?,
        })
    }
}
