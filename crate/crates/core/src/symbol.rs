//! Random-phase generating functions.
//!
//! A [`SymbolModel`] pairs deterministic magnitudes `a_k` with a reproducible
//! phase stream. Each trial index yields one realization `c_k = a_k exp(i phi_k)`
//! as a [`CoefficientSequence`], whose symbol is
//!
//! ```text
//! f(theta) = c_0 + 2 Re( sum_{k=1..K} c_k exp(i k theta) )
//! ```
//!
//! with `c_{-k} = conj(c_k)` implied.

use std::f64::consts::PI;
use std::fmt::Write as _;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Golden-ratio increment of splitmix64.
const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// splitmix64 finalizer multipliers (Stafford's "Mix13").
const MIX_1: u64 = 0xBF58_476D_1CE4_E5B9;
const MIX_2: u64 = 0x94D0_49BB_1331_11EB;

/// splitmix64 output finalizer.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(MIX_1);
    z = (z ^ (z >> 27)).wrapping_mul(MIX_2);
    z ^ (z >> 31)
}

fn absorb(state: u64, word: u64) -> u64 {
    mix64(state.wrapping_add(GAMMA) ^ word)
}

/// Counter-based 64-bit hash of `(seed, stream, counter)`.
///
/// `state = absorb(absorb(seed, stream), counter)` with
/// `absorb(h, w) = mix64((h + GAMMA) ^ w)`.
pub fn counter_hash(seed: u64, stream: u64, counter: u64) -> u64 {
    absorb(absorb(seed, stream), counter)
}

/// Standard normal variate keyed on `(seed, stream, counter)` via Box-Muller.
///
/// The two uniforms come from `absorb(state, 0)` and `absorb(state, 1)`,
/// each reduced to 53 bits; the first lies in `(0, 1]` so its log is finite.
pub fn standard_normal(seed: u64, stream: u64, counter: u64) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    let state = counter_hash(seed, stream, counter);
    let u1 = ((absorb(state, 0) >> 11) + 1) as f64 * SCALE;
    let u2 = (absorb(state, 1) >> 11) as f64 * SCALE;
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Gaussian phase `phi_k` of realization `trial`. `k = 0` is rejected because
/// the phase of `c_0` is pinned to zero.
pub fn gaussian_phase(seed: u64, trial: u64, k: u64) -> Result<f64> {
    if k == 0 {
        return Err(invalid("phase index k must be at least 1"));
    }
    Ok(standard_normal(seed, trial, k))
}

/// Hermitian coefficient sequence `c_0 … c_K`.
///
/// `finite_support` marks sequences whose coefficients beyond `K` are exactly
/// zero. Sequences truncated from an infinite model leave it unset, and then
/// operators of dimension `N` require `K >= N - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSequence {
    coeffs: Vec<Complex64>,
    finite_support: bool,
}

impl CoefficientSequence {
    pub fn new(coeffs: Vec<Complex64>, finite_support: bool) -> Result<Self> {
        let Some(c0) = coeffs.first() else {
            return Err(invalid("coefficient sequence needs at least c_0"));
        };
        if c0.im != 0.0 {
            return Err(invalid(format!("c_0 must be real, got {c0}")));
        }
        if let Some(k) = coeffs
            .iter()
            .position(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(invalid(format!("coefficient c_{k} is not finite")));
        }
        Ok(Self {
            coeffs,
            finite_support,
        })
    }

    /// Finite-support sequence from real coefficients.
    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(
            coeffs.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
            true,
        )
    }

    pub fn bandwidth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn has_finite_support(&self) -> bool {
        self.finite_support
    }

    /// `c_0 … c_K`.
    pub fn nonneg_half(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// `c_k` for any signed `k`; zero outside the stored band.
    pub fn get(&self, k: i64) -> Complex64 {
        let idx = k.unsigned_abs() as usize;
        match self.coeffs.get(idx) {
            Some(&c) if k >= 0 => c,
            Some(&c) => c.conj(),
            None => Complex64::new(0.0, 0.0),
        }
    }

    /// True when the sequence can populate a Toeplitz operator of dimension `n`.
    pub fn covers_dimension(&self, n: usize) -> bool {
        self.finite_support || self.bandwidth() + 1 >= n
    }

    /// `f(theta) = c_0 + 2 Re(sum_k c_k e^{ik theta})`.
    pub fn evaluate(&self, theta: f64) -> f64 {
        let tail: f64 = self.coeffs[1..]
            .iter()
            .enumerate()
            .map(|(i, c)| (c * Complex64::cis((i + 1) as f64 * theta)).re)
            .sum();
        self.coeffs[0].re + 2.0 * tail
    }

    /// Values of the symbol at each angle.
    pub fn evaluate_grid(&self, thetas: &[f64]) -> Vec<f64> {
        thetas.iter().map(|&t| self.evaluate(t)).collect()
    }

    /// CSV with header `k,re,im`, one row per stored coefficient.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,re,im\n");
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{k},{:.16e},{:.16e}", c.re, c.im);
        }
        out
    }

    /// Parses the format written by [`Self::to_csv`]. Rows must be contiguous from `k = 0`.
    pub fn from_csv(text: &str, finite_support: bool) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (line_no == 0 && line.starts_with('k')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 3 {
                return Err(invalid(format!("line {}: expected k,re,im", line_no + 1)));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("line {}: {e}", line_no + 1)))
            };
            let k: usize = fields[0]
                .trim()
                .parse()
                .map_err(|e| invalid(format!("line {}: {e}", line_no + 1)))?;
            if k != coeffs.len() {
                return Err(invalid(format!(
                    "line {}: expected k = {}",
                    line_no + 1,
                    coeffs.len()
                )));
            }
            coeffs.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
        }
        Self::new(coeffs, finite_support)
    }
}

/// Deterministic magnitudes `a_k`.
#[derive(Debug, Clone, PartialEq)]
pub enum Magnitudes {
    /// `a_0 = constant`, `a_k = numerator / (1 + k)^exponent` for `k > 0`.
    PowerLaw {
        constant: f64,
        numerator: Complex64,
        exponent: f64,
    },
    /// Explicit `a_0 … a_K`, zero beyond.
    Explicit(Vec<Complex64>),
}

impl Magnitudes {
    pub fn get(&self, k: usize) -> Complex64 {
        match self {
            Magnitudes::PowerLaw {
                constant,
                numerator,
                exponent,
            } => {
                if k == 0 {
                    Complex64::new(*constant, 0.0)
                } else {
                    numerator / (1.0 + k as f64).powf(*exponent)
                }
            }
            Magnitudes::Explicit(a) => a.get(k).copied().unwrap_or_default(),
        }
    }
}

/// How the phases `phi_k` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhaseLaw {
    /// Independent standard normals per `(trial, k)`.
    Gaussian,
    /// All phases zero; reproduces the deterministic coefficients.
    Zero,
}

/// Factory of random coefficient realizations.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolModel {
    magnitudes: Magnitudes,
    phases: PhaseLaw,
    seed: u64,
    bandwidth: usize,
}

impl SymbolModel {
    pub fn new(
        magnitudes: Magnitudes,
        phases: PhaseLaw,
        seed: u64,
        bandwidth: usize,
    ) -> Result<Self> {
        match &magnitudes {
            Magnitudes::PowerLaw {
                constant,
                numerator,
                exponent,
            } => {
                if !constant.is_finite() || !numerator.re.is_finite() || !numerator.im.is_finite() {
                    return Err(invalid("power-law magnitudes must be finite"));
                }
                // p > 1 keeps sum |a_k| finite
                if exponent.is_nan() || *exponent <= 1.0 {
                    return Err(invalid(format!(
                        "decay exponent must exceed 1, got {exponent}"
                    )));
                }
            }
            Magnitudes::Explicit(a) => {
                let Some(a0) = a.first() else {
                    return Err(invalid("explicit magnitudes need a_0"));
                };
                if a0.im != 0.0 {
                    return Err(invalid("a_0 must be real"));
                }
                if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                    return Err(invalid("explicit magnitudes must be finite"));
                }
            }
        }
        Ok(Self {
            magnitudes,
            phases,
            seed,
            bandwidth,
        })
    }

    /// `a_0 = 2`, `a_k = (1 + i) / (1 + k)^1.1`, Gaussian phases.
    pub fn random_phase(seed: u64, bandwidth: usize) -> Self {
        Self {
            magnitudes: Magnitudes::PowerLaw {
                constant: 2.0,
                numerator: Complex64::new(1.0, 1.0),
                exponent: 1.1,
            },
            phases: PhaseLaw::Gaussian,
            seed,
            bandwidth,
        }
    }

    pub fn with_phases(mut self, phases: PhaseLaw) -> Self {
        self.phases = phases;
        self
    }

    pub fn with_bandwidth(mut self, bandwidth: usize) -> Self {
        self.bandwidth = bandwidth;
        self
    }

    pub fn magnitudes(&self) -> &Magnitudes {
        &self.magnitudes
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    pub fn phases(&self) -> PhaseLaw {
        self.phases
    }

    /// `c_0 = a_0`, `c_k = a_k exp(i phi_k(trial))` for `1 <= k <= K`.
    pub fn realize(&self, trial: u64) -> CoefficientSequence {
        let finite_support = match &self.magnitudes {
            Magnitudes::Explicit(a) => self.bandwidth + 1 >= a.len(),
            Magnitudes::PowerLaw { .. } => false,
        };
        let coeffs = (0..=self.bandwidth)
            .map(|k| {
                let a = self.magnitudes.get(k);
                match self.phases {
                    _ if k == 0 => a,
                    PhaseLaw::Zero => a,
                    PhaseLaw::Gaussian => {
                        // |a e^{i phi}| = |a| up to rounding of the rotation
                        a * Complex64::cis(standard_normal(self.seed, trial, k as u64))
                    }
                }
            })
            .collect();
        CoefficientSequence {
            coeffs,
            finite_support,
        }
    }

    /// Upper bound on `sum_{k > K} |a_k|`.
    ///
    /// For the power law this is the integral comparison
    /// `|numerator| (1 + K)^(1 - p) / (p - 1)`; explicit magnitudes sum exactly.
    pub fn wiener_tail(&self, k: usize) -> f64 {
        match &self.magnitudes {
            Magnitudes::PowerLaw {
                numerator,
                exponent,
                ..
            } => {
                if exponent.is_infinite() {
                    return 0.0;
                }
                numerator.norm() * (1.0 + k as f64).powf(1.0 - exponent) / (exponent - 1.0)
            }
            Magnitudes::Explicit(a) => a.iter().skip(k + 1).map(|z| z.norm()).sum(),
        }
    }

    /// Smallest `K <= cap` with `wiener_tail(K) < tol`, if any.
    pub fn bandwidth_for_tail(&self, tol: f64, cap: usize) -> Option<usize> {
        if self.wiener_tail(cap) >= tol {
            return None;
        }
        // tail is nonincreasing in K
        let (mut lo, mut hi) = (0usize, cap);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.wiener_tail(mid) < tol {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Some(lo)
    }
}
