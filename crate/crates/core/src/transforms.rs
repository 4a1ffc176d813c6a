//! Discrete Fourier transforms of arbitrary length.
//!
//! Conventions, relied on by every other module:
//!
//! ```text
//! forward:  X_j = sum_k x_k exp(-2 pi i j k / N)          (unnormalised)
//! inverse:  x_k = (1/N) sum_j X_j exp(+2 pi i j k / N)
//! ```
//!
//! Power-of-two lengths use an iterative radix-2 Cooley-Tukey transform. Every
//! other length goes through Bluestein's chirp-z reduction onto a power-of-two
//! convolution, so odd circulant sizes are diagonalised exactly.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{invalid, Result};

/// Precomputed transform of a fixed length.
#[derive(Debug, Clone)]
pub struct FftPlan {
    len: usize,
    kind: PlanKind,
}

#[derive(Debug, Clone)]
enum PlanKind {
    Radix2(Radix2),
    Bluestein(Box<Bluestein>),
}

#[derive(Debug, Clone)]
struct Radix2 {
    len: usize,
    // exp(-2 pi i k / len), k < len/2
    twiddles: Vec<Complex64>,
    bit_reverse: Vec<usize>,
}

#[derive(Debug, Clone)]
struct Bluestein {
    inner: Radix2,
    // exp(-i pi k^2 / N), k < N
    chirp: Vec<Complex64>,
    // forward transform of the conjugate chirp, wrapped to the inner length
    kernel: Vec<Complex64>,
}

impl Radix2 {
    fn new(len: usize) -> Self {
        debug_assert!(len.is_power_of_two());
        let twiddles = (0..len / 2)
            .map(|k| Complex64::cis(-2.0 * PI * k as f64 / len as f64))
            .collect();
        let bits = len.trailing_zeros();
        let bit_reverse = (0..len)
            .map(|i| {
                if bits == 0 {
                    0
                } else {
                    i.reverse_bits() >> (usize::BITS - bits)
                }
            })
            .collect();
        Self {
            len,
            twiddles,
            bit_reverse,
        }
    }

    fn forward(&self, data: &mut [Complex64]) {
        let n = self.len;
        for i in 0..n {
            let j = self.bit_reverse[i];
            if i < j {
                data.swap(i, j);
            }
        }
        let mut half = 1;
        while half < n {
            let stride = n / (2 * half);
            for start in (0..n).step_by(2 * half) {
                for k in 0..half {
                    let w = self.twiddles[k * stride];
                    let a = data[start + k];
                    let b = data[start + k + half] * w;
                    data[start + k] = a + b;
                    data[start + k + half] = a - b;
                }
            }
            half *= 2;
        }
    }
}

impl Bluestein {
    fn new(len: usize) -> Self {
        let inner_len = (2 * len - 1).next_power_of_two();
        let inner = Radix2::new(inner_len);
        let modulus = 2 * len as u128;
        let chirp: Vec<Complex64> = (0..len)
            .map(|k| {
                // k^2 mod 2N keeps the angle small and exact
                let k2 = (k as u128 * k as u128) % modulus;
                Complex64::cis(-PI * k2 as f64 / len as f64)
            })
            .collect();
        let mut kernel = vec![Complex64::new(0.0, 0.0); inner_len];
        kernel[0] = chirp[0].conj();
        for k in 1..len {
            kernel[k] = chirp[k].conj();
            kernel[inner_len - k] = chirp[k].conj();
        }
        inner.forward(&mut kernel);
        Self {
            inner,
            chirp,
            kernel,
        }
    }

    fn forward(&self, data: &mut [Complex64]) {
        let m = self.inner.len;
        let mut work = vec![Complex64::new(0.0, 0.0); m];
        for (w, (x, c)) in work.iter_mut().zip(data.iter().zip(&self.chirp)) {
            *w = x * c;
        }
        self.inner.forward(&mut work);
        for (w, k) in work.iter_mut().zip(&self.kernel) {
            // conj trick below turns the forward pass into an inverse
            *w = (*w * k).conj();
        }
        self.inner.forward(&mut work);
        let scale = 1.0 / m as f64;
        for (out, (w, c)) in data.iter_mut().zip(work.iter().zip(&self.chirp)) {
            *out = w.conj() * scale * c;
        }
    }
}

impl FftPlan {
    /// Plans a transform of length `len` (must be at least 1).
    pub fn new(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(invalid("transform length must be at least 1"));
        }
        let kind = if len.is_power_of_two() {
            PlanKind::Radix2(Radix2::new(len))
        } else {
            PlanKind::Bluestein(Box::new(Bluestein::new(len)))
        };
        Ok(Self { len, kind })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// In-place forward transform. Panics if `data.len() != self.len()`.
    pub fn forward(&self, data: &mut [Complex64]) {
        assert_eq!(data.len(), self.len, "buffer length does not match plan");
        match &self.kind {
            PlanKind::Radix2(p) => p.forward(data),
            PlanKind::Bluestein(p) => p.forward(data),
        }
    }

    /// In-place normalised inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        for z in data.iter_mut() {
            *z = z.conj();
        }
        self.forward(data);
        let scale = 1.0 / self.len as f64;
        for z in data.iter_mut() {
            *z = z.conj() * scale;
        }
    }
}

fn check_input(x: &[Complex64]) -> Result<()> {
    if x.is_empty() {
        return Err(invalid("transform input must be non-empty"));
    }
    if let Some(i) = x
        .iter()
        .position(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(invalid(format!("non-finite transform input at index {i}")));
    }
    Ok(())
}

/// Unnormalised forward DFT with the negative exponent.
pub fn dft_forward(x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_input(x)?;
    let plan = FftPlan::new(x.len())?;
    let mut out = x.to_vec();
    plan.forward(&mut out);
    Ok(out)
}

/// Inverse DFT with the `1/N` normalisation.
pub fn dft_inverse(x: &[Complex64]) -> Result<Vec<Complex64>> {
    check_input(x)?;
    let plan = FftPlan::new(x.len())?;
    let mut out = x.to_vec();
    plan.inverse(&mut out);
    Ok(out)
}
