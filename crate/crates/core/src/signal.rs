//! Test signals: repeating patterns, sinusoids, logistic-map orbits,
//! uniform and pink noise, plus the logistic-map Lyapunov exponent.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Generator behind every seeded signal. Recorded in output metadata.
pub const RNG_ALGORITHM: &str = "chacha20 (rand_chacha 0.9)";

pub const DEFAULT_X0: f64 = 0.1;
pub const DEFAULT_TRANSIENT: usize = 1000;

pub(crate) fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

fn check_length(length: usize, min: usize) -> Result<()> {
    if length < min {
        return Err(Error::invalid(format!(
            "length must be at least {min}, got {length}"
        )));
    }
    Ok(())
}

fn check_logistic(a: f64, x0: f64) -> Result<()> {
    if !(0.0..=4.0).contains(&a) {
        return Err(Error::invalid(format!("map parameter a={a} outside [0, 4]")));
    }
    if !(x0 > 0.0 && x0 < 1.0) {
        return Err(Error::invalid(format!("initial condition x0={x0} outside (0, 1)")));
    }
    Ok(())
}

/// Cycles `pattern` to exactly `length` samples.
pub fn gen_repeating<T: Scalar>(pattern: &[T], length: usize) -> Result<Vec<T>> {
    if pattern.is_empty() {
        return Err(Error::invalid("empty pattern"));
    }
    check_length(length, 1)?;
    Ok(pattern.iter().copied().cycle().take(length).collect())
}

/// `amplitude * sin(2 pi w k / fs)` for `k = 0..length`.
///
/// The phase is reduced as `(k w) mod fs` before scaling, so whenever
/// `fs / w` is an integer the output repeats bit-for-bit with that period.
pub fn gen_sinusoid<T: Scalar>(w: T, fs: T, length: usize, amplitude: T) -> Result<Vec<T>> {
    if !(fs > T::zero()) || !fs.is_finite() {
        return Err(Error::invalid(format!("sampling rate must be positive, got {fs}")));
    }
    if !w.is_finite() {
        return Err(Error::invalid(format!("frequency must be finite, got {w}")));
    }
    check_length(length, 1)?;
    let (w64, fs64) = (w.to_f64().unwrap(), fs.to_f64().unwrap());
    Ok((0..length)
        .map(|k| {
            let cycles = (k as f64 * w64).rem_euclid(fs64) / fs64;
            amplitude * T::lit((std::f64::consts::TAU * cycles).sin())
        })
        .collect())
}

/// Orbit of `x -> a x (1 - x)` after discarding `transient` iterates.
///
/// At `a = 4` the start `x0 = 0.5` maps to 1 and then sticks at the fixed
/// point 0; the default `x0 = 0.1` avoids that orbit.
pub fn gen_logistic<T: Scalar>(a: T, x0: T, length: usize, transient: usize) -> Result<Vec<T>> {
    check_logistic(a.to_f64().unwrap_or(f64::NAN), x0.to_f64().unwrap_or(f64::NAN))?;
    check_length(length, 1)?;
    let mut x = x0;
    for _ in 0..transient {
        x = a * x * (T::one() - x);
    }
    let mut out = Vec::with_capacity(length);
    for _ in 0..length {
        out.push(x);
        x = a * x * (T::one() - x);
    }
    Ok(out)
}

/// Seeded samples from `U[0, 1)`.
pub fn gen_uniform<T: Scalar>(length: usize, seed: u64) -> Result<Vec<T>> {
    check_length(length, 1)?;
    let mut rng = rng(seed);
    Ok((0..length).map(|_| T::lit(rng.random::<f64>())).collect())
}

/// Seeded `1/f` noise by spectral shaping of white Gaussian noise.
///
/// Each positive-frequency bin `k` is scaled by `1/sqrt(k)` together with its
/// mirror `n - k`, the DC bin is zeroed, and the inverse transform is
/// normalized to zero mean and unit variance.
pub fn gen_pink<T: Scalar>(length: usize, seed: u64) -> Result<Vec<T>> {
    check_length(length, 2)?;
    let mut rng = rng(seed);
    let mut buf: Vec<Complex<T>> = (0..length)
        .map(|_| Complex::new(T::lit(rng.sample::<f64, _>(StandardNormal)), T::zero()))
        .collect();

    let mut planner = FftPlanner::<T>::new();
    planner.plan_fft_forward(length).process(&mut buf);

    buf[0] = Complex::new(T::zero(), T::zero());
    for k in 1..=length / 2 {
        let gain = T::one() / T::from_count(k).sqrt();
        buf[k] = buf[k] * gain;
        let mirror = length - k;
        if mirror != k {
            buf[mirror] = buf[mirror] * gain;
        }
    }

    planner.plan_fft_inverse(length).process(&mut buf);
    let mut out: Vec<T> = buf.into_iter().map(|c| c.re).collect();
    standardize(&mut out);
    Ok(out)
}

/// Shifts and scales to zero mean and unit population variance.
fn standardize<T: Scalar>(x: &mut [T]) {
    let n = T::from_count(x.len());
    let mean = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    let var = x.iter().fold(T::zero(), |a, &v| a + (v - mean) * (v - mean)) / n;
    let sd = var.sqrt();
    if sd > T::zero() {
        x.iter_mut().for_each(|v| *v = (*v - mean) / sd);
    } else {
        x.iter_mut().for_each(|v| *v = *v - mean);
    }
    // second pass removes the rounding residue of the first
    let mean2 = x.iter().fold(T::zero(), |a, &v| a + v) / n;
    x.iter_mut().for_each(|v| *v = *v - mean2);
}

/// Lyapunov exponent of the logistic map, `(1/n) sum ln|a (1 - 2 x_k)|`
/// over `n` iterates following `transient` discarded ones.
///
/// Iterates landing exactly on `x = 0.5` have zero derivative; their term is
/// skipped and the average runs over the remaining terms. If every term is
/// skipped the result is negative infinity.
pub fn lyapunov_logistic<T: Scalar>(a: T, x0: T, n: usize, transient: usize) -> Result<T> {
    check_logistic(a.to_f64().unwrap_or(f64::NAN), x0.to_f64().unwrap_or(f64::NAN))?;
    check_length(n, 1)?;
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut x = x0;
    for _ in 0..transient {
        x = a * x * (T::one() - x);
    }
    let mut sum = T::zero();
    let mut used = 0usize;
    for _ in 0..n {
        if x != half {
            sum = sum + (a * (T::one() - two * x)).abs().ln();
            used += 1;
        }
        x = a * x * (T::one() - x);
    }
    if used == 0 {
        return Ok(T::neg_infinity());
    }
    Ok(sum / T::from_count(used))
}

/// Signal family and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SignalKind {
    RepeatingPattern {
        pattern: Vec<f64>,
    },
    Sinusoid {
        frequency: f64,
        sampling_rate: f64,
        amplitude: f64,
    },
    Logistic {
        a: f64,
        x0: f64,
        transient: usize,
    },
    UniformNoise {
        seed: u64,
    },
    PinkNoise {
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSpec {
    #[serde(flatten)]
    pub kind: SignalKind,
    pub length: usize,
}

impl SignalSpec {
    pub fn new(kind: SignalKind, length: usize) -> Self {
        Self { kind, length }
    }

    pub fn generate<T: Scalar>(&self) -> Result<Vec<T>> {
        let n = self.length;
        match &self.kind {
            SignalKind::RepeatingPattern { pattern } => {
                let p: Vec<T> = pattern.iter().map(|&v| T::lit(v)).collect();
                gen_repeating(&p, n)
            }
            SignalKind::Sinusoid {
                frequency,
                sampling_rate,
                amplitude,
            } => gen_sinusoid(
                T::lit(*frequency),
                T::lit(*sampling_rate),
                n,
                T::lit(*amplitude),
            ),
            SignalKind::Logistic { a, x0, transient } => {
                gen_logistic(T::lit(*a), T::lit(*x0), n, *transient)
            }
            SignalKind::UniformNoise { seed } => gen_uniform(n, *seed),
            SignalKind::PinkNoise { seed } => gen_pink(n, *seed),
        }
    }

    /// Non-fatal parameter concerns, such as sampling below Nyquist.
    pub fn warnings(&self) -> Vec<String> {
        match &self.kind {
            SignalKind::Sinusoid {
                frequency,
                sampling_rate,
                ..
            } if *sampling_rate <= 2.0 * frequency.abs() => vec![format!(
                "sampling rate {sampling_rate} Hz does not exceed twice the frequency {frequency} Hz; the sinusoid aliases"
            )],
            _ => Vec::new(),
        }
    }

    /// Seeded generator identifier, if the signal is stochastic.
    pub fn rng_algorithm(&self) -> Option<&'static str> {
        match self.kind {
            SignalKind::UniformNoise { .. } | SignalKind::PinkNoise { .. } => Some(RNG_ALGORITHM),
            _ => None,
        }
    }
}
