//! Summaries of a compression spectrum and the logistic-map sweep.

use num_traits::{Float, ToPrimitive};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::etc::{quantize, spectrum_trace};
use crate::scalar::Scalar;
use crate::signal::{gen_logistic, lyapunov_logistic, DEFAULT_TRANSIENT, DEFAULT_X0};
use crate::spectrum::{CompressionRatio, CompressionSpectrum, LOG2_EPSILON};

/// Number of scales whose ratio compresses, i.e. `log2 CR(s) > 1e-12`.
pub fn bandwidth<R: CompressionRatio>(spec: &CompressionSpectrum<R>) -> usize {
    spec.iter()
        .filter(|(_, cr)| cr.log2().to_f64().is_some_and(|l| l > LOG2_EPSILON))
        .count()
}

/// Least-squares line through `(log2 s, log2 CR(s))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit<T> {
    pub slope: T,
    pub intercept: T,
    pub r_squared: T,
    pub n_points: usize,
}

/// Fits a straight line to the log-log spectrum over its stored points.
pub fn loglog_fit<R: CompressionRatio>(
    spec: &CompressionSpectrum<R>,
) -> Result<LogLogFit<R::Real>> {
    let pts: Vec<(R::Real, R::Real)> = spec
        .log2_points()
        .into_iter()
        .map(|(s, l)| (<R::Real as Scalar>::from_count(s).log2(), l))
        .collect();
    fit_line(&pts)
}

/// Ordinary least squares for `y = slope * x + intercept`.
pub fn fit_line<T: Scalar>(pts: &[(T, T)]) -> Result<LogLogFit<T>> {
    if pts.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: pts.len(),
        });
    }
    let n = T::from_count(pts.len());
    let mx = pts.iter().fold(T::zero(), |a, p| a + p.0) / n;
    let my = pts.iter().fold(T::zero(), |a, p| a + p.1) / n;
    let (sxx, sxy, syy) = pts.iter().fold((T::zero(), T::zero(), T::zero()), |(xx, xy, yy), &(x, y)| {
        let (dx, dy) = (x - mx, y - my);
        (xx + dx * dx, xy + dx * dy, yy + dy * dy)
    });
    if !(sxx > T::zero()) {
        return Err(Error::invalid("fit needs at least two distinct abscissae"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = pts.iter().fold(T::zero(), |a, &(x, y)| {
        let e = y - (slope * x + intercept);
        a + e * e
    });
    let r_squared = if syy > T::zero() {
        (T::one() - ss_res / syy).max(T::zero()).min(T::one())
    } else {
        T::one()
    };
    Ok(LogLogFit {
        slope,
        intercept,
        r_squared,
        n_points: pts.len(),
    })
}

/// Parameters of a logistic-map bifurcation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub a_min: f64,
    pub a_max: f64,
    pub step: f64,
    pub length: usize,
    pub bins: usize,
    pub x0: f64,
    pub transient: usize,
    pub lyapunov_n: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            a_min: 2.9,
            a_max: 4.0,
            step: 0.01,
            length: 2000,
            bins: 8,
            x0: DEFAULT_X0,
            transient: DEFAULT_TRANSIENT,
            lyapunov_n: 100_000,
        }
    }
}

impl SweepConfig {
    /// Grid `a_min, a_min + step, ...` up to `a_max`, with values rounded to
    /// twelve decimals so that e.g. 2.9 + 110 * 0.01 lands on 4.0.
    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.a_min < self.a_max) {
            return Err(Error::invalid(format!(
                "a_min ({}) must be below a_max ({})",
                self.a_min, self.a_max
            )));
        }
        if !(self.step > 0.0) || !self.step.is_finite() {
            return Err(Error::invalid(format!("step must be positive, got {}", self.step)));
        }
        let count = ((self.a_max - self.a_min) / self.step + 1e-9).floor() as usize + 1;
        Ok((0..count)
            .map(|i| {
                let a = self.a_min + i as f64 * self.step;
                ((a * 1e12).round() / 1e12).min(self.a_max)
            })
            .collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub a: f64,
    /// Nats per iteration.
    pub lyapunov: f64,
    pub bandwidth: usize,
}

fn sweep_point(a: f64, cfg: &SweepConfig) -> Result<SweepRow> {
    let series = gen_logistic(a, cfg.x0, cfg.length, cfg.transient)?;
    let trace = spectrum_trace(quantize(&series, cfg.bins)?);
    let spec = trace.spectrum::<f64>();
    let lyapunov = lyapunov_logistic(a, cfg.x0, cfg.lyapunov_n, cfg.transient)?;
    Ok(SweepRow {
        a,
        lyapunov,
        bandwidth: bandwidth(&spec),
    })
}

/// Spectrum bandwidth and Lyapunov exponent across the parameter grid.
/// Grid points run in parallel; rows come back in grid order.
pub fn bifurcation_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let grid = cfg.grid()?;
    grid.par_iter().map(|&a| sweep_point(a, cfg)).collect()
}

#[cfg(test)]
mod tests {
    use num_rational::BigRational;

    use super::*;

    #[test]
    fn bandwidth_counts_points() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        let spec = CompressionSpectrum::from_points(10, [(2, r(10, 7)), (3, r(7, 4))]).unwrap();
        assert_eq!(bandwidth(&spec), 2);
        assert_eq!(bandwidth(&CompressionSpectrum::<f64>::new(10)), 0);
    }

    #[test]
    fn exact_power_law_fit() {
        let spec = CompressionSpectrum::from_points(100, [(2, 8.0f64), (4, 4.0), (8, 2.0)]).unwrap();
        let fit = loglog_fit(&spec).unwrap();
        assert!((fit.slope + 1.0).abs() < 1e-12);
        assert!((fit.intercept - 4.0).abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(fit.n_points, 3);
    }

    #[test]
    fn fit_needs_two_points() {
        let spec = CompressionSpectrum::from_points(100, [(2, 8.0)]).unwrap();
        assert!(matches!(
            loglog_fit(&spec),
            Err(Error::InsufficientData { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn flat_spectrum_fits_perfectly() {
        let spec = CompressionSpectrum::from_points(100, [(2, 3.0f32), (7, 3.0)]).unwrap();
        let fit = loglog_fit(&spec).unwrap();
        assert_eq!(fit.r_squared, 1.0);
        assert!(fit.slope.abs() < 1e-6);
    }

    #[test]
    fn grid_sizes() {
        let cfg = SweepConfig::default();
        let g = cfg.grid().unwrap();
        assert_eq!(g.len(), 111);
        assert_eq!(g[0], 2.9);
        assert_eq!(*g.last().unwrap(), 4.0);
        let bad = SweepConfig { a_min: 4.0, a_max: 3.0, ..SweepConfig::default() };
        assert!(bad.grid().is_err());
        let bad = SweepConfig { step: 0.0, ..SweepConfig::default() };
        assert!(bad.grid().is_err());
    }

    #[test]
    fn sweep_is_repeatable_and_ordered() {
        let cfg = SweepConfig {
            a_min: 3.5,
            a_max: 3.6,
            step: 0.02,
            length: 500,
            lyapunov_n: 2000,
            ..SweepConfig::default()
        };
        let rows = bifurcation_sweep(&cfg).unwrap();
        assert_eq!(rows.len(), 6);
        assert!(rows.windows(2).all(|w| w[0].a < w[1].a));
        assert_eq!(rows, bifurcation_sweep(&cfg).unwrap());
        assert!(rows.iter().all(|r| r.bandwidth < cfg.length));
    }
}
