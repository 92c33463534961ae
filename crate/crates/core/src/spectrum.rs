//! Per-scale compression ratios.

use std::collections::BTreeMap;
use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::etc::SubstitutionStep;
use crate::scalar::Scalar;

/// A scale counts as compressing when `log2 CR(s)` exceeds this.
pub const LOG2_EPSILON: f64 = 1e-12;

/// Value type for compression ratios.
///
/// Floating-point ratios multiply per-step ratios in their own precision;
/// [`BigRational`] keeps them exact.
pub trait CompressionRatio: Clone + Debug + PartialOrd + Send + Sync {
    /// Real type used for logarithms of this ratio.
    type Real: Scalar;

    fn from_lengths(before: usize, after: usize) -> Self;

    /// Product of two ratios.
    fn compose(&self, other: &Self) -> Self;

    fn log2(&self) -> Self::Real;

    fn to_f64(&self) -> f64;

    fn from_f64(x: f64) -> Option<Self>;
}

macro_rules! float_ratio {
    ($($t:ty),*) => {$(
        impl CompressionRatio for $t {
            type Real = $t;

            fn from_lengths(before: usize, after: usize) -> Self {
                before as $t / after as $t
            }

            fn compose(&self, other: &Self) -> Self {
                self * other
            }

            fn log2(&self) -> Self::Real {
                <$t>::log2(*self)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn from_f64(x: f64) -> Option<Self> {
                x.is_finite().then_some(x as $t)
            }
        }
    )*};
}

float_ratio!(f32, f64);

fn bigint_log2(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits <= 1000 {
        n.to_f64().map_or(f64::NAN, f64::log2)
    } else {
        let shift = bits - 64;
        (n >> shift).to_f64().map_or(f64::NAN, f64::log2) + shift as f64
    }
}

impl CompressionRatio for BigRational {
    type Real = f64;

    fn from_lengths(before: usize, after: usize) -> Self {
        BigRational::new(BigInt::from(before), BigInt::from(after))
    }

    fn compose(&self, other: &Self) -> Self {
        self * other
    }

    fn log2(&self) -> f64 {
        if !self.is_positive() {
            return f64::NEG_INFINITY;
        }
        bigint_log2(self.numer()) - bigint_log2(self.denom())
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
}

/// Map from scale `s >= 2` to the accumulated ratio `CR(s) > 1`.
/// Scales without substitutions are absent and read as `CR = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressionSpectrum<R> {
    points: BTreeMap<usize, R>,
    origin_length: usize,
}

impl<R: CompressionRatio> CompressionSpectrum<R> {
    pub fn new(origin_length: usize) -> Self {
        Self {
            points: BTreeMap::new(),
            origin_length,
        }
    }

    pub(crate) fn from_steps(origin_length: usize, steps: &[SubstitutionStep]) -> Self {
        let mut points: BTreeMap<usize, R> = BTreeMap::new();
        for step in steps {
            let cr: R = step.cr();
            points
                .entry(step.pair_scale)
                .and_modify(|acc| *acc = acc.compose(&cr))
                .or_insert(cr);
        }
        Self {
            points,
            origin_length,
        }
    }

    /// Stores `CR(scale)`, rejecting entries that carry no compression or
    /// fall outside `2..=origin_length`.
    pub fn insert(&mut self, scale: usize, cr: R) -> Result<()> {
        let invalid = |reason| Error::InvalidPoint {
            scale,
            ratio: cr.to_f64(),
            reason,
        };
        if scale < 2 {
            return Err(invalid("scale must be at least 2"));
        }
        if scale > self.origin_length {
            return Err(invalid("scale exceeds the original length"));
        }
        let l = cr.log2().to_f64().unwrap_or(f64::NAN);
        if !(l > LOG2_EPSILON) || !l.is_finite() {
            return Err(invalid("ratio must be finite and greater than 1"));
        }
        self.points.insert(scale, cr);
        Ok(())
    }

    pub fn from_points(
        origin_length: usize,
        points: impl IntoIterator<Item = (usize, R)>,
    ) -> Result<Self> {
        let mut spec = Self::new(origin_length);
        for (s, cr) in points {
            spec.insert(s, cr)?;
        }
        Ok(spec)
    }

    pub fn origin_length(&self) -> usize {
        self.origin_length
    }

    pub fn get(&self, scale: usize) -> Option<&R> {
        self.points.get(&scale)
    }

    /// `CR(scale)`, with absent scales reading as 1.
    pub fn ratio_at(&self, scale: usize) -> R
    where
        R: One,
    {
        self.points.get(&scale).cloned().unwrap_or_else(R::one)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Points in ascending scale order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, &R)> + '_ {
        self.points.iter().map(|(&s, r)| (s, r))
    }

    pub fn scales(&self) -> impl Iterator<Item = usize> + '_ {
        self.points.keys().copied()
    }

    /// `(scale, log2 CR(scale))` pairs.
    pub fn log2_points(&self) -> Vec<(usize, R::Real)> {
        self.iter().map(|(s, r)| (s, r.log2())).collect()
    }

    /// Sum of `log2 CR(s)` over all scales.
    pub fn total_log2(&self) -> R::Real {
        self.iter()
            .fold(<R::Real as num_traits::Zero>::zero(), |acc, (_, r)| acc + r.log2())
    }

    /// Scale carrying the largest ratio; the smaller scale wins ties.
    pub fn peak_scale(&self) -> Option<usize> {
        let mut best: Option<(usize, &R)> = None;
        for (s, r) in self.iter() {
            match best {
                Some((_, b)) if r <= b => {}
                _ => best = Some((s, r)),
            }
        }
        best.map(|(s, _)| s)
    }

    pub fn max_scale(&self) -> Option<usize> {
        self.points.keys().next_back().copied()
    }

    /// Converts every ratio to another representation.
    pub fn map_ratio<Q: CompressionRatio>(&self, f: impl Fn(&R) -> Q) -> CompressionSpectrum<Q> {
        CompressionSpectrum {
            points: self.points.iter().map(|(&s, r)| (s, f(r))).collect(),
            origin_length: self.origin_length,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_compressing_points() {
        let mut s = CompressionSpectrum::<f64>::new(10);
        assert!(matches!(s.insert(2, 1.0), Err(Error::InvalidPoint { .. })));
        assert!(s.insert(2, 0.5).is_err());
        assert!(s.insert(1, 2.0).is_err());
        assert!(s.insert(11, 2.0).is_err());
        assert!(s.insert(3, f64::INFINITY).is_err());
        assert!(s.insert(3, f64::NAN).is_err());
        s.insert(10, 2.0).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(s.ratio_at(4), 1.0);
    }

    #[test]
    fn exact_ratios_compose() {
        let a = BigRational::from_lengths(10, 7);
        let b = BigRational::from_lengths(7, 4);
        let c = a.compose(&b);
        assert_eq!(c, BigRational::new(5.into(), 2.into()));
        assert!((c.log2() - 2.5f64.log2()).abs() < 1e-15);
    }

    #[test]
    fn huge_rational_log2() {
        let big = BigRational::new(BigInt::from(3) << 3000u32, BigInt::from(1) << 2000u32);
        assert!((big.log2() - (1000.0 + 3f64.log2())).abs() < 1e-9);
    }

    #[test]
    fn peak_prefers_larger_ratio_then_smaller_scale() {
        let s = CompressionSpectrum::from_points(100, [(2, 1.5), (5, 3.0), (9, 3.0), (20, 2.0)]).unwrap();
        assert_eq!(s.peak_scale(), Some(5));
        assert_eq!(s.max_scale(), Some(20));
        let f32s = s.map_ratio(|&r| r as f32);
        assert_eq!(f32s.get(9), Some(&3.0f32));
    }
}
