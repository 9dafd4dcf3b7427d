//! Scalar types the kernel can run on.
//!
//! Probability bookkeeping is generic: `f64`/`f32` for production runs and
//! [`Rational`] for exact oracle runs. Increment probabilities always start
//! life as exact rationals and are converted once per model.

use std::fmt::Debug;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub type Rational = BigRational;

pub trait Scalar:
    Clone
    + Debug
    + PartialOrd
    + Zero
    + One
    + Signed
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// Whether arithmetic on this type is exact.
    const EXACT: bool;

    fn from_ratio(r: &Rational) -> Self;

    fn from_f64(v: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// `self += a * b`
    fn mul_add_assign(&mut self, a: &Self, b: &Self);

    /// Positive values below this are flushed to zero during evolution so
    /// the inner loop never touches subnormals. `None` for exact types.
    fn flush_threshold() -> Option<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(r: &Rational) -> Self {
        ratio_to_f64(r)
    }

    fn from_f64(v: f64) -> Self {
        v
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    #[inline(always)]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn flush_threshold() -> Option<Self> {
        Some(f64::MIN_POSITIVE)
    }
}

impl Scalar for f32 {
    const EXACT: bool = false;

    fn from_ratio(r: &Rational) -> Self {
        ratio_to_f64(r) as f32
    }

    fn from_f64(v: f64) -> Self {
        v as f32
    }

    fn to_f64(&self) -> f64 {
        *self as f64
    }

    #[inline(always)]
    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        *self += a * b;
    }

    fn flush_threshold() -> Option<Self> {
        Some(f32::MIN_POSITIVE)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(r: &Rational) -> Self {
        r.clone()
    }

    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ratio_to_f64(self)
    }

    fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        if a.is_zero() || b.is_zero() {
            return;
        }
        *self += a * b;
    }

    fn flush_threshold() -> Option<Self> {
        None
    }
}

fn ratio_to_f64(r: &Rational) -> f64 {
    match ToPrimitive::to_f64(r) {
        Some(v) if v.is_finite() && (v != 0.0 || r.is_zero()) => v,
        _ => {
            // keep the top 64 bits of numerator and denominator
            let (n, d) = (r.numer(), r.denom());
            let sn = n.bits().saturating_sub(64);
            let sd = d.bits().saturating_sub(64);
            let a = ToPrimitive::to_f64(&(n >> sn)).unwrap_or(f64::NAN);
            let b = ToPrimitive::to_f64(&(d >> sd)).unwrap_or(f64::NAN);
            a / b * 2f64.powi(sn as i32 - sd as i32)
        }
    }
}

pub fn rational(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Neumaier-compensated running sum. For exact scalars the compensation
/// term stays identically zero.
#[derive(Debug, Clone)]
pub struct CompensatedSum<S> {
    sum: S,
    comp: S,
}

impl<S: Scalar> Default for CompensatedSum<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> CompensatedSum<S> {
    pub fn new() -> Self {
        Self {
            sum: S::zero(),
            comp: S::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: S) {
        if S::EXACT {
            self.sum = self.sum.clone() + x;
            return;
        }
        let t = self.sum.clone() + x.clone();
        if self.sum.abs() >= x.abs() {
            self.comp = self.comp.clone() + ((self.sum.clone() - t.clone()) + x);
        } else {
            self.comp = self.comp.clone() + ((x - t.clone()) + self.sum.clone());
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum.clone());
        self.add(other.comp.clone());
    }

    pub fn value(&self) -> S {
        self.sum.clone() + self.comp.clone()
    }
}

impl<S: Scalar> FromIterator<S> for CompensatedSum<S> {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<S: Scalar>(values: impl IntoIterator<Item = S>) -> S {
    values.into_iter().collect::<CompensatedSum<S>>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_beats_naive() {
        let mut values = vec![1.0f64];
        values.extend(std::iter::repeat_n(1e-16, 10_000));
        let naive: f64 = values.iter().sum();
        let comp = compensated_sum(values.iter().copied());
        assert_eq!(naive, 1.0);
        assert!((comp - (1.0 + 1e-12)).abs() < 1e-15);
    }

    #[test]
    fn exact_sum_is_exact() {
        let s = compensated_sum((1..=6).map(|k| rational(1, k)));
        assert_eq!(s, rational(49, 20));
    }

    #[test]
    fn conversion_of_huge_ratio() {
        let big = BigInt::from(3) * BigInt::from(10).pow(400);
        let r = BigRational::new(big.clone(), big * BigInt::from(4));
        assert_eq!(Scalar::to_f64(&r), 0.25);
    }
}
