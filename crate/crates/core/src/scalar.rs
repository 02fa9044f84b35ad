//! Scalar abstraction shared by chart metrics, embeddings and catalog functions.
//!
//! Every smooth map the geometry engine differentiates is written once against
//! [`Scalar`] and evaluated on plain floats, on [`Dual`](crate::Dual) numbers
//! for first derivatives, and on nested duals for second and third derivatives.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

/// A field element supporting the elementary functions used by the catalog.
pub trait Scalar:
    Copy
    + Debug
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn from_f64(v: f64) -> Self;
    /// Real (primal) part, used for pivoting and domain decisions.
    fn re(self) -> f64;
    fn sqrt(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;

    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return Self::one() / self.powi(-n);
        }
        let mut acc = Self::one();
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }

    fn recip(self) -> Self {
        Self::one() / self
    }
}

/// Base floating-point types (`f32`, `f64`) that curvature tensors are stored in.
pub trait Real: Scalar + num_traits::Float + num_traits::FloatConst {
    fn to_f64(self) -> f64 {
        self.re()
    }
}

macro_rules! impl_scalar_float {
    ($t:ty) => {
        impl Scalar for $t {
            #[inline]
            fn from_f64(v: f64) -> Self {
                v as $t
            }
            #[inline]
            fn re(self) -> f64 {
                self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                <$t>::sqrt(self)
            }
            #[inline]
            fn sin(self) -> Self {
                <$t>::sin(self)
            }
            #[inline]
            fn cos(self) -> Self {
                <$t>::cos(self)
            }
            #[inline]
            fn exp(self) -> Self {
                <$t>::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                <$t>::ln(self)
            }
            #[inline]
            fn powi(self, n: i32) -> Self {
                <$t>::powi(self, n)
            }
        }

        impl Real for $t {}
    };
}

impl_scalar_float!(f32);
impl_scalar_float!(f64);

/// Euclidean dot product of two slices.
pub fn dot<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter()
        .zip(b)
        .fold(S::zero(), |acc, (&x, &y)| acc + x * y)
}

/// Squared Euclidean norm.
pub fn norm_sq<S: Scalar>(a: &[S]) -> S {
    dot(a, a)
}

/// Lift an `f64` slice into any scalar type.
pub fn lift<S: Scalar>(x: &[f64]) -> Vec<S> {
    x.iter().map(|&v| S::from_f64(v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powi_matches_std() {
        for n in -4..6 {
            let a = Scalar::powi(1.7_f64, n);
            let b = f64::powi(1.7, n);
            assert!((a - b).abs() < 1e-14 * b.abs().max(1.0));
        }
    }

    #[test]
    fn f32_and_f64_agree_loosely() {
        let a = Scalar::sin(0.3_f32).re();
        assert!((a - 0.3_f64.sin()).abs() < 1e-6);
    }
}
