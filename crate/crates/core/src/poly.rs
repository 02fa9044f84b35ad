//! Sparse multivariate polynomials over a generic coefficient field.
//!
//! Catalog functions (heights, partial norms, the Cartan cubic) are all
//! polynomials in model-space coordinates. They are stored once with `f64`
//! coefficients for evaluation on any [`Scalar`], and the Cartan–Münzner gate
//! additionally re-derives its identities over the exact field [`Surd3`].

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num::rational::BigRational;
use num::{BigInt, ToPrimitive};
use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// Coefficient ring for [`Polynomial`].
pub trait Coefficient:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;
}

impl Coefficient for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Coefficient for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
}

/// Exact element `a + b·√3` of the quadratic field Q(√3).
#[derive(Clone, Debug, PartialEq)]
pub struct Surd3 {
    pub rational: BigRational,
    pub surd: BigRational,
}

impl Surd3 {
    pub fn new(rational: BigRational, surd: BigRational) -> Self {
        Surd3 { rational, surd }
    }

    /// `(p/q) + (r/s)·√3`.
    pub fn from_ratios(p: i64, q: i64, r: i64, s: i64) -> Self {
        Surd3 {
            rational: BigRational::new(p.into(), q.into()),
            surd: BigRational::new(r.into(), s.into()),
        }
    }
}

impl Add for Surd3 {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Surd3::new(self.rational + o.rational, self.surd + o.surd)
    }
}

impl Sub for Surd3 {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Surd3::new(self.rational - o.rational, self.surd - o.surd)
    }
}

impl Mul for Surd3 {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let three = BigRational::from_integer(BigInt::from(3));
        Surd3::new(
            &self.rational * &o.rational + three * &self.surd * &o.surd,
            &self.rational * &o.surd + &self.surd * &o.rational,
        )
    }
}

impl Neg for Surd3 {
    type Output = Self;
    fn neg(self) -> Self {
        Surd3::new(-self.rational, -self.surd)
    }
}

impl Zero for Surd3 {
    fn zero() -> Self {
        Surd3::new(BigRational::zero(), BigRational::zero())
    }
    fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.surd.is_zero()
    }
}

impl One for Surd3 {
    fn one() -> Self {
        Surd3::new(BigRational::one(), BigRational::zero())
    }
}

impl Coefficient for Surd3 {
    fn from_i64(v: i64) -> Self {
        Surd3::new(BigRational::from_integer(BigInt::from(v)), BigRational::zero())
    }
    fn to_f64(&self) -> f64 {
        Coefficient::to_f64(&self.rational) + Coefficient::to_f64(&self.surd) * 3f64.sqrt()
    }
}

/// Exponent vector of a monomial.
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial<C> {
    nvars: usize,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Polynomial<C> {
    pub fn zero(nvars: usize) -> Self {
        Polynomial {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: C) -> Self {
        let mut p = Self::zero(nvars);
        p.add_term(vec![0; nvars], c);
        p
    }

    /// The coordinate function `x_i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        let mut e = vec![0; nvars];
        e[i] = 1;
        let mut p = Self::zero(nvars);
        p.add_term(e, C::one());
        p
    }

    /// `Σ_{i∈range} x_i²`.
    pub fn sum_of_squares(nvars: usize, range: std::ops::Range<usize>) -> Self {
        let mut p = Self::zero(nvars);
        for i in range {
            let mut e = vec![0; nvars];
            e[i] = 2;
            p.add_term(e, C::one());
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| e.iter().sum())
            .max()
            .unwrap_or(0)
    }

    pub fn add_term(&mut self, exps: Monomial, c: C) {
        assert_eq!(exps.len(), self.nvars, "monomial arity");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps).or_insert_with(C::zero);
        *entry = entry.clone() + c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            p.add_term(e.clone(), v.clone() * c.clone());
        }
        p
    }

    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.nvars);
        for (e, v) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut d = e.clone();
            d[i] -= 1;
            p.add_term(d, v.clone() * C::from_i64(e[i] as i64));
        }
        p
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.nvars).map(|i| self.derivative(i)).collect()
    }

    /// Flat Laplacian `Σ ∂²/∂x_i²`.
    pub fn laplacian(&self) -> Self {
        (0..self.nvars).fold(Self::zero(self.nvars), |acc, i| {
            acc + self.derivative(i).derivative(i)
        })
    }

    /// `|∇F|²` in the flat metric.
    pub fn gradient_norm_sq(&self) -> Self {
        self.gradient()
            .into_iter()
            .fold(Self::zero(self.nvars), |acc, d| acc + d.clone() * d)
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(self.nvars, C::one()), |acc, _| {
            acc * self.clone()
        })
    }

    /// Evaluate on any scalar type through the `f64` image of the coefficients.
    pub fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let mut acc = S::zero();
        for (e, c) in &self.terms {
            let mut t = S::from_f64(c.to_f64());
            for (xi, &k) in x.iter().zip(e) {
                if k > 0 {
                    t *= xi.powi(k as i32);
                }
            }
            acc += t;
        }
        acc
    }

    /// Image of the polynomial under a coefficient map.
    pub fn map_coefficients<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut p = Polynomial::zero(self.nvars);
        for (e, c) in &self.terms {
            p.add_term(e.clone(), f(c));
        }
        p
    }

    pub fn to_f64(&self) -> Polynomial<f64> {
        self.map_coefficients(|c| c.to_f64())
    }
}

impl<C: Coefficient> Add for Polynomial<C> {
    type Output = Self;
    fn add(mut self, o: Self) -> Self {
        for (e, c) in o.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl<C: Coefficient> Sub for Polynomial<C> {
    type Output = Self;
    fn sub(mut self, o: Self) -> Self {
        for (e, c) in o.terms {
            self.add_term(e, -c);
        }
        self
    }
}

impl<C: Coefficient> Mul for Polynomial<C> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let mut p = Self::zero(self.nvars);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e: Monomial = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                p.add_term(e, ca.clone() * cb.clone());
            }
        }
        p
    }
}
