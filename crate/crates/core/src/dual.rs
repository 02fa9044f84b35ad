//! Forward-mode dual numbers.
//!
//! `Dual<T>` is generic over any [`Scalar`], so `Dual<Dual<f64>>` carries exact
//! second derivatives and `Dual<Dual<Dual<f64>>>` third derivatives. The helpers
//! at the bottom seed coordinates and unpack values, gradients and Hessians of
//! vector-valued maps.

use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};

use crate::scalar::Scalar;

/// `re + eps·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Scalar> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Dual { re, eps }
    }

    #[inline]
    pub fn constant(re: T) -> Self {
        Dual { re, eps: T::zero() }
    }

    #[inline]
    pub fn variable(re: T) -> Self {
        Dual { re, eps: T::one() }
    }

    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Dual {
            re: f,
            eps: self.eps * df,
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Dual::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Dual::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Dual::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = o.re.recip();
        let q = self.re * inv;
        Dual::new(q, (self.eps - q * o.eps) * inv)
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Dual::new(-self.re, -self.eps)
    }
}

impl<T: Scalar> AddAssign for Dual<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Scalar> SubAssign for Dual<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Scalar> MulAssign for Dual<T> {
    #[inline]
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}

impl<T: Scalar> Zero for Dual<T> {
    fn zero() -> Self {
        Dual::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<T: Scalar> One for Dual<T> {
    fn one() -> Self {
        Dual::constant(T::one())
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    #[inline]
    fn from_f64(v: f64) -> Self {
        Dual::constant(T::from_f64(v))
    }
    #[inline]
    fn re(self) -> f64 {
        self.re.re()
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, (s + s).recip())
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let p = self.re.powi(n - 1);
        self.chain(p * self.re, T::from_f64(n as f64) * p)
    }
}

/// Second-order nested dual.
pub type HyperDual<T> = Dual<Dual<T>>;

/// Value and first derivatives of a vector-valued map: `d1[i][c] = ∂_i f_c`.
#[derive(Clone, Debug)]
pub struct Jet1<T> {
    pub value: Vec<T>,
    pub d1: Vec<Vec<T>>,
}

/// Value, first and second derivatives: `d2[i][j][c] = ∂_i ∂_j f_c`.
#[derive(Clone, Debug)]
pub struct Jet2<T> {
    pub value: Vec<T>,
    pub d1: Vec<Vec<T>>,
    pub d2: Vec<Vec<Vec<T>>>,
}

/// First-order jet of `f` at `x`; `x.len()` forward passes.
pub fn jet1<T, F>(x: &[T], f: F) -> Jet1<T>
where
    T: Scalar,
    F: Fn(&[Dual<T>]) -> Vec<Dual<T>>,
{
    let n = x.len();
    let mut value = Vec::new();
    let mut d1 = Vec::with_capacity(n);
    let mut seeded: Vec<Dual<T>> = x.iter().map(|&v| Dual::constant(v)).collect();
    for i in 0..n {
        seeded[i].eps = T::one();
        let out = f(&seeded);
        seeded[i].eps = T::zero();
        if i == 0 {
            value = out.iter().map(|d| d.re).collect();
        }
        d1.push(out.iter().map(|d| d.eps).collect());
    }
    if n == 0 {
        value = f(&seeded).iter().map(|d| d.re).collect();
    }
    Jet1 { value, d1 }
}

/// Second-order jet of `f` at `x`; `n(n+1)/2` forward passes on nested duals.
pub fn jet2<T, F>(x: &[T], f: F) -> Jet2<T>
where
    T: Scalar,
    F: Fn(&[HyperDual<T>]) -> Vec<HyperDual<T>>,
{
    let n = x.len();
    let mut seeded: Vec<HyperDual<T>> = x
        .iter()
        .map(|&v| Dual::constant(Dual::constant(v)))
        .collect();
    if n == 0 {
        let out = f(&seeded);
        return Jet2 {
            value: out.iter().map(|d| d.re.re).collect(),
            d1: Vec::new(),
            d2: Vec::new(),
        };
    }
    let mut value = Vec::new();
    let mut d1: Vec<Vec<T>> = vec![Vec::new(); n];
    let mut d2: Vec<Vec<Vec<T>>> = vec![vec![Vec::new(); n]; n];
    for i in 0..n {
        for j in i..n {
            seeded[i].eps.re = T::one();
            seeded[j].re.eps = T::one();
            let out = f(&seeded);
            seeded[i].eps.re = T::zero();
            seeded[j].re.eps = T::zero();
            if i == 0 && j == 0 {
                value = out.iter().map(|d| d.re.re).collect();
            }
            if i == j {
                d1[i] = out.iter().map(|d| d.eps.re).collect();
            }
            let h: Vec<T> = out.iter().map(|d| d.eps.eps).collect();
            d2[j][i] = h.clone();
            d2[i][j] = h;
        }
    }
    Jet2 { value, d1, d2 }
}

/// Jacobian of `f` at `x` applied to `w`, one forward pass: `Df(x)·w`.
pub fn directional<T, F>(x: &[T], w: &[T], f: F) -> (Vec<T>, Vec<T>)
where
    T: Scalar,
    F: Fn(&[Dual<T>]) -> Vec<Dual<T>>,
{
    let seeded: Vec<Dual<T>> = x.iter().zip(w).map(|(&a, &b)| Dual::new(a, b)).collect();
    let out = f(&seeded);
    (
        out.iter().map(|d| d.re).collect(),
        out.iter().map(|d| d.eps).collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample<S: Scalar>(x: &[S]) -> Vec<S> {
        // f = x0^2 sin(x1) + exp(x0 x1) / (1 + x1^2)
        let a = x[0] * x[0] * x[1].sin();
        let b = (x[0] * x[1]).exp() / (S::one() + x[1] * x[1]);
        vec![a + b, x[0].sqrt() * x[1].ln()]
    }

    fn fd_grad(x: &[f64], c: usize) -> Vec<f64> {
        let h = 1e-6;
        (0..x.len())
            .map(|i| {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[i] += h;
                m[i] -= h;
                (sample(&p)[c] - sample(&m)[c]) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn jet1_matches_finite_differences() {
        let x = [0.7f64, 1.3];
        let jet = jet1(&x, |y| sample(y));
        for c in 0..2 {
            let fd = fd_grad(&x, c);
            for i in 0..2 {
                assert!((jet.d1[i][c] - fd[i]).abs() < 1e-8, "{i} {c}");
            }
        }
    }

    #[test]
    fn jet2_is_symmetric_and_matches_fd_of_jet1() {
        let x = [0.7f64, 1.3];
        let jet = jet2(&x, |y| sample(y));
        let h = 1e-6;
        for i in 0..2 {
            for j in 0..2 {
                let mut p = x.to_vec();
                let mut m = x.to_vec();
                p[j] += h;
                m[j] -= h;
                let gp = jet1(&p, |y| sample(y)).d1[i][0];
                let gm = jet1(&m, |y| sample(y)).d1[i][0];
                let fd = (gp - gm) / (2.0 * h);
                assert!((jet.d2[i][j][0] - fd).abs() < 1e-7);
                assert_eq!(jet.d2[i][j][0], jet.d2[j][i][0]);
            }
        }
        assert!((jet.value[0] - sample(&x)[0]).abs() < 1e-15);
    }

    #[test]
    fn third_derivative_through_triple_nesting() {
        // d^3/dx^3 sin(x) = -cos(x)
        let x = 0.4_f64;
        let v: Dual<Dual<Dual<f64>>> = Dual::new(
            Dual::new(Dual::new(x, 1.0), Dual::new(1.0, 0.0)),
            Dual::new(Dual::new(1.0, 0.0), Dual::new(0.0, 0.0)),
        );
        let s = v.sin();
        assert!((s.eps.eps.eps + x.cos()).abs() < 1e-15);
    }
}
