//! Tube shape operators and focal-variety verification on chart-presented
//! Riemannian manifolds.
//!
//! The core is generic over the scalar type: metrics, embeddings and catalog
//! functions are written against [`Scalar`] and differentiated by nested dual
//! numbers; curvature tensors are produced in any [`Real`] (`f32`, `f64`); the
//! Cartan–Münzner gate works over the exact field [`Surd3`]. The ODE pipeline
//! (geodesics, transport, Riccati and Jacobi integration) runs in `f64`.

pub mod dual;
pub mod error;
pub mod fermi;
pub mod geometry;
pub mod lab;
pub mod linalg;
pub mod poly;
pub mod scalar;
pub mod tube;

pub use dual::{directional, jet1, jet2, Dual, HyperDual, Jet1, Jet2};
pub use error::{Error, Result};
pub use fermi::*;
pub use geometry::*;
pub use lab::*;
pub use poly::{Coefficient, Polynomial, Surd3};
pub use scalar::{Real, Scalar};
pub use tube::*;

pub type Dual64 = Dual<f64>;
pub type HyperDual64 = HyperDual<f64>;
pub type CurvaturePacket64 = CurvaturePacket<f64>;
pub type CurvaturePacket32 = CurvaturePacket<f32>;
pub type Poly64 = Polynomial<f64>;
/// Polynomials with coefficients in Q(√3).
pub type ExactPoly = Polynomial<Surd3>;
/// Polynomials with rational coefficients.
pub type RationalPoly = Polynomial<num::rational::BigRational>;
