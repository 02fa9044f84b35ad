use nalgebra::DMatrix;
use serde::Serialize;

use crate::linalg::{max_abs, sorted_symmetric_eigenvalues, spd_sqrt_pair};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeMethod {
    Riccati,
    Jacobi,
    Series,
}

/// The tube shape operator restricted to `P_t`, at one `t`.
///
/// `s_bar` acts on the `n − 1` frame directions orthogonal to `η′`; the ray
/// direction itself is annihilated (`S N = 0`) and is not stored.
#[derive(Clone, Debug, Serialize)]
pub struct ShapeSample {
    pub t: f64,
    #[serde(skip)]
    pub s_bar: DMatrix<f64>,
    /// `trace(s_bar)`.
    pub mean_curvature: f64,
    /// Principal curvatures, descending.
    pub eigenvalues: Vec<f64>,
    pub riccati_residual: Option<f64>,
    pub method: ShapeMethod,
    /// `S̄′(t)` from a local central-difference stencil, when available.
    #[serde(skip)]
    pub derivative: Option<DMatrix<f64>>,
    /// `ρ(N, N)` at `η(t)`, when available.
    pub ricci_nn: Option<f64>,
}

impl ShapeSample {
    pub fn new(t: f64, s_bar: DMatrix<f64>, method: ShapeMethod) -> Self {
        let eigenvalues = sorted_symmetric_eigenvalues(&s_bar);
        ShapeSample {
            t,
            mean_curvature: s_bar.trace(),
            eigenvalues,
            riccati_residual: None,
            method,
            derivative: None,
            ricci_nn: None,
            s_bar,
        }
    }

    /// Eigenvalues of `G^{1/2} S̄ G^{−1/2}` for a frame Gram matrix `G`.
    pub fn with_gram(mut self, gram: &DMatrix<f64>) -> Self {
        let (h, hi) = spd_sqrt_pair(gram);
        self.eigenvalues = sorted_symmetric_eigenvalues(&(&h * &self.s_bar * &hi));
        self
    }

    /// `‖G S̄ − S̄ᵀ G‖∞`: symmetry of the operator in the frame metric.
    pub fn asymmetry(&self, gram: &DMatrix<f64>) -> f64 {
        max_abs(&(gram * &self.s_bar - self.s_bar.transpose() * gram))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.s_bar.iter().map(|x| x * x).sum()
    }
}
