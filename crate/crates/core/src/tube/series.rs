//! Second fundamental form of the base patch and the small-`t` expansion of
//! the tube shape operator.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::fermi::patch::SubmanifoldPatch;
use crate::fermi::ray::{normal_frame_ray, FermiRay};
use crate::tube::sample::{ShapeMethod, ShapeSample};

/// `T_v` of `P` at `param(u)` in the orthonormal tangent frame, for the unit
/// normal `v = Σ v_j E_j(u)`. Sign: `⟨T_v X, Y⟩ = ⟨∇_X Y, v⟩`.
pub fn shape_of_submanifold(patch: &SubmanifoldPatch, u: &[f64], v_coeffs: &[f64]) -> Result<DMatrix<f64>> {
    let m = patch.dim();
    let n = patch.ambient.dim();
    let chart = patch.chart_for(u);
    let coeffs = patch.orthonormal_tangent_coefficients(chart, u)?;
    if m == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let normals = patch.normal_frame(chart, u)?;
    let mut v = vec![0.0; n];
    for (c, e) in v_coeffs.iter().zip(&normals) {
        for i in 0..n {
            v[i] += c * e[i];
        }
    }
    let ii = patch.second_fundamental_form(chart, u, &v)?;
    Ok(DMatrix::from_fn(m, m, |al, be| {
        let mut acc = 0.0;
        for a in 0..m {
            for b in 0..m {
                acc += coeffs[al][a] * coeffs[be][b] * ii[a * m + b];
            }
        }
        acc
    }))
}

/// Blocks of the first-order expansion of the tube shape operator:
/// `S(t) = [[T + tA, tB], [tC, −I/t + tD]] + O(t²)` in Fermi coordinate fields.
#[derive(Clone, Debug)]
pub struct SeriesCoefficients {
    pub t_v: DMatrix<f64>,
    /// `⟨R_{v e_a} v, e_b⟩ + (T_v²)_{ab}`.
    pub a: DMatrix<f64>,
    /// `⟨R_{v e_a} v, e_k⟩`.
    pub b: DMatrix<f64>,
    /// `⟨R_{v e_l} v, e_k⟩ / 3`.
    pub d: DMatrix<f64>,
    /// Coefficient vector of the ray direction, `(0, …, 0, 1)`.
    pub v_bar: Vec<f64>,
    /// The full Jacobi operator at `t = 0`.
    pub jacobi0: DMatrix<f64>,
}

impl SeriesCoefficients {
    /// Assemble from the ray's Jacobi operator at the base point.
    pub fn from_ray(ray: &FermiRay) -> Result<Self> {
        let m = ray.m();
        let k = ray.n() - 1;
        let f = k - m;
        let r = ray.jacobi_operator_at(0.0)?;
        let t_v = shape_of_submanifold(&ray.patch, &ray.base_u, &ray.v_coeffs)?;
        let a = r.view((0, 0), (m, m)).into_owned() + &t_v * &t_v;
        let b = r.view((0, m), (m, f)).into_owned();
        let d = r.view((m, m), (f, f)).into_owned() / 3.0;
        let mut v_bar = vec![0.0; ray.n() - m];
        if let Some(last) = v_bar.last_mut() {
            *last = 1.0;
        }
        Ok(SeriesCoefficients {
            t_v,
            a,
            b,
            d,
            v_bar,
            jacobi0: r,
        })
    }

    pub fn for_patch(patch: &SubmanifoldPatch, u: &[f64], v_coeffs: &[f64]) -> Result<Self> {
        Self::from_ray(&normal_frame_ray(patch, u, v_coeffs, 0.0, 1e-3)?)
    }

    pub fn m(&self) -> usize {
        self.t_v.nrows()
    }

    pub fn fiber_dim(&self) -> usize {
        self.d.nrows()
    }

    /// `C = Bᵀ/3`, so `B = 3Cᵀ` holds by construction.
    pub fn c(&self) -> DMatrix<f64> {
        self.b.transpose() / 3.0
    }

    /// The block matrix `[[T + tA, tB], [tC, −I/t + tD]]` (coordinate-field
    /// frame, row convention).
    pub fn coordinate_matrix(&self, t: f64) -> DMatrix<f64> {
        let (m, f) = (self.m(), self.fiber_dim());
        let mut s = DMatrix::zeros(m + f, m + f);
        s.view_mut((0, 0), (m, m)).copy_from(&(&self.t_v + &self.a * t));
        s.view_mut((0, m), (m, f)).copy_from(&(&self.b * t));
        s.view_mut((m, 0), (f, m)).copy_from(&(self.c() * t));
        let fiber = DMatrix::identity(f, f) * (-1.0 / t) + &self.d * t;
        s.view_mut((m, m), (f, f)).copy_from(&fiber);
        s
    }

    /// The same expansion expressed in the parallel orthonormal frame, where
    /// both off-diagonal blocks equal `(t/2)·⟨R_{v·}v,·⟩`.
    pub fn orthonormal_matrix(&self, t: f64) -> DMatrix<f64> {
        let (m, f) = (self.m(), self.fiber_dim());
        let mut s = self.coordinate_matrix(t);
        let half = &self.b * (0.5 * t);
        s.view_mut((0, m), (m, f)).copy_from(&half);
        s.view_mut((m, 0), (f, m)).copy_from(&half.transpose());
        s
    }
}

/// `S̄(t0)` from the expansion, in the coordinate-field frame.
pub fn series_seed(patch: &SubmanifoldPatch, u: &[f64], v_coeffs: &[f64], t0: f64) -> Result<ShapeSample> {
    let coeffs = SeriesCoefficients::for_patch(patch, u, v_coeffs)?;
    Ok(ShapeSample::new(t0, coeffs.coordinate_matrix(t0), ShapeMethod::Series))
}

/// Initial value for the Riccati integration in the transported frame.
pub fn riccati_seed(ray: &FermiRay, t0: f64) -> Result<ShapeSample> {
    let coeffs = SeriesCoefficients::from_ray(ray)?;
    Ok(ShapeSample::new(t0, coeffs.orthonormal_matrix(t0), ShapeMethod::Series))
}
