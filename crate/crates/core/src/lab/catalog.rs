//! The catalog of isoparametric functions with closed-form focal varieties.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fermi::patch::{PatchKind, SubmanifoldPatch};
use crate::geometry::manifold::{ChartId, ChartedManifold};
use crate::lab::functions::{cartan_munzner_identities, focal_value_gate};
use crate::lab::report::GateResult;
use crate::poly::{Polynomial, Surd3};
use crate::scalar::Scalar;

/// A catalog entry together with its size parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CaseSpec {
    EuclideanPoint { n: usize },
    EuclideanPlane { n: usize },
    S2Point,
    SnHeight { n: usize },
    SnHeightSquared { n: usize },
    SnClifford { p: usize, q: usize },
    S4Cartan,
    S2xRProduct,
}

pub const CASE_NAMES: [&str; 8] = [
    "euclidean-point",
    "euclidean-plane",
    "s2-point",
    "sn-height",
    "sn-height-squared",
    "sn-clifford",
    "s4-cartan",
    "s2xr-product",
];

impl CaseSpec {
    /// Build from a case name and optional size flags; missing sizes default
    /// to `n = 3`, `(p, q) = (1, 2)`.
    pub fn from_parts(name: &str, n: Option<usize>, p: Option<usize>, q: Option<usize>) -> Result<Self> {
        let n = n.unwrap_or(3);
        let spec = match name {
            "euclidean-point" => CaseSpec::EuclideanPoint { n },
            "euclidean-plane" => CaseSpec::EuclideanPlane { n },
            "s2-point" => CaseSpec::S2Point,
            "sn-height" => CaseSpec::SnHeight { n },
            "sn-height-squared" => CaseSpec::SnHeightSquared { n },
            "sn-clifford" => CaseSpec::SnClifford {
                p: p.unwrap_or(1),
                q: q.unwrap_or(2),
            },
            "s4-cartan" => CaseSpec::S4Cartan,
            "s2xr-product" => CaseSpec::S2xRProduct,
            other => return Err(Error::UnknownCase(other.to_string())),
        };
        spec.validate()?;
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidInput(s.to_string()));
        match *self {
            CaseSpec::EuclideanPoint { n } | CaseSpec::EuclideanPlane { n } if !(2..=8).contains(&n) => {
                bad("Euclidean cases need 2 <= n <= 8")
            }
            CaseSpec::SnHeight { n } | CaseSpec::SnHeightSquared { n } if !(2..=8).contains(&n) => {
                bad("sphere cases need 2 <= n <= 8")
            }
            CaseSpec::SnClifford { p, q } if p == 0 || q == 0 || p + q + 1 > 8 => {
                bad("sn-clifford needs p, q >= 1 and p + q + 1 <= 8")
            }
            _ => Ok(()),
        }
    }

    /// The default-sized entries shown by `catalog list`.
    pub fn defaults() -> Vec<CaseSpec> {
        vec![
            CaseSpec::EuclideanPoint { n: 3 },
            CaseSpec::EuclideanPlane { n: 3 },
            CaseSpec::S2Point,
            CaseSpec::SnHeight { n: 4 },
            CaseSpec::SnHeightSquared { n: 3 },
            CaseSpec::SnClifford { p: 1, q: 2 },
            CaseSpec::S4Cartan,
            CaseSpec::S2xRProduct,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            CaseSpec::EuclideanPoint { .. } => CASE_NAMES[0],
            CaseSpec::EuclideanPlane { .. } => CASE_NAMES[1],
            CaseSpec::S2Point => CASE_NAMES[2],
            CaseSpec::SnHeight { .. } => CASE_NAMES[3],
            CaseSpec::SnHeightSquared { .. } => CASE_NAMES[4],
            CaseSpec::SnClifford { .. } => CASE_NAMES[5],
            CaseSpec::S4Cartan => CASE_NAMES[6],
            CaseSpec::S2xRProduct => CASE_NAMES[7],
        }
    }

    pub fn label(&self) -> String {
        match *self {
            CaseSpec::EuclideanPoint { n }
            | CaseSpec::EuclideanPlane { n }
            | CaseSpec::SnHeight { n }
            | CaseSpec::SnHeightSquared { n } => format!("{}({n})", self.name()),
            CaseSpec::SnClifford { p, q } => format!("{}({p},{q})", self.name()),
            _ => self.name().to_string(),
        }
    }
}

/// A homogeneous polynomial on the model space whose restriction is the
/// catalog function, with exact coefficients.
#[derive(Clone, Debug)]
pub struct CmPolynomial {
    pub exact: Polynomial<Surd3>,
    /// Number `g` of distinct principal curvatures (= degree).
    pub degree: u32,
}

/// Which focal variety.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Minus,
    Plus,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Minus => "minus",
            Side::Plus => "plus",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct CatalogOptions {
    /// Added to one coefficient of the Cartan cubic before its gate runs.
    pub perturb_cartan: f64,
    pub seed: u64,
}

/// An isoparametric function with its focal varieties.
#[derive(Clone, Debug)]
pub struct IsoparametricCandidate {
    pub spec: CaseSpec,
    pub label: String,
    pub ambient: ChartedManifold,
    /// The function in model-space coordinates.
    pub f: Polynomial<f64>,
    pub range: (f64, f64),
    pub focal_minus: Option<SubmanifoldPatch>,
    pub focal_plus: Option<SubmanifoldPatch>,
    /// Both focal codimensions are at least 2.
    pub proper: bool,
    /// Every level set has constant principal curvatures.
    pub constant_principal: bool,
    /// Distance between the focal varieties (unbounded families: `None`).
    pub focal_distance: Option<f64>,
    pub cm: Option<CmPolynomial>,
    /// Extra submanifolds probed by the expansion suites.
    pub probes: Vec<SubmanifoldPatch>,
    pub gates: Vec<GateResult>,
}

impl IsoparametricCandidate {
    pub fn n(&self) -> usize {
        self.ambient.dim()
    }

    pub fn focal(&self, side: Side) -> Option<&SubmanifoldPatch> {
        match side {
            Side::Minus => self.focal_minus.as_ref(),
            Side::Plus => self.focal_plus.as_ref(),
        }
    }

    pub fn focal_sides(&self) -> Vec<(Side, &SubmanifoldPatch)> {
        [Side::Minus, Side::Plus]
            .into_iter()
            .filter_map(|s| self.focal(s).map(|p| (s, p)))
            .collect()
    }

    pub fn admitted(&self) -> bool {
        self.gates.iter().all(|g| g.passed)
    }

    /// Error unless every admission gate passed.
    pub fn require_admitted(&self) -> Result<()> {
        match self.gates.iter().find(|g| !g.passed) {
            Some(g) => Err(Error::GateFailed {
                case: self.label.clone(),
                gate: g.gate.clone(),
            }),
            None => Ok(()),
        }
    }

    /// `f` at a chart point, on any scalar type.
    pub fn f_at<S: Scalar>(&self, chart: ChartId, x: &[S]) -> S {
        self.f.eval(&self.ambient.chart_to_model(chart, x))
    }

    /// Length used for rays from the minus side: the focal distance, or 3
    /// when the family is unbounded.
    pub fn ray_extent(&self) -> f64 {
        self.focal_distance.unwrap_or(3.0)
    }

    /// One catalog line.
    pub fn listing(&self) -> String {
        if let Some(g) = self.gates.iter().find(|g| !g.passed) {
            return format!("{}  GATE-FAILED({})", self.label, g.gate);
        }
        let m = |p: &Option<SubmanifoldPatch>| p.as_ref().map_or("-".to_string(), |p| p.dim().to_string());
        format!(
            "{}  n={}  m-={} m+={}  proper={}",
            self.label,
            self.n(),
            m(&self.focal_minus),
            m(&self.focal_plus),
            if self.proper { "yes" } else { "no" }
        )
    }
}

fn surd_poly(nvars: usize, terms: &[(&[u32], Surd3)]) -> Polynomial<Surd3> {
    let mut p = Polynomial::zero(nvars);
    for (e, c) in terms {
        p.add_term(e.to_vec(), c.clone());
    }
    p
}

/// The Cartan cubic `3√6·det X` on traceless symmetric 3×3 matrices `X`,
/// written in an orthonormal basis of that space; `F = 1` on the Veronese
/// surface `(3wwᵀ − I)/√6`.
pub fn cartan_cubic() -> Polynomial<Surd3> {
    let r = |p, q| Surd3::from_ratios(p, q, 0, 1);
    let s = |p, q| Surd3::from_ratios(0, 1, p, q);
    surd_poly(
        5,
        &[
            (&[2, 0, 0, 0, 1], r(3, 1)),
            (&[1, 1, 1, 0, 0], s(3, 1)),
            (&[0, 2, 0, 1, 0], s(3, 2)),
            (&[0, 2, 0, 0, 1], r(-3, 2)),
            (&[0, 0, 2, 1, 0], s(-3, 2)),
            (&[0, 0, 2, 0, 1], r(-3, 2)),
            (&[0, 0, 0, 2, 1], r(3, 1)),
            (&[0, 0, 0, 0, 3], r(-1, 1)),
        ],
    )
}

fn pole(n: usize, sign: f64) -> Vec<f64> {
    let mut y = vec![0.0; n + 1];
    y[n] = sign;
    y
}

/// Construct a case and run its admission gates.
pub fn build_candidate(spec: CaseSpec, opts: &CatalogOptions) -> Result<IsoparametricCandidate> {
    spec.validate()?;
    let label = spec.label();
    let mk = |amb: ChartedManifold, kind: PatchKind, what: &str| SubmanifoldPatch::new(amb, kind, format!("{label} {what}"));
    let mut c = match spec {
        CaseSpec::EuclideanPoint { n } => {
            let amb = ChartedManifold::Euclidean { n };
            IsoparametricCandidate {
                spec,
                label: label.clone(),
                ambient: amb,
                f: Polynomial::sum_of_squares(n, 0..n),
                range: (0.0, f64::INFINITY),
                focal_minus: Some(mk(amb, PatchKind::Point { y: vec![0.0; n] }, "origin")),
                focal_plus: None,
                proper: true,
                constant_principal: true,
                focal_distance: None,
                cm: None,
                probes: Vec::new(),
                gates: Vec::new(),
            }
        }
        CaseSpec::EuclideanPlane { n } => {
            let amb = ChartedManifold::Euclidean { n };
            let h = Polynomial::<f64>::var(n, n - 1);
            IsoparametricCandidate {
                spec,
                label: label.clone(),
                ambient: amb,
                f: h.clone() * h,
                range: (0.0, f64::INFINITY),
                focal_minus: Some(mk(amb, PatchKind::Hyperplane, "hyperplane")),
                focal_plus: None,
                proper: false,
                constant_principal: true,
                focal_distance: None,
                cm: None,
                probes: Vec::new(),
                gates: Vec::new(),
            }
        }
        CaseSpec::S2Point | CaseSpec::SnHeight { .. } => {
            let n = if let CaseSpec::SnHeight { n } = spec { n } else { 2 };
            let amb = ChartedManifold::Sphere { n };
            let exact = Polynomial::<Surd3>::var(n + 1, n);
            IsoparametricCandidate {
                spec,
                label: label.clone(),
                ambient: amb,
                f: exact.to_f64(),
                range: (-1.0, 1.0),
                focal_minus: Some(mk(amb, PatchKind::Point { y: pole(n, -1.0) }, "south pole")),
                focal_plus: Some(mk(amb, PatchKind::Point { y: pole(n, 1.0) }, "north pole")),
                proper: true,
                constant_principal: true,
                focal_distance: Some(PI),
                cm: Some(CmPolynomial { exact, degree: 1 }),
                probes: Vec::new(),
                gates: Vec::new(),
            }
        }
        CaseSpec::SnHeightSquared { n } => {
            let amb = ChartedManifold::Sphere { n };
            let h = Polynomial::<f64>::var(n + 1, n);
            IsoparametricCandidate {
                spec,
                label: label.clone(),
                ambient: amb,
                f: h.clone() * h,
                range: (0.0, 1.0),
                focal_minus: Some(mk(amb, PatchKind::GreatSphere { k: n - 1, offset: 0 }, "equator")),
                focal_plus: Some(mk(amb, PatchKind::Point { y: pole(n, 1.0) }, "north pole")),
                proper: false,
                constant_principal: true,
                focal_distance: Some(PI / 2.0),
                cm: None,
                probes: Vec::new(),
                gates: Vec::new(),
            }
        }
        CaseSpec::SnClifford { p, q } => {
            let n = p + q + 1;
            let amb = ChartedManifold::Sphere { n };
            let exact = Polynomial::<Surd3>::sum_of_squares(n + 1, 0..p + 1)
                - Polynomial::<Surd3>::sum_of_squares(n + 1, p + 1..n + 1);
            IsoparametricCandidate {
                spec,
                label: label.clone(),
                ambient: amb,
                f: Polynomial::sum_of_squares(n + 1, p + 1..n + 1),
                range: (0.0, 1.0),
                focal_minus: Some(mk(amb, PatchKind::GreatSphere { k: p, offset: 0 }, "S^p")),
                focal_plus: Some(mk(amb, PatchKind::GreatSphere { k: q, offset: p + 1 }, "S^q")),
                proper: true,
                constant_principal: true,
                focal_distance: Some(PI / 2.0),
                cm: Some(CmPolynomial { exact, degree: 2 }),
                probes: Vec::new(),
                gates: Vec::new(),
            }
        }
        CaseSpec::S4Cartan => {
            let amb = ChartedManifold::Sphere { n: 4 };
            let mut exact = cartan_cubic();
            if opts.perturb_cartan != 0.0 {
                // the deliberately corrupted entry used to exercise the gate
                let bump = Surd3::new(
                    num::BigRational::from_float(opts.perturb_cartan).unwrap_or_else(num_traits::Zero::zero),
                    num_traits::Zero::zero(),
                );
                exact.add_term(vec![0, 0, 0, 0, 3], bump);
            }
            IsoparametricCandidate {
                spec,
                label: label.clone(),
                ambient: amb,
                f: exact.to_f64(),
                range: (-1.0, 1.0),
                focal_minus: Some(mk(amb, PatchKind::Veronese { sign: -1.0 }, "Veronese (F = -1)")),
                focal_plus: Some(mk(amb, PatchKind::Veronese { sign: 1.0 }, "Veronese (F = 1)")),
                proper: true,
                constant_principal: true,
                focal_distance: Some(PI / 3.0),
                cm: Some(CmPolynomial { exact, degree: 3 }),
                probes: Vec::new(),
                gates: Vec::new(),
            }
        }
        CaseSpec::S2xRProduct => {
            let amb = ChartedManifold::SphereTimesLine;
            IsoparametricCandidate {
                spec,
                label: label.clone(),
                ambient: amb,
                f: Polynomial::var(4, 2),
                range: (-1.0, 1.0),
                focal_minus: Some(mk(amb, PatchKind::VerticalLine { y: vec![0.0, 0.0, -1.0] }, "south line")),
                focal_plus: Some(mk(amb, PatchKind::VerticalLine { y: vec![0.0, 0.0, 1.0] }, "north line")),
                proper: true,
                constant_principal: true,
                focal_distance: Some(PI),
                cm: None,
                probes: vec![mk(amb, PatchKind::TiltedGeodesic { alpha: 0.7 }, "tilted geodesic")],
                gates: Vec::new(),
            }
        }
    };
    if c.cm.is_some() {
        let checks = cartan_munzner_identities(&c, 1000, opts.seed)?;
        let worst = checks.iter().map(|k| k.score()).fold(0.0, f64::max);
        c.gates.push(GateResult {
            gate: "cartan-munzner".into(),
            passed: checks.iter().all(|k| k.pass),
            statistic: worst,
        });
    }
    let fv = focal_value_gate(&c, 16, opts.seed)?;
    c.gates.push(fv);
    Ok(c)
}

/// Every default catalog entry.
pub fn catalog(opts: &CatalogOptions) -> Result<Vec<IsoparametricCandidate>> {
    CaseSpec::defaults().into_iter().map(|s| build_candidate(s, opts)).collect()
}

/// Non-catalog controls: a round circle in the plane (not a focal variety).
pub fn circle_control() -> SubmanifoldPatch {
    SubmanifoldPatch::new(
        ChartedManifold::Euclidean { n: 2 },
        PatchKind::Circle { radius: 1.0 },
        "euclidean-circle control",
    )
}
