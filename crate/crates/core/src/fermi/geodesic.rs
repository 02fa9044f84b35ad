//! Geodesics with parallel-transported frames, integrated chart by chart.

use crate::error::{Error, Result};
use crate::fermi::ode::{controlled_step, rk4, StepControl};
use crate::geometry::curvature::christoffel_at;
use crate::geometry::manifold::{ChartId, ChartPoint, ChartedManifold, MetricChart};
use crate::linalg::bilinear;

/// One accepted integration node. `state` is `[x, η′, E_1, …, E_k]` in `chart`.
#[derive(Clone, Debug)]
pub struct PathNode {
    pub t: f64,
    pub chart: ChartId,
    pub state: Vec<f64>,
    /// The same node in the chart that was in use before a switch here.
    pub before_switch: Option<(ChartId, Vec<f64>)>,
}

/// Dense geodesic output: accepted nodes plus local re-integration between them.
#[derive(Clone, Debug)]
pub struct GeodesicPath {
    pub ambient: ChartedManifold,
    pub frame_len: usize,
    pub control: StepControl,
    pub nodes: Vec<PathNode>,
}

/// `x' = v`, `v' = −Γ(v, v)`, `E' = −Γ(v, E)`.
fn geodesic_rhs(m: &ChartedManifold, chart: ChartId, y: &[f64], t: f64) -> Result<Vec<f64>> {
    let n = m.dim();
    let gamma = christoffel_at::<_, f64>(m, chart, &y[..n]).map_err(|e| match e {
        Error::Domain { .. } => Error::ChartExit { t },
        other => other,
    })?;
    let v = &y[n..2 * n];
    let mut out = Vec::with_capacity(y.len());
    out.extend_from_slice(v);
    for block in y[n..].chunks(n) {
        out.extend(gamma.contract(v, block).into_iter().map(|c| -c));
    }
    Ok(out)
}

fn transfer_state(m: &ChartedManifold, from: ChartId, to: ChartId, y: &[f64]) -> Vec<f64> {
    let n = m.dim();
    let x = &y[..n];
    let mut out = m.transition(from, to, x);
    for block in y[n..].chunks(n) {
        out.extend(m.transfer_vector(from, to, x, block));
    }
    out
}

/// Integrate the geodesic from `start` with initial velocity `w`, transporting
/// `frame` along it, up to `t_max`.
pub fn integrate_with_frame(
    m: &ChartedManifold,
    start: &ChartPoint,
    w: &[f64],
    frame: &[Vec<f64>],
    t_max: f64,
    control: StepControl,
) -> Result<GeodesicPath> {
    if !(control.step > 0.0) || !(t_max >= 0.0) {
        return Err(Error::InvalidInput(format!(
            "step {} and t_max {} must be positive",
            control.step, t_max
        )));
    }
    m.check_domain(start.chart, &start.x)?;
    let mut state = start.x.clone();
    state.extend_from_slice(w);
    for e in frame {
        state.extend_from_slice(e);
    }
    let mut chart = start.chart;
    let mut nodes = vec![PathNode {
        t: 0.0,
        chart,
        state: state.clone(),
        before_switch: None,
    }];
    let n_steps = (t_max / control.step).ceil() as usize;
    let mut t = 0.0;
    for k in 0..n_steps {
        let t_next = if k + 1 == n_steps {
            t_max
        } else {
            (k + 1) as f64 * control.step
        };
        let h = t_next - t;
        if h <= 0.0 {
            continue;
        }
        let c = chart;
        let rhs = |s: f64, y: &[f64]| geodesic_rhs(m, c, y, s);
        let accepted = controlled_step(&rhs, t, &state, h, &control)?;
        let last = accepted.len() - 1;
        for (i, (ti, yi)) in accepted.into_iter().enumerate() {
            let ti = if i == last { t_next } else { ti };
            let mut node = PathNode {
                t: ti,
                chart,
                state: yi,
                before_switch: None,
            };
            if let Some(to) = m.switch_target(chart, &node.state[..m.dim()]) {
                let moved = transfer_state(m, chart, to, &node.state);
                node.before_switch = Some((chart, std::mem::replace(&mut node.state, moved)));
                node.chart = to;
                chart = to;
            }
            state = node.state.clone();
            nodes.push(node);
        }
        t = t_next;
    }
    Ok(GeodesicPath {
        ambient: *m,
        frame_len: frame.len(),
        control,
        nodes,
    })
}

/// `exp_p(t w)` for `t ∈ [0, t_max]` with default tolerances.
pub fn integrate_geodesic(
    m: &ChartedManifold,
    p: &ChartPoint,
    w: &[f64],
    t_max: f64,
    step: f64,
) -> Result<GeodesicPath> {
    integrate_with_frame(m, p, w, &[], t_max, StepControl::with_step(step))
}

/// Everything known about the path at one parameter value.
#[derive(Clone, Debug)]
pub struct PathState {
    pub t: f64,
    pub chart: ChartId,
    pub x: Vec<f64>,
    pub velocity: Vec<f64>,
    pub frame: Vec<Vec<f64>>,
}

impl GeodesicPath {
    pub fn dim(&self) -> usize {
        self.ambient.dim()
    }

    pub fn t_max(&self) -> f64 {
        self.nodes.last().map_or(0.0, |n| n.t)
    }

    fn unpack(&self, t: f64, chart: ChartId, y: &[f64]) -> PathState {
        let n = self.dim();
        PathState {
            t,
            chart,
            x: y[..n].to_vec(),
            velocity: y[n..2 * n].to_vec(),
            frame: y[2 * n..].chunks(n).map(<[f64]>::to_vec).collect(),
        }
    }

    /// Dense output: one RK4 sub-step from the last node at or before `t`.
    pub fn state_at(&self, t: f64) -> Result<PathState> {
        let t_end = self.t_max();
        if !(t >= 0.0 && t <= t_end * (1.0 + 1e-12) + 1e-15) {
            return Err(Error::InvalidInput(format!("t = {t} outside [0, {t_end}]")));
        }
        let k = self.nodes.partition_point(|n| n.t <= t).saturating_sub(1);
        let node = &self.nodes[k];
        let dt = t - node.t;
        if dt == 0.0 {
            return Ok(self.unpack(t, node.chart, &node.state));
        }
        let rhs = |s: f64, y: &[f64]| geodesic_rhs(&self.ambient, node.chart, y, s);
        let y = rk4(&rhs, node.t, &node.state, dt)?;
        Ok(self.unpack(t, node.chart, &y))
    }

    pub fn point_at(&self, t: f64) -> Result<ChartPoint> {
        let s = self.state_at(t)?;
        Ok(ChartPoint {
            chart: s.chart,
            x: s.x,
        })
    }

    pub fn model_point_at(&self, t: f64) -> Result<Vec<f64>> {
        let s = self.state_at(t)?;
        Ok(self.ambient.chart_to_model(s.chart, &s.x))
    }

    pub fn end_state(&self) -> PathState {
        let node = self.nodes.last().expect("path has a start node");
        self.unpack(node.t, node.chart, &node.state)
    }

    /// Largest `|⟨η′, η′⟩ − 1|` over the nodes.
    pub fn speed_drift(&self) -> f64 {
        let n = self.dim();
        self.nodes
            .iter()
            .map(|node| {
                let g = self.ambient.metric(node.chart, &node.state[..n]);
                let v = &node.state[n..2 * n];
                (bilinear(&g, v, v) - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation of the Gram matrix of `[frame…]` from its initial value.
    pub fn frame_gram_drift(&self) -> f64 {
        let n = self.dim();
        let gram = |node: &PathNode| {
            let g = self.ambient.metric(node.chart, &node.state[..n]);
            let vecs: Vec<&[f64]> = node.state[n..].chunks(n).collect();
            let mut out = Vec::new();
            for a in &vecs {
                for b in &vecs {
                    out.push(bilinear(&g, a, b));
                }
            }
            out
        };
        let g0 = gram(&self.nodes[0]);
        self.nodes
            .iter()
            .map(|node| {
                gram(node)
                    .iter()
                    .zip(&g0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Parallel transport of `frame0` along an arbitrary smooth curve given in a
/// single chart by `curve(t) = (x(t), x'(t))`.
pub fn transport_along_curve<C>(
    m: &ChartedManifold,
    chart: ChartId,
    curve: C,
    frame0: &[Vec<f64>],
    t0: f64,
    t1: f64,
    control: StepControl,
) -> Result<Vec<Vec<f64>>>
where
    C: Fn(f64) -> (Vec<f64>, Vec<f64>),
{
    let n = m.dim();
    let rhs = |t: f64, y: &[f64]| -> Result<Vec<f64>> {
        let (x, xd) = curve(t);
        let gamma = christoffel_at::<_, f64>(m, chart, &x)?;
        Ok(y.chunks(n)
            .flat_map(|e| gamma.contract(&xd, e).into_iter().map(|c| -c))
            .collect())
    };
    let mut y: Vec<f64> = frame0.concat();
    let steps = ((t1 - t0).abs() / control.step).ceil().max(1.0) as usize;
    let h = (t1 - t0) / steps as f64;
    for k in 0..steps {
        let t = t0 + k as f64 * h;
        y = controlled_step(&rhs, t, &y, h, &control)?
            .pop()
            .map(|(_, y)| y)
            .unwrap_or(y);
    }
    Ok(y.chunks(n).map(<[f64]>::to_vec).collect())
}

/// Parallel-transport `frame0` along an already integrated path, switching
/// charts where the path did. Returns the frame at every path node.
pub fn parallel_transport_frame(
    m: &ChartedManifold,
    path: &GeodesicPath,
    frame0: &[Vec<f64>],
) -> Result<Vec<Vec<Vec<f64>>>> {
    let n = m.dim();
    let mut frames = vec![frame0.to_vec()];
    let mut current = frame0.to_vec();
    for w in path.nodes.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        let curve = |t: f64| {
            let s = path
                .state_at(t.min(b.t).max(a.t))
                .expect("curve evaluated inside the path");
            if s.chart == a.chart {
                (s.x, s.velocity)
            } else {
                // the sub-step landed exactly on a switch node
                let (_, y) = b.before_switch.clone().expect("switch node");
                (y[..n].to_vec(), y[n..2 * n].to_vec())
            }
        };
        let sub = StepControl {
            step: b.t - a.t,
            ..path.control
        };
        current = transport_along_curve(m, a.chart, curve, &current, a.t, b.t, sub)?;
        if let Some((from, y)) = &b.before_switch {
            current = current
                .iter()
                .map(|e| m.transfer_vector(*from, b.chart, &y[..n], e))
                .collect();
        }
        frames.push(current.clone());
    }
    Ok(frames)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_geodesic_is_straight() {
        let m = ChartedManifold::Euclidean { n: 3 };
        let p = ChartPoint {
            chart: 0,
            x: vec![0.0; 3],
        };
        let path = integrate_geodesic(&m, &p, &[1.0, 0.0, 0.0], 2.0, 1e-2).unwrap();
        let end = path.end_state();
        assert!((end.x[0] - 2.0).abs() < 1e-12 && end.x[1].abs() < 1e-15);
    }

    #[test]
    fn rejects_nonpositive_step() {
        let m = ChartedManifold::Euclidean { n: 2 };
        let p = ChartPoint {
            chart: 0,
            x: vec![0.0; 2],
        };
        assert!(integrate_geodesic(&m, &p, &[1.0, 0.0], 1.0, 0.0).is_err());
    }

    #[test]
    fn dense_output_matches_nodes() {
        let m = ChartedManifold::Sphere { n: 2 };
        let p = ChartPoint {
            chart: 0,
            x: vec![0.1, 0.0],
        };
        let g = m.metric(0, &p.x)[0];
        let w = [1.0 / g.sqrt(), 0.0];
        let path = integrate_geodesic(&m, &p, &w, 1.0, 1e-2).unwrap();
        let y = path.model_point_at(0.505).unwrap();
        // great circle in the x–z plane through the start point
        let y0 = m.chart_to_model(0, &p.x);
        let ang0 = y0[0].atan2(-y0[2]);
        assert!((y[0] - (ang0 + 0.505).sin()).abs() < 1e-10);
        assert!((y[2] + (ang0 + 0.505).cos()).abs() < 1e-10);
        assert!(path.speed_drift() < 1e-10);
    }
}
