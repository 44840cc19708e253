//! Forward solvers that manufacture synthetic Cauchy data, one sample path at a time.
//!
//! Two discretizations are provided and neither shares anything with the inverse
//! expansion: an explicit leapfrog finite-difference scheme on tensor grids
//! (interval, unit square) and a Kansa multiquadric collocation stepper on scattered
//! nodes (disk, leaf). Both treat the multiplicative noise with Euler–Maruyama,
//! `z^{k+1} - 2z^k + z^{k-1} = τ² (Δz + f)^k + τ z^k ΔW_k` up to the choice of
//! where the Laplacian is evaluated.

use std::fmt;
use std::sync::Arc;

use faer::prelude::*;
use faer::{Col, Mat};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    norm2, sample_boundary, sample_interior, sub, trace_grid, BoundaryPoint, Point, Shape, SpaceTimeDomain,
};
use crate::inverse::CauchySample;
use crate::stochastic::BrownianPath;

pub type SpaceFn = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type SpaceTimeFn = Arc<dyn Fn(&Point, f64) -> f64 + Send + Sync>;

/// `z_tt - Δz = f + b4 z Ẇ` in `Q`, `z = h1` on `Σ`, `(z, z_t)(0) = (z0, z0_dot)`.
#[derive(Clone)]
pub struct ForwardProblem {
    pub domain: SpaceTimeDomain,
    pub z0: SpaceFn,
    pub z0_dot: SpaceFn,
    pub f: SpaceTimeFn,
    pub h1: SpaceTimeFn,
    /// Multiplicative noise switch (`b4 = 1` when on, `0` when off).
    pub b4_on: bool,
}

impl fmt::Debug for ForwardProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ForwardProblem").field("domain", &self.domain).field("b4_on", &self.b4_on).finish()
    }
}

impl ForwardProblem {
    /// All data zero.
    pub fn zero(domain: SpaceTimeDomain) -> Self {
        Self {
            domain,
            z0: Arc::new(|_| 0.0),
            z0_dot: Arc::new(|_| 0.0),
            f: Arc::new(|_, _| 0.0),
            h1: Arc::new(|_, _| 0.0),
            b4_on: true,
        }
    }
}

/// Tensor-grid resolution: `n_space` cells per axis, `n_time` steps over `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FdGrid {
    pub n_space: usize,
    pub n_time: usize,
}

#[derive(Debug, Clone)]
pub enum FieldLayout {
    Grid1d { x: Vec<f64> },
    /// Node `(i, j)` at `(x[i], y[j])` is stored at index `j * x.len() + i`.
    Grid2d { x: Vec<f64>, y: Vec<f64> },
    /// Interior nodes first, then boundary nodes.
    Scattered { op: Arc<MeshlessOperator> },
}

/// Space-time samples of one path, time-major: `values[k * n_nodes + i]`.
#[derive(Debug, Clone)]
pub struct DiscreteField {
    pub layout: FieldLayout,
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub path_id: u64,
}

impl DiscreteField {
    pub fn n_nodes(&self) -> usize {
        match &self.layout {
            FieldLayout::Grid1d { x } => x.len(),
            FieldLayout::Grid2d { x, y } => x.len() * y.len(),
            FieldLayout::Scattered { op } => op.nodes.len(),
        }
    }

    pub fn node(&self, i: usize) -> Point {
        match &self.layout {
            FieldLayout::Grid1d { x } => [x[i], 0.0],
            FieldLayout::Grid2d { x, y } => [x[i % x.len()], y[i / x.len()]],
            FieldLayout::Scattered { op } => op.nodes[i],
        }
    }

    pub fn level(&self, k: usize) -> &[f64] {
        let n = self.n_nodes();
        &self.values[k * n..(k + 1) * n]
    }

    /// Indices of nodes strictly inside the domain.
    pub fn interior_nodes(&self) -> Vec<usize> {
        match &self.layout {
            FieldLayout::Grid1d { x } => (1..x.len() - 1).collect(),
            FieldLayout::Grid2d { x, y } => {
                let nx = x.len();
                (1..y.len() - 1).flat_map(|j| (1..nx - 1).map(move |i| j * nx + i)).collect()
            }
            FieldLayout::Scattered { op } => (0..op.n_interior).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        match self.layout {
            FieldLayout::Grid1d { .. } => 1,
            _ => 2,
        }
    }
}

fn check_path(path: &BrownianPath, steps: usize) -> Result<()> {
    if path.steps() != steps {
        return Err(Error::invalid(format!(
            "Brownian path has {} increments but the solver takes {steps} steps",
            path.steps()
        )));
    }
    Ok(())
}

fn check_finite(v: &[f64], step: usize) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::BlowUp { step })
    }
}

/// Explicit leapfrog on the interval or the unit square.
///
/// Interior update `z^{k+1} = 2z^k - z^{k-1} + τ²(Δ_h z^k + f^k) + τ z^k ΔW_k`; the
/// first level comes from the Taylor start
/// `z^1 = z0 + τ z0_dot + ½τ²(Δ_h z0 + f^0) + ½τ z0 ΔW_0`. Boundary nodes carry `h1`.
pub fn solve_fd(problem: &ForwardProblem, grid: FdGrid, path: &BrownianPath) -> Result<DiscreteField> {
    let d = &problem.domain;
    let (lo, hi) = match d.shape {
        Shape::Interval { a, b } => ([a, 0.0], [b, 0.0]),
        Shape::Square => ([0.0, 0.0], [1.0, 1.0]),
        _ => return Err(Error::Domain("finite differences need an interval or the unit square".into())),
    };
    if grid.n_space < 2 || grid.n_time < 1 {
        return Err(Error::invalid("finite-difference grid needs n_space >= 2 and n_time >= 1"));
    }
    let dim = d.dim();
    let nx = grid.n_space;
    let h = (hi[0] - lo[0]) / nx as f64;
    let tau = d.horizon / grid.n_time as f64;
    let limit = 1.0 / (dim as f64).sqrt();
    if tau / h > limit + 1e-12 {
        return Err(Error::Cfl { ratio: tau / h, limit });
    }
    check_path(path, grid.n_time)?;

    let xs: Vec<f64> = (0..=nx).map(|i| lo[0] + (hi[0] - lo[0]) * i as f64 / nx as f64).collect();
    let ys: Vec<f64> = if dim == 1 { vec![0.0] } else { xs.clone() };
    let n1 = nx + 1;
    let n_nodes = if dim == 1 { n1 } else { n1 * n1 };
    let node = |i: usize| -> Point { if dim == 1 { [xs[i], 0.0] } else { [xs[i % n1], ys[i / n1]] } };
    let on_boundary = |i: usize| -> bool {
        if dim == 1 {
            i == 0 || i == nx
        } else {
            let (a, b) = (i % n1, i / n1);
            a == 0 || b == 0 || a == nx || b == nx
        }
    };
    let interior: Vec<usize> = (0..n_nodes).filter(|&i| !on_boundary(i)).collect();
    let boundary: Vec<usize> = (0..n_nodes).filter(|&i| on_boundary(i)).collect();
    let pts: Vec<Point> = (0..n_nodes).map(node).collect();
    let inv_h2 = 1.0 / (h * h);
    let lap = |z: &[f64], i: usize| -> f64 {
        if dim == 1 {
            (z[i - 1] - 2.0 * z[i] + z[i + 1]) * inv_h2
        } else {
            (z[i - 1] + z[i + 1] + z[i - n1] + z[i + n1] - 4.0 * z[i]) * inv_h2
        }
    };

    let times: Vec<f64> = (0..=grid.n_time).map(|k| d.horizon * k as f64 / grid.n_time as f64).collect();
    let mut values = Vec::with_capacity(n_nodes * times.len());
    let z0: Vec<f64> = pts.iter().map(|p| (problem.z0)(p)).collect();
    check_finite(&z0, 0)?;
    let mut z1 = z0.clone();
    for &i in &interior {
        let p = &pts[i];
        let mut v = z0[i] + tau * (problem.z0_dot)(p) + 0.5 * tau * tau * (lap(&z0, i) + (problem.f)(p, 0.0));
        if problem.b4_on {
            v += 0.5 * tau * z0[i] * path.increments[0];
        }
        z1[i] = v;
    }
    for &i in &boundary {
        z1[i] = (problem.h1)(&pts[i], times[1]);
    }
    check_finite(&z1, 1)?;
    values.extend_from_slice(&z0);
    values.extend_from_slice(&z1);
    let (mut prev, mut cur) = (z0, z1);
    let mut next = vec![0.0; n_nodes];
    for k in 1..grid.n_time {
        let t = times[k];
        let dw = path.increments[k];
        for &i in &interior {
            let mut v = 2.0 * cur[i] - prev[i] + tau * tau * (lap(&cur, i) + (problem.f)(&pts[i], t));
            if problem.b4_on {
                v += tau * cur[i] * dw;
            }
            next[i] = v;
        }
        for &i in &boundary {
            next[i] = (problem.h1)(&pts[i], times[k + 1]);
        }
        check_finite(&next, k + 1)?;
        values.extend_from_slice(&next);
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    let layout = if dim == 1 { FieldLayout::Grid1d { x: xs } } else { FieldLayout::Grid2d { x: xs, y: ys } };
    Ok(DiscreteField { layout, times, values, path_id: path.path_index })
}

/// Time integrator of the meshless stepper.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimeScheme {
    /// Average-acceleration Newmark: the Laplacian weighted ¼, ½, ¼ over
    /// levels `k+1, k, k-1`. Second order and unconditionally stable.
    #[default]
    Newmark,
    /// Laplacian at level `k+1` only. First order, strongly damped.
    BackwardEuler,
}

impl TimeScheme {
    fn implicit_weight(self) -> f64 {
        match self {
            TimeScheme::Newmark => 0.25,
            TimeScheme::BackwardEuler => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeshlessConfig {
    /// Target interior node count (see [`sample_interior`]).
    pub n_interior: usize,
    pub n_boundary: usize,
    /// Spatial multiquadric shape `ε` in `sqrt(1 + ε² r²)`.
    pub shape: f64,
    pub n_time: usize,
    pub scheme: TimeScheme,
}

impl Default for MeshlessConfig {
    fn default() -> Self {
        Self { n_interior: 750, n_boundary: 101, shape: 3.0, n_time: 100, scheme: TimeScheme::Newmark }
    }
}

/// Condition estimates above this make the stepper refuse to run.
pub const MAX_CONDITION: f64 = 1e14;

/// Factored Kansa operators for one node set, shared by all paths of an ensemble.
pub struct MeshlessOperator {
    pub domain: SpaceTimeDomain,
    pub config: MeshlessConfig,
    /// Interior nodes followed by boundary nodes.
    pub nodes: Vec<Point>,
    pub boundary: Vec<BoundaryPoint>,
    pub n_interior: usize,
    /// Smallest distance from an interior node to any other node.
    pub spacing: f64,
    pub condition: f64,
    phi: Mat<f64>,
    phi_lu: faer::solvers::PartialPivLu<f64>,
    step_lu: faer::solvers::PartialPivLu<f64>,
    /// Laplacian of each basis function at the interior nodes.
    lap_i: Mat<f64>,
}

impl fmt::Debug for MeshlessOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeshlessOperator")
            .field("nodes", &self.nodes.len())
            .field("n_interior", &self.n_interior)
            .field("condition", &self.condition)
            .finish()
    }
}

#[inline]
fn smq(r2: f64, e2: f64) -> f64 {
    (1.0 + e2 * r2).sqrt()
}

/// Two-dimensional Laplacian of `sqrt(1 + ε² r²)`.
#[inline]
fn smq_lap(r2: f64, e2: f64) -> f64 {
    let p = smq(r2, e2);
    e2 * (2.0 + e2 * r2) / (p * p * p)
}

/// Cheap 1-norm condition estimate from one forward solve with a dense sign pattern.
fn condition_estimate(a: &Mat<f64>, lu: &faer::solvers::PartialPivLu<f64>) -> f64 {
    let n = a.nrows();
    let norm1 = (0..n).map(|j| (0..n).map(|i| a.read(i, j).abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut worst: f64 = 0.0;
    for pattern in 0..2 {
        let rhs = Col::<f64>::from_fn(n, |i| if pattern == 0 { 1.0 / n as f64 } else if i % 2 == 0 { 1.0 / n as f64 } else { -1.0 / n as f64 });
        let x = lu.solve(&rhs);
        let s: f64 = (0..n).map(|i| x.read(i).abs()).sum();
        worst = worst.max(s);
    }
    let est = norm1 * worst;
    if est.is_finite() { est } else { f64::INFINITY }
}

impl MeshlessOperator {
    pub fn new(domain: SpaceTimeDomain, config: MeshlessConfig) -> Result<Self> {
        if !matches!(domain.shape, Shape::Disk { .. } | Shape::Leaf) {
            return Err(Error::Domain("the meshless stepper expects a disk or the leaf".into()));
        }
        if !(config.shape > 0.0) || config.n_time < 1 {
            return Err(Error::invalid("meshless stepper needs shape > 0 and at least one step"));
        }
        let interior = sample_interior(&domain, config.n_interior)?;
        let boundary = sample_boundary(&domain, config.n_boundary)?;
        let n_interior = interior.len();
        let nodes: Vec<Point> = interior.iter().copied().chain(boundary.iter().map(|b| b.x)).collect();
        let n = nodes.len();
        let e2 = config.shape * config.shape;
        let tau = domain.horizon / config.n_time as f64;
        let theta = config.scheme.implicit_weight();
        let phi = Mat::from_fn(n, n, |i, j| smq(norm2(&sub(&nodes[i], &nodes[j])), e2));
        let lap_i = Mat::from_fn(n_interior, n, |i, j| smq_lap(norm2(&sub(&nodes[i], &nodes[j])), e2));
        let step = Mat::from_fn(n, n, |i, j| {
            if i < n_interior {
                phi.read(i, j) - theta * tau * tau * lap_i.read(i, j)
            } else {
                phi.read(i, j)
            }
        });
        let phi_lu = phi.partial_piv_lu();
        let step_lu = step.partial_piv_lu();
        let condition = condition_estimate(&phi, &phi_lu).max(condition_estimate(&step, &step_lu));
        if !(condition < MAX_CONDITION) {
            return Err(Error::Singular { condition });
        }
        let spacing = (0..n_interior)
            .map(|i| {
                (0..n).filter(|&j| j != i).map(|j| norm2(&sub(&nodes[i], &nodes[j]))).fold(f64::INFINITY, f64::min).sqrt()
            })
            .fold(f64::INFINITY, f64::min);
        Ok(Self { domain, config, nodes, boundary, n_interior, spacing, condition, phi, phi_lu, step_lu, lap_i })
    }

    pub fn tau(&self) -> f64 {
        self.domain.horizon / self.config.n_time as f64
    }

    /// Interpolation coefficients of nodal values.
    pub fn coefficients(&self, values: &[f64]) -> Vec<f64> {
        let rhs = Col::<f64>::from_fn(values.len(), |i| values[i]);
        let a = self.phi_lu.solve(&rhs);
        (0..a.nrows()).map(|i| a.read(i)).collect()
    }

    /// Evaluates the interpolant with coefficients `a` at `p`.
    pub fn eval(&self, a: &[f64], p: &Point) -> f64 {
        let e2 = self.config.shape * self.config.shape;
        self.nodes.iter().zip(a).map(|(x, c)| c * smq(norm2(&sub(p, x)), e2)).sum()
    }

    fn lap_interior(&self, a: &Col<f64>) -> Vec<f64> {
        let l = &self.lap_i * a;
        (0..l.nrows()).map(|i| l.read(i)).collect()
    }
}

/// Kansa multiquadric stepper on the scattered nodes of `op`.
///
/// Each step solves `(Φ_I - θτ²L_I; Φ_B) a^{k+1} = (rhs_I; h1)` for the expansion
/// coefficients, with `θ = ¼` for Newmark and `θ = 1` for backward Euler.
pub fn solve_meshless_2d(problem: &ForwardProblem, op: &Arc<MeshlessOperator>, path: &BrownianPath) -> Result<DiscreteField> {
    if problem.domain != op.domain {
        return Err(Error::Domain("problem and meshless operator use different domains".into()));
    }
    let steps = op.config.n_time;
    check_path(path, steps)?;
    let n = op.nodes.len();
    let ni = op.n_interior;
    let tau = op.tau();
    let times: Vec<f64> = (0..=steps).map(|k| op.domain.horizon * k as f64 / steps as f64).collect();
    let to_col = |v: &[f64]| Col::<f64>::from_fn(v.len(), |i| v[i]);
    let from_col = |c: &Col<f64>| (0..c.nrows()).map(|i| c.read(i)).collect::<Vec<f64>>();

    let z0: Vec<f64> = op.nodes.iter().map(|p| (problem.z0)(p)).collect();
    check_finite(&z0, 0)?;
    let a0 = op.phi_lu.solve(&to_col(&z0));
    let lap0 = op.lap_interior(&a0);
    let mut z1 = vec![0.0; n];
    for i in 0..ni {
        let p = &op.nodes[i];
        let mut v = z0[i] + tau * (problem.z0_dot)(p) + 0.5 * tau * tau * (lap0[i] + (problem.f)(p, 0.0));
        if problem.b4_on {
            v += 0.5 * tau * z0[i] * path.increments[0];
        }
        z1[i] = v;
    }
    for i in ni..n {
        z1[i] = (problem.h1)(&op.nodes[i], times[1]);
    }
    check_finite(&z1, 1)?;
    let a1 = op.phi_lu.solve(&to_col(&z1));
    let mut values = Vec::with_capacity(n * times.len());
    values.extend_from_slice(&z0);
    values.extend_from_slice(&z1);
    let (mut z_prev, mut z_cur) = (z0, z1);
    let (mut lap_prev, mut lap_cur) = (lap0, op.lap_interior(&a1));
    let theta = op.config.scheme.implicit_weight();
    let (w_cur, w_prev) = (1.0 - 2.0 * theta, theta);
    for k in 1..steps {
        let t = times[k];
        let dw = path.increments[k];
        let mut rhs = vec![0.0; n];
        for i in 0..ni {
            let p = &op.nodes[i];
            let lap = w_cur * lap_cur[i] + w_prev * lap_prev[i];
            let mut v = 2.0 * z_cur[i] - z_prev[i] + tau * tau * ((problem.f)(p, t) + lap);
            if problem.b4_on {
                v += tau * z_cur[i] * dw;
            }
            rhs[i] = v;
        }
        for i in ni..n {
            rhs[i] = (problem.h1)(&op.nodes[i], times[k + 1]);
        }
        let a_next = op.step_lu.solve(&to_col(&rhs));
        let z_next = from_col(&op.phi_lu_apply(&a_next));
        check_finite(&z_next, k + 1)?;
        values.extend_from_slice(&z_next);
        lap_prev = std::mem::replace(&mut lap_cur, op.lap_interior(&a_next));
        z_prev = std::mem::replace(&mut z_cur, z_next);
    }
    Ok(DiscreteField { layout: FieldLayout::Scattered { op: Arc::clone(op) }, times, values, path_id: path.path_index })
}

impl MeshlessOperator {
    /// `Φ a`: nodal values of the expansion.
    fn phi_lu_apply(&self, a: &Col<f64>) -> Col<f64> {
        &self.phi * a
    }
}

/// Second-order one-sided derivative from samples at distances `0, s, 2s`
/// along the inward normal, returned as the outward normal derivative.
#[inline]
fn outward_derivative(z0: f64, z1: f64, z2: f64, s: f64) -> f64 {
    (3.0 * z0 - 4.0 * z1 + z2) / (2.0 * s)
}

/// Cauchy data on `trace_grid(domain, n_b, n_t)`.
///
/// `h1` is read on the boundary, `h2 = ∂_ν z` comes from one-sided second-order
/// differences along the inward normal, and `∂_t h1` from centered differences
/// over the field's time levels (one-sided at the ends). Trace times must be a
/// subset of the field times.
pub fn extract_cauchy(field: &DiscreteField, domain: &SpaceTimeDomain, n_b: usize, n_t: usize) -> Result<CauchySample> {
    let trace = trace_grid(domain, n_b, n_t)?;
    let levels = field.times.len();
    if levels < 3 || (levels - 1) % (n_t - 1) != 0 {
        return Err(Error::invalid(format!(
            "{n_t} trace times do not align with {levels} field time levels"
        )));
    }
    if (field.times[levels - 1] - domain.horizon).abs() > 1e-12 * domain.horizon {
        return Err(Error::invalid("field does not cover the full time horizon"));
    }
    let stride = (levels - 1) / (n_t - 1);
    let bnd = sample_boundary(domain, n_b)?;

    // Per boundary point: value and outward derivative at every field level.
    let mut vals = vec![vec![0.0; levels]; bnd.len()];
    let mut ders = vec![vec![0.0; levels]; bnd.len()];
    match &field.layout {
        FieldLayout::Grid1d { x } => {
            let nx = x.len();
            if nx < 3 {
                return Err(Error::invalid("need at least 3 nodes along the normal"));
            }
            let h = x[1] - x[0];
            for k in 0..levels {
                let z = field.level(k);
                vals[0][k] = z[0];
                ders[0][k] = outward_derivative(z[0], z[1], z[2], h);
                vals[1][k] = z[nx - 1];
                ders[1][k] = outward_derivative(z[nx - 1], z[nx - 2], z[nx - 3], h);
            }
        }
        FieldLayout::Grid2d { x, y } => {
            let n1 = x.len();
            if n1 < 3 || y.len() != n1 {
                return Err(Error::invalid("need at least 3 nodes along the normal"));
            }
            let h = x[1] - x[0];
            let nx = n1 - 1;
            // Edge node `m` of the side with outward normal `nu`, at depth `d` inward.
            let idx = |nu: Point, m: usize, d: usize| -> usize {
                match (nu[0] as i32, nu[1] as i32) {
                    (0, -1) => d * n1 + m,
                    (1, 0) => m * n1 + (nx - d),
                    (0, 1) => (nx - d) * n1 + m,
                    _ => m * n1 + d,
                }
            };
            for (bi, b) in bnd.iter().enumerate() {
                // Position along the side in grid units.
                let s = if b.normal[1] != 0.0 { (b.x[0] - x[0]) / h } else { (b.x[1] - y[0]) / h };
                let m0 = (s.floor() as usize).min(nx - 1);
                let w = s - m0 as f64;
                for k in 0..levels {
                    let z = field.level(k);
                    let at = |m: usize| {
                        let (a, b1, c) = (z[idx(b.normal, m, 0)], z[idx(b.normal, m, 1)], z[idx(b.normal, m, 2)]);
                        (a, outward_derivative(a, b1, c, h))
                    };
                    let (v0, d0) = at(m0);
                    let (v1, d1) = at(m0 + 1);
                    vals[bi][k] = (1.0 - w) * v0 + w * v1;
                    ders[bi][k] = (1.0 - w) * d0 + w * d1;
                }
            }
        }
        FieldLayout::Scattered { op } => {
            let s = 0.5 * op.spacing;
            for k in 0..levels {
                let a = op.coefficients(field.level(k));
                for (bi, b) in bnd.iter().enumerate() {
                    let p1 = [b.x[0] - s * b.normal[0], b.x[1] - s * b.normal[1]];
                    let p2 = [b.x[0] - 2.0 * s * b.normal[0], b.x[1] - 2.0 * s * b.normal[1]];
                    let v0 = op.eval(&a, &b.x);
                    vals[bi][k] = v0;
                    ders[bi][k] = outward_derivative(v0, op.eval(&a, &p1), op.eval(&a, &p2), s);
                }
            }
        }
    }
    let dt = field.times[1] - field.times[0];
    let time_derivative = |v: &[f64], k: usize| -> f64 {
        if k == 0 {
            (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * dt)
        } else if k == levels - 1 {
            (3.0 * v[k] - 4.0 * v[k - 1] + v[k - 2]) / (2.0 * dt)
        } else {
            (v[k + 1] - v[k - 1]) / (2.0 * dt)
        }
    };
    let mut h1 = Vec::with_capacity(trace.len());
    let mut h1_t = Vec::with_capacity(trace.len());
    let mut h2 = Vec::with_capacity(trace.len());
    for tp in &trace {
        let k = tp.time_index * stride;
        h1.push(vals[tp.boundary_index][k]);
        h1_t.push(time_derivative(&vals[tp.boundary_index], k));
        h2.push(ders[tp.boundary_index][k]);
    }
    Ok(CauchySample { trace, n_b: bnd.len(), n_t, h1, h1_t, h2, path_id: field.path_id, delta: 0.0 })
}
