//! Ensemble error measures between reference and reconstructed fields.
//!
//! Fields are sampled on an [`EvalGrid`] and stored time-major, one vector per
//! path. E1 compares ensemble means pointwise, E2 integrates squared errors over
//! time at each node, E3 integrates over space at each time. E2 and E3 report
//! `NaN` where the reference vanishes identically; summaries skip those entries.

use serde::{Deserialize, Serialize};

use crate::geometry::Point;

/// Nodes and times on which fields are compared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalGrid {
    pub nodes: Vec<Point>,
    pub times: Vec<f64>,
    /// Spatial quadrature weights, one per node.
    pub weights: Vec<f64>,
    /// Uniform time step between consecutive `times`.
    pub tau: f64,
    /// Nodes included in summaries.
    pub mask: Vec<bool>,
}

impl EvalGrid {
    pub fn len(&self) -> usize {
        self.nodes.len() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Trapezoid weights on sorted 1D nodes.
    pub fn trapezoid(xs: &[f64]) -> Vec<f64> {
        let n = xs.len();
        let mut w = vec![0.0; n];
        for i in 1..n {
            let h = xs[i] - xs[i - 1];
            w[i - 1] += 0.5 * h;
            w[i] += 0.5 * h;
        }
        w
    }
}

/// `E1(x, t) = |mean(rec - ref)| / max(|mean ref|, ε)` with `ε = 1e-8 · mean |ref|`.
pub fn metric_e1(reference: &[Vec<f64>], reconstruction: &[Vec<f64>]) -> Vec<f64> {
    check(reference, reconstruction);
    let n = reference[0].len();
    let p = reference.len() as f64;
    let total: f64 = reference.iter().flatten().map(|v| v.abs()).sum();
    let eps = 1e-8 * total / (p * n as f64);
    (0..n)
        .map(|i| {
            let mut d = 0.0;
            let mut r = 0.0;
            for (a, b) in reference.iter().zip(reconstruction) {
                d += b[i] - a[i];
                r += a[i];
            }
            (d / p).abs() / (r / p).abs().max(eps)
        })
        .collect()
}

/// `E2(x)`: time-integrated squared error over time-integrated squared reference, square-rooted.
pub fn metric_e2(grid: &EvalGrid, reference: &[Vec<f64>], reconstruction: &[Vec<f64>]) -> Vec<f64> {
    let (num, den) = e2_parts(grid, reference, reconstruction);
    num.iter().zip(&den).map(|(n, d)| ratio(*n, *d)).collect()
}

/// `E3(t)`: the same with the spatial quadrature of the grid.
pub fn metric_e3(grid: &EvalGrid, reference: &[Vec<f64>], reconstruction: &[Vec<f64>]) -> Vec<f64> {
    let (num, den) = e3_parts(grid, reference, reconstruction);
    num.iter().zip(&den).map(|(n, d)| ratio(*n, *d)).collect()
}

fn ratio(num: f64, den: f64) -> f64 {
    if den > 0.0 {
        (num / den).sqrt()
    } else {
        f64::NAN
    }
}

fn check(reference: &[Vec<f64>], reconstruction: &[Vec<f64>]) {
    assert!(!reference.is_empty(), "need at least one path");
    assert_eq!(reference.len(), reconstruction.len(), "path counts differ");
    let n = reference[0].len();
    assert!(reference.iter().chain(reconstruction).all(|v| v.len() == n), "field sizes differ");
}

/// Path-averaged `Σ_t (rec - ref)² τ` and `Σ_t ref² τ` per node.
pub fn e2_parts(grid: &EvalGrid, reference: &[Vec<f64>], reconstruction: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    check(reference, reconstruction);
    let nx = grid.nodes.len();
    assert_eq!(reference[0].len(), grid.len(), "field does not match the grid");
    let p = reference.len() as f64;
    let mut num = vec![0.0; nx];
    let mut den = vec![0.0; nx];
    for (a, b) in reference.iter().zip(reconstruction) {
        for k in 0..grid.times.len() {
            for i in 0..nx {
                let (r, e) = (a[k * nx + i], b[k * nx + i] - a[k * nx + i]);
                num[i] += e * e * grid.tau;
                den[i] += r * r * grid.tau;
            }
        }
    }
    (num.iter().map(|v| v / p).collect(), den.iter().map(|v| v / p).collect())
}

/// Path-averaged `Σ_x w (rec - ref)²` and `Σ_x w ref²` per time.
pub fn e3_parts(grid: &EvalGrid, reference: &[Vec<f64>], reconstruction: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    check(reference, reconstruction);
    let nx = grid.nodes.len();
    assert_eq!(reference[0].len(), grid.len(), "field does not match the grid");
    let p = reference.len() as f64;
    let nt = grid.times.len();
    let mut num = vec![0.0; nt];
    let mut den = vec![0.0; nt];
    for (a, b) in reference.iter().zip(reconstruction) {
        for k in 0..nt {
            for i in 0..nx {
                let (r, e) = (a[k * nx + i], b[k * nx + i] - a[k * nx + i]);
                num[k] += grid.weights[i] * e * e;
                den[k] += grid.weights[i] * r * r;
            }
        }
    }
    (num.iter().map(|v| v / p).collect(), den.iter().map(|v| v / p).collect())
}

/// Mean and max over the finite entries where `keep` holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub max: f64,
}

impl Stats {
    pub fn of<'a>(values: impl IntoIterator<Item = &'a f64>) -> Self {
        let mut n = 0usize;
        let mut sum = 0.0;
        let mut max = f64::NEG_INFINITY;
        for &v in values {
            if v.is_finite() {
                n += 1;
                sum += v;
                max = max.max(v);
            }
        }
        if n == 0 {
            Self { mean: f64::NAN, max: f64::NAN }
        } else {
            Self { mean: sum / n as f64, max }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub e1: Stats,
    pub e2: Stats,
    pub e3: Stats,
}

/// E1, E2 and E3 of one ensemble with summaries over the grid mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub e1: Vec<f64>,
    pub e2: Vec<f64>,
    pub e3: Vec<f64>,
    pub summary: Summary,
}

impl Metrics {
    pub fn compute(grid: &EvalGrid, reference: &[Vec<f64>], reconstruction: &[Vec<f64>]) -> Self {
        let e1 = metric_e1(reference, reconstruction);
        let e2 = metric_e2(grid, reference, reconstruction);
        let e3 = metric_e3(grid, reference, reconstruction);
        let nx = grid.nodes.len();
        let summary = Summary {
            e1: Stats::of(e1.iter().enumerate().filter(|(j, _)| grid.mask[j % nx]).map(|(_, v)| v)),
            e2: Stats::of(e2.iter().zip(&grid.mask).filter(|(_, &m)| m).map(|(v, _)| v)),
            e3: Stats::of(&e3),
        };
        Self { e1, e2, e3, summary }
    }
}
