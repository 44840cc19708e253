//! Spatial domains, boundary sampling and space-time collocation grids.
//!
//! Points are stored as `[f64; 2]` for both spatial dimensions; one-dimensional
//! domains keep the second coordinate at zero so that squared distances and
//! dot products work unchanged.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A spatial point. For one-dimensional domains `p[1] == 0`.
pub type Point = [f64; 2];

#[inline]
pub fn dot(a: &Point, b: &Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn sub(a: &Point, b: &Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn norm2(a: &Point) -> f64 {
    dot(a, a)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum Shape {
    Interval { a: f64, b: f64 },
    Disk { center: Point, radius: f64 },
    /// Region bounded by `r = sin 2θ`, `θ ∈ (0, π/2)`.
    Leaf,
    /// `(0, 1)^2`.
    Square,
}

/// `Q = (0, T) × G`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimeDomain {
    pub shape: Shape,
    pub horizon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint {
    pub x: Point,
    /// Outward unit normal.
    pub normal: Point,
    /// Boundary parameter in `[0, 1)`.
    pub param: f64,
}

/// A point of `Σ = (0, T) × Γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub x: Point,
    pub normal: Point,
    pub t: f64,
    pub boundary_index: usize,
    pub time_index: usize,
}

/// Space-time point used for collocation and evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceTimePoint {
    pub x: Point,
    pub t: f64,
}

impl SpaceTimeDomain {
    pub fn new(shape: Shape, horizon: f64) -> Result<Self> {
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("time horizon must be positive, got {horizon}")));
        }
        match shape {
            Shape::Interval { a, b } if !(a < b) => {
                return Err(Error::Domain(format!("interval requires a < b, got ({a}, {b})")));
            }
            Shape::Disk { radius, .. } if !(radius > 0.0) => {
                return Err(Error::Domain(format!("disk radius must be positive, got {radius}")));
            }
            _ => {}
        }
        Ok(Self { shape, horizon })
    }

    pub fn interval(a: f64, b: f64, horizon: f64) -> Result<Self> {
        Self::new(Shape::Interval { a, b }, horizon)
    }

    pub fn disk(center: Point, radius: f64, horizon: f64) -> Result<Self> {
        Self::new(Shape::Disk { center, radius }, horizon)
    }

    pub fn leaf(horizon: f64) -> Result<Self> {
        Self::new(Shape::Leaf, horizon)
    }

    pub fn unit_square(horizon: f64) -> Result<Self> {
        Self::new(Shape::Square, horizon)
    }

    pub fn dim(&self) -> usize {
        match self.shape {
            Shape::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Strict interior membership.
    pub fn contains(&self, p: &Point) -> bool {
        match self.shape {
            Shape::Interval { a, b } => p[0] > a && p[0] < b,
            Shape::Disk { center, radius } => norm2(&sub(p, &center)) < radius * radius,
            Shape::Leaf => {
                let r = p[0].hypot(p[1]);
                if p[0] <= 0.0 || p[1] <= 0.0 {
                    return false;
                }
                let theta = p[1].atan2(p[0]);
                r < (2.0 * theta).sin()
            }
            Shape::Square => p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0,
        }
    }

    /// Lebesgue measure of `G` (length for intervals).
    pub fn measure(&self) -> f64 {
        match self.shape {
            Shape::Interval { a, b } => b - a,
            Shape::Disk { radius, .. } => PI * radius * radius,
            Shape::Leaf => PI / 8.0,
            Shape::Square => 1.0,
        }
    }

    /// Smallest circle (interval in 1D) containing `G`: `(center, radius)`.
    pub fn bounding_circle(&self) -> (Point, f64) {
        match self.shape {
            Shape::Interval { a, b } => ([0.5 * (a + b), 0.0], 0.5 * (b - a)),
            Shape::Disk { center, radius } => (center, radius),
            Shape::Leaf => {
                // The leaf is symmetric about the diagonal; its farthest points
                // from the center (c, c) are the origin and the tip at θ = π/4.
                let c = 0.5 * std::f64::consts::FRAC_1_SQRT_2;
                ([c, c], 0.5)
            }
            Shape::Square => ([0.5, 0.5], std::f64::consts::FRAC_1_SQRT_2),
        }
    }

    /// Axis-aligned bounding box `(lo, hi)`.
    pub fn bounding_box(&self) -> (Point, Point) {
        match self.shape {
            Shape::Interval { a, b } => ([a, 0.0], [b, 0.0]),
            Shape::Disk { center, radius } => (
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ),
            Shape::Leaf => {
                let m = 4.0 / (3.0 * 3f64.sqrt());
                ([0.0, 0.0], [m, m])
            }
            Shape::Square => ([0.0, 0.0], [1.0, 1.0]),
        }
    }
}

/// Point on the leaf boundary `r = sin 2θ` with its outward unit normal.
pub fn leaf_point(theta: f64) -> (Point, Point) {
    let r = (2.0 * theta).sin();
    let (s, c) = theta.sin_cos();
    let x = [r * c, r * s];
    let dr = 2.0 * (2.0 * theta).cos();
    let tangent = [dr * c - r * s, dr * s + r * c];
    let len = tangent[0].hypot(tangent[1]);
    // Tangent rotated by -90 degrees points away from the region.
    let normal = [tangent[1] / len, -tangent[0] / len];
    (x, normal)
}

/// Quasi-uniform deterministic interior points.
///
/// For intervals exactly `n_points` points are produced. For two-dimensional
/// shapes `n_points` is a target: the square uses the smallest `k × k` tensor
/// grid with at least `n_points` nodes, the disk and the leaf use concentric
/// rings whose spacing is tuned to land close to the target.
pub fn sample_interior(domain: &SpaceTimeDomain, n_points: usize) -> Result<Vec<Point>> {
    if n_points == 0 {
        return Err(Error::invalid("sample_interior needs at least one point"));
    }
    let pts = match domain.shape {
        Shape::Interval { a, b } => (0..n_points)
            .map(|i| [a + (b - a) * (i + 1) as f64 / (n_points + 1) as f64, 0.0])
            .collect(),
        Shape::Square => {
            let k = (n_points as f64).sqrt().ceil() as usize;
            let mut v = Vec::with_capacity(k * k);
            for j in 0..k {
                for i in 0..k {
                    v.push([(i + 1) as f64 / (k + 1) as f64, (j + 1) as f64 / (k + 1) as f64]);
                }
            }
            v
        }
        Shape::Disk { center, radius } => {
            let mut rings = 1;
            loop {
                let pts = disk_rings(center, radius, rings);
                if pts.len() >= n_points {
                    break pts;
                }
                rings += 1;
            }
        }
        Shape::Leaf => {
            let mut h = (domain.measure() / n_points as f64).sqrt();
            let mut pts = leaf_rings(h);
            for _ in 0..30 {
                let ratio = pts.len() as f64 / n_points as f64;
                if (ratio - 1.0).abs() < 0.03 {
                    break;
                }
                h *= ratio.sqrt();
                pts = leaf_rings(h);
            }
            pts
        }
    };
    debug_assert!(pts.iter().all(|p| domain.contains(p)));
    Ok(pts)
}

fn disk_rings(center: Point, radius: f64, rings: usize) -> Vec<Point> {
    let mut pts = vec![center];
    for i in 1..rings {
        let r = radius * i as f64 / rings as f64;
        let k = ((2.0 * PI * i as f64).round() as usize).max(1);
        let offset = if i % 2 == 1 { 0.5 } else { 0.0 };
        for j in 0..k {
            let th = 2.0 * PI * (j as f64 + offset) / k as f64;
            pts.push([center[0] + r * th.cos(), center[1] + r * th.sin()]);
        }
    }
    pts
}

fn leaf_rings(h: f64) -> Vec<Point> {
    let mut pts = Vec::new();
    let mut i = 1;
    loop {
        let r = i as f64 * h;
        let reach = r + 0.5 * h;
        if reach >= 1.0 {
            break;
        }
        let lo = 0.5 * reach.asin();
        let hi = FRAC_PI_2 - lo;
        let k = ((r * (hi - lo) / h).floor() as usize).max(1);
        for j in 0..k {
            let th = lo + (j as f64 + 0.5) * (hi - lo) / k as f64;
            pts.push([r * th.cos(), r * th.sin()]);
        }
        i += 1;
    }
    pts
}

/// Boundary points equispaced in the boundary parameter, with outward normals.
///
/// Intervals always yield their two endpoints and require `n_points == 2`.
/// Leaf samples skip the corner `θ ∈ {0, π/2}` where the normal is undefined;
/// square samples sit at half-steps so no sample lands on a corner.
pub fn sample_boundary(domain: &SpaceTimeDomain, n_points: usize) -> Result<Vec<BoundaryPoint>> {
    match domain.shape {
        Shape::Interval { a, b } => {
            if n_points != 2 {
                return Err(Error::invalid(format!(
                    "an interval boundary has exactly 2 points, requested {n_points}"
                )));
            }
            Ok(vec![
                BoundaryPoint { x: [a, 0.0], normal: [-1.0, 0.0], param: 0.0 },
                BoundaryPoint { x: [b, 0.0], normal: [1.0, 0.0], param: 0.5 },
            ])
        }
        _ if n_points < 2 => Err(Error::invalid(format!(
            "two-dimensional boundaries need at least 2 points, requested {n_points}"
        ))),
        Shape::Disk { center, radius } => Ok((0..n_points)
            .map(|j| {
                let param = j as f64 / n_points as f64;
                let th = 2.0 * PI * param;
                let normal = [th.cos(), th.sin()];
                BoundaryPoint {
                    x: [center[0] + radius * normal[0], center[1] + radius * normal[1]],
                    normal,
                    param,
                }
            })
            .collect()),
        Shape::Leaf => Ok((0..n_points)
            .map(|j| {
                let param = (j as f64 + 0.5) / n_points as f64;
                let (x, normal) = leaf_point(FRAC_PI_2 * param);
                BoundaryPoint { x, normal, param }
            })
            .collect()),
        Shape::Square => Ok((0..n_points)
            .map(|j| {
                let param = (j as f64 + 0.5) / n_points as f64;
                let s = 4.0 * param;
                let (x, normal) = match s as usize {
                    0 => ([s, 0.0], [0.0, -1.0]),
                    1 => ([1.0, s - 1.0], [1.0, 0.0]),
                    2 => ([3.0 - s, 1.0], [0.0, 1.0]),
                    _ => ([0.0, 4.0 - s], [-1.0, 0.0]),
                };
                BoundaryPoint { x, normal, param }
            })
            .collect()),
    }
}

/// Uniform time grid `{k T / (n_t - 1)}`.
pub fn time_grid(horizon: f64, n_t: usize) -> Result<Vec<f64>> {
    if n_t < 2 {
        return Err(Error::invalid(format!("time grid needs n_t >= 2, got {n_t}")));
    }
    Ok((0..n_t).map(|k| horizon * k as f64 / (n_t - 1) as f64).collect())
}

/// `Σ_h`: boundary samples times a uniform time grid, time-major.
pub fn trace_grid(domain: &SpaceTimeDomain, n_b: usize, n_t: usize) -> Result<Vec<TracePoint>> {
    let times = time_grid(domain.horizon, n_t)?;
    let bnd = sample_boundary(domain, n_b)?;
    let mut out = Vec::with_capacity(times.len() * bnd.len());
    for (time_index, &t) in times.iter().enumerate() {
        for (boundary_index, b) in bnd.iter().enumerate() {
            out.push(TracePoint { x: b.x, normal: b.normal, t, boundary_index, time_index });
        }
    }
    Ok(out)
}

/// Interior space-time collocation points: interior spatial samples crossed
/// with `n_t` interior times `(k + 1) T / (n_t + 1)`.
pub fn interior_collocation(
    domain: &SpaceTimeDomain,
    n_space: usize,
    n_t: usize,
) -> Result<Vec<SpaceTimePoint>> {
    if n_t == 0 {
        return Err(Error::invalid("interior collocation needs at least one time level"));
    }
    let xs = sample_interior(domain, n_space)?;
    let mut out = Vec::with_capacity(xs.len() * n_t);
    for k in 0..n_t {
        let t = domain.horizon * (k + 1) as f64 / (n_t + 1) as f64;
        out.extend(xs.iter().map(|&x| SpaceTimePoint { x, t }));
    }
    Ok(out)
}
