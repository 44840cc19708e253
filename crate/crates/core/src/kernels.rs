//! Basis functions of the reconstruction and the placement of their sources.
//!
//! Two families are used. Green's functions `φ_j(x, t) = G(x - ξ_j, t - η_j)` of the
//! wave operator solve the homogeneous equation off their source cone. Space-time
//! multiquadrics `ψ_j(x, t) = sqrt(1 + c² (|x - ξ_j|² + (t - η_j)²))` carry the
//! particular part, and their image under `□ = ∂_tt - Δ` is available in closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dot, norm2, sub, Point, SpaceTimeDomain, SpaceTimePoint};

/// Below this value of `|t² - |x|²|` a cone evaluation is refused.
pub const CONE_TOLERANCE: f64 = 1e-10;
/// Minimum space-time distance between a source and a collocation point.
pub const MIN_SEPARATION: f64 = 1e-8;

/// Constant in front of the two-dimensional kernel.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenNormalization {
    /// `1/sqrt(2π)`.
    #[default]
    SqrtTwoPi,
    /// `1/(2π)`, the textbook fundamental solution.
    TwoPi,
}

impl GreenNormalization {
    pub fn constant(self) -> f64 {
        match self {
            GreenNormalization::SqrtTwoPi => 1.0 / (2.0 * PI).sqrt(),
            GreenNormalization::TwoPi => 1.0 / (2.0 * PI),
        }
    }
}

fn check_dim(n: usize) -> Result<()> {
    match n {
        1 | 2 => Ok(()),
        _ => Err(Error::UnsupportedDimension(n)),
    }
}

/// Green's function with `|x|² = r2`; zero outside the open forward cone.
#[inline]
pub(crate) fn green_r2(n: usize, r2: f64, t: f64, norm: GreenNormalization) -> f64 {
    if t <= 0.0 || r2 >= t * t {
        return 0.0;
    }
    if n == 1 {
        0.5
    } else {
        norm.constant() / (t * t - r2).sqrt()
    }
}

/// `G(x, t)`: `½ 1{|x| < t}` for `n = 1`, `(2π)^{-1/2} (t² - |x|²)^{-1/2} 1{|x| < t}` for `n = 2`.
pub fn green(n: usize, x: &Point, t: f64) -> Result<f64> {
    green_with(n, x, t, GreenNormalization::SqrtTwoPi)
}

pub fn green_with(n: usize, x: &Point, t: f64, norm: GreenNormalization) -> Result<f64> {
    check_dim(n)?;
    Ok(green_r2(n, norm2(x), t, norm))
}

/// `∂_ν G(x, t) = ∇_x G · ν`, off the light cone.
pub fn green_normal_derivative(n: usize, x: &Point, nu: &Point, t: f64) -> Result<f64> {
    green_normal_derivative_with(n, x, nu, t, GreenNormalization::SqrtTwoPi)
}

pub fn green_normal_derivative_with(
    n: usize,
    x: &Point,
    nu: &Point,
    t: f64,
    norm: GreenNormalization,
) -> Result<f64> {
    check_dim(n)?;
    let r2 = norm2(x);
    let gap = t * t - r2;
    if gap.abs() < CONE_TOLERANCE {
        return Err(Error::ConeProximal { gap: gap.abs() });
    }
    if n == 1 || t <= 0.0 || gap < 0.0 {
        return Ok(0.0);
    }
    Ok(norm.constant() * dot(x, nu) * gap.powf(-1.5))
}

/// `∂_t G`, used only for optional `∂_t h1` rows.
pub(crate) fn green_time_derivative(n: usize, r2: f64, t: f64, norm: GreenNormalization) -> f64 {
    let gap = t * t - r2;
    if n == 1 || t <= 0.0 || gap <= 0.0 {
        return 0.0;
    }
    -norm.constant() * t * gap.powf(-1.5)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultiquadricParams {
    pub c: f64,
}

impl MultiquadricParams {
    pub fn new(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::invalid(format!("shape parameter must be positive, got {c}")));
        }
        Ok(Self { c })
    }
}

#[inline]
pub fn multiquadric(p: &MultiquadricParams, x: &Point, t: f64) -> f64 {
    (1.0 + p.c * p.c * (norm2(x) + t * t)).sqrt()
}

/// `(∇_x ψ, ∂_t ψ)`.
pub fn mq_gradient(p: &MultiquadricParams, x: &Point, t: f64) -> (Point, f64) {
    let c2 = p.c * p.c;
    let psi = multiquadric(p, x, t);
    ([c2 * x[0] / psi, c2 * x[1] / psi], c2 * t / psi)
}

pub fn mq_normal_derivative(p: &MultiquadricParams, x: &Point, nu: &Point, t: f64) -> f64 {
    p.c * p.c * dot(x, nu) / multiquadric(p, x, t)
}

/// `ψ_tt - Δψ = (1 - n) c²/ψ - c⁴ (t² - |x|²)/ψ³`.
pub fn mq_wave_operator(p: &MultiquadricParams, n: usize, x: &Point, t: f64) -> f64 {
    let c2 = p.c * p.c;
    let psi = multiquadric(p, x, t);
    (1.0 - n as f64) * c2 / psi - c2 * c2 * (t * t - norm2(x)) / (psi * psi * psi)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Green,
    Mq,
}

/// Layout of the one-dimensional Green sources.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenLines1d {
    /// `ξ = a + R + η` and its mirror image `ξ = b - R - η` about the midpoint.
    /// Both families of characteristics enter the domain.
    #[default]
    Mirrored,
    /// `ξ = a + η ± R`. The left line never reaches `Q` for `R > 0`.
    Parallel,
}

/// Layout of the two-dimensional Green sources.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenRing2d {
    /// Sources early enough that all of `Q̄` sits strictly inside every cone,
    /// so each basis function is smooth on `Q̄`.
    #[default]
    Analytic,
    /// Times spread over `[-R, T]`; the cone surfaces cut through `Q`.
    ConeCrossing,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MqLayout {
    /// Tensor grid covering the space-time bounding box plus a margin.
    #[default]
    Grid,
    /// Sources on the boundary inflated by `R`, at times in `[0, T]`.
    InflatedBoundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceConfig {
    /// Offset `R` of the Green sources from the domain.
    pub r: f64,
    /// 1D: total number of Green sources over both lines. 2D: sources per time level.
    pub n_green: usize,
    /// 2D: number of Green time levels.
    pub n_green_times: usize,
    pub lines_1d: GreenLines1d,
    pub ring_2d: GreenRing2d,
    /// 1D: Green source times span `[-R·extent, T + R·extent]`.
    pub line_extent: f64,
    pub mq: MqLayout,
    /// Grid nodes per spatial axis (grid layout) or boundary sources per time (inflated layout).
    pub n_mq_space: usize,
    pub n_mq_times: usize,
    pub mq_margin_space: f64,
    pub mq_margin_time: f64,
    /// Shift applied to grid sources so they never coincide with collocation nodes.
    pub mq_offset: f64,
}

impl SourceConfig {
    pub fn default_for(dim: usize) -> Self {
        if dim == 1 {
            Self {
                r: 1.5,
                n_green: 80,
                n_green_times: 1,
                lines_1d: GreenLines1d::Mirrored,
                ring_2d: GreenRing2d::Analytic,
                line_extent: 0.5,
                mq: MqLayout::Grid,
                n_mq_space: 10,
                n_mq_times: 10,
                mq_margin_space: 0.25,
                mq_margin_time: 0.25,
                mq_offset: 1e-3,
            }
        } else {
            Self {
                r: 1.5,
                n_green: 16,
                n_green_times: 12,
                lines_1d: GreenLines1d::Mirrored,
                ring_2d: GreenRing2d::Analytic,
                line_extent: 0.5,
                mq: MqLayout::Grid,
                n_mq_space: 11,
                n_mq_times: 8,
                mq_margin_space: 0.5,
                mq_margin_time: 0.5,
                mq_offset: 1e-3,
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceLayout {
    pub family: Family,
    pub r: f64,
    pub points: Vec<SpaceTimePoint>,
}

impl SourceLayout {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

/// Source points for one basis family.
pub fn place_sources(domain: &SpaceTimeDomain, cfg: &SourceConfig, family: Family) -> Result<SourceLayout> {
    if !(cfg.r > 0.0) {
        return Err(Error::invalid(format!("source offset R must be positive, got {}", cfg.r)));
    }
    let horizon = domain.horizon;
    let (center, rad) = domain.bounding_circle();
    let points = match (family, domain.dim()) {
        (Family::Green, 1) => {
            if cfg.n_green < 2 {
                return Err(Error::invalid("1D Green layout needs at least 2 sources"));
            }
            let (lo, hi) = (domain.bounding_box().0[0], domain.bounding_box().1[0]);
            let half = cfg.n_green / 2;
            let ext = cfg.r * cfg.line_extent;
            let ts = linspace(-ext, horizon + ext, half);
            let mut pts: Vec<SpaceTimePoint> =
                ts.iter().map(|&s| SpaceTimePoint { x: [lo + cfg.r + s, 0.0], t: s }).collect();
            pts.extend(ts.iter().map(|&s| {
                let xi = match cfg.lines_1d {
                    GreenLines1d::Mirrored => hi - cfg.r - s,
                    GreenLines1d::Parallel => lo + s - cfg.r,
                };
                SpaceTimePoint { x: [xi, 0.0], t: s }
            }));
            pts
        }
        (Family::Green, _) => {
            if cfg.n_green == 0 || cfg.n_green_times == 0 {
                return Err(Error::invalid("2D Green layout needs at least one source"));
            }
            let ring = rad + cfg.r;
            let ts = match cfg.ring_2d {
                GreenRing2d::Analytic => {
                    // Every point of Q̄ is within 2·rad + R of a source in space,
                    // so a time lag above that keeps Q̄ inside each cone.
                    let lag = 2.0 * rad + cfg.r;
                    linspace(-lag - 2.5, -lag - 0.5, cfg.n_green_times)
                }
                GreenRing2d::ConeCrossing => linspace(-cfg.r, horizon, cfg.n_green_times),
            };
            let mut pts = Vec::with_capacity(ts.len() * cfg.n_green);
            for &s in &ts {
                for j in 0..cfg.n_green {
                    let th = 2.0 * PI * j as f64 / cfg.n_green as f64;
                    pts.push(SpaceTimePoint { x: [center[0] + ring * th.cos(), center[1] + ring * th.sin()], t: s });
                }
            }
            pts
        }
        (Family::Mq, dim) => {
            if cfg.n_mq_space == 0 || cfg.n_mq_times == 0 {
                return Err(Error::invalid("multiquadric layout needs at least one source"));
            }
            let off = cfg.mq_offset;
            match cfg.mq {
                MqLayout::Grid => {
                    let (lo, hi) = domain.bounding_box();
                    let m = cfg.mq_margin_space;
                    let ts = linspace(-cfg.mq_margin_time, horizon + cfg.mq_margin_time, cfg.n_mq_times);
                    let xs = linspace(lo[0] - m, hi[0] + m, cfg.n_mq_space);
                    let ys = if dim == 1 { vec![0.0] } else { linspace(lo[1] - m, hi[1] + m, cfg.n_mq_space) };
                    let mut pts = Vec::new();
                    for &x in &xs {
                        for &y in &ys {
                            for &t in &ts {
                                let yy = if dim == 1 { 0.0 } else { y + off };
                                pts.push(SpaceTimePoint { x: [x + off, yy], t: t + off });
                            }
                        }
                    }
                    pts
                }
                MqLayout::InflatedBoundary => {
                    let ts = linspace(0.0, horizon, cfg.n_mq_times);
                    let ring: Vec<Point> = if dim == 1 {
                        let (lo, hi) = domain.bounding_box();
                        vec![[lo[0] - cfg.r, 0.0], [hi[0] + cfg.r, 0.0]]
                    } else {
                        (0..cfg.n_mq_space)
                            .map(|j| {
                                let th = 2.0 * PI * j as f64 / cfg.n_mq_space as f64;
                                [center[0] + (rad + cfg.r) * th.cos(), center[1] + (rad + cfg.r) * th.sin()]
                            })
                            .collect()
                    };
                    let mut pts = Vec::new();
                    for &t in &ts {
                        pts.extend(ring.iter().map(|&x| SpaceTimePoint { x, t }));
                    }
                    pts
                }
            }
        }
    };
    Ok(SourceLayout { family, r: cfg.r, points })
}

/// Fails if any source lies within [`MIN_SEPARATION`] of a collocation point.
pub fn check_separation(layout: &SourceLayout, points: &[SpaceTimePoint]) -> Result<()> {
    for (si, s) in layout.points.iter().enumerate() {
        for (pi, p) in points.iter().enumerate() {
            let d = (norm2(&sub(&p.x, &s.x)) + (p.t - s.t).powi(2)).sqrt();
            if d <= MIN_SEPARATION {
                return Err(Error::SourceCollision { source_index: si, point_index: pi, distance: d });
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FRAC: f64 = 0.398_942_280_401_432_7; // 1/sqrt(2π)

    #[test]
    fn green_values() {
        assert_eq!(green(1, &[0.5, 0.0], 1.0).unwrap(), 0.5);
        assert_eq!(green(1, &[2.0, 0.0], 1.0).unwrap(), 0.0);
        assert_eq!(green(1, &[1.0, 0.0], 1.0).unwrap(), 0.0);
        let g = green(2, &[0.6, 0.8], 2f64.sqrt()).unwrap();
        assert!((g - 0.398942).abs() < 1e-6);
        assert!((g - FRAC).abs() < 1e-12);
        let gc = green_with(2, &[0.6, 0.8], 2f64.sqrt(), GreenNormalization::TwoPi).unwrap();
        assert!((gc - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!(matches!(green(3, &[0.0, 0.0], 1.0), Err(Error::UnsupportedDimension(3))));
    }

    #[test]
    fn green_normal_derivative_cases() {
        assert_eq!(green_normal_derivative(1, &[0.3, 0.0], &[1.0, 0.0], 1.0).unwrap(), 0.0);
        assert_eq!(green_normal_derivative(2, &[2.0, 0.0], &[1.0, 0.0], 1.0).unwrap(), 0.0);
        assert!(matches!(
            green_normal_derivative(2, &[1.0, 0.0], &[1.0, 0.0], 1.0),
            Err(Error::ConeProximal { .. })
        ));
        // Central differences of the kernel itself.
        let pts = [([0.2, -0.3], [0.6, 0.8], 1.1), ([-0.5, 0.1], [-1.0, 0.0], 0.9), ([0.0, 0.4], [0.0, 1.0], 2.0)];
        for (x, nu, t) in pts {
            let e = 1e-6;
            let gp = green(2, &[x[0] + e * nu[0], x[1] + e * nu[1]], t).unwrap();
            let gm = green(2, &[x[0] - e * nu[0], x[1] - e * nu[1]], t).unwrap();
            let fd = (gp - gm) / (2.0 * e);
            let an = green_normal_derivative(2, &x, &nu, t).unwrap();
            assert!((fd - an).abs() <= 1e-6 * an.abs(), "{fd} vs {an}");
        }
    }

    #[test]
    fn green_time_derivative_matches_fd() {
        let (r2, t) = (0.3, 1.2);
        let e = 1e-6;
        let norm = GreenNormalization::SqrtTwoPi;
        let fd = (green_r2(2, r2, t + e, norm) - green_r2(2, r2, t - e, norm)) / (2.0 * e);
        let an = green_time_derivative(2, r2, t, norm);
        assert!((fd - an).abs() <= 1e-6 * an.abs());
    }

    #[test]
    fn mq_values() {
        for c in [0.1, 0.6, 2.5] {
            let p = MultiquadricParams::new(c).unwrap();
            assert_eq!(multiquadric(&p, &[0.0, 0.0], 0.0), 1.0);
            assert_eq!(mq_wave_operator(&p, 1, &[0.0, 0.0], 0.0), 0.0);
            assert!((mq_wave_operator(&p, 2, &[0.0, 0.0], 0.0) + c * c).abs() < 1e-15);
        }
        let p = MultiquadricParams::new(1.0).unwrap();
        assert!((multiquadric(&p, &[1.0, 0.0], 0.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!(MultiquadricParams::new(0.0).is_err());
    }

    // Deterministic pseudo-random points without pulling an RNG into this test.
    fn probe(i: usize) -> (Point, f64) {
        let h = |k: f64| ((i as f64 + 1.0) * k).sin() * 1.7;
        ([h(12.9898), h(78.233)], h(37.719))
    }

    #[test]
    fn mq_gradient_matches_fd() {
        let p = MultiquadricParams::new(0.8).unwrap();
        for i in 0..20 {
            let (x, t) = probe(i);
            let (g, gt) = mq_gradient(&p, &x, t);
            let e = 1e-5;
            let fx = (multiquadric(&p, &[x[0] + e, x[1]], t) - multiquadric(&p, &[x[0] - e, x[1]], t)) / (2.0 * e);
            let fy = (multiquadric(&p, &[x[0], x[1] + e], t) - multiquadric(&p, &[x[0], x[1] - e], t)) / (2.0 * e);
            let ft = (multiquadric(&p, &x, t + e) - multiquadric(&p, &x, t - e)) / (2.0 * e);
            for (a, b) in [(g[0], fx), (g[1], fy), (gt, ft)] {
                assert!((a - b).abs() <= 1e-8 * a.abs().max(1e-3), "{a} vs {b}");
            }
            let nu = [0.6, -0.8];
            let dn = mq_normal_derivative(&p, &x, &nu, t);
            assert!((dn - (g[0] * nu[0] + g[1] * nu[1])).abs() < 1e-14);
        }
    }

    /// `ψ_tt - Δψ` from second-order central differences of `ψ`, Richardson-extrapolated.
    fn box_fd(p: &MultiquadricParams, n: usize, x: &Point, t: f64) -> f64 {
        (4.0 * box_fd_h(p, n, x, t, 1e-3) - box_fd_h(p, n, x, t, 2e-3)) / 3.0
    }

    fn box_fd_h(p: &MultiquadricParams, n: usize, x: &Point, t: f64, h: f64) -> f64 {
        let f = |x: Point, t: f64| multiquadric(p, &x, t);
        let c = f(*x, t);
        let tt = (f(*x, t + h) - 2.0 * c + f(*x, t - h)) / (h * h);
        let xx = (f([x[0] + h, x[1]], t) - 2.0 * c + f([x[0] - h, x[1]], t)) / (h * h);
        let yy = if n == 2 { (f([x[0], x[1] + h], t) - 2.0 * c + f([x[0], x[1] - h], t)) / (h * h) } else { 0.0 };
        tt - xx - yy
    }

    #[test]
    fn mq_wave_operator_matches_fd() {
        for &c in &[0.6, 1.0, 2.5] {
            let p = MultiquadricParams::new(c).unwrap();
            for i in 0..100 {
                let (mut x, t) = probe(i);
                for n in [1, 2] {
                    if n == 1 {
                        x[1] = 0.0;
                    }
                    let an = mq_wave_operator(&p, n, &x, t);
                    let fd = box_fd(&p, n, &x, t);
                    assert!((an - fd).abs() <= 1e-6 * an.abs().max(1e-2), "n={n} c={c}: {an} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn dalembert_cone_integral() {
        // Σ G(x-ξ, t-η) f(ξ, η) Δξ Δη over a fine grid versus ½ ∬_{|x-ξ|<t-η} f,
        // the latter by Gauss–Legendre on the triangle in characteristic form.
        let f = |xi: f64, eta: f64| {
            let r2 = (xi - 0.1).powi(2) + (eta - 0.4).powi(2);
            if r2 < 0.25 { (1.0 - r2 / 0.25).powi(4) } else { 0.0 }
        };
        let n = 1200;
        let (x0, x1, t0, t1) = (-1.5, 1.5, 0.0, 1.5);
        let (dx, dt) = ((x1 - x0) / n as f64, (t1 - t0) / n as f64);
        let gl = gauss_legendre_20();
        for &(x, t) in &[(0.0, 1.0), (0.3, 1.2), (-0.4, 0.9)] {
            let mut conv = 0.0;
            for i in 0..n {
                let xi = x0 + (i as f64 + 0.5) * dx;
                for j in 0..n {
                    let eta = t0 + (j as f64 + 0.5) * dt;
                    conv += green(1, &[x - xi, 0.0], t - eta).unwrap() * f(xi, eta) * dx * dt;
                }
            }
            // ½ ∫_0^t ∫_{x-(t-η)}^{x+(t-η)} f dξ dη, composite Gauss on 40 panels each way.
            let panels = 40;
            let mut cone = 0.0;
            for pe in 0..panels {
                let (ea, eb) = (t * pe as f64 / panels as f64, t * (pe + 1) as f64 / panels as f64);
                for &(ue, we) in &gl {
                    let eta = 0.5 * (ea + eb) + 0.5 * (eb - ea) * ue;
                    let half = t - eta;
                    let mut inner = 0.0;
                    for px in 0..panels {
                        let a = x - half + 2.0 * half * px as f64 / panels as f64;
                        let b = x - half + 2.0 * half * (px + 1) as f64 / panels as f64;
                        for &(ux, wx) in &gl {
                            inner += 0.5 * (b - a) * wx * f(0.5 * (a + b) + 0.5 * (b - a) * ux, eta);
                        }
                    }
                    cone += 0.5 * (eb - ea) * we * inner;
                }
            }
            cone *= 0.5;
            assert!((conv - cone).abs() < 2e-4 * cone.abs().max(1e-3), "{conv} vs {cone}");
        }
    }

    fn gauss_legendre_20() -> Vec<(f64, f64)> {
        // Newton iteration on Legendre polynomials.
        let n = 20;
        (0..n)
            .map(|i| {
                let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
                let mut dp = 0.0;
                for _ in 0..100 {
                    let (mut p0, mut p1) = (1.0, x);
                    for k in 2..=n {
                        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                        p0 = p1;
                        p1 = p2;
                    }
                    dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                    let dx = p1 / dp;
                    x -= dx;
                    if dx.abs() < 1e-15 {
                        break;
                    }
                }
                (x, 2.0 / ((1.0 - x * x) * dp * dp))
            })
            .collect()
    }

    #[test]
    fn parallel_lines_layout() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let cfg = SourceConfig { n_green: 4, lines_1d: GreenLines1d::Parallel, ..SourceConfig::default_for(1) };
        let l = place_sources(&d, &cfg, Family::Green).unwrap();
        assert_eq!(l.len(), 4);
        for p in &l.points {
            assert!(((p.x[0] - p.t).abs() - 1.5).abs() < 1e-12);
        }
    }

    #[test]
    fn mirrored_lines_layout() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let l = place_sources(&d, &SourceConfig::default_for(1), Family::Green).unwrap();
        assert_eq!(l.len(), 80);
        for (k, p) in l.points.iter().enumerate() {
            if k < 40 {
                assert!((p.x[0] - p.t - 1.5).abs() < 1e-12);
            } else {
                assert!((p.x[0] + p.t + 0.5).abs() < 1e-12);
            }
            assert!(p.t >= -0.75 - 1e-12 && p.t <= 1.75 + 1e-12);
        }
    }

    #[test]
    fn disk_ring_radius() {
        let d = SpaceTimeDomain::disk([0.0, 0.0], 1.0, 1.0).unwrap();
        for ring in [GreenRing2d::Analytic, GreenRing2d::ConeCrossing] {
            let cfg = SourceConfig { ring_2d: ring, ..SourceConfig::default_for(2) };
            let l = place_sources(&d, &cfg, Family::Green).unwrap();
            assert_eq!(l.len(), 16 * 12);
            for p in &l.points {
                assert!((p.x[0].hypot(p.x[1]) - 2.5).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn analytic_ring_keeps_domain_inside_cones() {
        let d = SpaceTimeDomain::disk([0.0, 0.0], 1.0, 1.0).unwrap();
        let l = place_sources(&d, &SourceConfig::default_for(2), Family::Green).unwrap();
        for s in &l.points {
            // Worst case: farthest point of the disk at t = 0.
            let far = 1.0 + s.x[0].hypot(s.x[1]);
            assert!((0.0 - s.t) > far + 0.4);
        }
    }

    #[test]
    fn separation_detects_collision() {
        let d = SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let l = place_sources(&d, &SourceConfig::default_for(1), Family::Mq).unwrap();
        assert_eq!(l.len(), 100);
        let grid = crate::geometry::interior_collocation(&d, 10, 10).unwrap();
        check_separation(&l, &grid).unwrap();
        let clash = vec![l.points[3]];
        assert!(matches!(check_separation(&l, &clash), Err(Error::SourceCollision { .. })));
    }

    proptest! {
        #[test]
        fn causality(x0 in -3.0..3.0f64, x1 in -3.0..3.0f64, t in -3.0..3.0f64) {
            for n in [1usize, 2] {
                let x = if n == 1 { [x0, 0.0] } else { [x0, x1] };
                let r = norm2(&x).sqrt();
                if t <= 0.0 || r >= t {
                    prop_assert_eq!(green(n, &x, t).unwrap(), 0.0);
                }
            }
        }

        #[test]
        fn mq_even(x0 in -3.0..3.0f64, x1 in -3.0..3.0f64, t in -3.0..3.0f64, c in 0.1..3.0f64) {
            let p = MultiquadricParams::new(c).unwrap();
            let v = multiquadric(&p, &[x0, x1], t);
            prop_assert_eq!(v, multiquadric(&p, &[-x0, x1], t));
            prop_assert_eq!(v, multiquadric(&p, &[x0, -x1], t));
            prop_assert_eq!(v, multiquadric(&p, &[x0, x1], -t));
        }
    }
}
