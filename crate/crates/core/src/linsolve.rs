//! Dense SVD and Tikhonov-regularized least squares.
//!
//! With `A = U Σ Vᵀ` and `β = Uᵀ b`, the minimizer of `‖AΛ - b‖² + γ²‖Λ‖²` is
//! `Λ_γ = Σ_i σ_i/(σ_i² + γ²) β_i v_i`. Residual and solution norms for any `γ`
//! follow from `(σ, β, ‖b‖)` alone, which is what the parameter-choice rules use.

use std::str::FromStr;

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Thin SVD `A = U diag(s) Vᵀ`, singular values non-increasing.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub u: Mat<f64>,
    pub s: Vec<f64>,
    pub v: Mat<f64>,
}

impl SvdFactors {
    pub fn rows(&self) -> usize {
        self.u.nrows()
    }

    pub fn cols(&self) -> usize {
        self.v.nrows()
    }

    pub fn sigma_max(&self) -> f64 {
        self.s.first().copied().unwrap_or(0.0)
    }

    pub fn sigma_min(&self) -> f64 {
        self.s.last().copied().unwrap_or(0.0)
    }

    /// `Uᵀ b`.
    pub fn project(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.rows(), "right-hand side length");
        (0..self.s.len())
            .map(|i| {
                let col = self.u.col(i);
                (0..b.len()).map(|k| col.read(k) * b[k]).sum()
            })
            .collect()
    }
}

pub fn svd(a: &Mat<f64>) -> Result<SvdFactors> {
    let (m, n) = (a.nrows(), a.ncols());
    if m == 0 || n == 0 {
        return Err(Error::invalid("cannot factor an empty matrix"));
    }
    for j in 0..n {
        for i in 0..m {
            if !a.read(i, j).is_finite() {
                return Err(Error::invalid(format!("non-finite matrix entry at ({i}, {j})")));
            }
        }
    }
    let f = a.thin_svd();
    let sd = f.s_diagonal();
    let mut s: Vec<f64> = (0..sd.nrows()).map(|i| sd.read(i)).collect();
    let u = f.u().to_owned();
    let v = f.v().to_owned();
    if s.iter().any(|x| !x.is_finite()) {
        return Err(Error::Svd(format!("non-finite singular values for a {m}x{n} matrix")));
    }
    // Guard the ordering contract even if the backend ever returns ties out of order.
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));
    if order.iter().enumerate().any(|(k, &i)| k != i) {
        let u2 = Mat::from_fn(u.nrows(), order.len(), |r, c| u.read(r, order[c]));
        let v2 = Mat::from_fn(v.nrows(), order.len(), |r, c| v.read(r, order[c]));
        s = order.iter().map(|&i| s[i]).collect();
        return Ok(SvdFactors { u: u2, s, v: v2 });
    }
    Ok(SvdFactors { u, s, v })
}

/// Quantities reused across many values of `γ` for one right-hand side.
#[derive(Debug, Clone)]
pub struct Spectral {
    pub s: Vec<f64>,
    pub beta: Vec<f64>,
    /// `‖b - Uβ‖²`: the part of `b` outside the range of `U`.
    pub outside: f64,
    pub rows: usize,
}

impl Spectral {
    pub fn new(f: &SvdFactors, b: &[f64]) -> Self {
        let beta = f.project(b);
        // Form b - Uβ explicitly; ‖b‖² - ‖β‖² cancels badly when the fit is tight.
        let mut perp = b.to_vec();
        for (i, &bi) in beta.iter().enumerate() {
            let col = f.u.col(i);
            for (k, r) in perp.iter_mut().enumerate() {
                *r -= bi * col.read(k);
            }
        }
        let outside = perp.iter().map(|x| x * x).sum();
        Self { s: f.s.clone(), beta, outside, rows: f.rows() }
    }

    /// `‖AΛ_γ - b‖²`.
    pub fn residual2(&self, gamma: f64) -> f64 {
        let g2 = gamma * gamma;
        self.s
            .iter()
            .zip(&self.beta)
            .map(|(&s, &b)| {
                let r = g2 / (s * s + g2) * b;
                if r.is_finite() { r * r } else { b * b }
            })
            .sum::<f64>()
            + self.outside
    }

    /// `‖Λ_γ‖²`.
    pub fn solution2(&self, gamma: f64) -> f64 {
        let g2 = gamma * gamma;
        self.s
            .iter()
            .zip(&self.beta)
            .filter(|(&s, _)| s > 0.0 || g2 > 0.0)
            .map(|(&s, &b)| {
                let x = s / (s * s + g2) * b;
                x * x
            })
            .sum()
    }

    /// Effective degrees of freedom `Σ σ²/(σ² + γ²)`.
    pub fn dof(&self, gamma: f64) -> f64 {
        let g2 = gamma * gamma;
        self.s.iter().map(|&s| if s == 0.0 { 0.0 } else { s * s / (s * s + g2) }).sum()
    }

    /// GCV functional, `None` when the denominator degenerates.
    pub fn gcv(&self, gamma: f64) -> Option<f64> {
        let den = self.rows as f64 - self.dof(gamma);
        if den.abs() < 1e-14 {
            return None;
        }
        Some(self.residual2(gamma) / (den * den))
    }
}

/// Filter-factor Tikhonov solution.
pub fn tikhonov_solve(f: &SvdFactors, b: &[f64], gamma: f64) -> Result<Vec<f64>> {
    let beta = f.project(b);
    tikhonov_from_beta(f, &beta, gamma)
}

pub fn tikhonov_from_beta(f: &SvdFactors, beta: &[f64], gamma: f64) -> Result<Vec<f64>> {
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(Error::invalid(format!("regularization parameter must be >= 0, got {gamma}")));
    }
    if gamma == 0.0 && f.sigma_min() == 0.0 {
        return Err(Error::RankDeficient { sigma_min: f.sigma_min() });
    }
    let g2 = gamma * gamma;
    let w: Vec<f64> = f.s.iter().zip(beta).map(|(&s, &b)| s / (s * s + g2) * b).collect();
    let n = f.cols();
    let mut x = vec![0.0; n];
    for (i, &wi) in w.iter().enumerate() {
        if wi == 0.0 {
            continue;
        }
        let col = f.v.col(i);
        for (k, xk) in x.iter_mut().enumerate() {
            *xk += wi * col.read(k);
        }
    }
    Ok(x)
}

/// `count` log-spaced values over `[σ_min·1e-2, σ_max]`, with `σ_min` floored at `σ_max·1e-14`.
pub fn default_grid(f: &SvdFactors, count: usize) -> Vec<f64> {
    let hi = f.sigma_max();
    let lo = f.sigma_min().max(hi * 1e-14) * 1e-2;
    log_grid(lo, hi, count)
}

pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count <= 1 {
        return vec![hi];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp()).collect()
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::EmptyGrid);
    }
    if grid.iter().any(|&g| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::invalid("regularization grid entries must be positive"));
    }
    Ok(())
}

/// Grid point minimizing the GCV functional. Ties keep the first.
pub fn gcv_select(f: &SvdFactors, b: &[f64], grid: &[f64]) -> Result<f64> {
    gcv_select_spectral(&Spectral::new(f, b), grid)
}

pub fn gcv_select_spectral(sp: &Spectral, grid: &[f64]) -> Result<f64> {
    check_grid(grid)?;
    let mut best: Option<(f64, f64)> = None;
    for &g in grid {
        if let Some(v) = sp.gcv(g) {
            if best.map_or(true, |(bv, _)| v < bv) {
                best = Some((v, g));
            }
        }
    }
    best.map(|(_, g)| g).ok_or(Error::EmptyGrid)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LcurveChoice {
    pub gamma: f64,
    /// True when the curve had no corner and GCV decided instead.
    pub fell_back_to_gcv: bool,
}

/// Point of maximum discrete curvature of `(log ‖AΛ_γ - b‖, log ‖Λ_γ‖)`.
///
/// Curvature uses the circle through three consecutive points, signed so that
/// the corner of an L traversed with increasing `γ` is positive.
pub fn lcurve_select(f: &SvdFactors, b: &[f64], grid: &[f64]) -> Result<LcurveChoice> {
    lcurve_select_spectral(&Spectral::new(f, b), grid)
}

pub fn lcurve_select_spectral(sp: &Spectral, grid: &[f64]) -> Result<LcurveChoice> {
    check_grid(grid)?;
    let mut sorted = grid.to_vec();
    sorted.sort_by(f64::total_cmp);
    let tiny = f64::MIN_POSITIVE;
    let pts: Vec<(f64, f64)> = sorted
        .iter()
        .map(|&g| (0.5 * sp.residual2(g).max(tiny).ln(), 0.5 * sp.solution2(g).max(tiny).ln()))
        .collect();
    let mut best: Option<(f64, f64)> = None;
    for i in 1..pts.len().saturating_sub(1) {
        let (p, q, r) = (pts[i - 1], pts[i], pts[i + 1]);
        let (ax, ay) = (q.0 - p.0, q.1 - p.1);
        let (bx, by) = (r.0 - q.0, r.1 - q.1);
        let cross = ax * by - ay * bx;
        let la = ax.hypot(ay);
        let lb = bx.hypot(by);
        let lc = (r.0 - p.0).hypot(r.1 - p.1);
        let den = la * lb * lc;
        if den < 1e-300 {
            continue;
        }
        let kappa = 2.0 * cross / den;
        if best.map_or(true, |(bk, _)| kappa > bk) {
            best = Some((kappa, sorted[i]));
        }
    }
    match best {
        Some((k, g)) if k > 1e-8 => Ok(LcurveChoice { gamma: g, fell_back_to_gcv: false }),
        _ => Ok(LcurveChoice { gamma: gcv_select_spectral(sp, grid)?, fell_back_to_gcv: true }),
    }
}

/// How the regularization parameter is chosen.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", content = "gamma", rename_all = "lowercase")]
pub enum RegMethod {
    #[default]
    Gcv,
    Lcurve,
    Fixed(f64),
}

impl FromStr for RegMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gcv" => Ok(RegMethod::Gcv),
            "lcurve" => Ok(RegMethod::Lcurve),
            _ => {
                let g = s
                    .strip_prefix("fixed:")
                    .and_then(|v| v.parse::<f64>().ok())
                    .ok_or_else(|| Error::invalid(format!("expected gcv, lcurve or fixed:<gamma>, got {s:?}")))?;
                if !(g >= 0.0) {
                    return Err(Error::invalid(format!("fixed gamma must be >= 0, got {g}")));
                }
                Ok(RegMethod::Fixed(g))
            }
        }
    }
}

impl std::fmt::Display for RegMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RegMethod::Gcv => write!(f, "gcv"),
            RegMethod::Lcurve => write!(f, "lcurve"),
            RegMethod::Fixed(g) => write!(f, "fixed:{g}"),
        }
    }
}

/// Outcome of parameter choice plus the solve.
#[derive(Debug, Clone)]
pub struct RegularizedSolution {
    pub coefficients: Vec<f64>,
    pub gamma: f64,
    pub residual_norm: f64,
    pub solution_norm: f64,
    pub fell_back_to_gcv: bool,
}

pub fn regularized_solve(f: &SvdFactors, b: &[f64], method: RegMethod, grid: &[f64]) -> Result<RegularizedSolution> {
    let sp = Spectral::new(f, b);
    let (gamma, fell_back_to_gcv) = match method {
        RegMethod::Gcv => (gcv_select_spectral(&sp, grid)?, false),
        RegMethod::Lcurve => {
            let c = lcurve_select_spectral(&sp, grid)?;
            (c.gamma, c.fell_back_to_gcv)
        }
        RegMethod::Fixed(g) => (g, false),
    };
    let coefficients = tikhonov_from_beta(f, &sp.beta, gamma)?;
    Ok(RegularizedSolution {
        solution_norm: coefficients.iter().map(|x| x * x).sum::<f64>().sqrt(),
        residual_norm: sp.residual2(gamma).sqrt(),
        coefficients,
        gamma,
        fell_back_to_gcv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn mat(rows: &[&[f64]]) -> Mat<f64> {
        Mat::from_fn(rows.len(), rows[0].len(), |i, j| rows[i][j])
    }

    fn random(m: usize, n: usize, seed: u64) -> Mat<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Mat::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
    }

    fn matvec(a: &Mat<f64>, x: &[f64]) -> Vec<f64> {
        (0..a.nrows()).map(|i| (0..a.ncols()).map(|j| a.read(i, j) * x[j]).sum()).collect()
    }

    fn mat_t_vec(a: &Mat<f64>, y: &[f64]) -> Vec<f64> {
        (0..a.ncols()).map(|j| (0..a.nrows()).map(|i| a.read(i, j) * y[i]).sum()).collect()
    }

    /// Cyclic Jacobi eigenvalues of a symmetric matrix.
    fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
        let n = a.len();
        for _ in 0..100 {
            let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].powi(2)).sum();
            if off < 1e-30 {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    if a[p][q].abs() < 1e-300 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let (akp, akq) = (a[k][p], a[k][q]);
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let (apk, aqk) = (a[p][k], a[q][k]);
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
        ev.sort_by(|x, y| y.total_cmp(x));
        ev
    }

    #[test]
    fn identity_and_diagonal() {
        let f = svd(&Mat::<f64>::identity(5, 5)).unwrap();
        assert!(f.s.iter().all(|&s| (s - 1.0).abs() < 1e-14));
        let f = svd(&mat(&[&[3.0, 0.0, 0.0], &[0.0, 2.0, 0.0], &[0.0, 0.0, 1.0]])).unwrap();
        for (s, e) in f.s.iter().zip([3.0, 2.0, 1.0]) {
            assert!((s - e).abs() < 1e-14);
        }
        for i in 0..3 {
            for j in 0..3 {
                let (u, v) = (f.u.read(i, j).abs(), f.v.read(i, j).abs());
                let e = if i == j { 1.0 } else { 0.0 };
                assert!((u - e).abs() < 1e-12 && (v - e).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn factor_invariants_and_jacobi_oracle() {
        let a = random(6, 4, 1);
        let f = svd(&a).unwrap();
        // Orthogonality and reconstruction.
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.0 };
                let uu: f64 = (0..6).map(|k| f.u.read(k, i) * f.u.read(k, j)).sum();
                let vv: f64 = (0..4).map(|k| f.v.read(k, i) * f.v.read(k, j)).sum();
                assert!((uu - e).abs() < 1e-10 && (vv - e).abs() < 1e-10);
            }
        }
        let mut err = 0.0;
        let mut nrm = 0.0;
        for i in 0..6 {
            for j in 0..4 {
                let r: f64 = (0..4).map(|k| f.u.read(i, k) * f.s[k] * f.v.read(j, k)).sum();
                err += (r - a.read(i, j)).powi(2);
                nrm += a.read(i, j).powi(2);
            }
        }
        assert!(err.sqrt() <= 1e-10 * nrm.sqrt());
        assert!(f.s.windows(2).all(|w| w[0] >= w[1]));
        let gram: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| (0..6).map(|k| a.read(k, i) * a.read(k, j)).sum()).collect())
            .collect();
        let ev = jacobi_eigenvalues(gram);
        for (s, e) in f.s.iter().zip(ev) {
            assert!((s * s - e).abs() < 1e-9, "{} vs {}", s * s, e);
        }
    }

    #[test]
    fn rejects_non_finite() {
        let a = mat(&[&[1.0, f64::NAN], &[0.0, 1.0]]);
        assert!(svd(&a).is_err());
    }

    #[test]
    fn hand_computed_tikhonov() {
        let f = svd(&mat(&[&[1.0, 0.0], &[0.0, 2.0]])).unwrap();
        let x = tikhonov_solve(&f, &[1.0, 2.0], 1.0).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-12);
        assert!((x[1] - 0.8).abs() < 1e-12);
    }

    #[test]
    fn large_gamma_shrinks() {
        let a = random(8, 5, 2);
        let f = svd(&a).unwrap();
        let b: Vec<f64> = (0..8).map(|i| (i as f64).cos()).collect();
        let g = 1e8;
        let x = tikhonov_solve(&f, &b, g).unwrap();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(nx <= nb * f.sigma_max() / (g * g));
    }

    #[test]
    fn exact_square_solve_and_rank_deficiency() {
        let a = random(5, 5, 3);
        let f = svd(&a).unwrap();
        let b = vec![1.0, -2.0, 0.5, 3.0, 0.0];
        let x = tikhonov_solve(&f, &b, 0.0).unwrap();
        for (r, bb) in matvec(&a, &x).iter().zip(&b) {
            assert!((r - bb).abs() < 1e-9);
        }
        let sing = mat(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let mut f = svd(&sing).unwrap();
        f.s[1] = 0.0;
        assert!(matches!(tikhonov_solve(&f, &[1.0, 1.0], 0.0), Err(Error::RankDeficient { .. })));
        assert!(tikhonov_solve(&f, &[1.0, 1.0], 1e-3).is_ok());
    }

    #[test]
    fn normal_equations_on_random_systems() {
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
            let (m, n) = (rng.gen_range(3..20), rng.gen_range(2..12));
            let a = random(m, n, seed);
            let b: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let g: f64 = 10f64.powf(rng.gen_range(-4.0..0.0));
            let f = svd(&a).unwrap();
            let x = tikhonov_solve(&f, &b, g).unwrap();
            let ax = matvec(&a, &x);
            let lhs = mat_t_vec(&a, &ax);
            let atb = mat_t_vec(&a, &b);
            let res: f64 = lhs.iter().zip(&x).zip(&atb).map(|((l, xi), r)| (l + g * g * xi - r).powi(2)).sum::<f64>().sqrt();
            let scale = atb.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(res <= 1e-8 * scale.max(1e-300), "seed {seed}: {res}");
        }
    }

    #[test]
    fn residual_from_spectrum_matches_direct() {
        let a = random(12, 6, 4);
        let b: Vec<f64> = (0..12).map(|i| (i as f64 * 0.7).sin()).collect();
        let f = svd(&a).unwrap();
        let sp = Spectral::new(&f, &b);
        for g in [1e-3, 0.1, 1.0] {
            let x = tikhonov_solve(&f, &b, g).unwrap();
            let r: f64 = matvec(&a, &x).iter().zip(&b).map(|(p, q)| (p - q).powi(2)).sum::<f64>().sqrt();
            assert!((r - sp.residual2(g).sqrt()).abs() < 1e-10);
        }
    }

    #[test]
    fn row_permutation_invariance() {
        let a = random(9, 5, 5);
        let b: Vec<f64> = (0..9).map(|i| i as f64 - 4.0).collect();
        let perm = [3, 7, 0, 8, 1, 5, 2, 6, 4];
        let ap = Mat::from_fn(9, 5, |i, j| a.read(perm[i], j));
        let bp: Vec<f64> = perm.iter().map(|&i| b[i]).collect();
        let x = tikhonov_solve(&svd(&a).unwrap(), &b, 0.05).unwrap();
        let y = tikhonov_solve(&svd(&ap).unwrap(), &bp, 0.05).unwrap();
        for (p, q) in x.iter().zip(&y) {
            assert!((p - q).abs() < 1e-10);
        }
    }

    /// `A = diag(1..5)`, `Λ_true` known, 1% multiplicative noise.
    fn synthetic() -> (SvdFactors, Vec<f64>, Vec<f64>) {
        let a = Mat::from_fn(5, 5, |i, j| if i == j { (i + 1) as f64 } else { 0.0 });
        let x_true = vec![1.0, -0.5, 0.25, 2.0, -1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let b: Vec<f64> = matvec(&a, &x_true).iter().map(|v| v * (1.0 + 0.01 * rng.gen_range(-1.0..1.0))).collect();
        (svd(&a).unwrap(), b, x_true)
    }

    fn err(x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }

    #[test]
    fn gcv_contract() {
        let (f, b, x_true) = synthetic();
        assert_eq!(gcv_select(&f, &b, &[0.3]).unwrap(), 0.3);
        assert!(matches!(gcv_select(&f, &b, &[]), Err(Error::EmptyGrid)));
        let grid = log_grid(1e-4, 10.0, 30);
        let g = gcv_select(&f, &b, &grid).unwrap();
        let sp = Spectral::new(&f, &b);
        let gv = sp.gcv(g).unwrap();
        assert!(grid.iter().all(|&h| sp.gcv(h).map_or(true, |v| gv <= v)));
        let e = |g| err(&tikhonov_solve(&f, &b, g).unwrap(), &x_true);
        assert!(e(g) < e(grid[0]) || e(g) < e(*grid.last().unwrap()));
        assert!(e(g) < e(*grid.last().unwrap()));
    }

    #[test]
    fn gcv_degenerate_denominator_skipped() {
        // Square full-rank system: at tiny γ the denominator m - dof vanishes.
        let (f, b, _) = synthetic();
        let g = gcv_select(&f, &b, &[1e-12, 0.5]).unwrap();
        assert_eq!(g, 0.5);
        assert!(matches!(gcv_select(&f, &b, &[1e-12]), Err(Error::EmptyGrid)));
    }

    #[test]
    fn lcurve_near_gcv_on_five_point_grid() {
        // Rectangular so that GCV is well defined everywhere on the grid.
        let a = Mat::from_fn(8, 5, |i, j| if i == j { (j + 1) as f64 } else if i >= 5 { 0.05 * ((i + j) as f64).sin() } else { 0.0 });
        let x_true = vec![1.0, -0.5, 0.25, 2.0, -1.0];
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let b: Vec<f64> = matvec(&a, &x_true).iter().map(|v| v + 0.05 * rng.gen_range(-1.0..1.0)).collect();
        let f = svd(&a).unwrap();
        let grid = log_grid(1e-3, 10.0, 5);
        let lc = lcurve_select(&f, &b, &grid).unwrap();
        let gc = gcv_select(&f, &b, &grid).unwrap();
        let pos = |g: f64| grid.iter().position(|&h| h == g).unwrap() as i64;
        assert!((pos(lc.gamma) - pos(gc)).abs() <= 1, "lcurve {} gcv {}", lc.gamma, gc);
    }

    #[test]
    fn lcurve_collinear_falls_back() {
        // A single singular value gives a straight line in log-log coordinates
        // only in the limit; with b in the null space of Uᵀ both norms are constant.
        let a = mat(&[&[1.0], &[0.0]]);
        let f = svd(&a).unwrap();
        let c = lcurve_select(&f, &[0.0, 1.0], &log_grid(1e-2, 1.0, 5)).unwrap();
        assert!(c.fell_back_to_gcv);
    }

    #[test]
    fn reg_method_parse() {
        assert_eq!("gcv".parse::<RegMethod>().unwrap(), RegMethod::Gcv);
        assert_eq!("lcurve".parse::<RegMethod>().unwrap(), RegMethod::Lcurve);
        assert_eq!("fixed:1e-3".parse::<RegMethod>().unwrap(), RegMethod::Fixed(1e-3));
        assert!("fixed:x".parse::<RegMethod>().is_err());
        assert_eq!(RegMethod::Fixed(0.5).to_string(), "fixed:0.5");
    }

    proptest! {
        #[test]
        fn tikhonov_monotone(seed in 0u64..1000) {
            let a = random(10, 6, seed);
            let b: Vec<f64> = (0..10).map(|i| ((i as u64 + seed) as f64).sin()).collect();
            let f = svd(&a).unwrap();
            let sp = Spectral::new(&f, &b);
            let grid = log_grid(1e-4, 10.0, 10);
            for w in grid.windows(2) {
                prop_assert!(sp.residual2(w[1]) >= sp.residual2(w[0]) - 1e-14);
                prop_assert!(sp.solution2(w[1]) <= sp.solution2(w[0]) + 1e-14);
            }
        }
    }
}
