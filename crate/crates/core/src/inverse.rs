//! Collocation system for the inverse Cauchy problem and its regularized solution.
//!
//! The field is sought as `z̃ = Σ λ_j φ_j + Σ ζ_j ψ_j`. Rows come in blocks:
//! interior rows ask `□z̃ = f` (only the multiquadrics contribute, since each `φ_j`
//! solves the homogeneous equation away from its source), Dirichlet rows ask
//! `z̃ = h1` and Neumann rows ask `∂_ν z̃ = h2` on the trace grid. Each block is
//! scaled to unit row RMS before the Tikhonov solve.
//!
//! The matrix depends only on geometry, so [`PreparedInverse`] factors it once and
//! then solves for any number of data sets sharing the same trace grid.

use faer::Mat;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::geometry::{interior_collocation, norm2, sub, Point, SpaceTimeDomain, SpaceTimePoint, TracePoint};
use crate::kernels::{
    check_separation, green_normal_derivative_with, green_r2, green_time_derivative, mq_normal_derivative,
    mq_wave_operator, multiquadric, place_sources, Family, GreenNormalization, MultiquadricParams, SourceConfig,
    SourceLayout,
};
use crate::linsolve::{default_grid, regularized_solve, svd, RegMethod, SvdFactors};

/// Lateral Cauchy data of one path on a time-major trace grid.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchySample {
    pub trace: Vec<TracePoint>,
    pub n_b: usize,
    pub n_t: usize,
    pub h1: Vec<f64>,
    pub h1_t: Vec<f64>,
    pub h2: Vec<f64>,
    pub path_id: u64,
    /// Noise level applied, `0` for clean data.
    pub delta: f64,
}

impl CauchySample {
    fn check(&self) -> Result<()> {
        let n = self.trace.len();
        if self.h1.len() != n || self.h1_t.len() != n || self.h2.len() != n || n != self.n_b * self.n_t {
            return Err(Error::invalid("Cauchy data arrays do not conform to the trace grid"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseConfig {
    /// Multiquadric shape parameter `c`.
    pub c: f64,
    pub sources: SourceConfig,
    #[serde(default)]
    pub normalization: GreenNormalization,
    /// Interior collocation: spatial target count and number of time levels.
    pub interior_space: usize,
    pub interior_times: usize,
    pub reg: RegMethod,
    /// Size of the log-spaced parameter grid.
    pub grid_size: usize,
    /// Adds rows fitting `∂_t h1`.
    #[serde(default)]
    pub time_derivative_rows: bool,
}

impl InverseConfig {
    pub fn default_for(dim: usize) -> Self {
        if dim == 1 {
            Self {
                c: 0.6,
                sources: SourceConfig::default_for(1),
                normalization: GreenNormalization::SqrtTwoPi,
                interior_space: 10,
                interior_times: 10,
                reg: RegMethod::Gcv,
                grid_size: 40,
                time_derivative_rows: false,
            }
        } else {
            Self {
                c: 2.5,
                sources: SourceConfig::default_for(2),
                normalization: GreenNormalization::SqrtTwoPi,
                interior_space: 95,
                interior_times: 8,
                reg: RegMethod::Lcurve,
                grid_size: 40,
                time_derivative_rows: false,
            }
        }
    }
}

/// The two basis families with their sources.
#[derive(Debug, Clone)]
pub struct Basis {
    pub dim: usize,
    pub green: SourceLayout,
    pub mq: SourceLayout,
    pub params: MultiquadricParams,
    pub normalization: GreenNormalization,
}

impl Basis {
    pub fn new(domain: &SpaceTimeDomain, cfg: &InverseConfig) -> Result<Self> {
        Ok(Self {
            dim: domain.dim(),
            green: place_sources(domain, &cfg.sources, Family::Green)?,
            mq: place_sources(domain, &cfg.sources, Family::Mq)?,
            params: MultiquadricParams::new(cfg.c)?,
            normalization: cfg.normalization,
        })
    }

    pub fn n_green(&self) -> usize {
        self.green.len()
    }

    pub fn n_cols(&self) -> usize {
        self.green.len() + self.mq.len()
    }

    /// `z̃(x, t)` for coefficients ordered `(λ, ζ)`.
    pub fn eval(&self, coeffs: &[f64], x: &Point, t: f64) -> f64 {
        let ng = self.n_green();
        let mut acc = 0.0;
        for (s, c) in self.green.points.iter().zip(&coeffs[..ng]) {
            if *c != 0.0 {
                acc += c * green_r2(self.dim, norm2(&sub(x, &s.x)), t - s.t, self.normalization);
            }
        }
        for (s, c) in self.mq.points.iter().zip(&coeffs[ng..]) {
            acc += c * multiquadric(&self.params, &sub(x, &s.x), t - s.t);
        }
        acc
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSizes {
    pub pde: usize,
    pub dirichlet: usize,
    pub neumann: usize,
    pub time_derivative: usize,
}

impl BlockSizes {
    pub fn total(&self) -> usize {
        self.pde + self.dirichlet + self.neumann + self.time_derivative
    }

    fn ranges(&self) -> [std::ops::Range<usize>; 4] {
        let a = self.pde;
        let b = a + self.dirichlet;
        let c = b + self.neumann;
        [0..a, a..b, b..c, c..c + self.time_derivative]
    }
}

/// Scaled system `A Λ = b` with the layouts that produced it.
#[derive(Debug, Clone)]
pub struct CollocationSystem {
    pub a: Mat<f64>,
    pub b: Vec<f64>,
    pub basis: Basis,
    pub interior: Vec<SpaceTimePoint>,
    pub trace: Vec<TracePoint>,
    pub blocks: BlockSizes,
    /// Divisor applied to each block (PDE, Dirichlet, Neumann, time derivative).
    pub scales: [f64; 4],
}

fn kernel_error(source_index: usize, row: usize) -> Error {
    Error::NonFiniteKernel { source_index, row }
}

/// Builds the scaled matrix. Rows: PDE, Dirichlet, Neumann, then optional `∂_t h1` rows.
pub fn assemble_matrix(
    basis: &Basis,
    interior: &[SpaceTimePoint],
    trace: &[TracePoint],
    time_derivative_rows: bool,
) -> Result<(Mat<f64>, BlockSizes, [f64; 4])> {
    let dim = basis.dim;
    let ng = basis.n_green();
    let blocks = BlockSizes {
        pde: interior.len(),
        dirichlet: trace.len(),
        neumann: trace.len(),
        time_derivative: if time_derivative_rows { trace.len() } else { 0 },
    };
    let (m, n) = (blocks.total(), basis.n_cols());
    let mut a = Mat::<f64>::zeros(m, n);
    let p = &basis.params;
    let norm = basis.normalization;
    for (i, q) in interior.iter().enumerate() {
        for (j, s) in basis.mq.points.iter().enumerate() {
            a.write(i, ng + j, mq_wave_operator(p, dim, &sub(&q.x, &s.x), q.t - s.t));
        }
    }
    let r = blocks.ranges();
    for (k, tp) in trace.iter().enumerate() {
        for (j, s) in basis.green.points.iter().enumerate() {
            let dx = sub(&tp.x, &s.x);
            let dt = tp.t - s.t;
            a.write(r[1].start + k, j, green_r2(dim, norm2(&dx), dt, norm));
            if dim == 2 {
                // The one-dimensional kernel is locally constant off its cone.
                let d = green_normal_derivative_with(dim, &dx, &tp.normal, dt, norm)
                    .map_err(|_| kernel_error(j, r[2].start + k))?;
                a.write(r[2].start + k, j, d);
            }
            if time_derivative_rows {
                a.write(r[3].start + k, j, green_time_derivative(dim, norm2(&dx), dt, norm));
            }
        }
        for (j, s) in basis.mq.points.iter().enumerate() {
            let dx = sub(&tp.x, &s.x);
            let dt = tp.t - s.t;
            let psi = multiquadric(p, &dx, dt);
            a.write(r[1].start + k, ng + j, psi);
            a.write(r[2].start + k, ng + j, mq_normal_derivative(p, &dx, &tp.normal, dt));
            if time_derivative_rows {
                a.write(r[3].start + k, ng + j, p.c * p.c * dt / psi);
            }
        }
    }
    let mut scales = [1.0; 4];
    for (bi, rows) in r.iter().enumerate() {
        if rows.is_empty() {
            continue;
        }
        let mut ss = 0.0;
        for j in 0..n {
            for i in rows.clone() {
                let v = a.read(i, j);
                if !v.is_finite() {
                    let src = if j < ng { j } else { j - ng };
                    return Err(kernel_error(src, i));
                }
                ss += v * v;
            }
        }
        let rms = (ss / (rows.len() * n) as f64).sqrt();
        if rms > 0.0 {
            scales[bi] = rms;
            for j in 0..n {
                for i in rows.clone() {
                    a.write(i, j, a.read(i, j) / rms);
                }
            }
        }
    }
    Ok((a, blocks, scales))
}

fn rhs(
    cauchy: &CauchySample,
    f: &dyn Fn(&Point, f64) -> f64,
    interior: &[SpaceTimePoint],
    blocks: &BlockSizes,
    scales: &[f64; 4],
) -> Vec<f64> {
    let mut b = Vec::with_capacity(blocks.total());
    b.extend(interior.iter().map(|q| f(&q.x, q.t) / scales[0]));
    b.extend(cauchy.h1.iter().map(|v| v / scales[1]));
    b.extend(cauchy.h2.iter().map(|v| v / scales[2]));
    if blocks.time_derivative > 0 {
        b.extend(cauchy.h1_t.iter().map(|v| v / scales[3]));
    }
    b
}

/// Full collocation system for one data set.
pub fn assemble(
    domain: &SpaceTimeDomain,
    cauchy: &CauchySample,
    f: &dyn Fn(&Point, f64) -> f64,
    basis: &Basis,
    interior: &[SpaceTimePoint],
    time_derivative_rows: bool,
) -> Result<CollocationSystem> {
    cauchy.check()?;
    if basis.dim != domain.dim() {
        return Err(Error::invalid("basis and domain dimensions differ"));
    }
    let pts: Vec<SpaceTimePoint> =
        interior.iter().copied().chain(cauchy.trace.iter().map(|t| SpaceTimePoint { x: t.x, t: t.t })).collect();
    check_separation(&basis.green, &pts)?;
    check_separation(&basis.mq, &pts)?;
    let (a, blocks, scales) = assemble_matrix(basis, interior, &cauchy.trace, time_derivative_rows)?;
    let b = rhs(cauchy, f, interior, &blocks, &scales);
    Ok(CollocationSystem {
        a,
        b,
        basis: basis.clone(),
        interior: interior.to_vec(),
        trace: cauchy.trace.clone(),
        blocks,
        scales,
    })
}

/// Solved coefficients, split by family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizedCoefficients {
    pub lambda: Vec<f64>,
    pub zeta: Vec<f64>,
    pub gamma: f64,
    /// `‖AΛ - b‖` in the scaled system.
    pub residual_norm: f64,
    pub solution_norm: f64,
}

impl RegularizedCoefficients {
    /// `(λ, ζ)` concatenated.
    pub fn stacked(&self) -> Vec<f64> {
        self.lambda.iter().chain(&self.zeta).copied().collect()
    }
}

/// Diagnostic summary of one solve.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseReport {
    pub gamma: f64,
    pub residual_norm: f64,
    pub solution_norm: f64,
    /// Unscaled residual norms of the PDE, Dirichlet, Neumann and `∂_t h1` blocks.
    pub block_residuals: [f64; 4],
    pub lcurve_fell_back_to_gcv: bool,
    pub rows: usize,
    pub cols: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub path_id: u64,
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct InverseSolution {
    pub coefficients: RegularizedCoefficients,
    pub report: InverseReport,
}

/// Evaluates `z̃` at `points`. Linear in `coeffs`.
pub fn reconstruct(coeffs: &RegularizedCoefficients, basis: &Basis, points: &[SpaceTimePoint]) -> Vec<f64> {
    let c = coeffs.stacked();
    points.iter().map(|p| basis.eval(&c, &p.x, p.t)).collect()
}

/// Factored system for a fixed geometry, reusable across data sets.
#[derive(Debug, Clone)]
pub struct PreparedInverse {
    pub domain: SpaceTimeDomain,
    pub config: InverseConfig,
    pub basis: Basis,
    pub interior: Vec<SpaceTimePoint>,
    pub trace: Vec<TracePoint>,
    pub a: Mat<f64>,
    pub blocks: BlockSizes,
    pub scales: [f64; 4],
    pub svd: SvdFactors,
    pub grid: Vec<f64>,
}

impl PreparedInverse {
    pub fn new(domain: &SpaceTimeDomain, trace: &[TracePoint], config: &InverseConfig) -> Result<Self> {
        let basis = Basis::new(domain, config).stage("place_sources")?;
        let interior = interior_collocation(domain, config.interior_space, config.interior_times).stage("place_sources")?;
        let pts: Vec<SpaceTimePoint> =
            interior.iter().copied().chain(trace.iter().map(|t| SpaceTimePoint { x: t.x, t: t.t })).collect();
        check_separation(&basis.green, &pts).stage("place_sources")?;
        check_separation(&basis.mq, &pts).stage("place_sources")?;
        let (a, blocks, scales) =
            assemble_matrix(&basis, &interior, trace, config.time_derivative_rows).stage("assemble")?;
        let svd = svd(&a).stage("svd")?;
        let grid = default_grid(&svd, config.grid_size.max(1));
        Ok(Self { domain: *domain, config: *config, basis, interior, trace: trace.to_vec(), a, blocks, scales, svd, grid })
    }

    /// Scaled right-hand side for `cauchy`, aligned with the rows of `a`.
    pub fn rhs(&self, cauchy: &CauchySample, f: &dyn Fn(&Point, f64) -> f64) -> Result<Vec<f64>> {
        cauchy.check().stage("assemble")?;
        if cauchy.trace.len() != self.trace.len()
            || cauchy.trace.iter().zip(&self.trace).any(|(p, q)| p.x != q.x || p.t != q.t)
        {
            return Err(Error::invalid("data were sampled on a different trace grid")).stage("assemble");
        }
        Ok(rhs(cauchy, f, &self.interior, &self.blocks, &self.scales))
    }

    pub fn solve(&self, cauchy: &CauchySample, f: &dyn Fn(&Point, f64) -> f64) -> Result<InverseSolution> {
        let b = self.rhs(cauchy, f)?;
        let sol = regularized_solve(&self.svd, &b, self.config.reg, &self.grid).stage("regularize")?;
        let ng = self.basis.n_green();
        let block_residuals = self.block_residuals(&sol.coefficients, &b);
        let residual_norm = self.residual_norm(&sol.coefficients, &b);
        let coefficients = RegularizedCoefficients {
            lambda: sol.coefficients[..ng].to_vec(),
            zeta: sol.coefficients[ng..].to_vec(),
            gamma: sol.gamma,
            residual_norm,
            solution_norm: sol.solution_norm,
        };
        let report = InverseReport {
            gamma: sol.gamma,
            residual_norm,
            solution_norm: sol.solution_norm,
            block_residuals,
            lcurve_fell_back_to_gcv: sol.fell_back_to_gcv,
            rows: self.a.nrows(),
            cols: self.a.ncols(),
            sigma_max: self.svd.sigma_max(),
            sigma_min: self.svd.sigma_min(),
            path_id: cauchy.path_id,
            delta: cauchy.delta,
        };
        Ok(InverseSolution { coefficients, report })
    }

    /// `‖AΛ - b‖` of the scaled system, recomputed from the matrix.
    fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        (0..self.a.nrows())
            .map(|i| ((0..x.len()).map(|j| self.a.read(i, j) * x[j]).sum::<f64>() - b[i]).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn block_residuals(&self, x: &[f64], b: &[f64]) -> [f64; 4] {
        let mut out = [0.0; 4];
        for (bi, rows) in self.blocks.ranges().iter().enumerate() {
            let mut ss = 0.0;
            for i in rows.clone() {
                let r: f64 = (0..x.len()).map(|j| self.a.read(i, j) * x[j]).sum::<f64>() - b[i];
                ss += r * r;
            }
            out[bi] = ss.sqrt() * self.scales[bi];
        }
        out
    }
}

/// Sources, assembly, SVD, parameter choice, filter-factor solve and evaluation.
pub fn solve_inverse(
    domain: &SpaceTimeDomain,
    cauchy: &CauchySample,
    f: &dyn Fn(&Point, f64) -> f64,
    config: &InverseConfig,
    eval_points: &[SpaceTimePoint],
) -> Result<(InverseSolution, Vec<f64>)> {
    let prepared = PreparedInverse::new(domain, &cauchy.trace, config)?;
    let sol = prepared.solve(cauchy, f)?;
    let values = reconstruct(&sol.coefficients, &prepared.basis, eval_points);
    Ok((sol, values))
}
