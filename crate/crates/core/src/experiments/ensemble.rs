//! Monte Carlo driver: forward solve, data extraction, noise, inversion, metrics.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, StageExt};
use crate::forward::{
    extract_cauchy, solve_fd, solve_meshless_2d, DiscreteField, FieldLayout, ForwardProblem, MeshlessOperator,
};
use crate::geometry::{trace_grid, SpaceTimeDomain, SpaceTimePoint};
use crate::inverse::{reconstruct, CauchySample, InverseReport, PreparedInverse};
use crate::par::{map_indexed, Exec};
use crate::stochastic::{add_noise, generate_ensemble_path, NoiseSpec};

use super::config::{ExperimentConfig, ForwardConfig};
use super::metrics::{EvalGrid, Metrics};

/// Data shared by every path of one configuration.
pub struct Setup {
    pub config: ExperimentConfig,
    pub domain: SpaceTimeDomain,
    pub problem: ForwardProblem,
    pub operator: Option<Arc<MeshlessOperator>>,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let domain = config.example.domain();
        let problem = config.example.problem(config.b4_on);
        let operator = match config.forward {
            ForwardConfig::Meshless(m) => Some(Arc::new(MeshlessOperator::new(domain, m).stage("forward")?)),
            ForwardConfig::Fd(_) => None,
        };
        Ok(Self { config: *config, domain, problem, operator })
    }

    /// Forward field of path `k`.
    pub fn forward(&self, k: u64) -> Result<DiscreteField> {
        let cfg = &self.config;
        let path = generate_ensemble_path(cfg.seed, k, cfg.forward.n_time(), self.domain.horizon).stage("forward")?;
        match (&cfg.forward, &self.operator) {
            (ForwardConfig::Fd(g), _) => solve_fd(&self.problem, *g, &path),
            (ForwardConfig::Meshless(_), Some(op)) => solve_meshless_2d(&self.problem, op, &path),
            (ForwardConfig::Meshless(_), None) => unreachable!("operator is built with the setup"),
        }
        .stage("forward")
    }

    /// Noisy Cauchy data of a forward field.
    pub fn data(&self, field: &DiscreteField, k: u64) -> Result<CauchySample> {
        let cfg = &self.config;
        let clean = extract_cauchy(field, &self.domain, cfg.trace_nb, cfg.trace_nt).stage("extract")?;
        let spec = NoiseSpec { delta: cfg.delta, seed: cfg.seed, stream: k, target: cfg.noise_target };
        add_noise(&clean, &spec).stage("noise")
    }

    /// Field indices and time levels used for metrics.
    pub fn selection(&self, field: &DiscreteField) -> (Vec<usize>, Vec<usize>) {
        let s = self.config.eval_space_stride;
        let nodes = match &field.layout {
            FieldLayout::Grid1d { x } => (0..x.len()).step_by(s).collect(),
            FieldLayout::Grid2d { x, .. } => {
                let n1 = x.len();
                field.interior_nodes().into_iter().filter(|i| (i % n1) % s == 0 && (i / n1) % s == 0).collect()
            }
            FieldLayout::Scattered { op } => (0..op.n_interior).step_by(s).collect(),
        };
        let levels = (0..field.times.len()).step_by(self.config.eval_time_stride).collect();
        (nodes, levels)
    }

    pub fn eval_grid(&self, field: &DiscreteField) -> EvalGrid {
        let (idx, levels) = self.selection(field);
        let nodes: Vec<_> = idx.iter().map(|&i| field.node(i)).collect();
        let times: Vec<f64> = levels.iter().map(|&k| field.times[k]).collect();
        let tau = if times.len() > 1 { times[1] - times[0] } else { self.domain.horizon };
        let (weights, mask) = if self.domain.dim() == 1 {
            let xs: Vec<f64> = nodes.iter().map(|p| p[0]).collect();
            let mask = xs.iter().map(|&x| (0.1 - 1e-12..=0.9 + 1e-12).contains(&x)).collect();
            (EvalGrid::trapezoid(&xs), mask)
        } else {
            let w = self.domain.measure() / nodes.len() as f64;
            (vec![w; nodes.len()], vec![true; nodes.len()])
        };
        EvalGrid { nodes, times, weights, tau, mask }
    }
}

/// Reference and reconstruction of one successful path.
#[derive(Debug, Clone)]
pub struct PathOutcome {
    pub reference: Vec<f64>,
    pub reconstruction: Vec<f64>,
    pub data: CauchySample,
    pub report: InverseReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathFailure {
    pub path: u64,
    pub error: String,
}

/// Per-path diagnostics kept in the report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSummary {
    pub path: u64,
    pub gamma: f64,
    pub residual_norm: f64,
    pub solution_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub config: ExperimentConfig,
    pub metrics: Metrics,
    pub paths: Vec<PathSummary>,
    pub failures: Vec<PathFailure>,
}

impl ErrorReport {
    pub fn gammas(&self) -> Vec<f64> {
        self.paths.iter().map(|p| p.gamma).collect()
    }

    pub fn mean_gamma(&self) -> f64 {
        self.paths.iter().map(|p| p.gamma).sum::<f64>() / self.paths.len().max(1) as f64
    }
}

pub struct EnsembleRun {
    pub grid: EvalGrid,
    /// Successful paths in path order.
    pub outcomes: Vec<(u64, PathOutcome)>,
    pub report: ErrorReport,
}

impl EnsembleRun {
    pub fn references(&self) -> Vec<Vec<f64>> {
        self.outcomes.iter().map(|(_, o)| o.reference.clone()).collect()
    }

    pub fn reconstructions(&self) -> Vec<Vec<f64>> {
        self.outcomes.iter().map(|(_, o)| o.reconstruction.clone()).collect()
    }
}

/// Shared inverse factorization for a configuration.
pub fn prepare_inverse(setup: &Setup) -> Result<PreparedInverse> {
    let cfg = &setup.config;
    let trace = trace_grid(&setup.domain, cfg.trace_nb, cfg.trace_nt).stage("extract")?;
    PreparedInverse::new(&setup.domain, &trace, &cfg.inverse)
}

fn run_path(setup: &Setup, inverse: &PreparedInverse, k: u64) -> Result<(EvalGrid, PathOutcome)> {
    let field = setup.forward(k)?;
    let data = setup.data(&field, k)?;
    let sol = inverse.solve(&data, &*setup.problem.f)?;
    let grid = setup.eval_grid(&field);
    let (idx, levels) = setup.selection(&field);
    let reference: Vec<f64> =
        levels.iter().flat_map(|&l| { let z = field.level(l); idx.iter().map(move |&i| z[i]) }).collect();
    let points: Vec<SpaceTimePoint> =
        grid.times.iter().flat_map(|&t| grid.nodes.iter().map(move |&x| SpaceTimePoint { x, t })).collect();
    let reconstruction = reconstruct(&sol.coefficients, &inverse.basis, &points);
    Ok((grid, PathOutcome { reference, reconstruction, data, report: sol.report }))
}

/// Runs every path, drops failures, and computes the ensemble metrics.
///
/// Results do not depend on `exec`: each path is a function of `(seed, k)` and
/// reductions run in path order.
pub fn run_ensemble(config: &ExperimentConfig, exec: Exec) -> Result<EnsembleRun> {
    let setup = Setup::new(config)?;
    let inverse = prepare_inverse(&setup)?;
    run_prepared(&setup, &inverse, exec)
}

/// [`run_ensemble`] with the shared setup and factorization supplied.
pub fn run_prepared(setup: &Setup, inverse: &PreparedInverse, exec: Exec) -> Result<EnsembleRun> {
    let n = setup.config.n_paths;
    let results = map_indexed(exec, n, |k| run_path(setup, inverse, k as u64));
    let mut grid = None;
    let mut outcomes = Vec::new();
    let mut failures = Vec::new();
    for (k, r) in results.into_iter().enumerate() {
        match r {
            Ok((g, o)) => {
                grid.get_or_insert(g);
                outcomes.push((k as u64, o));
            }
            Err(e) => failures.push(PathFailure { path: k as u64, error: e.to_string() }),
        }
    }
    if failures.len() * 10 > n || outcomes.is_empty() {
        return Err(Error::TooManyFailures { failed: failures.len(), total: n });
    }
    let grid = grid.expect("at least one path succeeded");
    let refs: Vec<Vec<f64>> = outcomes.iter().map(|(_, o)| o.reference.clone()).collect();
    let recs: Vec<Vec<f64>> = outcomes.iter().map(|(_, o)| o.reconstruction.clone()).collect();
    let metrics = Metrics::compute(&grid, &refs, &recs);
    let paths = outcomes
        .iter()
        .map(|(k, o)| PathSummary {
            path: *k,
            gamma: o.report.gamma,
            residual_norm: o.report.residual_norm,
            solution_norm: o.report.solution_norm,
        })
        .collect();
    let report = ErrorReport { config: setup.config, metrics, paths, failures };
    Ok(EnsembleRun { grid, outcomes, report })
}

/// Forward fields reduced to noisy Cauchy data, one entry per path.
pub fn generate_data(config: &ExperimentConfig, exec: Exec) -> Result<Vec<Result<CauchySample>>> {
    let setup = Setup::new(config)?;
    Ok(map_indexed(exec, config.n_paths, |k| {
        let field = setup.forward(k as u64)?;
        setup.data(&field, k as u64)
    }))
}
