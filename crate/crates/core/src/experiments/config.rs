//! Run configuration with per-example defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forward::{FdGrid, MeshlessConfig};
use crate::inverse::InverseConfig;
use crate::stochastic::NoiseTarget;

use super::examples::ExampleId;

/// Which forward solver manufactures the data and the reference field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "lowercase")]
pub enum ForwardConfig {
    Fd(FdGrid),
    Meshless(MeshlessConfig),
}

impl ForwardConfig {
    pub fn n_time(&self) -> usize {
        match self {
            ForwardConfig::Fd(g) => g.n_time,
            ForwardConfig::Meshless(m) => m.n_time,
        }
    }
}

/// Everything a run depends on. Output is a pure function of this value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub example: ExampleId,
    pub n_paths: usize,
    /// Relative measurement noise level.
    pub delta: f64,
    /// Master seed. Path `k` uses stream `k` of this seed.
    pub seed: u64,
    /// Multiplicative noise term in the forward equation.
    pub b4_on: bool,
    pub noise_target: NoiseTarget,
    pub forward: ForwardConfig,
    /// Trace grid: boundary points per time level and time levels.
    pub trace_nb: usize,
    pub trace_nt: usize,
    pub inverse: InverseConfig,
    /// Metrics use every `eval_space_stride`-th node (grids only) and every
    /// `eval_time_stride`-th time level of the forward field.
    pub eval_space_stride: usize,
    pub eval_time_stride: usize,
}

impl ExperimentConfig {
    pub fn default_for(example: ExampleId) -> Self {
        let inverse = InverseConfig::default_for(example.dim());
        match example {
            ExampleId::OneA | ExampleId::OneB | ExampleId::OneC => Self {
                example,
                n_paths: 100,
                delta: 0.03,
                seed: 42,
                b4_on: true,
                noise_target: NoiseTarget::Both,
                forward: ForwardConfig::Fd(FdGrid { n_space: 100, n_time: 200 }),
                trace_nb: 2,
                trace_nt: 101,
                inverse,
                eval_space_stride: 5,
                eval_time_stride: 4,
            },
            ExampleId::TwoA | ExampleId::TwoB => Self {
                example,
                n_paths: 10,
                delta: 0.01,
                seed: 42,
                b4_on: true,
                noise_target: NoiseTarget::Both,
                // The leaf is an eighth of the disk's area, so its nodes sit closer together
                // and need a sharper shape to stay well conditioned.
                forward: ForwardConfig::Meshless(if example == ExampleId::TwoB {
                    MeshlessConfig { shape: 8.0, ..MeshlessConfig::default() }
                } else {
                    MeshlessConfig::default()
                }),
                trace_nb: 34,
                trace_nt: 11,
                inverse,
                eval_space_stride: 1,
                eval_time_stride: 5,
            },
            ExampleId::TwoC => Self {
                example,
                n_paths: 10,
                delta: 0.07,
                seed: 42,
                b4_on: true,
                noise_target: NoiseTarget::Both,
                forward: ForwardConfig::Fd(FdGrid { n_space: 50, n_time: 100 }),
                trace_nb: 40,
                trace_nt: 11,
                inverse,
                eval_space_stride: 1,
                eval_time_stride: 5,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::invalid("n_paths must be at least 1"));
        }
        if !(self.delta >= 0.0) || !self.delta.is_finite() {
            return Err(Error::invalid(format!("delta must be non-negative, got {}", self.delta)));
        }
        if self.eval_space_stride == 0 || self.eval_time_stride == 0 {
            return Err(Error::invalid("evaluation strides must be positive"));
        }
        if self.trace_nt < 2 {
            return Err(Error::invalid("need at least 2 trace time levels"));
        }
        let n_time = self.forward.n_time();
        if n_time % self.eval_time_stride != 0 {
            return Err(Error::invalid(format!(
                "time stride {} does not divide {n_time} steps",
                self.eval_time_stride
            )));
        }
        match (self.example.dim(), self.forward) {
            (1, ForwardConfig::Meshless(_)) => Err(Error::invalid("the meshless solver is two-dimensional")),
            (1, ForwardConfig::Fd(g)) if g.n_space % self.eval_space_stride != 0 => {
                Err(Error::invalid("space stride must divide the number of cells"))
            }
            (2, ForwardConfig::Fd(_)) if self.example != ExampleId::TwoC => {
                Err(Error::invalid("finite differences need a square domain"))
            }
            _ => Ok(()),
        }
    }

    /// Short tag used in file names, e.g. `0.03`.
    pub fn delta_tag(&self) -> String {
        format!("{}", self.delta)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for id in ExampleId::ALL {
            let c = ExperimentConfig::default_for(id);
            c.validate().unwrap();
            let js = serde_json::to_string(&c).unwrap();
            let back: ExperimentConfig = serde_json::from_str(&js).unwrap();
            assert_eq!(back, c);
        }
    }

    #[test]
    fn documented_defaults() {
        let a = ExperimentConfig::default_for(ExampleId::OneB);
        assert_eq!((a.n_paths, a.inverse.c, a.inverse.sources.r), (100, 0.6, 1.5));
        let b = ExperimentConfig::default_for(ExampleId::TwoA);
        assert_eq!((b.n_paths, b.inverse.c, b.inverse.sources.r), (10, 2.5, 1.5));
        assert_eq!(ExperimentConfig::default_for(ExampleId::TwoC).delta, 0.07);
    }

    #[test]
    fn rejects_bad_configs() {
        let mut c = ExperimentConfig::default_for(ExampleId::OneA);
        c.n_paths = 0;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default_for(ExampleId::OneA);
        c.eval_time_stride = 7;
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::default_for(ExampleId::TwoA);
        c.forward = ForwardConfig::Fd(FdGrid { n_space: 20, n_time: 40 });
        assert!(c.validate().is_err());
    }
}
