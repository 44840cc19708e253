//! One-parameter studies over full ensembles.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par::Exec;

use super::config::ExperimentConfig;
use super::ensemble::run_ensemble;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Delta,
    C,
    R,
    NPaths,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Delta => "delta",
            SweepAxis::C => "c",
            SweepAxis::R => "R",
            SweepAxis::NPaths => "n_paths",
        }
    }

    /// `config` with this axis set to `value`.
    pub fn apply(self, config: &ExperimentConfig, value: f64) -> Result<ExperimentConfig> {
        let mut c = *config;
        match self {
            SweepAxis::Delta => c.delta = value,
            SweepAxis::C => c.inverse.c = value,
            SweepAxis::R => c.inverse.sources.r = value,
            SweepAxis::NPaths => {
                if value < 1.0 || value.fract() != 0.0 {
                    return Err(Error::invalid(format!("path count must be a positive integer, got {value}")));
                }
                c.n_paths = value as usize;
            }
        }
        Ok(c)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "delta" => Ok(SweepAxis::Delta),
            "c" => Ok(SweepAxis::C),
            "R" | "r" => Ok(SweepAxis::R),
            "n_paths" | "paths" => Ok(SweepAxis::NPaths),
            _ => Err(Error::invalid(format!("unknown sweep axis {s:?}; expected delta, c, R or n_paths"))),
        }
    }
}

/// One row of a sweep table. `error` is set when the cell failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub value: f64,
    pub mean_e2: f64,
    pub max_e2: f64,
    pub mean_e3: f64,
    pub max_e3: f64,
    pub mean_gamma: f64,
    pub error: Option<String>,
}

/// Runs one ensemble per value, all with the master seed of `config`.
///
/// Cells run one after another; each ensemble parallelizes over its own paths.
pub fn sweep(config: &ExperimentConfig, axis: SweepAxis, values: &[f64], exec: Exec) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(Error::invalid("a sweep needs at least one value"));
    }
    values
        .iter()
        .map(|&value| {
            let cfg = axis.apply(config, value)?;
            Ok(match run_ensemble(&cfg, exec) {
                Ok(run) => {
                    let s = run.report.metrics.summary;
                    SweepRow {
                        value,
                        mean_e2: s.e2.mean,
                        max_e2: s.e2.max,
                        mean_e3: s.e3.mean,
                        max_e3: s.e3.max,
                        mean_gamma: run.report.mean_gamma(),
                        error: None,
                    }
                }
                Err(e) => SweepRow {
                    value,
                    mean_e2: f64::NAN,
                    max_e2: f64::NAN,
                    mean_e3: f64::NAN,
                    max_e3: f64::NAN,
                    mean_gamma: f64::NAN,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::examples::ExampleId;

    #[test]
    fn single_value_matches_ensemble() {
        let mut c = ExperimentConfig::default_for(ExampleId::OneB);
        c.n_paths = 3;
        let rows = sweep(&c, SweepAxis::Delta, &[0.02], Exec::Parallel).unwrap();
        let mut d = c;
        d.delta = 0.02;
        let s = run_ensemble(&d, Exec::Parallel).unwrap().report.metrics.summary;
        assert_eq!(rows[0].mean_e2.to_bits(), s.e2.mean.to_bits());
        assert_eq!(rows[0].max_e3.to_bits(), s.e3.max.to_bits());
    }

    #[test]
    fn failed_cells_are_marked() {
        let mut c = ExperimentConfig::default_for(ExampleId::OneB);
        c.n_paths = 2;
        let rows = sweep(&c, SweepAxis::C, &[0.6, -1.0], Exec::Sequential).unwrap();
        assert!(rows[0].error.is_none());
        assert!(rows[1].error.is_some() && rows[1].mean_e2.is_nan());
    }

    #[test]
    fn axis_parsing() {
        for a in [SweepAxis::Delta, SweepAxis::C, SweepAxis::R, SweepAxis::NPaths] {
            assert_eq!(a.as_str().parse::<SweepAxis>().unwrap(), a);
        }
        assert!("gamma".parse::<SweepAxis>().is_err());
        let c = ExperimentConfig::default_for(ExampleId::OneA);
        assert!(SweepAxis::NPaths.apply(&c, 2.5).is_err());
        assert_eq!(SweepAxis::R.apply(&c, 2.0).unwrap().inverse.sources.r, 2.0);
    }
}
