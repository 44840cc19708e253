//! Seeded Brownian paths and multiplicative measurement noise.
//!
//! All randomness comes from ChaCha8 keyed by a 64-bit seed. Distinct consumers
//! draw from distinct ChaCha streams of the same key, so the increments of path
//! `k` and the noise applied to its data depend only on `(seed, k)` and not on
//! scheduling. Gaussians use the ziggurat sampler of `rand_distr::StandardNormal`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::inverse::CauchySample;

const STREAM_BROWNIAN: u64 = 0;
const STREAM_NOISE: u64 = 1;

/// Generator for `(seed, path, purpose)`.
fn rng_for(seed: u64, path: u64, purpose: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(path.wrapping_mul(2).wrapping_add(purpose));
    rng
}

/// One discrete Wiener trajectory on a uniform grid of `increments.len()` steps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BrownianPath {
    pub seed: u64,
    pub path_index: u64,
    pub dt: f64,
    pub increments: Vec<f64>,
}

impl BrownianPath {
    /// A path with all increments zero (the deterministic limit).
    pub fn zero(steps: usize, horizon: f64) -> Result<Self> {
        check_grid(steps, horizon)?;
        Ok(Self { seed: 0, path_index: 0, dt: horizon / steps as f64, increments: vec![0.0; steps] })
    }

    pub fn steps(&self) -> usize {
        self.increments.len()
    }

    /// `W(T)`.
    pub fn terminal(&self) -> f64 {
        self.increments.iter().sum()
    }
}

fn check_grid(steps: usize, horizon: f64) -> Result<()> {
    if steps == 0 {
        return Err(Error::invalid("a Brownian path needs at least one step"));
    }
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::invalid(format!("time horizon must be positive, got {horizon}")));
    }
    Ok(())
}

/// Path 0 of the ensemble keyed by `seed`.
pub fn generate_path(seed: u64, steps: usize, horizon: f64) -> Result<BrownianPath> {
    generate_ensemble_path(seed, 0, steps, horizon)
}

/// Path `k` of the ensemble keyed by `seed`.
pub fn generate_ensemble_path(seed: u64, k: u64, steps: usize, horizon: f64) -> Result<BrownianPath> {
    check_grid(steps, horizon)?;
    let dt = horizon / steps as f64;
    let sd = dt.sqrt();
    let mut rng = rng_for(seed, k, STREAM_BROWNIAN);
    let increments = (0..steps)
        .map(|_| sd * rng.sample::<f64, _>(StandardNormal))
        .collect();
    Ok(BrownianPath { seed, path_index: k, dt, increments })
}

/// Which traces receive measurement noise.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseTarget {
    /// Dirichlet and Neumann traces, independently.
    #[default]
    Both,
    DirichletOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub delta: f64,
    pub seed: u64,
    /// Sub-stream index, normally the path index.
    #[serde(default)]
    pub stream: u64,
    #[serde(default)]
    pub target: NoiseTarget,
}

impl NoiseSpec {
    pub fn new(delta: f64, seed: u64) -> Self {
        Self { delta, seed, stream: 0, target: NoiseTarget::Both }
    }
}

/// Replaces every stored trace value `v` by `v (1 + δθ)` with `θ ~ U[-1, 1]` i.i.d.
///
/// `h1`, then `h1_t`, then `h2` draw from one stream in that order. With
/// [`NoiseTarget::DirichletOnly`] the Neumann trace is left untouched.
pub fn add_noise(data: &CauchySample, spec: &NoiseSpec) -> Result<CauchySample> {
    if !(spec.delta >= 0.0) || !spec.delta.is_finite() {
        return Err(Error::invalid(format!("noise level must be non-negative, got {}", spec.delta)));
    }
    let mut out = data.clone();
    out.delta = spec.delta;
    if spec.delta == 0.0 {
        return Ok(out);
    }
    let mut rng = rng_for(spec.seed, spec.stream, STREAM_NOISE);
    let mut perturb = |v: &mut Vec<f64>| {
        for x in v.iter_mut() {
            let theta: f64 = rng.gen_range(-1.0..=1.0);
            *x *= 1.0 + spec.delta * theta;
        }
    };
    perturb(&mut out.h1);
    perturb(&mut out.h1_t);
    if spec.target == NoiseTarget::Both {
        perturb(&mut out.h2);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CauchySample {
        let d = crate::geometry::SpaceTimeDomain::interval(0.0, 1.0, 1.0).unwrap();
        let trace = crate::geometry::trace_grid(&d, 2, 5).unwrap();
        let n = trace.len();
        CauchySample {
            h1: (0..n).map(|i| 1.0 + i as f64).collect(),
            h1_t: (0..n).map(|i| -(i as f64)).collect(),
            h2: (0..n).map(|i| (i as f64).sin()).collect(),
            trace,
            n_b: 2,
            n_t: 5,
            path_id: 0,
            delta: 0.0,
        }
    }

    #[test]
    fn empty_path_rejected() {
        assert!(generate_path(1, 0, 1.0).is_err());
        assert!(generate_path(1, 5, 0.0).is_err());
    }

    #[test]
    fn deterministic_and_distinct() {
        let a = generate_path(11, 100, 1.0).unwrap();
        let b = generate_path(11, 100, 1.0).unwrap();
        assert_eq!(a.increments, b.increments);
        let c = generate_path(12, 100, 1.0).unwrap();
        assert_ne!(a.increments, c.increments);
        let d = generate_ensemble_path(11, 1, 100, 1.0).unwrap();
        assert_ne!(a.increments, d.increments);
    }

    #[test]
    fn terminal_variance() {
        let n = 10_000;
        let w: Vec<f64> = (0..n).map(|s| generate_path(s, 20, 1.0).unwrap().terminal()).collect();
        let mean = w.iter().sum::<f64>() / n as f64;
        let var = w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((0.94..=1.06).contains(&var), "var {var}");
    }

    #[test]
    fn increment_moments() {
        let mut xs = Vec::with_capacity(100_000);
        for k in 0..1000 {
            let p = generate_ensemble_path(5, k, 100, 1.0).unwrap();
            xs.extend(p.increments.iter().map(|d| d / p.dt.sqrt()));
        }
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
        let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
        let m4 = xs.iter().map(|x| (x - m).powi(4)).sum::<f64>() / n;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2) - 3.0;
        assert!(skew.abs() < 0.05, "skew {skew}");
        assert!(kurt.abs() < 0.05, "kurt {kurt}");
    }

    #[test]
    fn zero_noise_is_identity() {
        let s = sample();
        let out = add_noise(&s, &NoiseSpec::new(0.0, 3)).unwrap();
        assert_eq!(out.h1, s.h1);
        assert_eq!(out.h2, s.h2);
        assert_eq!(out.h1_t, s.h1_t);
        assert!(add_noise(&s, &NoiseSpec::new(-0.1, 3)).is_err());
    }

    #[test]
    fn noise_bounded_pointwise() {
        let s = sample();
        let delta = 0.1;
        let out = add_noise(&s, &NoiseSpec::new(delta, 3)).unwrap();
        assert_eq!(out.delta, delta);
        for (a, b) in out.h1.iter().zip(&s.h1).chain(out.h2.iter().zip(&s.h2)) {
            assert!((a - b).abs() <= delta * b.abs() + 1e-15);
        }
    }

    #[test]
    fn dirichlet_only_leaves_neumann() {
        let s = sample();
        let spec = NoiseSpec { target: NoiseTarget::DirichletOnly, ..NoiseSpec::new(0.2, 9) };
        let out = add_noise(&s, &spec).unwrap();
        assert_eq!(out.h2, s.h2);
        assert_ne!(out.h1, s.h1);
    }

    #[test]
    fn noise_mean_recovers_input() {
        let s = sample();
        let delta = 0.05;
        let n = 10_000;
        let mut acc = vec![0.0; s.h1.len()];
        for seed in 0..n {
            let out = add_noise(&s, &NoiseSpec::new(delta, seed)).unwrap();
            for (a, v) in acc.iter_mut().zip(&out.h1) {
                *a += v;
            }
        }
        for (a, v) in acc.iter().zip(&s.h1) {
            let m = a / n as f64;
            assert!((m - v).abs() <= 3.0 * delta * v.abs() / (n as f64).sqrt());
        }
    }
}
