//! The six benchmark problems.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::forward::ForwardProblem;
use crate::geometry::{Point, SpaceTimeDomain};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ExampleId {
    /// Interval, `z = e^{x+t}` in expectation.
    #[serde(rename = "1d-a")]
    OneA,
    /// Interval, `z = sin(πx) e^{-t}` in expectation.
    #[serde(rename = "1d-b")]
    OneB,
    /// Interval, tent initial displacement.
    #[serde(rename = "1d-c")]
    OneC,
    /// Unit disk, `z = t² sin π(x1 + x2)` in expectation.
    #[serde(rename = "2d-a")]
    TwoA,
    /// Leaf, `z = t² cos πx1 cos πx2` in expectation.
    #[serde(rename = "2d-b")]
    TwoB,
    /// Unit square, discontinuous bump initial displacement.
    #[serde(rename = "2d-c")]
    TwoC,
}

impl ExampleId {
    pub const ALL: [ExampleId; 6] =
        [ExampleId::OneA, ExampleId::OneB, ExampleId::OneC, ExampleId::TwoA, ExampleId::TwoB, ExampleId::TwoC];

    pub fn as_str(self) -> &'static str {
        match self {
            ExampleId::OneA => "1d-a",
            ExampleId::OneB => "1d-b",
            ExampleId::OneC => "1d-c",
            ExampleId::TwoA => "2d-a",
            ExampleId::TwoB => "2d-b",
            ExampleId::TwoC => "2d-c",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            ExampleId::OneA | ExampleId::OneB | ExampleId::OneC => 1,
            _ => 2,
        }
    }

    pub fn domain(self) -> SpaceTimeDomain {
        let d = match self {
            ExampleId::OneA | ExampleId::OneB | ExampleId::OneC => SpaceTimeDomain::interval(0.0, 1.0, 1.0),
            ExampleId::TwoA => SpaceTimeDomain::disk([0.0, 0.0], 1.0, 1.0),
            ExampleId::TwoB => SpaceTimeDomain::leaf(1.0),
            ExampleId::TwoC => SpaceTimeDomain::unit_square(1.0),
        };
        d.expect("built-in domains are valid")
    }

    /// Forward problem data; `b4_on` toggles the multiplicative noise.
    pub fn problem(self, b4_on: bool) -> ForwardProblem {
        let domain = self.domain();
        let zero_s: Arc<dyn Fn(&Point) -> f64 + Send + Sync> = Arc::new(|_| 0.0);
        let zero_st: Arc<dyn Fn(&Point, f64) -> f64 + Send + Sync> = Arc::new(|_, _| 0.0);
        match self {
            ExampleId::OneA => ForwardProblem {
                domain,
                z0: Arc::new(|p| p[0].exp()),
                z0_dot: Arc::new(|p| p[0].exp()),
                f: zero_st.clone(),
                h1: Arc::new(|p, t| (p[0] + t).exp()),
                b4_on,
            },
            ExampleId::OneB => ForwardProblem {
                domain,
                z0: Arc::new(|p| (PI * p[0]).sin()),
                z0_dot: Arc::new(|p| -(PI * p[0]).sin()),
                f: Arc::new(|p, t| (1.0 + PI * PI) * (PI * p[0]).sin() * (-t).exp()),
                h1: zero_st.clone(),
                b4_on,
            },
            ExampleId::OneC => ForwardProblem {
                domain,
                z0: Arc::new(|p| if p[0] < 0.7 { p[0] / 0.7 } else { (1.0 - p[0]) / 0.3 }),
                z0_dot: zero_s.clone(),
                f: zero_st.clone(),
                h1: zero_st.clone(),
                b4_on,
            },
            ExampleId::TwoA => ForwardProblem {
                domain,
                z0: zero_s.clone(),
                z0_dot: zero_s.clone(),
                f: Arc::new(|p, t| 2.0 * (1.0 + PI * PI * t * t) * (PI * (p[0] + p[1])).sin()),
                h1: Arc::new(|p, t| t * t * (PI * (p[0] + p[1])).sin()),
                b4_on,
            },
            ExampleId::TwoB => ForwardProblem {
                domain,
                z0: zero_s.clone(),
                z0_dot: zero_s.clone(),
                f: Arc::new(|p, t| 2.0 * (1.0 + PI * PI * t * t) * (PI * p[0]).cos() * (PI * p[1]).cos()),
                h1: Arc::new(|p, t| t * t * (PI * p[0]).cos() * (PI * p[1]).cos()),
                b4_on,
            },
            ExampleId::TwoC => ForwardProblem {
                domain,
                z0: Arc::new(|p| {
                    let inside = |v: f64| (0.4..=0.6).contains(&v);
                    if inside(p[0]) && inside(p[1]) { 1.0 } else { 0.0 }
                }),
                z0_dot: zero_s,
                f: zero_st.clone(),
                h1: zero_st,
                b4_on,
            },
        }
    }

    /// Closed-form solution of the noise-free problem, where one exists.
    pub fn exact(self) -> Option<fn(&Point, f64) -> f64> {
        match self {
            ExampleId::OneA => Some(|p, t| (p[0] + t).exp()),
            ExampleId::OneB => Some(|p, t| (PI * p[0]).sin() * (-t).exp()),
            ExampleId::TwoA => Some(|p, t| t * t * (PI * (p[0] + p[1])).sin()),
            ExampleId::TwoB => Some(|p, t| t * t * (PI * p[0]).cos() * (PI * p[1]).cos()),
            _ => None,
        }
    }
}

impl fmt::Display for ExampleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExampleId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        ExampleId::ALL
            .into_iter()
            .find(|e| e.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown example {s:?}; expected one of 1d-a, 1d-b, 1d-c, 2d-a, 2d-b, 2d-c")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `z_tt - Δz` of a closed form by central differences.
    fn residual(u: fn(&Point, f64) -> f64, dim: usize, p: Point, t: f64) -> f64 {
        let h = 1e-4;
        let c = u(&p, t);
        let tt = (u(&p, t + h) - 2.0 * c + u(&p, t - h)) / (h * h);
        let xx = (u(&[p[0] + h, p[1]], t) - 2.0 * c + u(&[p[0] - h, p[1]], t)) / (h * h);
        let yy = if dim == 2 { (u(&[p[0], p[1] + h], t) - 2.0 * c + u(&[p[0], p[1] - h], t)) / (h * h) } else { 0.0 };
        tt - xx - yy
    }

    #[test]
    fn closed_forms_solve_their_problems() {
        for id in ExampleId::ALL {
            let Some(u) = id.exact() else { continue };
            let prob = id.problem(false);
            for &(x, y, t) in &[(0.3, 0.2, 0.4), (0.7, 0.1, 0.9), (0.5, 0.45, 0.2)] {
                let p = [x, if id.dim() == 1 { 0.0 } else { y }];
                let r = residual(u, id.dim(), p, t);
                assert!((r - (prob.f)(&p, t)).abs() < 1e-4 * (1.0 + r.abs()), "{id}");
                // Initial data.
                let e = 1e-6;
                assert!(((prob.z0)(&p) - u(&p, 0.0)).abs() < 1e-12);
                let v = (u(&p, e) - u(&p, -e)) / (2.0 * e);
                assert!(((prob.z0_dot)(&p) - v).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn ids_round_trip() {
        for id in ExampleId::ALL {
            assert_eq!(id.as_str().parse::<ExampleId>().unwrap(), id);
            let js = serde_json::to_string(&id).unwrap();
            assert_eq!(js, format!("\"{id}\""));
        }
        assert!("3d-a".parse::<ExampleId>().is_err());
    }

    #[test]
    fn tent_peaks_at_seven_tenths() {
        let p = ExampleId::OneC.problem(true);
        assert!(((p.z0)(&[0.7, 0.0]) - 1.0).abs() < 1e-12);
        assert_eq!((p.z0)(&[0.0, 0.0]), 0.0);
        assert!((p.z0)(&[1.0, 0.0]).abs() < 1e-12);
    }
}
