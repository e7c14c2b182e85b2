//! Probability that a random pair of users differing only in a binary
//! discriminative feature forms an incoherent pair, given the disparity
//! between the two groups' success rates.
//!
//! `B` is "the non-discriminated user succeeds", `A` is "the discriminated
//! user succeeds", and `P(A) = alpha * P(B)`. The pair is incoherent when
//! exactly one of the two succeeds.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The four-fifths rule: a disparity ratio below this is usually read as
/// disparate impact. Used for annotation only.
pub const EIGHTY_PERCENT_RULE: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// `A` and `B` independent.
    Independence,
    /// `A` implies `B`.
    Dependence,
}

impl Scenario {
    pub const ALL: [Scenario; 2] = [Scenario::Independence, Scenario::Dependence];

    pub fn as_str(self) -> &'static str {
        match self {
            Scenario::Independence => "independence",
            Scenario::Dependence => "dependence",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independence" => Ok(Scenario::Independence),
            "dependence" => Ok(Scenario::Dependence),
            other => Err(Error::InvalidArgument(format!("unknown scenario `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisparityParams {
    pub alpha: f64,
    pub p_b: f64,
    pub scenario: Scenario,
}

impl DisparityParams {
    pub fn new(alpha: f64, p_b: f64, scenario: Scenario) -> Result<Self> {
        let p = Self { alpha, p_b, scenario };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "alpha {} is outside (0, 1]",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.p_b) {
            return Err(Error::InvalidArgument(format!("p_b {} is outside [0, 1]", self.p_b)));
        }
        Ok(())
    }

    /// Below the four-fifths threshold.
    pub fn is_disparate(&self) -> bool {
        self.alpha < EIGHTY_PERCENT_RULE
    }
}

/// `P(IP) = P(B)(1 + alpha) - 2 P(A and B)`.
pub fn ip_probability(params: &DisparityParams) -> Result<f64> {
    params.validate()?;
    let DisparityParams { alpha, p_b, scenario } = *params;
    Ok(match scenario {
        Scenario::Independence => p_b * (1.0 + alpha) - 2.0 * alpha * p_b * p_b,
        Scenario::Dependence => p_b * (1.0 - alpha),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub scenario: Scenario,
    pub alpha: f64,
    pub p_b: f64,
    pub p_ip: f64,
}

/// Every combination of scenario, alpha and p_b, in that nesting order.
pub fn emit_curves(alphas: &[f64], p_bs: &[f64], scenarios: &[Scenario]) -> Result<Vec<CurvePoint>> {
    let mut out = Vec::with_capacity(alphas.len() * p_bs.len() * scenarios.len());
    for &scenario in scenarios {
        for &alpha in alphas {
            for &p_b in p_bs {
                let p_ip = ip_probability(&DisparityParams::new(alpha, p_b, scenario)?)?;
                out.push(CurvePoint {
                    scenario,
                    alpha,
                    p_b,
                    p_ip,
                });
            }
        }
    }
    Ok(out)
}

/// `n + 1` evenly spaced points on [0, 1].
pub fn unit_grid(n: usize) -> Vec<f64> {
    let n = n.max(1);
    (0..=n).map(|i| i as f64 / n as f64).collect()
}

/// `scenario,alpha,p_b,p_ip`.
pub fn write_curves_csv<W: Write>(out: W, points: &[CurvePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["scenario", "alpha", "p_b", "p_ip"])?;
    for p in points {
        w.write_record([
            p.scenario.as_str().to_owned(),
            format!("{:.6}", p.alpha),
            format!("{:.6}", p.p_b),
            format!("{:.6}", p.p_ip),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(alpha: f64, p_b: f64, s: Scenario) -> f64 {
        ip_probability(&DisparityParams::new(alpha, p_b, s).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        for p_b in unit_grid(10) {
            assert_eq!(p(1.0, p_b, Scenario::Dependence), 0.0);
        }
        assert!((p(1.0, 0.5, Scenario::Independence) - 0.5).abs() < 1e-15);
        assert!((p(0.1, 0.5, Scenario::Dependence) - 0.45).abs() < 1e-15);
    }

    #[test]
    fn parameter_ranges() {
        assert!(DisparityParams::new(0.0, 0.5, Scenario::Dependence).is_err());
        assert!(DisparityParams::new(1.2, 0.5, Scenario::Dependence).is_err());
        assert!(DisparityParams::new(0.5, -0.1, Scenario::Independence).is_err());
        assert!(DisparityParams::new(0.5, f64::NAN, Scenario::Independence).is_err());
        assert!(DisparityParams::new(0.5, 0.5, Scenario::Independence)
            .unwrap()
            .is_disparate());
    }

    #[test]
    fn curve_shapes() {
        let alphas = [0.1, 0.5, 0.8, 1.0];
        let grid = unit_grid(20);
        let pts = emit_curves(&alphas, &grid, &Scenario::ALL).unwrap();
        assert_eq!(pts.len(), 2 * 4 * 21);
        for pt in pts.iter().filter(|pt| pt.p_b == 0.0) {
            assert_eq!(pt.p_ip, 0.0);
        }
        for &a in &alphas {
            let dep: Vec<_> = pts
                .iter()
                .filter(|pt| pt.scenario == Scenario::Dependence && pt.alpha == a)
                .collect();
            for w in dep.windows(2) {
                let slope = (w[1].p_ip - w[0].p_ip) / (w[1].p_b - w[0].p_b);
                assert!((slope - (1.0 - a)).abs() < 1e-9);
            }
        }
        let ind: Vec<_> = pts
            .iter()
            .filter(|pt| pt.scenario == Scenario::Independence && pt.alpha == 1.0)
            .collect();
        for (lo, hi) in ind.iter().zip(ind.iter().rev()) {
            assert!((lo.p_ip - hi.p_ip).abs() < 1e-12);
        }
        let max = ind.iter().map(|pt| pt.p_ip).fold(0.0, f64::max);
        assert!((max - 0.5).abs() < 1e-12);
    }

    #[test]
    fn csv_layout() {
        let pts = emit_curves(&[0.5], &[0.0, 1.0], &[Scenario::Dependence]).unwrap();
        let mut buf = Vec::new();
        write_curves_csv(&mut buf, &pts).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "scenario,alpha,p_b,p_ip\ndependence,0.500000,0.000000,0.000000\ndependence,0.500000,1.000000,0.500000\n"
        );
    }
}
