//! Volume, surface area and the shared integral
//! `I_n = ∫_{−π/2}^{π/2} dθ / (1 + e*·cos θ)²`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{PolyconError, Result};
use crate::polycon::PolyconSpec;
use crate::quadrature;

/// Absolute tolerance of the quadrature route.
pub const QUADRATURE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum IntegralMethod {
    ClosedForm,
    Quadrature,
}

pub fn integral_in(spec: &PolyconSpec, method: IntegralMethod) -> Result<f64> {
    match method {
        IntegralMethod::ClosedForm => closed_form(spec),
        IntegralMethod::Quadrature => {
            let e = spec.projected_eccentricity();
            let q = quadrature::integrate(
                |t: f64| {
                    let d = 1.0 + e * t.cos();
                    1.0 / (d * d)
                },
                -FRAC_PI_2,
                FRAC_PI_2,
                QUADRATURE_TOLERANCE,
            )?;
            Ok(q.value)
        }
    }
}

fn closed_form(spec: &PolyconSpec) -> Result<f64> {
    match spec.n() {
        2 => Ok(PI),
        3 => Ok(4.0 / 3.0),
        n if n > 3 => {
            let a = &spec.angles;
            let one_minus = 1.0 - a.cos_full;
            // cos(π/2n − π/3)·cos(π/2n + π/3), strictly positive for n > 3
            let product = a.cos_half * a.cos_half - 0.75;
            if !(product > 0.0) {
                return Err(PolyconError::UnsupportedMethod(format!(
                    "closed form is degenerate at n = {n}"
                )));
            }
            let root = product.sqrt();
            let log = ((1.0 + 2.0 * root) / (1.0 - 2.0 * root)).ln();
            // I_n = (2e* − J)/(e*² − 1) with J = ∫dθ/(1 + e*·cos θ), rewritten in
            // terms of π/n; the log term enters with coefficient −(1 − cos π/n)²/(4√c).
            Ok(one_minus / product
                * (a.cos_full / 2.0 - one_minus * one_minus / (4.0 * root) * log))
        }
        n => Err(PolyconError::UnsupportedMethod(format!(
            "no closed form for n = {n}"
        ))),
    }
}

/// Volume, `(n·R³/3)·tan(π/2n)·I_n`.
pub fn volume(spec: &PolyconSpec) -> Result<f64> {
    let r = spec.radius();
    let i_n = integral_in(spec, IntegralMethod::ClosedForm)?;
    Ok(spec.n() as f64 * r * r * r / 3.0 * spec.angles.tan_half * i_n)
}

/// Surface area, `(n·R²/cos(π/2n))·I_n`.
pub fn surface_area(spec: &PolyconSpec) -> Result<f64> {
    let r = spec.radius();
    let i_n = integral_in(spec, IntegralMethod::ClosedForm)?;
    Ok(spec.n() as f64 * r * r / spec.angles.cos_half * i_n)
}

/// Apex-to-base distance of one of the 2n generalised cones, `R·tan(π/2n)·sin(π/n)`.
pub fn generalized_cone_height(spec: &PolyconSpec) -> f64 {
    spec.radius() * spec.angles.tan_half * spec.angles.sin_full
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct MetricReport {
    pub n: usize,
    pub radius: f64,
    pub in_closed: Option<f64>,
    pub in_quadrature: f64,
    pub volume: f64,
    pub surface_area: f64,
    pub generalized_cone_height: f64,
}

impl MetricReport {
    pub fn compute(spec: &PolyconSpec) -> Result<Self> {
        let in_quadrature = integral_in(spec, IntegralMethod::Quadrature)?;
        let in_closed = match integral_in(spec, IntegralMethod::ClosedForm) {
            Ok(v) => Some(v),
            Err(PolyconError::UnsupportedMethod(_)) => None,
            Err(e) => return Err(e),
        };
        let report = MetricReport {
            n: spec.n(),
            radius: spec.radius(),
            in_closed,
            in_quadrature,
            volume: volume(spec)?,
            surface_area: surface_area(spec)?,
            generalized_cone_height: generalized_cone_height(spec),
        };
        if let Some(d) = report.discrepancy() {
            if d > 1e-10 {
                return Err(PolyconError::ModelMismatch(format!(
                    "closed form and quadrature of I_n differ by {d:e} at n = {}",
                    spec.n()
                )));
            }
        }
        Ok(report)
    }

    /// `|I_n(closed) − I_n(quadrature)|`, when both are available.
    pub fn discrepancy(&self) -> Option<f64> {
        self.in_closed.map(|c| (c - self.in_quadrature).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(n: usize, r: f64) -> PolyconSpec {
        PolyconSpec::new(n, r).unwrap()
    }

    #[test]
    fn small_cases_exact() {
        assert_eq!(
            integral_in(&spec(2, 1.0), IntegralMethod::ClosedForm).unwrap(),
            PI
        );
        assert_eq!(
            integral_in(&spec(3, 1.0), IntegralMethod::ClosedForm).unwrap(),
            4.0 / 3.0
        );
        let q2 = integral_in(&spec(2, 1.0), IntegralMethod::Quadrature).unwrap();
        let q3 = integral_in(&spec(3, 1.0), IntegralMethod::Quadrature).unwrap();
        assert!((q2 - PI).abs() < 1e-12);
        assert!((q3 - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn closed_form_matches_quadrature_beyond_three() {
        for n in 4..=64 {
            let s = spec(n, 1.0);
            let c = integral_in(&s, IntegralMethod::ClosedForm).unwrap();
            let q = integral_in(&s, IntegralMethod::Quadrature).unwrap();
            assert!((c - q).abs() < 1e-10, "n={n}: {c} vs {q}");
        }
    }

    #[test]
    fn integral_decreases_with_n() {
        let values: Vec<f64> = (2..=64)
            .map(|n| integral_in(&spec(n, 1.0), IntegralMethod::Quadrature).unwrap())
            .collect();
        assert!(values.iter().all(|v| v.is_finite() && *v > 0.0));
        assert!(values.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn sphericon_and_hexacon_values() {
        let rel = |a: f64, b: f64| ((a - b) / b).abs();
        assert!(rel(volume(&spec(2, 1.0)).unwrap(), 2.0 * PI / 3.0) < 1e-12);
        assert!(rel(volume(&spec(3, 1.0)).unwrap(), 4.0 / (3.0 * 3f64.sqrt())) < 1e-12);
        assert!(rel(surface_area(&spec(2, 1.0)).unwrap(), 2.0 * 2f64.sqrt() * PI) < 1e-12);
        assert!(rel(surface_area(&spec(3, 1.0)).unwrap(), 8.0 / 3f64.sqrt()) < 1e-12);
        assert!(
            rel(
                volume(&spec(3, 2.0)).unwrap(),
                8.0 * volume(&spec(3, 1.0)).unwrap()
            ) < 1e-15
        );
    }

    #[test]
    fn generalized_cone_height_is_apex_to_cutting_plane_distance() {
        for n in 2..10 {
            let s = spec(n, 1.5);
            // apex (0,0,H) against the plane x·cos(π/n) − z·sin(π/n) = 0
            let d = s.cone_height() * (PI / n as f64).sin();
            assert!((generalized_cone_height(&s) - d).abs() < 1e-14);
        }
    }

    #[test]
    fn report_carries_both_routes() {
        let r = MetricReport::compute(&spec(7, 2.0)).unwrap();
        assert!(r.in_closed.is_some());
        assert!(r.discrepancy().unwrap() < 1e-10);
        assert!((r.volume - volume(&spec(7, 2.0)).unwrap()).abs() < 1e-15);
    }
}
