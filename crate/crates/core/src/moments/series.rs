use serde::Serialize;

use super::{MomentError, MomentSample};

/// Relative deviation allowed in the sample spacing.
const CADENCE_TOL: f64 = 1e-9;

fn check_cadence(series: &[MomentSample]) -> Result<f64, MomentError> {
    if series.len() < 3 {
        return Err(MomentError::InsufficientSamples(series.len()));
    }
    let dt = series[1].t - series[0].t;
    if !(dt > 0.0) {
        return Err(MomentError::UnevenCadence(1));
    }
    for j in 2..series.len() {
        let d = series[j].t - series[j - 1].t;
        if (d - dt).abs() > CADENCE_TOL * dt {
            return Err(MomentError::UnevenCadence(j));
        }
    }
    Ok(dt)
}

/// Finite-difference `dφ/dt` (centred inside, one-sided at the ends) and the
/// margin against `I₁+…+I₄` for a series at one `(s0, γ)`.
pub fn fill_derivatives(series: &mut [MomentSample]) -> Result<(), MomentError> {
    let dt = check_cadence(series)?;
    let last = series.len() - 1;
    for j in 0..=last {
        let d = if j == 0 {
            (series[1].phi - series[0].phi) / dt
        } else if j == last {
            (series[last].phi - series[last - 1].phi) / dt
        } else {
            (series[j + 1].phi - series[j - 1].phi) / (2.0 * dt)
        };
        series[j].dphi_dt_fd = Some(d);
        series[j].ineq_margin = Some(d - series[j].i_sum());
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KeyIneqReport {
    pub s0: f64,
    pub gamma: f64,
    pub theta: f64,
    /// Interior samples compared.
    pub samples: usize,
    /// Smallest `C` for which every interior sample satisfies
    /// `dφ/dt >= s0^{γ-3+shift} φ²/C - C s0^{3-γ-θ}`.
    pub min_c: f64,
    pub binding_sample: Option<usize>,
    pub supplied_c: Option<f64>,
    pub pass: Option<bool>,
    /// Sample with the most negative margin under the supplied `C`.
    pub worst_sample: Option<usize>,
    pub worst_margin: Option<f64>,
}

impl KeyIneqReport {
    /// `(c₁, c₂)` of the Riccati inequality `φ' >= c₁φ² - c₂` at `C = min_c`.
    pub fn riccati(&self, shift: f64) -> Option<(f64, f64)> {
        if !(self.min_c > 0.0 && self.min_c.is_finite()) {
            return None;
        }
        let (a, b) = exponents(self.s0, self.gamma, self.theta, shift);
        Some((a / self.min_c, self.min_c * b))
    }
}

fn exponents(s0: f64, gamma: f64, theta: f64, shift: f64) -> (f64, f64) {
    (s0.powf(gamma - 3.0 + shift), s0.powf(3.0 - gamma - theta))
}

/// Compares centred `dφ/dt` with the super-quadratic lower bound at every
/// interior sample. `shift` is `(p/n)(1-α)₊`.
pub fn verify_keyineq(
    series: &[MomentSample],
    s0: f64,
    gamma: f64,
    theta: f64,
    shift: f64,
    c: Option<f64>,
) -> Result<KeyIneqReport, MomentError> {
    let dt = check_cadence(series)?;
    if let Some(c) = c {
        if !(c > 0.0) {
            return Err(MomentError::Domain { name: "C", value: c });
        }
    }
    let (a, b) = exponents(s0, gamma, theta, shift);
    let mut report = KeyIneqReport {
        s0,
        gamma,
        theta,
        samples: series.len() - 2,
        min_c: 0.0,
        binding_sample: None,
        supplied_c: c,
        pass: c.map(|_| true),
        worst_sample: None,
        worst_margin: None,
    };
    for j in 1..series.len() - 1 {
        let d = (series[j + 1].phi - series[j - 1].phi) / (2.0 * dt);
        let phi = series[j].phi;
        // C² b + C d - a φ² >= 0
        let disc = (d * d + 4.0 * a * b * phi * phi).sqrt();
        let need = if d > 0.0 { 2.0 * a * phi * phi / (d + disc) } else { (disc - d) / (2.0 * b) };
        if need > report.min_c {
            report.min_c = need;
            report.binding_sample = Some(j);
        }
        if let Some(c) = c {
            let margin = d - (a * phi * phi / c - c * b);
            if report.worst_margin.map_or(true, |m| margin < m) {
                report.worst_margin = Some(margin);
                report.worst_sample = Some(j);
            }
            if margin < 0.0 {
                report.pass = Some(false);
            }
        }
    }
    Ok(report)
}
