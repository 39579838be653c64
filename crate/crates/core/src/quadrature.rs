//! Weighted quadrature for integrals of the form `∫₀^{s0} s^a (s0-s)^b f(s) ds`.
//!
//! `f` is taken piecewise linear between nodes and the weight is integrated
//! exactly against each hat function. This keeps the endpoint singularity
//! `s^a` (a > -1) out of the error term, so a linear `f` is integrated to
//! rounding error.

use statrs::function::beta::checked_beta_reg;
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuadError {
    #[error("beta function needs positive arguments, got ({0}, {1})")]
    BetaDomain(f64, f64),
    #[error("weight exponent {name} = {value} must exceed -1")]
    NotIntegrable { name: &'static str, value: f64 },
    #[error("nodes must start at 0 and increase strictly")]
    BadNodes,
}

/// Euler beta function through log-gamma.
pub fn beta(a: f64, b: f64) -> Result<f64, QuadError> {
    if !(a > 0.0 && b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::BetaDomain(a, b));
    }
    Ok((ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp())
}

/// `∫_{x1}^{x2} s^c ds` for `0 <= x1 < x2`, without cancellation for narrow cells.
pub(crate) fn power_integral(c: f64, x1: f64, x2: f64) -> f64 {
    let e = c + 1.0;
    if x1 == 0.0 {
        return x2.powf(e) / e;
    }
    let l = ((x2 - x1) / x1).ln_1p();
    if e == 0.0 {
        return l;
    }
    x1.powf(e) * (e * l).exp_m1() / e
}

/// Zeroth and first moments of `s^a (s0-s)^b` over one cell.
fn cell_moments(a: f64, b: f64, s0: f64, x1: f64, x2: f64) -> (f64, f64) {
    if b == 0.0 {
        (power_integral(a, x1, x2), power_integral(a + 1.0, x1, x2))
    } else if b == 1.0 {
        let p0 = power_integral(a, x1, x2);
        let p1 = power_integral(a + 1.0, x1, x2);
        let p2 = power_integral(a + 2.0, x1, x2);
        (s0 * p0 - p1, s0 * p1 - p2)
    } else {
        // incomplete beta differences; only exercised for non-integer b
        let (t1, t2) = ((x1 / s0).clamp(0.0, 1.0), (x2 / s0).clamp(0.0, 1.0));
        let part = |aa: f64| -> f64 {
            let ib = |t: f64| checked_beta_reg(aa + 1.0, b + 1.0, t).unwrap_or(f64::NAN);
            let full = beta(aa + 1.0, b + 1.0).unwrap_or(f64::NAN);
            full * s0.powf(aa + b + 1.0) * (ib(t2) - ib(t1))
        };
        (part(a), part(a + 1.0))
    }
}

/// Weights `W_i` with `Σ W_i f_i ≈ ∫₀^{s[k]} s^a (s[k]-s)^b f ds` over nodes `s[0..=k]`.
pub fn product_weights(s: &[f64], k: usize, a: f64, b: f64) -> Result<Vec<f64>, QuadError> {
    if a <= -1.0 {
        return Err(QuadError::NotIntegrable { name: "a", value: a });
    }
    if b <= -1.0 {
        return Err(QuadError::NotIntegrable { name: "b", value: b });
    }
    if k == 0 || k >= s.len() || s[0] != 0.0 || s[..=k].windows(2).any(|p| p[1] <= p[0]) {
        return Err(QuadError::BadNodes);
    }
    let s0 = s[k];
    let mut w = vec![0.0; k + 1];
    for i in 0..k {
        let (x1, x2) = (s[i], s[i + 1]);
        let h = x2 - x1;
        let (m0, m1) = cell_moments(a, b, s0, x1, x2);
        w[i] += (x2 * m0 - m1) / h;
        w[i + 1] += (m1 - x1 * m0) / h;
    }
    Ok(w)
}

pub fn apply(weights: &[f64], f: &[f64]) -> f64 {
    weights.iter().zip(f).map(|(w, v)| w * v).sum()
}

/// Index of the node nearest to `s0`, never the first one.
pub fn snap(s: &[f64], s0: f64) -> usize {
    let i = s.partition_point(|&x| x < s0);
    let i = if i == 0 {
        0
    } else if i >= s.len() {
        s.len() - 1
    } else if s0 - s[i - 1] <= s[i] - s0 {
        i - 1
    } else {
        i
    };
    i.max(1)
}
