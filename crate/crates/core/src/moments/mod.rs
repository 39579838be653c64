//! Moment functionals of `w`, the four integrals of the `φ` balance, and
//! checks of the lower bounds and Riccati comparison built on them.
//!
//! ```text
//! φ(s0)   = ∫₀^{s0} s^{-γ} (s0-s) w ds
//! ψ_α(s0) = ∫₀^{s0} s^{-γ+(p/n)(1-α)₊} (s0-s) w w_s ds
//! ```

mod bounds;
mod series;

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{ModelParams, MassState, Scheme, Terms};
use crate::elliptic::ChemoField;
use crate::mesh::MassGrid;
use crate::quadrature::{self, QuadError};

pub use bounds::{verify_lemma_bounds, BoundCheck, FittedBound, LemmaReport, PointwiseCheck, ZEstimate};
pub use series::{fill_derivatives, verify_keyineq, KeyIneqReport};
pub(crate) use bounds::check_with as bounds_check;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MomentError {
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("{name} = {value} is out of range")]
    Domain { name: &'static str, value: f64 },
    #[error("need at least 3 samples, got {0}")]
    InsufficientSamples(usize),
    #[error("sample {0} breaks the uniform cadence")]
    UnevenCadence(usize),
}

pub fn beta_function(a: f64, b: f64) -> Result<f64, MomentError> {
    Ok(quadrature::beta(a, b)?)
}

/// `(x)₊`
pub(crate) fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Weight shift `(p/n)(1-α)₊` carried by `ψ_α`.
pub(crate) fn psi_shift(n: u32, p: f64, alpha: f64) -> f64 {
    p / n as f64 * pos(1.0 - alpha)
}

/// Quadrature weights for one `(s0, γ)` pair on a fixed grid.
#[derive(Clone, Debug)]
pub struct Probe {
    pub s0_requested: f64,
    /// `s0` after snapping to the nearest node.
    pub s0: f64,
    pub index: usize,
    pub gamma: f64,
    phi_w: Vec<f64>,
    psi_w: Vec<f64>,
}

impl Probe {
    pub fn new(grid: &MassGrid, s0: f64, gamma: f64, p: f64, alpha: f64) -> Result<Self, MomentError> {
        if !(s0 > 0.0 && s0 <= grid.top()) {
            return Err(MomentError::Domain { name: "s0", value: s0 });
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(MomentError::Domain { name: "gamma", value: gamma });
        }
        let index = quadrature::snap(&grid.s, s0);
        let phi_w = quadrature::product_weights(&grid.s, index, -gamma, 1.0)?;
        let psi_w = quadrature::product_weights(&grid.s, index, -gamma + psi_shift(grid.n, p, alpha), 1.0)?;
        Ok(Self { s0_requested: s0, s0: grid.s[index], index, gamma, phi_w, psi_w })
    }

    pub fn snapped(&self) -> bool {
        self.s0 != self.s0_requested
    }

    pub fn phi(&self, w: &[f64]) -> f64 {
        quadrature::apply(&self.phi_w, w)
    }

    /// Needs the nodal derivative `w_s`.
    pub fn psi(&self, w: &[f64], ws: &[f64]) -> f64 {
        let f: Vec<f64> = w[..=self.index].iter().zip(ws).map(|(a, b)| a * b).collect();
        quadrature::apply(&self.psi_w, &f)
    }

    /// `(I₁, I₂, I₃, I₄)`: the φ-weighted diffusion and drift pieces of the
    /// scheme's right-hand side, and the sink with `μ` replaced by its bound
    /// `μ₁ r^q`. The growth term is left out.
    pub fn integrals(&self, state: &MassState, terms: &Terms, params: &ModelParams) -> [f64; 4] {
        let i1 = quadrature::apply(&self.phi_w, &terms.drift_w);
        let i2 = quadrature::apply(&self.phi_w, &terms.diffusion);
        let i3 = quadrature::apply(&self.phi_w, &terms.drift_z);
        let i4 = if params.mu1 == 0.0 {
            0.0
        } else {
            -quadrature::apply(&self.phi_w, &bounded_sink(state, params, self.index))
        };
        [i1, i2, i3, i4]
    }

    /// Everything but the time derivative and the Riccati coefficients,
    /// which need the whole series.
    pub fn sample(&self, state: &MassState, terms: &Terms, params: &ModelParams, theta: f64) -> MomentSample {
        let ws = state.grid.derivative(&state.w);
        MomentSample {
            t: state.t,
            s0: self.s0,
            gamma: self.gamma,
            phi: self.phi(&state.w),
            psi_alpha: self.psi(&state.w, &ws),
            i: self.integrals(state, terms, params),
            dphi_dt_fd: None,
            theta,
            c1: None,
            c2: None,
            ineq_margin: None,
        }
    }
}

/// `n^{κ-1} ∫₀ˢ μ₁ σ^{q/n} w_s^κ dσ` by cumulative trapezoid, up to node `k`.
fn bounded_sink(state: &MassState, params: &ModelParams, k: usize) -> Vec<f64> {
    let s = &state.grid.s;
    let ws = state.grid.derivative(&state.w);
    let nf = params.n as f64;
    let f: Vec<f64> = (0..=k)
        .map(|i| params.mu1 * s[i].powf(params.q / nf) * ws[i].max(0.0).powf(params.kappa))
        .collect();
    let scale = nf.powf(params.kappa - 1.0);
    let mut out = vec![0.0; k + 1];
    for i in 1..=k {
        out[i] = out[i - 1] + 0.5 * (s[i] - s[i - 1]) * (f[i - 1] + f[i]);
    }
    out.iter_mut().for_each(|v| *v *= scale);
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MomentSample {
    pub t: f64,
    pub s0: f64,
    pub gamma: f64,
    pub phi: f64,
    pub psi_alpha: f64,
    #[serde(rename = "I")]
    pub i: [f64; 4],
    pub dphi_dt_fd: Option<f64>,
    pub theta: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    /// `dφ/dt_fd - (I₁+I₂+I₃+I₄)`
    pub ineq_margin: Option<f64>,
}

impl MomentSample {
    pub fn i_sum(&self) -> f64 {
        self.i.iter().sum()
    }
}

pub fn phi(state: &MassState, s0: f64, gamma: f64) -> Result<f64, MomentError> {
    // p and α only enter ψ
    Ok(Probe::new(&state.grid, s0, gamma, 0.0, 1.0)?.phi(&state.w))
}

pub fn psi_alpha(state: &MassState, s0: f64, gamma: f64, p: f64, alpha: f64) -> Result<f64, MomentError> {
    let probe = Probe::new(&state.grid, s0, gamma, p, alpha)?;
    let ws = state.grid.derivative(&state.w);
    Ok(probe.psi(&state.w, &ws))
}

pub fn integrals_i(
    state: &MassState,
    chemo: &ChemoField,
    s0: f64,
    gamma: f64,
    params: &ModelParams,
) -> Result<[f64; 4], MomentError> {
    let probe = Probe::new(&state.grid, s0, gamma, params.p, params.alpha)?;
    let terms = Scheme::new(params, state.grid.clone()).terms(&state.w, chemo);
    Ok(probe.integrals(state, &terms, params))
}

/// `η² M₁ / ω_{n-1} · s0^{2-γ}`
pub fn phi0_lower_bound(eta: f64, m1: f64, n: u32, gamma: f64, s0: f64) -> Result<f64, MomentError> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(MomentError::Domain { name: "eta", value: eta });
    }
    if !(m1 >= 0.0) {
        return Err(MomentError::Domain { name: "M1", value: m1 });
    }
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(MomentError::Domain { name: "gamma", value: gamma });
    }
    if !(s0 > 0.0) {
        return Err(MomentError::Domain { name: "s0", value: s0 });
    }
    Ok(eta * eta * m1 / crate::dynamics::omega(n) * s0.powf(2.0 - gamma))
}

/// Blow-up time of `φ' = aφ² - b`, `φ(0) = φ0`, or `None` when `φ0` does not
/// exceed the equilibrium `√(b/a)`.
pub fn riccati_blowup_time(phi0: f64, a: f64, b: f64) -> Result<Option<f64>, MomentError> {
    if !(a > 0.0) {
        return Err(MomentError::Domain { name: "a", value: a });
    }
    if !(b >= 0.0) {
        return Err(MomentError::Domain { name: "b", value: b });
    }
    let eq = (b / a).sqrt();
    if !(phi0 > eq) {
        return Ok(None);
    }
    if b == 0.0 {
        return Ok(Some(1.0 / (a * phi0)));
    }
    let t = ((phi0 + eq) / (phi0 - eq)).ln() / (2.0 * (a * b).sqrt());
    Ok(Some(t))
}
