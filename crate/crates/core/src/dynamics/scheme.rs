//! Method-of-lines discretisation of the evolution equation for `w`:
//!
//! ```text
//! w_t = n² m s^{2-2/n} (n w_s + 1)^{m-1} w_ss
//!     + χ n w_s (n w_s + 1)^{α-1} (w - z)
//!     + ∫₀ˢ λ w_s dσ - n^{κ-1} ∫₀ˢ μ w_s^κ dσ
//! ```
//!
//! Interior nodes use centred differences; at the last node the diffusion
//! vanishes and the drift pieces cancel, so only the source integrals
//! survive (mass balance). Node 0 stays at 0.

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{MassState, ModelParams};
use crate::elliptic::{self, ChemoField, EllipticError};
use crate::mesh::MassGrid;

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
pub enum StepError {
    #[error("non-finite value at node {0}")]
    NonFinite(usize),
    #[error("w decreases by {drop:e} between nodes {} and {node}", node - 1)]
    NotMonotone { node: usize, drop: f64 },
    #[error("chemoattractant solve failed: {0}")]
    Elliptic(String),
    #[error("time step {0:e} is below the minimum")]
    Underflow(f64),
}

impl From<EllipticError> for StepError {
    fn from(e: EllipticError) -> Self {
        StepError::Elliptic(e.to_string())
    }
}

/// The right-hand side split into its five pieces, node by node.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Terms {
    pub diffusion: Vec<f64>,
    /// `χ n w_s (n w_s+1)^{α-1} w`
    pub drift_w: Vec<f64>,
    /// `-χ n w_s (n w_s+1)^{α-1} z`
    pub drift_z: Vec<f64>,
    pub growth: Vec<f64>,
    /// Subtracted: `n^{κ-1} ∫₀ˢ μ w_s^κ dσ`
    pub sink: Vec<f64>,
}

impl Terms {
    pub fn total(&self) -> Vec<f64> {
        (0..self.diffusion.len())
            .map(|i| self.diffusion[i] + self.drift_w[i] + self.drift_z[i] + self.growth[i] - self.sink[i])
            .collect()
    }
}

/// Node data that depend only on the grid and parameters.
#[derive(Clone, Debug)]
pub struct Scheme {
    pub params: ModelParams,
    pub grid: Arc<MassGrid>,
    /// `n² s^{2-2/n}`
    pub coef: Vec<f64>,
    pub radii: Vec<f64>,
    pub lambda: Vec<f64>,
    pub mu: Vec<f64>,
    pub bvp_tol: f64,
}

impl Scheme {
    pub fn new(params: &ModelParams, grid: Arc<MassGrid>) -> Self {
        let coef = elliptic::diffusion_coefficient(&grid);
        let radii = grid.radii();
        let lambda = radii.iter().map(|&r| params.lambda_at(r)).collect();
        let mu = radii.iter().map(|&r| params.mu_at(r)).collect();
        Self {
            params: params.clone(),
            grid,
            coef,
            radii,
            lambda,
            mu,
            bvp_tol: elliptic::DEFAULT_TOL,
        }
    }

    pub fn chemo(&self, w: &[f64]) -> Result<ChemoField, StepError> {
        Ok(elliptic::solve_with_coefficient(w, &self.grid, &self.coef, self.bvp_tol)?)
    }

    /// Splits the right-hand side for a given `w` and its chemoattractant.
    pub fn terms(&self, w: &[f64], chemo: &ChemoField) -> Terms {
        let p = &self.params;
        let s = &self.grid.s;
        let len = s.len();
        let last = len - 1;
        let nf = p.n as f64;
        let ws = self.grid.derivative(w);
        let mut t = Terms {
            diffusion: vec![0.0; len],
            drift_w: vec![0.0; len],
            drift_z: vec![0.0; len],
            growth: vec![0.0; len],
            sink: vec![0.0; len],
        };
        for i in 1..last {
            let (hm, hp) = (s[i] - s[i - 1], s[i + 1] - s[i]);
            let sm = (w[i] - w[i - 1]) / hm;
            let sp = (w[i + 1] - w[i]) / hp;
            let wss = 2.0 * (sp - sm) / (hm + hp);
            let base = nf * ws[i] + 1.0;
            let mob = if p.m == 1.0 { 1.0 } else { base.powf(p.m - 1.0) };
            t.diffusion[i] = p.m * self.coef[i] * mob * wss;
            let sens = if p.alpha == 1.0 { 1.0 } else { base.powf(p.alpha - 1.0) };
            let flux = p.chi * nf * ws[i] * sens;
            t.drift_w[i] = flux * w[i];
            t.drift_z[i] = -flux * chemo.z[i];
        }
        // the two drift pieces cancel at the wall, where z = w
        let base = nf * ws[last] + 1.0;
        let sens = if p.alpha == 1.0 { 1.0 } else { base.powf(p.alpha - 1.0) };
        let flux = p.chi * nf * ws[last] * sens;
        t.drift_w[last] = flux * w[last];
        t.drift_z[last] = -flux * chemo.z[last];
        let sink_scale = nf.powf(p.kappa - 1.0);
        let (mut g_prev, mut k_prev) = (self.lambda[0] * ws[0], self.mu[0] * pow_kappa(ws[0], p.kappa));
        for i in 1..len {
            let h = s[i] - s[i - 1];
            let g = self.lambda[i] * ws[i];
            let k = self.mu[i] * pow_kappa(ws[i], p.kappa);
            t.growth[i] = t.growth[i - 1] + 0.5 * h * (g_prev + g);
            t.sink[i] = t.sink[i - 1] + 0.5 * h * (k_prev + k);
            g_prev = g;
            k_prev = k;
        }
        for v in t.sink.iter_mut() {
            *v *= sink_scale;
        }
        t
    }

    pub fn rhs(&self, w: &[f64], chemo: &ChemoField) -> Vec<f64> {
        self.terms(w, chemo).total()
    }

    /// Largest stable step for the current state (before the safety factor).
    pub fn stable_dt(&self, w: &[f64], chemo: &ChemoField, cfl: f64) -> f64 {
        let p = &self.params;
        let s = &self.grid.s;
        let last = s.len() - 1;
        let nf = p.n as f64;
        let ws = self.grid.derivative(w);
        let mut dt = f64::INFINITY;
        let mut umax: f64 = 0.0;
        for i in 1..last {
            let h = (s[i] - s[i - 1]).min(s[i + 1] - s[i]);
            let base = nf * ws[i] + 1.0;
            let mob = if p.m == 1.0 { 1.0 } else { base.powf(p.m - 1.0) };
            let diff = p.m * self.coef[i] * mob;
            if diff > 0.0 {
                dt = dt.min(cfl * h * h / diff);
            }
            // derivative of w_s (n w_s+1)^{α-1} with respect to w_s
            let speed = p.chi * nf * base.powf(p.alpha - 2.0) * (p.alpha * nf * ws[i] + 1.0) * (w[i] - chemo.z[i]);
            if speed != 0.0 {
                dt = dt.min(cfl * h / speed.abs());
            }
            umax = umax.max(nf * ws[i]);
        }
        let mumax = self.mu.iter().cloned().fold(0.0, f64::max);
        let lmax = self.lambda.iter().cloned().fold(0.0, f64::max);
        let rate = lmax + p.kappa * mumax * umax.max(0.0).powf(p.kappa - 1.0);
        if rate > 0.0 {
            dt = dt.min(cfl / rate);
        }
        dt
    }

    /// One Heun (RK2) step. Fails without touching `state` if the result is
    /// non-finite or no longer nondecreasing.
    pub fn step(&self, state: &MassState, chemo: &ChemoField, dt: f64) -> Result<MassState, StepError> {
        if dt == 0.0 {
            return Ok(state.clone());
        }
        let w0 = &state.w;
        let k1 = self.rhs(w0, chemo);
        let mut w1: Vec<f64> = w0.iter().zip(&k1).map(|(w, k)| w + dt * k).collect();
        w1[0] = 0.0;
        self.admissible(&w1)?;
        let c1 = self.chemo(&w1)?;
        let k2 = self.rhs(&w1, &c1);
        let mut w2: Vec<f64> = (0..w0.len()).map(|i| w0[i] + 0.5 * dt * (k1[i] + k2[i])).collect();
        w2[0] = 0.0;
        self.admissible(&w2)?;
        Ok(MassState { grid: state.grid.clone(), w: w2, t: state.t + dt })
    }

    pub fn admissible(&self, w: &[f64]) -> Result<(), StepError> {
        if let Some(i) = w.iter().position(|x| !x.is_finite()) {
            return Err(StepError::NonFinite(i));
        }
        let tol = MONOTONE_TOL * w[w.len() - 1].abs().max(f64::MIN_POSITIVE);
        for i in 1..w.len() {
            let drop = w[i - 1] - w[i];
            if drop > tol {
                return Err(StepError::NotMonotone { node: i, drop });
            }
        }
        Ok(())
    }
}

/// Relative to the total mass variable `w(R^n)`.
pub const MONOTONE_TOL: f64 = 1e-12;

fn pow_kappa(x: f64, kappa: f64) -> f64 {
    let x = x.max(0.0);
    if kappa == 1.0 {
        x
    } else {
        x.powf(kappa)
    }
}
