//! Radial evolution in mass-accumulation form on a graded grid in `s = r^n`.

mod initial;
mod params;
mod run;
mod scheme;

use std::sync::Arc;

use serde::Serialize;

use crate::mesh::MassGrid;

pub use initial::{capped_plateau, init_profile, CappedPlateau, InitError};
pub use params::{omega, FieldProblem, ModelParams, RadialProfile};
pub use run::{run, BlowupReport, RunOptions, RunOutput, Sample, Snapshot, Trigger};
pub use scheme::{Scheme, StepError, Terms, MONOTONE_TOL};

/// `w(s_i, t)` on a shared grid.
#[derive(Clone, Debug, PartialEq)]
pub struct MassState {
    pub grid: Arc<MassGrid>,
    pub w: Vec<f64>,
    pub t: f64,
}

impl MassState {
    pub fn zero(grid: Arc<MassGrid>) -> Self {
        let w = vec![0.0; grid.len()];
        Self { grid, w, t: 0.0 }
    }

    /// `u ≡ c`, i.e. `w = c s / n`.
    pub fn uniform(grid: Arc<MassGrid>, c: f64) -> Self {
        let n = grid.n as f64;
        let w = grid.s.iter().map(|s| c * s / n).collect();
        Self { grid, w, t: 0.0 }
    }

    /// Total mass `ω_{n-1} w(R^n)`.
    pub fn mass(&self) -> f64 {
        omega(self.grid.n) * self.w[self.w.len() - 1]
    }
}

/// `u_i = n (w_s)_i` at the node radii `s_i^{1/n}`.
pub fn reconstruct_u(state: &MassState) -> Vec<f64> {
    let n = state.grid.n as f64;
    state.grid.derivative(&state.w).into_iter().map(|d| n * d).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerBound {
    pub ok: bool,
    pub worst_ratio: f64,
    #[serde(rename = "K_fit")]
    pub k_fit: f64,
}

/// `u <= K r^{-p}` at every node with `r > 0`.
pub fn check_power_bound(state: &MassState, k: f64, p: f64) -> PowerBound {
    let u = reconstruct_u(state);
    power_bound(&u, &state.grid.radii(), k, p)
}

/// Same check on an explicit density sample.
pub fn power_bound(u: &[f64], r: &[f64], k: f64, p: f64) -> PowerBound {
    let k_fit = u
        .iter()
        .zip(r)
        .filter(|(_, &r)| r > 0.0)
        .map(|(u, r)| u * r.powf(p))
        .fold(0.0, f64::max);
    let worst_ratio = k_fit / k;
    PowerBound { ok: worst_ratio <= 1.0, worst_ratio, k_fit }
}

#[cfg(test)]
mod tests;
