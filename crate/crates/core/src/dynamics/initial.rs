use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use super::{MassState, ModelParams};
use crate::mesh::MassGrid;

#[derive(Debug, Error, Clone, PartialEq, Serialize)]
pub enum InitError {
    #[error("r1 = {0} must lie in (0, R)")]
    InnerRadius(f64),
    #[error("cap constant L = {0} must be positive")]
    Cap(f64),
    #[error("cap exponent p = {p} must be at least n = {n}")]
    CapExponent { p: f64, n: u32 },
    #[error("inner mass {achieved} over B(r1) is below M1 = {required}")]
    InnerMass { achieved: f64, required: f64 },
    #[error("plateau search did not reach mass {target} (best {achieved})")]
    NoPlateau { target: f64, achieved: f64 },
}

/// `u0(r) = min(A, L r^{-p})` with the plateau height `A` fixed by the mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CappedPlateau {
    pub n: u32,
    pub radius: f64,
    pub plateau: f64,
    pub cap: f64,
    pub p: f64,
}

impl CappedPlateau {
    /// Radius where the plateau meets the cap.
    pub fn corner(&self) -> f64 {
        if self.cap.is_infinite() {
            return f64::INFINITY;
        }
        (self.cap / self.plateau).powf(1.0 / self.p)
    }

    pub fn density(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return self.plateau;
        }
        self.plateau.min(self.cap * r.powf(-self.p))
    }

    /// `∫₀^r ρ^{n-1} u0 dρ` in closed form.
    pub fn accumulated(&self, r: f64) -> f64 {
        let n = self.n as f64;
        let rc = self.corner();
        if r <= rc {
            return self.plateau * r.powf(n) / n;
        }
        let head = self.plateau * rc.powf(n) / n;
        let e = n - self.p;
        let tail = if e == 0.0 {
            self.cap * (r / rc).ln()
        } else {
            self.cap * (r.powf(e) - rc.powf(e)) / e
        };
        head + tail
    }
}

/// Solves for the plateau height so that `ω ∫₀^R r^{n-1} u0 = M0`.
pub fn capped_plateau(params: &ModelParams, cap: f64, p: f64) -> Result<CappedPlateau, InitError> {
    if !(cap > 0.0) {
        return Err(InitError::Cap(cap));
    }
    if !(p >= params.n as f64) {
        return Err(InitError::CapExponent { p, n: params.n });
    }
    let n = params.n as f64;
    let target = params.m0 / params.omega_n1();
    let mut prof = CappedPlateau {
        n: params.n,
        radius: params.radius,
        plateau: target * n / params.radius.powf(n),
        cap,
        p,
    };
    let mass = |a: f64| CappedPlateau { plateau: a, ..prof }.accumulated(params.radius);
    if cap.is_infinite() || mass(prof.plateau) >= target * (1.0 - 1e-14) {
        return Ok(prof);
    }
    // the uncapped height is a lower bracket; double for an upper one
    let (mut lo, mut hi) = (prof.plateau, prof.plateau * 2.0);
    let mut tries = 0;
    while mass(hi) < target {
        lo = hi;
        hi *= 2.0;
        tries += 1;
        if tries > 2000 || !hi.is_finite() {
            return Err(InitError::NoPlateau { target, achieved: mass(lo) });
        }
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if mass(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi / lo - 1.0 < 1e-15 {
            break;
        }
    }
    prof.plateau = 0.5 * (lo + hi);
    let got = mass(prof.plateau);
    if ((got - target) / target).abs() > 1e-10 {
        return Err(InitError::NoPlateau { target, achieved: got });
    }
    Ok(prof)
}

/// Capped plateau data with total mass `M0`; rejects it if `B(r1)` holds less than `M1`.
pub fn init_profile(
    params: &ModelParams,
    grid: Arc<MassGrid>,
    r1: f64,
    cap: f64,
    p: f64,
) -> Result<MassState, InitError> {
    if !(r1 > 0.0 && r1 < params.radius) {
        return Err(InitError::InnerRadius(r1));
    }
    let prof = capped_plateau(params, cap, p)?;
    let omega = params.omega_n1();
    let inner = omega * prof.accumulated(r1);
    if inner < params.m1 {
        return Err(InitError::InnerMass { achieved: inner, required: params.m1 });
    }
    let n = params.n as f64;
    let mut w: Vec<f64> = grid.s.iter().map(|&s| prof.accumulated(s.powf(1.0 / n))).collect();
    w[0] = 0.0;
    // the last node is R^n up to rounding of the n-th root
    let last = w.len() - 1;
    w[last] = prof.accumulated(params.radius);
    Ok(MassState { grid, w, t: 0.0 })
}
