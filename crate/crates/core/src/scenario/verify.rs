use std::sync::Arc;

use serde::Serialize;

use crate::dynamics::{check_power_bound, MassState, ModelParams, Scheme, Snapshot};
use crate::mesh::MassGrid;
use crate::moments::{
    bounds_check, fill_derivatives, phi0_lower_bound, psi_shift, verify_keyineq, KeyIneqReport, LemmaReport,
    MomentError, MomentSample, Probe,
};
use crate::regions::ParamPoint;

/// Relative tolerance on `dφ/dt ≥ ΣI`, scaled by the largest `|I|` seen.
pub const RATE_TOL: f64 = 1e-3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Phi0Check {
    pub eta: f64,
    /// Whether the data put `M1` inside `r1` with `r1^n <= (1-η) s0`.
    pub hypothesis: bool,
    pub phi0: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ProbeSeries {
    pub s0_requested: f64,
    pub s0: f64,
    pub snapped: bool,
    pub samples: Vec<MomentSample>,
    pub lemmas: Vec<LemmaReport>,
    pub keyineq: Option<KeyIneqReport>,
    /// `1e-3 · max |I|` over the series.
    pub rate_tol: f64,
    /// Interior samples with `dφ/dt_fd < ΣI - rate_tol`.
    pub rate_violations: Vec<usize>,
    /// Samples where an explicit-constant check failed while the power bound held.
    pub explicit_failures: Vec<usize>,
    pub phi0: Option<Phi0Check>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub gamma: f64,
    pub gamma_in_window: bool,
    pub theta: Option<f64>,
    pub shift: f64,
    /// Snapshots used; a trailing off-cadence snapshot is dropped.
    pub samples: usize,
    pub power_bound_held: Vec<bool>,
    pub probes: Vec<ProbeSeries>,
    pub pass: bool,
}

/// Moment series, lemma checks, the rate inequality and the key inequality
/// at every `s0`, along a stored trajectory.
#[allow(clippy::too_many_arguments)]
pub fn verify_snapshots(
    params: &ModelParams,
    grid: &Arc<MassGrid>,
    snapshots: &[Snapshot],
    s0_list: &[f64],
    gamma: f64,
    theta: Option<f64>,
    eta: Option<f64>,
    r1: Option<f64>,
) -> Result<Verification, MomentError> {
    let snaps = uniform_prefix(snapshots);
    let scheme = Scheme::new(params, grid.clone());
    let states: Vec<MassState> =
        snaps.iter().map(|s| MassState { grid: grid.clone(), w: s.w.clone(), t: s.t }).collect();
    let mut chemo = Vec::with_capacity(states.len());
    for st in &states {
        chemo.push(scheme.chemo(&st.w).map_err(|_| MomentError::Domain { name: "t", value: st.t })?);
    }
    let terms: Vec<_> = states.iter().zip(&chemo).map(|(s, c)| scheme.terms(&s.w, c)).collect();
    let held: Vec<bool> = states.iter().map(|s| check_power_bound(s, params.k, params.p).ok).collect();
    let shift = psi_shift(params.n, params.p, params.alpha);
    let gamma_in_window = ParamPoint::from_f64(params.n, params.p, params.q, params.m, params.alpha, params.kappa)
        .ok()
        .and_then(|pt| pt.gamma_window().ok())
        .is_some_and(|w| w.feasible && w.contains(gamma));

    let mut probes = Vec::with_capacity(s0_list.len());
    for &s0 in s0_list {
        let probe = Probe::new(grid, s0, gamma, params.p, params.alpha)?;
        let th = theta.unwrap_or(f64::NAN);
        let mut samples: Vec<MomentSample> =
            states.iter().zip(&terms).map(|(s, t)| probe.sample(s, t, params, th)).collect();
        let lemmas: Vec<LemmaReport> = states
            .iter()
            .zip(&chemo)
            .zip(&terms)
            .map(|((s, c), t)| bounds_check(&probe, s, c, t, params))
            .collect();
        let explicit_failures =
            lemmas.iter().enumerate().filter(|(j, l)| held[*j] && !l.explicit_pass()).map(|(j, _)| j).collect();

        let mut keyineq = None;
        let mut rate_violations = Vec::new();
        let rate_tol =
            RATE_TOL * samples.iter().flat_map(|x| x.i.iter()).fold(0.0f64, |a, b| a.max(b.abs()));
        if samples.len() >= 3 {
            fill_derivatives(&mut samples)?;
            let last = samples.len() - 1;
            rate_violations = samples[1..last]
                .iter()
                .enumerate()
                .filter(|(_, x)| x.ineq_margin.is_some_and(|m| m < -rate_tol))
                .map(|(j, _)| j + 1)
                .collect();
            if let Some(th) = theta {
                let rep = verify_keyineq(&samples, probe.s0, gamma, th, shift, None)?;
                if let Some((c1, c2)) = rep.riccati(shift) {
                    for x in &mut samples {
                        x.c1 = Some(c1);
                        x.c2 = Some(c2);
                    }
                }
                keyineq = Some(rep);
            }
        }

        let phi0 = match (eta, samples.first()) {
            (Some(eta), Some(first)) => {
                let bound = phi0_lower_bound(eta, params.m1, params.n, gamma, probe.s0)?;
                let nf = params.n as f64;
                let hypothesis = r1.is_some_and(|r| r.powf(nf) <= (1.0 - eta) * probe.s0);
                Some(Phi0Check { eta, hypothesis, phi0: first.phi, bound, pass: first.phi >= bound })
            }
            _ => None,
        };

        probes.push(ProbeSeries {
            s0_requested: probe.s0_requested,
            s0: probe.s0,
            snapped: probe.snapped(),
            samples,
            lemmas,
            keyineq,
            rate_tol,
            rate_violations,
            explicit_failures,
            phi0,
        });
    }
    let pass = probes.iter().all(|p| {
        p.explicit_failures.is_empty()
            && (!gamma_in_window || p.rate_violations.is_empty())
            && p.phi0.as_ref().map_or(true, |c| !c.hypothesis || c.pass)
    });
    Ok(Verification {
        gamma,
        gamma_in_window,
        theta,
        shift,
        samples: snaps.len(),
        power_bound_held: held,
        probes,
        pass,
    })
}

/// Longest leading run of snapshots at one spacing.
fn uniform_prefix(snaps: &[Snapshot]) -> &[Snapshot] {
    if snaps.len() < 3 {
        return snaps;
    }
    let dt = snaps[1].t - snaps[0].t;
    let mut end = 2;
    while end < snaps.len() && ((snaps[end].t - snaps[end - 1].t) - dt).abs() <= 1e-9 * dt {
        end += 1;
    }
    &snaps[..end]
}
