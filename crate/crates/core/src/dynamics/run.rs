use serde::{Deserialize, Serialize};

use super::scheme::{Scheme, StepError, Terms};
use super::{check_power_bound, reconstruct_u, MassState};
use crate::elliptic::ChemoField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trigger {
    SupThreshold,
    DtCollapse,
    HorizonReached,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BlowupReport {
    pub detected: bool,
    #[serde(rename = "T_star_numeric")]
    pub t_star: Option<f64>,
    pub trigger: Trigger,
    /// `(t, max u)`, logged at every sample time and whenever the maximum
    /// moves by more than 5% since the last entry.
    pub sup_u_history: Vec<(f64, f64)>,
    /// `(t, u <= K r^{-p})` at every sample time.
    pub power_bound_ok: Vec<(f64, bool)>,
    /// Smallest `K` with `u <= K r^{-p}` over every accepted step.
    #[serde(rename = "K_fit")]
    pub k_fit: f64,
    pub steps: u64,
    pub rejected: u64,
    pub u0_sup: f64,
    pub u_cap: f64,
    /// Why the last rejected step failed, if any step was rejected.
    pub last_rejection: Option<StepError>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub t_end: f64,
    pub cfl: f64,
    /// Absolute cap on `max u`; `None` means `1e8 max u0`.
    pub u_cap: Option<f64>,
    pub dt_min: f64,
    /// Time between samples (snapshots and moment hooks).
    pub sample_every: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self { t_end: 1.0, cfl: 0.4, u_cap: None, dt_min: 1e-12, sample_every: 0.01 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Snapshot {
    pub t: f64,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub z: Vec<f64>,
}

/// What a sample hook sees.
pub struct Sample<'a> {
    pub state: &'a MassState,
    pub chemo: &'a ChemoField,
    pub terms: &'a Terms,
    pub index: usize,
}

pub struct RunOutput {
    pub snapshots: Vec<Snapshot>,
    pub report: BlowupReport,
    pub last: MassState,
}

const LOG_RATIO: f64 = 1.05;

/// Integrates to `t_end` or until a blow-up trigger fires. `hook` runs at
/// t = 0 and at every multiple of `sample_every`.
pub fn run<F: FnMut(&Sample)>(
    scheme: &Scheme,
    state0: MassState,
    opts: &RunOptions,
    mut hook: F,
) -> Result<RunOutput, StepError> {
    let params = &scheme.params;
    let u0 = reconstruct_u(&state0);
    let u0_sup = u0.iter().cloned().fold(0.0, f64::max);
    let u_cap = opts.u_cap.unwrap_or(1e8 * u0_sup);
    let rp: Vec<f64> = scheme.radii.iter().map(|r| r.powf(params.p)).collect();

    let mut state = state0;
    let mut chemo = scheme.chemo(&state.w)?;
    let mut snapshots = Vec::new();
    let mut report = BlowupReport {
        detected: false,
        t_star: None,
        trigger: Trigger::HorizonReached,
        sup_u_history: Vec::new(),
        power_bound_ok: Vec::new(),
        k_fit: 0.0,
        steps: 0,
        rejected: 0,
        u0_sup,
        u_cap,
        last_rejection: None,
    };
    let mut sample_index = 0usize;
    let mut record = |state: &MassState, chemo: &ChemoField, report: &mut BlowupReport, idx: usize| {
        let u = reconstruct_u(state);
        let sup = u.iter().cloned().fold(0.0, f64::max);
        report.sup_u_history.push((state.t, sup));
        let pb = check_power_bound(state, params.k, params.p);
        report.power_bound_ok.push((state.t, pb.ok));
        snapshots.push(Snapshot { t: state.t, w: state.w.clone(), u, z: chemo.z.clone() });
        let terms = scheme.terms(&state.w, chemo);
        hook(&Sample { state, chemo, terms: &terms, index: idx });
    };
    record(&state, &chemo, &mut report, sample_index);
    report.k_fit = k_fit(&state, &rp);

    let mut shrink = 1.0f64;
    let mut last_logged = report.sup_u_history[0].1;
    loop {
        let next_sample = ((sample_index + 1) as f64 * opts.sample_every).min(opts.t_end);
        let dt_stable = scheme.stable_dt(&state.w, &chemo, opts.cfl) * shrink;
        let gap = next_sample - state.t;
        let mut dt = dt_stable.min(gap);
        if dt < opts.dt_min && gap > opts.dt_min {
            report.trigger = Trigger::DtCollapse;
            break;
        }
        let lands = dt >= gap;
        if lands {
            dt = gap;
        }
        match scheme.step(&state, &chemo, dt) {
            Ok(mut next) => {
                if lands {
                    next.t = next_sample;
                }
                state = next;
                chemo = scheme.chemo(&state.w)?;
                report.steps += 1;
                shrink = (shrink * 2.0).min(1.0);
                report.k_fit = report.k_fit.max(k_fit(&state, &rp));
                let sup = sup_u(&state);
                if lands {
                    sample_index += 1;
                    record(&state, &chemo, &mut report, sample_index);
                    last_logged = sup;
                } else if sup > last_logged * LOG_RATIO || sup < last_logged / LOG_RATIO {
                    report.sup_u_history.push((state.t, sup));
                    last_logged = sup;
                }
                if sup > u_cap {
                    report.trigger = Trigger::SupThreshold;
                    if !lands {
                        report.sup_u_history.push((state.t, sup));
                    }
                    break;
                }
                if state.t >= opts.t_end {
                    break;
                }
            }
            Err(e) => {
                report.rejected += 1;
                report.last_rejection = Some(e);
                shrink *= 0.5;
                if dt * 0.5 < opts.dt_min {
                    report.trigger = Trigger::DtCollapse;
                    break;
                }
            }
        }
    }
    if report.trigger != Trigger::HorizonReached {
        report.detected = true;
        report.t_star = Some(state.t);
        let sup = sup_u(&state);
        if report.sup_u_history.last().map(|h| h.0) != Some(state.t) {
            report.sup_u_history.push((state.t, sup));
        }
    }
    Ok(RunOutput { snapshots, report, last: state })
}

fn sup_u(state: &MassState) -> f64 {
    reconstruct_u(state).into_iter().fold(0.0, f64::max)
}

fn k_fit(state: &MassState, rp: &[f64]) -> f64 {
    reconstruct_u(state)
        .iter()
        .zip(rp)
        .skip(1)
        .map(|(u, r)| u * r)
        .fold(0.0, f64::max)
}
