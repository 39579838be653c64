//! Scenario files, the classify / simulate / verify / power-bound pipelines,
//! and their on-disk artifacts.

mod output;
mod verify;

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamics::{
    init_profile, run, BlowupReport, FieldProblem, MassState, ModelParams, RunOptions, Scheme, Snapshot,
};
use crate::mesh::MassGrid;
use crate::regions::{self, GammaWindow, KappaThreshold, ParamPoint, RegionLabel, Thm2Label};

pub use output::{read_trajectory, write_bundle, write_moments_csv, write_trajectory_csv, TrajectoryFrame};
pub use verify::{verify_snapshots, ProbeSeries, Phi0Check, Verification};

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("invalid scenario: {}", list(.0))]
    Invalid(Vec<FieldProblem>),
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
}

fn list(p: &[FieldProblem]) -> String {
    p.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    ClassifyOnly,
    Simulate,
    SimulateAndVerify,
    Thm2Pipeline,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Numerics {
    #[serde(rename = "N")]
    pub cells: usize,
    pub grading: f64,
    pub cfl: f64,
    pub u_cap: Option<f64>,
    pub dt_min: f64,
    #[serde(rename = "T_end")]
    pub t_end: f64,
    pub snapshot_every: f64,
}

impl Default for Numerics {
    fn default() -> Self {
        Self { cells: 512, grading: 2.0, cfl: 0.4, u_cap: None, dt_min: 1e-12, t_end: 1.0, snapshot_every: 0.01 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

/// `"auto"` (window midpoint) or an explicit value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GammaChoice {
    Auto(Auto),
    Value(f64),
}

impl Default for GammaChoice {
    fn default() -> Self {
        GammaChoice::Auto(Auto::Auto)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Probes {
    pub s0_list: Vec<f64>,
    pub gamma: GammaChoice,
    pub eta: Option<f64>,
    pub r1: Option<f64>,
    /// Added to the critical exponent in the power-bound pipeline.
    pub eps: f64,
}

impl Default for Probes {
    fn default() -> Self {
        Self { s0_list: Vec::new(), gamma: GammaChoice::default(), eta: None, r1: None, eps: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Initial {
    /// `min(A, L r^{-exponent})`; the exponent defaults to `params.p`.
    Capped {
        #[serde(rename = "L")]
        cap: f64,
        #[serde(default)]
        exponent: Option<f64>,
    },
    Uniform {
        c: f64,
    },
    Zero,
}

impl Default for Initial {
    fn default() -> Self {
        Initial::Zero
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub params: ModelParams,
    #[serde(default)]
    pub numerics: Numerics,
    #[serde(default)]
    pub probes: Probes,
    pub mode: Mode,
    #[serde(default)]
    pub initial: Initial,
}

fn problem(field: &str, message: impl Into<String>) -> FieldProblem {
    FieldProblem { field: field.to_string(), message: message.into() }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ScenarioError::Io { path: path.to_path_buf(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    /// Every violated field across the scenario.
    pub fn problems(&self) -> Vec<FieldProblem> {
        let mut out: Vec<FieldProblem> = self
            .params
            .problems()
            .into_iter()
            .map(|p| FieldProblem { field: format!("params.{}", p.field), ..p })
            .collect();
        let top = self.params.radius.powf(self.params.n as f64);
        let nu = &self.numerics;
        if nu.cells < 16 {
            out.push(problem("numerics.N", format!("must be at least 16, got {}", nu.cells)));
        }
        if !(nu.grading >= 1.0 && nu.grading.is_finite()) {
            out.push(problem("numerics.grading", format!("must be at least 1, got {}", nu.grading)));
        }
        if !(nu.cfl > 0.0 && nu.cfl <= 1.0) {
            out.push(problem("numerics.cfl", format!("must lie in (0, 1], got {}", nu.cfl)));
        }
        if let Some(c) = nu.u_cap {
            if !(c > 0.0) {
                out.push(problem("numerics.u_cap", format!("must be positive, got {c}")));
            }
        }
        if !(nu.dt_min > 0.0) {
            out.push(problem("numerics.dt_min", format!("must be positive, got {}", nu.dt_min)));
        }
        if !(nu.t_end > 0.0 && nu.t_end.is_finite()) {
            out.push(problem("numerics.T_end", format!("must be positive, got {}", nu.t_end)));
        }
        if !(nu.snapshot_every > 0.0 && nu.snapshot_every <= nu.t_end) {
            out.push(problem("numerics.snapshot_every", format!("must lie in (0, T_end], got {}", nu.snapshot_every)));
        }
        let pr = &self.probes;
        for &s0 in &pr.s0_list {
            if !(s0 > 0.0 && s0 <= top) {
                out.push(problem("probes.s0_list", format!("{s0} is outside (0, R^n = {top}]")));
            }
        }
        if let GammaChoice::Value(g) = pr.gamma {
            if !(g > 0.0 && g < 1.0) {
                out.push(problem("probes.gamma", format!("must lie in (0, 1), got {g}")));
            }
        }
        if let Some(eta) = pr.eta {
            if !(eta > 0.0 && eta < 1.0) {
                out.push(problem("probes.eta", format!("must lie in (0, 1), got {eta}")));
            }
        }
        if let Some(r1) = pr.r1 {
            if !(r1 > 0.0 && r1 < self.params.radius) {
                out.push(problem("probes.r1", format!("must lie in (0, R), got {r1}")));
            }
        }
        if !(pr.eps >= 0.0) {
            out.push(problem("probes.eps", format!("must be nonnegative, got {}", pr.eps)));
        }
        match self.initial {
            Initial::Capped { cap, exponent } => {
                if !(cap > 0.0) {
                    out.push(problem("initial.L", format!("must be positive, got {cap}")));
                }
                if let Some(e) = exponent {
                    if !(e >= self.params.n as f64) {
                        out.push(problem("initial.exponent", format!("must be at least n, got {e}")));
                    }
                }
                if pr.r1.is_none() {
                    out.push(problem("probes.r1", "capped initial data needs r1"));
                }
            }
            Initial::Uniform { c } => {
                if !(c >= 0.0 && c.is_finite()) {
                    out.push(problem("initial.c", format!("must be nonnegative, got {c}")));
                }
            }
            Initial::Zero => {}
        }
        if !out.is_empty() {
            return out;
        }
        match self.mode {
            Mode::SimulateAndVerify => {
                if pr.s0_list.is_empty() {
                    out.push(problem("probes.s0_list", "verification needs at least one s0"));
                }
                if pr.gamma == GammaChoice::default() {
                    match self.window() {
                        Ok(w) if w.feasible => {}
                        Ok(w) => out.push(problem(
                            "probes.gamma",
                            format!("\"auto\" needs a nonempty window, got ({}, {})", w.lower, w.upper),
                        )),
                        Err(e) => out.push(problem("probes.gamma", format!("\"auto\" needs a region: {e}"))),
                    }
                }
            }
            Mode::Thm2Pipeline => {
                let p = &self.params;
                match regions::classify_thm2(p.n, p.m, p.alpha) {
                    Ok(Thm2Label::None) => out.push(problem("params", "(m, alpha) lies in no power-bound region")),
                    Ok(_) => {}
                    Err(e) => out.push(problem("params", e.to_string())),
                }
                if let Err(e) = regions::exponent_p0(p.n, p.m, p.alpha, pr.eps) {
                    out.push(problem("probes.eps", e.to_string()));
                }
                if !matches!(self.initial, Initial::Capped { .. }) {
                    out.push(problem("initial", "the power-bound pipeline needs capped initial data"));
                }
            }
            _ => {}
        }
        out
    }

    pub fn validate(&self) -> Result<(), ScenarioError> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(ScenarioError::Invalid(p))
        }
    }

    fn point(&self) -> Result<ParamPoint, regions::RegionError> {
        let p = &self.params;
        ParamPoint::from_f64(p.n, p.p, p.q, p.m, p.alpha, p.kappa)
    }

    fn window(&self) -> Result<GammaWindow, regions::RegionError> {
        self.point()?.gamma_window()
    }

    pub fn grid(&self) -> Result<Arc<MassGrid>, ScenarioError> {
        MassGrid::graded(self.params.n, self.params.radius, self.numerics.cells, self.numerics.grading)
            .map(Arc::new)
            .map_err(|e| ScenarioError::Invalid(vec![problem("numerics", e.to_string())]))
    }

    pub fn run_options(&self) -> RunOptions {
        let nu = &self.numerics;
        RunOptions {
            t_end: nu.t_end,
            cfl: nu.cfl,
            u_cap: nu.u_cap,
            dt_min: nu.dt_min,
            sample_every: nu.snapshot_every,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub labels: Vec<RegionLabel>,
    pub label: String,
    pub kappa_threshold: Option<KappaThreshold>,
    pub kappa_admissible: bool,
    pub window: Option<GammaWindow>,
    pub theta: Option<f64>,
    pub thm2_label: Thm2Label,
    pub thm2_kappa_max: Option<f64>,
}

pub fn classify(params: &ModelParams) -> Result<Classification, regions::RegionError> {
    let pt = ParamPoint::from_f64(params.n, params.p, params.q, params.m, params.alpha, params.kappa)?;
    let labels = pt.classify();
    let window = pt.gamma_window().ok();
    let theta = window.and_then(|w| pt.theta_exponent(w.lemma).ok());
    let thm2 = ParamPoint::from_f64(params.n, params.n as f64, params.q, params.m, params.alpha, 1.0)?;
    Ok(Classification {
        label: regions::label_text(&labels),
        labels,
        kappa_threshold: pt.kappa_threshold(),
        kappa_admissible: pt.kappa_admissible(),
        window,
        theta,
        thm2_label: thm2.classify_thm2(),
        thm2_kappa_max: thm2.kappa_threshold_thm2(),
    })
}

/// The power-bound chain: region and κ, the exponent `p`, and whether the
/// power bound held along the run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Thm2Report {
    pub label: Thm2Label,
    pub kappa_max: Option<f64>,
    pub kappa_admissible: bool,
    pub eps: f64,
    pub p: f64,
    /// Blow-up region classification at the computed `p`.
    pub region: Vec<RegionLabel>,
    pub region_kappa_admissible: bool,
    pub power_bound_held: Option<bool>,
    #[serde(rename = "K_fit")]
    pub k_fit: Option<f64>,
    pub hypothesis_chain_held: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Bundle {
    pub mode: Mode,
    pub scenario: Scenario,
    pub classification: Option<Classification>,
    pub thm2: Option<Thm2Report>,
    pub report: Option<BlowupReport>,
    pub verification: Option<Verification>,
    /// Failures met while running; a bundle with errors is incomplete.
    pub errors: Vec<String>,
    #[serde(skip)]
    pub snapshots: Vec<Snapshot>,
    #[serde(skip)]
    pub grid: Option<Arc<MassGrid>>,
}

impl Bundle {
    pub fn ok(&self) -> bool {
        self.errors.is_empty()
    }
}

fn initial_state(sc: &Scenario, params: &ModelParams, grid: Arc<MassGrid>) -> Result<MassState, String> {
    match sc.initial {
        Initial::Zero => Ok(MassState::zero(grid)),
        Initial::Uniform { c } => Ok(MassState::uniform(grid, c)),
        Initial::Capped { cap, exponent } => {
            let r1 = sc.probes.r1.ok_or("capped initial data needs r1")?;
            init_profile(params, grid, r1, cap, exponent.unwrap_or(params.p)).map_err(|e| e.to_string())
        }
    }
}

/// Validates, then runs the pieces the mode asks for. Errors after
/// validation land in `Bundle::errors`.
pub fn run_scenario(sc: &Scenario) -> Result<Bundle, ScenarioError> {
    sc.validate()?;
    let mut bundle = Bundle {
        mode: sc.mode,
        scenario: sc.clone(),
        classification: None,
        thm2: None,
        report: None,
        verification: None,
        errors: Vec::new(),
        snapshots: Vec::new(),
        grid: None,
    };
    let mut params = sc.params.clone();

    if sc.mode == Mode::Thm2Pipeline {
        let n = params.n;
        let label = regions::classify_thm2(n, params.m, params.alpha).unwrap_or(Thm2Label::None);
        let kappa_max = regions::kappa_threshold_thm2(n, params.q, params.m, params.alpha).ok().flatten();
        // validated above
        let p = regions::exponent_p0(n, params.m, params.alpha, sc.probes.eps).unwrap_or(f64::NAN);
        params.p = p;
        let pt = ParamPoint::from_f64(n, p, params.q, params.m, params.alpha, params.kappa);
        let (region, region_ok) = match &pt {
            Ok(pt) => (pt.classify(), pt.kappa_admissible()),
            Err(e) => {
                bundle.errors.push(e.to_string());
                (Vec::new(), false)
            }
        };
        bundle.thm2 = Some(Thm2Report {
            label,
            kappa_max,
            kappa_admissible: kappa_max.is_some_and(|k| params.kappa < k),
            eps: sc.probes.eps,
            p,
            region,
            region_kappa_admissible: region_ok,
            power_bound_held: None,
            k_fit: None,
            hypothesis_chain_held: false,
        });
    }

    match classify(&params) {
        Ok(c) => bundle.classification = Some(c),
        Err(e) => bundle.errors.push(format!("classification: {e}")),
    }
    if sc.mode == Mode::ClassifyOnly {
        return Ok(bundle);
    }

    let grid = sc.grid()?;
    bundle.grid = Some(grid.clone());
    let state0 = match initial_state(sc, &params, grid.clone()) {
        Ok(s) => s,
        Err(e) => {
            bundle.errors.push(format!("initial data: {e}"));
            return Ok(bundle);
        }
    };
    let scheme = Scheme::new(&params, grid.clone());
    match run(&scheme, state0, &sc.run_options(), |_| {}) {
        Ok(out) => {
            bundle.snapshots = out.snapshots;
            bundle.report = Some(out.report);
        }
        Err(e) => {
            bundle.errors.push(format!("run: {e}"));
            return Ok(bundle);
        }
    }

    if let (Some(t2), Some(rep)) = (bundle.thm2.as_mut(), bundle.report.as_ref()) {
        let held = rep.power_bound_ok.iter().all(|x| x.1);
        t2.power_bound_held = Some(held);
        t2.k_fit = Some(rep.k_fit);
        t2.hypothesis_chain_held =
            t2.label != Thm2Label::None && t2.kappa_admissible && !t2.region.is_empty() && t2.region_kappa_admissible && held;
    }

    if sc.mode == Mode::SimulateAndVerify {
        let cls = bundle.classification.as_ref();
        let gamma = match sc.probes.gamma {
            GammaChoice::Value(g) => g,
            GammaChoice::Auto(_) => cls.and_then(|c| c.window).map(|w| w.midpoint()).unwrap_or(f64::NAN),
        };
        let theta = cls.and_then(|c| c.theta);
        match verify_snapshots(&params, &grid, &bundle.snapshots, &sc.probes.s0_list, gamma, theta, sc.probes.eta, sc.probes.r1) {
            Ok(v) => bundle.verification = Some(v),
            Err(e) => bundle.errors.push(format!("verification: {e}")),
        }
    }
    Ok(bundle)
}

#[derive(Debug, Serialize)]
pub struct BatchEntry {
    pub name: String,
    pub dir: PathBuf,
    pub ok: bool,
    pub error: Option<String>,
}

/// Runs scenarios on `threads` workers, each writing to `out/<name>/`.
pub fn run_batch(items: &[(String, Scenario)], out: &Path, threads: usize) -> Vec<BatchEntry> {
    use rayon::prelude::*;
    let work = || {
        items
            .par_iter()
            .map(|(name, sc)| {
                let dir = out.join(name);
                let res = run_scenario(sc).and_then(|b| write_bundle(&b, &dir).map(|_| b));
                match res {
                    Ok(b) => BatchEntry { name: name.clone(), dir, ok: b.ok(), error: b.errors.first().cloned() },
                    Err(e) => BatchEntry { name: name.clone(), dir, ok: false, error: Some(e.to_string()) },
                }
            })
            .collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

#[cfg(test)]
mod tests;
