use serde::Serialize;

use super::{pos, psi_shift, MomentError, Probe};
use crate::dynamics::{check_power_bound, MassState, ModelParams, Scheme};
use crate::elliptic::ChemoField;
use crate::quadrature::{self, power_integral};

/// Relative slack for comparisons that hold with equality in exact arithmetic.
const REL_TOL: f64 = 1e-12;

/// `lhs >= rhs` with an explicit constant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundCheck {
    pub hypothesis: bool,
    pub pass: bool,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

impl BoundCheck {
    fn new(hypothesis: bool, lhs: f64, rhs: f64) -> Self {
        let margin = lhs - rhs;
        let pass = margin >= -REL_TOL * lhs.abs().max(rhs.abs());
        Self { hypothesis, pass, lhs, rhs, margin }
    }
}

/// Worst node of a pointwise upper bound `value <= bound`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PointwiseCheck {
    pub hypothesis: bool,
    pub pass: bool,
    pub worst_node: Option<usize>,
    /// `min (bound - value)` over the checked nodes.
    pub margin: f64,
    /// `max value / bound`
    pub worst_ratio: f64,
}

/// Smallest `C` with `I >= -C · form`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FittedBound {
    pub hypothesis: bool,
    pub value: f64,
    /// The right-hand side shape with `C = 1`.
    pub form: f64,
    pub constant: f64,
}

impl FittedBound {
    fn new(hypothesis: bool, value: f64, form: f64) -> Self {
        let constant = if value >= 0.0 {
            0.0
        } else if form > 0.0 {
            -value / form
        } else {
            f64::INFINITY
        };
        Self { hypothesis, value, form, constant }
    }
}

/// Fitted constants of the chemoattractant estimate
/// `z <= (c₁/n) s0^{2/n-1} s + n⁻² ∫₀ˢ ∫_σ^{s0} ξ^{2/n-2} w dξ dσ`
/// and of the `γ̃` form of the double integral.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZEstimate {
    pub c1: f64,
    pub gamma_tilde: Option<f64>,
    pub c2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LemmaReport {
    pub t: f64,
    pub s0_requested: f64,
    pub s0: f64,
    pub gamma: f64,
    pub phi: f64,
    pub psi_alpha: f64,
    #[serde(rename = "I")]
    pub i: [f64; 4],
    /// `K` used in `I₁ >= χn(K+R^p)^{-(1-α)₊} ψ_α`: the state's own fit.
    pub k_fit: f64,
    pub i1_lower: BoundCheck,
    pub w_psi: PointwiseCheck,
    pub phi_psi: BoundCheck,
    pub i2_case_i: FittedBound,
    pub i2_case_ii: FittedBound,
    pub i3: FittedBound,
    pub i4: FittedBound,
    pub z_estimate: ZEstimate,
}

impl LemmaReport {
    /// The three checks with explicit constants.
    pub fn explicit_pass(&self) -> bool {
        self.i1_lower.pass && self.w_psi.pass && self.phi_psi.pass
    }
}

pub fn verify_lemma_bounds(
    state: &MassState,
    chemo: &ChemoField,
    s0: f64,
    gamma: f64,
    params: &ModelParams,
) -> Result<LemmaReport, MomentError> {
    let probe = Probe::new(&state.grid, s0, gamma, params.p, params.alpha)?;
    let terms = Scheme::new(params, state.grid.clone()).terms(&state.w, chemo);
    Ok(check_with(&probe, state, chemo, &terms, params))
}

pub(crate) fn check_with(
    probe: &Probe,
    state: &MassState,
    chemo: &ChemoField,
    terms: &crate::dynamics::Terms,
    params: &ModelParams,
) -> LemmaReport {
    let n = params.n;
    let nf = n as f64;
    let (p, m, alpha, gamma, q, kappa) = (params.p, params.m, params.alpha, probe.gamma, params.q, params.kappa);
    let s0 = probe.s0;
    let k = probe.index;
    let s = &state.grid.s;
    let ws = state.grid.derivative(&state.w);
    let phi = probe.phi(&state.w);
    let psi = probe.psi(&state.w, &ws);
    let root = psi.sqrt();
    let i = probe.integrals(state, terms, params);
    let shift = psi_shift(n, p, alpha);
    let lower = pos(1.0 - alpha);
    let upper = pos(alpha - 1.0);
    let wpsi_ok = gamma - shift > 0.0 && gamma - shift < 1.0;

    let k_fit = check_power_bound(state, 1.0, p).k_fit;
    let c1 = params.chi * nf * (k_fit + params.radius.powf(p)).powf(-lower);
    let i1_lower = BoundCheck::new(true, i[0], c1 * psi);

    let mut w_psi = PointwiseCheck {
        hypothesis: wpsi_ok,
        pass: true,
        worst_node: None,
        margin: f64::INFINITY,
        worst_ratio: 0.0,
    };
    for j in 1..k {
        let bound = 2f64.sqrt() * s[j].powf(gamma / 2.0 - shift / 2.0) * (s0 - s[j]).powf(-0.5) * root;
        let value = state.w[j];
        let margin = bound - value;
        if margin < w_psi.margin {
            w_psi.margin = margin;
            w_psi.worst_node = Some(j);
        }
        if bound > 0.0 {
            w_psi.worst_ratio = w_psi.worst_ratio.max(value / bound);
        } else if value > 0.0 {
            w_psi.worst_ratio = f64::INFINITY;
        }
        if margin < -REL_TOL * bound.abs().max(value.abs()) {
            w_psi.pass = false;
        }
    }
    if w_psi.worst_node.is_none() {
        w_psi.margin = 0.0;
    }

    let psicond = gamma < 2.0 - shift;
    let phi_psi_rhs = if psicond {
        let b = quadrature::beta(1.0 - gamma / 2.0 - shift / 2.0, 0.5).unwrap_or(f64::NAN);
        2f64.sqrt() * b * s0.powf((3.0 - gamma) / 2.0 - shift / 2.0) * root
    } else {
        f64::NAN
    };
    // φ <= rhs, stored as rhs >= φ
    let mut phi_psi = BoundCheck::new(psicond, phi_psi_rhs, phi);
    if !psicond {
        phi_psi.pass = false;
    }

    let pn = p / nf;
    let i2i_hyp = wpsi_ok
        && m < 1.0 + (nf - 2.0) / p
        && 1.0 - 2.0 / nf - pn * pos(m - 1.0) < gamma
        && gamma < 2.0 - 4.0 / nf - pn * (2.0 * pos(m - 1.0) + lower);
    let tail = s0.powf(3.0 - 2.0 / nf - gamma);
    let i2i_form = s0.powf((3.0 - gamma) / 2.0 - 2.0 / nf - pn / 2.0 * (2.0 * pos(m - 1.0) + lower)) * root + tail;
    let i2ii_hyp = wpsi_ok && m < 1f64.min(2.0 * (nf - 1.0) / p) && gamma < 2.0 - 2.0 / nf - pn * m;
    let i2ii_form = s0.powf(3.0 - gamma - 2.0 / nf - pn * m) + tail;

    let i3_hyp = wpsi_ok && 1.0 - 2.0 / p < alpha && alpha < 1.0 + 2.0 / p && gamma < 2.0 - 2.0 * pn * upper;
    let i3_form = s0.powf(2.0 / nf + (1.0 - gamma) / 2.0 - pn / 2.0 * (lower + 2.0 * upper)) * root
        + s0.powf(2.0 / nf - pn * (lower + upper)) * psi;

    let i4_hyp = wpsi_ok && params.mu1 > 0.0 && pn * (2.0 * (kappa - 1.0) + lower) - 2.0 * q / nf < gamma;
    let i4_form = s0.powf((3.0 - gamma) / 2.0 + q / nf - pn / 2.0 * (2.0 * (kappa - 1.0) + lower)) * root;

    let z_estimate = z_estimate(state, chemo, probe, params, i3_hyp, root);

    LemmaReport {
        t: state.t,
        s0_requested: probe.s0_requested,
        s0,
        gamma,
        phi,
        psi_alpha: psi,
        i,
        k_fit,
        i1_lower,
        w_psi,
        phi_psi,
        i2_case_i: FittedBound::new(i2i_hyp, i[1], i2i_form),
        i2_case_ii: FittedBound::new(i2ii_hyp, i[1], i2ii_form),
        i3: FittedBound::new(i3_hyp, i[2], i3_form),
        i4: FittedBound::new(i4_hyp, i[3], i4_form),
        z_estimate,
    }
}

/// Midpoint of the admissible interval for the auxiliary exponent `γ̃`.
pub(crate) fn gamma_tilde(n: u32, p: f64, alpha: f64, gamma: f64) -> Option<f64> {
    let nf = n as f64;
    let (lo, hi) = if alpha < 1.0 {
        let d = p / nf * (1.0 - alpha);
        (d.max(gamma - 4.0 / nf + 2.0 * d), gamma.min(2.0 - 4.0 / nf + d))
    } else {
        let d = p / nf * (alpha - 1.0);
        (0f64.max(gamma - 4.0 / nf + 2.0 * d), gamma.min(2.0 - 4.0 / nf))
    };
    (lo < hi).then(|| 0.5 * (lo + hi))
}

fn z_estimate(
    state: &MassState,
    chemo: &ChemoField,
    probe: &Probe,
    params: &ModelParams,
    hypothesis: bool,
    root_psi: f64,
) -> ZEstimate {
    let nf = params.n as f64;
    let s = &state.grid.s;
    let w = &state.w;
    let k = probe.index;
    let s0 = probe.s0;
    let c = 2.0 / nf - 2.0;

    // G(σ_j) = ∫_{σ_j}^{s0} ξ^c w dξ with w linear on each cell and w(0) = 0
    let mut cell = vec![0.0; k];
    for j in 0..k {
        let (x1, x2) = (s[j], s[j + 1]);
        let h = x2 - x1;
        let p1 = power_integral(c + 1.0, x1, x2);
        cell[j] = if x1 == 0.0 {
            w[j + 1] * p1 / h
        } else {
            let p0 = power_integral(c, x1, x2);
            (w[j] * (x2 * p0 - p1) + w[j + 1] * (p1 - x1 * p0)) / h
        };
    }
    let mut g = vec![0.0; k + 1];
    for j in (0..k).rev() {
        g[j] = g[j + 1] + cell[j];
    }
    let mut dbl = vec![0.0; k + 1];
    for j in 1..=k {
        dbl[j] = dbl[j - 1] + 0.5 * (s[j] - s[j - 1]) * (g[j - 1] + g[j]);
    }

    let lin = s0.powf(2.0 / nf - 1.0) / nf;
    let c1 = (1..k)
        .map(|j| (chemo.z[j] - dbl[j] / (nf * nf)) / (lin * s[j]))
        .fold(0.0, f64::max);

    let gamma_tilde = if hypothesis {
        gamma_tilde(params.n, params.p, params.alpha, probe.gamma)
    } else {
        None
    };
    let c2 = gamma_tilde.map(|gt| {
        let shift = if params.alpha < 1.0 { psi_shift(params.n, params.p, params.alpha) } else { 0.0 };
        let pre = s0.powf(-0.5 + (probe.gamma - gt) / 2.0) * root_psi;
        (1..k)
            .map(|j| {
                let form = pre * s[j].powf(2.0 / nf + gt / 2.0 - shift / 2.0);
                let v = dbl[j] / (nf * nf);
                if v <= 0.0 {
                    0.0
                } else if form > 0.0 {
                    v / form
                } else {
                    f64::INFINITY
                }
            })
            .fold(0.0, f64::max)
    });
    ZEstimate { c1, gamma_tilde, c2 }
}
