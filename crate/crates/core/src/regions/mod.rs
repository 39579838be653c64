//! Parameter regions, kappa thresholds, gamma windows and theta exponents.
//!
//! All predicates are linear inequalities in the parameters. They are decided
//! in f64 and re-decided on exact rationals whenever some comparison is a
//! near-tie, so points sitting on a boundary line resolve by the strict or
//! non-strict symbol of the condition itself.

pub(crate) mod exact;
mod families;
mod grid;

use std::fmt;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use exact::{decide, Scalar, Vars};
pub use exact::Exactish;
pub use grid::{
    region_grid, thm2_grid, write_region_csv, write_thm2_csv, GridAxis, RegionCell, Thm2Cell,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("dimension n = {0} must be at least 3")]
    Dimension(u32),
    #[error("p = {p} must be at least n = {n}")]
    PBelowN { p: f64, n: u32 },
    #[error("{name} = {value} must be positive")]
    NonPositive { name: &'static str, value: f64 },
    #[error("q = {0} must be nonnegative")]
    NegativeQ(f64),
    #[error("kappa = {0} must be at least 1")]
    KappaBelowOne(f64),
    #[error("{name} is not a finite number")]
    NotFinite { name: &'static str },
    #[error("cannot read '{0}' as an exact number")]
    Parse(String),
    #[error("no region of the dimension's family contains the point")]
    NoRegion,
    #[error("theta = {theta} lies outside (0, {ceiling})")]
    ThetaOutOfRange { theta: f64, ceiling: f64 },
    #[error("(m - alpha) n + 1 = {0} must be positive")]
    P0Domain(f64),
    #[error("grid resolution must be at least 2 per axis")]
    Resolution,
}

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionLabel {
    A1,
    A2,
    A3_1,
    A3_2,
    A4,
    B1_1,
    B1_2,
    B2,
    B3,
    C1_1,
    C1_2,
    C2,
    C3_1,
    C3_2,
    C3_3,
    D1,
    D2_1,
    D2_2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Region {
    A1,
    A2,
    A3,
    A4,
    B1,
    B2,
    B3,
    C1,
    C2,
    C3,
    D1,
    D2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KappaCondition {
    I,
    II,
    III,
    IV,
}

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WindowLemma {
    L4_1,
    L4_2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Thm2Label {
    E1,
    F1,
    F2,
    None,
}

impl RegionLabel {
    pub const ALL: [RegionLabel; 18] = {
        use RegionLabel::*;
        [
            A1, A2, A3_1, A3_2, A4, B1_1, B1_2, B2, B3, C1_1, C1_2, C2, C3_1, C3_2, C3_3, D1,
            D2_1, D2_2,
        ]
    };

    /// Labels tested for dimension n (n >= 6 shares the D family).
    pub fn family(n: u32) -> &'static [RegionLabel] {
        use RegionLabel::*;
        match n {
            3 => &[A1, A2, A3_1, A3_2, A4],
            4 => &[B1_1, B1_2, B2, B3],
            5 => &[C1_1, C1_2, C2, C3_1, C3_2, C3_3],
            _ => &[D1, D2_1, D2_2],
        }
    }

    pub fn coarse(self) -> Region {
        use RegionLabel::*;
        match self {
            A1 => Region::A1,
            A2 => Region::A2,
            A3_1 | A3_2 => Region::A3,
            A4 => Region::A4,
            B1_1 | B1_2 => Region::B1,
            B2 => Region::B2,
            B3 => Region::B3,
            C1_1 | C1_2 => Region::C1,
            C2 => Region::C2,
            C3_1 | C3_2 | C3_3 => Region::C3,
            D1 => Region::D1,
            D2_1 | D2_2 => Region::D2,
        }
    }

    pub fn kappa_condition(self) -> KappaCondition {
        match self.coarse() {
            Region::A2 => KappaCondition::I,
            Region::A1 | Region::B1 | Region::C1 | Region::D1 => KappaCondition::II,
            Region::A3 | Region::B2 | Region::C2 => KappaCondition::III,
            Region::A4 | Region::B3 | Region::C3 | Region::D2 => KappaCondition::IV,
        }
    }

    pub fn window_lemma(self) -> WindowLemma {
        use RegionLabel::*;
        match self {
            A4 | B1_2 | B3 | C1_2 | C3_1 | C3_2 | C3_3 | D1 | D2_1 | D2_2 => WindowLemma::L4_1,
            A1 | A2 | A3_1 | A3_2 | B1_1 | B2 | C1_1 | C2 => WindowLemma::L4_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        use RegionLabel::*;
        match self {
            A1 => "A1",
            A2 => "A2",
            A3_1 => "A3_1",
            A3_2 => "A3_2",
            A4 => "A4",
            B1_1 => "B1_1",
            B1_2 => "B1_2",
            B2 => "B2",
            B3 => "B3",
            C1_1 => "C1_1",
            C1_2 => "C1_2",
            C2 => "C2",
            C3_1 => "C3_1",
            C3_2 => "C3_2",
            C3_3 => "C3_3",
            D1 => "D1",
            D2_1 => "D2_1",
            D2_2 => "D2_2",
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Thm2Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Thm2Label::E1 => "E1",
            Thm2Label::F1 => "F1",
            Thm2Label::F2 => "F2",
            Thm2Label::None => "None",
        })
    }
}

/// Joins labels with '+', or "None" for an empty list.
pub fn label_text(labels: &[RegionLabel]) -> String {
    if labels.is_empty() {
        "None".to_string()
    } else {
        labels
            .iter()
            .map(|l| l.as_str())
            .collect::<Vec<_>>()
            .join("+")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LabelThreshold {
    pub label: RegionLabel,
    pub condition: KappaCondition,
    pub bound: f64,
}

/// Strict upper bounds on kappa, one per matched label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaThreshold {
    pub per_label: Vec<LabelThreshold>,
    /// Smallest of the per-label bounds.
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaWindow {
    pub lower: f64,
    pub upper: f64,
    pub lemma: WindowLemma,
    pub feasible: bool,
}

impl GammaWindow {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, gamma: f64) -> bool {
        self.lower < gamma && gamma < self.upper
    }
}

/// A parameter tuple held both as doubles and as exact rationals.
#[derive(Clone, Debug)]
pub struct ParamPoint {
    pub(crate) approx: Vars<f64>,
    pub(crate) exact: Vars<BigRational>,
}

impl ParamPoint {
    pub fn new(
        n: u32,
        p: Exactish,
        q: Exactish,
        m: Exactish,
        alpha: Exactish,
        kappa: Exactish,
    ) -> Result<Self, RegionError> {
        if n < 3 {
            return Err(RegionError::Dimension(n));
        }
        if p.exact < BigRational::int(n as i64) {
            return Err(RegionError::PBelowN { p: p.approx, n });
        }
        for (name, v) in [("m", &m), ("alpha", &alpha)] {
            if v.exact <= BigRational::int(0) {
                return Err(RegionError::NonPositive { name, value: v.approx });
            }
        }
        if q.exact < BigRational::int(0) {
            return Err(RegionError::NegativeQ(q.approx));
        }
        if kappa.exact < BigRational::int(1) {
            return Err(RegionError::KappaBelowOne(kappa.approx));
        }
        Ok(Self {
            approx: Vars {
                n,
                p: p.approx,
                q: q.approx,
                m: m.approx,
                alpha: alpha.approx,
                kappa: kappa.approx,
            },
            exact: Vars {
                n,
                p: p.exact,
                q: q.exact,
                m: m.exact,
                alpha: alpha.exact,
                kappa: kappa.exact,
            },
        })
    }

    pub fn from_f64(
        n: u32,
        p: f64,
        q: f64,
        m: f64,
        alpha: f64,
        kappa: f64,
    ) -> Result<Self, RegionError> {
        Self::new(
            n,
            Exactish::from_f64("p", p)?,
            Exactish::from_f64("q", q)?,
            Exactish::from_f64("m", m)?,
            Exactish::from_f64("alpha", alpha)?,
            Exactish::from_f64("kappa", kappa)?,
        )
    }

    pub fn n(&self) -> u32 {
        self.approx.n
    }
    pub fn p(&self) -> f64 {
        self.approx.p
    }
    pub fn q(&self) -> f64 {
        self.approx.q
    }
    pub fn m(&self) -> f64 {
        self.approx.m
    }
    pub fn alpha(&self) -> f64 {
        self.approx.alpha
    }
    pub fn kappa(&self) -> f64 {
        self.approx.kappa
    }

    pub fn classify(&self) -> Vec<RegionLabel> {
        decide!(self, |j, v| families::matching(j, v))
    }

    pub fn kappa_threshold(&self) -> Option<KappaThreshold> {
        let labels = self.classify();
        if labels.is_empty() {
            return None;
        }
        // bounds are exact rationals; report them rounded once
        let per_label: Vec<LabelThreshold> = labels
            .iter()
            .map(|&label| {
                let condition = label.kappa_condition();
                LabelThreshold {
                    label,
                    condition,
                    bound: families::kappa_bound(condition, &self.exact).approx(),
                }
            })
            .collect();
        let bound = per_label.iter().map(|t| t.bound).fold(f64::INFINITY, f64::min);
        Some(KappaThreshold { per_label, bound })
    }

    /// kappa is at least 1 and strictly below every matched label's bound.
    pub fn kappa_admissible(&self) -> bool {
        let labels = self.classify();
        !labels.is_empty()
            && labels.iter().all(|l| {
                self.exact.kappa < families::kappa_bound(l.kappa_condition(), &self.exact)
            })
    }

    /// Lemma used for the window: the first list if any matched label is in it.
    pub fn window_lemma(&self) -> Result<WindowLemma, RegionError> {
        let labels = self.classify();
        if labels.is_empty() {
            return Err(RegionError::NoRegion);
        }
        Ok(if labels.iter().any(|l| l.window_lemma() == WindowLemma::L4_1) {
            WindowLemma::L4_1
        } else {
            WindowLemma::L4_2
        })
    }

    pub fn gamma_window(&self) -> Result<GammaWindow, RegionError> {
        let lemma = self.window_lemma()?;
        Ok(self.gamma_window_for(lemma))
    }

    pub fn gamma_window_for(&self, lemma: WindowLemma) -> GammaWindow {
        let (lower, upper) = families::window(lemma, &self.exact);
        GammaWindow {
            lower: lower.approx(),
            upper: upper.approx(),
            lemma,
            feasible: lower < upper,
        }
    }

    pub fn theta_exponent(&self, lemma: WindowLemma) -> Result<f64, RegionError> {
        let theta = families::theta(lemma, &self.exact);
        let ceiling = families::theta_ceiling(&self.exact);
        if theta > BigRational::int(0) && theta < ceiling {
            Ok(theta.approx())
        } else {
            Err(RegionError::ThetaOutOfRange {
                theta: theta.approx(),
                ceiling: ceiling.approx(),
            })
        }
    }

    pub fn classify_thm2(&self) -> Thm2Label {
        decide!(self, |j, v| families::thm2_label(j, v))
    }

    pub fn kappa_threshold_thm2(&self) -> Option<f64> {
        families::thm2_bound(self.classify_thm2(), &self.exact).map(|b| b.approx())
    }
}

pub fn classify_region(n: u32, p: f64, m: f64, alpha: f64) -> Result<Vec<RegionLabel>, RegionError> {
    Ok(ParamPoint::from_f64(n, p, 0.0, m, alpha, 1.0)?.classify())
}

pub fn kappa_threshold(
    n: u32,
    p: f64,
    q: f64,
    m: f64,
    alpha: f64,
) -> Result<Option<KappaThreshold>, RegionError> {
    Ok(ParamPoint::from_f64(n, p, q, m, alpha, 1.0)?.kappa_threshold())
}

pub fn gamma_window(
    n: u32,
    p: f64,
    q: f64,
    m: f64,
    alpha: f64,
    kappa: f64,
) -> Result<GammaWindow, RegionError> {
    ParamPoint::from_f64(n, p, q, m, alpha, kappa)?.gamma_window()
}

#[allow(clippy::too_many_arguments)]
pub fn theta_exponent(
    n: u32,
    p: f64,
    q: f64,
    m: f64,
    alpha: f64,
    kappa: f64,
    lemma: WindowLemma,
) -> Result<f64, RegionError> {
    ParamPoint::from_f64(n, p, q, m, alpha, kappa)?.theta_exponent(lemma)
}

/// The dimension doubles as p here; the power-bound conditions do not involve p.
pub fn classify_thm2(n: u32, m: f64, alpha: f64) -> Result<Thm2Label, RegionError> {
    Ok(ParamPoint::from_f64(n, n as f64, 0.0, m, alpha, 1.0)?.classify_thm2())
}

pub fn kappa_threshold_thm2(n: u32, q: f64, m: f64, alpha: f64) -> Result<Option<f64>, RegionError> {
    Ok(ParamPoint::from_f64(n, n as f64, q, m, alpha, 1.0)?.kappa_threshold_thm2())
}

/// n(n-1)/((m - alpha) n + 1) + eps
pub fn exponent_p0(n: u32, m: f64, alpha: f64, eps: f64) -> Result<f64, RegionError> {
    let d = (m - alpha) * n as f64 + 1.0;
    if !(d > 0.0) {
        return Err(RegionError::P0Domain(d));
    }
    Ok((n * (n - 1)) as f64 / d + eps)
}
