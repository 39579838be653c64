use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// Model and analysis parameters. JSON names follow the usual symbols.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelParams {
    pub n: u32,
    #[serde(rename = "R")]
    pub radius: f64,
    pub m: f64,
    pub alpha: f64,
    pub chi: f64,
    pub kappa: f64,
    pub lambda1: f64,
    pub mu1: f64,
    pub q: f64,
    pub p: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "M0")]
    pub m0: f64,
    #[serde(rename = "M1")]
    pub m1: f64,
    /// Overrides the constant growth rate `lambda1`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_profile: Option<RadialProfile>,
    /// Overrides `mu1 r^q`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu_profile: Option<RadialProfile>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldProblem {
    pub field: String,
    pub message: String,
}

impl fmt::Display for FieldProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

impl ModelParams {
    /// Every violated field, not just the first.
    pub fn problems(&self) -> Vec<FieldProblem> {
        let mut out = Vec::new();
        let mut check = |ok: bool, field: &'static str, message: String| {
            if !ok {
                out.push(FieldProblem { field: field.to_string(), message });
            }
        };
        let finite = |x: f64| x.is_finite();
        check(self.n >= 3, "n", format!("must be at least 3, got {}", self.n));
        check(finite(self.radius) && self.radius > 0.0, "R", format!("must be positive, got {}", self.radius));
        check(finite(self.m) && self.m > 0.0, "m", format!("must be positive, got {}", self.m));
        check(finite(self.alpha) && self.alpha > 0.0, "alpha", format!("must be positive, got {}", self.alpha));
        check(finite(self.chi) && self.chi > 0.0, "chi", format!("must be positive, got {}", self.chi));
        check(finite(self.kappa) && self.kappa >= 1.0, "kappa", format!("must be at least 1, got {}", self.kappa));
        check(finite(self.lambda1) && self.lambda1 >= 0.0, "lambda1", format!("must be nonnegative, got {}", self.lambda1));
        check(finite(self.mu1) && self.mu1 >= 0.0, "mu1", format!("must be nonnegative, got {}", self.mu1));
        check(finite(self.q) && self.q >= 0.0, "q", format!("must be nonnegative, got {}", self.q));
        check(
            finite(self.p) && self.p >= self.n as f64,
            "p",
            format!("must be at least n = {}, got {}", self.n, self.p),
        );
        check(finite(self.k) && self.k > 0.0, "K", format!("must be positive, got {}", self.k));
        check(finite(self.m0) && self.m0 > 0.0, "M0", format!("must be positive, got {}", self.m0));
        check(
            finite(self.m1) && self.m1 > 0.0 && self.m1 < self.m0,
            "M1",
            format!("must lie in (0, M0 = {}), got {}", self.m0, self.m1),
        );
        for (field, prof) in [("lambda_profile", &self.lambda_profile), ("mu_profile", &self.mu_profile)] {
            if let Some(p) = prof {
                if let Err(e) = p.check() {
                    check(false, field, e);
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), Vec<FieldProblem>> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(p)
        }
    }

    /// Surface measure of the unit sphere in R^n.
    pub fn omega_n1(&self) -> f64 {
        omega(self.n)
    }

    pub fn lambda_at(&self, r: f64) -> f64 {
        match &self.lambda_profile {
            Some(p) => p.eval(r),
            None => self.lambda1,
        }
    }

    pub fn mu_at(&self, r: f64) -> f64 {
        match &self.mu_profile {
            Some(p) => p.eval(r),
            None => self.mu_bound_at(r),
        }
    }

    /// `mu1 r^q`, the envelope used in the moment estimates.
    pub fn mu_bound_at(&self, r: f64) -> f64 {
        if self.q == 0.0 {
            self.mu1
        } else {
            self.mu1 * r.powf(self.q)
        }
    }
}

pub fn omega(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * PI.powf(h) / gamma(h)
}

/// A nonnegative radial coefficient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RadialProfile {
    Constant { value: f64 },
    Power { coef: f64, exponent: f64 },
    /// Linear interpolation, held constant outside the table.
    Table { r: Vec<f64>, value: Vec<f64> },
}

impl RadialProfile {
    /// Reads `r,value` rows (header optional).
    pub fn from_csv(path: &Path) -> Result<Self, String> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| e.to_string())?;
        let (mut r, mut value) = (Vec::new(), Vec::new());
        for rec in rdr.records() {
            let rec = rec.map_err(|e| e.to_string())?;
            let a = rec.get(0).unwrap_or("").trim();
            let b = rec.get(1).unwrap_or("").trim();
            match (a.parse::<f64>(), b.parse::<f64>()) {
                (Ok(x), Ok(y)) => {
                    r.push(x);
                    value.push(y);
                }
                _ if r.is_empty() => continue,
                _ => return Err(format!("bad row '{a},{b}'")),
            }
        }
        let p = RadialProfile::Table { r, value };
        p.check()?;
        Ok(p)
    }

    fn check(&self) -> Result<(), String> {
        match self {
            RadialProfile::Constant { value } if !(*value >= 0.0) => Err("value must be nonnegative".into()),
            RadialProfile::Power { coef, exponent } if !(*coef >= 0.0 && *exponent >= 0.0) => {
                Err("coef and exponent must be nonnegative".into())
            }
            RadialProfile::Table { r, value } => {
                if r.len() != value.len() || r.is_empty() {
                    return Err("table columns must be nonempty and of equal length".into());
                }
                if r.windows(2).any(|p| !(p[1] > p[0])) {
                    return Err("table radii must increase strictly".into());
                }
                if value.iter().any(|v| !(*v >= 0.0)) {
                    return Err("table values must be nonnegative".into());
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            RadialProfile::Constant { value } => *value,
            RadialProfile::Power { coef, exponent } => {
                if *exponent == 0.0 {
                    *coef
                } else {
                    coef * x.powf(*exponent)
                }
            }
            RadialProfile::Table { r, value } => {
                let last = r.len() - 1;
                if x <= r[0] {
                    return value[0];
                }
                if x >= r[last] {
                    return value[last];
                }
                let i = r.partition_point(|&ri| ri <= x);
                let t = (x - r[i - 1]) / (r[i] - r[i - 1]);
                value[i - 1] + t * (value[i] - value[i - 1])
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn sample() -> ModelParams {
        ModelParams {
            n: 3,
            radius: 1.0,
            m: 1.0,
            alpha: 1.0,
            chi: 1.0,
            kappa: 1.5,
            lambda1: 0.0,
            mu1: 0.0,
            q: 0.0,
            p: 3.0,
            k: 1.0,
            m0: 1.0,
            m1: 0.5,
            lambda_profile: None,
            mu_profile: None,
        }
    }

    #[test]
    fn sphere_measures() {
        assert!((omega(3) - 4.0 * PI).abs() < 1e-12);
        assert!((omega(4) - 2.0 * PI * PI).abs() < 1e-12);
        assert!((omega(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lists_every_bad_field() {
        let mut p = sample();
        p.n = 2;
        p.m1 = 2.0;
        p.kappa = 0.5;
        let fields: Vec<_> = p.problems().into_iter().map(|f| f.field).collect();
        assert_eq!(fields, vec!["n", "kappa", "M1"]);
        assert!(sample().validate().is_ok());
    }

    #[test]
    fn json_names() {
        let text = serde_json::to_string(&sample()).unwrap();
        assert!(text.contains("\"R\":1.0") && text.contains("\"M0\"") && text.contains("\"K\""));
        let back: ModelParams = serde_json::from_str(&text).unwrap();
        assert_eq!(back, sample());
        assert!(serde_json::from_str::<ModelParams>(&text.replace("\"chi\"", "\"chi2\"")).is_err());
    }

    #[test]
    fn table_interpolates() {
        let t = RadialProfile::Table { r: vec![0.0, 1.0], value: vec![1.0, 3.0] };
        assert_eq!(t.eval(0.25), 1.5);
        assert_eq!(t.eval(-1.0), 1.0);
        assert_eq!(t.eval(9.0), 3.0);
    }
}
