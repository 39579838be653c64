use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("grid needs at least 16 cells, got {0}")]
    TooFewCells(usize),
    #[error("grading exponent must be at least 1, got {0}")]
    Grading(f64),
    #[error("radius must be positive and finite, got {0}")]
    Radius(f64),
    #[error("nodes must start at 0 and increase strictly")]
    NotIncreasing,
}

/// Nodes `s_i = R^n (i/N)^g` on `[0, R^n]`, where `s = r^n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MassGrid {
    pub s: Vec<f64>,
    pub grading: f64,
    pub n: u32,
}

impl MassGrid {
    pub fn graded(n: u32, radius: f64, cells: usize, grading: f64) -> Result<Self, MeshError> {
        if cells < 16 {
            return Err(MeshError::TooFewCells(cells));
        }
        if !(grading >= 1.0) || !grading.is_finite() {
            return Err(MeshError::Grading(grading));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(MeshError::Radius(radius));
        }
        let top = radius.powi(n as i32);
        let mut s: Vec<f64> = (0..=cells)
            .map(|i| top * (i as f64 / cells as f64).powf(grading))
            .collect();
        s[cells] = top;
        Ok(Self { s, grading, n })
    }

    /// Arbitrary nodes; the grading field is informational only.
    pub fn from_nodes(n: u32, s: Vec<f64>) -> Result<Self, MeshError> {
        if s.len() < 17 {
            return Err(MeshError::TooFewCells(s.len().saturating_sub(1)));
        }
        if s[0] != 0.0 || s.windows(2).any(|p| !(p[1] > p[0])) {
            return Err(MeshError::NotIncreasing);
        }
        Ok(Self { s, grading: f64::NAN, n })
    }

    pub fn cells(&self) -> usize {
        self.s.len() - 1
    }

    pub fn len(&self) -> usize {
        self.s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    pub fn top(&self) -> f64 {
        self.s[self.s.len() - 1]
    }

    /// `h[i] = s[i] - s[i-1]`; `h[0]` is unused and set to 0.
    pub fn widths(&self) -> Vec<f64> {
        let mut h = vec![0.0; self.s.len()];
        for i in 1..self.s.len() {
            h[i] = self.s[i] - self.s[i - 1];
        }
        h
    }

    pub fn radii(&self) -> Vec<f64> {
        let inv = 1.0 / self.n as f64;
        self.s.iter().map(|&s| s.powf(inv)).collect()
    }

    /// Nodal derivative: centred convex combination of the adjacent cell
    /// slopes inside, one-sided at the two ends.
    pub fn derivative(&self, f: &[f64]) -> Vec<f64> {
        let s = &self.s;
        let last = s.len() - 1;
        let slope = |i: usize| (f[i] - f[i - 1]) / (s[i] - s[i - 1]);
        let mut d = vec![0.0; s.len()];
        d[0] = slope(1);
        d[last] = slope(last);
        for i in 1..last {
            let (hm, hp) = (s[i] - s[i - 1], s[i + 1] - s[i]);
            d[i] = (hp * slope(i) + hm * slope(i + 1)) / (hm + hp);
        }
        d
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_exact() {
        let g = MassGrid::graded(3, 1.3, 64, 2.0).unwrap();
        assert_eq!(g.s[0], 0.0);
        assert_eq!(g.top(), 1.3f64.powi(3));
        assert!(g.s.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn rejects_small_or_flat() {
        assert!(MassGrid::graded(3, 1.0, 8, 2.0).is_err());
        assert!(MassGrid::graded(3, 1.0, 32, 0.5).is_err());
        assert!(MassGrid::graded(3, 0.0, 32, 2.0).is_err());
        let mut s: Vec<f64> = (0..=20).map(|i| i as f64).collect();
        s[5] = s[4];
        assert!(MassGrid::from_nodes(3, s).is_err());
    }

    #[test]
    fn derivative_exact_on_quadratics() {
        let g = MassGrid::graded(3, 1.0, 32, 2.0).unwrap();
        let f: Vec<f64> = g.s.iter().map(|s| 3.0 * s * s - s).collect();
        let d = g.derivative(&f);
        for i in 1..g.cells() {
            assert!((d[i] - (6.0 * g.s[i] - 1.0)).abs() < 1e-9);
        }
    }
}
