//! The chemoattractant equation in mass-accumulation form.
//!
//! With `z(s) = ∫₀^{s^{1/n}} ρ^{n-1} v dρ`, the relation `r^{n-1} v_r = z - w`
//! differentiated in `s` gives the two-point problem
//!
//! ```text
//! n² s^{2-2/n} z'' - z = -w,   z(0) = 0,   z(R^n) = w(R^n).
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::MassGrid;
use crate::tridiag;

pub const DEFAULT_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("w has {got} values but the grid has {want} nodes")]
    Length { got: usize, want: usize },
    #[error("tridiagonal elimination broke down at row {0}")]
    Singular(usize),
    #[error("relative residual {norm:e} exceeds tolerance {tol:e}")]
    Residual { norm: f64, tol: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChemoField {
    pub z: Vec<f64>,
    /// `v = n z_s`, same nodal stencil as `u = n w_s`.
    pub v: Vec<f64>,
    /// Largest row residual relative to the size of that row's terms.
    pub residual_norm: f64,
}

/// `n² s^{2-2/n}` at every node.
pub fn diffusion_coefficient(grid: &MassGrid) -> Vec<f64> {
    let n = grid.n as f64;
    let e = 2.0 - 2.0 / n;
    grid.s.iter().map(|&s| n * n * s.powf(e)).collect()
}

pub fn solve_chemo_bvp(w: &[f64], grid: &MassGrid, tol: f64) -> Result<ChemoField, EllipticError> {
    let coef = diffusion_coefficient(grid);
    solve_with_coefficient(w, grid, &coef, tol)
}

/// Same as [`solve_chemo_bvp`] with `n² s^{2-2/n}` precomputed.
pub fn solve_with_coefficient(
    w: &[f64],
    grid: &MassGrid,
    coef: &[f64],
    tol: f64,
) -> Result<ChemoField, EllipticError> {
    let len = grid.len();
    if w.len() != len {
        return Err(EllipticError::Length { got: w.len(), want: len });
    }
    let s = &grid.s;
    let last = len - 1;
    let top = w[last];
    let inner = last - 1;
    let mut lo = vec![0.0; inner];
    let mut di = vec![0.0; inner];
    let mut up = vec![0.0; inner];
    let mut rhs = vec![0.0; inner];
    for i in 1..last {
        let (hm, hp) = (s[i] - s[i - 1], s[i + 1] - s[i]);
        let a = 2.0 * coef[i] / ((hm + hp) * hm);
        let c = 2.0 * coef[i] / ((hm + hp) * hp);
        let k = i - 1;
        lo[k] = a;
        up[k] = c;
        di[k] = -(a + c) - 1.0;
        rhs[k] = -w[i];
    }
    rhs[inner - 1] -= up[inner - 1] * top;
    let x = tridiag::solve(&lo, &di, &up, &rhs).map_err(|row| EllipticError::Singular(row + 1))?;

    let mut z = Vec::with_capacity(len);
    z.push(0.0);
    z.extend_from_slice(&x);
    z.push(top);

    let mut residual_norm: f64 = 0.0;
    for i in 1..last {
        let k = i - 1;
        let terms = [lo[k] * z[i - 1], di[k] * z[i], up[k] * z[i + 1], w[i]];
        let scale: f64 = terms.iter().map(|t| t.abs()).sum();
        let r = terms.iter().sum::<f64>().abs();
        if scale > 0.0 {
            residual_norm = residual_norm.max(r / scale);
        }
    }
    if !(residual_norm <= tol) {
        return Err(EllipticError::Residual { norm: residual_norm, tol });
    }
    let n = grid.n as f64;
    let v = grid.derivative(&z).into_iter().map(|d| n * d).collect();
    Ok(ChemoField { z, v, residual_norm })
}
