use std::io::Write;

use rayon::prelude::*;

use super::{label_text, GammaWindow, ParamPoint, RegionError, RegionLabel, Thm2Label};

/// Uniform cell-centred samples of `[lo, hi]`; the first sits half a cell above `lo`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridAxis {
    pub lo: f64,
    pub hi: f64,
    pub res: usize,
}

impl GridAxis {
    pub fn new(lo: f64, hi: f64, res: usize) -> Self {
        Self { lo, hi, res }
    }

    pub fn sample(&self, i: usize) -> f64 {
        self.lo + (i as f64 + 0.5) * (self.hi - self.lo) / self.res as f64
    }

    pub fn step(&self) -> f64 {
        (self.hi - self.lo) / self.res as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionCell {
    pub m: f64,
    pub alpha: f64,
    pub labels: Vec<RegionLabel>,
    pub kappa_max: Option<f64>,
    /// Present only when the window at the grid's kappa is nonempty.
    pub window: Option<GammaWindow>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Thm2Cell {
    pub m: f64,
    pub alpha: f64,
    pub label: Thm2Label,
    pub kappa_max: Option<f64>,
}

/// Row-major over m (outer) then alpha (inner).
pub fn region_grid(
    n: u32,
    p: f64,
    q: f64,
    kappa: f64,
    m_axis: GridAxis,
    alpha_axis: GridAxis,
) -> Result<Vec<RegionCell>, RegionError> {
    if m_axis.res < 2 || alpha_axis.res < 2 {
        return Err(RegionError::Resolution);
    }
    // validates the fixed parameters once
    ParamPoint::from_f64(n, p, q, 1.0, 1.0, kappa)?;
    let rows: Result<Vec<Vec<RegionCell>>, RegionError> = (0..m_axis.res)
        .into_par_iter()
        .map(|i| {
            let m = m_axis.sample(i);
            (0..alpha_axis.res)
                .map(|j| {
                    let alpha = alpha_axis.sample(j);
                    let pt = ParamPoint::from_f64(n, p, q, m, alpha, kappa)?;
                    let kappa_max = pt.kappa_threshold().map(|t| t.bound);
                    let window = pt.gamma_window().ok().filter(|w| w.feasible);
                    Ok(RegionCell {
                        m,
                        alpha,
                        labels: pt.classify(),
                        kappa_max,
                        window,
                    })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

pub fn thm2_grid(
    n: u32,
    q: f64,
    m_axis: GridAxis,
    alpha_axis: GridAxis,
) -> Result<Vec<Thm2Cell>, RegionError> {
    if m_axis.res < 2 || alpha_axis.res < 2 {
        return Err(RegionError::Resolution);
    }
    ParamPoint::from_f64(n, n as f64, q, 1.0, 1.0, 1.0)?;
    let rows: Result<Vec<Vec<Thm2Cell>>, RegionError> = (0..m_axis.res)
        .into_par_iter()
        .map(|i| {
            let m = m_axis.sample(i);
            (0..alpha_axis.res)
                .map(|j| {
                    let alpha = alpha_axis.sample(j);
                    let pt = ParamPoint::from_f64(n, n as f64, q, m, alpha, 1.0)?;
                    Ok(Thm2Cell {
                        m,
                        alpha,
                        label: pt.classify_thm2(),
                        kappa_max: pt.kappa_threshold_thm2(),
                    })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}

const HEADER: [&str; 6] = ["m", "alpha", "label", "kappa_max", "gamma_lo", "gamma_hi"];

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_region_csv<W: Write>(cells: &[RegionCell], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for c in cells {
        w.write_record([
            c.m.to_string(),
            c.alpha.to_string(),
            label_text(&c.labels),
            opt(c.kappa_max),
            opt(c.window.map(|g| g.lower)),
            opt(c.window.map(|g| g.upper)),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Same header as the region grid; the gamma columns stay empty.
pub fn write_thm2_csv<W: Write>(cells: &[Thm2Cell], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(HEADER)?;
    for c in cells {
        w.write_record([
            c.m.to_string(),
            c.alpha.to_string(),
            c.label.to_string(),
            opt(c.kappa_max),
            String::new(),
            String::new(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
