use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Bundle, ScenarioError};
use crate::dynamics::Snapshot;
use crate::moments::MomentSample;

fn io_err(path: &Path, e: impl std::fmt::Display) -> ScenarioError {
    ScenarioError::Io { path: path.to_path_buf(), message: e.to_string() }
}

/// One time level read back from a trajectory CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryFrame {
    pub t: f64,
    pub s: Vec<f64>,
    pub w: Vec<f64>,
    pub u: Vec<f64>,
    pub z: Vec<f64>,
}

/// Columns `t,s,w,u,z`, one row per node per snapshot.
pub fn write_trajectory_csv<W: Write>(s: &[f64], snaps: &[Snapshot], out: W) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record(["t", "s", "w", "u", "z"])?;
    for snap in snaps {
        for (i, si) in s.iter().enumerate() {
            wr.serialize((snap.t, si, snap.w[i], snap.u[i], snap.z[i]))?;
        }
    }
    wr.flush()?;
    Ok(())
}

pub fn write_moments_csv<'a, W: Write>(
    series: impl IntoIterator<Item = &'a MomentSample>,
    out: W,
) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(out);
    wr.write_record([
        "s0", "gamma", "t", "phi", "psi_alpha", "I1", "I2", "I3", "I4", "dphi_dt_fd", "theta", "c1", "c2",
        "ineq_margin",
    ])?;
    for x in series {
        wr.serialize((
            x.s0, x.gamma, x.t, x.phi, x.psi_alpha, x.i[0], x.i[1], x.i[2], x.i[3], x.dphi_dt_fd, x.theta, x.c1, x.c2,
            x.ineq_margin,
        ))?;
    }
    wr.flush()?;
    Ok(())
}

pub fn read_trajectory(path: &Path) -> Result<Vec<TrajectoryFrame>, ScenarioError> {
    let mut rd = csv::Reader::from_path(path).map_err(|e| io_err(path, e))?;
    let headers = rd.headers().map_err(|e| io_err(path, e))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["t", "s", "w", "u", "z"] {
        return Err(io_err(path, "expected columns t,s,w,u,z"));
    }
    let mut frames: Vec<TrajectoryFrame> = Vec::new();
    for row in rd.deserialize::<(f64, f64, f64, f64, f64)>() {
        let (t, s, w, u, z) = row.map_err(|e| io_err(path, e))?;
        match frames.last_mut() {
            Some(f) if f.t == t => {
                f.s.push(s);
                f.w.push(w);
                f.u.push(u);
                f.z.push(z);
            }
            _ => frames.push(TrajectoryFrame { t, s: vec![s], w: vec![w], u: vec![u], z: vec![z] }),
        }
    }
    if frames.is_empty() {
        return Err(io_err(path, "no rows"));
    }
    if frames.iter().any(|f| f.s != frames[0].s) {
        return Err(io_err(path, "snapshots do not share one grid"));
    }
    Ok(frames)
}

/// `report.json` always; `trajectory.csv`, `sup_u.csv` and `moments.csv`
/// when the bundle has them.
pub fn write_bundle(bundle: &Bundle, dir: &Path) -> Result<(), ScenarioError> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    let path = dir.join("report.json");
    let json = serde_json::to_string_pretty(bundle).map_err(|e| io_err(&path, e))?;
    fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))?;

    if let Some(grid) = &bundle.grid {
        if !bundle.snapshots.is_empty() {
            let path = dir.join("trajectory.csv");
            let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
            write_trajectory_csv(&grid.s, &bundle.snapshots, std::io::BufWriter::new(f))
                .map_err(|e| io_err(&path, e))?;
        }
    }
    if let Some(rep) = &bundle.report {
        let path = dir.join("sup_u.csv");
        let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        let mut wr = csv::Writer::from_writer(std::io::BufWriter::new(f));
        let res = wr
            .write_record(["t", "sup_u"])
            .and_then(|_| rep.sup_u_history.iter().try_for_each(|r| wr.serialize(r)))
            .and_then(|_| wr.flush().map_err(csv::Error::from));
        res.map_err(|e| io_err(&path, e))?;
    }
    if let Some(v) = &bundle.verification {
        let path = dir.join("moments.csv");
        let f = fs::File::create(&path).map_err(|e| io_err(&path, e))?;
        write_moments_csv(v.probes.iter().flat_map(|p| p.samples.iter()), std::io::BufWriter::new(f))
            .map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}
