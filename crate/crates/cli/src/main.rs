use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ksblow::dynamics::ModelParams;
use ksblow::elliptic;
use ksblow::mesh::MassGrid;
use ksblow::regions::{self, GridAxis, ParamPoint};
use ksblow::scenario::{self, Mode, Scenario, ScenarioError};

/// Blow-up criteria, radial simulation and moment checks for a quasilinear
/// Keller-Segel system with logistic source.
#[derive(Parser)]
#[command(name = "ksblow", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for anything sampled; recorded in the output.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Output file or directory; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Blow-up region labels (and the power-bound label) of a parameter point.
    Classify(PointArgs),
    /// κ thresholds per matched label.
    Kappa(PointArgs),
    /// Admissible γ window and θ.
    GammaWindow(PointArgs),
    /// Blow-up region labels over an (m, α) grid, as CSV.
    RegionGrid(GridArgs),
    /// Power-bound region labels over an (m, α) grid, as CSV.
    Thm2Grid(GridArgs),
    /// Runs a scenario and writes the trajectory and blow-up report.
    Simulate(ConfigArgs),
    /// Moment checks along a stored trajectory.
    Verify(VerifyArgs),
    /// Runs one or more scenarios in the mode each names.
    Pipeline(PipelineArgs),
    /// Solves the chemoattractant problem for a tabulated `w`.
    SolveBvp(BvpArgs),
}

#[derive(Args)]
struct PointArgs {
    /// Scenario or parameter JSON; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    #[arg(long)]
    m: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    kappa: Option<f64>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    n: u32,
    /// Defaults to n.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    q: f64,
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Samples per axis.
    #[arg(long, default_value_t = 200)]
    res: usize,
    /// Defaults to [0, 2], or [1, 2] for the power-bound grid.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
    m_range: Option<Vec<f64>>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], default_values_t = [0.0, 2.0])]
    alpha_range: Vec<f64>,
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    /// Trajectory CSV with columns t,s,w,u,z.
    #[arg(long)]
    traj: PathBuf,
    /// Scenario or parameter JSON the trajectory came from.
    #[arg(long)]
    config: PathBuf,
    #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
    s0: Vec<f64>,
    /// A number or "auto".
    #[arg(long, default_value = "auto")]
    gamma: String,
    /// Take θ from the region's window lemma.
    #[arg(long, conflicts_with = "theta")]
    theta_from_regions: bool,
    #[arg(long)]
    theta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long)]
    r1: Option<f64>,
}

#[derive(Args)]
struct PipelineArgs {
    /// One or more scenario files.
    #[arg(long, num_args = 1.., required = true)]
    config: Vec<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct BvpArgs {
    /// CSV with columns s,w.
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    n: u32,
    #[arg(long, default_value_t = elliptic::DEFAULT_TOL)]
    tol: f64,
}

enum Failure {
    Invalid(anyhow::Error),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

fn invalid(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Invalid(e.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Invalid(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
    }
}

fn dispatch(cli: &Cli) -> Result<(), Failure> {
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Classify(a) => {
            let pt = a.point()?;
            let report = scenario::classify(&a.params()?).map_err(invalid)?;
            emit_json(out, &Tagged { seed: cli.seed, point: pt_fields(&pt), report })
        }
        Command::Kappa(a) => {
            let pt = a.point()?;
            let report = KappaReport {
                threshold: pt.kappa_threshold(),
                admissible: pt.kappa_admissible(),
                thm2_label: pt.classify_thm2(),
                thm2_bound: pt.kappa_threshold_thm2(),
            };
            emit_json(out, &Tagged { seed: cli.seed, point: pt_fields(&pt), report })
        }
        Command::GammaWindow(a) => {
            let pt = a.point()?;
            let window = pt.gamma_window().map_err(invalid)?;
            let theta = pt.theta_exponent(window.lemma).ok();
            let report = WindowReport { window, theta };
            emit_json(out, &Tagged { seed: cli.seed, point: pt_fields(&pt), report })
        }
        Command::RegionGrid(g) => {
            let cells =
                regions::region_grid(g.n, g.p.unwrap_or(g.n as f64), g.q, g.kappa, g.m_axis(0.0), g.alpha_axis())
                    .map_err(invalid)?;
            emit_csv(out, |w| regions::write_region_csv(&cells, w))
        }
        Command::Thm2Grid(g) => {
            let cells = regions::thm2_grid(g.n, g.q, g.m_axis(1.0), g.alpha_axis()).map_err(invalid)?;
            emit_csv(out, |w| regions::write_thm2_csv(&cells, w))
        }
        Command::Simulate(a) => {
            let mut sc = load_scenario(&a.config)?;
            if sc.mode != Mode::SimulateAndVerify {
                sc.mode = Mode::Simulate;
            }
            let bundle = scenario::run_scenario(&sc).map_err(scenario_failure)?;
            match out {
                Some(p) if p.extension().is_some_and(|e| e == "csv") => {
                    let grid = bundle.grid.as_ref().context("no grid was built")?;
                    let f = fs::File::create(p).with_context(|| format!("creating {}", p.display()))?;
                    scenario::write_trajectory_csv(&grid.s, &bundle.snapshots, io::BufWriter::new(f))
                        .context("writing trajectory")?;
                    let report = p.with_extension("json");
                    fs::write(&report, serde_json::to_string_pretty(&bundle).context("serializing")? + "\n")
                        .with_context(|| format!("writing {}", report.display()))?;
                }
                Some(dir) => scenario::write_bundle(&bundle, dir).map_err(scenario_failure)?,
                None => emit_json(None, &bundle)?,
            }
            if bundle.ok() {
                Ok(())
            } else {
                Err(Failure::Runtime(anyhow::anyhow!(bundle.errors.join("; "))))
            }
        }
        Command::Verify(a) => verify(a, out),
        Command::Pipeline(a) => pipeline(a, out),
        Command::SolveBvp(a) => solve_bvp(a, out),
    }
}

#[derive(Serialize)]
struct Tagged<T: Serialize> {
    seed: u64,
    point: PointFields,
    #[serde(flatten)]
    report: T,
}

#[derive(Serialize)]
struct PointFields {
    n: u32,
    p: f64,
    q: f64,
    m: f64,
    alpha: f64,
    kappa: f64,
}

fn pt_fields(pt: &ParamPoint) -> PointFields {
    PointFields { n: pt.n(), p: pt.p(), q: pt.q(), m: pt.m(), alpha: pt.alpha(), kappa: pt.kappa() }
}

#[derive(Serialize)]
struct KappaReport {
    threshold: Option<regions::KappaThreshold>,
    admissible: bool,
    thm2_label: regions::Thm2Label,
    thm2_bound: Option<f64>,
}

#[derive(Serialize)]
struct WindowReport {
    window: regions::GammaWindow,
    theta: Option<f64>,
}

impl PointArgs {
    fn params(&self) -> Result<ModelParams, Failure> {
        let mut p = match &self.config {
            Some(path) => load_params(path)?,
            None => ModelParams {
                n: 0,
                radius: 1.0,
                m: f64::NAN,
                alpha: f64::NAN,
                chi: 1.0,
                kappa: 1.0,
                lambda1: 0.0,
                mu1: 0.0,
                q: 0.0,
                p: f64::NAN,
                k: 1.0,
                m0: 1.0,
                m1: 0.0,
                lambda_profile: None,
                mu_profile: None,
            },
        };
        if let Some(n) = self.n {
            p.n = n;
        }
        p.p = self.p.unwrap_or(if p.p.is_nan() { p.n as f64 } else { p.p });
        macro_rules! take {
            ($($f:ident),*) => { $(if let Some(v) = self.$f { p.$f = v; })* };
        }
        take!(q, m, alpha, kappa);
        let mut missing = Vec::new();
        if p.n == 0 {
            missing.push("--n");
        }
        if p.m.is_nan() {
            missing.push("--m");
        }
        if p.alpha.is_nan() {
            missing.push("--alpha");
        }
        if !missing.is_empty() {
            return Err(invalid(anyhow::anyhow!("missing {}", missing.join(", "))));
        }
        Ok(p)
    }

    fn point(&self) -> Result<ParamPoint, Failure> {
        let p = self.params()?;
        ParamPoint::from_f64(p.n, p.p, p.q, p.m, p.alpha, p.kappa).map_err(invalid)
    }
}

impl GridArgs {
    fn m_axis(&self, lo: f64) -> GridAxis {
        let r = self.m_range.clone().unwrap_or(vec![lo, 2.0]);
        GridAxis::new(r[0], r[1], self.res)
    }

    fn alpha_axis(&self) -> GridAxis {
        GridAxis::new(self.alpha_range[0], self.alpha_range[1], self.res)
    }
}

fn scenario_failure(e: ScenarioError) -> Failure {
    match e {
        ScenarioError::Io { .. } => Failure::Runtime(e.into()),
        _ => invalid(e),
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    let sc = Scenario::load(path).map_err(scenario_failure)?;
    sc.validate().map_err(scenario_failure)?;
    Ok(sc)
}

/// A scenario file or a bare parameter object.
fn load_params(path: &Path) -> Result<ModelParams, Failure> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(invalid)?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display())).map_err(invalid)?;
    if value.get("params").is_some() {
        Ok(Scenario::from_json(&text).map_err(invalid)?.params)
    } else {
        serde_json::from_value(value).with_context(|| format!("parsing {}", path.display())).map_err(invalid)
    }
}

fn emit_json<T: Serialize>(out: Option<&Path>, value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).context("serializing")? + "\n";
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes()).context("writing stdout")?,
    }
    Ok(())
}

fn emit_csv(out: Option<&Path>, write: impl FnOnce(Box<dyn Write>) -> csv::Result<()>) -> Result<(), Failure> {
    let sink: Box<dyn Write> = match out {
        Some(p) => Box::new(io::BufWriter::new(
            fs::File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(io::stdout().lock()),
    };
    write(sink).context("writing CSV")?;
    Ok(())
}

fn verify(a: &VerifyArgs, out: Option<&Path>) -> Result<(), Failure> {
    let params = load_params(&a.config)?;
    let problems = params.problems();
    if !problems.is_empty() {
        let text: Vec<String> = problems.iter().map(|p| p.to_string()).collect();
        return Err(invalid(anyhow::anyhow!(text.join("; "))));
    }
    let frames = scenario::read_trajectory(&a.traj).map_err(invalid)?;
    let grid = Arc::new(MassGrid::from_nodes(params.n, frames[0].s.clone()).map_err(invalid)?);
    let snaps: Vec<_> = frames
        .into_iter()
        .map(|f| ksblow::dynamics::Snapshot { t: f.t, w: f.w, u: f.u, z: f.z })
        .collect();

    let pt = ParamPoint::from_f64(params.n, params.p, params.q, params.m, params.alpha, params.kappa);
    let window = pt.as_ref().ok().and_then(|p| p.gamma_window().ok());
    let gamma = match a.gamma.as_str() {
        "auto" => match window {
            Some(w) if w.feasible => w.midpoint(),
            _ => return Err(invalid(anyhow::anyhow!("--gamma auto needs a nonempty window"))),
        },
        g => g.parse::<f64>().with_context(|| format!("--gamma {g}")).map_err(invalid)?,
    };
    let theta = if a.theta_from_regions {
        let w = window.ok_or_else(|| invalid(anyhow::anyhow!("no region, so no θ")))?;
        let pt = pt.map_err(invalid)?;
        Some(pt.theta_exponent(w.lemma).map_err(invalid)?)
    } else {
        a.theta
    };
    let v = scenario::verify_snapshots(&params, &grid, &snaps, &a.s0, gamma, theta, a.eta, a.r1).map_err(invalid)?;
    emit_json(out, &v)
}

fn pipeline(a: &PipelineArgs, out: Option<&Path>) -> Result<(), Failure> {
    let mut items = Vec::new();
    let mut problems = Vec::new();
    for path in &a.config {
        match load_scenario(path) {
            Ok(sc) => {
                let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                items.push((stem, sc));
            }
            Err(Failure::Invalid(e)) => problems.push(format!("{}: {e:#}", path.display())),
            Err(e) => return Err(e),
        }
    }
    if !problems.is_empty() {
        return Err(invalid(anyhow::anyhow!(problems.join("\n"))));
    }
    let dir = out.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("."));
    let entries = scenario::run_batch(&items, &dir, a.threads);
    emit_json(None, &entries)?;
    let failed: Vec<String> =
        entries.iter().filter(|e| !e.ok).map(|e| format!("{}: {}", e.name, e.error.as_deref().unwrap_or("?"))).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Runtime(anyhow::anyhow!(failed.join("; "))))
    }
}

fn solve_bvp(a: &BvpArgs, out: Option<&Path>) -> Result<(), Failure> {
    let mut rd = csv::Reader::from_path(&a.input)
        .with_context(|| format!("opening {}", a.input.display()))
        .map_err(invalid)?;
    let mut s = Vec::new();
    let mut w = Vec::new();
    for row in rd.deserialize::<(f64, f64)>() {
        let (si, wi) = row.with_context(|| format!("reading {}", a.input.display())).map_err(invalid)?;
        s.push(si);
        w.push(wi);
    }
    let grid = MassGrid::from_nodes(a.n, s).map_err(invalid)?;
    let field = elliptic::solve_chemo_bvp(&w, &grid, a.tol).context("solving")?;
    emit_csv(out, |sink| {
        let mut wr = csv::Writer::from_writer(sink);
        wr.write_record(["s", "w", "z", "v"])?;
        for i in 0..grid.len() {
            wr.serialize((grid.s[i], w[i], field.z[i], field.v[i]))?;
        }
        wr.flush()?;
        Ok(())
    })?;
    eprintln!("relative residual {:e}", field.residual_norm);
    Ok(())
}
