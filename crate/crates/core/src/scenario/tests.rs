use super::*;
use crate::dynamics::Trigger;
use crate::regions::WindowLemma;

fn params() -> ModelParams {
    ModelParams {
        n: 3,
        radius: 1.0,
        m: 1.0,
        alpha: 1.0,
        chi: 1.0,
        kappa: 1.2,
        lambda1: 0.0,
        mu1: 0.5,
        q: 0.0,
        p: 3.0,
        k: 1.0,
        m0: 1.0,
        m1: 0.5,
        lambda_profile: None,
        mu_profile: None,
    }
}

fn scenario(mode: Mode) -> Scenario {
    Scenario {
        params: params(),
        numerics: Numerics { cells: 32, t_end: 0.01, snapshot_every: 0.002, ..Numerics::default() },
        probes: Probes::default(),
        mode,
        initial: Initial::Zero,
    }
}

#[test]
fn classify_only_example() {
    let b = run_scenario(&scenario(Mode::ClassifyOnly)).unwrap();
    let c = b.classification.clone().unwrap();
    assert_eq!(c.label, "A4");
    assert!((c.kappa_threshold.unwrap().bound - 4.0 / 3.0).abs() < 1e-12);
    assert!(c.kappa_admissible);
    assert_eq!(c.window.unwrap().lemma, WindowLemma::L4_1);
    assert!(b.report.is_none() && b.snapshots.is_empty() && b.ok());
}

#[test]
fn zero_data_reaches_the_horizon() {
    let mut sc = scenario(Mode::SimulateAndVerify);
    sc.probes.s0_list = vec![0.1, 0.5];
    let b = run_scenario(&sc).unwrap();
    assert!(b.ok(), "{:?}", b.errors);
    let r = b.report.unwrap();
    assert_eq!(r.trigger, Trigger::HorizonReached);
    assert!(!r.detected);
    let w = b.classification.unwrap().window.unwrap();
    let v = b.verification.unwrap();
    assert_eq!(v.samples, 6);
    assert!(v.gamma == w.midpoint() && v.gamma_in_window);
    for p in &v.probes {
        assert!(p.rate_violations.is_empty() && p.explicit_failures.is_empty());
        assert_eq!(p.samples.len(), 6);
    }
    assert!(v.pass);
}

#[test]
fn thm2_pipeline_example() {
    let mut sc = scenario(Mode::Thm2Pipeline);
    sc.params.alpha = 0.9;
    sc.params.kappa = 1.1;
    sc.params.chi = 10.0;
    sc.params.k = 10.0;
    sc.probes.r1 = Some(0.3);
    sc.initial = Initial::Capped { cap: 1e-3, exponent: None };
    sc.numerics.t_end = 1e-5;
    sc.numerics.snapshot_every = 5e-6;
    let b = run_scenario(&sc).unwrap();
    assert!(b.ok(), "{:?}", b.errors);
    let t2 = b.thm2.unwrap();
    assert_eq!(t2.label, Thm2Label::E1);
    assert!((t2.kappa_max.unwrap() - 1.1167).abs() < 1e-4);
    assert!(t2.kappa_admissible);
    assert!((t2.p - (6.0 / 1.3 + 0.1)).abs() < 1e-12);
    assert!(t2.power_bound_held.is_some());
    assert!(b.report.is_some());
}

#[test]
fn problems_name_every_field() {
    let mut sc = scenario(Mode::Simulate);
    sc.params.n = 2;
    sc.params.chi = -1.0;
    sc.numerics.cells = 4;
    sc.numerics.cfl = 2.0;
    sc.probes.gamma = GammaChoice::Value(1.5);
    sc.probes.s0_list = vec![2.0];
    sc.initial = Initial::Capped { cap: -1.0, exponent: None };
    let fields: Vec<String> = sc.problems().into_iter().map(|p| p.field).collect();
    for f in ["params.n", "params.chi", "numerics.N", "numerics.cfl", "probes.gamma", "probes.s0_list", "initial.L", "probes.r1"] {
        assert!(fields.iter().any(|x| x == f), "{f} missing from {fields:?}");
    }
    assert!(matches!(run_scenario(&sc), Err(ScenarioError::Invalid(_))));
}

#[test]
fn auto_gamma_needs_a_region() {
    let mut sc = scenario(Mode::SimulateAndVerify);
    sc.params.m = 1.9;
    sc.probes.s0_list = vec![0.5];
    let fields: Vec<String> = sc.problems().into_iter().map(|p| p.field).collect();
    assert_eq!(fields, ["probes.gamma"]);
}

#[test]
fn thm2_needs_a_region_and_capped_data() {
    let mut sc = scenario(Mode::Thm2Pipeline);
    sc.params.m = 1.9;
    let fields: Vec<String> = sc.problems().into_iter().map(|p| p.field).collect();
    assert!(fields.contains(&"params".to_string()) && fields.contains(&"initial".to_string()));
}

#[test]
fn json_round_trip_and_unknown_fields() {
    let mut sc = scenario(Mode::SimulateAndVerify);
    sc.probes.gamma = GammaChoice::Value(0.4);
    sc.probes.eta = Some(0.5);
    sc.initial = Initial::Capped { cap: 1e-3, exponent: Some(6.0) };
    let text = serde_json::to_string(&sc).unwrap();
    assert_eq!(Scenario::from_json(&text).unwrap(), sc);

    let auto = Scenario { probes: Probes::default(), ..sc.clone() };
    let text = serde_json::to_string(&auto).unwrap();
    assert!(text.contains("\"gamma\":\"auto\""));
    assert_eq!(Scenario::from_json(&text).unwrap(), auto);

    let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["numerics"]["bogus"] = 1.into();
    assert!(matches!(Scenario::from_json(&v.to_string()), Err(ScenarioError::Parse(_))));
}

#[test]
fn minimal_json_takes_defaults() {
    let text = r#"{"params": {"n":3,"R":1,"m":1,"alpha":1,"chi":1,"kappa":1.2,"lambda1":0,"mu1":0.5,
        "q":0,"p":3,"K":1,"M0":1,"M1":0.5}, "mode": "classify-only"}"#;
    let sc = Scenario::from_json(text).unwrap();
    assert_eq!(sc.numerics, Numerics::default());
    assert_eq!(sc.numerics.cells, 512);
    assert_eq!(sc.initial, Initial::Zero);
    assert_eq!(sc.probes.gamma, GammaChoice::default());
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    out.sort();
    out
}

#[test]
fn runs_are_bit_identical_and_batches_split_directories() {
    let mut sc = scenario(Mode::SimulateAndVerify);
    sc.params.chi = 5.0;
    sc.probes.s0_list = vec![0.05, 0.3];
    sc.probes.r1 = Some(0.5);
    sc.initial = Initial::Capped { cap: 1e-2, exponent: Some(6.0) };
    let tmp = tempfile::tempdir().unwrap();
    let items = vec![("a".to_string(), sc.clone()), ("b".to_string(), sc.clone())];
    let entries = run_batch(&items, tmp.path(), 2);
    assert!(entries.iter().all(|e| e.ok), "{entries:?}");
    let a = read_all(&tmp.path().join("a"));
    let b = read_all(&tmp.path().join("b"));
    let names: Vec<&str> = a.iter().map(|x| x.0.as_str()).collect();
    assert_eq!(names, ["moments.csv", "report.json", "sup_u.csv", "trajectory.csv"]);
    assert_eq!(a, b);

    let frames = read_trajectory(&tmp.path().join("a/trajectory.csv")).unwrap();
    let bundle = run_scenario(&sc).unwrap();
    assert_eq!(frames.len(), bundle.snapshots.len());
    assert_eq!(frames[2].w, bundle.snapshots[2].w);
    assert_eq!(frames[0].s, bundle.grid.unwrap().s);
}
