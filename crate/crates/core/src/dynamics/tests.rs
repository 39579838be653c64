use super::*;

pub(crate) fn base_params() -> ModelParams {
    ModelParams {
        n: 3,
        radius: 1.0,
        m: 1.0,
        alpha: 1.0,
        chi: 1.0,
        kappa: 2.0,
        lambda1: 0.0,
        mu1: 0.0,
        q: 0.0,
        p: 6.0,
        k: 1.0,
        m0: 1.0,
        m1: 0.9,
        lambda_profile: None,
        mu_profile: None,
    }
}

fn grid(n: u32, cells: usize, g: f64) -> Arc<MassGrid> {
    Arc::new(MassGrid::graded(n, 1.0, cells, g).unwrap())
}

#[test]
fn zero_state_is_stationary() {
    let sch = Scheme::new(&ModelParams { lambda1: 1.0, mu1: 1.0, ..base_params() }, grid(3, 32, 2.0));
    let st = MassState::zero(sch.grid.clone());
    let c = sch.chemo(&st.w).unwrap();
    assert!(sch.rhs(&st.w, &c).iter().all(|&x| x == 0.0));
}

#[test]
fn uniform_state_follows_logistic_rate() {
    let p = ModelParams { lambda1: 1.3, mu1: 0.7, kappa: 1.6, ..base_params() };
    let sch = Scheme::new(&p, grid(3, 64, 2.0));
    let c = 0.8;
    let st = MassState::uniform(sch.grid.clone(), c);
    let chemo = sch.chemo(&st.w).unwrap();
    let rhs = sch.rhs(&st.w, &chemo);
    let rate = 1.3 * c - 0.7 * c.powf(1.6);
    for (i, s) in sch.grid.s.iter().enumerate() {
        let want = rate * s / 3.0;
        assert!((rhs[i] - want).abs() < 1e-9 * (1.0 + want.abs()), "node {i}: {} vs {want}", rhs[i]);
    }
}

#[test]
fn mass_is_frozen_without_sources() {
    let sch = Scheme::new(&ModelParams { chi: 2.0, ..base_params() }, grid(3, 64, 2.0));
    let st = MassState { w: sch.grid.s.iter().map(|s| (3.0 * s).tanh()).collect(), ..MassState::zero(sch.grid.clone()) };
    let c = sch.chemo(&st.w).unwrap();
    assert_eq!(sch.rhs(&st.w, &c)[64], 0.0);
}

#[test]
fn zero_step_changes_nothing() {
    let sch = Scheme::new(&base_params(), grid(3, 32, 2.0));
    let st = MassState::uniform(sch.grid.clone(), 1.0);
    let c = sch.chemo(&st.w).unwrap();
    assert_eq!(sch.step(&st, &c, 0.0).unwrap(), st);
}

#[test]
fn linear_w_gives_constant_u() {
    let st = MassState::uniform(grid(4, 40, 2.0), 2.5);
    assert!(reconstruct_u(&st).iter().all(|u| (u - 2.5).abs() < 1e-12));
    assert!(reconstruct_u(&MassState::zero(grid(4, 40, 2.0))).iter().all(|&u| u == 0.0));
}

#[test]
fn power_bound_examples() {
    let r: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
    let exact: Vec<f64> = r.iter().map(|&x| if x > 0.0 { 2.0 * x.powf(-3.0) } else { 0.0 }).collect();
    let pb = power_bound(&exact, &r, 2.0, 3.0);
    assert!(pb.ok && (pb.worst_ratio - 1.0).abs() < 1e-12);
    let twice: Vec<f64> = exact.iter().map(|u| 2.0 * u).collect();
    let pb = power_bound(&twice, &r, 2.0, 3.0);
    assert!(!pb.ok && (pb.worst_ratio - 2.0).abs() < 1e-12 && (pb.k_fit - 4.0).abs() < 1e-12);
}

#[test]
fn uncapped_profile_is_a_plateau() {
    let p = base_params();
    let prof = capped_plateau(&p, f64::INFINITY, 6.0).unwrap();
    let want = p.m0 * 3.0 / p.omega_n1();
    assert!((prof.plateau - want).abs() < 1e-12 * want);
    let st = init_profile(&ModelParams { m1: 0.001, ..p.clone() }, grid(3, 64, 3.0), 0.5, f64::INFINITY, 6.0).unwrap();
    assert!((st.mass() - p.m0).abs() < 1e-12);
}

#[test]
fn concentrated_profile_meets_inner_mass() {
    let p = base_params();
    let g = grid(3, 256, 3.0);
    let st = init_profile(&p, g.clone(), 0.2, 1e-4, 6.0).unwrap();
    assert!(((st.mass() - 1.0) / 1.0).abs() < 1e-10);
    let prof = capped_plateau(&p, 1e-4, 6.0).unwrap();
    assert!(p.omega_n1() * prof.accumulated(0.2) >= 0.9);
    // nodal u recovers u0 where the profile is smooth; the r^{-6} tail is
    // steep, so second-order error is still near 1% at this resolution
    let u = reconstruct_u(&st);
    let r = g.radii();
    let rc = prof.corner();
    for i in 1..g.cells() {
        if (r[i] - rc).abs() > 0.05 {
            let want = prof.density(r[i]);
            assert!((u[i] - want).abs() < 1e-2 * want, "r {} u {} want {}", r[i], u[i], want);
        }
    }
    let pb = check_power_bound(&st, 1e-4, 6.0);
    assert!(pb.worst_ratio < 1.02, "{pb:?}");
    assert!(check_power_bound(&st, 1.02e-4, 6.0).ok);
}

#[test]
fn spread_profile_is_rejected() {
    let p = base_params();
    match init_profile(&p, grid(3, 64, 2.0), 0.2, 1e6, 6.0) {
        Err(InitError::InnerMass { achieved, required }) => {
            assert!(achieved < 0.1 && required == 0.9);
        }
        other => panic!("{other:?}"),
    }
    // all the mass inside B(r1) is impossible for a positive density
    let p = ModelParams { m1: 1.0, ..base_params() };
    assert!(matches!(init_profile(&p, grid(3, 64, 2.0), 0.5, 1e-4, 6.0), Err(InitError::InnerMass { .. })));
}

#[test]
fn zero_data_reaches_horizon() {
    let sch = Scheme::new(&base_params(), grid(3, 32, 2.0));
    let out = run(
        &sch,
        MassState::zero(sch.grid.clone()),
        &RunOptions { t_end: 0.05, sample_every: 0.01, ..RunOptions::default() },
        |_| {},
    )
    .unwrap();
    assert_eq!(out.report.trigger, Trigger::HorizonReached);
    assert!(!out.report.detected && out.report.t_star.is_none());
    assert_eq!(out.snapshots.len(), 6);
    assert_eq!(out.last.t, 0.05);
}
