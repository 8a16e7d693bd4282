mod common;

use common::{decoupled_pair, relative_gap, semitrivial};
use nlskdv::closedform::{closed_energy_u1, closed_energy_v2, explicit_family, make_soliton};
use nlskdv::model::energy;
use nlskdv::nehari::{project, reduced_energy_with};
use nlskdv::solver::{
    bifurcation_scan, continuation_branch, continue_from_decoupled, default_seeds, default_seeds_n,
    diag_compare, diag_gap, diag_seed_t, ground_state, ground_state_n, mountain_pass,
};
use nlskdv::{Error, Functional, Grid, NParams, Params, SolverCfg, State};

fn check_report_invariants<F: Functional>(f: &F, r: &nlskdv::SolveReport, cfg: &SolverCfg) {
    assert!(
        r.nehari_defect <= cfg.nehari_tol,
        "defect {}",
        r.nehari_defect
    );
    assert!(r.grad_norm <= cfg.grad_tol, "gradient {}", r.grad_norm);
    assert!(r.energy.is_finite());
    let reduced = reduced_energy_with(f, &r.state, cfg.nehari_tol).unwrap();
    assert!(relative_gap(reduced, r.energy) < 1e-6);
}

#[test]
fn ground_state_report_invariants_and_monotone_trace() {
    let g = Grid::new(20.0, 2001).unwrap();
    let p = Params::cubic_quadratic(1.0, 1.0, 1.0).unwrap();
    let cfg = SolverCfg::default();
    let seeds = default_seeds(&p, g, 0);
    let r = ground_state(&p, &cfg, &seeds).unwrap();
    check_report_invariants(&p, &r, &cfg);
    assert!(r.flags.positive && r.flags.even && r.flags.nontrivial && !r.flags.semitrivial);
    for w in r.trace.windows(2) {
        assert!(
            w[1].energy <= w[0].energy + 1e-10 * w[0].energy.abs(),
            "{:?}",
            w
        );
    }
    // each seed on its own follows a non-increasing trace too
    for seed in &seeds {
        let run = ground_state(&p, &cfg, std::slice::from_ref(seed)).unwrap();
        for w in run.trace.windows(2) {
            assert!(w[1].energy <= w[0].energy + 1e-10 * w[0].energy.abs());
        }
    }
}

#[test]
fn ground_state_energy_converges_at_second_order() {
    let p = Params::cubic_quadratic(1.0, 1.0, 1.0).unwrap();
    let cfg = SolverCfg::default();
    let energies: Vec<f64> = [1001, 2001, 4001]
        .iter()
        .map(|&n| {
            let g = Grid::new(20.0, n).unwrap();
            ground_state(&p, &cfg, &default_seeds(&p, g, 0))
                .unwrap()
                .energy
        })
        .collect();
    let ratio = (energies[0] - energies[1]) / (energies[1] - energies[2]);
    assert!((3.0..=5.0).contains(&ratio), "{energies:?}: ratio {ratio}");
}

#[test]
fn decoupled_ground_state_is_the_cheaper_soliton() {
    let g = Grid::new(20.0, 4001).unwrap();
    let p = Params::cubic_quadratic(1.0, 1.0, 0.0).unwrap();
    let cfg = SolverCfg::default();
    let r = ground_state(&p, &cfg, &default_seeds(&p, g, 1)).unwrap();
    let want = closed_energy_u1(1.0).min(closed_energy_v2(1.0));
    assert!(
        relative_gap(r.energy, want) < 1e-4,
        "{} vs {want}",
        r.energy
    );
    assert!(r.flags.semitrivial);
}

#[test]
fn repulsive_coupling_does_not_report_a_local_minimum() {
    // (U₁, 0) lies at 4/3 on the Nehari set but is not critical for β ≠ 0;
    // the descent toward it stalls while other seeds settle at (0, V₂) = 4.8
    let g = Grid::new(40.0, 8001).unwrap();
    let p = Params::cubic_quadratic(1.0, 1.0, -5.0).unwrap();
    match ground_state(&p, &SolverCfg::default(), &default_seeds(&p, g, 0)).unwrap_err() {
        Error::NotMinimal {
            converged, reached, ..
        } => {
            assert!(relative_gap(converged, closed_energy_v2(1.0)) < 1e-5);
            assert!(reached < converged);
        }
        e => panic!("unexpected error {e}"),
    }
}

#[test]
fn ground_state_rejects_bad_input() {
    let g = Grid::new(20.0, 401).unwrap();
    let p = Params::cubic_quadratic(1.0, 1.0, 1.0).unwrap();
    let cfg = SolverCfg::default();
    assert!(matches!(
        ground_state(&p, &cfg, &[]),
        Err(Error::InvalidParams(_))
    ));
    assert!(matches!(
        ground_state(&p, &cfg, &[State::zeros(g, 3)]),
        Err(Error::Shape { .. })
    ));
    assert!(matches!(
        ground_state(&p, &cfg, &[State::zeros(g, 2)]),
        Err(Error::ProjectionFailure(_))
    ));
}

#[test]
fn diagonal_seed_examples() {
    let t = diag_seed_t(1.0, 1.0, 0.0).unwrap();
    assert!((18.0 / 7.0 * t * t + 0.5 * t - 1.0).abs() < 1e-14);
    let root = (-0.5 + (0.25_f64 + 4.0 * 18.0 / 7.0).sqrt()) / (36.0 / 7.0);
    assert!((t - root).abs() < 1e-12 && (t - 0.5339).abs() < 1e-4, "{t}");
    let t = diag_seed_t(1.0, 100.0, 0.01).unwrap();
    assert!((t - 0.0468).abs() < 1e-4, "{t}");
    assert!((diag_gap(1.0, 100.0, 0.01).unwrap() + 0.996).abs() < 1e-3);
    let mut prev = 0.0;
    for lambda2 in [1e2, 1e3, 1e4] {
        let gap = diag_gap(1.0, lambda2, 0.1).unwrap();
        assert!(gap < prev && gap > -1.0);
        prev = gap;
    }
    assert!(prev < -0.999);
    assert!(diag_seed_t(0.0, 1.0, 0.0).is_err());
}

#[test]
fn diagonal_seed_agrees_with_projection() {
    for (l1, l2, beta) in [(1.0_f64, 1.0_f64, 0.0), (1.0, 100.0, 0.01), (2.0, 3.0, 0.4)] {
        let g = Grid::new(40.0 / l1.min(l2).sqrt(), 32001).unwrap();
        let p = Params::cubic_quadratic(l1, l2, beta).unwrap();
        let v = make_soliton(l2, 0.5, 2.0, g).into_values();
        let t = project(&p, &State::new(g, vec![v.clone(), v]).unwrap())
            .unwrap()
            .t;
        let want = diag_seed_t(l1, l2, beta).unwrap();
        assert!(
            (t - want).abs() < 1e-4,
            "({l1}, {l2}, {beta}): {t} vs {want}"
        );
    }
}

#[test]
fn quadrature_diagonal_test_matches_scalar_gap() {
    for (l1, l2, beta) in [(1.0_f64, 1.0_f64, 0.4), (1.0, 4.0, 0.1), (1.0, 50.0, 0.1)] {
        let g = Grid::new(40.0 / l1.min(l2).sqrt(), 32001).unwrap();
        let p = Params::cubic_quadratic(l1, l2, beta).unwrap();
        let by_quadrature = diag_compare(&p, g).unwrap() / closed_energy_v2(l2);
        let scalar = diag_gap(l1, l2, beta).unwrap();
        assert!(
            (by_quadrature - scalar).abs() < 1e-4,
            "({l1}, {l2}, {beta}): {by_quadrature} vs {scalar}"
        );
    }
}

#[test]
fn diagonal_test_for_other_powers() {
    let g = Grid::new(20.0, 8001).unwrap();
    let p = Params::new(1.0, 50.0, 1.0, 1.0, 0.1, 5.0, 2.0).unwrap();
    assert!(diag_compare(&p, g).unwrap() < 0.0);
    // outside the covered regime the value is still computed
    let p = Params::new(1.0, 2.0, 1.0, 1.0, 0.1, 2.0, 3.0).unwrap();
    assert!(diag_compare(&p, g).unwrap().is_finite());
}

#[test]
fn continuation_starts_at_the_decoupled_pair() {
    let g = Grid::new(20.0, 4001).unwrap();
    let base = Params::cubic_quadratic(1.0, 4.0, 1.0).unwrap();
    let branch = continuation_branch(&base, g, &SolverCfg::default(), &[0.0, 0.02]).unwrap();
    assert_eq!(branch[0].1.state, decoupled_pair(1.0, 4.0, g));
    assert_eq!(branch.len(), 2);
    assert!(branch[1].1.flags.positive);
}

#[test]
fn negative_coupling_keeps_the_kdv_component_positive() {
    let g = Grid::new(20.0, 4001).unwrap();
    let base = Params::cubic_quadratic(1.0, 4.0, -1.0).unwrap();
    let r =
        continue_from_decoupled(&base, g, &SolverCfg::default(), &[0.0, 0.01, 0.02, 0.03]).unwrap();
    assert!(r.state.component(1).iter().all(|&v| v >= 0.0));
    let u0 = decoupled_pair(1.0, 4.0, g);
    assert!(r.state.distance_max(&u0) < 0.2);
}

#[test]
fn continuation_rejects_bad_schedules() {
    let g = Grid::new(20.0, 401).unwrap();
    let base = Params::cubic_quadratic(1.0, 4.0, 1.0).unwrap();
    let cfg = SolverCfg::default();
    for schedule in [&[][..], &[0.0, 0.02, 0.01][..], &[-0.01, 0.0][..]] {
        assert!(matches!(
            continuation_branch(&base, g, &cfg, schedule),
            Err(Error::InvalidParams(_))
        ));
    }
}

#[test]
fn mountain_pass_needs_distinct_endpoints() {
    let g = Grid::new(16.0, 801).unwrap();
    let p = Params::cubic_quadratic(1.0, 4.0, 0.01).unwrap();
    let a = semitrivial(4.0, g);
    let err = mountain_pass(&p, &a, &a, &SolverCfg::default(), 8).unwrap_err();
    assert!(matches!(err, Error::PassNotFound(_)));
}

#[test]
fn mountain_pass_clears_the_semitrivial_level_on_a_coarse_grid() {
    let g = Grid::new(16.0, 8001).unwrap();
    let p = Params::cubic_quadratic(1.0, 100.0, 0.01).unwrap();
    let cfg = SolverCfg::default();
    let ground = ground_state(&p, &cfg, &default_seeds(&p, g, 0)).unwrap();
    let b = semitrivial(100.0, g);
    let e_semi = energy(&p, &b);
    let pass = mountain_pass(&p, &ground.state, &b, &cfg, 16).unwrap();
    check_report_invariants(&p, &pass, &cfg);
    // same-grid ordering: ground < semi-trivial < mountain pass
    assert!(ground.energy < e_semi && e_semi < pass.energy);
    assert!(pass.flags.positive && pass.flags.even);
}

#[test]
fn scan_columns() {
    let g = Grid::new(20.0, 8001).unwrap();
    let betas: Vec<f64> = (1..=8).map(|k| k as f64 / 50.0).collect();
    let rows = bifurcation_scan(1.0, &betas, g, &SolverCfg::default()).unwrap();
    assert_eq!(rows.iter().map(|r| r.beta).collect::<Vec<_>>(), betas);
    for r in &rows {
        assert_eq!(r.u_peak, (2.0 * (1.0 - 6.0 * r.beta)).sqrt());
        assert_eq!(r.v_peak, 12.0);
        assert!(relative_gap(r.e_quad, r.e_closed) < 1e-5);
        assert!(r.e_semitrivial < r.e_closed);
        assert!(r.refined_residual.unwrap() < 1e-6 && r.error.is_none());
    }
    assert!(rows.windows(2).all(|w| w[1].u_peak < w[0].u_peak));
    assert!(matches!(
        bifurcation_scan(1.0, &[0.1, 0.2], g, &SolverCfg::default()),
        Err(Error::FamilyUndefined(_))
    ));
    assert!(bifurcation_scan(1.0, &[], g, &SolverCfg::default()).is_err());
}

#[test]
fn refined_family_states_approach_the_explicit_ones() {
    let gaps: Vec<f64> = [1001, 2001, 4001]
        .iter()
        .map(|&n| {
            let g = Grid::new(20.0, n).unwrap();
            bifurcation_scan(1.0, &[0.1], g, &SolverCfg::default()).unwrap()[0]
                .refined_gap
                .unwrap()
        })
        .collect();
    assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
    let g = Grid::new(20.0, 2001).unwrap();
    let rows = bifurcation_scan(1.0, &[0.16, 0.166, 0.1666], g, &SolverCfg::default()).unwrap();
    let peaks: Vec<f64> = rows.iter().map(|r| r.refined_u_peak.unwrap()).collect();
    assert!(
        peaks.windows(2).all(|w| w[1] < w[0]) && peaks[2] < 0.05,
        "{peaks:?}"
    );
    let _ = explicit_family(1.0, 0.1, g).unwrap();
}

#[test]
fn decoupled_n_system_picks_the_lowest_soliton() {
    let g = Grid::new(20.0, 4001).unwrap();
    let np = NParams::new(1.0, vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
    let cfg = SolverCfg::default();
    let r = ground_state_n(&np, &cfg, &default_seeds_n(&np, g, 2)).unwrap();
    assert!(
        relative_gap(r.energy, closed_energy_u1(1.0)) < 1e-4,
        "{}",
        r.energy
    );
    check_report_invariants(&np, &r, &cfg);
}

#[test]
fn n_system_rejects_mismatched_seeds() {
    let g = Grid::new(20.0, 401).unwrap();
    let np = NParams::new(1.0, vec![1.0, 1.0], vec![1.0, 1.0]).unwrap();
    let err = ground_state_n(&np, &SolverCfg::default(), &[State::zeros(g, 2)]).unwrap_err();
    assert!(matches!(err, Error::Shape { .. }));
}
