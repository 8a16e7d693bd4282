//! Discrete calculus against closed forms: quadrature of sech powers, the
//! operator on exact solitons, energies, Nehari identities, gradients, and
//! finite-difference checks of the analytic derivatives.

mod common;

use common::{random_state, relative_gap, semitrivial};
use nlskdv::closedform::{
    closed_energy_ubeta, closed_energy_v2, explicit_family, make_soliton, sech_moment,
    soliton_value,
};
use nlskdv::grid::{apply_operator, make_grid, norm_sq, quadrature};
use nlskdv::model::{
    directional_derivative_check, energy, energy_n, gradient, gradient_n, nehari_value,
};
use nlskdv::nehari::{project, reduced_energy_with};
use nlskdv::{Error, Field, Functional, Grid, NParams, Params, State};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn sech_powers_integrate_to_exact_moments() {
    let g = make_grid(40.0, 8001).unwrap();
    for k in [4, 6, 8] {
        let f = Field::from_fn(g, |x| (1.0 / x.cosh()).powi(k as i32));
        let exact = sech_moment(k).unwrap().value();
        assert!(
            (quadrature(&f) - exact).abs() < 1e-10,
            "k={k}: {}",
            quadrature(&f)
        );
    }
}

#[test]
fn quadrature_is_linear_and_monotone() {
    let g = make_grid(10.0, 101).unwrap();
    let a = Field::from_fn(g, |x| (-x * x).exp());
    let b = Field::from_fn(g, |x| 1.0 / (1.0 + x * x));
    let sum = Field::from_fn(g, |x| 2.0 * (-x * x).exp() - 3.0 / (1.0 + x * x));
    assert!((quadrature(&sum) - (2.0 * quadrature(&a) - 3.0 * quadrature(&b))).abs() < 1e-13);
    let c = Field::from_fn(g, |x| (-x * x).exp() + 1e-9);
    assert!(quadrature(&c) > quadrature(&a));
}

fn soliton_residual(lambda: f64, mu: f64, r: f64, g: Grid) -> f64 {
    let w = make_soliton(lambda, mu, r, g);
    let lhs = apply_operator(&w, lambda);
    lhs.values()
        .iter()
        .zip(w.values())
        .map(|(l, v)| (l - mu * v.abs().powf(r - 1.0) * v).abs())
        .fold(0.0, f64::max)
}

#[test]
fn operator_residual_on_solitons_is_second_order() {
    for (lambda, mu, r) in [
        (1.0_f64, 0.5, 2.0),
        (1.0, 1.0, 3.0),
        (4.0, 0.5, 2.0),
        (2.0, 1.0, 5.0),
    ] {
        let g = Grid::new(30.0 / lambda.sqrt(), 2001).unwrap();
        let coarse = soliton_residual(lambda, mu, r, g);
        let fine = soliton_residual(lambda, mu, r, g.refined());
        let ratio = coarse / fine;
        assert!(
            (3.5..=4.5).contains(&ratio),
            "(λ={lambda}, r={r}): ratio {ratio}"
        );
    }
}

#[test]
fn norm_identities_of_exact_solitons() {
    let g = make_grid(20.0, 8001).unwrap();
    let v2 = make_soliton(1.0, 0.5, 2.0, g);
    let cube = quadrature(&Field::from_fn(g, |x| {
        soliton_value(1.0, 0.5, 2.0, x).powi(3)
    }));
    assert!(relative_gap(norm_sq(&v2, 1.0), 0.5 * cube) < 1e-6);
    let u1 = make_soliton(1.0, 1.0, 3.0, g);
    let quartic = quadrature(&Field::from_fn(g, |x| {
        soliton_value(1.0, 1.0, 3.0, x).powi(4)
    }));
    assert!(relative_gap(norm_sq(&u1, 1.0), quartic) < 1e-6);
    assert_eq!(norm_sq(&Field::zeros(g), 1.0), 0.0);
}

#[test]
fn norm_dominates_weighted_mass() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = make_grid(20.0, 1001).unwrap();
    for _ in 0..20 {
        let f = common::random_bumps(&mut rng, &g, true);
        let lambda = 0.3;
        assert!(g.norm_sq(&f, lambda) >= lambda * g.integrate_map(&f, |v| v * v));
    }
}

#[test]
fn closed_form_energies_by_quadrature() {
    let g = make_grid(20.0, 8001).unwrap();
    for lambda2 in [1.0, 4.0] {
        let p = Params::cubic_quadratic(1.0, lambda2, 0.3).unwrap();
        let e = energy(&p, &semitrivial(lambda2, g));
        assert!(
            relative_gap(e, closed_energy_v2(lambda2)) < 1e-5,
            "λ₂={lambda2}: {e}"
        );
    }
    for beta in [0.05, 0.1, 0.15] {
        let pt = explicit_family(1.0, beta, g).unwrap();
        let e = energy(&pt.params(), &pt.state);
        assert!(
            relative_gap(e, closed_energy_ubeta(1.0, beta).unwrap()) < 1e-5,
            "β={beta}: {e}"
        );
    }
    let p = Params::cubic_quadratic(1.0, 1.0, 0.0).unwrap();
    assert_eq!(energy(&p, &State::zeros(g, 2)), 0.0);
}

#[test]
fn nehari_value_vanishes_on_exact_solutions() {
    let g = make_grid(20.0, 8001).unwrap();
    let p = Params::cubic_quadratic(1.0, 1.0, 0.7).unwrap();
    let v = semitrivial(1.0, g);
    assert!(nehari_value(&p, &v).abs() < 1e-6 * Functional::norm_sq(&p, &v));
    let u = State::new(
        g,
        vec![
            make_soliton(1.0, 1.0, 3.0, g).into_values(),
            vec![0.0; g.len()],
        ],
    )
    .unwrap();
    assert!(nehari_value(&p, &u).abs() < 1e-6 * Functional::norm_sq(&p, &u));
    assert_eq!(nehari_value(&p, &State::zeros(g, 2)), 0.0);
}

#[test]
fn gradient_at_exact_solutions_is_second_order_small() {
    // tails must be far below h² for the boundary closure not to dominate
    let g = make_grid(40.0, 4001).unwrap();
    let p = Params::cubic_quadratic(1.0, 1.0, 0.4).unwrap();
    let r = gradient(&p, &semitrivial(1.0, g));
    assert!(r.component(0).iter().all(|&v| v == 0.0));
    let coarse = r.max_abs();
    let fine = gradient(&p, &semitrivial(1.0, g.refined())).max_abs();
    assert!((3.5..=4.5).contains(&(coarse / fine)), "{coarse} / {fine}");

    let pt = explicit_family(1.0, 0.1, g).unwrap();
    let coarse = gradient(&pt.params(), &pt.state).max_abs();
    let pt = explicit_family(1.0, 0.1, g.refined()).unwrap();
    let fine = gradient(&pt.params(), &pt.state).max_abs();
    assert!((3.5..=4.5).contains(&(coarse / fine)), "{coarse} / {fine}");

    let zero = gradient(&p, &State::zeros(g, 2));
    assert_eq!(zero.max_abs(), 0.0);
}

#[test]
fn directional_derivatives_match_centered_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let g = make_grid(20.0, 2001).unwrap();
    let params = [
        Params::cubic_quadratic(1.0, 1.0, 1.0).unwrap(),
        Params::new(1.5, 0.7, 0.8, 1.2, -0.6, 5.0, 2.5).unwrap(),
    ];
    for p in &params {
        for _ in 0..10 {
            let s = random_state(&mut rng, &g, 2, true);
            let d = random_state(&mut rng, &g, 2, true);
            let (a, n) = directional_derivative_check(p, &s, &d, 1e-5);
            assert!(relative_gap(a, n) < 1e-6, "{a} vs {n}");
        }
        let s = random_state(&mut rng, &g, 2, true);
        assert_eq!(
            directional_derivative_check(p, &s, &State::zeros(g, 2), 1e-5),
            (0.0, 0.0)
        );
    }
}

#[test]
fn semitrivial_point_is_critical_in_the_kdv_direction() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = make_grid(20.0, 8001).unwrap();
    let p = Params::cubic_quadratic(1.0, 1.0, 0.9).unwrap();
    let s = semitrivial(1.0, g);
    for _ in 0..5 {
        let h2 = common::random_bumps(&mut rng, &g, true);
        let d = State::new(g, vec![vec![0.0; g.len()], h2]).unwrap();
        let (a, _) = directional_derivative_check(&p, &s, &d, 1e-5);
        let scale = Functional::norm_sq(&p, &d).sqrt() * Functional::norm_sq(&p, &s).sqrt();
        assert!(a.abs() < 1e-5 * scale, "{a}");
    }
}

#[test]
fn nehari_value_is_the_radial_derivative() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let g = make_grid(20.0, 2001).unwrap();
    let p = Params::new(1.0, 2.0, 1.0, 0.5, 0.8, 3.0, 2.0).unwrap();
    for _ in 0..10 {
        let s = random_state(&mut rng, &g, 2, true);
        let (pairing, _) = directional_derivative_check(&p, &s, &s, 1e-5);
        assert!(relative_gap(nehari_value(&p, &s), pairing) < 1e-8);
    }
}

#[test]
fn energy_along_a_ray_is_the_fibering_polynomial() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let g = make_grid(20.0, 2001).unwrap();
    let p = Params::new(1.2, 0.8, 1.0, 0.5, 0.6, 3.0, 2.0).unwrap();
    let s = random_state(&mut rng, &g, 2, false);
    let (u, v) = (s.component(0), s.component(1));
    let norm = g.norm_sq(u, 1.2) + g.norm_sq(v, 0.8);
    let u4 = g.integrate_map(u, |x| x.powi(4));
    let v3 = g.integrate_map(v, |x| x.abs().powi(3));
    let u2v = g.integrate(&u.iter().zip(v).map(|(a, b)| a * a * b).collect::<Vec<_>>());
    for t in [0.1, 0.5, 1.0, 2.0, 7.5] {
        let poly = 0.5 * norm * t * t
            - u4 / 4.0 * t.powi(4)
            - 0.5 * v3 / 3.0 * t.powi(3)
            - 0.5 * 0.6 * u2v * t.powi(3);
        assert!(
            relative_gap(energy(&p, &s.scaled(t)), poly) < 1e-10,
            "t={t}"
        );
    }
}

#[test]
fn energy_on_the_nehari_set_is_the_reduced_functional() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let g = make_grid(20.0, 2001).unwrap();
    for p in [
        Params::cubic_quadratic(1.0, 1.0, 0.5).unwrap(),
        Params::new(0.7, 1.4, 1.0, 0.9, 2.0, 4.0, 2.5).unwrap(),
    ] {
        for _ in 0..10 {
            let s = project(&p, &random_state(&mut rng, &g, 2, false))
                .unwrap()
                .projected;
            let (u, v) = (s.component(0), s.component(1));
            let norm = g.norm_sq(u, p.lambda1) + g.norm_sq(v, p.lambda2);
            let uq = g.integrate_map(u, |x| x.abs().powf(p.q + 1.0));
            let vp = g.integrate_map(v, |x| x.abs().powf(p.p + 1.0));
            let reduced = norm / 6.0
                + (1.0 / 3.0 - 1.0 / (p.q + 1.0)) * p.mu1 * uq
                + (1.0 / 3.0 - 1.0 / (p.p + 1.0)) * p.mu2 * vp;
            assert!(relative_gap(energy(&p, &s), reduced) < 1e-8);
            assert!(relative_gap(reduced_energy_with(&p, &s, 1e-8).unwrap(), reduced) < 1e-12);
        }
    }
}

#[test]
fn n_system_energies_and_residuals() {
    let g = make_grid(40.0, 4001).unwrap();
    let np = NParams::new(1.0, vec![1.0, 2.0], vec![0.3, 0.7]).unwrap();
    let v1 = make_soliton(1.0, 0.5, 2.0, g).into_values();
    let v2 = make_soliton(2.0, 0.5, 2.0, g).into_values();
    let zero = vec![0.0; g.len()];
    let ge = make_grid(20.0, 8001).unwrap();
    let lone = State::new(
        ge,
        vec![
            vec![0.0; ge.len()],
            make_soliton(1.0, 0.5, 2.0, ge).into_values(),
            vec![0.0; ge.len()],
        ],
    )
    .unwrap();
    assert!(relative_gap(energy_n(&np, &lone).unwrap(), closed_energy_v2(1.0)) < 1e-5);
    assert_eq!(energy_n(&np, &State::zeros(g, 3)).unwrap(), 0.0);

    let both = State::new(g, vec![zero.clone(), v1, v2]).unwrap();
    let coarse = gradient_n(&np, &both).unwrap().max_abs();
    let gf = g.refined();
    let fine_state = State::new(
        gf,
        vec![
            vec![0.0; gf.len()],
            make_soliton(1.0, 0.5, 2.0, gf).into_values(),
            make_soliton(2.0, 0.5, 2.0, gf).into_values(),
        ],
    )
    .unwrap();
    let fine = gradient_n(&np, &fine_state).unwrap().max_abs();
    assert!((3.5..=4.5).contains(&(coarse / fine)), "{coarse} / {fine}");

    assert!(matches!(
        energy_n(&np, &State::zeros(g, 2)),
        Err(Error::Shape { .. })
    ));
    assert!(matches!(
        gradient_n(&np, &State::zeros(g, 4)),
        Err(Error::Shape { .. })
    ));
}

#[test]
fn n_system_gradient_matches_centered_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let g = make_grid(20.0, 2001).unwrap();
    let np = NParams::new(1.0, vec![0.5, 2.0, 1.5], vec![0.4, -0.8, 1.1]).unwrap();
    for _ in 0..5 {
        let s = random_state(&mut rng, &g, 4, true);
        let d = random_state(&mut rng, &g, 4, true);
        let analytic = gradient_n(&np, &s).unwrap().l2_pairing(&d);
        let plus = energy_n(&np, &s.axpy(1e-5, &d)).unwrap();
        let minus = energy_n(&np, &s.axpy(-1e-5, &d)).unwrap();
        assert!(relative_gap(analytic, (plus - minus) / 2e-5) < 1e-6);
    }
}
