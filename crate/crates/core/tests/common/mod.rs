#![allow(dead_code)]

use nlskdv::closedform::make_soliton;
use nlskdv::{Grid, State};
use rand::Rng;

/// Sum of a few Gaussian bumps centered well inside the grid, so every
/// sample near `±L` is below roundoff. `signed` allows negative amplitudes.
pub fn random_bumps(rng: &mut impl Rng, g: &Grid, signed: bool) -> Vec<f64> {
    let k = rng.gen_range(1..=3);
    let reach = 0.25 * g.half_width();
    let bumps: Vec<(f64, f64, f64)> = (0..k)
        .map(|_| {
            let a = rng.gen_range(0.2..2.0)
                * if signed && rng.gen_bool(0.5) {
                    -1.0
                } else {
                    1.0
                };
            let c = rng.gen_range(-reach..reach);
            let w = rng.gen_range(0.5..0.1 * g.half_width());
            (a, c, w)
        })
        .collect();
    g.sample(|x| {
        bumps
            .iter()
            .map(|&(a, c, w)| a * (-0.5 * ((x - c) / w).powi(2)).exp())
            .sum()
    })
}

pub fn random_state(rng: &mut impl Rng, g: &Grid, n: usize, signed: bool) -> State {
    State::new(*g, (0..n).map(|_| random_bumps(rng, g, signed)).collect()).unwrap()
}

/// `(U₁, V₂)` for the cubic–quadratic system.
pub fn decoupled_pair(lambda1: f64, lambda2: f64, g: Grid) -> State {
    State::new(
        g,
        vec![
            make_soliton(lambda1, 1.0, 3.0, g).into_values(),
            make_soliton(lambda2, 0.5, 2.0, g).into_values(),
        ],
    )
    .unwrap()
}

pub fn semitrivial(lambda2: f64, g: Grid) -> State {
    State::new(
        g,
        vec![
            vec![0.0; g.len()],
            make_soliton(lambda2, 0.5, 2.0, g).into_values(),
        ],
    )
    .unwrap()
}

pub fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}
