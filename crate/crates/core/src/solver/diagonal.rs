//! The diagonal construction `t(V, V)`: for large `λ₂` its energy drops
//! below that of the semi-trivial solution `(0, V)`, which forces the ground
//! state to have both components nonzero.

use crate::closedform::make_soliton;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{energy, Params, State};
use crate::nehari::project;

/// Positive root of `(18/7)λ₂t² + ½(1+3β)t - (1 + 5(λ₁-λ₂)/(12λ₂)) = 0`,
/// the dilation putting `t(V₂, V₂)` on the Nehari set.
pub fn diag_seed_t(lambda1: f64, lambda2: f64, beta: f64) -> Result<f64> {
    if !(lambda1 > 0.0 && lambda2 > 0.0 && lambda1.is_finite() && lambda2.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "lambdas must be positive, got ({lambda1}, {lambda2})"
        )));
    }
    let a = 18.0 / 7.0 * lambda2;
    let b = 0.5 * (1.0 + 3.0 * beta);
    let c = 1.0 + 5.0 * (lambda1 - lambda2) / (12.0 * lambda2);
    if c <= 0.0 {
        return Err(Error::NoPositiveRoot(format!(
            "constant term {c:e} is not positive for lambda1={lambda1}, lambda2={lambda2}"
        )));
    }
    let disc = (b * b + 4.0 * a * c).sqrt();
    Ok(if b >= 0.0 {
        2.0 * c / (b + disc)
    } else {
        (disc - b) / (2.0 * a)
    })
}

/// `(18/7)λ₂t⁴ + t²(2 + 5(λ₁-λ₂)/(6λ₂)) - 1` at `t = diag_seed_t`; a negative
/// value means `Φ(t(V₂,V₂)) < Φ(0,V₂)`.
pub fn diag_gap(lambda1: f64, lambda2: f64, beta: f64) -> Result<f64> {
    let t = diag_seed_t(lambda1, lambda2, beta)?;
    let t2 = t * t;
    Ok(
        18.0 / 7.0 * lambda2 * t2 * t2 + t2 * (2.0 + 5.0 * (lambda1 - lambda2) / (6.0 * lambda2))
            - 1.0,
    )
}

/// Same comparison for general powers, by quadrature:
/// `Φ(project(V_p, V_p)) - Φ(0, V_p)`.
pub fn diag_compare(p: &Params, g: Grid) -> Result<f64> {
    p.validate()?;
    let vp = make_soliton(p.lambda2, p.mu2, p.p, g).into_values();
    let diag = State::new(g, vec![vp.clone(), vp.clone()])?;
    let projected = project(p, &diag)?.projected;
    let semi = State::new(g, vec![vec![0.0; g.len()], vp])?;
    Ok(energy(p, &projected) - energy(p, &semi))
}
