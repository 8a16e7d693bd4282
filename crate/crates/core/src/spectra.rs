//! The coupling threshold `Λ = inf ‖φ‖₁² / ∫V φ²` as the smallest
//! eigenvalue of a tridiagonal pencil, the second variation at the
//! semi-trivial point `(0, V_p)`, and the local-min / saddle classifier.

use serde::{Deserialize, Serialize};

use crate::closedform::make_soliton;
use crate::error::{Error, Result};
use crate::grid::{max_abs, Field, Grid};
use crate::linalg::Tridiagonal;
use crate::model::{NParams, Params, Power, State};

const RAYLEIGH_TOL: f64 = 1e-12;
const MAX_ITERS: usize = 20_000;

#[derive(Debug, Clone)]
pub struct ThresholdReport {
    pub lambda: f64,
    /// Positive generalized eigenfunction with unit peak.
    pub minimizer: Field,
    pub iterations: usize,
    /// `max|Aφ - ΛVφ| / max|Aφ|`.
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    LocalMin,
    Saddle,
    Marginal,
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParams(format!(
            "{name} must be positive, got {v}"
        )))
    }
}

/// Smallest `Λ` with `-φ'' + λ₁φ = Λ V φ`, `V = make_soliton(λ₂, μ₂, p)`,
/// by inverse iteration with shift 0.
pub fn lambda_threshold(
    lambda1: f64,
    lambda2: f64,
    mu2: f64,
    p: f64,
    g: Grid,
) -> Result<ThresholdReport> {
    check_positive("lambda1", lambda1)?;
    check_positive("lambda2", lambda2)?;
    check_positive("mu2", mu2)?;
    if !(p.is_finite() && p >= 2.0) {
        return Err(Error::InvalidParams(format!(
            "p must be at least 2, got {p}"
        )));
    }
    let weight = make_soliton(lambda2, mu2, p, g).into_values();
    threshold_for_weight(lambda1, &weight, g)
}

fn threshold_for_weight(lambda1: f64, weight: &[f64], g: Grid) -> Result<ThresholdReport> {
    let a = Tridiagonal::dirichlet_operator(&g, lambda1)?;
    let rayleigh = |phi: &[f64]| {
        let wphi: f64 = phi.iter().zip(weight).map(|(f, w)| w * f * f).sum();
        let mut aphi = vec![0.0; phi.len()];
        g.apply_operator_into(phi, lambda1, &mut aphi);
        let num: f64 = phi.iter().zip(&aphi).map(|(f, x)| f * x).sum();
        num / wphi
    };
    // start from the weight itself: positive, even, and close to the answer
    let mut phi = weight.to_vec();
    let mut rho = rayleigh(&phi);
    let mut change = f64::INFINITY;
    let mut iterations = 0;
    while iterations < MAX_ITERS {
        iterations += 1;
        let rhs: Vec<f64> = phi.iter().zip(weight).map(|(f, w)| w * f).collect();
        phi = a.solve(&rhs);
        let m = max_abs(&phi);
        phi.iter_mut().for_each(|f| *f /= m);
        let next = rayleigh(&phi);
        change = (next - rho).abs();
        rho = next;
        if change < RAYLEIGH_TOL * rho.abs().max(1.0) {
            break;
        }
    }
    if change >= RAYLEIGH_TOL * rho.abs().max(1.0) {
        return Err(Error::EigensolverFailure { iterations, change });
    }
    if phi[g.center()] < 0.0 {
        phi.iter_mut().for_each(|f| *f = -*f);
    }
    let mut aphi = vec![0.0; phi.len()];
    g.apply_operator_into(&phi, lambda1, &mut aphi);
    let res = aphi
        .iter()
        .zip(&phi)
        .zip(weight)
        .map(|((x, f), w)| (x - rho * w * f).abs())
        .fold(0.0, f64::max);
    Ok(ThresholdReport {
        lambda: rho,
        minimizer: Field::new(g, phi)?,
        iterations,
        residual: res / max_abs(&aphi),
    })
}

/// Grid with roughly twice the spacing, kept odd.
fn coarse_grid(g: &Grid) -> Option<Grid> {
    let mut n = g.len().div_ceil(2);
    if n.is_multiple_of(2) {
        n += 1;
    }
    if n < 5 || n >= g.len() {
        return None;
    }
    Grid::new(g.half_width(), n).ok()
}

/// Uncertainty band around a computed threshold: ten times the larger of the
/// algebraic residual and a Richardson estimate of the discretization error
/// from a second solve on a coarser grid.
pub fn threshold_band(
    lambda1: f64,
    lambda2: f64,
    mu2: f64,
    p: f64,
    g: Grid,
) -> Result<(ThresholdReport, f64)> {
    let fine = lambda_threshold(lambda1, lambda2, mu2, p, g)?;
    let discretization = match coarse_grid(&g) {
        Some(cg) => {
            let coarse = lambda_threshold(lambda1, lambda2, mu2, p, cg)?;
            let ratio = (cg.spacing() / g.spacing()).powi(2);
            (fine.lambda - coarse.lambda).abs() / (ratio - 1.0)
        }
        None => 0.0,
    };
    let delta = 10.0 * fine.residual.max(discretization);
    Ok((fine, delta))
}

/// Second variation of the energy at `(0, V_p)` in direction `h = (h₁, h₂)`:
/// `‖h₁‖₁² - β∫V_p h₁² + ‖h₂‖₂² - pμ₂∫V_p^{p-1} h₂²`.
pub fn hessian_form(p: &Params, h: &State) -> f64 {
    let g = *h.grid();
    let vp = make_soliton(p.lambda2, p.mu2, p.p, g).into_values();
    let (h1, h2) = (h.component(0), h.component(1));
    let pw = Power(p.p);
    let mut coupled = vec![0.0; g.len()];
    let mut kdv = vec![0.0; g.len()];
    for i in 0..g.len() {
        coupled[i] = vp[i] * h1[i] * h1[i];
        kdv[i] = pw.odd_derivative(vp[i]) * h2[i] * h2[i];
    }
    g.norm_sq(h1, p.lambda1) - p.beta * g.integrate(&coupled) + g.norm_sq(h2, p.lambda2)
        - p.mu2 * g.integrate(&kdv)
}

/// Inertia of a symmetric tridiagonal matrix shifted by `-sigma`: the number
/// of negative pivots of its LDLᵀ factorization, i.e. of eigenvalues below
/// `sigma`.
fn count_below(diag: &[f64], off: f64, sigma: f64) -> usize {
    let mut count = 0;
    let mut d = diag[0] - sigma;
    if d < 0.0 {
        count += 1;
    }
    for &a in &diag[1..] {
        let prev = if d == 0.0 { f64::MIN_POSITIVE } else { d };
        d = a - sigma - off * off / prev;
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of the first-component block `-d²/dx² + λ₁ - βV_p`
/// of the second variation, with an eigenvector normalized to `∫h₁² = 1`.
/// Bisection on Sylvester inertia counts, so it shares nothing with
/// [`lambda_threshold`].
pub fn first_block_minimum(p: &Params, g: Grid) -> Result<(f64, Field)> {
    let vp = make_soliton(p.lambda2, p.mu2, p.p, g).into_values();
    let inv_h2 = 1.0 / (g.spacing() * g.spacing());
    let diag: Vec<f64> = vp
        .iter()
        .map(|v| 2.0 * inv_h2 + p.lambda1 - p.beta * v)
        .collect();
    let off = -inv_h2;
    // Gershgorin bounds
    let mut lo = diag.iter().cloned().fold(f64::INFINITY, f64::min) - 2.0 * inv_h2;
    let mut hi = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + 2.0 * inv_h2;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if count_below(&diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
        if hi - lo <= 1e-14 * hi.abs().max(1.0) {
            break;
        }
    }
    let mu = 0.5 * (lo + hi);
    // eigenvector by inverse iteration just below the eigenvalue
    let shift = mu - 1e-8 * mu.abs().max(1.0);
    let t = Tridiagonal::factor(
        vec![off; g.len() - 1],
        diag.iter().map(|d| d - shift).collect(),
        vec![off; g.len() - 1],
    )?;
    let mut x = vp.clone();
    for _ in 0..3 {
        x = t.solve(&x);
        let m = max_abs(&x);
        x.iter_mut().for_each(|v| *v /= m);
    }
    let norm = g.integrate_map(&x, |v| v * v).sqrt();
    x.iter_mut().for_each(|v| *v /= norm);
    Ok((mu, Field::new(g, x)?))
}

/// Decision rule around a threshold with uncertainty `delta`.
pub fn classify_against(beta: f64, lambda: f64, delta: f64) -> Classification {
    if beta < lambda - delta {
        Classification::LocalMin
    } else if beta > lambda + delta {
        Classification::Saddle
    } else {
        Classification::Marginal
    }
}

/// Local-min / saddle status of `(0, V_p)` on the Nehari set.
pub fn classify_semitrivial(p: &Params, g: Grid) -> Result<Classification> {
    p.validate()?;
    let (report, delta) = threshold_band(p.lambda1, p.lambda2, p.mu2, p.p, g)?;
    Ok(classify_against(p.beta, report.lambda, delta))
}

/// N-component rule: saddle if some `β_j` clears its own threshold, local
/// minimum if `Σ β_j/Λ_j < 1` with margin, marginal otherwise. The margin of
/// the sum propagates each `δ_j` through `β_j/Λ_j`.
pub fn classify_sum(betas: &[f64], lambdas: &[f64], deltas: &[f64]) -> Classification {
    if betas
        .iter()
        .zip(lambdas)
        .zip(deltas)
        .any(|((b, l), d)| *b > l + d)
    {
        return Classification::Saddle;
    }
    let sum: f64 = betas.iter().zip(lambdas).map(|(b, l)| b / l).sum();
    let margin: f64 = betas
        .iter()
        .zip(lambdas)
        .zip(deltas)
        .map(|((b, l), d)| b.abs() * d / (l * l))
        .sum();
    if sum < 1.0 - margin {
        Classification::LocalMin
    } else {
        Classification::Marginal
    }
}

/// Thresholds `Λ_j` of every KdV component with their uncertainty bands.
pub fn thresholds_n(np: &NParams, g: Grid) -> Result<Vec<(ThresholdReport, f64)>> {
    np.validate()?;
    np.lambdas
        .iter()
        .map(|&l| threshold_band(np.lambda0, l, 0.5, 2.0, g))
        .collect()
}

pub fn classify_semitrivial_n(np: &NParams, g: Grid) -> Result<Classification> {
    let bands = thresholds_n(np, g)?;
    let lambdas: Vec<f64> = bands.iter().map(|b| b.0.lambda).collect();
    let deltas: Vec<f64> = bands.iter().map(|b| b.1).collect();
    Ok(classify_sum(&np.betas, &lambdas, &deltas))
}
