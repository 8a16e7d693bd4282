//! The Nehari constraint `Ψ(s) = 0` as a computational object: the
//! dilation onto it, the energy restricted to it, and the discrete
//! symmetric-decreasing rearrangement.

use crate::error::{Error, Result};
use crate::model::{Fibering, Functional, Params, State};

/// Default relative Nehari tolerance for projections.
pub const PROJECTION_TOL: f64 = 1e-10;

/// Default relative defect accepted by [`reduced_energy`]. Closed-form
/// samples miss the discrete constraint by `O(h²)`, so this is looser than
/// [`PROJECTION_TOL`].
pub const MANIFOLD_TOL: f64 = 1e-5;

/// Largest dilation factor tried before giving up.
pub const T_MAX: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct ProjectionResult {
    pub t: f64,
    pub projected: State,
    /// `|Ψ(t s)|`.
    pub residual: f64,
}

/// Relative defect `|Ψ(s)| / ‖s‖²` (zero for the zero state).
pub fn nehari_defect<F: Functional + ?Sized>(f: &F, s: &State) -> f64 {
    let fib = f.fibering(s);
    if fib.norm_sq == 0.0 {
        return 0.0;
    }
    fib.nehari_value(1.0).abs() / fib.norm_sq
}

/// Dilation factor `t > 0` with `Ψ(t s) = 0`.
pub fn fibering_root(fib: &Fibering) -> Result<f64> {
    let c = fib.norm_sq;
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::ProjectionFailure(format!("state has norm² {c}")));
    }
    if fib.terms.iter().all(|&(_, e)| e == 1.0 || e == 2.0) {
        let a: f64 = fib.terms.iter().filter(|t| t.1 == 2.0).map(|t| t.0).sum();
        let b: f64 = fib.terms.iter().filter(|t| t.1 == 1.0).map(|t| t.0).sum();
        return quadratic_root(a, b, c);
    }
    bracketed_root(fib)
}

/// Positive root of `a t² + b t - c = 0` with `c > 0`.
fn quadratic_root(a: f64, b: f64, c: f64) -> Result<f64> {
    let t = if a > 0.0 {
        let disc = (b * b + 4.0 * a * c).sqrt();
        // cancellation-free branch for each sign of b
        if b >= 0.0 {
            2.0 * c / (b + disc)
        } else {
            (disc - b) / (2.0 * a)
        }
    } else if a == 0.0 && b > 0.0 {
        c / b
    } else if a < 0.0 {
        let disc = b * b + 4.0 * a * c;
        if b <= 0.0 || disc < 0.0 {
            return Err(Error::ProjectionFailure(format!(
                "fibering map a={a:e}, b={b:e}, c={c:e} never crosses zero"
            )));
        }
        2.0 * c / (b + disc.sqrt())
    } else {
        return Err(Error::ProjectionFailure(format!(
            "fibering map a={a:e}, b={b:e}, c={c:e} never crosses zero"
        )));
    };
    if !(t > 0.0 && t <= T_MAX) {
        return Err(Error::ProjectionFailure(format!(
            "root t={t:e} outside (0, {T_MAX:e}]"
        )));
    }
    Ok(t)
}

/// Safeguarded Newton on `Ψ(ts)/t²`, which is positive near `t = 0`.
fn bracketed_root(fib: &Fibering) -> Result<f64> {
    let phi = |t: f64| fib.reduced(t);
    let (mut lo, mut hi) = (1.0, 1.0);
    if phi(1.0) > 0.0 {
        while phi(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > T_MAX {
                return Err(Error::ProjectionFailure(format!(
                    "no sign change of the fibering map on (0, {T_MAX:e}]"
                )));
            }
        }
    } else {
        while phi(lo) <= 0.0 {
            hi = lo;
            lo *= 0.5;
            if lo < 1e-300 {
                return Err(Error::ProjectionFailure(
                    "fibering map not positive near 0".into(),
                ));
            }
        }
    }
    let mut t = 0.5 * (lo + hi);
    for _ in 0..200 {
        let f = phi(t);
        if f == 0.0 {
            return Ok(t);
        }
        if f > 0.0 {
            lo = t;
        } else {
            hi = t;
        }
        let d = fib.reduced_derivative(t);
        if d != 0.0 && (f / d).abs() <= f64::EPSILON * t {
            return Ok(t);
        }
        if hi - lo <= 4.0 * f64::EPSILON * hi {
            break;
        }
        let newton = t - f / d;
        t = if d != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
    }
    Ok(t)
}

/// Projection onto the Nehari set along the ray through `s`, for any model.
pub fn project_with<F: Functional + ?Sized>(
    f: &F,
    s: &State,
    tol: f64,
) -> Result<ProjectionResult> {
    f.check_shape(s)?;
    if s.is_zero() {
        return Err(Error::ProjectionFailure(
            "cannot project the zero state".into(),
        ));
    }
    let fib = f.fibering(s);
    let t = fibering_root(&fib)?;
    let projected = s.scaled(t);
    let pfib = f.fibering(&projected);
    let residual = pfib.nehari_value(1.0).abs();
    if residual > tol * pfib.norm_sq {
        return Err(Error::ProjectionFailure(format!(
            "relative defect {:e} after projection exceeds {tol:e}",
            residual / pfib.norm_sq
        )));
    }
    Ok(ProjectionResult {
        t,
        projected,
        residual,
    })
}

pub fn project(p: &Params, s: &State) -> Result<ProjectionResult> {
    project_with(p, s, PROJECTION_TOL)
}

/// Energy on the Nehari set, `Φ - ⅓Ψ`; for the cubic–quadratic system this
/// is `1/6‖s‖² + 1/12∫u⁴`.
pub fn reduced_energy_with<F: Functional + ?Sized>(f: &F, s: &State, tol: f64) -> Result<f64> {
    f.check_shape(s)?;
    let fib = f.fibering(s);
    let defect = if fib.norm_sq > 0.0 {
        fib.nehari_value(1.0).abs() / fib.norm_sq
    } else {
        0.0
    };
    if defect > tol {
        return Err(Error::NotOnManifold { defect, tol });
    }
    Ok(fib.reduced_energy())
}

pub fn reduced_energy(p: &Params, s: &State) -> Result<f64> {
    reduced_energy_with(p, s, MANIFOLD_TOL)
}

/// Node order of the rearrangement: center, then right before left.
fn placement(n: usize) -> Vec<usize> {
    let c = (n - 1) / 2;
    let mut order = Vec::with_capacity(n);
    order.push(c);
    for k in 1..=c {
        order.push(c + k);
        order.push(c - k);
    }
    order
}

/// Symmetric-decreasing rearrangement of every component: values sorted in
/// decreasing order fill the nodes outward from the center.
pub fn symmetrize(s: &State) -> Result<State> {
    let n = s.grid().len();
    for j in 0..s.n_components() {
        if let Some((i, &v)) = s.component(j).iter().enumerate().find(|(_, v)| **v < 0.0) {
            return Err(Error::RearrangementDomain {
                component: j,
                index: i,
                value: v,
            });
        }
    }
    let order = placement(n);
    Ok(s.map_components(|c| {
        let mut sorted = c.to_vec();
        // stable, so equal values keep their relative order
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut out = vec![0.0; n];
        for (&slot, v) in order.iter().zip(sorted) {
            out[slot] = v;
        }
        out
    }))
}
