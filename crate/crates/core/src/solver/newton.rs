//! Newton's method for `residual(s) = 0` restricted to even states.
//!
//! Working on the half grid `x ≥ 0` (reflection at the center node) removes
//! the odd translation mode, which makes the Jacobian of a translation
//! invariant problem nearly singular on the full grid.

use crate::error::{Error, Result};
use crate::linalg::Banded;
use crate::model::{Functional, State};

#[derive(Debug, Clone)]
pub struct NewtonOutcome {
    pub state: State,
    pub iterations: usize,
    /// Max-norm of the final Newton update.
    pub last_step: f64,
}

fn mirror(half: &[f64], n_full: usize, c: usize) -> Vec<f64> {
    let mut full = vec![0.0; n_full];
    for (j, &v) in half.iter().enumerate() {
        full[c + j] = v;
        full[c - j] = v;
    }
    full
}

/// Refines an (approximately) even state to a discrete critical point.
/// The input is replaced by its even part first.
pub fn newton_refine<F: Functional + ?Sized>(
    f: &F,
    s0: &State,
    max_iters: usize,
) -> Result<NewtonOutcome> {
    f.check_shape(s0)?;
    let g = *s0.grid();
    let n = s0.n_components();
    let c = g.center();
    let m = g.len() - c;
    let inv_h2 = 1.0 / (g.spacing() * g.spacing());
    let mut half: Vec<Vec<f64>> = s0
        .even_part()
        .components()
        .iter()
        .map(|comp| comp[c..].to_vec())
        .collect();
    let mut jac = vec![0.0; n * n];
    let mut last_step = f64::INFINITY;
    for it in 1..=max_iters {
        let state = State::from_parts(g, half.iter().map(|h| mirror(h, g.len(), c)).collect());
        let r = f.residual(&state);
        let mut mat = Banded::zeros(n * m, n, n);
        let mut rhs = vec![0.0; n * m];
        for j in 0..m {
            f.local_jacobian(&state, c + j, &mut jac);
            for a in 0..n {
                let row = j * n + a;
                rhs[row] = r.component(a)[c + j];
                mat.add(row, row, 2.0 * inv_h2 + f.lambda(a));
                if j + 1 < m {
                    let w = if j == 0 { 2.0 } else { 1.0 };
                    mat.add(row, row + n, -w * inv_h2);
                }
                if j > 0 {
                    mat.add(row, row - n, -inv_h2);
                }
                for b in 0..n {
                    mat.add(row, j * n + b, jac[a * n + b]);
                }
            }
        }
        mat.factor()?;
        let delta = mat.solve(&rhs);
        let step = delta.iter().fold(0.0_f64, |acc, d| acc.max(d.abs()));
        if !step.is_finite() {
            return Err(Error::Singular("non-finite Newton update".into()));
        }
        for j in 0..m {
            for a in 0..n {
                half[a][j] -= delta[j * n + a];
            }
        }
        let scale = half
            .iter()
            .flat_map(|h| h.iter())
            .fold(1.0_f64, |acc, v| acc.max(v.abs()));
        if step > 1e3 * scale {
            return Err(Error::Singular(format!("Newton update {step:e} diverged")));
        }
        // stop at roundoff: tiny update, or small updates no longer shrinking
        let stalled = it > 3 && step <= 1e-9 * scale && step >= 0.5 * last_step;
        last_step = step;
        if step <= 1e-13 * scale || stalled {
            let state = State::new(g, half.iter().map(|h| mirror(h, g.len(), c)).collect())?;
            return Ok(NewtonOutcome {
                state,
                iterations: it,
                last_step,
            });
        }
    }
    Err(Error::Singular(format!(
        "Newton did not settle in {max_iters} iterations (last update {last_step:e})"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closedform::{explicit_family, make_soliton};
    use crate::grid::Grid;
    use crate::model::Params;

    #[test]
    fn refines_decoupled_pair() {
        let g = Grid::new(20.0, 2001).unwrap();
        let p = Params::cubic_quadratic(1.0, 1.0, 0.0).unwrap();
        let s = State::new(
            g,
            vec![
                make_soliton(1.0, 1.0, 3.0, g).into_values(),
                make_soliton(1.0, 0.5, 2.0, g).into_values(),
            ],
        )
        .unwrap();
        let out = newton_refine(&p, &s, 30).unwrap();
        let r = p.residual(&out.state);
        assert!(r.max_abs() < 1e-8, "{}", r.max_abs());
        // discrete and continuous solutions differ by O(h²)
        assert!(out.state.distance_max(&s) < 1e-3);
    }

    #[test]
    fn refines_explicit_family_member() {
        let g = Grid::new(20.0, 2001).unwrap();
        let pt = explicit_family(1.0, 0.1, g).unwrap();
        let out = newton_refine(&pt.params(), &pt.state, 30).unwrap();
        assert!(pt.params().residual(&out.state).max_abs() < 1e-7);
        assert!(out.state.distance_max(&pt.state) < 1e-2);
    }
}
