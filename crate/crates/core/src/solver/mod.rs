//! Solvers for bound states: Nehari-constrained descent for ground states,
//! Newton refinement and continuation for perturbative states, a discrete
//! mountain-pass search, and scans over explicit families.

mod continuation;
mod descent;
mod diagonal;
mod mountain;
mod newton;
mod scan;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{max_abs, Grid};
use crate::linalg::Tridiagonal;
use crate::model::{Functional, State};

pub use continuation::{continuation_branch, continue_from_decoupled};
pub use descent::{
    default_seeds, default_seeds_n, ground_state, ground_state_n, ground_state_with,
};
pub use diagonal::{diag_compare, diag_gap, diag_seed_t};
pub use mountain::{mountain_pass, mountain_pass_with};
pub use newton::{newton_refine, NewtonOutcome};
pub use scan::{bifurcation_scan, ScanRow};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverCfg {
    pub max_iters: usize,
    /// Max-norm of the constrained gradient (Riesz representative in the
    /// energy norm) at which a state counts as critical.
    pub grad_tol: f64,
    /// Relative Nehari defect `|Ψ|/‖s‖²` accepted after projections.
    pub nehari_tol: f64,
    pub step0: f64,
    pub armijo: f64,
    pub symmetrize_every: usize,
    /// Constrained-gradient level below which Newton polishing is attempted.
    pub polish_below: f64,
    pub seed: u64,
}

impl Default for SolverCfg {
    fn default() -> Self {
        SolverCfg {
            max_iters: 5000,
            grad_tol: 1e-8,
            nehari_tol: 1e-10,
            step0: 1.0,
            armijo: 1e-4,
            symmetrize_every: 10,
            polish_below: 1e-4,
            seed: 0,
        }
    }
}

impl SolverCfg {
    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::InvalidParams(format!("solver config: {what}")));
        if self.max_iters == 0 {
            return bad("max_iters must be positive");
        }
        for (name, v) in [
            ("grad_tol", self.grad_tol),
            ("nehari_tol", self.nehari_tol),
            ("step0", self.step0),
            ("polish_below", self.polish_below),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return bad(&format!("{name} must be positive, got {v}"));
            }
        }
        if !(self.armijo > 0.0 && self.armijo < 1.0) {
            return bad(&format!("armijo must lie in (0, 1), got {}", self.armijo));
        }
        if self.symmetrize_every == 0 {
            return bad("symmetrize_every must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Flags {
    pub positive: bool,
    pub even: bool,
    pub nontrivial: bool,
    pub semitrivial: bool,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub state: State,
    pub energy: f64,
    pub nehari_defect: f64,
    pub grad_norm: f64,
    pub flags: Flags,
    pub iterations: usize,
    pub trace: Vec<TracePoint>,
}

/// Default tolerance of [`classify_solution`].
pub const CLASSIFY_TOL: f64 = 1e-6;

/// Certifies positivity, evenness, and (semi)triviality of a state.
pub fn classify_solution(s: &State, g: &Grid) -> Flags {
    classify_solution_with(s, g, CLASSIFY_TOL)
}

pub fn classify_solution_with(s: &State, g: &Grid, tol: f64) -> Flags {
    let norms: Vec<f64> = (0..s.n_components())
        .map(|j| g.integrate_map(s.component(j), |v| v * v).sqrt())
        .collect();
    let nontrivial = norms.iter().any(|&n| n > tol);
    let semitrivial = nontrivial && norms.iter().any(|&n| n <= tol);
    let even = s.components().iter().all(|c| {
        let n = c.len();
        let scale = max_abs(c);
        (0..n).all(|i| (c[i] - c[n - 1 - i]).abs() <= tol * scale)
    });
    let positive = nontrivial && s.components().iter().all(|c| positive_component(c, g, tol));
    Flags {
        positive,
        even,
        nontrivial,
        semitrivial,
    }
}

/// Strictly positive on the centered interval holding 99% of `∫f²`, and no
/// negative value below roundoff (`tol²` of the peak) anywhere.
fn positive_component(c: &[f64], g: &Grid, tol: f64) -> bool {
    let peak = max_abs(c);
    if peak == 0.0 || c.iter().any(|&v| v < -tol * tol * peak) {
        return false;
    }
    let total = g.integrate_map(c, |v| v * v);
    let mid = g.center();
    let mut acc = c[mid] * c[mid];
    let mut k = 0;
    while acc * g.spacing() < 0.99 * total && k < mid {
        k += 1;
        acc += c[mid + k] * c[mid + k] + c[mid - k] * c[mid - k];
    }
    c[mid - k..=mid + k].iter().all(|&v| v > 0.0)
}

/// Riesz map of the energy inner product: `g_j = (-d²/dx² + λ_j)⁻¹ r_j`.
pub(crate) struct Riesz {
    ops: Vec<Tridiagonal>,
}

impl Riesz {
    pub fn new<F: Functional + ?Sized>(f: &F, g: &Grid) -> Result<Self> {
        let ops = (0..f.n_components())
            .map(|j| Tridiagonal::dirichlet_operator(g, f.lambda(j)))
            .collect::<Result<_>>()?;
        Ok(Riesz { ops })
    }

    pub fn apply(&self, r: &State) -> State {
        let comps = (0..r.n_components())
            .map(|j| self.ops[j].solve(r.component(j)))
            .collect();
        State::from_parts(*r.grid(), comps)
    }
}

/// Constrained gradient at `s`: the energy-norm gradient minus its component
/// along the energy-norm gradient of `Ψ`.
pub(crate) struct Gradient {
    /// Strong-form residual (L² gradient).
    pub residual: State,
    /// Riesz representative of the constrained gradient.
    pub tangent: State,
    /// `‖tangent‖²` in the energy norm.
    pub norm_sq: f64,
    pub max_norm: f64,
}

pub(crate) fn constrained_gradient<F: Functional + ?Sized>(
    f: &F,
    riesz: &Riesz,
    s: &State,
) -> Gradient {
    let residual = f.residual(s);
    let g = riesz.apply(&residual);
    let psi = f.nehari_gradient(s);
    let n = riesz.apply(&psi);
    let nn = psi.l2_pairing(&n);
    let tangent = if nn > 0.0 {
        g.axpy(-residual.l2_pairing(&n) / nn, &n)
    } else {
        g
    };
    let norm_sq = residual.l2_pairing(&tangent).max(0.0);
    let max_norm = tangent.max_abs();
    Gradient {
        residual,
        tangent,
        norm_sq,
        max_norm,
    }
}

/// Assembles a report for a state already believed to be critical.
pub(crate) fn report_for<F: Functional + ?Sized>(
    f: &F,
    riesz: &Riesz,
    state: State,
    iterations: usize,
    trace: Vec<TracePoint>,
) -> SolveReport {
    let grad = constrained_gradient(f, riesz, &state);
    let energy = f.energy(&state);
    let flags = classify_solution(&state, state.grid());
    SolveReport {
        nehari_defect: crate::nehari::nehari_defect(f, &state),
        grad_norm: grad.max_norm,
        energy,
        flags,
        iterations,
        trace,
        state,
    }
}
