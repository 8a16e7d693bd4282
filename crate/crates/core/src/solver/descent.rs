//! Ground states by steepest descent on the Nehari set.
//!
//! Each iterate is kept nonnegative (componentwise modulus), periodically
//! rearranged, and dilated back onto the constraint. Steps follow the
//! constrained gradient in the energy norm, so the step length needed does
//! not shrink with the mesh. Once the gradient is small, Newton finishes the
//! job: it converges quadratically where energy-based line searches are
//! stuck at roundoff.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{
    constrained_gradient, newton_refine, report_for, Riesz, SolveReport, SolverCfg, TracePoint,
};
use crate::closedform::{make_soliton, soliton_value};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{Functional, NParams, Params, State};
use crate::nehari::{project_with, symmetrize};

/// Smallest Armijo step tried before a seed counts as stalled.
const MIN_STEP: f64 = 1e-14;
/// Relative energy gap by which an unconverged run must undercut the best
/// converged one before the latter is rejected.
const NOT_MINIMAL_MARGIN: f64 = 1e-8;

struct SeedRun {
    state: State,
    energy: f64,
    grad_norm: f64,
    iterations: usize,
    trace: Vec<TracePoint>,
    converged: bool,
}

fn project_abs<F: Functional + ?Sized>(f: &F, s: &State, tol: f64) -> Result<(State, f64)> {
    let p = project_with(f, &s.abs(), tol)?.projected;
    let e = f.energy(&p);
    Ok((p, e))
}

/// Roundoff-level energy slack for monotonicity checks.
fn energy_slack(e: f64) -> f64 {
    1e-13 * e.abs().max(1.0)
}

fn run_seed<F: Functional + ?Sized>(
    f: &F,
    riesz: &Riesz,
    cfg: &SolverCfg,
    seed: &State,
) -> Result<SeedRun> {
    let (mut s, mut e) = project_abs(f, seed, cfg.nehari_tol)?;
    let mut trace = Vec::new();
    let mut alpha = cfg.step0;
    let max_step = 4.0 * cfg.step0;
    let mut polish_gate = cfg.polish_below;
    let mut last_norm = f64::INFINITY;
    for it in 1..=cfg.max_iters {
        if it % cfg.symmetrize_every == 0 {
            // rearrangement is accepted only when it does not raise the energy
            if let Ok(sym) = symmetrize(&s) {
                if let Ok((ps, pe)) = project_abs(f, &sym, cfg.nehari_tol) {
                    if pe <= e {
                        s = ps;
                        e = pe;
                    }
                }
            }
        }
        let grad = constrained_gradient(f, riesz, &s);
        last_norm = grad.max_norm;
        trace.push(TracePoint {
            iteration: it,
            energy: e,
            grad_norm: grad.max_norm,
        });
        if grad.max_norm < cfg.grad_tol {
            return Ok(SeedRun {
                state: s,
                energy: e,
                grad_norm: grad.max_norm,
                iterations: it,
                trace,
                converged: true,
            });
        }
        if grad.max_norm < polish_gate {
            if let Some((ps, pe, gn)) = polish(f, riesz, cfg, &s, e) {
                trace.push(TracePoint {
                    iteration: it,
                    energy: pe,
                    grad_norm: gn,
                });
                return Ok(SeedRun {
                    state: ps,
                    energy: pe,
                    grad_norm: gn,
                    iterations: it,
                    trace,
                    converged: true,
                });
            }
            polish_gate *= 0.1;
        }
        let mut a = alpha;
        let accepted = loop {
            let trial = s.axpy(-a, &grad.tangent);
            if let Ok((ts, te)) = project_abs(f, &trial, cfg.nehari_tol) {
                if te <= e - cfg.armijo * a * grad.norm_sq {
                    break Some((ts, te, a));
                }
            }
            a *= 0.5;
            if a < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some((ts, te, a)) => {
                s = ts;
                e = te;
                alpha = (2.0 * a).min(max_step);
            }
            None => break,
        }
    }
    Ok(SeedRun {
        state: s,
        energy: e,
        grad_norm: last_norm,
        iterations: trace.len(),
        trace,
        converged: false,
    })
}

/// Newton from a near-critical descent iterate. Accepted only if it lands
/// on a nonnegative critical point without raising the energy.
fn polish<F: Functional + ?Sized>(
    f: &F,
    riesz: &Riesz,
    cfg: &SolverCfg,
    s: &State,
    e: f64,
) -> Option<(State, f64, f64)> {
    let start = symmetrize(s).ok().unwrap_or_else(|| s.even_part());
    let out = newton_refine(f, &start, 50).ok()?;
    let floor = -1e-12 * out.state.max_abs();
    if out
        .state
        .components()
        .iter()
        .any(|c| c.iter().any(|&v| v < floor))
    {
        return None;
    }
    let (ps, pe) = project_abs(f, &out.state, cfg.nehari_tol).ok()?;
    if pe > e + energy_slack(e) {
        return None;
    }
    let grad = constrained_gradient(f, riesz, &ps);
    (grad.max_norm < cfg.grad_tol).then_some((ps, pe, grad.max_norm))
}

/// Nehari-constrained minimization from every seed; returns the converged
/// run of lowest energy.
pub fn ground_state_with<F: Functional + ?Sized>(
    f: &F,
    cfg: &SolverCfg,
    seeds: &[State],
) -> Result<SolveReport> {
    cfg.validate()?;
    let first = seeds.first().ok_or_else(|| {
        Error::InvalidParams("ground state search needs at least one seed".into())
    })?;
    for s in seeds {
        f.check_shape(s)?;
        if s.grid() != first.grid() {
            return Err(Error::Shape {
                expected: "seeds on one grid".into(),
                found: "mixed grids".into(),
            });
        }
    }
    let riesz = Riesz::new(f, first.grid())?;
    let mut best: Option<SeedRun> = None;
    let mut best_failed: Option<SeedRun> = None;
    let mut lowest_failed: Option<(f64, Vec<TracePoint>)> = None;
    let mut total_iters = 0;
    for seed in seeds {
        let run = run_seed(f, &riesz, cfg, seed)?;
        total_iters += run.iterations;
        if run.converged {
            if best.as_ref().is_none_or(|b| run.energy < b.energy) {
                best = Some(run);
            }
        } else {
            if lowest_failed.as_ref().is_none_or(|(e, _)| run.energy < *e) {
                lowest_failed = Some((run.energy, run.trace.clone()));
            }
            if best_failed
                .as_ref()
                .is_none_or(|b| run.grad_norm < b.grad_norm)
            {
                best_failed = Some(run);
            }
        }
    }
    match best {
        // an unconverged descent that got lower on the Nehari set shows the
        // converged state is not a minimizer
        Some(run) => match lowest_failed {
            Some((low, trace)) if low < run.energy - NOT_MINIMAL_MARGIN * run.energy.abs() => {
                Err(Error::NotMinimal {
                    converged: run.energy,
                    reached: low,
                    trace,
                })
            }
            _ => Ok(report_for(f, &riesz, run.state, run.iterations, run.trace)),
        },
        None => {
            let run = best_failed.expect("at least one seed ran");
            Err(Error::NonConvergence {
                best_grad_norm: run.grad_norm,
                iterations: total_iters,
                trace: run.trace,
            })
        }
    }
}

pub fn ground_state(p: &Params, cfg: &SolverCfg, seeds: &[State]) -> Result<SolveReport> {
    p.validate()?;
    ground_state_with(p, cfg, seeds)
}

pub fn ground_state_n(np: &NParams, cfg: &SolverCfg, seeds: &[State]) -> Result<SolveReport> {
    np.validate()?;
    ground_state_with(np, cfg, seeds)
}

/// Positive even bump `a·exp(-x²/(2w²))` with random amplitude and width.
fn random_bump(rng: &mut ChaCha8Rng, g: Grid, lambda: f64) -> Vec<f64> {
    let a: f64 = rng.gen_range(0.5..2.0) * lambda;
    let w: f64 = rng.gen_range(0.5..2.0) / lambda.sqrt();
    g.sample(|x| a * (-0.5 * (x / w).powi(2)).exp())
}

/// `(U_q, V_p)`, the diagonal `(V_p, V_p)`, and a random even bump.
pub fn default_seeds(p: &Params, g: Grid, seed: u64) -> Vec<State> {
    let uq = make_soliton(p.lambda1, p.mu1, p.q, g).into_values();
    let vp = make_soliton(p.lambda2, p.mu2, p.p, g).into_values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bump = vec![
        random_bump(&mut rng, g, p.lambda1),
        random_bump(&mut rng, g, p.lambda2),
    ];
    vec![
        State::from_parts(g, vec![uq, vp.clone()]),
        State::from_parts(g, vec![vp.clone(), vp]),
        State::from_parts(g, bump),
    ]
}

/// N-component analogues: `(U, V₁*, …)`, the first KdV soliton copied into
/// every slot, and a random even bump.
pub fn default_seeds_n(np: &NParams, g: Grid, seed: u64) -> Vec<State> {
    let n = np.n_components();
    let solitons: Vec<Vec<f64>> = (1..n)
        .map(|j| g.sample(|x| soliton_value(np.lambda(j), 0.5, 2.0, x)))
        .collect();
    let u = make_soliton(np.lambda0, 1.0, 3.0, g).into_values();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut first = vec![u];
    first.extend(solitons.iter().cloned());
    let diag = vec![solitons[0].clone(); n];
    let bump = (0..n)
        .map(|j| random_bump(&mut rng, g, np.lambda(j)))
        .collect();
    vec![
        State::from_parts(g, first),
        State::from_parts(g, diag),
        State::from_parts(g, bump),
    ]
}
