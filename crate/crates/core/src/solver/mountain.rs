//! Discrete mountain-pass search between two low-energy states.
//!
//! The path is a chain of Nehari-projected nodes. Each round takes the
//! highest interior node, moves it downhill orthogonally to the path
//! (Armijo step on the energy), then pushes it back up to the maximum along
//! the local path tangent. The node thus tracks the path maximum while the
//! path sinks toward the minimax level. Once its gradient is small, Newton
//! polishes it onto the saddle.

use super::{
    constrained_gradient, newton_refine, report_for, Riesz, SolveReport, SolverCfg, TracePoint,
};
use crate::error::{Error, Result};
use crate::model::{Functional, Params, State};
use crate::nehari::project_with;

/// Gradient level at which Newton polishing is first attempted.
const NEWTON_GATE: f64 = 1e-2;
const SECANT_STEPS: usize = 4;

struct Path<'a, F: Functional + ?Sized> {
    f: &'a F,
    tol: f64,
    nodes: Vec<State>,
    energies: Vec<f64>,
}

impl<'a, F: Functional + ?Sized> Path<'a, F> {
    fn project(&self, s: &State) -> Result<(State, f64)> {
        let p = project_with(self.f, &s.abs(), self.tol)?.projected;
        let e = self.f.energy(&p);
        Ok((p, e))
    }

    fn distance(&self, a: &State, b: &State) -> f64 {
        self.f.norm_sq(&a.axpy(-1.0, b)).sqrt()
    }

    fn argmax_interior(&self) -> usize {
        let mut m = 1;
        for k in 2..self.nodes.len() - 1 {
            if self.energies[k] > self.energies[m] {
                m = k;
            }
        }
        m
    }

    fn insert_midpoint(&mut self, k: usize) -> Result<()> {
        let mid = self.nodes[k].axpy(1.0, &self.nodes[k + 1]).scaled(0.5);
        let (s, e) = self.project(&mid)?;
        self.nodes.insert(k + 1, s);
        self.energies.insert(k + 1, e);
        Ok(())
    }
}

pub fn mountain_pass(
    p: &Params,
    a: &State,
    b: &State,
    cfg: &SolverCfg,
    n_nodes: usize,
) -> Result<SolveReport> {
    p.validate()?;
    mountain_pass_with(p, a, b, cfg, n_nodes)
}

pub fn mountain_pass_with<F: Functional + ?Sized>(
    f: &F,
    a: &State,
    b: &State,
    cfg: &SolverCfg,
    n_nodes: usize,
) -> Result<SolveReport> {
    cfg.validate()?;
    f.check_shape(a)?;
    f.check_shape(b)?;
    if a.grid() != b.grid() {
        return Err(Error::Shape {
            expected: "endpoints on one grid".into(),
            found: "mixed grids".into(),
        });
    }
    if n_nodes < 3 {
        return Err(Error::InvalidParams(format!(
            "path needs at least 3 nodes, got {n_nodes}"
        )));
    }
    if a.distance_max(b) == 0.0 {
        return Err(Error::PassNotFound("endpoints coincide".into()));
    }
    let g = *a.grid();
    let riesz = Riesz::new(f, &g)?;
    let mut path = Path {
        f,
        tol: cfg.nehari_tol,
        nodes: Vec::with_capacity(n_nodes),
        energies: Vec::with_capacity(n_nodes),
    };
    for k in 0..n_nodes {
        let tau = k as f64 / (n_nodes - 1) as f64;
        let (s, e) = path.project(&a.scaled(1.0 - tau).axpy(tau, b))?;
        path.nodes.push(s);
        path.energies.push(e);
    }
    let (ea, eb) = (path.energies[0], path.energies[n_nodes - 1]);
    let floor = ea.max(eb);
    let gap_tol = 1e-9 * floor.abs().max(1.0);
    let spacing = (0..n_nodes - 1)
        .map(|k| path.distance(&path.nodes[k], &path.nodes[k + 1]))
        .fold(0.0, f64::max);
    let max_nodes = 4 * n_nodes;
    let mut alpha = cfg.step0;
    let mut gate = NEWTON_GATE;
    let mut trace = Vec::new();

    for it in 1..=cfg.max_iters {
        let m = path.argmax_interior();
        let (s, e) = (path.nodes[m].clone(), path.energies[m]);
        if e <= floor + gap_tol {
            return Err(Error::PassNotFound(format!(
                "path maximum {e} does not clear the endpoint level {floor}"
            )));
        }
        let grad = constrained_gradient(f, &riesz, &s);
        trace.push(TracePoint {
            iteration: it,
            energy: e,
            grad_norm: grad.max_norm,
        });
        if grad.max_norm < gate {
            if let Some(state) = polish_saddle(
                f,
                &riesz,
                cfg,
                &s,
                floor + gap_tol,
                &path.nodes[0],
                path.nodes.last().unwrap(),
            ) {
                return Ok(report_for(f, &riesz, state, it, trace));
            }
            gate *= 0.1;
        }

        // unit tangent of the path at m, inside the tangent space of the constraint
        let psi = f.nehari_gradient(&s);
        let normal = riesz.apply(&psi);
        let chord = path.nodes[m + 1].axpy(-1.0, &path.nodes[m - 1]);
        let nn = psi.l2_pairing(&normal);
        let chord = chord.axpy(-chord.l2_pairing(&psi) / nn, &normal);
        let len = f.norm_sq(&chord).sqrt();
        if !(len > 0.0) {
            return Err(Error::PassNotFound("path folded onto itself".into()));
        }
        let tau = chord.scaled(1.0 / len);
        let slope = grad.residual.l2_pairing(&tau);

        // downhill across the path
        let across = grad.tangent.axpy(-slope, &tau);
        let across_sq = (grad.norm_sq - slope * slope).max(0.0);
        let mut step = alpha;
        let mut moved = (s.clone(), e);
        while step >= 1e-14 {
            if let Ok((ts, te)) = path.project(&s.axpy(-step, &across)) {
                if te <= e - cfg.armijo * step * across_sq {
                    moved = (ts, te);
                    alpha = (2.0 * step).min(4.0 * cfg.step0);
                    break;
                }
            }
            step *= 0.5;
        }

        // back up to the maximum along the tangent (secant on the slope)
        let reach = 0.5
            * path
                .distance(&path.nodes[m - 1], &moved.0)
                .min(path.distance(&moved.0, &path.nodes[m + 1]));
        let base = moved.0.clone();
        let slope_at = |sigma: f64| -> Option<(State, f64, f64)> {
            let (ts, te) = path.project(&base.axpy(sigma, &tau)).ok()?;
            let r = f.residual(&ts);
            Some((ts.clone(), te, r.l2_pairing(&tau)))
        };
        let (mut s0, mut d0) = (0.0, f.residual(&base).l2_pairing(&tau));
        let mut s1 = (alpha * d0).clamp(-reach, reach);
        let mut best = moved;
        for _ in 0..SECANT_STEPS {
            let Some((ts, te, d1)) = slope_at(s1) else {
                break;
            };
            if te > best.1 {
                best = (ts, te);
            }
            if d1 == d0 {
                break;
            }
            let next = (s1 - d1 * (s1 - s0) / (d1 - d0)).clamp(-reach, reach);
            s0 = s1;
            d0 = d1;
            s1 = next;
            if (s1 - s0).abs() <= 1e-12 * reach.max(1e-300) {
                break;
            }
        }
        path.nodes[m] = best.0;
        path.energies[m] = best.1;

        // keep the path resolved around the moving node
        if path.nodes.len() < max_nodes
            && path.distance(&path.nodes[m], &path.nodes[m + 1]) > 2.0 * spacing
        {
            path.insert_midpoint(m)?;
        }
        if path.nodes.len() < max_nodes
            && path.distance(&path.nodes[m - 1], &path.nodes[m]) > 2.0 * spacing
        {
            path.insert_midpoint(m - 1)?;
        }
    }
    Err(Error::PassNotFound(format!(
        "no saddle after {} iterations (last gradient {:e})",
        cfg.max_iters,
        trace.last().map_or(f64::NAN, |t: &TracePoint| t.grad_norm)
    )))
}

/// Newton from the path maximum; accepted only if it is a positive
/// critical point strictly above both endpoints.
fn polish_saddle<F: Functional + ?Sized>(
    f: &F,
    riesz: &Riesz,
    cfg: &SolverCfg,
    s: &State,
    level: f64,
    a: &State,
    b: &State,
) -> Option<State> {
    let out = newton_refine(f, s, 50).ok()?;
    let state = project_with(f, &out.state, cfg.nehari_tol).ok()?.projected;
    let flags = super::classify_solution(&state, state.grid());
    if !(flags.positive && !flags.semitrivial) {
        return None;
    }
    if f.energy(&state) <= level {
        return None;
    }
    let scale = state.max_abs();
    if state.distance_max(a) <= 1e-6 * scale || state.distance_max(b) <= 1e-6 * scale {
        return None;
    }
    let grad = constrained_gradient(f, riesz, &state);
    (grad.max_norm < cfg.grad_tol).then_some(state)
}
