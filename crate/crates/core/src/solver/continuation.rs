//! Bound states near the decoupled pair `(U_q, V_p)`, continued in the
//! coupling `β = ε·β̃` by Newton steps with a secant predictor.

use super::{newton_refine, report_for, Riesz, SolveReport, SolverCfg, TracePoint};
use crate::closedform::make_soliton;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{Params, State};

/// Interval halvings allowed between two scheduled values of `ε`.
const MAX_HALVINGS: usize = 8;
const NEWTON_ITERS: usize = 40;

fn decoupled(p: &Params, g: Grid) -> State {
    State::from_parts(
        g,
        vec![
            make_soliton(p.lambda1, p.mu1, p.q, g).into_values(),
            make_soliton(p.lambda2, p.mu2, p.p, g).into_values(),
        ],
    )
}

/// Reports at every scheduled `ε` (coupling `ε·base.beta`), starting from
/// `(U_q, V_p)`. At `ε = 0` the closed-form pair itself is reported.
pub fn continuation_branch(
    base: &Params,
    g: Grid,
    cfg: &SolverCfg,
    schedule: &[f64],
) -> Result<Vec<(f64, SolveReport)>> {
    base.validate()?;
    cfg.validate()?;
    if schedule.is_empty() {
        return Err(Error::InvalidParams("empty continuation schedule".into()));
    }
    if schedule.iter().any(|e| !(e.is_finite() && *e >= 0.0))
        || schedule.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::InvalidParams(
            "continuation schedule must be nonnegative and increasing".into(),
        ));
    }
    let mut out = Vec::with_capacity(schedule.len());
    // last two converged points, for the secant predictor
    let mut prev: Option<(f64, State)> = None;
    let mut last = (0.0, decoupled(base, g));
    let mut trace = Vec::new();
    let mut iterations = 0;
    let mut last_good: Option<f64> = None;
    for &target in schedule {
        if target == 0.0 {
            let p0 = base.with_beta(0.0);
            let riesz = Riesz::new(&p0, &g)?;
            out.push((0.0, report_for(&p0, &riesz, last.1.clone(), 0, Vec::new())));
            last_good = Some(0.0);
            continue;
        }
        let mut halvings = 0;
        while last.0 < target {
            let step_target = {
                let remaining = target - last.0;
                let h = remaining / 2f64.powi(halvings as i32);
                if halvings == 0 {
                    target
                } else {
                    last.0 + h
                }
            };
            let p = base.with_beta(step_target * base.beta);
            let guess = match &prev {
                Some((e0, s0)) if last.0 > *e0 => {
                    let w = (step_target - last.0) / (last.0 - e0);
                    last.1.axpy(w, &last.1.axpy(-1.0, s0))
                }
                _ => last.1.clone(),
            };
            match newton_refine(&p, &guess, NEWTON_ITERS) {
                Ok(res) => {
                    iterations += res.iterations;
                    let riesz = Riesz::new(&p, &g)?;
                    let grad = super::constrained_gradient(&p, &riesz, &res.state);
                    trace.push(TracePoint {
                        iteration: iterations,
                        energy: crate::model::energy(&p, &res.state),
                        grad_norm: grad.max_norm,
                    });
                    prev = Some(std::mem::replace(&mut last, (step_target, res.state)));
                    last_good = Some(step_target);
                    halvings = 0;
                }
                Err(e) => {
                    halvings += 1;
                    if halvings > MAX_HALVINGS {
                        return Err(Error::ContinuationFailure {
                            failed_eps: step_target,
                            last_good_eps: last_good,
                            reason: e.to_string(),
                        });
                    }
                }
            }
        }
        let p = base.with_beta(target * base.beta);
        let riesz = Riesz::new(&p, &g)?;
        let report = report_for(&p, &riesz, last.1.clone(), iterations, trace.clone());
        if !(report.grad_norm < cfg.grad_tol) {
            return Err(Error::ContinuationFailure {
                failed_eps: target,
                last_good_eps: last_good,
                reason: format!(
                    "gradient {:e} above tolerance {:e}",
                    report.grad_norm, cfg.grad_tol
                ),
            });
        }
        out.push((target, report));
    }
    Ok(out)
}

/// The bound state at the last scheduled `ε`.
pub fn continue_from_decoupled(
    base: &Params,
    g: Grid,
    cfg: &SolverCfg,
    schedule: &[f64],
) -> Result<SolveReport> {
    let mut branch = continuation_branch(base, g, cfg, schedule)?;
    Ok(branch.pop().expect("schedule is nonempty").1)
}
