//! Scan of the explicit family `u_β`: closed-form peaks and energies next to
//! quadrature energies and a Newton-refined discrete solution.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{newton_refine, Riesz, SolverCfg};
use crate::closedform::{closed_energy_ubeta, closed_energy_v2, explicit_family};
use crate::error::{Error, Result};
use crate::grid::{max_abs, Grid};
use crate::model::energy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub beta: f64,
    pub lambda2: f64,
    pub u_peak: f64,
    pub v_peak: f64,
    pub e_quad: f64,
    pub e_closed: f64,
    /// `Φ(0, V₂)` at this row's `λ₂`, closed form.
    pub e_semitrivial: f64,
    /// Constrained-gradient norm of the refined state.
    pub refined_residual: Option<f64>,
    /// Max-norm distance between the refined and the sampled state.
    pub refined_gap: Option<f64>,
    pub refined_u_peak: Option<f64>,
    pub error: Option<String>,
}

/// One row per `β`, in input order; rows are computed in parallel. A failed
/// refinement is recorded in its row and does not stop the scan.
pub fn bifurcation_scan(
    lambda1: f64,
    betas: &[f64],
    g: Grid,
    cfg: &SolverCfg,
) -> Result<Vec<ScanRow>> {
    cfg.validate()?;
    if betas.is_empty() {
        return Err(Error::InvalidParams("empty beta list".into()));
    }
    // validate every row up front so range errors are not buried in rows
    for &b in betas {
        explicit_family(lambda1, b, Grid::new(1.0, 3)?)?;
    }
    Ok(betas
        .par_iter()
        .map(|&beta| scan_row(lambda1, beta, g))
        .collect())
}

fn scan_row(lambda1: f64, beta: f64, g: Grid) -> ScanRow {
    let pt = explicit_family(lambda1, beta, g).expect("validated");
    let p = pt.params();
    let mut row = ScanRow {
        beta,
        lambda2: pt.lambda2,
        u_peak: max_abs(pt.state.component(0)),
        v_peak: max_abs(pt.state.component(1)),
        e_quad: energy(&p, &pt.state),
        e_closed: closed_energy_ubeta(lambda1, beta).expect("validated"),
        e_semitrivial: closed_energy_v2(pt.lambda2),
        refined_residual: None,
        refined_gap: None,
        refined_u_peak: None,
        error: None,
    };
    let refined = Riesz::new(&p, &g).and_then(|riesz| {
        let out = newton_refine(&p, &pt.state, 40)?;
        let grad = super::constrained_gradient(&p, &riesz, &out.state);
        Ok((out.state, grad.max_norm))
    });
    match refined {
        Ok((s, gn)) => {
            row.refined_residual = Some(gn);
            row.refined_gap = Some(s.distance_max(&pt.state));
            row.refined_u_peak = Some(max_abs(s.component(0)));
        }
        Err(e) => row.error = Some(e.to_string()),
    }
    row
}
