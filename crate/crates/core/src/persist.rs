//! Solution files: `{grid: {L, N}, params, components, report}` as JSON.
//! Floats are written in shortest round-trip form, so a reloaded state is
//! bit-identical to the one saved.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::model::{Functional, NParams, Params, State};
use crate::nehari::nehari_defect;
use crate::solver::{Flags, SolveReport, TracePoint};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ModelParams {
    Two(Params),
    Many(NParams),
}

impl ModelParams {
    pub fn functional(&self) -> &dyn Functional {
        match self {
            ModelParams::Two(p) => p,
            ModelParams::Many(np) => np,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ModelParams::Two(p) => p.validate(),
            ModelParams::Many(np) => np.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub energy: f64,
    pub nehari_defect: f64,
    pub grad_norm: f64,
    pub flags: Flags,
    pub iterations: usize,
    pub trace: Vec<TracePoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub grid: Grid,
    pub params: ModelParams,
    pub components: Vec<Vec<f64>>,
    pub report: ReportMeta,
}

impl SolutionFile {
    pub fn new(params: ModelParams, report: &SolveReport) -> Self {
        SolutionFile {
            grid: *report.state.grid(),
            params,
            components: report.state.components().to_vec(),
            report: ReportMeta {
                energy: report.energy,
                nehari_defect: report.nehari_defect,
                grad_norm: report.grad_norm,
                flags: report.flags,
                iterations: report.iterations,
                trace: report.trace.clone(),
            },
        }
    }

    /// The stored state, with grid and shape re-validated.
    pub fn state(&self) -> Result<State> {
        let g = Grid::new(self.grid.half_width(), self.grid.len())?;
        let s = State::new(g, self.components.clone())?;
        self.params.functional().check_shape(&s)?;
        Ok(s)
    }

    /// Energy and relative Nehari defect recomputed from the stored arrays.
    pub fn reevaluate(&self) -> Result<(f64, f64)> {
        self.params.validate()?;
        let s = self.state()?;
        let f = self.params.functional();
        Ok((f.energy(&s), nehari_defect(f, &s)))
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Persist(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: SolutionFile =
            serde_json::from_str(text).map_err(|e| Error::Persist(e.to_string()))?;
        file.params.validate()?;
        file.state()?;
        Ok(file)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)
            .map_err(|e| Error::Persist(format!("{}: {e}", path.display())))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Persist(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}
