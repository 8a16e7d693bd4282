//! `nlskdv`: solves, scans, and checks for stationary NLS–KdV systems.
//!
//! Exit codes: 0 success, 1 invalid input, 2 solver failure, 3 failed
//! verification.

mod verify;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nlskdv::closedform::{closed_energy_v2, make_soliton};
use nlskdv::grid::default_half_width;
use nlskdv::model::wave_to_params;
use nlskdv::persist::{ModelParams, SolutionFile};
use nlskdv::solver::{
    bifurcation_scan, default_seeds, default_seeds_n, diag_compare, diag_gap, ground_state,
    ground_state_n, mountain_pass, ScanRow, TracePoint,
};
use nlskdv::spectra::{classify_against, classify_sum, threshold_band, thresholds_n};
use nlskdv::{Functional, Grid, NParams, Params, SolveReport, SolverCfg, State};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Core(#[from] nlskdv::Error),
    #[error("{0}")]
    Usage(String),
    #[error("cannot write {path}: {source}")]
    Output { path: String, source: io::Error },
    #[error("{0}")]
    Solver(String),
    #[error("{0} verification check(s) failed")]
    Verify(usize),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_validation() => 1,
            CliError::Core(_) | CliError::Solver(_) => 2,
            CliError::Usage(_) | CliError::Output { .. } => 1,
            CliError::Verify(_) => 3,
        }
    }
}

type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(
    name = "nlskdv",
    version,
    about = "Ground and bound states of stationary coupled NLS-KdV systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Threshold Λ of the semi-trivial solution (0, V₂).
    Lambda(LambdaArgs),
    /// Ground state by Nehari-constrained descent.
    Ground(SolveArgs),
    /// Mountain-pass bound state between the ground state and (0, V₂).
    Bound(BoundArgs),
    /// Explicit-family or λ₂-threshold scans, written as CSV.
    Scan(ScanArgs),
    /// Oracle checks, reported as TAP lines.
    Verify(VerifyArgs),
    /// N-component system: thresholds, classification, ground state.
    Nsys(NsysArgs),
    /// Re-evaluate the energy of a stored solution.
    Energy(EnergyArgs),
}

#[derive(Args, Clone)]
struct ModelArgs {
    #[arg(long, conflicts_with_all = ["omega", "c"])]
    l1: Option<f64>,
    #[arg(long, conflicts_with_all = ["omega", "c"])]
    l2: Option<f64>,
    /// Wave frequency; with --c replaces --l1/--l2.
    #[arg(long, requires = "c", allow_negative_numbers = true)]
    omega: Option<f64>,
    /// Wave speed; with --omega replaces --l1/--l2.
    #[arg(long, requires = "omega", allow_negative_numbers = true)]
    c: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    mu1: f64,
    #[arg(long, default_value_t = 0.5)]
    mu2: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    beta: f64,
    #[arg(long, default_value_t = 3.0)]
    q: f64,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
}

impl ModelArgs {
    fn lambdas(&self) -> Result<(f64, f64), CliError> {
        match (self.omega, self.c) {
            (Some(omega), Some(c)) => Ok(wave_to_params(omega, c)?),
            _ => Ok((self.l1.unwrap_or(1.0), self.l2.unwrap_or(1.0))),
        }
    }

    fn params(&self) -> Result<Params, CliError> {
        let (l1, l2) = self.lambdas()?;
        Ok(Params::new(
            l1, l2, self.mu1, self.mu2, self.beta, self.q, self.p,
        )?)
    }
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Half-width of the domain [-L, L].
    #[arg(long = "L")]
    half_width: Option<f64>,
    /// Number of grid points (odd).
    #[arg(long = "N")]
    n_points: Option<usize>,
}

impl GridArgs {
    /// Unset values default to `L = 40/√min λ` and a spacing of about
    /// `0.004/√max λ`, rounded to an odd point count.
    fn grid(&self, min_lambda: f64, max_lambda: f64) -> Result<Grid, CliError> {
        let l = self
            .half_width
            .unwrap_or_else(|| default_half_width(min_lambda));
        let n = match self.n_points {
            Some(n) => n,
            None => {
                let h = 0.004 / max_lambda.sqrt();
                let cells = (2.0 * l / h).ceil() as usize;
                cells + cells % 2 + 1
            }
        };
        Ok(Grid::new(l, n)?)
    }
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Constrained-gradient tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    max_iters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverArgs {
    fn cfg(&self) -> Result<SolverCfg, CliError> {
        let mut cfg = SolverCfg {
            seed: self.seed,
            ..SolverCfg::default()
        };
        if let Some(t) = self.tol {
            cfg.grad_tol = t;
        }
        if let Some(m) = self.max_iters {
            cfg.max_iters = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone)]
struct OutputArgs {
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Args)]
struct LambdaArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
    /// Solution file whose state replaces the default seeds.
    #[arg(long)]
    init: Option<PathBuf>,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Interior nodes of the discrete path.
    #[arg(long, default_value_t = 16)]
    nodes: usize,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Axis {
    BetaFamily,
    Lambda2Threshold,
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    axis: Axis,
    #[arg(long, allow_negative_numbers = true)]
    from: f64,
    #[arg(long, allow_negative_numbers = true)]
    to: f64,
    #[arg(long)]
    count: usize,
    #[command(flatten)]
    model: ModelArgs,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Run only these check groups.
    #[arg(long, value_enum, value_delimiter = ',')]
    only: Vec<verify::Group>,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args)]
struct NsysArgs {
    /// Total number of components (one NLS plus n-1 KdV).
    #[arg(long)]
    n: Option<usize>,
    /// λ₀,λ₁,…: one value per component.
    #[arg(long, value_delimiter = ',')]
    lambdas: Vec<f64>,
    /// β₁,β₂,…: one coupling per KdV component.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    betas: Vec<f64>,
    /// JSON file with {lambda0, lambdas, betas}, instead of the flags.
    #[arg(long, conflicts_with_all = ["n", "lambdas", "betas"])]
    params: Option<PathBuf>,
    /// Stop after the classification.
    #[arg(long)]
    classify_only: bool,
    #[command(flatten)]
    grid: GridArgs,
    #[command(flatten)]
    solver: SolverArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EnergyArgs {
    /// Solution file written by `ground`, `bound`, or `nsys`.
    file: PathBuf,
}

fn write_file(path: &Path, text: &str) -> CliResult {
    fs::write(path, text).map_err(|source| CliError::Output {
        path: path.display().to_string(),
        source,
    })
}

fn csv_text<R: Serialize>(header: Option<&[&str]>, rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(header.is_none())
        .from_writer(vec![]);
    if let Some(h) = header {
        w.write_record(h).expect("in-memory csv");
    }
    for r in rows {
        w.serialize(r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
}

/// Grid nodes and component values, one row per node.
fn profile_csv(s: &State) -> String {
    let g = s.grid();
    let mut header = vec!["x".to_string(), "u".to_string()];
    header.extend((1..s.n_components()).map(|j| {
        if s.n_components() == 2 {
            "v".into()
        } else {
            format!("v{j}")
        }
    }));
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let rows = (0..g.len()).map(|i| {
        std::iter::once(g.node(i))
            .chain(s.components().iter().map(|c| c[i]))
            .collect::<Vec<f64>>()
    });
    csv_text(Some(&header), rows)
}

fn json_text<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

fn print_flags(r: &SolveReport) {
    let f = r.flags;
    println!(
        "flags: positive={} even={} nontrivial={} semitrivial={}",
        f.positive, f.even, f.nontrivial, f.semitrivial
    );
}

fn print_report(r: &SolveReport) {
    let g = r.state.grid();
    println!(
        "grid: L={} N={} h={:.3e}",
        g.half_width(),
        g.len(),
        g.spacing()
    );
    println!("energy: {:.12}", r.energy);
    println!("nehari_defect: {:.3e}", r.nehari_defect);
    println!("grad_norm: {:.3e}", r.grad_norm);
    println!("iterations: {}", r.iterations);
    print_flags(r);
}

/// Level of `(0, V_p)`: closed form for the quadratic KdV nonlinearity with
/// `μ₂ = 1/2`, quadrature otherwise.
fn semitrivial_state(p: &Params, g: Grid) -> State {
    State::new(
        g,
        vec![
            vec![0.0; g.len()],
            make_soliton(p.lambda2, p.mu2, p.p, g).into_values(),
        ],
    )
    .expect("matching grid")
}

fn print_semitrivial_comparison(p: &Params, g: Grid, e: f64) {
    let quad = Functional::energy(p, &semitrivial_state(p, g));
    let side = |level: f64| if e < level { "below" } else { "above" };
    println!("semitrivial_energy_quadrature: {quad:.12} ({})", side(quad));
    if p.p == 2.0 && p.mu2 == 0.5 {
        let closed = closed_energy_v2(p.lambda2);
        println!("semitrivial_energy_closed: {closed:.12} ({})", side(closed));
    }
}

fn write_trace(out: Option<&Path>, trace: &[TracePoint]) -> CliResult {
    let Some(out) = out else { return Ok(()) };
    let mut path = out.as_os_str().to_owned();
    path.push(".trace.csv");
    let path = PathBuf::from(path);
    write_file(&path, &csv_text(None, trace))?;
    eprintln!("trace written to {}", path.display());
    Ok(())
}

/// Maps a solver error to the CLI error, saving the iteration trace of a
/// nonconvergent descent next to the requested output.
fn solver_failure(e: nlskdv::Error, out: Option<&Path>) -> CliError {
    if let nlskdv::Error::NonConvergence { trace, .. } | nlskdv::Error::NotMinimal { trace, .. } =
        &e
    {
        if let Err(w) = write_trace(out, trace) {
            eprintln!("{w}");
        }
    }
    e.into()
}

fn save_solution(output: &OutputArgs, params: ModelParams, r: &SolveReport) -> CliResult {
    let Some(out) = &output.out else {
        return Ok(());
    };
    let text = match output.format.unwrap_or(Format::Json) {
        Format::Json => SolutionFile::new(params, r).to_json()?,
        Format::Csv => profile_csv(&r.state),
    };
    write_file(out, &text)?;
    println!("written: {}", out.display());
    Ok(())
}

fn seeds(args: &SolveArgs, p: &Params, g: Grid, seed: u64) -> Result<Vec<State>, CliError> {
    match &args.init {
        Some(path) => Ok(vec![SolutionFile::load(path)?.state()?]),
        None => Ok(default_seeds(p, g, seed)),
    }
}

fn cmd_lambda(a: &LambdaArgs) -> CliResult {
    let p = a.model.params()?;
    let g = a
        .grid
        .grid(p.lambda1.min(p.lambda2), p.lambda1.max(p.lambda2))?;
    let (r, delta) = threshold_band(p.lambda1, p.lambda2, p.mu2, p.p, g)?;
    println!("Lambda: {:.10}", r.lambda);
    println!("band: {:.3e}", delta);
    println!("residual: {:.3e}", r.residual);
    println!("iterations: {}", r.iterations);
    println!("grid: L={} N={}", g.half_width(), g.len());
    println!(
        "semitrivial at beta={}: {:?}",
        p.beta,
        classify_against(p.beta, r.lambda, delta)
    );
    if let Some(out) = &a.output.out {
        let text = match a.output.format.unwrap_or(Format::Json) {
            Format::Json => json_text(&serde_json::json!({
                "lambda": r.lambda,
                "band": delta,
                "residual": r.residual,
                "iterations": r.iterations,
                "grid": g,
                "params": p,
                "minimizer": r.minimizer.values(),
            })),
            Format::Csv => csv_text(
                Some(&["x", "phi"]),
                g.nodes()
                    .into_iter()
                    .zip(r.minimizer.values().iter().copied()),
            ),
        };
        write_file(out, &text)?;
    }
    Ok(())
}

fn cmd_ground(a: &SolveArgs) -> CliResult {
    let p = a.model.params()?;
    let cfg = a.solver.cfg()?;
    let g = a.grid.grid(p.min_lambda(), p.lambda1.max(p.lambda2))?;
    let seeds = seeds(a, &p, g, cfg.seed)?;
    let r =
        ground_state(&p, &cfg, &seeds).map_err(|e| solver_failure(e, a.output.out.as_deref()))?;
    print_report(&r);
    print_semitrivial_comparison(&p, *r.state.grid(), r.energy);
    save_solution(&a.output, ModelParams::Two(p), &r)
}

fn cmd_bound(a: &BoundArgs) -> CliResult {
    let s = &a.solve;
    let p = s.model.params()?;
    let cfg = s.solver.cfg()?;
    let g = s.grid.grid(p.min_lambda(), p.lambda1.max(p.lambda2))?;
    let out = s.output.out.as_deref();
    let ground =
        ground_state(&p, &cfg, &seeds(s, &p, g, cfg.seed)?).map_err(|e| solver_failure(e, out))?;
    let g = *ground.state.grid();
    println!("ground_energy: {:.12}", ground.energy);
    let r = mountain_pass(&p, &ground.state, &semitrivial_state(&p, g), &cfg, a.nodes)
        .map_err(|e| solver_failure(e, out))?;
    print_report(&r);
    print_semitrivial_comparison(&p, g, r.energy);
    save_solution(&s.output, ModelParams::Two(p), &r)
}

fn linspace(from: f64, to: f64, count: usize) -> Result<Vec<f64>, CliError> {
    if count == 0 || !(from.is_finite() && to.is_finite()) || from > to || (count > 1 && from == to)
    {
        return Err(CliError::Usage(format!(
            "empty scan range: from={from} to={to} count={count}"
        )));
    }
    if count == 1 {
        return Ok(vec![from]);
    }
    Ok((0..count)
        .map(|k| from + (to - from) * k as f64 / (count - 1) as f64)
        .collect())
}

#[derive(Serialize)]
struct FamilyRecord {
    beta: f64,
    lambda2: f64,
    u_peak: f64,
    v_peak: f64,
    #[serde(rename = "E_quad")]
    e_quad: f64,
    #[serde(rename = "E_closed")]
    e_closed: f64,
    refined_residual: Option<f64>,
}

impl From<&ScanRow> for FamilyRecord {
    fn from(r: &ScanRow) -> Self {
        FamilyRecord {
            beta: r.beta,
            lambda2: r.lambda2,
            u_peak: r.u_peak,
            v_peak: r.v_peak,
            e_quad: r.e_quad,
            e_closed: r.e_closed,
            refined_residual: r.refined_residual,
        }
    }
}

#[derive(Serialize)]
struct ThresholdRecord {
    lambda2: f64,
    diag_gap: f64,
    sign: i8,
}

fn emit_table<R: Serialize>(output: &OutputArgs, rows: &[R]) -> CliResult {
    let text = match output.format.unwrap_or(Format::Csv) {
        Format::Csv => csv_text(None, rows),
        Format::Json => json_text(&rows),
    };
    match &output.out {
        Some(out) => write_file(out, &text),
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Output {
                    path: "stdout".into(),
                    source,
                })
        }
    }
}

fn cmd_scan(a: &ScanArgs) -> CliResult {
    let values = linspace(a.from, a.to, a.count)?;
    let cfg = a.solver.cfg()?;
    match a.axis {
        Axis::BetaFamily => {
            let (l1, _) = a.model.lambdas()?;
            // λ₂ along the family peaks at β = 1/12
            let g = a.grid.grid(
                l1,
                l1.max(nlskdv::closedform::family_lambda2(l1, 1.0 / 12.0)),
            )?;
            let rows = bifurcation_scan(l1, &values, g, &cfg)?;
            for r in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!(
                    "beta={}: {}",
                    r.beta,
                    r.error.as_deref().unwrap_or_default()
                );
            }
            let records: Vec<FamilyRecord> = rows.iter().map(FamilyRecord::from).collect();
            emit_table(&a.output, &records)?;
            if rows.iter().all(|r| r.error.is_some()) {
                return Err(CliError::Solver("every scan row failed".into()));
            }
            Ok(())
        }
        Axis::Lambda2Threshold => {
            let base = a.model.params()?;
            let gap = |l2: f64| -> Result<f64, CliError> {
                let p = Params {
                    lambda2: l2,
                    ..base
                };
                if p.q == 3.0 && p.p == 2.0 && p.mu1 == 1.0 && p.mu2 == 0.5 {
                    return Ok(diag_gap(p.lambda1, l2, p.beta)?);
                }
                let g = a.grid.grid(p.lambda1.min(l2), p.lambda1.max(l2))?;
                let semi = Functional::energy(&p, &semitrivial_state(&p, g));
                Ok(diag_compare(&p, g)? / semi)
            };
            let mut records = Vec::with_capacity(values.len());
            for &l2 in &values {
                match gap(l2) {
                    Ok(d) => records.push(ThresholdRecord {
                        lambda2: l2,
                        diag_gap: d,
                        sign: if d < 0.0 {
                            -1
                        } else if d > 0.0 {
                            1
                        } else {
                            0
                        },
                    }),
                    Err(e @ CliError::Core(_)) if values.len() > 1 => {
                        eprintln!("lambda2={l2}: {e}")
                    }
                    Err(e) => return Err(e),
                }
            }
            if records.is_empty() {
                return Err(CliError::Solver("every scan row failed".into()));
            }
            emit_table(&a.output, &records)?;
            match records.iter().position(|r| r.sign < 0) {
                Some(k) => {
                    eprintln!(
                        "first sampled lambda2 with diag_gap < 0: {}",
                        records[k].lambda2
                    );
                    if k > 0 {
                        let (mut lo, mut hi) = (records[k - 1].lambda2, records[k].lambda2);
                        for _ in 0..60 {
                            let mid = 0.5 * (lo + hi);
                            if gap(mid)? < 0.0 {
                                hi = mid;
                            } else {
                                lo = mid;
                            }
                        }
                        eprintln!("sign change near lambda2: {:.10}", 0.5 * (lo + hi));
                    }
                }
                None => eprintln!("diag_gap is nonnegative on every sampled lambda2"),
            }
            Ok(())
        }
    }
}

fn nparams(a: &NsysArgs) -> Result<NParams, CliError> {
    if let Some(path) = &a.params {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        let np: NParams = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        np.validate()?;
        return Ok(np);
    }
    let n = a.n.unwrap_or(a.lambdas.len().max(a.betas.len() + 1));
    if n < 2 {
        return Err(CliError::Usage("need at least two components".into()));
    }
    let lambdas = if a.lambdas.is_empty() {
        vec![1.0; n]
    } else {
        a.lambdas.clone()
    };
    if lambdas.len() != n || a.betas.len() != n - 1 {
        return Err(CliError::Usage(format!(
            "--n {n} needs {n} lambdas and {} betas, got {} and {}",
            n - 1,
            lambdas.len(),
            a.betas.len()
        )));
    }
    Ok(NParams::new(
        lambdas[0],
        lambdas[1..].to_vec(),
        a.betas.clone(),
    )?)
}

fn cmd_nsys(a: &NsysArgs) -> CliResult {
    let np = nparams(a)?;
    let max_lambda = np.lambdas.iter().fold(np.lambda0, |m, &l| m.max(l));
    let g = a.grid.grid(np.min_lambda(), max_lambda)?;
    let bands = thresholds_n(&np, g)?;
    let mut sum = 0.0;
    for (j, ((r, delta), beta)) in bands.iter().zip(&np.betas).enumerate() {
        println!("Lambda_{}: {:.10} (band {:.3e})", j + 1, r.lambda, delta);
        sum += beta / r.lambda;
    }
    println!("sum beta_j/Lambda_j: {sum:.10}");
    let lambdas: Vec<f64> = bands.iter().map(|b| b.0.lambda).collect();
    let deltas: Vec<f64> = bands.iter().map(|b| b.1).collect();
    println!(
        "semitrivial: {:?}",
        classify_sum(&np.betas, &lambdas, &deltas)
    );
    if a.classify_only {
        return Ok(());
    }
    let cfg = a.solver.cfg()?;
    let r = ground_state_n(&np, &cfg, &default_seeds_n(&np, g, cfg.seed))
        .map_err(|e| solver_failure(e, a.output.out.as_deref()))?;
    print_report(&r);
    let semi: Vec<f64> = np.lambdas.iter().map(|&l| closed_energy_v2(l)).collect();
    println!("semitrivial_energies_closed: {semi:?}");
    save_solution(&a.output, ModelParams::Many(np), &r)
}

fn cmd_energy(a: &EnergyArgs) -> CliResult {
    let file = SolutionFile::load(&a.file)?;
    let (e, defect) = file.reevaluate()?;
    println!("grid: L={} N={}", file.grid.half_width(), file.grid.len());
    println!("energy: {e:.12}");
    println!("stored_energy: {:.12}", file.report.energy);
    println!("nehari_defect: {defect:.3e}");
    let f = nlskdv::solver::classify_solution(&file.state()?, &file.grid);
    println!(
        "flags: positive={} even={} nontrivial={} semitrivial={}",
        f.positive, f.even, f.nontrivial, f.semitrivial
    );
    Ok(())
}

fn run(cli: Cli) -> CliResult {
    match cli.command {
        Command::Lambda(a) => cmd_lambda(&a),
        Command::Ground(a) => cmd_ground(&a),
        Command::Bound(a) => cmd_bound(&a),
        Command::Scan(a) => cmd_scan(&a),
        Command::Verify(a) => {
            let failed = verify::run(&a.only, &a.grid)?;
            if failed == 0 {
                Ok(())
            } else {
                Err(CliError::Verify(failed))
            }
        }
        Command::Nsys(a) => cmd_nsys(&a),
        Command::Energy(a) => cmd_energy(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
