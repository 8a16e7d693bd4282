//! Model coefficients, states, and the variational calculus of the
//! two-component system
//!
//! ```text
//! -u'' + λ₁u = μ₁|u|^{q-1}u + βuv
//! -v'' + λ₂v = μ₂|v|^{p-1}v + ½βu²
//! ```
//!
//! and of the N-component extension with one NLS and N-1 KdV components.
//! The cubic–quadratic system is `(q, p, μ₁, μ₂) = (3, 2, 1, ½)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{max_abs, Field, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub lambda1: f64,
    pub lambda2: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub beta: f64,
    pub q: f64,
    pub p: f64,
}

impl Params {
    pub fn new(
        lambda1: f64,
        lambda2: f64,
        mu1: f64,
        mu2: f64,
        beta: f64,
        q: f64,
        p: f64,
    ) -> Result<Self> {
        let params = Params {
            lambda1,
            lambda2,
            mu1,
            mu2,
            beta,
            q,
            p,
        };
        params.validate()?;
        Ok(params)
    }

    /// The cubic NLS / quadratic KdV system: `q = 3, p = 2, μ₁ = 1, μ₂ = ½`.
    pub fn cubic_quadratic(lambda1: f64, lambda2: f64, beta: f64) -> Result<Self> {
        Self::new(lambda1, lambda2, 1.0, 0.5, beta, 3.0, 2.0)
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        Params { beta, ..*self }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        for (name, v) in [("q", self.q), ("p", self.p)] {
            if !(v.is_finite() && v >= 2.0) {
                return Err(Error::InvalidParams(format!(
                    "{name} must be at least 2, got {v}"
                )));
            }
        }
        if !self.beta.is_finite() {
            return Err(Error::InvalidParams(format!(
                "beta must be finite, got {}",
                self.beta
            )));
        }
        Ok(())
    }

    pub fn min_lambda(&self) -> f64 {
        self.lambda1.min(self.lambda2)
    }
}

/// One NLS component `u` (index 0) coupled to `N-1` KdV components `v_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NParams {
    pub lambda0: f64,
    /// `λ_j` for `j = 1..N-1`.
    pub lambdas: Vec<f64>,
    /// `β_j` for `j = 1..N-1`.
    pub betas: Vec<f64>,
}

impl NParams {
    pub fn new(lambda0: f64, lambdas: Vec<f64>, betas: Vec<f64>) -> Result<Self> {
        let np = NParams {
            lambda0,
            lambdas,
            betas,
        };
        np.validate()?;
        Ok(np)
    }

    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty() {
            return Err(Error::InvalidParams(
                "need at least one KdV component".into(),
            ));
        }
        if self.lambdas.len() != self.betas.len() {
            return Err(Error::InvalidParams(format!(
                "{} KdV lambdas but {} couplings",
                self.lambdas.len(),
                self.betas.len()
            )));
        }
        for (j, &l) in std::iter::once(&self.lambda0)
            .chain(&self.lambdas)
            .enumerate()
        {
            if !(l.is_finite() && l > 0.0) {
                return Err(Error::InvalidParams(format!(
                    "lambda{j} must be positive, got {l}"
                )));
            }
        }
        if let Some(b) = self.betas.iter().find(|b| !b.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "coupling must be finite, got {b}"
            )));
        }
        Ok(())
    }

    /// Total component count `N`.
    pub fn n_components(&self) -> usize {
        self.lambdas.len() + 1
    }

    /// `λ` of component `j` (0 is the NLS component).
    pub fn lambda(&self, j: usize) -> f64 {
        if j == 0 {
            self.lambda0
        } else {
            self.lambdas[j - 1]
        }
    }

    pub fn min_lambda(&self) -> f64 {
        self.lambdas.iter().fold(self.lambda0, |m, &l| m.min(l))
    }
}

/// `(λ₁, λ₂) = (ω + c²/4, c)` for traveling waves with frequency `ω` and speed `c`.
pub fn wave_to_params(omega: f64, c: f64) -> Result<(f64, f64)> {
    let lambda1 = omega + 0.25 * c * c;
    let lambda2 = c;
    if !(lambda1 > 0.0 && lambda2 > 0.0 && lambda1.is_finite() && lambda2.is_finite()) {
        return Err(Error::InvalidWaveParameters {
            omega,
            c,
            lambda1,
            lambda2,
        });
    }
    Ok((lambda1, lambda2))
}

/// Ordered tuple of component samples on one grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct State {
    grid: Grid,
    components: Vec<Vec<f64>>,
}

impl State {
    pub fn new(grid: Grid, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::Shape {
                expected: "at least one component".into(),
                found: "none".into(),
            });
        }
        for (j, c) in components.iter().enumerate() {
            if c.len() != grid.len() {
                return Err(Error::Shape {
                    expected: format!("{} samples", grid.len()),
                    found: format!("{} samples in component {j}", c.len()),
                });
            }
            if let Some(i) = c.iter().position(|v| !v.is_finite()) {
                return Err(Error::InvalidParams(format!(
                    "non-finite sample in component {j} at node {i}"
                )));
            }
        }
        Ok(State { grid, components })
    }

    pub fn from_fields(fields: Vec<Field>) -> Result<Self> {
        let grid = *fields
            .first()
            .ok_or_else(|| Error::Shape {
                expected: "at least one component".into(),
                found: "none".into(),
            })?
            .grid();
        if fields.iter().any(|f| *f.grid() != grid) {
            return Err(Error::Shape {
                expected: "components on one grid".into(),
                found: "mixed grids".into(),
            });
        }
        Ok(State {
            grid,
            components: fields.into_iter().map(Field::into_values).collect(),
        })
    }

    pub fn zeros(grid: Grid, n: usize) -> Self {
        State {
            grid,
            components: vec![vec![0.0; grid.len()]; n],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn n_components(&self) -> usize {
        self.components.len()
    }

    pub fn component(&self, j: usize) -> &[f64] {
        &self.components[j]
    }

    pub fn component_mut(&mut self, j: usize) -> &mut [f64] {
        &mut self.components[j]
    }

    pub fn components(&self) -> &[Vec<f64>] {
        &self.components
    }

    pub fn field(&self, j: usize) -> Field {
        Field::new(self.grid, self.components[j].clone()).expect("state samples are finite")
    }

    pub fn scaled(&self, t: f64) -> State {
        self.map(|v| t * v)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> State {
        State {
            grid: self.grid,
            components: self
                .components
                .iter()
                .map(|c| c.iter().map(|&v| f(v)).collect())
                .collect(),
        }
    }

    /// Componentwise modulus.
    pub fn abs(&self) -> State {
        self.map(f64::abs)
    }

    /// `self + a * other`.
    pub fn axpy(&self, a: f64, other: &State) -> State {
        State {
            grid: self.grid,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p + a * q).collect())
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.components
            .iter()
            .map(|c| max_abs(c))
            .fold(0.0, f64::max)
    }

    /// Max-norm distance to another state on the same grid.
    pub fn distance_max(&self, other: &State) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(p, q)| (p - q).abs()))
            .fold(0.0, f64::max)
    }

    /// Sum over components of the quadrature of the pointwise product.
    pub fn l2_pairing(&self, other: &State) -> f64 {
        self.components
            .iter()
            .zip(&other.components)
            .map(|(a, b)| self.grid.inner(a, b))
            .sum()
    }

    /// Mirror average `(f(x) + f(-x))/2` of every component.
    pub fn even_part(&self) -> State {
        self.map_components(|c| {
            let n = c.len();
            (0..n).map(|i| 0.5 * (c[i] + c[n - 1 - i])).collect()
        })
    }

    pub(crate) fn map_components(&self, f: impl Fn(&[f64]) -> Vec<f64>) -> State {
        State {
            grid: self.grid,
            components: self.components.iter().map(|c| f(c)).collect(),
        }
    }

    pub(crate) fn from_parts(grid: Grid, components: Vec<Vec<f64>>) -> State {
        State { grid, components }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.iter().all(|&v| v == 0.0))
    }
}

/// `|x|^r` and `|x|^{r-1} x` with fast paths for the integer powers used in
/// practice.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Power(pub f64);

impl Power {
    /// `|x|^{r-1} x`
    #[inline]
    pub fn odd(self, x: f64) -> f64 {
        match self.0 {
            r if r == 2.0 => x.abs() * x,
            r if r == 3.0 => x * x * x,
            r if r == 5.0 => {
                let x2 = x * x;
                x2 * x2 * x
            }
            r => x.abs().powf(r - 1.0) * x,
        }
    }

    /// `|x|^{r+1}`
    #[inline]
    pub fn abs_next(self, x: f64) -> f64 {
        match self.0 {
            r if r == 2.0 => x.abs() * x * x,
            r if r == 3.0 => {
                let x2 = x * x;
                x2 * x2
            }
            r if r == 5.0 => {
                let x2 = x * x;
                x2 * x2 * x2
            }
            r => x.abs().powf(r + 1.0),
        }
    }

    /// Derivative of `|x|^{r-1} x`, i.e. `r |x|^{r-1}`.
    #[inline]
    pub fn odd_derivative(self, x: f64) -> f64 {
        match self.0 {
            r if r == 2.0 => 2.0 * x.abs(),
            r if r == 3.0 => 3.0 * x * x,
            r if r == 5.0 => {
                let x2 = x * x;
                5.0 * x2 * x2
            }
            r => r * x.abs().powf(r - 1.0),
        }
    }
}

/// The fibering polynomial of a state: `Ψ(t s)/t² = C - Σ_k a_k t^{e_k}`,
/// with `C = ‖s‖²` and every `e_k ≥ 1`. The energy along the ray is
/// `Φ(t s) = ½ C t² - Σ_k a_k t^{e_k + 2}/(e_k + 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Fibering {
    pub norm_sq: f64,
    pub terms: Vec<(f64, f64)>,
}

impl Fibering {
    /// `Ψ(t s)`.
    pub fn nehari_value(&self, t: f64) -> f64 {
        t * t * self.reduced(t)
    }

    /// `Ψ(t s)/t²`.
    pub fn reduced(&self, t: f64) -> f64 {
        self.norm_sq - self.terms.iter().map(|&(a, e)| a * t.powf(e)).sum::<f64>()
    }

    /// `d/dt [Ψ(t s)/t²]`.
    pub fn reduced_derivative(&self, t: f64) -> f64 {
        -self
            .terms
            .iter()
            .map(|&(a, e)| a * e * t.powf(e - 1.0))
            .sum::<f64>()
    }

    pub fn energy(&self, t: f64) -> f64 {
        0.5 * self.norm_sq * t * t
            - self
                .terms
                .iter()
                .map(|&(a, e)| a * t.powf(e + 2.0) / (e + 2.0))
                .sum::<f64>()
    }

    /// `Φ - ⅓Ψ` at `t = 1`: equals the energy on the Nehari set.
    pub fn reduced_energy(&self) -> f64 {
        self.norm_sq / 6.0
            + self
                .terms
                .iter()
                .map(|&(a, e)| a * (1.0 / 3.0 - 1.0 / (e + 2.0)))
                .sum::<f64>()
    }
}

/// What the solvers need from a model: energy, its L² gradient, the
/// Nehari functional, and the norm used for Riesz representatives.
pub trait Functional: Sync {
    fn n_components(&self) -> usize;

    /// `λ` in the norm of component `j`.
    fn lambda(&self, j: usize) -> f64;

    fn energy(&self, s: &State) -> f64;

    /// Strong-form residual; zero exactly at discrete critical points.
    fn residual(&self, s: &State) -> State;

    /// L² gradient of `Ψ(s) = Φ'(s)[s]`.
    fn nehari_gradient(&self, s: &State) -> State;

    fn fibering(&self, s: &State) -> Fibering;

    /// Pointwise part of the Jacobian of [`Functional::residual`] at node
    /// `i`: writes `∂r_a/∂s_b` minus the operator contribution into
    /// `out[a * n + b]`.
    fn local_jacobian(&self, s: &State, i: usize, out: &mut [f64]);

    /// `Φ''(s)[d]` as an L² representative.
    fn hessian_apply(&self, s: &State, d: &State) -> State {
        let g = s.grid();
        let n = s.n_components();
        let mut out: Vec<Vec<f64>> = (0..n)
            .map(|a| operator(g, d.component(a), self.lambda(a)))
            .collect();
        let mut jac = vec![0.0; n * n];
        for i in 0..g.len() {
            self.local_jacobian(s, i, &mut jac);
            for a in 0..n {
                for b in 0..n {
                    out[a][i] += jac[a * n + b] * d.component(b)[i];
                }
            }
        }
        State::from_parts(*g, out)
    }

    fn check_shape(&self, s: &State) -> Result<()> {
        if s.n_components() != self.n_components() {
            return Err(Error::Shape {
                expected: format!("{} components", self.n_components()),
                found: format!("{} components", s.n_components()),
            });
        }
        Ok(())
    }

    fn norm_sq(&self, s: &State) -> f64 {
        (0..s.n_components())
            .map(|j| s.grid().norm_sq(s.component(j), self.lambda(j)))
            .sum()
    }

    fn nehari_value(&self, s: &State) -> f64 {
        let f = self.fibering(s);
        f.nehari_value(1.0)
    }
}

fn operator(grid: &Grid, f: &[f64], lambda: f64) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    grid.apply_operator_into(f, lambda, &mut out);
    out
}

impl Functional for Params {
    fn n_components(&self) -> usize {
        2
    }

    fn lambda(&self, j: usize) -> f64 {
        if j == 0 {
            self.lambda1
        } else {
            self.lambda2
        }
    }

    fn energy(&self, s: &State) -> f64 {
        self.fibering(s).energy(1.0)
    }

    fn residual(&self, s: &State) -> State {
        let g = s.grid();
        let (u, v) = (s.component(0), s.component(1));
        let (pq, pp) = (Power(self.q), Power(self.p));
        let mut ru = operator(g, u, self.lambda1);
        let mut rv = operator(g, v, self.lambda2);
        for i in 0..u.len() {
            ru[i] -= self.mu1 * pq.odd(u[i]) + self.beta * u[i] * v[i];
            rv[i] -= self.mu2 * pp.odd(v[i]) + 0.5 * self.beta * u[i] * u[i];
        }
        State::from_parts(*g, vec![ru, rv])
    }

    fn nehari_gradient(&self, s: &State) -> State {
        let g = s.grid();
        let (u, v) = (s.component(0), s.component(1));
        let (pq, pp) = (Power(self.q), Power(self.p));
        let mut ru = operator(g, u, self.lambda1);
        let mut rv = operator(g, v, self.lambda2);
        for i in 0..u.len() {
            ru[i] = 2.0 * ru[i]
                - self.mu1 * (self.q + 1.0) * pq.odd(u[i])
                - 3.0 * self.beta * u[i] * v[i];
            rv[i] = 2.0 * rv[i]
                - self.mu2 * (self.p + 1.0) * pp.odd(v[i])
                - 1.5 * self.beta * u[i] * u[i];
        }
        State::from_parts(*g, vec![ru, rv])
    }

    fn fibering(&self, s: &State) -> Fibering {
        let g = s.grid();
        let (u, v) = (s.component(0), s.component(1));
        let (pq, pp) = (Power(self.q), Power(self.p));
        let norm_sq = g.norm_sq(u, self.lambda1) + g.norm_sq(v, self.lambda2);
        let a = self.mu1 * g.integrate_map(u, |x| pq.abs_next(x));
        let b = self.mu2 * g.integrate_map(v, |x| pp.abs_next(x));
        let uuv: Vec<f64> = u.iter().zip(v).map(|(x, y)| x * x * y).collect();
        let c = 1.5 * self.beta * g.integrate(&uuv);
        Fibering {
            norm_sq,
            terms: vec![(a, self.q - 1.0), (b, self.p - 1.0), (c, 1.0)],
        }
    }

    fn local_jacobian(&self, s: &State, i: usize, out: &mut [f64]) {
        let (u, v) = (s.component(0)[i], s.component(1)[i]);
        out[0] = -self.mu1 * Power(self.q).odd_derivative(u) - self.beta * v;
        out[1] = -self.beta * u;
        out[2] = -self.beta * u;
        out[3] = -self.mu2 * Power(self.p).odd_derivative(v);
    }
}

impl Functional for NParams {
    fn n_components(&self) -> usize {
        NParams::n_components(self)
    }

    fn lambda(&self, j: usize) -> f64 {
        NParams::lambda(self, j)
    }

    fn energy(&self, s: &State) -> f64 {
        self.fibering(s).energy(1.0)
    }

    fn residual(&self, s: &State) -> State {
        let g = s.grid();
        let u = s.component(0);
        let mut out = Vec::with_capacity(s.n_components());
        let mut ru = operator(g, u, self.lambda0);
        for i in 0..u.len() {
            let coupling: f64 = (0..self.lambdas.len())
                .map(|j| self.betas[j] * s.component(j + 1)[i])
                .sum();
            ru[i] -= u[i] * u[i] * u[i] + u[i] * coupling;
        }
        out.push(ru);
        for j in 0..self.lambdas.len() {
            let v = s.component(j + 1);
            let mut rv = operator(g, v, self.lambdas[j]);
            for i in 0..v.len() {
                rv[i] -= 0.5 * v[i] * v[i] + 0.5 * self.betas[j] * u[i] * u[i];
            }
            out.push(rv);
        }
        State::from_parts(*g, out)
    }

    fn nehari_gradient(&self, s: &State) -> State {
        let g = s.grid();
        let u = s.component(0);
        let mut out = Vec::with_capacity(s.n_components());
        let mut ru = operator(g, u, self.lambda0);
        for i in 0..u.len() {
            let coupling: f64 = (0..self.lambdas.len())
                .map(|j| self.betas[j] * s.component(j + 1)[i])
                .sum();
            ru[i] = 2.0 * ru[i] - 4.0 * u[i] * u[i] * u[i] - 3.0 * u[i] * coupling;
        }
        out.push(ru);
        for j in 0..self.lambdas.len() {
            let v = s.component(j + 1);
            let mut rv = operator(g, v, self.lambdas[j]);
            for i in 0..v.len() {
                rv[i] = 2.0 * rv[i] - 1.5 * v[i] * v[i] - 1.5 * self.betas[j] * u[i] * u[i];
            }
            out.push(rv);
        }
        State::from_parts(*g, out)
    }

    fn fibering(&self, s: &State) -> Fibering {
        let g = s.grid();
        let u = s.component(0);
        let norm_sq = Functional::norm_sq(self, s);
        let a = g.integrate_map(u, |x| x * x * x * x);
        let mut b = 0.0;
        for j in 0..self.lambdas.len() {
            let v = s.component(j + 1);
            b += 0.5 * g.integrate_map(v, |x| x * x * x);
            let uuv: Vec<f64> = u.iter().zip(v).map(|(x, y)| x * x * y).collect();
            b += 1.5 * self.betas[j] * g.integrate(&uuv);
        }
        Fibering {
            norm_sq,
            terms: vec![(a, 2.0), (b, 1.0)],
        }
    }

    fn local_jacobian(&self, s: &State, i: usize, out: &mut [f64]) {
        let n = NParams::n_components(self);
        out.iter_mut().for_each(|x| *x = 0.0);
        let u = s.component(0)[i];
        let mut coupling = 0.0;
        for j in 1..n {
            let b = self.betas[j - 1];
            coupling += b * s.component(j)[i];
            out[j] = -b * u;
            out[j * n] = -b * u;
            out[j * n + j] = -s.component(j)[i];
        }
        out[0] = -3.0 * u * u - coupling;
    }
}

pub fn energy(params: &Params, s: &State) -> f64 {
    Functional::energy(params, s)
}

pub fn nehari_value(params: &Params, s: &State) -> f64 {
    Functional::nehari_value(params, s)
}

pub fn gradient(params: &Params, s: &State) -> State {
    params.residual(s)
}

/// Gradient checked against a centered difference of the energy:
/// returns `(∫ ∇Φ(s)·d, (Φ(s+εd) - Φ(s-εd))/2ε)`.
pub fn directional_derivative_check(params: &Params, s: &State, d: &State, eps: f64) -> (f64, f64) {
    let analytic = params.residual(s).l2_pairing(d);
    let plus = Functional::energy(params, &s.axpy(eps, d));
    let minus = Functional::energy(params, &s.axpy(-eps, d));
    (analytic, (plus - minus) / (2.0 * eps))
}

pub fn energy_n(np: &NParams, s: &State) -> Result<f64> {
    np.check_shape(s)?;
    Ok(Functional::energy(np, s))
}

pub fn gradient_n(np: &NParams, s: &State) -> Result<State> {
    np.check_shape(s)?;
    Ok(np.residual(s))
}
