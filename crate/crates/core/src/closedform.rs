//! Exact solutions and constants: sech-power integrals, the solitons
//! `U_q`, `V_p`, and the explicit one-parameter family of the cubic–quadratic
//! system. Everything here is sampled from scalar formulas, never solved for.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};
use crate::model::{Params, State};

/// An exact fraction `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rational {
    pub num: i64,
    pub den: i64,
}

impl Rational {
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// `∫ sech^k(x) dx` over the real line for `k ∈ {4, 6, 8}`.
pub fn sech_moment(k: u32) -> Result<Rational> {
    match k {
        4 => Ok(Rational { num: 4, den: 3 }),
        6 => Ok(Rational { num: 16, den: 15 }),
        8 => Ok(Rational { num: 32, den: 35 }),
        _ => Err(Error::UnsupportedMoment(k)),
    }
}

/// Peak value `[(r+1)λ/(2μ)]^{1/(r-1)}` of the soliton of `-w'' + λw = μ|w|^{r-1}w`.
pub fn soliton_peak(lambda: f64, mu: f64, r: f64) -> f64 {
    ((r + 1.0) * lambda / (2.0 * mu)).powf(1.0 / (r - 1.0))
}

/// Pointwise soliton profile; see [`make_soliton`].
pub fn soliton_value(lambda: f64, mu: f64, r: f64, x: f64) -> f64 {
    let sech = 1.0 / (0.5 * (r - 1.0) * lambda.sqrt() * x).cosh();
    let e = 2.0 / (r - 1.0);
    let shape = if e == 2.0 {
        sech * sech
    } else if e == 1.0 {
        sech
    } else {
        sech.powf(e)
    };
    soliton_peak(lambda, mu, r) * shape
}

/// Samples of the positive even soliton of `-w'' + λw = μ|w|^{r-1}w`.
pub fn make_soliton(lambda: f64, mu: f64, r: f64, g: Grid) -> Field {
    Field::from_fn(g, |x| soliton_value(lambda, mu, r, x))
}

/// `λ₂` on the explicit family: `4λ₁ + β(1 - 6β)/12`.
pub fn family_lambda2(lambda1: f64, beta: f64) -> f64 {
    4.0 * lambda1 + beta * (1.0 - 6.0 * beta) / 12.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExplicitFamilyPoint {
    pub beta: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    pub state: State,
}

impl ExplicitFamilyPoint {
    /// Cubic–quadratic coefficients for which `state` is an exact solution.
    pub fn params(&self) -> Params {
        Params::cubic_quadratic(self.lambda1, self.lambda2, self.beta)
            .expect("family parameters are valid")
    }
}

fn check_family_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta < 1.0 / 6.0 {
        Ok(())
    } else {
        Err(Error::FamilyUndefined(beta))
    }
}

/// `u_β = √(2λ₁(1-6β)) sech(√λ₁ x)`, `v_β = 12λ₁ sech²(√λ₁ x)`.
pub fn explicit_family(lambda1: f64, beta: f64, g: Grid) -> Result<ExplicitFamilyPoint> {
    check_family_beta(beta)?;
    if !(lambda1.is_finite() && lambda1 > 0.0) {
        return Err(Error::InvalidParams(format!(
            "lambda1 must be positive, got {lambda1}"
        )));
    }
    let amp = (2.0 * lambda1 * (1.0 - 6.0 * beta)).sqrt();
    let k = lambda1.sqrt();
    let u = g.sample(|x| amp / (k * x).cosh());
    let v = g.sample(|x| {
        let s = 1.0 / (k * x).cosh();
        12.0 * lambda1 * s * s
    });
    Ok(ExplicitFamilyPoint {
        beta,
        lambda1,
        lambda2: family_lambda2(lambda1, beta),
        state: State::new(g, vec![u, v])?,
    })
}

/// Energy of the semi-trivial solution `(0, V₂)`: `24/5 λ₂^{5/2}`.
pub fn closed_energy_v2(lambda2: f64) -> f64 {
    4.8 * lambda2.powf(2.5)
}

/// Energy of the explicit family member: `4/3 λ₁^{3/2}(1-6β) + 768/5 λ₁^{5/2}`.
pub fn closed_energy_ubeta(lambda1: f64, beta: f64) -> Result<f64> {
    check_family_beta(beta)?;
    Ok(4.0 / 3.0 * lambda1.powf(1.5) * (1.0 - 6.0 * beta) + 153.6 * lambda1.powf(2.5))
}

/// Energy of `(U_q, 0)` for the cubic case `q = 3, μ₁ = 1`: `4/3 λ₁^{3/2}`.
pub fn closed_energy_u1(lambda1: f64) -> f64 {
    4.0 / 3.0 * lambda1.powf(1.5)
}

/// Threshold for the quadratic weight `V_2` with coefficient `μ₂`:
/// the pencil reduces to a Pöschl–Teller well whose ground level gives
/// `Λ = μ₂ ν(ν+1)/6` with `ν = 2√(λ₁/λ₂)`.
pub fn poschl_teller_threshold(lambda1: f64, lambda2: f64, mu2: f64) -> f64 {
    let nu = 2.0 * (lambda1 / lambda2).sqrt();
    mu2 * nu * (nu + 1.0) / 6.0
}
