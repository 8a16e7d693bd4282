//! Uniform mesh on `[-L, L]`, trapezoid quadrature, and the three-point
//! operator `-f'' + λ f` with homogeneous Dirichlet closure.
//!
//! The derivative energy in [`norm_sq`] is summed per cell with forward
//! differences, including the two ghost cells next to the boundary, so that
//! it is the quadratic form of [`apply_operator`] (discrete integration by
//! parts) up to the half weights at the two boundary nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Half-width used when the caller does not pick one: every solution of the
/// model decays like `exp(-sqrt(λ)|x|)`, so `40/sqrt(min λ)` puts the tails
/// far below double precision.
pub fn default_half_width(min_lambda: f64) -> f64 {
    40.0 / min_lambda.sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    #[serde(rename = "L")]
    half_width: f64,
    #[serde(rename = "N")]
    n_points: usize,
}

impl Grid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half-width must be positive, got {half_width}"
            )));
        }
        if n_points < 3 || n_points.is_multiple_of(2) {
            return Err(Error::InvalidGrid(format!(
                "node count must be odd and at least 3, got {n_points}"
            )));
        }
        Ok(Grid {
            half_width,
            n_points,
        })
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / (self.n_points - 1) as f64
    }

    /// Index of the node at `x = 0`.
    pub fn center(&self) -> usize {
        (self.n_points - 1) / 2
    }

    pub fn node(&self, i: usize) -> f64 {
        let c = self.center() as f64;
        // Computed from the center so that x_c == 0 and x_{c+k} == -x_{c-k} exactly.
        (i as f64 - c) * self.spacing()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.node(i)).collect()
    }

    pub fn weight(&self, i: usize) -> f64 {
        let h = self.spacing();
        if i == 0 || i + 1 == self.n_points {
            0.5 * h
        } else {
            h
        }
    }

    pub fn weights(&self) -> Vec<f64> {
        (0..self.n_points).map(|i| self.weight(i)).collect()
    }

    /// Trapezoid rule over raw samples.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        debug_assert_eq!(f.len(), self.n_points);
        let n = f.len();
        let interior: f64 = f[1..n - 1].iter().sum();
        self.spacing() * (interior + 0.5 * (f[0] + f[n - 1]))
    }

    /// Trapezoid rule of `g(f_i)` without allocating.
    pub fn integrate_map(&self, f: &[f64], g: impl Fn(f64) -> f64) -> f64 {
        let n = f.len();
        let interior: f64 = f[1..n - 1].iter().map(|&v| g(v)).sum();
        self.spacing() * (interior + 0.5 * (g(f[0]) + g(f[n - 1])))
    }

    /// Trapezoid rule of the pointwise product of two sample arrays.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let interior: f64 = a[1..n - 1]
            .iter()
            .zip(&b[1..n - 1])
            .map(|(x, y)| x * y)
            .sum();
        self.spacing() * (interior + 0.5 * (a[0] * b[0] + a[n - 1] * b[n - 1]))
    }

    /// Same interval with the spacing halved (`2N - 1` nodes).
    pub fn refined(&self) -> Grid {
        Grid {
            half_width: self.half_width,
            n_points: 2 * self.n_points - 1,
        }
    }

    /// Same interval with the spacing doubled; needs `(N + 1)/2` odd.
    pub fn coarsened(&self) -> Result<Grid> {
        Grid::new(self.half_width, self.n_points.div_ceil(2))
    }

    /// Sample `f` at every node.
    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..self.n_points).map(|i| f(self.node(i))).collect()
    }

    /// Sum of squared forward differences over all cells, ghost zeros included,
    /// divided by `h`: the discrete `∫ |f'|²`.
    pub fn derivative_energy(&self, f: &[f64]) -> f64 {
        let n = f.len();
        let mut acc = f[0] * f[0] + f[n - 1] * f[n - 1];
        for w in f.windows(2) {
            let d = w[1] - w[0];
            acc += d * d;
        }
        acc / self.spacing()
    }

    /// Same as [`Grid::derivative_energy`] for the bilinear form.
    pub fn derivative_pairing(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let mut acc = a[0] * b[0] + a[n - 1] * b[n - 1];
        for i in 0..n - 1 {
            acc += (a[i + 1] - a[i]) * (b[i + 1] - b[i]);
        }
        acc / self.spacing()
    }

    /// `‖f‖_λ² = ∫ |f'|² + λ ∫ f²` on raw samples.
    pub fn norm_sq(&self, f: &[f64], lambda: f64) -> f64 {
        self.derivative_energy(f) + lambda * self.integrate_map(f, |v| v * v)
    }

    /// `(a | b)_λ` on raw samples.
    pub fn pairing(&self, a: &[f64], b: &[f64], lambda: f64) -> f64 {
        self.derivative_pairing(a, b) + lambda * self.inner(a, b)
    }

    /// Writes `-f'' + λ f` into `out`.
    pub fn apply_operator_into(&self, f: &[f64], lambda: f64, out: &mut [f64]) {
        let n = f.len();
        let inv_h2 = 1.0 / (self.spacing() * self.spacing());
        for i in 0..n {
            let left = if i == 0 { 0.0 } else { f[i - 1] };
            let right = if i + 1 == n { 0.0 } else { f[i + 1] };
            out[i] = -(right - 2.0 * f[i] + left) * inv_h2 + lambda * f[i];
        }
    }
}

/// Real samples of one component on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape {
                expected: format!("{} samples", grid.len()),
                found: format!("{} samples", values.len()),
            });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "non-finite sample {} at node {i}",
                values[i]
            )));
        }
        Ok(Field { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Field {
            grid,
            values: vec![0.0; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Field {
            grid,
            values: grid.sample(f),
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.values)
    }
}

pub fn make_grid(half_width: f64, n_points: usize) -> Result<Grid> {
    Grid::new(half_width, n_points)
}

pub fn quadrature(f: &Field) -> f64 {
    f.grid.integrate(&f.values)
}

pub fn apply_operator(f: &Field, lambda: f64) -> Field {
    let mut out = vec![0.0; f.values.len()];
    f.grid.apply_operator_into(&f.values, lambda, &mut out);
    Field {
        grid: f.grid,
        values: out,
    }
}

pub fn norm_sq(f: &Field, lambda: f64) -> f64 {
    f.grid.norm_sq(&f.values, lambda)
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_nodes() {
        let g = make_grid(40.0, 4001).unwrap();
        assert!((g.spacing() - 0.02).abs() < 1e-15);
        let g = make_grid(1.0, 3).unwrap();
        assert_eq!(g.nodes(), vec![-1.0, 0.0, 1.0]);
        let g = make_grid(7.3, 1001).unwrap();
        assert_eq!(g.node(g.center()), 0.0);
        for k in 0..=g.center() {
            assert_eq!(g.node(g.center() + k), -g.node(g.center() - k));
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(make_grid(40.0, 4000), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(40.0, 1), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(0.0, 11), Err(Error::InvalidGrid(_))));
        assert!(matches!(make_grid(-2.0, 11), Err(Error::InvalidGrid(_))));
    }

    #[test]
    fn quadrature_of_constant() {
        let g = make_grid(10.0, 101).unwrap();
        let one = Field::from_fn(g, |_| 1.0);
        assert!((quadrature(&one) - 20.0).abs() < 1e-12);
    }

    #[test]
    fn operator_of_zero_is_zero() {
        let g = make_grid(3.0, 31).unwrap();
        let z = Field::zeros(g);
        assert!(apply_operator(&z, 2.0).values().iter().all(|&v| v == 0.0));
        assert_eq!(norm_sq(&z, 2.0), 0.0);
    }

    #[test]
    fn operator_on_sine_is_second_order() {
        // f = sin(pi (x + L) / 2L) vanishes at both ends; -f'' + λ f = (k^2 + λ) f.
        let lambda = 1.5;
        let err = |n: usize| {
            let g = make_grid(1.0, n).unwrap();
            let k = std::f64::consts::PI / 2.0;
            let f = Field::from_fn(g, |x| (k * (x + 1.0)).sin());
            let out = apply_operator(&f, lambda);
            let mut e = 0.0_f64;
            for i in 1..n - 1 {
                let exact = (k * k + lambda) * f.values()[i];
                e = e.max((out.values()[i] - exact).abs());
            }
            e
        };
        let (e1, e2) = (err(101), err(201));
        let ratio = e1 / e2;
        assert!((3.5..4.5).contains(&ratio), "ratio {ratio}");
        assert!(e1 < 1e-3);
    }

    #[test]
    fn norm_is_quadratic_form_of_operator() {
        let g = make_grid(5.0, 201).unwrap();
        let f = Field::from_fn(g, |x| (-(x - 0.3) * (x - 0.3)).exp() * (1.0 + 0.2 * x));
        let af = apply_operator(&f, 0.7);
        let lhs = norm_sq(&f, 0.7);
        let rhs = g.inner(f.values(), af.values());
        assert!((lhs - rhs).abs() < 1e-12 * lhs);
    }
}
