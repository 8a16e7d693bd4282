//! Small direct solvers: a prefactored tridiagonal (Thomas) solver for the
//! Dirichlet operator `-d²/dx² + λ`, and a banded LU with partial pivoting
//! used by the Newton refinements.

use crate::error::{Error, Result};
use crate::grid::Grid;

/// LU factors of a tridiagonal matrix, reusable across right-hand sides.
#[derive(Debug, Clone)]
pub struct Tridiagonal {
    // Forward-elimination multipliers and pivots.
    mult: Vec<f64>,
    pivot: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiagonal {
    /// Factor the matrix with sub-diagonal `lower[i] = A[i+1][i]`, diagonal
    /// `diag`, super-diagonal `upper[i] = A[i][i+1]`.
    pub fn factor(lower: Vec<f64>, diag: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        let n = diag.len();
        let mut pivot = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        pivot[0] = diag[0];
        for i in 1..n {
            if pivot[i - 1] == 0.0 || !pivot[i - 1].is_finite() {
                return Err(Error::Singular(format!("zero pivot at row {}", i - 1)));
            }
            mult[i - 1] = lower[i - 1] / pivot[i - 1];
            pivot[i] = diag[i] - mult[i - 1] * upper[i - 1];
        }
        if pivot[n - 1] == 0.0 {
            return Err(Error::Singular(format!("zero pivot at row {}", n - 1)));
        }
        Ok(Tridiagonal { mult, pivot, upper })
    }

    /// `-d²/dx² + λ` with Dirichlet closure on `grid`.
    pub fn dirichlet_operator(grid: &Grid, lambda: f64) -> Result<Self> {
        let n = grid.len();
        let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
        Self::factor(
            vec![-inv_h2; n - 1],
            vec![2.0 * inv_h2 + lambda; n],
            vec![-inv_h2; n - 1],
        )
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.pivot.len();
        for i in 1..n {
            x[i] -= self.mult[i - 1] * x[i - 1];
        }
        x[n - 1] /= self.pivot[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (x[i] - self.upper[i] * x[i + 1]) / self.pivot[i];
        }
    }

    pub fn solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Banded matrix with `kl` sub- and `ku` super-diagonals, factored by
/// Gaussian elimination with partial pivoting (the `gbtrf` scheme: row
/// swaps widen the upper band to `kl + ku`).
#[derive(Debug, Clone)]
pub struct Banded {
    n: usize,
    kl: usize,
    ku: usize,
    // Row-major band storage: row i holds columns i-kl ..= i+kl+ku.
    width: usize,
    data: Vec<f64>,
    // Row swapped with row k at elimination step k.
    ipiv: Vec<usize>,
    factored: bool,
}

impl Banded {
    pub fn zeros(n: usize, kl: usize, ku: usize) -> Self {
        let width = 2 * kl + ku + 1;
        Banded {
            n,
            kl,
            ku,
            width,
            data: vec![0.0; n * width],
            ipiv: (0..n).collect(),
            factored: false,
        }
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        // column offset within row i
        let off = j as isize - i as isize + self.kl as isize;
        if off < 0 || off as usize >= self.width {
            None
        } else {
            Some(i * self.width + off as usize)
        }
    }

    /// Adds `v` to entry `(i, j)`; panics outside the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let ji = j as isize - i as isize;
        assert!(
            ji >= -(self.kl as isize) && ji <= self.ku as isize,
            "entry ({i},{j}) outside band"
        );
        let s = self.slot(i, j).expect("band slot");
        self.data[s] += v;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.data[s])
    }

    pub fn factor(&mut self) -> Result<()> {
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        for k in 0..n {
            let last = (k + kl).min(n - 1);
            // pick the pivot row among k..=last
            let mut p = k;
            let mut best = self.get(k, k).abs();
            for r in k + 1..=last {
                let v = self.get(r, k).abs();
                if v > best {
                    best = v;
                    p = r;
                }
            }
            if best == 0.0 || !best.is_finite() {
                return Err(Error::Singular(format!("no pivot in column {k}")));
            }
            let col_end = (k + kl + ku).min(n - 1);
            if p != k {
                for j in k..=col_end {
                    let a = self.slot(k, j).expect("band slot");
                    let b = self.slot(p, j).expect("band slot");
                    self.data.swap(a, b);
                }
            }
            self.ipiv[k] = p;
            let piv = self.get(k, k);
            for r in k + 1..=last {
                let sr = self.slot(r, k).expect("band slot");
                let m = self.data[sr] / piv;
                if m == 0.0 {
                    continue;
                }
                self.data[sr] = m;
                for j in k + 1..=col_end {
                    let a = self.get(k, j);
                    if a != 0.0 {
                        let s = self.slot(r, j).expect("band slot");
                        self.data[s] -= m * a;
                    }
                }
            }
        }
        self.factored = true;
        Ok(())
    }

    /// Solves `A x = b` with a factored matrix. Row swaps were applied
    /// eagerly during factoring, so they are replayed on `b` in order.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert!(self.factored, "factor() before solve()");
        let n = self.n;
        let (kl, ku) = (self.kl, self.ku);
        let mut x = b.to_vec();
        // Swaps were interleaved with elimination; replay them the same way.
        for k in 0..n {
            let p = self.ipiv[k];
            if p != k {
                x.swap(k, p);
            }
            let xk = x[k];
            if xk != 0.0 {
                for r in k + 1..=(k + kl).min(n - 1) {
                    x[r] -= self.get(r, k) * xk;
                }
            }
        }
        for k in (0..n).rev() {
            let mut acc = x[k];
            for j in k + 1..=(k + kl + ku).min(n - 1) {
                acc -= self.get(k, j) * x[j];
            }
            x[k] = acc / self.get(k, k);
        }
        x
    }
}
