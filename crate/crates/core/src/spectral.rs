//! Direct solver for `(a I - b Lap_h) x = rhs` with homogeneous Neumann
//! conditions.
//!
//! The ghost-cell Neumann Laplacian is diagonalized by the type-II cosine
//! transform along each axis, with eigenvalue `-(2/h^2)(1 - cos(pi j / N))`
//! for mode `j`. Dividing by the discrete symbol (rather than the continuum
//! `pi^2 j^2`) makes the solve the exact inverse of the stencil operator.

use std::f64::consts::PI;
use std::sync::Arc;

use rustdct::{DctPlanner, TransformType2And3};

use crate::error::{Error, Result};
use crate::grid::{pow_nonneg, Field, Grid};

/// Tolerance below which negative inputs and outputs are treated as rounding.
const NEG_TOL: f64 = 1e-12;

/// `(a I - b Lap) x = rhs`.
#[derive(Debug, Clone)]
pub struct ScreenedPoissonProblem {
    pub a: f64,
    pub b: f64,
    pub rhs: Field,
}

/// Cosine-transform plans and the Laplacian symbol for one grid. Immutable
/// once built, so it can be shared between threads.
#[derive(Clone)]
pub struct SpectralSolver {
    grid: Grid,
    plans: Vec<Arc<dyn TransformType2And3<f64>>>,
    /// Eigenvalues of `-Lap_h`, one per mode, same layout as the field.
    symbol: Vec<f64>,
}

impl std::fmt::Debug for SpectralSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralSolver")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl SpectralSolver {
    pub fn new(grid: Grid) -> Self {
        let mut planner = DctPlanner::new();
        let plans = grid.cells().iter().map(|&n| planner.plan_dct2(n)).collect();

        let per_axis: Vec<Vec<f64>> = (0..grid.dim())
            .map(|axis| {
                let n = grid.cells()[axis];
                let h = grid.spacing()[axis];
                (0..n)
                    .map(|j| 2.0 / (h * h) * (1.0 - (PI * j as f64 / n as f64).cos()))
                    .collect()
            })
            .collect();
        let symbol = (0..grid.len())
            .map(|idx| {
                let ijk = grid.unravel(idx);
                per_axis
                    .iter()
                    .enumerate()
                    .map(|(axis, mu)| mu[ijk[axis]])
                    .sum()
            })
            .collect();

        Self {
            grid,
            plans,
            symbol,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Eigenvalues of `-Lap_h` in field layout.
    pub fn symbol(&self) -> &[f64] {
        &self.symbol
    }

    /// Solves `(a I - b Lap_h) x = rhs`.
    pub fn solve(&self, a: f64, b: f64, rhs: &Field) -> Result<Field> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::Parameter(format!(
                "screened Poisson needs a > 0, got {a}"
            )));
        }
        if !(b >= 0.0 && b.is_finite()) {
            return Err(Error::Parameter(format!(
                "screened Poisson needs b >= 0, got {b}"
            )));
        }
        if *rhs.grid() != self.grid {
            return Err(Error::GridMismatch(
                "right-hand side is not on the solver grid".into(),
            ));
        }
        if !rhs.is_finite() {
            return Err(Error::Input("non-finite right-hand side".into()));
        }
        if b == 0.0 {
            return Ok(rhs.map(|v| v / a));
        }

        let mut data = rhs.values().to_vec();
        self.forward(&mut data);
        for (v, mu) in data.iter_mut().zip(&self.symbol) {
            *v /= a + b * mu;
        }
        self.inverse(&mut data);
        Field::new(self.grid, data)
    }

    /// Chemical equation `-Lap c + c = u^xi`.
    pub fn solve_chemical(&self, u: &Field, xi: f64) -> Result<Field> {
        if !(xi > 0.0 && xi <= 1.0) {
            return Err(Error::Parameter(format!(
                "production exponent xi must lie in (0, 1], got {xi}"
            )));
        }
        if let Some(v) = u.values().iter().find(|&&v| v < -NEG_TOL) {
            return Err(Error::Input(format!(
                "cell density must be nonnegative, found {v}"
            )));
        }
        let rhs = if xi == 1.0 {
            u.map(|v| v.max(0.0))
        } else {
            u.map(|v| pow_nonneg(v, xi))
        };
        let scale = rhs.max_abs();
        let mut c = self.solve(1.0, 1.0, &rhs)?;
        for v in c.values_mut() {
            if *v < 0.0 {
                if *v < -NEG_TOL * scale {
                    return Err(Error::Internal(format!(
                        "chemical solve produced {v} for a nonnegative source"
                    )));
                }
                *v = 0.0;
            }
        }
        Ok(c)
    }

    /// Unnormalized DCT-II along every active axis.
    fn forward(&self, data: &mut [f64]) {
        for axis in 0..self.grid.dim() {
            self.along_axis(data, axis, |plan, line, scratch| {
                plan.process_dct2_with_scratch(line, scratch)
            });
        }
    }

    /// Inverse of [`Self::forward`] (DCT-III scaled by `2/N` per axis).
    fn inverse(&self, data: &mut [f64]) {
        for axis in 0..self.grid.dim() {
            self.along_axis(data, axis, |plan, line, scratch| {
                plan.process_dct3_with_scratch(line, scratch)
            });
        }
        let norm: f64 = self.grid.cells().iter().map(|&n| 2.0 / n as f64).product();
        for v in data {
            *v *= norm;
        }
    }

    fn along_axis(
        &self,
        data: &mut [f64],
        axis: usize,
        op: impl Fn(&dyn TransformType2And3<f64>, &mut [f64], &mut [f64]),
    ) {
        let plan = self.plans[axis].as_ref();
        let n = self.grid.cells()[axis];
        let stride = self.grid.stride(axis);
        let mut scratch = vec![0.0; plan.get_scratch_len()];
        if stride == 1 {
            for line in data.chunks_exact_mut(n) {
                op(plan, line, &mut scratch);
            }
            return;
        }
        let block = stride * n;
        let mut line = vec![0.0; n];
        for chunk in data.chunks_exact_mut(block) {
            for inner in 0..stride {
                for (m, slot) in line.iter_mut().enumerate() {
                    *slot = chunk[inner + m * stride];
                }
                op(plan, &mut line, &mut scratch);
                for (m, &v) in line.iter().enumerate() {
                    chunk[inner + m * stride] = v;
                }
            }
        }
    }
}

/// One-shot solve; builds the transform plans for the problem's grid.
pub fn screened_poisson_solve(p: &ScreenedPoissonProblem) -> Result<Field> {
    SpectralSolver::new(*p.rhs.grid()).solve(p.a, p.b, &p.rhs)
}

/// One-shot chemical solve `-Lap c + c = u^xi`; tiny negative outputs are
/// clipped to zero.
pub fn solve_chemical(u: &Field, xi: f64) -> Result<Field> {
    SpectralSolver::new(*u.grid()).solve_chemical(u, xi)
}

/// `(a I - b Lap_h) x` with the stencil operator.
pub fn apply_screened(a: f64, b: f64, x: &Field) -> Field {
    let lap = crate::grid::laplacian(x);
    let vals = x
        .values()
        .iter()
        .zip(lap.values())
        .map(|(&v, &l)| a * v - b * l)
        .collect();
    Field::new(*x.grid(), vals).expect("same grid")
}
