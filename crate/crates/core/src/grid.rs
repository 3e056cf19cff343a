//! Uniform cell-centered box grids, cell fields, and the discrete operators
//! everything else is built from.
//!
//! Cells are stored row-major with the first axis fastest: the cell with
//! per-axis indices `(i, j, k)` lives at `i + nx * (j + ny * k)`. Boundaries
//! carry homogeneous Neumann conditions realized by ghost-cell reflection, so
//! every face on the boundary has zero flux.

use crate::error::{Error, Result};

/// Minimum number of cells along each active axis.
pub const MIN_CELLS: usize = 4;

/// A uniform box discretization of `[0, L_1] x ... x [0, L_d]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    cells: [usize; 3],
    lengths: [f64; 3],
    spacing: [f64; 3],
}

impl Grid {
    /// Grid with explicit side lengths. Unused axes are stored with one cell
    /// of unit length.
    pub fn new(cells: &[usize], lengths: &[f64]) -> Result<Self> {
        let dim = cells.len();
        if !(1..=3).contains(&dim) {
            return Err(Error::Parameter(format!(
                "grid dimension must be 1, 2 or 3, got {dim}"
            )));
        }
        if lengths.len() != dim {
            return Err(Error::Parameter(format!(
                "{dim} cell counts but {} lengths",
                lengths.len()
            )));
        }
        let mut c = [1usize; 3];
        let mut l = [1.0f64; 3];
        let mut h = [1.0f64; 3];
        for axis in 0..dim {
            if cells[axis] < MIN_CELLS {
                return Err(Error::Parameter(format!(
                    "axis {axis} has {} cells, need at least {MIN_CELLS}",
                    cells[axis]
                )));
            }
            if !(lengths[axis].is_finite() && lengths[axis] > 0.0) {
                return Err(Error::Parameter(format!(
                    "axis {axis} length must be positive and finite, got {}",
                    lengths[axis]
                )));
            }
            c[axis] = cells[axis];
            l[axis] = lengths[axis];
            h[axis] = lengths[axis] / cells[axis] as f64;
        }
        cells
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::Parameter("cell count overflows usize".into()))?;
        Ok(Self {
            dim,
            cells: c,
            lengths: l,
            spacing: h,
        })
    }

    /// Grid on the unit box, so `|Omega| = 1`.
    pub fn unit(cells: &[usize]) -> Result<Self> {
        Self::new(cells, &vec![1.0; cells.len()])
    }

    /// Cube `[0,1]^dim` with `n` cells per axis.
    pub fn unit_cube(dim: usize, n: usize) -> Result<Self> {
        Self::unit(&vec![n; dim])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Cell counts for the active axes.
    pub fn cells(&self) -> &[usize] {
        &self.cells[..self.dim]
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths[..self.dim]
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing[..self.dim]
    }

    /// Cell counts padded to three axes (unused axes = 1).
    pub fn cells3(&self) -> [usize; 3] {
        self.cells
    }

    /// Lengths padded to three axes (unused axes = 1.0).
    pub fn lengths3(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn len(&self) -> usize {
        self.cells.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Volume of one cell.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().iter().product()
    }

    /// `|Omega|`.
    pub fn measure(&self) -> f64 {
        self.lengths().iter().product()
    }

    /// Distance in the flat index between neighbors along `axis`.
    pub fn stride(&self, axis: usize) -> usize {
        self.cells[..axis].iter().product()
    }

    /// Per-axis index of a flat cell index.
    pub fn unravel(&self, idx: usize) -> [usize; 3] {
        let i = idx % self.cells[0];
        let j = (idx / self.cells[0]) % self.cells[1];
        let k = idx / (self.cells[0] * self.cells[1]);
        [i, j, k]
    }

    /// Cell-center coordinates (unused axes report 0).
    pub fn center(&self, idx: usize) -> [f64; 3] {
        let ijk = self.unravel(idx);
        let mut x = [0.0; 3];
        for axis in 0..self.dim {
            x[axis] = (ijk[axis] as f64 + 0.5) * self.spacing[axis];
        }
        x
    }

    /// Smallest spacing over active axes.
    pub fn min_spacing(&self) -> f64 {
        self.spacing().iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// One real value per cell of a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "grid has {} cells but {} values were supplied",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Self {
            grid,
            values: vec![value; grid.len()],
        }
    }

    /// Samples `f` at cell centers.
    pub fn from_fn(grid: Grid, mut f: impl FnMut([f64; 3]) -> f64) -> Self {
        let values = (0..grid.len()).map(|idx| f(grid.center(idx))).collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `|v|^p` with `0^p = 0`.
    pub fn powf_abs(&self, p: f64) -> Self {
        self.map(|v| pow_nonneg(v.abs(), p))
    }

    pub fn max(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub(crate) fn same_grid(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch(format!(
                "fields live on different grids ({:?} vs {:?})",
                self.grid.cells(),
                other.grid.cells()
            )));
        }
        Ok(())
    }
}

/// Real power of a nonnegative number with `0^p = 0` for every `p > 0`.
#[inline]
pub fn pow_nonneg(v: f64, p: f64) -> f64 {
    if v <= 0.0 {
        if p == 0.0 {
            1.0
        } else {
            0.0
        }
    } else if p == 1.0 {
        v
    } else if p == 2.0 {
        v * v
    } else {
        v.powf(p)
    }
}

/// Midpoint-rule quadrature: cell volume times the sum of cell values.
pub fn integrate(f: &Field) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::NonFinite("quadrature"));
    }
    Ok(f.grid.cell_volume() * f.values.iter().sum::<f64>())
}

/// `||f||_{L^k}`; pass `f64::INFINITY` for the max norm.
pub fn lk_norm(f: &Field, k: f64) -> Result<f64> {
    if k.is_nan() || k < 1.0 {
        return Err(Error::Parameter(format!("L^k norm needs k >= 1, got {k}")));
    }
    if !f.is_finite() {
        return Err(Error::NonFinite("L^k norm"));
    }
    if k == f64::INFINITY {
        return Ok(f.max_abs());
    }
    let s: f64 = f.values.iter().map(|v| pow_nonneg(v.abs(), k)).sum();
    Ok(pow_nonneg(f.grid.cell_volume() * s, 1.0 / k))
}

/// Discrete Dirichlet energy `int |grad f|^2`: squared face differences over
/// interior faces times the cell volume. Boundary faces contribute nothing.
pub fn gradient_sq_integral(f: &Field) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::NonFinite("gradient integral"));
    }
    let grid = &f.grid;
    let v = &f.values;
    let mut total = 0.0;
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        let n = grid.cells[axis];
        let inv_h2 = 1.0 / (grid.spacing[axis] * grid.spacing[axis]);
        let mut acc = 0.0;
        for idx in 0..v.len() {
            if (idx / stride) % n + 1 < n {
                let d = v[idx + stride] - v[idx];
                acc += d * d;
            }
        }
        total += acc * inv_h2;
    }
    Ok(total * grid.cell_volume())
}

/// Conservative upwind discretization of `div(u grad c)`.
pub fn advective_divergence(u: &Field, c: &Field) -> Result<Field> {
    advective_divergence_pow(u, c, 1.0)
}

/// Conservative upwind discretization of `div(u^sigma grad c)`.
///
/// Face velocity is the difference of `c` across the face over the spacing;
/// the face density is picked from the upwind cell and then raised to
/// `sigma`. Boundary faces carry no flux, so the cell sum of the result
/// telescopes to zero.
pub fn advective_divergence_pow(u: &Field, c: &Field, sigma: f64) -> Result<Field> {
    u.same_grid(c)?;
    let grid = u.grid;
    let (uv, cv) = (&u.values, &c.values);
    let mut out = vec![0.0; uv.len()];
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        let n = grid.cells[axis];
        let h = grid.spacing[axis];
        for idx in 0..uv.len() {
            if (idx / stride) % n + 1 >= n {
                continue;
            }
            let right = idx + stride;
            let vel = (cv[right] - cv[idx]) / h;
            let upwind = if vel > 0.0 { uv[idx] } else { uv[right] };
            let flux = vel * face_density(upwind, sigma) / h;
            out[idx] += flux;
            out[right] -= flux;
        }
    }
    Field::new(grid, out)
}

#[inline]
fn face_density(u: f64, sigma: f64) -> f64 {
    if sigma == 1.0 {
        u
    } else {
        pow_nonneg(u, sigma)
    }
}

/// Ghost-cell Neumann Laplacian (3/5/7-point stencil).
pub fn laplacian(f: &Field) -> Field {
    let grid = f.grid;
    let v = &f.values;
    let mut out = vec![0.0; v.len()];
    for axis in 0..grid.dim() {
        let stride = grid.stride(axis);
        let n = grid.cells[axis];
        let inv_h2 = 1.0 / (grid.spacing[axis] * grid.spacing[axis]);
        for idx in 0..v.len() {
            if (idx / stride) % n + 1 < n {
                let d = (v[idx + stride] - v[idx]) * inv_h2;
                out[idx] += d;
                out[idx + stride] -= d;
            }
        }
    }
    Field { grid, values: out }
}

/// Largest face velocity magnitude `|dc/dx_a|` along each active axis.
pub fn max_face_gradient(c: &Field) -> [f64; 3] {
    let grid = c.grid;
    let v = &c.values;
    let mut out = [0.0; 3];
    for (axis, slot) in out.iter_mut().enumerate().take(grid.dim()) {
        let stride = grid.stride(axis);
        let n = grid.cells[axis];
        let h = grid.spacing[axis];
        let mut m: f64 = 0.0;
        for idx in 0..v.len() {
            if (idx / stride) % n + 1 < n {
                m = m.max((v[idx + stride] - v[idx]).abs());
            }
        }
        *slot = m / h;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn lin_1d(n: usize) -> Field {
        Field::from_fn(Grid::unit(&[n]).unwrap(), |x| x[0])
    }

    #[test]
    fn grid_rejects_too_few_cells() {
        assert!(Grid::unit(&[3, 8]).is_err());
        assert!(Grid::unit(&[]).is_err());
        assert!(Grid::unit(&[4, 4, 4, 4]).is_err());
        assert!(Grid::new(&[8], &[0.0]).is_err());
    }

    #[test]
    fn spacing_times_cells_is_length() {
        let g = Grid::new(&[7, 13, 29], &[0.3, 1.7, 2.9]).unwrap();
        for a in 0..3 {
            let back = g.spacing()[a] * g.cells()[a] as f64;
            assert!((back - g.lengths()[a]).abs() <= f64::EPSILON * g.lengths()[a]);
        }
        assert_eq!(Grid::unit(&[8, 8]).unwrap().measure(), 1.0);
    }

    #[test]
    fn integrate_basic() {
        let g = Grid::unit(&[5, 6]).unwrap();
        assert_eq!(integrate(&Field::zeros(g)).unwrap(), 0.0);
        assert!((integrate(&Field::constant(g, 2.0)).unwrap() - 2.0).abs() < 1e-14);
        assert!((integrate(&lin_1d(64)).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn integrate_rejects_non_finite() {
        let g = Grid::unit(&[4]).unwrap();
        let f = Field::new(g, vec![0.0, f64::NAN, 1.0, 1.0]).unwrap();
        assert!(matches!(integrate(&f), Err(Error::NonFinite(_))));
    }

    #[test]
    fn lk_norm_examples() {
        let g = Grid::unit(&[8, 8]).unwrap();
        for k in [1.0, 1.5, 2.0, 7.0, f64::INFINITY] {
            assert!((lk_norm(&Field::constant(g, 1.0), k).unwrap() - 1.0).abs() < 1e-14);
        }
        assert!((lk_norm(&Field::constant(g, 3.0), 2.0).unwrap() - 3.0).abs() < 1e-14);
        assert!(lk_norm(&Field::constant(g, 3.0), 0.5).is_err());

        let bump = Field::from_fn(g, |x| {
            (-((x[0] - 0.4).powi(2) + (x[1] - 0.6).powi(2)) / 0.02).exp()
        });
        let direct = integrate(&bump).unwrap();
        assert!((lk_norm(&bump, 1.0).unwrap() - direct).abs() < 1e-14);
    }

    #[test]
    fn gradient_of_constant_is_zero() {
        let g = Grid::unit(&[6, 5, 4]).unwrap();
        assert_eq!(gradient_sq_integral(&Field::constant(g, 3.3)).unwrap(), 0.0);
    }

    #[test]
    fn gradient_of_cosine_converges_second_order() {
        let err = |n: usize| {
            let f = Field::from_fn(Grid::unit(&[n]).unwrap(), |x| (PI * x[0]).cos());
            (gradient_sq_integral(&f).unwrap() - PI * PI / 2.0).abs()
        };
        assert!(err(128) / (PI * PI / 2.0) < 0.01);
        let ratio = err(64) / err(128);
        assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn advection_of_constant_chemical_vanishes() {
        let g = Grid::unit(&[6, 7]).unwrap();
        let u = Field::from_fn(g, |x| 1.0 + x[0] * x[1]);
        let out = advective_divergence(&u, &Field::constant(g, 0.7)).unwrap();
        assert!(out.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn advection_of_constant_density_is_laplacian() {
        let g = Grid::unit(&[9, 11]).unwrap();
        let c = Field::from_fn(g, |x| (3.0 * x[0]).sin() + x[1] * x[1]);
        let m = 2.5;
        let out = advective_divergence(&Field::constant(g, m), &c).unwrap();
        let lap = laplacian(&c);
        for (a, b) in out.values().iter().zip(lap.values()) {
            assert!((a - m * b).abs() < 1e-10 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn advection_grid_mismatch() {
        let a = Field::zeros(Grid::unit(&[4]).unwrap());
        let b = Field::zeros(Grid::unit(&[5]).unwrap());
        assert!(matches!(
            advective_divergence(&a, &b),
            Err(Error::GridMismatch(_))
        ));
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = Grid::unit(&[5, 5, 5]).unwrap();
        assert!(laplacian(&Field::constant(g, 4.0))
            .values()
            .iter()
            .all(|&v| v == 0.0));
    }
}
