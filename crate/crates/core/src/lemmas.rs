//! Numerical oracles for the two auxiliary lemmas behind the boundedness
//! proof: a Gagliardo-Nirenberg type interpolation inequality and the
//! iterative ODE bound used for the Moser iteration.
//!
//! The interpolation constant `C(n)` is never quantified, so
//! [`check_interpolation`] reports the smallest constant that would make the
//! inequality hold for a given field rather than asserting a value.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::diagnostics::moser_log_bound;
use crate::error::{Error, Result};
use crate::grid::{gradient_sq_integral, lk_norm, Field, Grid};
use crate::ode::Dopri5;

/// Sobolev exponent `p = 2n / (n - 2)`.
pub fn sobolev_exponent(n: u32) -> Result<f64> {
    if n < 3 {
        return Err(Error::Parameter(format!(
            "Sobolev exponent needs n >= 3, got {n}"
        )));
    }
    let n = f64::from(n);
    Ok(2.0 * n / (n - 2.0))
}

/// `(lambda, gamma)` for `(n, r, q)` without admissibility checks:
/// `lambda = (1/r - 1/q) / (1/r - 1/p)`, `gamma = 2 (1 - lambda) q / (2 - lambda q)`.
pub fn interpolation_exponents(n: u32, r: f64, q: f64) -> Result<(f64, f64)> {
    let p = sobolev_exponent(n)?;
    let lambda = (1.0 / r - 1.0 / q) / (1.0 / r - 1.0 / p);
    let gamma = 2.0 * (1.0 - lambda) * q / (2.0 - lambda * q);
    Ok((lambda, gamma))
}

/// Exponents and weights for one instance of the interpolation inequality
///
/// ```text
/// ||v||_q^q <= C(n) (C0^e + C1^e) ||v||_r^gamma + C0 ||grad v||_2^2 + C1 ||v||_2^2
/// ```
///
/// with `e = -lambda q / (2 - lambda q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationCase {
    n: u32,
    r: f64,
    q: f64,
    c0: f64,
    c1: f64,
    lambda: f64,
    gamma: f64,
}

impl InterpolationCase {
    /// Validates `1 <= r < q < p`, `q/r < 2/r + 1 - 2/p`, `lambda in (0,1)`
    /// and `2 - lambda q > 0`.
    pub fn new(n: u32, r: f64, q: f64, c0: f64, c1: f64) -> Result<Self> {
        let p = sobolev_exponent(n)?;
        if !(r >= 1.0) {
            return Err(Error::Parameter(format!("need r >= 1, got r = {r}")));
        }
        if !(r < q) {
            return Err(Error::Parameter(format!(
                "need r < q, got r = {r}, q = {q}"
            )));
        }
        if !(q < p) {
            return Err(Error::Parameter(format!("need q < p = {p}, got q = {q}")));
        }
        if !(q / r < 2.0 / r + 1.0 - 2.0 / p) {
            return Err(Error::Parameter(format!(
                "need q/r < 2/r + 1 - 2/p, got {} >= {}",
                q / r,
                2.0 / r + 1.0 - 2.0 / p
            )));
        }
        if !(c0 > 0.0 && c1 > 0.0) {
            return Err(Error::Parameter("C0 and C1 must be positive".into()));
        }
        let (lambda, gamma) = interpolation_exponents(n, r, q)?;
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::Parameter(format!(
                "lambda = {lambda} outside (0, 1)"
            )));
        }
        if !(2.0 - lambda * q > 0.0) {
            return Err(Error::Parameter(format!(
                "need 2 - lambda q > 0, got {}",
                2.0 - lambda * q
            )));
        }
        Ok(Self {
            n,
            r,
            q,
            c0,
            c1,
            lambda,
            gamma,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// `C0^e + C1^e` with `e = -lambda q / (2 - lambda q)`.
    pub fn weight(&self) -> f64 {
        let e = -self.lambda * self.q / (2.0 - self.lambda * self.q);
        self.c0.powf(e) + self.c1.powf(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterpolationCheck {
    /// `||v||_q^q`.
    pub lhs: f64,
    /// `C0 ||grad v||^2 + C1 ||v||^2`, the part of the bound free of `C(n)`.
    pub rhs_without_cn: f64,
    /// `(C0^e + C1^e) ||v||_r^gamma`, the factor multiplying `C(n)`.
    pub cn_factor: f64,
    /// Smallest `C(n) >= 0` for which the inequality holds for this `v`.
    pub required_cn: f64,
}

/// Evaluates the interpolation inequality for `v` by quadrature.
pub fn check_interpolation(case: &InterpolationCase, v: &Field) -> Result<InterpolationCheck> {
    if v.grid().dim() as u32 != case.n {
        return Err(Error::Parameter(format!(
            "direct checks need a {}-d grid, got {}-d",
            case.n,
            v.grid().dim()
        )));
    }
    if v.values().iter().all(|&x| x == 0.0) {
        return Err(Error::Input("v must not vanish identically".into()));
    }
    let lhs = lk_norm(v, case.q)?.powf(case.q);
    let grad = gradient_sq_integral(v)?;
    let l2 = lk_norm(v, 2.0)?.powi(2);
    let rhs_without_cn = case.c0 * grad + case.c1 * l2;
    let cn_factor = case.weight() * lk_norm(v, case.r)?.powf(case.gamma);
    let required_cn = ((lhs - rhs_without_cn) / cn_factor).max(0.0);
    Ok(InterpolationCheck {
        lhs,
        rhs_without_cn,
        cn_factor,
        required_cn,
    })
}

/// Random combination of products of `cos(pi j x_a / L_a)` with
/// `0 <= j <= max_mode` per axis. The coefficients depend only on the seed,
/// the dimension and `max_mode`, so the same seed gives the same function on
/// every resolution.
pub fn band_limited_field(grid: Grid, max_mode: usize, seed: u64) -> Field {
    let dim = grid.dim();
    let per = max_mode + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coeffs: Vec<([usize; 3], f64)> = (0..per.pow(dim as u32))
        .map(|m| {
            let mut modes = [0usize; 3];
            let mut rest = m;
            for slot in modes.iter_mut().take(dim) {
                *slot = rest % per;
                rest /= per;
            }
            let decay = 1.0 + modes.iter().sum::<usize>() as f64;
            (modes, rng.gen_range(-1.0..1.0) / decay)
        })
        .collect();
    let cells = grid.cells3();
    let lengths = grid.lengths3();
    // cos(pi j x / L) at every cell center, per axis
    let tables: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|axis| {
            let h = lengths[axis] / cells[axis] as f64;
            (0..per)
                .map(|j| {
                    (0..cells[axis])
                        .map(|i| {
                            let x = (i as f64 + 0.5) * h;
                            if axis < dim {
                                (PI * j as f64 * x / lengths[axis]).cos()
                            } else {
                                1.0
                            }
                        })
                        .collect()
                })
                .collect()
        })
        .collect();
    let mut values = vec![0.0; grid.len()];
    for (idx, v) in values.iter_mut().enumerate() {
        let i = grid.unravel(idx);
        *v = coeffs
            .iter()
            .map(|(m, a)| a * tables[0][m[0]][i[0]] * tables[1][m[1]][i[1]] * tables[2][m[2]][i[2]])
            .sum();
    }
    Field::new(grid, values).expect("length matches grid")
}

/// Time profile of the base quantity `y_0(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Y0Profile {
    Constant(f64),
    /// `floor + (start - floor) exp(-rate t)`.
    Decaying {
        start: f64,
        floor: f64,
        rate: f64,
    },
}

impl Y0Profile {
    pub fn at(&self, t: f64) -> f64 {
        match *self {
            Y0Profile::Constant(v) => v,
            Y0Profile::Decaying { start, floor, rate } => {
                floor + (start - floor) * (-rate * t).exp()
            }
        }
    }

    /// `sup_{t >= 0} y_0(t)`.
    pub fn sup(&self) -> f64 {
        match *self {
            Y0Profile::Constant(v) => v,
            Y0Profile::Decaying { start, floor, .. } => start.max(floor),
        }
    }

    fn min(&self) -> f64 {
        match *self {
            Y0Profile::Constant(v) => v,
            Y0Profile::Decaying { start, floor, .. } => start.min(floor),
        }
    }
}

/// One chain `y_k' = -y_k + a_k (y_{k-1}^g1 + y_{k-1}^g2)` with
/// `a_k = a_bar b^(r0 k)` and `y_k(0) = K^(b^k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationCase {
    pub a_bar: f64,
    pub r0: f64,
    pub b: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub big_k: f64,
    pub y0: Y0Profile,
    pub k_max: u32,
}

/// Largest supported chain length; `b^k` exponents already reach 64.
pub const MAX_CHAIN: u32 = 6;

impl IterationCase {
    pub fn validate(&self) -> Result<()> {
        if !(self.b > 1.0 && self.b.is_finite()) {
            return Err(Error::Parameter(format!("need b > 1, got {}", self.b)));
        }
        if !(self.a_bar > 1.0 && self.a_bar.is_finite()) {
            return Err(Error::Parameter(format!(
                "need a_bar > 1, got {}",
                self.a_bar
            )));
        }
        if !(self.r0 >= 0.0 && self.r0.is_finite()) {
            return Err(Error::Parameter(format!("need r0 >= 0, got {}", self.r0)));
        }
        if !(0.0 < self.gamma2 && self.gamma2 < self.gamma1 && self.gamma1 <= self.b) {
            return Err(Error::Parameter(format!(
                "need 0 < gamma2 < gamma1 <= b, got gamma2 = {}, gamma1 = {}, b = {}",
                self.gamma2, self.gamma1, self.b
            )));
        }
        if !(self.big_k >= 1.0 && self.big_k.is_finite()) {
            return Err(Error::Parameter(format!("need K >= 1, got {}", self.big_k)));
        }
        if self.k_max > MAX_CHAIN {
            return Err(Error::Parameter(format!(
                "k_max = {} exceeds {MAX_CHAIN}",
                self.k_max
            )));
        }
        if !(self.y0.min() > 0.0 && self.y0.sup().is_finite()) {
            return Err(Error::Parameter(
                "y0 profile must be positive and bounded".into(),
            ));
        }
        if self.y0.at(0.0) > self.big_k {
            return Err(Error::Parameter(format!(
                "need y0(0) <= K, got {} > {}",
                self.y0.at(0.0),
                self.big_k
            )));
        }
        Ok(())
    }

    fn ln_a(&self, k: u32) -> f64 {
        self.a_bar.ln() + self.r0 * f64::from(k) * self.b.ln()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IterationCheck {
    /// `sup_{t <= t_end} y_k / bound_k` for `k = 0..=k_max`.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
}

/// Integrates the chain with equality (the extremal trajectory dominating
/// every sub-solution with the same data) in log variables `z_k = ln y_k`,
/// and compares each running supremum against the closed-form bound.
pub fn check_iteration_bound(case: &IterationCase, t_end: f64) -> Result<IterationCheck> {
    case.validate()?;
    if !(t_end >= 0.0 && t_end.is_finite()) {
        return Err(Error::Parameter(format!("t_end must be >= 0, got {t_end}")));
    }
    let km = case.k_max as usize;
    let ln_k = case.big_k.ln();
    let z0: Vec<f64> = (1..=case.k_max)
        .map(|k| case.b.powi(k as i32) * ln_k)
        .collect();
    let ln_a: Vec<f64> = (1..=case.k_max).map(|k| case.ln_a(k)).collect();
    let (g1, g2) = (case.gamma1, case.gamma2);
    let profile = case.y0;

    let mut sup_z = z0.clone();
    let rhs = |t: f64, z: &[f64], dz: &mut [f64]| {
        for i in 0..z.len() {
            let below = if i == 0 { profile.at(t).ln() } else { z[i - 1] };
            let force = log_sum_exp(g1 * below, g2 * below) + ln_a[i];
            dz[i] = -1.0 + (force - z[i]).exp();
        }
    };
    if km > 0 {
        Dopri5::with_tol(1e-10, 1e-12).integrate(rhs, 0.0, &z0, t_end, |_, z| {
            for (s, v) in sup_z.iter_mut().zip(z) {
                *s = s.max(*v);
            }
        })?;
    }
    if sup_z.iter().any(|z| !z.is_finite()) {
        return Err(Error::Internal("non-finite log trajectory".into()));
    }

    // sup of y_0 over the window [0, t_end]
    let sup_y0_window = match profile {
        Y0Profile::Constant(v) => v,
        Y0Profile::Decaying { .. } => profile.at(0.0).max(profile.at(t_end)),
    };
    let mut ratios = Vec::with_capacity(km + 1);
    for k in 0..=case.k_max {
        let log_sup = if k == 0 {
            sup_y0_window.ln()
        } else {
            sup_z[k as usize - 1]
        };
        let log_bound = moser_log_bound(case.a_bar, case.r0, case.b, case.big_k, profile.sup(), k)?;
        ratios.push((log_sup - log_bound).exp());
    }
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(IterationCheck { ratios, max_ratio })
}

fn log_sum_exp(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Random admissible case: `a_bar in [1.1, 10]`, `b = 2`, `r0 in [0, 3]`,
/// `gamma2 < gamma1 <= 2`, `K in [1, 5]`, with a constant or decaying `y0`
/// starting at or below `K`.
pub fn random_iteration_case(rng: &mut impl Rng, k_max: u32) -> IterationCase {
    let b = 2.0;
    let gamma1 = rng.gen_range(0.2..=b);
    let gamma2 = rng.gen_range(0.05..gamma1 * 0.95);
    let big_k = rng.gen_range(1.0..5.0);
    let start = rng.gen_range(0.2..=1.0) * big_k;
    let y0 = if rng.gen_bool(0.5) {
        Y0Profile::Constant(start)
    } else {
        Y0Profile::Decaying {
            start,
            floor: rng.gen_range(0.05..2.0) * start,
            rate: rng.gen_range(0.1..3.0),
        }
    };
    IterationCase {
        a_bar: rng.gen_range(1.1..10.0),
        r0: rng.gen_range(0.0..3.0),
        b,
        gamma1,
        gamma2,
        big_k,
        y0,
        k_max,
    }
}
