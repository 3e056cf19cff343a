//! Adaptive Dormand-Prince 5(4) integrator for small ODE systems.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth-order minus embedded fourth-order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5 {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5 {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-6,
            h_max: f64::INFINITY,
            max_steps: 10_000_000,
        }
    }
}

impl Dopri5 {
    pub fn with_tol(rtol: f64, atol: f64) -> Self {
        Self {
            rtol,
            atol,
            ..Self::default()
        }
    }

    /// Integrates `y' = f(t, y)` from `t0` to `t_end`, calling `on_step` at
    /// the start and after every accepted step. Returns `y(t_end)`.
    pub fn integrate<F, O>(
        &self,
        mut f: F,
        t0: f64,
        y0: &[f64],
        t_end: f64,
        mut on_step: O,
    ) -> Result<Vec<f64>>
    where
        F: FnMut(f64, &[f64], &mut [f64]),
        O: FnMut(f64, &[f64]),
    {
        let n = y0.len();
        let mut y = y0.to_vec();
        let mut t = t0;
        on_step(t, &y);
        if t_end <= t0 {
            return Ok(y);
        }
        let mut h = self.h_init.min(t_end - t0).min(self.h_max);
        let mut k = vec![vec![0.0; n]; 7];
        let mut tmp = vec![0.0; n];
        let mut y_new = vec![0.0; n];
        f(t, &y, &mut k[0]);
        let mut steps = 0usize;

        while t < t_end {
            steps += 1;
            if steps > self.max_steps {
                return Err(Error::Internal(format!(
                    "ODE integrator exceeded {} steps at t = {t}",
                    self.max_steps
                )));
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }

            stage(&y, h, &[(A21, &k[0])], &mut tmp);
            f(t + C2 * h, &tmp, &mut k[1]);
            stage(&y, h, &[(A31, &k[0]), (A32, &k[1])], &mut tmp);
            f(t + C3 * h, &tmp, &mut k[2]);
            stage(&y, h, &[(A41, &k[0]), (A42, &k[1]), (A43, &k[2])], &mut tmp);
            f(t + C4 * h, &tmp, &mut k[3]);
            stage(
                &y,
                h,
                &[(A51, &k[0]), (A52, &k[1]), (A53, &k[2]), (A54, &k[3])],
                &mut tmp,
            );
            f(t + C5 * h, &tmp, &mut k[4]);
            stage(
                &y,
                h,
                &[
                    (A61, &k[0]),
                    (A62, &k[1]),
                    (A63, &k[2]),
                    (A64, &k[3]),
                    (A65, &k[4]),
                ],
                &mut tmp,
            );
            f(t + h, &tmp, &mut k[5]);
            stage(
                &y,
                h,
                &[
                    (B1, &k[0]),
                    (B3, &k[2]),
                    (B4, &k[3]),
                    (B5, &k[4]),
                    (B6, &k[5]),
                ],
                &mut y_new,
            );
            f(t + h, &y_new, &mut k[6]);

            let mut err = 0.0;
            for i in 0..n {
                let e = h
                    * (E1 * k[0][i]
                        + E3 * k[2][i]
                        + E4 * k[3][i]
                        + E5 * k[4][i]
                        + E6 * k[5][i]
                        + E7 * k[6][i]);
                let sc = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                err += (e / sc) * (e / sc);
            }
            let err = (err / n.max(1) as f64).sqrt();
            if !err.is_finite() {
                h *= 0.1;
                if h < 1e-300 {
                    return Err(Error::Internal("ODE step size underflow".into()));
                }
                continue;
            }

            if err <= 1.0 {
                t = if last { t_end } else { t + h };
                y.copy_from_slice(&y_new);
                k.swap(0, 6);
                on_step(t, &y);
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).min(self.h_max);
            if h < 1e-300 {
                return Err(Error::Internal("ODE step size underflow".into()));
            }
        }
        Ok(y)
    }
}

fn stage(y: &[f64], h: f64, terms: &[(f64, &Vec<f64>)], out: &mut [f64]) {
    for i in 0..y.len() {
        let mut s = 0.0;
        for (a, k) in terms {
            s += a * k[i];
        }
        out[i] = y[i] + h * s;
    }
}
