//! Time-series observables, the discrete audit of the `L^k` energy identity,
//! and Moser-iteration bounds.
//!
//! For a solution of the system, multiplying the density equation by
//! `k u^(k-1)` and integrating gives
//!
//! ```text
//! d/dt int u^k + 4(k-1)/k int |grad u^(k/2)|^2
//!     = k int u^(k-1) f(u) - chi k int u^(k-1) div(u^sigma grad c)
//! ```
//!
//! which for the nonlocal reaction is
//! `k int u^(k+alpha-1) - k int u^beta int u^(k+alpha-1)` on the right.
//! [`energy_budget_residual`] evaluates LHS - RHS with a difference quotient
//! in time and quadrature in space.
//!
//! The L-infinity certificate is illustrative only. Its constants `a_bar`
//! and `r0` come from unquantified Sobolev constants, so they are inputs here
//! and the certificate is not a proof artifact.

use crate::error::{Error, Result};
use crate::grid::{
    advective_divergence_pow, gradient_sq_integral, integrate, lk_norm, pow_nonneg, Field,
};
use crate::reaction::{eval_reaction_with, ReactionSpec, ReactionVariant};
use crate::stepper::{ModelParams, RunState, StepRecord};

/// What to record during a run.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSpec {
    /// Emit a row every this many accepted steps (final state always emitted).
    pub cadence_steps: u64,
    /// Exponents for the norm, gradient and energy-residual channels.
    /// `None` picks [`default_k_list`].
    pub norm_ks: Option<Vec<f64>>,
}

impl Default for DiagnosticSpec {
    fn default() -> Self {
        Self {
            cadence_steps: 1,
            norm_ks: None,
        }
    }
}

/// `{1, 2, beta+alpha, 2(beta+alpha)}` for the nonlocal reaction, `{1, 2}`
/// otherwise. Duplicates are dropped.
pub fn default_k_list(reaction: &ReactionSpec) -> Vec<f64> {
    let mut ks = vec![1.0, 2.0];
    if reaction.variant == ReactionVariant::NonlocalLogistic {
        let q0 = reaction.beta + reaction.alpha;
        for k in [q0, 2.0 * q0] {
            if !ks.contains(&k) {
                ks.push(k);
            }
        }
    }
    ks
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticRow {
    pub t: f64,
    pub dt: f64,
    pub mass: f64,
    /// `||u||_{L^k}` per configured k.
    pub lk: Vec<f64>,
    pub linf: f64,
    /// `int u^beta`.
    pub nonlocal_integral: f64,
    pub clipped_mass_cum: f64,
    /// `int |grad u^(k/2)|^2` per configured k.
    pub gradsq: Vec<f64>,
    /// Energy-budget residual of the step that produced this row (0 for the
    /// initial row).
    pub energy_resid: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticSeries {
    ks: Vec<f64>,
    beta: f64,
    rows: Vec<DiagnosticRow>,
}

impl DiagnosticSeries {
    pub fn new(spec: &DiagnosticSpec, params: &ModelParams) -> Result<Self> {
        let ks = spec
            .norm_ks
            .clone()
            .unwrap_or_else(|| default_k_list(&params.reaction));
        if let Some(k) = ks.iter().find(|k| !(k.is_finite() && **k >= 1.0)) {
            return Err(Error::Parameter(format!(
                "norm exponents must be finite and >= 1, got {k}"
            )));
        }
        Ok(Self {
            ks,
            beta: params.reaction.beta,
            rows: Vec::new(),
        })
    }

    pub fn ks(&self) -> &[f64] {
        &self.ks
    }

    pub fn rows(&self) -> &[DiagnosticRow] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Index of the channel for exponent `k`, if configured.
    pub fn channel(&self, k: f64) -> Option<usize> {
        self.ks
            .iter()
            .position(|&q| (q - k).abs() <= 1e-12 * k.abs().max(1.0))
    }

    /// Largest `linf` over rows with `t` in `[t0, t1]`.
    pub fn sup_linf_between(&self, t0: f64, t1: f64) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.t >= t0 && r.t <= t1)
            .map(|r| r.linf)
            .reduce(f64::max)
    }

    pub fn sup_linf(&self) -> f64 {
        self.rows.iter().map(|r| r.linf).fold(0.0, f64::max)
    }

    /// Appends a row for `state`; `step` is the step that produced it.
    pub fn record(
        &mut self,
        state: &RunState,
        step: Option<&StepRecord>,
        params: &ModelParams,
    ) -> Result<()> {
        let u = &state.u;
        if let Some(last) = self.rows.last() {
            if state.t <= last.t {
                return Err(Error::Internal(format!(
                    "diagnostic times must increase ({} after {})",
                    state.t, last.t
                )));
            }
        }
        let mut lk = Vec::with_capacity(self.ks.len());
        let mut gradsq = Vec::with_capacity(self.ks.len());
        let mut energy_resid = Vec::with_capacity(self.ks.len());
        for &k in &self.ks {
            lk.push(lk_norm(u, k)?);
            gradsq.push(gradient_sq_integral(&u.powf_abs(k / 2.0))?);
            energy_resid.push(match step {
                Some(s) => budget_residual(&s.u_prev, u, &s.c_prev, s.dt, k, params)?,
                None => 0.0,
            });
        }
        let row = DiagnosticRow {
            t: state.t,
            dt: step.map_or(0.0, |s| s.dt),
            mass: lk_norm(u, 1.0)?,
            lk,
            linf: lk_norm(u, f64::INFINITY)?,
            nonlocal_integral: integrate(&u.map(|v| pow_nonneg(v, self.beta)))?,
            clipped_mass_cum: state.clipped_mass_cum,
            gradsq,
            energy_resid,
        };
        self.rows.push(row);
        Ok(())
    }

    /// Column names in CSV order.
    pub fn header(&self) -> Vec<String> {
        let mut cols = vec!["t".to_string(), "dt".into(), "mass".into()];
        cols.extend(self.ks.iter().map(|k| format!("Lk_{k}")));
        cols.extend([
            "linf".into(),
            "nonlocal_integral".into(),
            "clipped_mass_cum".into(),
        ]);
        cols.extend(self.ks.iter().map(|k| format!("gradsq_{k}")));
        cols.extend(self.ks.iter().map(|k| format!("energy_resid_{k}")));
        cols
    }

    /// Writes the series as CSV (header plus one line per row). Floats use
    /// the shortest round-trip representation, so output is reproducible.
    pub fn write_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.header().join(","))?;
        for r in &self.rows {
            let mut vals = vec![r.t, r.dt, r.mass];
            vals.extend(&r.lk);
            vals.extend([r.linf, r.nonlocal_integral, r.clipped_mass_cum]);
            vals.extend(&r.gradsq);
            vals.extend(&r.energy_resid);
            let line: Vec<String> = vals.iter().map(|v| format!("{v:?}")).collect();
            writeln!(w, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Signed residual of the `L^k` energy identity over one step, normalized by
/// `max(1, int u_prev^k)`. All terms except the time difference quotient are
/// evaluated at `u_prev` with the chemical `c` solved from it.
pub fn energy_budget_residual(
    u_prev: &Field,
    u_next: &Field,
    c: &Field,
    dt: f64,
    k: f64,
    params: &ModelParams,
) -> Result<f64> {
    if !(k > 1.0 && k.is_finite()) {
        return Err(Error::Parameter(format!(
            "energy budget needs k > 1, got {k}"
        )));
    }
    budget_residual(u_prev, u_next, c, dt, k, params)
}

pub(crate) fn budget_residual(
    u_prev: &Field,
    u_next: &Field,
    c: &Field,
    dt: f64,
    k: f64,
    params: &ModelParams,
) -> Result<f64> {
    u_prev.same_grid(u_next)?;
    u_prev.same_grid(c)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    let q_prev = integrate(&u_prev.powf_abs(k))?;
    let q_next = integrate(&u_next.powf_abs(k))?;
    let dq = (q_next - q_prev) / dt;
    let dissipation = 4.0 * (k - 1.0) / k * gradient_sq_integral(&u_prev.powf_abs(k / 2.0))?;

    let weight = u_prev.powf_abs(k - 1.0);
    let nonlocal = params.reaction.nonlocal_integral(u_prev)?;
    let f = eval_reaction_with(u_prev, &params.reaction, nonlocal);
    let reaction = k * weighted_integral(&weight, &f);

    let chemotaxis = if params.chi > 0.0 {
        let adv = advective_divergence_pow(u_prev, c, params.sigma)?;
        -params.chi * k * weighted_integral(&weight, &adv)
    } else {
        0.0
    };
    let resid = dq + dissipation - reaction - chemotaxis;
    Ok(resid / q_prev.max(1.0))
}

fn weighted_integral(w: &Field, f: &Field) -> f64 {
    w.grid().cell_volume()
        * w.values()
            .iter()
            .zip(f.values())
            .map(|(a, b)| a * b)
            .sum::<f64>()
}

/// `(k-1) int u^k c`, the term dropped from the identity to obtain the
/// differential inequality. Nonnegative whenever `u, c >= 0`.
pub fn dropped_chemical_term(u: &Field, c: &Field, k: f64) -> Result<f64> {
    u.same_grid(c)?;
    Ok((k - 1.0) * weighted_integral(&u.powf_abs(k), c))
}

/// Exponent ladder `q_k = 2^k + beta + alpha - 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoserSchedule {
    pub alpha: f64,
    pub beta: f64,
    pub k_max: u32,
    q: Vec<f64>,
}

impl MoserSchedule {
    pub fn new(alpha: f64, beta: f64, k_max: u32) -> Result<Self> {
        if !(alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Parameter("alpha and beta must be finite".into()));
        }
        if k_max > 60 {
            return Err(Error::Parameter(format!("k_max {k_max} too large")));
        }
        let q = (0..=k_max)
            .map(|k| (1u64 << k) as f64 + beta + alpha - 1.0)
            .collect();
        Ok(Self {
            alpha,
            beta,
            k_max,
            q,
        })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    /// `q_0 = beta + alpha`.
    pub fn q0(&self) -> f64 {
        self.q[0]
    }
}

/// Natural log of the iteration bound
///
/// ```text
/// (2 a)^((b^k-1)/(b-1)) b^(r0 (b(b^k-1)/(b-1)^2 - k/(b-1))) max{sup y0^(b^k), K^(b^k)}
/// ```
pub fn moser_log_bound(
    a_bar: f64,
    r0: f64,
    b: f64,
    big_k: f64,
    sup_y0: f64,
    k: u32,
) -> Result<f64> {
    if !(b > 1.0 && b.is_finite()) {
        return Err(Error::Parameter(format!(
            "iteration base b must be > 1, got {b}"
        )));
    }
    if !(a_bar > 0.0 && a_bar.is_finite()) {
        return Err(Error::Parameter(format!(
            "a_bar must be positive, got {a_bar}"
        )));
    }
    if !(big_k >= 1.0 && big_k.is_finite()) {
        return Err(Error::Parameter(format!("K must be >= 1, got {big_k}")));
    }
    if !(r0 >= 0.0 && r0.is_finite()) {
        return Err(Error::Parameter(format!("r0 must be >= 0, got {r0}")));
    }
    if !(sup_y0 >= 0.0) {
        return Err(Error::Parameter(format!(
            "sup y0 must be >= 0, got {sup_y0}"
        )));
    }
    let kf = f64::from(k);
    let bk = b.powf(kf);
    let geo = (bk - 1.0) / (b - 1.0);
    let b_exp = r0 * (b * (bk - 1.0) / ((b - 1.0) * (b - 1.0)) - kf / (b - 1.0));
    let data = (bk * sup_y0.ln()).max(bk * big_k.ln());
    Ok(geo * (2.0 * a_bar).ln() + b_exp * b.ln() + data)
}

/// Linear-space value of [`moser_log_bound`] for `k <= schedule.k_max`;
/// `+inf` once the bound exceeds the float range.
pub fn moser_bound(
    schedule: &MoserSchedule,
    a_bar: f64,
    r0: f64,
    b: f64,
    big_k: f64,
    sup_y0: f64,
    k: u32,
) -> Result<f64> {
    if k > schedule.k_max {
        return Err(Error::Parameter(format!(
            "k = {k} beyond the schedule's k_max = {}",
            schedule.k_max
        )));
    }
    Ok(moser_log_bound(a_bar, r0, b, big_k, sup_y0, k)?.exp())
}

/// Constants the certificate needs but the theory leaves unquantified.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateParams {
    pub a_bar: f64,
    pub r0: f64,
}

/// `2 a 2^(2 r0) max{sup_t int u^(q0), K_0}` with
/// `K_0 = max{||u0||_{L^q0}, ||u0||_inf}` taken from the first row.
pub fn linf_certificate(
    series: &DiagnosticSeries,
    schedule: &MoserSchedule,
    params: &CertificateParams,
) -> Result<f64> {
    let q0 = schedule.q0();
    let ch = series.channel(q0).ok_or_else(|| Error::Config {
        path: "output.norm_k_list".into(),
        message: format!("series has no L^{q0} channel (q0 = beta + alpha)"),
    })?;
    let first = series
        .rows()
        .first()
        .ok_or_else(|| Error::Input("empty diagnostic series".into()))?;
    let k0 = first.lk[ch].max(first.linf);
    let sup_int = series
        .rows()
        .iter()
        .map(|r| pow_nonneg(r.lk[ch], q0))
        .fold(0.0, f64::max);
    Ok(2.0 * params.a_bar * 2f64.powf(2.0 * params.r0) * sup_int.max(k0))
}
