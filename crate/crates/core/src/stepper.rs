//! Time integration of the parabolic-elliptic system
//!
//! ```text
//! u_t = Lap u - chi div(u^sigma grad c) + f(u),   -Lap c + c = u^xi
//! ```
//!
//! with zero-flux boundaries. Each step treats advection and reaction
//! explicitly and diffusion implicitly through the same cosine-transform
//! solver used for the chemical. The chemical is quasi-static: it is
//! re-solved from the new density at the end of every step, so the stored
//! `c` always matches the stored `u`.

use std::fmt;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{DiagnosticSeries, DiagnosticSpec};
use crate::error::{Error, Result};
use crate::grid::{advective_divergence_pow, max_face_gradient, pow_nonneg, Field, Grid};
use crate::reaction::{eval_reaction_with, ReactionSpec};
use crate::spectral::SpectralSolver;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    /// Chemotactic sensitivity.
    pub chi: f64,
    /// Aggregation exponent in `div(u^sigma grad c)`.
    pub sigma: f64,
    /// Production exponent in `-Lap c + c = u^xi`.
    pub xi: f64,
    pub reaction: ReactionSpec,
    /// Dimension fed to the regime classifier; independent of the grid.
    pub theory_n: u32,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            chi: 1.0,
            sigma: 1.0,
            xi: 1.0,
            reaction: ReactionSpec::off(),
            theory_n: 3,
        }
    }
}

impl ModelParams {
    pub fn with_reaction(reaction: ReactionSpec) -> Self {
        Self {
            reaction,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.chi >= 0.0 && self.chi.is_finite()) {
            return Err(Error::Parameter(format!(
                "chi must be >= 0, got {}",
                self.chi
            )));
        }
        if !(self.sigma >= 1.0 && self.sigma.is_finite()) {
            return Err(Error::Parameter(format!(
                "sigma must be >= 1, got {}",
                self.sigma
            )));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::Parameter(format!(
                "xi must lie in (0, 1], got {}",
                self.xi
            )));
        }
        if self.theory_n < 3 {
            return Err(Error::Parameter(format!(
                "theory_n must be >= 3, got {}",
                self.theory_n
            )));
        }
        self.reaction
            .validate()
            .map_err(|(field, msg)| Error::Parameter(format!("reaction.{field}: {msg}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControls {
    pub t_end: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_advect: f64,
    pub cfl_react: f64,
    /// `||u||_inf` above this counts as blow-up.
    pub u_blowup: f64,
}

impl Default for StepControls {
    fn default() -> Self {
        Self {
            t_end: 1.0,
            dt_init: 1e-3,
            dt_min: 1e-10,
            dt_max: 1e-2,
            cfl_advect: 0.5,
            cfl_react: 0.5,
            u_blowup: 1e6,
        }
    }
}

impl StepControls {
    /// Fixed step `dt` (unless a stability limit is tighter) up to `t_end`.
    pub fn fixed(dt: f64, t_end: f64) -> Self {
        Self {
            t_end,
            dt_init: dt,
            dt_max: dt,
            dt_min: (dt * 1e-8).min(1e-10),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(self.dt_min) && ok(self.dt_init) && ok(self.dt_max)) {
            return Err(Error::Parameter(
                "time steps must be positive and finite".into(),
            ));
        }
        if !(self.dt_min <= self.dt_init && self.dt_init <= self.dt_max) {
            return Err(Error::Parameter(format!(
                "need dt_min <= dt_init <= dt_max, got {} / {} / {}",
                self.dt_min, self.dt_init, self.dt_max
            )));
        }
        if !(self.cfl_advect > 0.0 && self.cfl_advect <= 1.0) {
            return Err(Error::Parameter(format!(
                "cfl_advect must lie in (0, 1], got {}",
                self.cfl_advect
            )));
        }
        if !ok(self.cfl_react) {
            return Err(Error::Parameter(format!(
                "cfl_react must be positive, got {}",
                self.cfl_react
            )));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::Parameter(format!(
                "t_end must be >= 0, got {}",
                self.t_end
            )));
        }
        if !ok(self.u_blowup) {
            return Err(Error::Parameter("u_blowup must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RunStatus {
    Running,
    Finished,
    BlowupDetected,
    StepFailure,
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone)]
pub struct RunState {
    pub t: f64,
    /// Last accepted step (the initial cap before the first step).
    pub dt: f64,
    pub u: Field,
    /// Chemical solved from `u`.
    pub c: Field,
    pub step_index: u64,
    /// Total mass removed by clipping negative densities.
    pub clipped_mass_cum: f64,
    pub status: RunStatus,
    /// Why the run stopped when `status` is `StepFailure`.
    pub failure: Option<String>,
}

/// Data from one accepted step, for the energy audit.
#[derive(Debug, Clone)]
pub struct StepRecord {
    pub u_prev: Field,
    pub c_prev: Field,
    pub dt: f64,
}

/// How the initial density is generated.
#[derive(Debug, Clone, PartialEq)]
pub enum InitialCondition {
    Constant {
        amplitude: f64,
    },
    /// `background + amplitude exp(-|x - center|^2 / (2 width^2))`.
    Gaussian {
        background: f64,
        amplitude: f64,
        center: Vec<f64>,
        width: f64,
    },
    /// `amplitude (1 + noise phi(x))` clipped at 0, where `phi` is a random
    /// cosine combination of modes up to 3 per axis, scaled to `max |phi| = 1`.
    ConstantPlusNoise {
        amplitude: f64,
        noise: f64,
        seed: u64,
    },
    FromSnapshot {
        path: PathBuf,
    },
}

impl InitialCondition {
    pub fn generate(&self, grid: Grid) -> Result<Field> {
        let u0 = match self {
            InitialCondition::Constant { amplitude } => Field::constant(grid, *amplitude),
            InitialCondition::Gaussian {
                background,
                amplitude,
                center,
                width,
            } => {
                if center.len() != grid.dim() {
                    return Err(Error::Parameter(format!(
                        "gaussian center has {} coordinates for a {}-d grid",
                        center.len(),
                        grid.dim()
                    )));
                }
                if !(*width > 0.0) {
                    return Err(Error::Parameter("gaussian width must be positive".into()));
                }
                let two_w2 = 2.0 * width * width;
                Field::from_fn(grid, |x| {
                    let r2: f64 = center.iter().zip(x).map(|(c, x)| (x - c) * (x - c)).sum();
                    background + amplitude * (-r2 / two_w2).exp()
                })
            }
            InitialCondition::ConstantPlusNoise {
                amplitude,
                noise,
                seed,
            } => {
                let phi = smooth_noise(grid, *seed);
                phi.map(|p| (amplitude * (1.0 + noise * p)).max(0.0))
            }
            InitialCondition::FromSnapshot { path } => {
                let (field, _) = crate::snapshot::read_snapshot(path)?;
                if *field.grid() != grid {
                    return Err(Error::GridMismatch(format!(
                        "snapshot {} does not match the configured grid",
                        path.display()
                    )));
                }
                field
            }
        };
        if !u0.is_finite() || u0.min() < 0.0 {
            return Err(Error::Input(
                "initial density must be finite and nonnegative".into(),
            ));
        }
        Ok(u0)
    }
}

fn smooth_noise(grid: Grid, seed: u64) -> Field {
    const MODES: usize = 3;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = grid.dim();
    let mut terms = Vec::new();
    for m in 0..(MODES + 1).pow(dim as u32) {
        let mut modes = [0usize; 3];
        let mut rest = m;
        for slot in modes.iter_mut().take(dim) {
            *slot = rest % (MODES + 1);
            rest /= MODES + 1;
        }
        if modes.iter().all(|&j| j == 0) {
            continue;
        }
        terms.push((modes, rng.gen_range(-1.0..1.0)));
    }
    let lengths = grid.lengths3();
    let phi = Field::from_fn(grid, |x| {
        terms
            .iter()
            .map(|(modes, a)| {
                let mut v = *a;
                for axis in 0..dim {
                    v *=
                        (std::f64::consts::PI * modes[axis] as f64 * x[axis] / lengths[axis]).cos();
                }
                v
            })
            .sum()
    });
    let scale = phi.max_abs();
    if scale > 0.0 {
        phi.map(|p| p / scale)
    } else {
        phi
    }
}

/// Advances one grid under fixed model parameters and step controls.
#[derive(Debug, Clone)]
pub struct Stepper {
    solver: SpectralSolver,
    params: ModelParams,
    controls: StepControls,
}

impl Stepper {
    pub fn new(grid: Grid, params: ModelParams, controls: StepControls) -> Result<Self> {
        params.validate()?;
        controls.validate()?;
        Ok(Self {
            solver: SpectralSolver::new(grid),
            params,
            controls,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn controls(&self) -> &StepControls {
        &self.controls
    }

    pub fn solver(&self) -> &SpectralSolver {
        &self.solver
    }

    /// Initial state with the chemical solved from `u0`.
    pub fn init(&self, u0: Field) -> Result<RunState> {
        if *u0.grid() != *self.solver.grid() {
            return Err(Error::GridMismatch(
                "initial density is not on the stepper grid".into(),
            ));
        }
        if !u0.is_finite() || u0.min() < 0.0 {
            return Err(Error::Input(
                "initial density must be finite and nonnegative".into(),
            ));
        }
        let c = self.solver.solve_chemical(&u0, self.params.xi)?;
        let status = if self.controls.t_end <= 0.0 {
            RunStatus::Finished
        } else {
            RunStatus::Running
        };
        Ok(RunState {
            t: 0.0,
            dt: self.controls.dt_init,
            u: u0,
            c,
            step_index: 0,
            clipped_mass_cum: 0.0,
            status,
            failure: None,
        })
    }

    /// Stability-limited step: advective CFL, reaction stiffness and the
    /// growth cap, before truncation at `t_end`.
    fn stable_dt(&self, state: &RunState, nonlocal: Option<f64>) -> f64 {
        let p = &self.params;
        let k = &self.controls;
        let cap = if state.step_index == 0 {
            k.dt_init
        } else {
            (2.0 * state.dt).min(k.dt_max)
        };
        let mut dt = cap;
        if p.chi > 0.0 {
            let grads = max_face_gradient(&state.c);
            let weight = if p.sigma == 1.0 {
                1.0
            } else {
                pow_nonneg(state.u.max(), p.sigma - 1.0)
            };
            let rate: f64 = (0..state.u.grid().dim())
                .map(|a| grads[a] / state.u.grid().spacing()[a])
                .sum::<f64>()
                * p.chi
                * weight;
            if rate > 0.0 {
                dt = dt.min(k.cfl_advect / rate);
            }
        }
        let stiff = p.reaction.max_derivative(&state.u, nonlocal);
        if stiff > 0.0 {
            dt = dt.min(k.cfl_react / stiff);
        }
        dt
    }

    /// Advances `state` by one step. Returns `None` when no update was made
    /// (the stability-limited step collapsed below `dt_min`, or the state was
    /// already marked failed by a non-finite update).
    pub fn step(&self, state: &mut RunState) -> Result<Option<StepRecord>> {
        if state.status != RunStatus::Running {
            return Err(Error::Parameter(format!(
                "cannot step a run with status {}",
                state.status
            )));
        }
        let p = &self.params;
        let nonlocal = p.reaction.nonlocal_integral(&state.u)?;
        let stable = self.stable_dt(state, nonlocal);
        if stable < self.controls.dt_min {
            state.status = RunStatus::BlowupDetected;
            return Ok(None);
        }
        let remaining = self.controls.t_end - state.t;
        let (dt, last) = if stable >= remaining {
            (remaining, true)
        } else {
            (stable, false)
        };

        let mut explicit = eval_reaction_with(&state.u, &p.reaction, nonlocal);
        if p.chi > 0.0 {
            let adv = advective_divergence_pow(&state.u, &state.c, p.sigma)?;
            for (e, a) in explicit.values_mut().iter_mut().zip(adv.values()) {
                *e -= p.chi * a;
            }
        }
        let mut star = state.u.clone();
        for (s, e) in star.values_mut().iter_mut().zip(explicit.values()) {
            *s += dt * e;
        }
        if !star.is_finite() {
            return Ok(self.fail(state, "non-finite explicit update"));
        }
        let mut next = self.solver.solve(1.0, dt, &star)?;
        if !next.is_finite() {
            return Ok(self.fail(state, "non-finite diffusion solve"));
        }

        let mut clipped = 0.0;
        for v in next.values_mut() {
            if *v < 0.0 {
                clipped -= *v;
                *v = 0.0;
            }
        }
        let c_next = self.solver.solve_chemical(&next, p.xi)?;

        let u_prev = std::mem::replace(&mut state.u, next);
        let c_prev = std::mem::replace(&mut state.c, c_next);
        state.clipped_mass_cum += clipped * state.u.grid().cell_volume();
        state.t = if last {
            self.controls.t_end
        } else {
            state.t + dt
        };
        state.dt = dt;
        state.step_index += 1;
        if state.u.max() > self.controls.u_blowup {
            state.status = RunStatus::BlowupDetected;
        } else if last {
            state.status = RunStatus::Finished;
        }
        Ok(Some(StepRecord { u_prev, c_prev, dt }))
    }

    fn fail(&self, state: &mut RunState, why: &str) -> Option<StepRecord> {
        state.status = RunStatus::StepFailure;
        state.failure = Some(why.to_string());
        None
    }

    /// Steps until `t_end` or a non-running status, recording diagnostics.
    pub fn run(&self, u0: Field, spec: &DiagnosticSpec) -> Result<RunOutput> {
        self.run_with(u0, spec, |_| Ok(()))
    }

    /// Like [`Self::run`], calling `observer` after every accepted step.
    pub fn run_with(
        &self,
        u0: Field,
        spec: &DiagnosticSpec,
        mut observer: impl FnMut(&RunState) -> Result<()>,
    ) -> Result<RunOutput> {
        let mut state = self.init(u0)?;
        let mut series = DiagnosticSeries::new(spec, &self.params)?;
        series.record(&state, None, &self.params)?;
        let cadence = spec.cadence_steps.max(1);
        while state.status == RunStatus::Running {
            let record = match self.step(&mut state) {
                Ok(r) => r,
                Err(e) => {
                    state.status = RunStatus::StepFailure;
                    state.failure = Some(e.to_string());
                    None
                }
            };
            let Some(record) = record else { break };
            if let Err(e) = observer(&state) {
                state.status = RunStatus::StepFailure;
                state.failure = Some(e.to_string());
                break;
            }
            let due = state.step_index % cadence == 0 || state.status != RunStatus::Running;
            if due {
                if let Err(e) = series.record(&state, Some(&record), &self.params) {
                    state.status = RunStatus::StepFailure;
                    state.failure = Some(e.to_string());
                }
            }
        }
        Ok(RunOutput { state, series })
    }
}

/// Final state plus every recorded diagnostic row.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub state: RunState,
    pub series: DiagnosticSeries,
}

/// Single step with a freshly planned solver. Prefer [`Stepper`] in loops.
pub fn step(
    mut state: RunState,
    params: &ModelParams,
    controls: &StepControls,
) -> Result<RunState> {
    let stepper = Stepper::new(*state.u.grid(), *params, *controls)?;
    stepper.step(&mut state)?;
    Ok(state)
}

/// Full run with a freshly planned solver.
pub fn run(
    u0: Field,
    params: &ModelParams,
    controls: &StepControls,
    spec: &DiagnosticSpec,
) -> Result<RunOutput> {
    Stepper::new(*u0.grid(), *params, *controls)?.run(u0, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::integrate;

    fn grid2(n: usize) -> Grid {
        Grid::unit(&[n, n]).unwrap()
    }

    #[test]
    fn steady_state_is_fixed() {
        let g = grid2(16);
        let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
        let s = Stepper::new(g, params, StepControls::fixed(0.01, 0.2)).unwrap();
        let mut st = s.init(Field::constant(g, 1.0)).unwrap();
        while st.status == RunStatus::Running {
            s.step(&mut st).unwrap();
            assert!(st.u.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
        }
        assert_eq!(st.status, RunStatus::Finished);
        assert_eq!(st.t, 0.2);
    }

    #[test]
    fn heat_equation_conserves_mass() {
        let g = Grid::unit(&[24, 20]).unwrap();
        let params = ModelParams {
            chi: 0.0,
            ..ModelParams::default()
        };
        let s = Stepper::new(g, params, StepControls::fixed(1e-3, 0.05)).unwrap();
        let u0 = InitialCondition::ConstantPlusNoise {
            amplitude: 1.0,
            noise: 0.5,
            seed: 4,
        }
        .generate(g)
        .unwrap();
        let m0 = integrate(&u0).unwrap();
        let mut st = s.init(u0).unwrap();
        while st.status == RunStatus::Running {
            s.step(&mut st).unwrap();
            assert!((integrate(&st.u).unwrap() - m0).abs() <= 1e-13 * m0);
        }
        assert_eq!(st.clipped_mass_cum, 0.0);
    }

    #[test]
    fn zero_density_stays_zero() {
        let g = grid2(8);
        let params = ModelParams::with_reaction(ReactionSpec::nonlocal(1.5, 2.0));
        let out = run(
            Field::zeros(g),
            &params,
            &StepControls::fixed(0.05, 0.5),
            &DiagnosticSpec::default(),
        )
        .unwrap();
        assert_eq!(out.state.status, RunStatus::Finished);
        assert!(out.state.u.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn dt_collapse_is_blowup() {
        let g = grid2(8);
        let controls = StepControls {
            dt_min: 1e-3,
            dt_init: 1e-2,
            ..StepControls::default()
        };
        let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
        let s = Stepper::new(g, params, controls).unwrap();
        // strong reaction stiffness forces dt far below dt_min
        let mut st = s.init(Field::constant(g, 100.0)).unwrap();
        assert!(s.step(&mut st).unwrap().is_none());
        assert_eq!(st.status, RunStatus::BlowupDetected);
        assert!(s.step(&mut st).is_err());
    }

    #[test]
    fn controls_validation() {
        let c = StepControls {
            dt_init: 1.0,
            ..StepControls::default()
        };
        assert!(c.validate().is_err());
        let c = StepControls {
            cfl_advect: 1.5,
            ..StepControls::default()
        };
        assert!(c.validate().is_err());
        assert!(StepControls::default().validate().is_ok());
    }

    #[test]
    fn initial_conditions_are_nonnegative() {
        let g = grid2(12);
        let noisy = InitialCondition::ConstantPlusNoise {
            amplitude: 1.0,
            noise: 3.0,
            seed: 9,
        }
        .generate(g)
        .unwrap();
        assert!(noisy.min() >= 0.0 && noisy.max() > 1.0);
        let gauss = InitialCondition::Gaussian {
            background: 1.0,
            amplitude: 5.0,
            center: vec![0.5, 0.5],
            width: 0.1,
        }
        .generate(g)
        .unwrap();
        assert!(gauss.min() >= 1.0 && gauss.max() <= 6.0);
        assert!(InitialCondition::Gaussian {
            background: 0.0,
            amplitude: 1.0,
            center: vec![0.5],
            width: 0.1,
        }
        .generate(g)
        .is_err());
        assert!(InitialCondition::Constant { amplitude: -1.0 }
            .generate(g)
            .is_err());
    }
}
