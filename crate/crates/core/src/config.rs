//! JSON run and sweep configuration.
//!
//! Parsing is strict: unknown keys are rejected and every error carries the
//! dotted key path it refers to. Missing optional keys are filled with
//! defaults, so a parsed config serializes back to a fully explicit document
//! that parses to the same value.

use std::path::PathBuf;

use serde::{de::DeserializeOwned, Deserialize, Serialize};

use crate::diagnostics::DiagnosticSpec;
use crate::error::{config_err, Error, Result};
use crate::grid::{Grid, MIN_CELLS};
use crate::reaction::{ReactionSpec, ReactionVariant};
use crate::stepper::{InitialCondition, ModelParams, StepControls};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub dimension: usize,
    pub grid: GridConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub cells: Vec<usize>,
    /// Defaults to the unit box.
    #[serde(default)]
    pub lengths: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    pub chi: f64,
    pub sigma: f64,
    pub xi: f64,
    pub theory_n: u32,
    pub reaction: ReactionConfig,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            chi: p.chi,
            sigma: p.sigma,
            xi: p.xi,
            theory_n: p.theory_n,
            reaction: ReactionConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReactionConfig {
    pub variant: ReactionVariant,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
}

impl Default for ReactionConfig {
    fn default() -> Self {
        let r = ReactionSpec::off();
        Self {
            variant: r.variant,
            alpha: r.alpha,
            beta: r.beta,
            mu: r.mu,
        }
    }
}

impl ReactionConfig {
    pub fn spec(&self) -> ReactionSpec {
        ReactionSpec {
            variant: self.variant,
            alpha: self.alpha,
            beta: self.beta,
            mu: self.mu,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum InitialKind {
    #[default]
    Constant,
    Gaussian,
    ConstantPlusNoise,
    FromSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InitialConfig {
    pub kind: InitialKind,
    pub amplitude: f64,
    /// Constant floor under a Gaussian.
    pub background: f64,
    /// Gaussian center; defaults to the box center.
    pub center: Option<Vec<f64>>,
    pub width: f64,
    /// Relative amplitude of the smooth perturbation for `constant_plus_noise`.
    pub noise: f64,
    pub seed: u64,
    /// Snapshot file for `from_snapshot`.
    pub path: Option<PathBuf>,
}

impl Default for InitialConfig {
    fn default() -> Self {
        Self {
            kind: InitialKind::Constant,
            amplitude: 1.0,
            background: 0.0,
            center: None,
            width: 0.1,
            noise: 0.1,
            seed: 0,
            path: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TimeConfig {
    pub t_end: f64,
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_advect: f64,
    pub cfl_react: f64,
    pub u_blowup: f64,
}

impl Default for TimeConfig {
    fn default() -> Self {
        let c = StepControls::default();
        Self {
            t_end: c.t_end,
            dt_init: c.dt_init,
            dt_min: c.dt_min,
            dt_max: c.dt_max,
            cfl_advect: c.cfl_advect,
            cfl_react: c.cfl_react,
            u_blowup: c.u_blowup,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub cadence_steps: u64,
    /// `None` uses the default list for the configured reaction.
    pub norm_k_list: Option<Vec<f64>>,
    /// Write a snapshot every this many steps; 0 writes only the final state.
    pub snapshot_every: u64,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            cadence_steps: 10,
            norm_k_list: None,
            snapshot_every: 0,
        }
    }
}

/// Deserializes with key-path tracking; unknown keys are errors.
fn parse_json<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        config_err(
            if path.is_empty() { ".".into() } else { path },
            inner.to_string(),
        )
    })
}

/// Parses and validates a run config, filling defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let mut cfg: RunConfig = parse_json(text)?;
    cfg.fill_and_validate()?;
    Ok(cfg)
}

impl RunConfig {
    /// Minimal config: unit box with `cells` per axis, everything else default.
    pub fn new(cells: Vec<usize>) -> Result<Self> {
        let mut cfg = Self {
            dimension: cells.len(),
            grid: GridConfig {
                cells,
                lengths: None,
            },
            model: ModelConfig::default(),
            initial: InitialConfig::default(),
            time: TimeConfig::default(),
            output: OutputConfig::default(),
        };
        cfg.fill_and_validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn fill_and_validate(&mut self) -> Result<()> {
        let d = self.dimension;
        if !(1..=3).contains(&d) {
            return Err(config_err(
                "dimension",
                format!("must be 1, 2 or 3, got {d}"),
            ));
        }
        if self.grid.cells.len() != d {
            return Err(config_err(
                "grid.cells",
                format!("expected {d} entries, got {}", self.grid.cells.len()),
            ));
        }
        for (i, &n) in self.grid.cells.iter().enumerate() {
            if n < MIN_CELLS {
                return Err(config_err(
                    format!("grid.cells[{i}]"),
                    format!("need at least {MIN_CELLS} cells, got {n}"),
                ));
            }
        }
        let lengths = self.grid.lengths.get_or_insert_with(|| vec![1.0; d]);
        if lengths.len() != d {
            return Err(config_err(
                "grid.lengths",
                format!("expected {d} entries, got {}", lengths.len()),
            ));
        }
        for (i, &l) in lengths.iter().enumerate() {
            if !(l > 0.0 && l.is_finite()) {
                return Err(config_err(
                    format!("grid.lengths[{i}]"),
                    format!("must be positive, got {l}"),
                ));
            }
        }
        let lengths = lengths.clone();

        let m = &self.model;
        if !(m.chi >= 0.0 && m.chi.is_finite()) {
            return Err(config_err(
                "model.chi",
                format!("must be >= 0, got {}", m.chi),
            ));
        }
        if !(m.sigma >= 1.0 && m.sigma.is_finite()) {
            return Err(config_err(
                "model.sigma",
                format!("must be >= 1, got {}", m.sigma),
            ));
        }
        if !(m.xi > 0.0 && m.xi <= 1.0) {
            return Err(config_err(
                "model.xi",
                format!("must lie in (0, 1], got {}", m.xi),
            ));
        }
        if m.theory_n < 3 {
            return Err(config_err(
                "model.theory_n",
                format!("must be >= 3, got {}", m.theory_n),
            ));
        }
        m.reaction
            .spec()
            .validate()
            .map_err(|(field, msg)| config_err(format!("model.reaction.{field}"), msg))?;

        let init = &mut self.initial;
        match init.kind {
            InitialKind::Gaussian => {
                let center = init
                    .center
                    .get_or_insert_with(|| lengths.iter().map(|l| l / 2.0).collect());
                if center.len() != d {
                    return Err(config_err(
                        "initial.center",
                        format!("expected {d} entries, got {}", center.len()),
                    ));
                }
                if !(init.width > 0.0 && init.width.is_finite()) {
                    return Err(config_err("initial.width", "must be positive"));
                }
                if !(init.background >= 0.0 && init.amplitude >= 0.0) {
                    return Err(config_err(
                        "initial.amplitude",
                        "amplitude and background must be >= 0",
                    ));
                }
            }
            InitialKind::Constant | InitialKind::ConstantPlusNoise => {
                if !(init.amplitude >= 0.0 && init.amplitude.is_finite()) {
                    return Err(config_err("initial.amplitude", "must be >= 0"));
                }
                if !(init.noise >= 0.0 && init.noise.is_finite()) {
                    return Err(config_err("initial.noise", "must be >= 0"));
                }
            }
            InitialKind::FromSnapshot => {
                if init.path.is_none() {
                    return Err(config_err("initial.path", "required for from_snapshot"));
                }
            }
        }

        self.controls()
            .validate()
            .map_err(|e| config_err("time", e.to_string()))?;

        let out = &self.output;
        if out.cadence_steps == 0 {
            return Err(config_err("output.cadence_steps", "must be >= 1"));
        }
        if let Some(ks) = &out.norm_k_list {
            if ks.is_empty() {
                return Err(config_err("output.norm_k_list", "must not be empty"));
            }
            for (i, k) in ks.iter().enumerate() {
                if !(k.is_finite() && *k >= 1.0) {
                    return Err(config_err(
                        format!("output.norm_k_list[{i}]"),
                        format!("must be finite and >= 1, got {k}"),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid> {
        let lengths = self
            .grid
            .lengths
            .clone()
            .unwrap_or_else(|| vec![1.0; self.dimension]);
        Grid::new(&self.grid.cells, &lengths)
    }

    pub fn model_params(&self) -> ModelParams {
        ModelParams {
            chi: self.model.chi,
            sigma: self.model.sigma,
            xi: self.model.xi,
            reaction: self.model.reaction.spec(),
            theory_n: self.model.theory_n,
        }
    }

    pub fn controls(&self) -> StepControls {
        let t = &self.time;
        StepControls {
            t_end: t.t_end,
            dt_init: t.dt_init,
            dt_min: t.dt_min,
            dt_max: t.dt_max,
            cfl_advect: t.cfl_advect,
            cfl_react: t.cfl_react,
            u_blowup: t.u_blowup,
        }
    }

    pub fn initial_condition(&self) -> Result<InitialCondition> {
        let i = &self.initial;
        Ok(match i.kind {
            InitialKind::Constant => InitialCondition::Constant {
                amplitude: i.amplitude,
            },
            InitialKind::Gaussian => InitialCondition::Gaussian {
                background: i.background,
                amplitude: i.amplitude,
                center: i.center.clone().unwrap_or_else(|| {
                    self.grid()
                        .map(|g| g.lengths().iter().map(|l| l / 2.0).collect())
                        .unwrap_or_default()
                }),
                width: i.width,
            },
            InitialKind::ConstantPlusNoise => InitialCondition::ConstantPlusNoise {
                amplitude: i.amplitude,
                noise: i.noise,
                seed: i.seed,
            },
            InitialKind::FromSnapshot => InitialCondition::FromSnapshot {
                path: i
                    .path
                    .clone()
                    .ok_or_else(|| config_err("initial.path", "required for from_snapshot"))?,
            },
        })
    }

    pub fn diagnostic_spec(&self) -> DiagnosticSpec {
        DiagnosticSpec {
            cadence_steps: self.output.cadence_steps,
            norm_ks: self.output.norm_k_list.clone(),
        }
    }

    /// Non-fatal remarks about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.model.theory_n as usize != self.dimension {
            w.push(format!(
                "theory dimension n = {} differs from simulated dimension d = {}; \
                 regime verdicts refer to n",
                self.model.theory_n, self.dimension
            ));
        }
        if self.model.chi != 1.0 && self.model.reaction.variant == ReactionVariant::NonlocalLogistic
        {
            w.push("regime classification assumes chi = 1; it ignores the configured chi".into());
        }
        w
    }
}

/// `count` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeConfig {
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl RangeConfig {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let step = (self.max - self.min) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.max
                } else {
                    self.min + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub alpha_range: RangeConfig,
    pub beta_range: RangeConfig,
    pub base: RunConfig,
    #[serde(default = "one")]
    pub worker_count: usize,
}

fn one() -> usize {
    1
}

pub fn parse_sweep_config(text: &str) -> Result<SweepConfig> {
    let mut cfg: SweepConfig = parse_json(text)?;
    cfg.validate()?;
    Ok(cfg)
}

impl SweepConfig {
    pub fn validate(&mut self) -> Result<()> {
        for (name, r) in [
            ("alpha_range", &self.alpha_range),
            ("beta_range", &self.beta_range),
        ] {
            if r.count == 0 {
                return Err(config_err(format!("{name}.count"), "must be >= 1"));
            }
            if !(r.min.is_finite() && r.max.is_finite() && r.min <= r.max) {
                return Err(config_err(name, "need finite min <= max"));
            }
        }
        if self.worker_count == 0 {
            return Err(config_err("worker_count", "must be >= 1"));
        }
        self.base.fill_and_validate().map_err(|e| match e {
            Error::Config { path, message } => config_err(format!("base.{path}"), message),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sweep config serializes")
    }
}
