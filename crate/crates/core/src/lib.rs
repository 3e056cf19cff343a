//! Simulation of the parabolic-elliptic chemotaxis system with a nonlocal
//! nonlinear reaction on a box with no-flux boundaries:
//!
//! ```text
//! u_t = Δu - χ ∇·(u^σ ∇c) + f(u),      0 = Δc - c + u^ξ,
//! f(u) = u^α (1 - ∫ u^β)
//! ```
//!
//! The crate provides a cell-centered finite-volume discretization, a DCT
//! based screened-Poisson solver, an IMEX stepper with blow-up detection,
//! diagnostics (norms, energy budgets, an a-posteriori `L∞` certificate), a
//! regime classifier for `(n, α, β)`, parallel parameter sweeps and numerical
//! oracles for the interpolation and iteration lemmas used in the
//! boundedness theory.
//!
//! ```
//! use chemoflow::{Grid, ModelParams, ReactionSpec, StepControls, Stepper, DiagnosticSpec, Field};
//!
//! let grid = Grid::unit(&[16, 16]).unwrap();
//! let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
//! let controls = StepControls { t_end: 0.1, ..StepControls::default() };
//! let stepper = Stepper::new(grid, params, controls).unwrap();
//! let out = stepper.run(Field::constant(grid, 1.0), &DiagnosticSpec::default()).unwrap();
//! assert!((out.state.u.max() - 1.0).abs() < 1e-12);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod lemmas;
pub mod ode;
pub mod reaction;
pub mod snapshot;
pub mod spectral;
pub mod stepper;
pub mod sweep;
pub mod verify;

pub use config::{parse_config, parse_sweep_config, RunConfig, SweepConfig};
pub use diagnostics::{
    dropped_chemical_term, energy_budget_residual, linf_certificate, moser_bound, DiagnosticRow,
    DiagnosticSeries, DiagnosticSpec, MoserSchedule,
};
pub use error::{Error, Result, SnapshotError};
pub use grid::{advective_divergence, gradient_sq_integral, integrate, lk_norm, Field, Grid};
pub use lemmas::{
    check_interpolation, check_iteration_bound, InterpolationCase, IterationCase, Y0Profile,
};
pub use reaction::{
    classify_regime, classify_sublinear, collapse_threshold_hint, eval_reaction, ReactionSpec,
    ReactionVariant, Regime, RegimeVerdict,
};
pub use snapshot::{read_snapshot, write_snapshot};
pub use spectral::{
    screened_poisson_solve, solve_chemical, ScreenedPoissonProblem, SpectralSolver,
};
pub use stepper::{
    InitialCondition, ModelParams, RunOutput, RunState, RunStatus, StepControls, Stepper,
};
pub use sweep::{run_sweep, Observed, RegimeRow};
