//! A tall Gaussian bump in 3-d with the nonlocal reaction (alpha = beta = 2,
//! a covered parameter pair) relaxes instead of concentrating.
//!
//! `cargo run --release --example bounded_3d -- 48` reproduces the full-size
//! run; the default is a quicker 24^3 grid.

use chemoflow::{
    DiagnosticSpec, Grid, InitialCondition, ModelParams, ReactionSpec, StepControls, Stepper,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(24);
    let grid = Grid::unit_cube(3, n)?;
    let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
    let u0 = InitialCondition::Gaussian {
        background: 1.0,
        amplitude: 50.0,
        center: vec![0.5; 3],
        width: 0.1,
    }
    .generate(grid)?;
    let controls = StepControls {
        t_end: 5.0,
        dt_max: 5e-3,
        ..StepControls::default()
    };
    let spec = DiagnosticSpec {
        cadence_steps: 1,
        norm_ks: Some(vec![1.0, 2.0, 4.0]),
    };
    let out = Stepper::new(grid, params, controls)?.run(u0, &spec)?;

    for r in out.series.rows().iter().step_by(100) {
        println!(
            "t = {:6.3}  ||u||_inf = {:10.5}  mass = {:.6}  int u^2 = {:.6}",
            r.t, r.linf, r.mass, r.nonlocal_integral
        );
    }
    let early = out.series.sup_linf_between(1.25, 2.5).unwrap_or(f64::NAN);
    let late = out.series.sup_linf_between(2.5, 5.0).unwrap_or(f64::NAN);
    println!(
        "status {:?}; sup over [1.25, 2.5] = {early:.6}, over [2.5, 5] = {late:.6}",
        out.state.status
    );
    Ok(())
}
