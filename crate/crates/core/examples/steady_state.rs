//! The constant state u = 1 is an equilibrium of the nonlocal model on a
//! unit box. Runs it to t = 10 and reports the largest deviation seen.

use chemoflow::{DiagnosticSpec, Field, Grid, ModelParams, ReactionSpec, StepControls, Stepper};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit(&[64, 64])?;
    let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
    let controls = StepControls {
        t_end: 10.0,
        ..StepControls::default()
    };
    let stepper = Stepper::new(grid, params, controls)?;

    let mut worst = 0.0f64;
    let out = stepper.run_with(
        Field::constant(grid, 1.0),
        &DiagnosticSpec::default(),
        |s| {
            worst = worst
                .max((s.u.max() - 1.0).abs())
                .max((s.u.min() - 1.0).abs());
            Ok(())
        },
    )?;
    println!(
        "status {:?} at t = {} after {} steps",
        out.state.status, out.state.t, out.state.step_index
    );
    println!("max_t ||u - 1||_inf = {worst:e}");
    Ok(())
}
