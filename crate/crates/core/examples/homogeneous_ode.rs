//! Spatially constant data stay constant, so the PDE collapses to the ODE
//! `m' = m^alpha (1 - |Ω| m^beta)`. Compares the stepper against an adaptive
//! Dormand-Prince solution of that ODE.

use chemoflow::ode::Dopri5;
use chemoflow::{Field, Grid, ModelParams, ReactionSpec, RunStatus, StepControls, Stepper};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (alpha, beta, m0) = (1.0, 2.0, 2.0);
    let grid = Grid::unit(&[8])?;
    let params = ModelParams {
        chi: 0.0,
        ..ModelParams::with_reaction(ReactionSpec::nonlocal(alpha, beta))
    };

    let oracle = Dopri5::default().integrate(
        |_, y: &[f64], dy: &mut [f64]| dy[0] = y[0].powf(alpha) * (1.0 - y[0].powf(beta)),
        0.0,
        &[m0],
        1.0,
        |_, _| {},
    )?[0];

    for dt in [1e-3, 1e-4, 1e-5, 1e-6] {
        let stepper = Stepper::new(grid, params, StepControls::fixed(dt, 1.0))?;
        let mut st = stepper.init(Field::constant(grid, m0))?;
        while st.status == RunStatus::Running {
            stepper.step(&mut st)?;
        }
        println!(
            "dt = {dt:e}: u(1) = {:.12}, |u - m| = {:.3e}",
            st.u.max(),
            (st.u.max() - oracle).abs()
        );
    }
    println!("m(1) = {oracle:.12}");
    Ok(())
}
