//! Without chemotaxis and reaction the scheme reduces to implicit heat flow,
//! which conserves mass to rounding.

use chemoflow::{integrate, Grid, InitialCondition, ModelParams, RunStatus, StepControls, Stepper};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit(&[48, 48])?;
    let params = ModelParams {
        chi: 0.0,
        ..ModelParams::default()
    };
    let u0 = InitialCondition::ConstantPlusNoise {
        amplitude: 1.0,
        noise: 0.8,
        seed: 42,
    }
    .generate(grid)?;
    let m0 = integrate(&u0)?;
    let stepper = Stepper::new(grid, params, StepControls::fixed(1e-3, 1.0))?;
    let mut st = stepper.init(u0)?;
    while st.status == RunStatus::Running {
        stepper.step(&mut st)?;
        if st.step_index % 200 == 0 {
            let m = integrate(&st.u)?;
            println!(
                "step {:5}  t = {:.3}  mass drift {:+.3e}  spread {:.3e}",
                st.step_index,
                st.t,
                (m - m0) / m0,
                st.u.max() - st.u.min()
            );
        }
    }
    Ok(())
}
