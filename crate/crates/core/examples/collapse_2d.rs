//! Classical Keller-Segel in 2-d (no reaction) with mass far above the
//! critical 8π aggregates into a spike; the stepper stops with
//! `BlowupDetected` once the peak passes `u_blowup`.

use chemoflow::{
    integrate, DiagnosticSpec, Grid, InitialCondition, ModelParams, StepControls, Stepper,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = Grid::unit(&[128, 128])?;
    let u0 = InitialCondition::Gaussian {
        background: 0.0,
        amplitude: 14_000.0,
        center: vec![0.5, 0.5],
        width: 0.08,
    }
    .generate(grid)?;
    println!(
        "mass {:.2} (8π = {:.2})",
        integrate(&u0)?,
        8.0 * std::f64::consts::PI
    );

    let controls = StepControls {
        t_end: 1.0,
        ..StepControls::default()
    };
    let out = Stepper::new(grid, ModelParams::default(), controls)?.run(
        u0,
        &DiagnosticSpec {
            cadence_steps: 1,
            norm_ks: Some(vec![1.0]),
        },
    )?;
    for r in out.series.rows() {
        println!(
            "t = {:.3e}  dt = {:.3e}  max u = {:.4e}  mass = {:.6}",
            r.t, r.dt, r.linf, r.mass
        );
    }
    println!("status {:?} at t = {:.6}", out.state.status, out.state.t);
    Ok(())
}
