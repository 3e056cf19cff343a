//! Energy-budget residuals of the L^k identity under joint (dt, h)
//! refinement, and the a-posteriori L-infinity certificate of a covered run.

use std::f64::consts::PI;

use chemoflow::diagnostics::{linf_certificate, CertificateParams};
use chemoflow::{
    DiagnosticSpec, Field, Grid, ModelParams, MoserSchedule, ReactionSpec, StepControls, Stepper,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
    let spec = DiagnosticSpec {
        cadence_steps: 1,
        norm_ks: Some(vec![2.0, 3.0, 4.0]),
    };
    let mut prev: Option<f64> = None;
    for n in [16usize, 32, 64] {
        let grid = Grid::unit(&[n, n])?;
        let u0 = Field::from_fn(grid, |x| 1.0 + 0.5 * (PI * x[0]).cos() * (PI * x[1]).cos());
        let out = Stepper::new(grid, params, StepControls::fixed(0.04 / n as f64, 0.1))?
            .run(u0, &spec)?;
        let worst = out
            .series
            .rows()
            .iter()
            .skip(1)
            .map(|r| r.energy_resid[0].abs())
            .fold(0.0, f64::max);
        let order = prev.map_or(f64::NAN, |p| (p / worst).log2());
        println!("h = 1/{n:<3} max |resid_2| = {worst:.4e}  order {order:.3}");
        prev = Some(worst);
    }

    let grid = Grid::unit(&[32, 32])?;
    let u0 = Field::from_fn(grid, |x| {
        1.0 + 2.0 * (PI * x[0]).cos().powi(2) * (PI * x[1]).cos().powi(2)
    });
    let controls = StepControls {
        t_end: 2.0,
        ..StepControls::default()
    };
    let out = Stepper::new(grid, params, controls)?.run(u0, &spec)?;
    let schedule = MoserSchedule::new(2.0, 2.0, 6)?;
    let cert = linf_certificate(
        &out.series,
        &schedule,
        &CertificateParams {
            a_bar: 2.0,
            r0: 1.0,
        },
    )?;
    println!(
        "observed sup ||u||_inf = {:.6}, certificate {:.6}",
        out.series.sup_linf(),
        cert
    );
    Ok(())
}
