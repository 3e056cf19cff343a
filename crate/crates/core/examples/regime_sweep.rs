//! Parallel (alpha, beta) sweep over small 2-d runs, printed as the regime
//! CSV. The observed column compares the late-time sup norm with the
//! mid-run one.

use chemoflow::config::{InitialKind, RangeConfig, RunConfig, SweepConfig};
use chemoflow::sweep::{run_sweep, write_regime_csv};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut base = RunConfig::new(vec![24, 24])?;
    base.initial.kind = InitialKind::Gaussian;
    base.initial.background = 1.0;
    base.initial.amplitude = 20.0;
    base.initial.width = 0.1;
    base.time.t_end = 2.0;
    base.output.cadence_steps = 5;

    let sweep = SweepConfig {
        alpha_range: RangeConfig {
            min: 1.5,
            max: 3.0,
            count: 4,
        },
        beta_range: RangeConfig {
            min: 1.5,
            max: 3.0,
            count: 4,
        },
        base,
        worker_count: std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let rows = run_sweep(&sweep)?;
    write_regime_csv(&rows, std::io::stdout().lock())?;
    Ok(())
}
