//! Drives a run from a JSON config, the same path the CLI takes, and writes
//! the diagnostics CSV to stdout.

use chemoflow::{parse_config, Stepper};

const CONFIG: &str = r#"{
  "dimension": 2,
  "grid": { "cells": [32, 32] },
  "model": {
    "chi": 1.0,
    "theory_n": 3,
    "reaction": { "variant": "nonlocal_logistic", "alpha": 2.0, "beta": 2.0 }
  },
  "initial": { "kind": "constant_plus_noise", "amplitude": 1.0, "noise": 0.4, "seed": 3 },
  "time": { "t_end": 0.5, "dt_max": 0.01 },
  "output": { "cadence_steps": 10, "norm_k_list": [1, 2, 4] }
}"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = parse_config(CONFIG)?;
    cfg.fill_and_validate()?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let grid = cfg.grid()?;
    let u0 = cfg.initial_condition()?.generate(grid)?;
    let out =
        Stepper::new(grid, cfg.model_params(), cfg.controls())?.run(u0, &cfg.diagnostic_spec())?;
    out.series.write_csv(std::io::stdout().lock())?;

    match parse_config(r#"{"dimension": 2, "grid": {"cells": [8, 8]}, "model": {"alpah": 2}}"#) {
        Ok(_) => unreachable!(),
        Err(e) => eprintln!("rejected typo: {e}"),
    }
    Ok(())
}
