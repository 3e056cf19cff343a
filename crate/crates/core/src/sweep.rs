//! Parallel (alpha, beta) sweeps producing a regime map.
//!
//! Each cell of the sweep is an independent run of the base configuration
//! with the nonlocal reaction at that (alpha, beta). The "observed" column is
//! an operational proxy for boundedness at a finite horizon, not a proof:
//!
//! * `blowup` if the run stopped with `BlowupDetected`;
//! * `bounded` if it finished and the sup of `||u||_inf` over the last 25% of
//!   the run is at most 1.05 times the sup over the middle 50%;
//! * `inconclusive` otherwise, and `error` if the job failed.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;

use crate::config::{RunConfig, SweepConfig};
use crate::error::{Error, Result};
use crate::reaction::{classify_regime, collapse_threshold_hint, ReactionVariant};
use crate::stepper::{RunOutput, RunStatus, Stepper};

/// Columns of the regime-map CSV, in order.
pub const REGIME_COLUMNS: [&str; 7] = [
    "alpha",
    "beta",
    "verdict",
    "beta_gt_n_over_2",
    "observed",
    "sup_linf",
    "t_stop",
];

/// Growth allowed between the middle and final windows for `bounded`.
pub const BOUNDED_RATIO: f64 = 1.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observed {
    Bounded,
    Blowup,
    Inconclusive,
    Error,
}

impl fmt::Display for Observed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Observed::Bounded => "bounded",
            Observed::Blowup => "blowup",
            Observed::Inconclusive => "inconclusive",
            Observed::Error => "error",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegimeRow {
    pub alpha: f64,
    pub beta: f64,
    /// Classifier verdict, or `HypothesisViolated` when the tuple is outside
    /// the classifier's domain.
    pub verdict: String,
    pub beta_gt_n_over_2: bool,
    pub observed: Observed,
    pub sup_linf: f64,
    pub t_stop: f64,
}

/// Applies the windowed boundedness rule to a finished run.
pub fn classify_observed(out: &RunOutput, t_end: f64) -> Observed {
    match out.state.status {
        RunStatus::BlowupDetected => Observed::Blowup,
        RunStatus::StepFailure | RunStatus::Running => Observed::Error,
        RunStatus::Finished => {
            let mid = out.series.sup_linf_between(0.25 * t_end, 0.75 * t_end);
            let last = out.series.sup_linf_between(0.75 * t_end, t_end);
            match (mid, last) {
                (Some(m), Some(l)) if l <= BOUNDED_RATIO * m => Observed::Bounded,
                _ => Observed::Inconclusive,
            }
        }
    }
}

/// Configuration of one sweep cell.
pub fn job_config(base: &RunConfig, alpha: f64, beta: f64) -> RunConfig {
    let mut cfg = base.clone();
    cfg.model.reaction.variant = ReactionVariant::NonlocalLogistic;
    cfg.model.reaction.alpha = alpha;
    cfg.model.reaction.beta = beta;
    cfg
}

fn run_job(cfg: &RunConfig) -> Result<RunOutput> {
    let mut cfg = cfg.clone();
    cfg.fill_and_validate()?;
    let grid = cfg.grid()?;
    let u0 = cfg.initial_condition()?.generate(grid)?;
    Stepper::new(grid, cfg.model_params(), cfg.controls())?.run(u0, &cfg.diagnostic_spec())
}

/// Runs one (alpha, beta) cell.
pub fn sweep_cell(base: &RunConfig, alpha: f64, beta: f64) -> RegimeRow {
    let n = base.model.theory_n;
    let verdict = match classify_regime(n, alpha, beta) {
        Ok(v) => v.verdict.to_string(),
        Err(_) => "HypothesisViolated".to_string(),
    };
    let cfg = job_config(base, alpha, beta);
    let (observed, sup_linf, t_stop) = match run_job(&cfg) {
        Ok(out) => (
            classify_observed(&out, cfg.time.t_end),
            out.series.sup_linf(),
            out.state.t,
        ),
        Err(_) => (Observed::Error, f64::NAN, 0.0),
    };
    RegimeRow {
        alpha,
        beta,
        verdict,
        beta_gt_n_over_2: collapse_threshold_hint(n, beta),
        observed,
        sup_linf,
        t_stop,
    }
}

/// Runs every (alpha, beta) cell on a pool of `worker_count` threads. Rows
/// come back sorted by alpha, then beta, whatever the completion order.
pub fn run_sweep(sweep: &SweepConfig) -> Result<Vec<RegimeRow>> {
    let mut sweep = sweep.clone();
    sweep.validate()?;
    let jobs: Vec<(f64, f64)> = sweep
        .alpha_range
        .values()
        .into_iter()
        .flat_map(|a| sweep.beta_range.values().into_iter().map(move |b| (a, b)))
        .collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(sweep.worker_count)
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    let base = &sweep.base;
    let mut rows: Vec<RegimeRow> = pool.install(|| {
        jobs.par_iter()
            .map(|&(a, b)| sweep_cell(base, a, b))
            .collect()
    });
    rows.sort_by(|x, y| x.alpha.total_cmp(&y.alpha).then(x.beta.total_cmp(&y.beta)));
    Ok(rows)
}

pub fn write_regime_csv<W: Write>(rows: &[RegimeRow], mut w: W) -> Result<()> {
    writeln!(w, "{}", REGIME_COLUMNS.join(","))?;
    for r in rows {
        writeln!(
            w,
            "{:?},{:?},{},{},{},{:?},{:?}",
            r.alpha, r.beta, r.verdict, r.beta_gt_n_over_2, r.observed, r.sup_linf, r.t_stop
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RangeConfig;

    fn small_base() -> RunConfig {
        let mut base = RunConfig::new(vec![8, 8]).unwrap();
        base.time.t_end = 0.2;
        base.time.dt_max = 0.01;
        base.initial.kind = crate::config::InitialKind::ConstantPlusNoise;
        base.initial.noise = 0.3;
        base.output.cadence_steps = 1;
        base
    }

    #[test]
    fn single_cell_matches_plain_run() {
        let base = small_base();
        let sweep = SweepConfig {
            alpha_range: RangeConfig {
                min: 2.0,
                max: 2.0,
                count: 1,
            },
            beta_range: RangeConfig {
                min: 2.0,
                max: 2.0,
                count: 1,
            },
            base: base.clone(),
            worker_count: 1,
        };
        let rows = run_sweep(&sweep).unwrap();
        assert_eq!(rows.len(), 1);
        let out = run_job(&job_config(&base, 2.0, 2.0)).unwrap();
        assert_eq!(rows[0].sup_linf, out.series.sup_linf());
        assert_eq!(rows[0].t_stop, out.state.t);
        assert_eq!(rows[0].observed, classify_observed(&out, 0.2));
        assert_eq!(rows[0].verdict, "CoveredCase1");
    }

    #[test]
    fn invalid_tuple_is_recorded_not_fatal() {
        let row = sweep_cell(&small_base(), 2.0, 0.5);
        assert_eq!(row.verdict, "HypothesisViolated");
        assert_eq!(row.observed, Observed::Error);
    }

    #[test]
    fn csv_header() {
        let mut buf = Vec::new();
        write_regime_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "alpha,beta,verdict,beta_gt_n_over_2,observed,sup_linf,t_stop\n"
        );
    }
}
