//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary (`harness = false`). The process fails when a
//! criterion fails unexpectedly. Criteria listed in `KNOWN_DEFECTS` are
//! internally inconsistent as stated; they are evaluated exactly as written
//! and reported as FAIL without failing the process.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use chemoflow::config::{InitialKind, RangeConfig, RunConfig, SweepConfig};
use chemoflow::lemmas::{band_limited_field, check_interpolation, InterpolationCase};
use chemoflow::ode::Dopri5;
use chemoflow::spectral::apply_screened;
use chemoflow::sweep::{run_sweep, write_regime_csv};
use chemoflow::verify::{iteration_batch, relative_spread};
use chemoflow::{
    classify_regime, integrate, DiagnosticSpec, Field, Grid, InitialCondition, ModelParams,
    ReactionSpec, Regime, RunStatus, SpectralSolver, StepControls, Stepper,
};

const KNOWN_DEFECTS: [(&str, &str); 2] = [
    (
        "C2",
        "1e-8 continuum bound contradicts the required second-order ratio (error ~1.8e-4 at 64 cells)",
    ),
    (
        "C9",
        "(n, r, q) = (3, 2, 4) violates q/r < 2/r + 1 - 2/p, so the oracle rejects it",
    ),
];

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
    secs: f64,
}

fn criterion(id: &'static str, name: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (pass, detail) = f();
    let secs = start.elapsed().as_secs_f64();
    let tag = if pass { "PASS" } else { "FAIL" };
    let known = KNOWN_DEFECTS
        .iter()
        .find(|(k, _)| *k == id && !pass)
        .map(|(_, why)| format!(" [known defect: {why}]"))
        .unwrap_or_default();
    println!("{tag} {id} {name}: {detail} ({secs:.2} s){known}");
    Outcome {
        id,
        name,
        pass,
        detail,
        secs,
    }
}

fn runtime_ok(secs: f64, limit: f64) -> String {
    format!("runtime {secs:.1} s vs limit {limit} s")
}

fn c1_steady_state() -> (bool, String) {
    let start = Instant::now();
    let grid = Grid::unit(&[64, 64]).unwrap();
    let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
    let controls = StepControls {
        t_end: 10.0,
        ..StepControls::default()
    };
    let stepper = Stepper::new(grid, params, controls).unwrap();
    let mut worst: f64 = 0.0;
    let out = stepper
        .run_with(
            Field::constant(grid, 1.0),
            &DiagnosticSpec::default(),
            |s| {
                let d =
                    s.u.values()
                        .iter()
                        .fold(0.0f64, |m, v| m.max((v - 1.0).abs()));
                worst = worst.max(d);
                Ok(())
            },
        )
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = out.state.status == RunStatus::Finished && worst <= 1e-9 && secs < 10.0;
    (
        pass,
        format!(
            "max_t ||u - 1||_inf = {worst:.3e} over {} steps, {}",
            out.state.step_index,
            runtime_ok(secs, 10.0)
        ),
    )
}

fn cosine_solve_error(n: usize) -> (f64, f64) {
    let grid = Grid::unit(&[n]).unwrap();
    let rhs = Field::from_fn(grid, |x| (1.0 + PI * PI) * (PI * x[0]).cos());
    let c = SpectralSolver::new(grid).solve(1.0, 1.0, &rhs).unwrap();
    let exact = Field::from_fn(grid, |x| (PI * x[0]).cos());
    let err = c
        .values()
        .iter()
        .zip(exact.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    let back = apply_screened(1.0, 1.0, &c);
    let resid = back
        .values()
        .iter()
        .zip(rhs.values())
        .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    (err, resid)
}

fn c2_manufactured() -> (bool, String) {
    let (e64, r64) = cosine_solve_error(64);
    let (e128, _) = cosine_solve_error(128);
    let ratio = e64 / e128;
    let parts = [e64 <= 1e-8, r64 <= 1e-10, (3.5..=4.5).contains(&ratio)];
    (
        parts.iter().all(|&p| p),
        format!(
            "continuum error {e64:.3e} (<= 1e-8: {}), residual {r64:.3e} (<= 1e-10: {}), ratio 64->128 {ratio:.4} (in [3.5, 4.5]: {})",
            parts[0], parts[1], parts[2]
        ),
    )
}

fn c3_conservation() -> (bool, String) {
    let grid = Grid::unit(&[32, 32]).unwrap();
    let params = ModelParams {
        chi: 0.0,
        ..ModelParams::default()
    };
    let u0 = InitialCondition::ConstantPlusNoise {
        amplitude: 1.0,
        noise: 0.5,
        seed: 11,
    }
    .generate(grid)
    .unwrap();
    let m0 = integrate(&u0).unwrap();
    let stepper = Stepper::new(grid, params, StepControls::fixed(1e-3, 1.0)).unwrap();
    let mut st = stepper.init(u0).unwrap();
    let mut steps = 0;
    while st.status == RunStatus::Running {
        stepper.step(&mut st).unwrap();
        steps += 1;
    }
    let drift = (integrate(&st.u).unwrap() - m0).abs() / m0;
    (
        drift <= 1e-11 && steps == 1000,
        format!(
            "{steps} steps, relative mass drift {drift:.3e}, clipped {:.1e}",
            st.clipped_mass_cum
        ),
    )
}

fn c4_ode_match() -> (bool, String) {
    let grid = Grid::unit(&[8]).unwrap();
    let mut params = ModelParams::with_reaction(ReactionSpec::nonlocal(1.0, 2.0));
    params.chi = 0.0;
    let stepper = Stepper::new(grid, params, StepControls::fixed(1e-6, 1.0)).unwrap();
    let mut st = stepper.init(Field::constant(grid, 2.0)).unwrap();
    while st.status == RunStatus::Running {
        stepper.step(&mut st).unwrap();
    }
    let oracle = Dopri5::default()
        .integrate(
            |_, y: &[f64], dy: &mut [f64]| dy[0] = y[0] * (1.0 - y[0] * y[0]),
            0.0,
            &[2.0],
            1.0,
            |_, _| {},
        )
        .unwrap()[0];
    let closed = 1.0 / (1.0 + (0.25 - 1.0) * (-2.0f64).exp()).sqrt();
    let err =
        st.u.values()
            .iter()
            .fold(0.0f64, |m, v| m.max((v - oracle).abs()));
    (
        err <= 1e-5 && (oracle - closed).abs() < 1e-9 && (st.t - 1.0).abs() < 1e-12,
        format!(
            "||u(1) - m(1)||_inf = {err:.3e}, m(1) = {oracle:.12} (closed form differs by {:.1e})",
            (oracle - closed).abs()
        ),
    )
}

fn c5_bounded_3d() -> (bool, String) {
    let start = Instant::now();
    let grid = Grid::unit(&[48, 48, 48]).unwrap();
    let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
    let u0 = InitialCondition::Gaussian {
        background: 1.0,
        amplitude: 50.0,
        center: vec![0.5, 0.5, 0.5],
        width: 0.1,
    }
    .generate(grid)
    .unwrap();
    let controls = StepControls {
        t_end: 5.0,
        dt_max: 5e-3,
        ..StepControls::default()
    };
    let spec = DiagnosticSpec {
        cadence_steps: 1,
        norm_ks: Some(vec![1.0, 2.0]),
    };
    let out = Stepper::new(grid, params, controls)
        .unwrap()
        .run(u0, &spec)
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let early = out.series.sup_linf_between(1.25, 2.5).unwrap_or(f64::NAN);
    let late = out.series.sup_linf_between(2.5, 5.0).unwrap_or(f64::NAN);
    let pass = out.state.status == RunStatus::Finished && late <= 1.05 * early && secs < 300.0;
    (
        pass,
        format!(
            "status {:?}, sup_[1.25,2.5] = {early:.6}, sup_[2.5,5] = {late:.6}, initial max {:.2}, {} steps, {}",
            out.state.status,
            out.series.rows()[0].linf,
            out.state.step_index,
            runtime_ok(secs, 300.0)
        ),
    )
}

fn c6_collapse_2d() -> (bool, String) {
    let start = Instant::now();
    let grid = Grid::unit(&[128, 128]).unwrap();
    let u0 = InitialCondition::Gaussian {
        background: 0.0,
        amplitude: 14_000.0,
        center: vec![0.5, 0.5],
        width: 0.08,
    }
    .generate(grid)
    .unwrap();
    let mass = integrate(&u0).unwrap();
    let controls = StepControls {
        t_end: 1.0,
        ..StepControls::default()
    };
    let out = Stepper::new(grid, ModelParams::default(), controls)
        .unwrap()
        .run(
            u0,
            &DiagnosticSpec {
                cadence_steps: 10,
                norm_ks: Some(vec![1.0]),
            },
        )
        .unwrap();
    let secs = start.elapsed().as_secs_f64();
    let pass = mass >= 500.0
        && out.state.status == RunStatus::BlowupDetected
        && out.state.t < 1.0
        && secs < 120.0;
    (
        pass,
        format!(
            "mass {mass:.1}, status {:?} at t = {:.5} with max u = {:.3e}, {}",
            out.state.status,
            out.state.t,
            out.state.u.max(),
            runtime_ok(secs, 120.0)
        ),
    )
}

/// Exact verdict for `alpha = i/8`, `beta = j/8` in integer arithmetic.
fn rational_verdict(n: i64, i: i64, j: i64) -> Regime {
    if i >= 16 {
        // alpha < 1 + 2 beta / n  <=>  n (i - 8) < 2 j
        if n * (i - 8) < 2 * j {
            Regime::CoveredCase1
        } else {
            Regime::NotCovered
        }
    } else if (n + 2) * (16 - i) < n * (8 - i) + 2 * j {
        Regime::CoveredCase2
    } else {
        Regime::NotCovered
    }
}

fn c7_classifier() -> (bool, String) {
    let mut total = 0;
    let mut agree = 0;
    let mut check = |n: u32, a: f64, b: f64, want: Regime| {
        total += 1;
        if classify_regime(n, a, b).map(|v| v.verdict).ok() == Some(want) {
            agree += 1;
        }
    };
    check(3, 2.0, 2.0, Regime::CoveredCase1);
    check(3, 2.0, 1.5, Regime::NotCovered);
    check(4, 1.5, 4.0, Regime::CoveredCase2);
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..20 {
        let n: i64 = rng.gen_range(3..=8);
        let i: i64 = rng.gen_range(8..=32);
        let j: i64 = rng.gen_range(9..=48);
        check(
            n as u32,
            i as f64 / 8.0,
            j as f64 / 8.0,
            rational_verdict(n, i, j),
        );
    }
    // alpha = 1 + 2 beta / n exactly
    for (n, a, b) in [
        (3, 2.5, 2.25),
        (4, 2.5, 3.0),
        (3, 3.0, 3.0),
        (6, 2.0, 3.0),
        (5, 3.5, 6.25),
    ] {
        check(n, a, b, Regime::NotCovered);
    }
    (agree == total, format!("{agree}/{total} verdicts agree"))
}

fn c8_iteration() -> (bool, String) {
    let start = Instant::now();
    let rows = iteration_batch(50, 8, 6, 10.0).unwrap();
    let secs = start.elapsed().as_secs_f64();
    let worst = rows
        .iter()
        .map(|r| r.max_ratio)
        .fold(f64::NEG_INFINITY, f64::max);
    (
        rows.len() == 50 && worst <= 1.0 + 1e-6 && secs < 30.0,
        format!(
            "50 cases, k <= 6, max ratio {worst:.9}, {}",
            runtime_ok(secs, 30.0)
        ),
    )
}

/// Largest `required_Cn` over `fields` band-limited fields on `coarse` and
/// `fine` cube grids.
fn interpolation_maxima(
    case: &InterpolationCase,
    fields: usize,
    coarse: usize,
    fine: usize,
    scale: f64,
) -> (f64, f64, bool) {
    let gc = Grid::unit_cube(3, coarse).unwrap();
    let gf = Grid::unit_cube(3, fine).unwrap();
    let mut finite = true;
    let (mut mc, mut mf) = (0.0f64, 0.0f64);
    for seed in 0..fields as u64 {
        let vc = band_limited_field(gc, 3, seed).map(|x| scale * x);
        let vf = band_limited_field(gf, 3, seed).map(|x| scale * x);
        let rc = check_interpolation(case, &vc).unwrap().required_cn;
        let rf = check_interpolation(case, &vf).unwrap().required_cn;
        finite &= rc.is_finite() && rf.is_finite();
        mc = mc.max(rc);
        mf = mf.max(rf);
    }
    (mc, mf, finite)
}

fn c9_interpolation() -> (bool, String) {
    match InterpolationCase::new(3, 2.0, 4.0, 1.0, 1.0) {
        Err(e) => (false, format!("(r, q) = (2, 4) rejected: {e}")),
        Ok(case) => {
            let (c, f, finite) = interpolation_maxima(&case, 100, 32, 64, 1.0);
            let spread = relative_spread(c, f);
            (
                finite && spread < 0.25,
                format!("max required_Cn {c:.4e} (32^3) vs {f:.4e} (64^3), spread {spread:.3}"),
            )
        }
    }
}

fn c9b_interpolation_admissible() -> (bool, String) {
    let case = InterpolationCase::new(3, 2.0, 3.0, 1.0, 1.0).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for s in [0.1, 1.0, 10.0] {
        let (c, f, finite) = interpolation_maxima(&case, 100, 32, 64, s);
        let spread = relative_spread(c, f);
        pass &= finite && spread < 0.25;
        parts.push(format!("s = {s}: {c:.4e} vs {f:.4e} (spread {spread:.3})"));
    }
    (
        pass,
        format!(
            "(r, q) = (2, 3), 100 fields, 32^3 vs 64^3: {}",
            parts.join("; ")
        ),
    )
}

/// Max `|energy_resid_2|` over a fixed-step run on an `n x n` grid.
fn energy_residual(n: usize, dt: f64, t_end: f64, u0: impl Fn([f64; 3]) -> f64) -> f64 {
    let grid = Grid::unit(&[n, n]).unwrap();
    let params = ModelParams::with_reaction(ReactionSpec::nonlocal(2.0, 2.0));
    let spec = DiagnosticSpec {
        cadence_steps: 1,
        norm_ks: Some(vec![2.0]),
    };
    let out = Stepper::new(grid, params, StepControls::fixed(dt, t_end))
        .unwrap()
        .run(Field::from_fn(grid, u0), &spec)
        .unwrap();
    assert_eq!(out.state.status, RunStatus::Finished);
    out.series
        .rows()
        .iter()
        .skip(1)
        .map(|r| r.energy_resid[0].abs())
        .fold(0.0, f64::max)
}

fn c10_energy_audit() -> (bool, String) {
    let smooth = |x: [f64; 3]| 1.0 + 0.5 * (PI * x[0]).cos() * (PI * x[1]).cos();
    let levels = [16usize, 32, 64];
    let res: Vec<f64> = levels
        .iter()
        .map(|&n| energy_residual(n, 0.04 / n as f64, 0.1, smooth))
        .collect();
    let orders: Vec<f64> = res.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let steady = energy_residual(32, 1e-3, 0.1, |_| 1.0);
    let pass =
        res.windows(2).all(|w| w[1] < w[0]) && orders.iter().all(|&p| p >= 0.8) && steady <= 1e-11;
    (
        pass,
        format!(
            "residuals {:.3e}, {:.3e}, {:.3e} at h = 1/16, 1/32, 1/64 (orders {:.3}, {:.3}); steady residual {steady:.1e}",
            res[0], res[1], res[2], orders[0], orders[1]
        ),
    )
}

fn determinism_config() -> RunConfig {
    let mut cfg = RunConfig::new(vec![16, 16]).unwrap();
    cfg.model.reaction.variant = chemoflow::ReactionVariant::NonlocalLogistic;
    cfg.initial.kind = InitialKind::ConstantPlusNoise;
    cfg.initial.noise = 0.4;
    cfg.initial.seed = 5;
    cfg.time.t_end = 0.5;
    cfg.output.cadence_steps = 1;
    cfg
}

fn run_csv(cfg: &RunConfig) -> Vec<u8> {
    let mut cfg = cfg.clone();
    cfg.fill_and_validate().unwrap();
    let grid = cfg.grid().unwrap();
    let u0 = cfg.initial_condition().unwrap().generate(grid).unwrap();
    let out = Stepper::new(grid, cfg.model_params(), cfg.controls())
        .unwrap()
        .run(u0, &cfg.diagnostic_spec())
        .unwrap();
    let mut buf = Vec::new();
    out.series.write_csv(&mut buf).unwrap();
    buf
}

fn sweep_csv(workers: usize) -> Vec<u8> {
    let mut base = determinism_config();
    base.grid.cells = vec![8, 8];
    base.time.t_end = 0.3;
    let sweep = SweepConfig {
        alpha_range: RangeConfig {
            min: 1.0,
            max: 3.0,
            count: 4,
        },
        beta_range: RangeConfig {
            min: 1.5,
            max: 3.0,
            count: 4,
        },
        base,
        worker_count: workers,
    };
    let mut buf = Vec::new();
    write_regime_csv(&run_sweep(&sweep).unwrap(), &mut buf).unwrap();
    buf
}

fn c11_determinism() -> (bool, String) {
    let cfg = determinism_config();
    let a = run_csv(&cfg);
    let b = run_csv(&cfg);
    let s1 = sweep_csv(1);
    let s8 = sweep_csv(8);
    (
        a == b && s1 == s8,
        format!(
            "run twice identical: {} ({} bytes); sweep 1 vs 8 workers identical: {} ({} bytes)",
            a == b,
            a.len(),
            s1 == s8,
            s1.len()
        ),
    )
}

fn main() {
    let outcomes = vec![
        criterion("C1", "steady-state fidelity", c1_steady_state),
        criterion("C2", "manufactured chemical solve", c2_manufactured),
        criterion("C3", "mass conservation", c3_conservation),
        criterion("C4", "homogeneous ODE match", c4_ode_match),
        criterion("C5", "boundedness in covered regime", c5_bounded_3d),
        criterion("C6", "collapse without reaction", c6_collapse_2d),
        criterion("C7", "classifier truth table", c7_classifier),
        criterion("C8", "iteration lemma oracle", c8_iteration),
        criterion("C9", "interpolation lemma oracle", c9_interpolation),
        criterion(
            "C9b",
            "interpolation oracle at admissible (r, q) = (2, 3), informational",
            c9b_interpolation_admissible,
        ),
        criterion("C10", "energy-budget audit", c10_energy_audit),
        criterion("C11", "determinism", c11_determinism),
    ];
    let passed = outcomes.iter().filter(|o| o.pass).count();
    let unexpected: Vec<&Outcome> = outcomes
        .iter()
        .filter(|o| !o.pass && !KNOWN_DEFECTS.iter().any(|(k, _)| *k == o.id))
        .collect();
    let total_secs: f64 = outcomes.iter().map(|o| o.secs).sum();
    println!(
        "acceptance: {passed}/{} passed, {} known defects, {} unexpected failures, {total_secs:.1} s",
        outcomes.len(),
        outcomes.iter().filter(|o| !o.pass).count() - unexpected.len(),
        unexpected.len()
    );
    if !unexpected.is_empty() {
        for o in unexpected {
            eprintln!("unexpected failure {} {}: {}", o.id, o.name, o.detail);
        }
        std::process::exit(1);
    }
}
