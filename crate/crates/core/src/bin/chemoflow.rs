use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chemoflow::config::{parse_config, parse_sweep_config};
use chemoflow::reaction::{classify_regime, classify_sublinear, collapse_threshold_hint};
use chemoflow::snapshot::write_snapshot;
use chemoflow::stepper::{RunStatus, Stepper};
use chemoflow::sweep::{run_sweep, write_regime_csv};
use chemoflow::verify::{verify_lemmas, VerifyOptions};
use chemoflow::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_BLOWUP: u8 = 3;

#[derive(Parser)]
#[command(
    name = "chemoflow",
    version,
    about = "Chemotaxis simulations with nonlocal reaction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write diagnostics.csv plus snapshots.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run an (alpha, beta) sweep and write regime_map.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify (n, alpha, beta) against the boundedness conditions.
    Classify {
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true)]
        alpha: f64,
        #[arg(long, allow_hyphen_values = true)]
        beta: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: Option<f64>,
    },
    /// Run the lemma oracles and write a verification report.
    VerifyLemmas {
        #[arg(long, default_value_t = 50)]
        cases: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::NonFinite(_) | Error::Internal(_) => EXIT_NUMERICAL,
        _ => EXIT_USAGE,
    }
}

fn read(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn run(config: &Path, out: &Path) -> Result<u8, Error> {
    let mut cfg = parse_config(&read(config)?)?;
    cfg.fill_and_validate()?;
    for w in cfg.warnings() {
        eprintln!("warning: {w}");
    }
    let grid = cfg.grid()?;
    let u0 = cfg.initial_condition()?.generate(grid)?;
    let stepper = Stepper::new(grid, cfg.model_params(), cfg.controls())?;
    fs::create_dir_all(out)?;
    let every = cfg.output.snapshot_every;
    let output = stepper.run_with(u0, &cfg.diagnostic_spec(), |state| {
        if every > 0 && state.step_index % every == 0 {
            let name = format!("snapshot_{:08}.chfs", state.step_index);
            write_snapshot(&state.u, state.t, out.join(name))?;
        }
        Ok(())
    })?;
    output
        .series
        .write_csv(fs::File::create(out.join("diagnostics.csv"))?)?;
    let state = &output.state;
    write_snapshot(&state.u, state.t, out.join("final.chfs"))?;
    match state.status {
        RunStatus::Finished => {
            println!(
                "finished at t = {} after {} steps",
                state.t, state.step_index
            );
            Ok(0)
        }
        RunStatus::BlowupDetected => {
            println!(
                "blow-up detected at t = {} (max u = {:e}) after {} steps",
                state.t,
                state.u.max(),
                state.step_index
            );
            Ok(EXIT_BLOWUP)
        }
        _ => {
            eprintln!(
                "numerical failure at t = {}: {}",
                state.t,
                state.failure.as_deref().unwrap_or("unknown")
            );
            Ok(EXIT_NUMERICAL)
        }
    }
}

fn sweep(config: &Path, out: &Path) -> Result<u8, Error> {
    let sweep = parse_sweep_config(&read(config)?)?;
    let rows = run_sweep(&sweep)?;
    fs::create_dir_all(out)?;
    write_regime_csv(&rows, fs::File::create(out.join("regime_map.csv"))?)?;
    println!(
        "{} cells written to {}",
        rows.len(),
        out.join("regime_map.csv").display()
    );
    Ok(0)
}

fn classify(n: u32, alpha: f64, beta: f64, xi: Option<f64>) -> Result<u8, Error> {
    let v = classify_regime(n, alpha, beta)?;
    println!("verdict: {}", v.verdict);
    println!("lhs: {}", v.lhs);
    println!("rhs: {}", v.rhs);
    println!("beta > n/2: {}", collapse_threshold_hint(n, beta));
    if let Some(xi) = xi {
        println!(
            "sublinear production covered (n xi < 2 beta): {}",
            classify_sublinear(n, xi, beta)?
        );
    }
    Ok(0)
}

fn verify(cases: usize, seed: u64, out: &Path) -> Result<u8, Error> {
    let opts = VerifyOptions {
        cases,
        seed,
        ..VerifyOptions::default()
    };
    let report = verify_lemmas(&opts)?;
    report.write_to_dir(out)?;
    print!("{}", report.summary());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run { config, out } => run(config, out),
        Command::Sweep { config, out } => sweep(config, out),
        Command::Classify { n, alpha, beta, xi } => classify(*n, *alpha, *beta, *xi),
        Command::VerifyLemmas { cases, seed, out } => verify(*cases, *seed, out),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}
