//! Writes a field to the binary snapshot format, reads it back bit-exactly
//! and restarts a run from it.

use chemoflow::config::{InitialKind, RunConfig};
use chemoflow::{read_snapshot, write_snapshot, Grid, InitialCondition};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join("chemoflow-snapshot-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("u0.chfs");

    let grid = Grid::new(&[20, 12], &[2.0, 1.0])?;
    let u = InitialCondition::ConstantPlusNoise {
        amplitude: 1.0,
        noise: 0.5,
        seed: 9,
    }
    .generate(grid)?;
    write_snapshot(&u, 0.25, &path)?;
    let (back, t) = read_snapshot(&path)?;
    let exact = u
        .values()
        .iter()
        .zip(back.values())
        .all(|(a, b)| a.to_bits() == b.to_bits());
    println!(
        "{} bytes, t = {t}, bit-exact: {exact}",
        std::fs::metadata(&path)?.len()
    );

    let mut cfg = RunConfig::new(vec![20, 12])?;
    cfg.grid.lengths = Some(vec![2.0, 1.0]);
    cfg.initial.kind = InitialKind::FromSnapshot;
    cfg.initial.path = Some(path.clone());
    cfg.fill_and_validate()?;
    let restarted = cfg.initial_condition()?.generate(cfg.grid()?)?;
    println!("restart matches snapshot: {}", restarted == u);
    Ok(())
}
