//! Batch verification report for the lemma oracles.
//!
//! Every case draws from its own generator seeded by `(seed, index)`, so the
//! report does not depend on how the batch is scheduled.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::Result;
use crate::grid::Grid;
use crate::lemmas::{
    band_limited_field, check_interpolation, check_iteration_bound, random_iteration_case,
    InterpolationCase, IterationCase, Y0Profile,
};

/// Slack on the iteration ratio for integration error.
pub const ITERATION_TOL: f64 = 1e-6;
/// Allowed relative spread of `max required_Cn` between resolutions.
pub const REFINEMENT_TOL: f64 = 0.25;

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub cases: usize,
    pub seed: u64,
    pub k_max: u32,
    pub t_end: f64,
    pub fields: usize,
    pub max_mode: usize,
    pub r: f64,
    pub q: f64,
    pub c0: f64,
    pub c1: f64,
    pub coarse_cells: usize,
    pub fine_cells: usize,
    pub scales: Vec<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            cases: 50,
            seed: 0,
            k_max: 6,
            t_end: 10.0,
            fields: 20,
            max_mode: 3,
            r: 2.0,
            q: 3.0,
            c0: 1.0,
            c1: 1.0,
            coarse_cells: 16,
            fine_cells: 32,
            scales: vec![0.1, 1.0, 10.0],
        }
    }
}

/// Seed of case `index` in a batch started from `seed`.
pub fn case_seed(seed: u64, index: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (index as u64).wrapping_add(1)
}

#[derive(Debug, Clone)]
pub struct IterationRow {
    pub index: usize,
    pub case: IterationCase,
    pub max_ratio: f64,
}

#[derive(Debug, Clone)]
pub struct InterpolationRow {
    pub index: usize,
    pub scale: f64,
    pub coarse_cn: f64,
    pub fine_cn: f64,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub options: VerifyOptions,
    pub iteration: Vec<IterationRow>,
    pub interpolation: Vec<InterpolationRow>,
    /// Set when the interpolation exponents are inadmissible.
    pub interpolation_error: Option<String>,
}

/// Runs `cases` random iteration cases.
pub fn iteration_batch(
    cases: usize,
    seed: u64,
    k_max: u32,
    t_end: f64,
) -> Result<Vec<IterationRow>> {
    (0..cases)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(case_seed(seed, index));
            let case = random_iteration_case(&mut rng, k_max);
            let check = check_iteration_bound(&case, t_end)?;
            Ok(IterationRow {
                index,
                case,
                max_ratio: check.max_ratio,
            })
        })
        .collect()
}

/// `required_Cn` for `fields` band-limited fields at two resolutions and
/// every scale.
pub fn interpolation_batch(opts: &VerifyOptions) -> Result<Vec<InterpolationRow>> {
    let case = InterpolationCase::new(3, opts.r, opts.q, opts.c0, opts.c1)?;
    let coarse = Grid::unit_cube(3, opts.coarse_cells)?;
    let fine = Grid::unit_cube(3, opts.fine_cells)?;
    let per_field: Vec<Vec<InterpolationRow>> = (0..opts.fields)
        .into_par_iter()
        .map(|index| {
            let seed = case_seed(opts.seed, index);
            let vc = band_limited_field(coarse, opts.max_mode, seed);
            let vf = band_limited_field(fine, opts.max_mode, seed);
            opts.scales
                .iter()
                .map(|&s| {
                    Ok(InterpolationRow {
                        index,
                        scale: s,
                        coarse_cn: check_interpolation(&case, &vc.map(|x| s * x))?.required_cn,
                        fine_cn: check_interpolation(&case, &vf.map(|x| s * x))?.required_cn,
                    })
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    Ok(per_field.into_iter().flatten().collect())
}

/// Largest `required_Cn` per scale: `(scale, coarse max, fine max)`.
pub fn max_required_cn(rows: &[InterpolationRow], scales: &[f64]) -> Vec<(f64, f64, f64)> {
    scales
        .iter()
        .map(|&s| {
            rows.iter()
                .filter(|r| r.scale == s)
                .fold((s, 0.0, 0.0), |(s, c, f), r| {
                    (s, f64::max(c, r.coarse_cn), f64::max(f, r.fine_cn))
                })
        })
        .collect()
}

/// Relative spread of two maxima; two zero maxima agree exactly.
pub fn relative_spread(coarse: f64, fine: f64) -> f64 {
    if coarse == fine {
        0.0
    } else {
        (fine - coarse).abs() / coarse.abs().max(fine.abs())
    }
}

pub fn verify_lemmas(opts: &VerifyOptions) -> Result<VerifyReport> {
    let iteration = iteration_batch(opts.cases, opts.seed, opts.k_max, opts.t_end)?;
    let (interpolation, interpolation_error) = match interpolation_batch(opts) {
        Ok(rows) => (rows, None),
        Err(crate::Error::Parameter(msg)) => (Vec::new(), Some(msg)),
        Err(e) => return Err(e),
    };
    Ok(VerifyReport {
        options: opts.clone(),
        iteration,
        interpolation,
        interpolation_error,
    })
}

fn y0_columns(y0: &Y0Profile) -> (String, f64, f64, f64) {
    match *y0 {
        Y0Profile::Constant(v) => ("constant".into(), v, v, 0.0),
        Y0Profile::Decaying { start, floor, rate } => ("decaying".into(), start, floor, rate),
    }
}

impl VerifyReport {
    pub fn iteration_passed(&self) -> bool {
        self.iteration
            .iter()
            .all(|r| r.max_ratio <= 1.0 + ITERATION_TOL)
    }

    pub fn interpolation_passed(&self) -> bool {
        self.interpolation_error.is_none()
            && self
                .interpolation
                .iter()
                .all(|r| r.coarse_cn.is_finite() && r.fine_cn.is_finite())
            && max_required_cn(&self.interpolation, &self.options.scales)
                .iter()
                .all(|&(_, c, f)| relative_spread(c, f) <= REFINEMENT_TOL)
    }

    pub fn write_iteration_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(
            w,
            "case,a_bar,r0,b,gamma1,gamma2,K,y0_kind,y0_start,y0_floor,y0_rate,k_max,max_ratio"
        )?;
        for r in &self.iteration {
            let c = &r.case;
            let (kind, start, floor, rate) = y0_columns(&c.y0);
            writeln!(
                w,
                "{},{:?},{:?},{:?},{:?},{:?},{:?},{},{:?},{:?},{:?},{},{:?}",
                r.index,
                c.a_bar,
                c.r0,
                c.b,
                c.gamma1,
                c.gamma2,
                c.big_k,
                kind,
                start,
                floor,
                rate,
                c.k_max,
                r.max_ratio
            )?;
        }
        Ok(())
    }

    pub fn write_interpolation_csv<W: Write>(&self, mut w: W) -> Result<()> {
        let o = &self.options;
        writeln!(
            w,
            "field,scale,required_cn_{},required_cn_{}",
            o.coarse_cells, o.fine_cells
        )?;
        for r in &self.interpolation {
            writeln!(
                w,
                "{},{:?},{:?},{:?}",
                r.index, r.scale, r.coarse_cn, r.fine_cn
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let o = &self.options;
        let mut s = String::new();
        let worst = self
            .iteration
            .iter()
            .map(|r| r.max_ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            s,
            "iteration bound: {} cases, k_max = {}, t_end = {}, max ratio = {:.9}, tolerance 1 + {:e}: {}",
            self.iteration.len(),
            o.k_max,
            o.t_end,
            worst,
            ITERATION_TOL,
            if self.iteration_passed() { "PASS" } else { "FAIL" }
        );
        match &self.interpolation_error {
            Some(msg) => {
                let _ = writeln!(
                    s,
                    "interpolation: (r, q) = ({}, {}) rejected: {msg}: FAIL",
                    o.r, o.q
                );
            }
            None => {
                let _ = writeln!(
                    s,
                    "interpolation: {} fields, (r, q, C0, C1) = ({}, {}, {}, {}), {}^3 vs {}^3",
                    o.fields, o.r, o.q, o.c0, o.c1, o.coarse_cells, o.fine_cells
                );
                for (scale, c, f) in max_required_cn(&self.interpolation, &o.scales) {
                    let _ = writeln!(
                        s,
                        "  scale {scale}: max required_Cn {c:.6e} vs {f:.6e}, spread {:.4}",
                        relative_spread(c, f)
                    );
                }
                let _ = writeln!(
                    s,
                    "interpolation refinement within {}: {}",
                    REFINEMENT_TOL,
                    if self.interpolation_passed() {
                        "PASS"
                    } else {
                        "FAIL"
                    }
                );
            }
        }
        s
    }

    /// Writes `lemma_iteration.csv`, `lemma_interpolation.csv` and
    /// `summary.txt` into `dir`.
    pub fn write_to_dir(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir)?;
        self.write_iteration_csv(fs::File::create(dir.join("lemma_iteration.csv"))?)?;
        self.write_interpolation_csv(fs::File::create(dir.join("lemma_interpolation.csv"))?)?;
        fs::write(dir.join("summary.txt"), self.summary())?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> VerifyOptions {
        VerifyOptions {
            cases: 4,
            seed: 7,
            k_max: 3,
            t_end: 2.0,
            fields: 3,
            max_mode: 2,
            coarse_cells: 8,
            fine_cells: 16,
            ..VerifyOptions::default()
        }
    }

    #[test]
    fn report_is_reproducible() {
        let a = verify_lemmas(&tiny()).unwrap();
        let b = verify_lemmas(&tiny()).unwrap();
        let csv = |r: &VerifyReport| {
            let mut x = Vec::new();
            r.write_iteration_csv(&mut x).unwrap();
            r.write_interpolation_csv(&mut x).unwrap();
            x
        };
        assert_eq!(csv(&a), csv(&b));
        assert!(a.iteration_passed());
        assert_eq!(a.interpolation.len(), 9);
    }

    #[test]
    fn inadmissible_exponents_are_reported() {
        let opts = VerifyOptions { q: 4.0, ..tiny() };
        let rep = verify_lemmas(&opts).unwrap();
        assert!(rep.interpolation_error.is_some());
        assert!(!rep.interpolation_passed());
        assert!(rep.summary().contains("rejected"));
    }

    #[test]
    fn spread_of_zero_maxima() {
        assert_eq!(relative_spread(0.0, 0.0), 0.0);
        assert!((relative_spread(1.0, 1.2) - 0.2 / 1.2).abs() < 1e-15);
    }
}
