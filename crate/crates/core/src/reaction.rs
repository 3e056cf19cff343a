//! Reaction terms and the parameter-regime classifier.
//!
//! The classifier works with the theory dimension `n`, which is independent
//! of the simulated grid dimension. It ignores the chemotactic sensitivity
//! `chi`: the boundedness conditions are only established for `chi = 1`, and
//! nothing here claims they persist for other values. A [`Regime::NotCovered`]
//! verdict means the boundedness result is silent, never that blow-up is
//! predicted.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{integrate, pow_nonneg, Field};

/// Which reaction term drives the density equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ReactionVariant {
    /// `f = 0`, the classical Keller-Segel model.
    #[default]
    Off,
    /// `f(u) = mu u (1 - u^alpha)`.
    #[serde(alias = "local")]
    LocalLogistic,
    /// `f(u) = u^alpha (1 - int u^beta)`.
    #[serde(alias = "nonlocal")]
    NonlocalLogistic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReactionSpec {
    pub variant: ReactionVariant,
    pub alpha: f64,
    pub beta: f64,
    pub mu: f64,
}

impl ReactionSpec {
    pub fn off() -> Self {
        Self {
            variant: ReactionVariant::Off,
            alpha: 2.0,
            beta: 2.0,
            mu: 1.0,
        }
    }

    pub fn local(mu: f64, alpha: f64) -> Self {
        Self {
            variant: ReactionVariant::LocalLogistic,
            alpha,
            beta: 2.0,
            mu,
        }
    }

    pub fn nonlocal(alpha: f64, beta: f64) -> Self {
        Self {
            variant: ReactionVariant::NonlocalLogistic,
            alpha,
            beta,
            mu: 1.0,
        }
    }

    /// Checks the hypotheses of the active variant. Errors name the offending
    /// field (`alpha`, `beta`, `mu`).
    pub fn validate(&self) -> std::result::Result<(), (&'static str, String)> {
        match self.variant {
            ReactionVariant::Off => Ok(()),
            ReactionVariant::LocalLogistic => {
                if !(self.mu > 0.0 && self.mu.is_finite()) {
                    return Err(("mu", format!("need mu > 0, got {}", self.mu)));
                }
                if !(self.alpha > 0.0 && self.alpha.is_finite()) {
                    return Err(("alpha", format!("need alpha > 0, got {}", self.alpha)));
                }
                Ok(())
            }
            ReactionVariant::NonlocalLogistic => {
                if !(self.alpha >= 1.0 && self.alpha.is_finite()) {
                    return Err(("alpha", format!("need alpha >= 1, got {}", self.alpha)));
                }
                if !(self.beta > 1.0 && self.beta.is_finite()) {
                    return Err(("beta", format!("need beta > 1, got {}", self.beta)));
                }
                Ok(())
            }
        }
    }

    /// `int u^beta` for the nonlocal variant, `None` otherwise.
    pub fn nonlocal_integral(&self, u: &Field) -> Result<Option<f64>> {
        match self.variant {
            ReactionVariant::NonlocalLogistic => {
                Ok(Some(integrate(&u.map(|v| pow_nonneg(v, self.beta)))?))
            }
            _ => Ok(None),
        }
    }

    /// `max |df/du|` over the cells, with the nonlocal integral frozen.
    pub fn max_derivative(&self, u: &Field, nonlocal: Option<f64>) -> f64 {
        let a = self.alpha;
        match self.variant {
            ReactionVariant::Off => 0.0,
            ReactionVariant::LocalLogistic => u.values().iter().fold(0.0, |m, &v| {
                m.max((self.mu * (1.0 - (1.0 + a) * pow_nonneg(v, a))).abs())
            }),
            ReactionVariant::NonlocalLogistic => {
                let damp = (1.0 - nonlocal.unwrap_or(0.0)).abs();
                u.values()
                    .iter()
                    .fold(0.0, |m, &v| m.max(a * pow_nonneg(v, a - 1.0) * damp))
            }
        }
    }
}

impl Default for ReactionSpec {
    fn default() -> Self {
        Self::off()
    }
}

/// Pointwise reaction `f(u)`.
pub fn eval_reaction(u: &Field, spec: &ReactionSpec) -> Result<Field> {
    if let Some(v) = u.values().iter().find(|&&v| v < 0.0) {
        return Err(Error::Input(format!(
            "reaction needs a nonnegative density, found {v}"
        )));
    }
    let nonlocal = spec.nonlocal_integral(u)?;
    Ok(eval_reaction_with(u, spec, nonlocal))
}

/// Reaction with a precomputed nonlocal integral (ignored for local variants).
pub(crate) fn eval_reaction_with(u: &Field, spec: &ReactionSpec, nonlocal: Option<f64>) -> Field {
    match spec.variant {
        ReactionVariant::Off => Field::zeros(*u.grid()),
        ReactionVariant::LocalLogistic => {
            u.map(|v| spec.mu * v * (1.0 - pow_nonneg(v, spec.alpha)))
        }
        ReactionVariant::NonlocalLogistic => {
            let damp = 1.0 - nonlocal.unwrap_or(0.0);
            u.map(|v| pow_nonneg(v, spec.alpha) * damp)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    /// `2 <= alpha < 1 + 2 beta / n`.
    CoveredCase1,
    /// `alpha < 2` and `(n+2)/n (2 - alpha) < 1 + 2 beta / n - alpha`.
    CoveredCase2,
    /// Neither condition holds; no claim either way.
    NotCovered,
}

impl Regime {
    pub fn is_covered(self) -> bool {
        !matches!(self, Regime::NotCovered)
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Regime::CoveredCase1 => "CoveredCase1",
            Regime::CoveredCase2 => "CoveredCase2",
            Regime::NotCovered => "NotCovered",
        };
        f.write_str(s)
    }
}

/// Classifier output with both sides of the governing inequality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeVerdict {
    pub verdict: Regime,
    pub lhs: f64,
    pub rhs: f64,
}

/// Classifies `(n, alpha, beta)` against the two boundedness conditions.
///
/// Inequalities are compared after clearing the `1/n` denominators, so
/// boundary tuples with exactly representable inputs land on the strict side.
pub fn classify_regime(n: u32, alpha: f64, beta: f64) -> Result<RegimeVerdict> {
    if n < 3 {
        return Err(Error::Hypothesis(format!("need n >= 3, got {n}")));
    }
    if !(alpha >= 1.0 && alpha.is_finite()) {
        return Err(Error::Hypothesis(format!("need alpha >= 1, got {alpha}")));
    }
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::Hypothesis(format!("need beta > 1, got {beta}")));
    }
    let nf = f64::from(n);
    if alpha >= 2.0 {
        // alpha < 1 + 2 beta / n  <=>  n (alpha - 1) < 2 beta
        let covered = nf * (alpha - 1.0) < 2.0 * beta;
        Ok(RegimeVerdict {
            verdict: if covered {
                Regime::CoveredCase1
            } else {
                Regime::NotCovered
            },
            lhs: alpha,
            rhs: 1.0 + 2.0 * beta / nf,
        })
    } else {
        // (n+2)(2 - alpha) < n (1 - alpha) + 2 beta
        let covered = (nf + 2.0) * (2.0 - alpha) < nf * (1.0 - alpha) + 2.0 * beta;
        Ok(RegimeVerdict {
            verdict: if covered {
                Regime::CoveredCase2
            } else {
                Regime::NotCovered
            },
            lhs: (nf + 2.0) / nf * (2.0 - alpha),
            rhs: 1.0 + 2.0 * beta / nf - alpha,
        })
    }
}

/// Boundedness condition for a sub-linear production term `u^xi`, `xi < 1`:
/// true iff `1 + xi < 1 + 2 beta / n`.
pub fn classify_sublinear(n: u32, xi: f64, beta: f64) -> Result<bool> {
    if n < 3 {
        return Err(Error::Hypothesis(format!("need n >= 3, got {n}")));
    }
    if xi >= 1.0 {
        return Err(Error::Parameter(format!(
            "xi = {xi} is not sub-linear; use classify_regime"
        )));
    }
    if !(xi > 0.0) {
        return Err(Error::Parameter(format!("need xi > 0, got {xi}")));
    }
    if !(beta > 1.0 && beta.is_finite()) {
        return Err(Error::Hypothesis(format!("need beta > 1, got {beta}")));
    }
    Ok(f64::from(n) * xi < 2.0 * beta)
}

/// `beta > n / 2`, the headline collapse-prevention threshold.
pub fn collapse_threshold_hint(n: u32, beta: f64) -> bool {
    2.0 * beta > f64::from(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid;

    #[test]
    fn nonlocal_examples() {
        let g = Grid::unit(&[8, 8]).unwrap();
        for (a, b) in [(1.0, 1.5), (2.0, 2.0), (3.3, 4.1)] {
            let f = eval_reaction(&Field::constant(g, 1.0), &ReactionSpec::nonlocal(a, b)).unwrap();
            assert!(f.values().iter().all(|v| v.abs() < 1e-13));
        }
        let f = eval_reaction(&Field::constant(g, 2.0), &ReactionSpec::nonlocal(2.0, 2.0)).unwrap();
        assert!(f.values().iter().all(|v| (v + 12.0).abs() < 1e-12));
    }

    #[test]
    fn zero_density_gives_zero_reaction() {
        let g = Grid::unit(&[5]).unwrap();
        for spec in [
            ReactionSpec::off(),
            ReactionSpec::local(2.0, 1.0),
            ReactionSpec::nonlocal(1.5, 2.0),
        ] {
            let f = eval_reaction(&Field::zeros(g), &spec).unwrap();
            assert!(f.values().iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn local_logistic_form() {
        let g = Grid::unit(&[4]).unwrap();
        let u = Field::new(g, vec![0.5, 1.0, 2.0, 0.0]).unwrap();
        let f = eval_reaction(&u, &ReactionSpec::local(3.0, 2.0)).unwrap();
        let want = [3.0 * 0.5 * 0.75, 0.0, 3.0 * 2.0 * -3.0, 0.0];
        for (a, b) in f.values().iter().zip(want) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn negative_density_rejected() {
        let g = Grid::unit(&[4]).unwrap();
        let u = Field::new(g, vec![0.5, -1.0, 2.0, 0.0]).unwrap();
        assert!(eval_reaction(&u, &ReactionSpec::off()).is_err());
    }

    #[test]
    fn regime_examples() {
        assert_eq!(
            classify_regime(3, 2.0, 2.0).unwrap().verdict,
            Regime::CoveredCase1
        );
        assert_eq!(
            classify_regime(3, 2.0, 1.5).unwrap().verdict,
            Regime::NotCovered
        );
        let v = classify_regime(4, 1.5, 4.0).unwrap();
        assert_eq!(v.verdict, Regime::CoveredCase2);
        assert!((v.lhs - 0.75).abs() < 1e-15 && (v.rhs - 1.5).abs() < 1e-15);
    }

    #[test]
    fn regime_hypotheses() {
        assert!(matches!(
            classify_regime(2, 2.0, 2.0),
            Err(Error::Hypothesis(_))
        ));
        assert!(classify_regime(3, 0.9, 2.0).is_err());
        assert!(classify_regime(3, 2.0, 1.0).is_err());
    }

    #[test]
    fn sublinear_examples() {
        assert!(classify_sublinear(4, 0.5, 1.5).unwrap());
        assert!(!classify_sublinear(6, 0.9, 2.5).unwrap());
        // xi = 2 beta / n exactly: 3 * 0.75 = 2 * 1.125
        assert!(!classify_sublinear(3, 0.75, 1.125).unwrap());
        assert!(classify_sublinear(3, 1.0, 2.0).is_err());
    }

    #[test]
    fn threshold_hint() {
        assert!(collapse_threshold_hint(3, 2.0));
        assert!(!collapse_threshold_hint(4, 2.0));
        assert!(collapse_threshold_hint(6, 3.01));
    }

    #[test]
    fn validate_names_the_field() {
        assert_eq!(
            ReactionSpec::nonlocal(2.0, 1.0).validate().unwrap_err().0,
            "beta"
        );
        assert_eq!(
            ReactionSpec::nonlocal(0.5, 2.0).validate().unwrap_err().0,
            "alpha"
        );
        assert_eq!(
            ReactionSpec::local(0.0, 1.0).validate().unwrap_err().0,
            "mu"
        );
        assert!(ReactionSpec::off().validate().is_ok());
    }
}
