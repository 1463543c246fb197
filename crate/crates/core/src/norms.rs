//! Polyhedral asymmetric norms `p(x) = max(0, max_i <a_i, x>)` on `R^n`.
//!
//! The implicit zero generator makes `p` nonnegative; being a maximum of
//! linear forms it is positively homogeneous and subadditive for free. The
//! only axiom that can fail is definiteness (`p(x) = p(-x) = 0 => x = 0`),
//! which holds exactly when the generators span `R^n`.

use std::borrow::Cow;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::ext::ExtReal;
use crate::linalg;
use crate::lp::{self, LpOutcome};

/// Which of `p`, its conjugate `p(-x)`, or the symmetrisation `max(p, pbar)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormChoice {
    #[serde(alias = "p", alias = "q")]
    Base,
    #[serde(alias = "pbar", alias = "qbar")]
    Conjugate,
    #[serde(alias = "ps", alias = "qs")]
    Symmetric,
}

impl NormChoice {
    pub const ALL: [NormChoice; 3] = [NormChoice::Base, NormChoice::Conjugate, NormChoice::Symmetric];
}

impl fmt::Display for NormChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormChoice::Base => "base",
            NormChoice::Conjugate => "conjugate",
            NormChoice::Symmetric => "symmetric",
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct NormSpec {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

/// Asymmetric norm given by a finite list of linear functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "NormSpec")]
pub struct PolyAsymNorm {
    dim: usize,
    generators: Vec<Vec<f64>>,
}

impl TryFrom<NormSpec> for PolyAsymNorm {
    type Error = Error;

    fn try_from(spec: NormSpec) -> Result<Self> {
        PolyAsymNorm::new(spec.dim, spec.generators)
    }
}

/// Outcome of checking the three axioms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormValidation {
    pub valid: bool,
    pub rank: usize,
    pub dim: usize,
    /// AN1; fails iff the generators leave a common kernel.
    pub definite: bool,
    /// AN2 and AN3 hold structurally for a max of linear forms.
    pub homogeneous: bool,
    pub subadditive: bool,
    /// Nonzero `x` with `p(x) = p(-x) = 0` when AN1 fails.
    pub witness: Option<Vec<f64>>,
}

impl PolyAsymNorm {
    /// Zero rows are dropped (the zero generator is implicit) and exact
    /// duplicates removed; an empty remainder is rejected.
    pub fn new(dim: usize, generators: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        let mut kept: Vec<Vec<f64>> = Vec::with_capacity(generators.len());
        for g in generators {
            check_dim(dim, g.len())?;
            if g.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("generator entries must be finite".into()));
            }
            // normalise -0.0 so duplicate detection is exact
            let g: Vec<f64> = g.into_iter().map(|v| if v == 0.0 { 0.0 } else { v }).collect();
            if g.iter().all(|&v| v == 0.0) || kept.contains(&g) {
                continue;
            }
            kept.push(g);
        }
        if kept.is_empty() {
            return Err(Error::InvalidInput("generator list is empty or all zero".into()));
        }
        Ok(PolyAsymNorm { dim, generators: kept })
    }

    /// `p` on the real line: `u(t) = max(t, 0)`.
    pub fn upper_line() -> Self {
        PolyAsymNorm { dim: 1, generators: vec![vec![1.0]] }
    }

    /// The generators `+-e_i`, i.e. the max-norm.
    pub fn max_norm(dim: usize) -> Self {
        let mut gens = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut e = vec![0.0; dim];
            e[i] = 1.0;
            gens.push(e.clone());
            e[i] = -1.0;
            gens.push(e);
        }
        PolyAsymNorm { dim, generators: gens }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[Vec<f64>] {
        &self.generators
    }

    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim, x.len())?;
        Ok(self.eval_unchecked(x))
    }

    /// `eval` without the dimension check; `x` must have length `dim`.
    pub fn eval_unchecked(&self, x: &[f64]) -> f64 {
        self.generators
            .iter()
            .map(|a| linalg::dot(a, x))
            .fold(0.0, f64::max)
            + 0.0 // no negative zero
    }

    pub fn validate(&self) -> NormValidation {
        let rank = linalg::rank(&self.generators, self.dim);
        let definite = rank == self.dim;
        let witness = if definite {
            None
        } else {
            linalg::null_vector(&self.generators, self.dim)
        };
        NormValidation {
            valid: definite,
            rank,
            dim: self.dim,
            definite,
            homogeneous: true,
            subadditive: true,
            witness,
        }
    }

    /// Errors with the AN1 witness when the generators do not span.
    pub fn ensure_valid(&self) -> Result<()> {
        let v = self.validate();
        if v.valid {
            Ok(())
        } else {
            Err(Error::InvalidNorm { witness: v.witness.unwrap_or_default() })
        }
    }

    pub fn conjugate(&self) -> Self {
        PolyAsymNorm {
            dim: self.dim,
            generators: self.generators.iter().map(|g| linalg::neg(g)).collect(),
        }
    }

    pub fn symmetrize(&self) -> Self {
        let mut gens = self.generators.clone();
        for g in &self.generators {
            let n = linalg::neg(g);
            if !gens.contains(&n) {
                gens.push(n);
            }
        }
        PolyAsymNorm { dim: self.dim, generators: gens }
    }

    pub fn select(&self, choice: NormChoice) -> Cow<'_, PolyAsymNorm> {
        match choice {
            NormChoice::Base => Cow::Borrowed(self),
            NormChoice::Conjugate => Cow::Owned(self.conjugate()),
            NormChoice::Symmetric => Cow::Owned(self.symmetrize()),
        }
    }

    /// `sup { <c, x> : p(x) <= 1 }` together with the attaining point or
    /// an unbounded ray of the unit ball.
    pub fn ball_support_lp(&self, c: &[f64]) -> Result<LpOutcome> {
        check_dim(self.dim, c.len())?;
        let h = vec![1.0; self.generators.len()];
        Ok(lp::maximize(c, &self.generators, &h))
    }

    /// `sup { <c, x> : p(x) <= 1 }`, possibly `+inf`.
    pub fn ball_support(&self, c: &[f64]) -> Result<ExtReal> {
        Ok(match self.ball_support_lp(c)? {
            // the origin is in the ball, so the supremum is >= 0
            LpOutcome::Optimal { value, .. } => ExtReal::clamped(value),
            LpOutcome::Unbounded { .. } => ExtReal::Infinite,
        })
    }

    /// Membership in the closed unit ball, up to `tol`.
    pub fn in_unit_ball(&self, x: &[f64], tol: f64) -> bool {
        crate::tol::approx_le(self.eval_unchecked(x), 1.0, tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2() -> PolyAsymNorm {
        PolyAsymNorm::new(2, vec![vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 2.0]]).unwrap()
    }

    #[test]
    fn upper_line_values() {
        let u = PolyAsymNorm::upper_line();
        assert_eq!(u.eval(&[3.0]).unwrap(), 3.0);
        assert_eq!(u.eval(&[-2.0]).unwrap(), 0.0);
        assert_eq!(p2().eval(&[0.0, 0.0]).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let u = PolyAsymNorm::upper_line();
        assert_eq!(
            u.eval(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
        assert!(PolyAsymNorm::new(2, vec![vec![1.0]]).is_err());
    }

    #[test]
    fn degenerate_generator_lists() {
        assert!(PolyAsymNorm::new(2, vec![]).is_err());
        assert!(PolyAsymNorm::new(2, vec![vec![0.0, 0.0]]).is_err());
        let p = PolyAsymNorm::new(1, vec![vec![1.0], vec![1.0], vec![0.0]]).unwrap();
        assert_eq!(p.generators().len(), 1);
    }

    #[test]
    fn validation_examples() {
        assert!(PolyAsymNorm::upper_line().validate().valid);
        let bad = PolyAsymNorm::new(2, vec![vec![1.0, 0.0]]).unwrap();
        let v = bad.validate();
        assert!(!v.valid);
        let w = v.witness.unwrap();
        assert!(w[0].abs() < 1e-12 && (w[1] - 1.0).abs() < 1e-12);
        assert_eq!(bad.eval(&w).unwrap(), 0.0);
        assert_eq!(bad.eval(&linalg::neg(&w)).unwrap(), 0.0);
        assert!(p2().validate().valid);
        assert!(matches!(bad.ensure_valid(), Err(Error::InvalidNorm { .. })));
    }

    #[test]
    fn conjugation() {
        let u = PolyAsymNorm::upper_line();
        assert_eq!(u.conjugate().eval(&[-2.0]).unwrap(), 2.0);
        assert_eq!(u.conjugate().conjugate(), u);
        let p = PolyAsymNorm::new(2, vec![vec![1.0, 0.0], vec![0.0, 2.0]]).unwrap();
        assert_eq!(p.conjugate().generators(), &[vec![-1.0, 0.0], vec![0.0, -2.0]]);
    }

    #[test]
    fn symmetrization() {
        let us = PolyAsymNorm::upper_line().symmetrize();
        assert_eq!(us.eval(&[-2.0]).unwrap(), 2.0);
        assert_eq!(us.eval(&[3.0]).unwrap(), 3.0);
        // six candidate forms: <(0,-2),(0,-1)> = 2 wins
        assert_eq!(p2().symmetrize().eval(&[0.0, -1.0]).unwrap(), 2.0);
    }

    #[test]
    fn ball_support_examples() {
        let u = PolyAsymNorm::upper_line();
        assert_eq!(u.ball_support(&[1.0]).unwrap(), ExtReal::Finite(1.0));
        assert_eq!(u.ball_support(&[-1.0]).unwrap(), ExtReal::Infinite);
        assert_eq!(p2().ball_support(&[0.0, 0.0]).unwrap(), ExtReal::ZERO);
    }

    #[test]
    fn json_schema_is_strict() {
        let p: PolyAsymNorm =
            serde_json::from_str(r#"{"dim": 1, "generators": [[1]]}"#).unwrap();
        assert_eq!(p, PolyAsymNorm::upper_line());
        assert!(serde_json::from_str::<PolyAsymNorm>(
            r#"{"dim": 1, "generators": [[1]], "extra": 0}"#
        )
        .is_err());
        assert!(serde_json::from_str::<PolyAsymNorm>(r#"{"dim": 2, "generators": [[1]]}"#).is_err());
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"dim":1,"generators":[[1.0]]}"#);
    }
}
