//! Bias polynomials to nonlocal game polynomials.
//!
//! A bias `B` becomes the game `B + shift·(1⊗1)`, whose realized operator is
//! positive semidefinite at every anticommutation point. The shift is the
//! `ℓ¹` mass of the non-identity coefficients (an upper bound for their
//! operator norm), topped up by the negative part of the constant term.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::word::{canonicalize, BiasPolynomial, Term, Word};

#[derive(Clone, Debug, PartialEq)]
pub struct GamePolynomial {
    /// Canonicalized input bias.
    pub base: BiasPolynomial,
    pub shift: f64,
    /// `ℓ¹` mass of the shifted coefficients: the factor that would turn them
    /// into a question distribution. Reported only, never applied.
    pub normalization: f64,
}

impl GamePolynomial {
    /// `base + shift·(1⊗1)`, canonicalized.
    pub fn shifted(&self) -> BiasPolynomial {
        let mut terms = self.base.terms.clone();
        terms.push(Term::new(self.shift, Word::identity(), Word::identity()));
        canonicalize(&BiasPolynomial::new(terms))
    }
}

pub fn to_game(bias: &BiasPolynomial) -> Result<GamePolynomial> {
    bias.validate()?;
    let base = canonicalize(bias);
    let constant = base.identity_coefficient();
    let off_identity: f64 = base
        .terms
        .iter()
        .filter(|t| !(t.alice.is_empty() && t.bob.is_empty()))
        .map(|t| t.coeff.abs())
        .sum();
    let shift = off_identity + (-constant).max(0.0);
    let normalization = off_identity + (constant + shift).abs();
    Ok(GamePolynomial {
        base,
        shift,
        normalization,
    })
}

/// JSON shape of the `convert` command: the shifted polynomial's terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GameReport {
    pub shift: f64,
    pub normalization: f64,
    pub terms: Vec<Term>,
}

impl From<&GamePolynomial> for GameReport {
    fn from(g: &GamePolynomial) -> Self {
        GameReport {
            shift: g.shift,
            normalization: g.normalization,
            terms: g.shifted().terms,
        }
    }
}
