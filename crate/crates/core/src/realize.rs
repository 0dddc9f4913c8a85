//! Concrete 2x2 realizations of the generators and assembly of the 4x4 game matrix.
//!
//! Kronecker convention: Alice is the left factor and carries the slow index,
//! so basis vector `2*i + j` is `e_i ⊗ f_j`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{Mat2, Mat4, C64};
use crate::word::{BasisWord, BiasPolynomial, Letter, ReducedForm, Word};

/// Pair of anticommutation half-values `{u,v} = 2s` (Alice) and `{u,v} = 2t` (Bob).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnticommPoint {
    /// Alice's anticommutation parameter.
    pub s: f64,
    /// Bob's anticommutation parameter.
    pub t: f64,
}

pub(crate) fn check_anticommutation(what: &'static str, value: f64) -> Result<()> {
    if (-1.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

impl AnticommPoint {
    pub fn new(s: f64, t: f64) -> Result<Self> {
        let p = AnticommPoint { s, t };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_anticommutation("s", self.s)?;
        check_anticommutation("t", self.t)
    }

    pub fn distance(&self, other: &AnticommPoint) -> f64 {
        (self.s - other.s).hypot(self.t - other.t)
    }
}

/// A continuous choice of order-two generators `(U, V)` with `UV + VU = 2s·I`.
pub trait Realization: Sync {
    /// Generators at anticommutation `s`; callers guarantee `|s| ≤ 1`.
    fn generators_unchecked(&self, s: f64) -> (Mat2, Mat2);

    fn generators(&self, s: f64) -> Result<(Mat2, Mat2)> {
        check_anticommutation("s", s)?;
        Ok(self.generators_unchecked(s))
    }

    /// Matrices of the basis words `(1, u, v, uv)`.
    fn basis_matrices(&self, s: f64) -> [Mat2; 4] {
        let (u, v) = self.generators_unchecked(s);
        [Mat2::identity(), u, v, u * v]
    }

    /// Letter-by-letter product, with no algebraic reduction.
    fn word_matrix(&self, word: &Word, s: f64) -> Mat2 {
        let (u, v) = self.generators_unchecked(s);
        word.letters().iter().fold(Mat2::identity(), |acc, l| {
            acc * match l {
                Letter::U => u,
                Letter::V => v,
            }
        })
    }
}

/// `U = Z`, `V = sZ + √(1 - s²)X`: real symmetric for every `s`.
#[derive(Clone, Copy, Debug, Default)]
pub struct StandardRealization;

impl Realization for StandardRealization {
    fn generators_unchecked(&self, s: f64) -> (Mat2, Mat2) {
        let c = (1.0 - s * s).max(0.0).sqrt();
        let u = Mat2::pauli_z();
        let v = Mat2::from_real([[s, c], [c, -s]]);
        (u, v)
    }
}

/// Another realization conjugated by a fixed unitary: `W G W*`.
#[derive(Clone, Copy, Debug)]
pub struct ConjugatedRealization<R> {
    pub inner: R,
    pub unitary: Mat2,
}

impl<R: Realization> Realization for ConjugatedRealization<R> {
    fn generators_unchecked(&self, s: f64) -> (Mat2, Mat2) {
        let (u, v) = self.inner.generators_unchecked(s);
        let w = self.unitary;
        let wa = w.adjoint();
        (w * u * wa, w * v * wa)
    }
}

/// `(U, V)` in the standard realization.
pub fn realize_generators(s: f64) -> Result<(Mat2, Mat2)> {
    StandardRealization.generators(s)
}

/// Standard-realization matrix of an arbitrary word.
pub fn word_matrix(word: &Word, s: f64) -> Result<Mat2> {
    check_anticommutation("s", s)?;
    Ok(StandardRealization.word_matrix(word, s))
}

pub fn basis_matrix(word: BasisWord, s: f64) -> Result<Mat2> {
    check_anticommutation("s", s)?;
    Ok(StandardRealization.basis_matrices(s)[word.index()])
}

/// The game operator realized on `C² ⊗ C²` at one anticommutation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GameMatrix {
    pub entries: Mat4,
    pub point: AnticommPoint,
}

impl GameMatrix {
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.entries.hermitian_deviation() <= tol
    }
}

/// `Σ λ(a,b) · mat(a, s) ⊗ mat(b, t)` in the standard realization.
pub fn assemble(form: &ReducedForm) -> GameMatrix {
    assemble_with(form, &StandardRealization, &StandardRealization)
}

pub fn assemble_with(
    form: &ReducedForm,
    alice: &dyn Realization,
    bob: &dyn Realization,
) -> GameMatrix {
    let a_basis = alice.basis_matrices(form.point.s);
    let b_basis = bob.basis_matrices(form.point.t);
    let mut entries = Mat4::zeros();
    for (i, row) in form.lambda.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let c = C64::new(c, 0.0);
            let a = &a_basis[i];
            let b = &b_basis[j];
            for ai in 0..2 {
                for aj in 0..2 {
                    let x = a.0[ai][aj] * c;
                    if x == crate::matrix::ZERO {
                        continue;
                    }
                    for bi in 0..2 {
                        for bj in 0..2 {
                            entries.0[2 * ai + bi][2 * aj + bj] += x * b.0[bi][bj];
                        }
                    }
                }
            }
        }
    }
    GameMatrix {
        entries,
        point: form.point,
    }
}

/// Substitutes realized generators letter by letter, bypassing word reduction.
pub fn evaluate_direct(poly: &BiasPolynomial, point: AnticommPoint) -> Result<GameMatrix> {
    point.validate()?;
    evaluate_direct_with(poly, point, &StandardRealization, &StandardRealization)
}

pub fn evaluate_direct_with(
    poly: &BiasPolynomial,
    point: AnticommPoint,
    alice: &dyn Realization,
    bob: &dyn Realization,
) -> Result<GameMatrix> {
    point.validate()?;
    let mut entries = Mat4::zeros();
    for t in &poly.terms {
        let a = alice.word_matrix(&t.alice, point.s);
        let b = bob.word_matrix(&t.bob, point.t);
        entries = entries + a.kron(&b).scale_real(t.coeff);
    }
    Ok(GameMatrix { entries, point })
}
