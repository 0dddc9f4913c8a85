//! Optimal states, their Schmidt data, and word moments.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{inner, vec_norm, CMat, Mat4, Vec4, C64, ZERO};
use crate::realize::{assemble, AnticommPoint, Realization, StandardRealization};
use crate::spectral::{hermitian_spectrum, jacobi_eigen, spectrum_from_eigen, HERMITIAN_TOL};
use crate::word::{reduce_polynomial, reduce_word, BasisWord, BiasPolynomial, Word};

/// `vector = a·(e₁⊗f₁) + d·(e₂⊗f₂)` with `a ≥ d ≥ 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schmidt {
    pub a: f64,
    pub d: f64,
    pub alice_basis: [[C64; 2]; 2],
    pub bob_basis: [[C64; 2]; 2],
}

impl Schmidt {
    pub fn reconstruct(&self) -> Vec4 {
        let coeffs = [self.a, self.d];
        std::array::from_fn(|idx| {
            let (i, j) = (idx / 2, idx % 2);
            (0..2)
                .map(|k| self.alice_basis[k][i] * self.bob_basis[k][j] * coeffs[k])
                .sum()
        })
    }
}

/// Schmidt decomposition of a two-qubit vector (index `2i + j` ↔ `|i⟩⊗|j⟩`).
///
/// Uses the right singular vectors of the coefficient matrix `C[i][j]`,
/// obtained from the closed-form eigenbasis of `C*C`. Singular values are
/// read off as `‖C v_k‖`, which keeps the reconstruction exact even when the
/// smaller one underflows the eigenvalue accuracy.
pub fn schmidt_decompose(vector: &Vec4) -> Schmidt {
    let c = CMat([[vector[0], vector[1]], [vector[2], vector[3]]]);
    let gram = c.adjoint() * c;
    let eig = crate::spectral::hermitian_eigen2(&gram);
    let right = [eig.vectors.column(1), eig.vectors.column(0)];
    let images = [c.apply(&right[0]), c.apply(&right[1])];
    let mut sigma = [vec_norm(&images[0]), vec_norm(&images[1])];
    let mut order = [0usize, 1];
    if sigma[1] > sigma[0] {
        order = [1, 0];
        sigma = [sigma[1], sigma[0]];
    }

    let first = images[order[0]];
    let e1 = if sigma[0] > 0.0 {
        [first[0] / sigma[0], first[1] / sigma[0]]
    } else {
        [C64::new(1.0, 0.0), ZERO]
    };
    let second = images[order[1]];
    let e2 = if sigma[1] > 1e-300 {
        [second[0] / sigma[1], second[1] / sigma[1]]
    } else {
        [-e1[1].conj(), e1[0].conj()]
    };
    let f = |k: usize| {
        let v = right[order[k]];
        [v[0].conj(), v[1].conj()]
    };
    Schmidt {
        a: sigma[0],
        d: sigma[1],
        alice_basis: [e1, e2],
        bob_basis: [f(0), f(1)],
    }
}

/// Scales away the global phase: the first largest-magnitude component becomes real positive.
pub fn fix_phase(vector: &Vec4) -> Vec4 {
    let mut pivot = 0;
    for i in 1..4 {
        if vector[i].norm() > vector[pivot].norm() {
            pivot = i;
        }
    }
    let p = vector[pivot];
    if p.norm() == 0.0 {
        return *vector;
    }
    let phase = p.conj() / p.norm();
    let mut out = vector.map(|x| x * phase);
    out[pivot] = C64::new(out[pivot].norm(), 0.0);
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimalState {
    pub vector: Vec4,
    pub point: AnticommPoint,
    pub eigenvalue: f64,
    pub schmidt: Schmidt,
    /// Top eigenvalue multiplicity exceeds one; `vector` is one representative.
    pub degenerate: bool,
}

fn game_matrix(poly: &BiasPolynomial, point: AnticommPoint) -> Result<Mat4> {
    let m = assemble(&reduce_polynomial(poly, point)?).entries;
    let deviation = m.hermitian_deviation();
    if deviation.is_nan() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(m)
}

fn finish(vector: Vec4, point: AnticommPoint, eigenvalue: f64, degenerate: bool) -> OptimalState {
    let n = vec_norm(&vector);
    let vector = fix_phase(&vector.map(|x| x / n));
    OptimalState {
        vector,
        point,
        eigenvalue,
        schmidt: schmidt_decompose(&vector),
        degenerate,
    }
}

/// Top eigenvector of the game matrix at `point`.
pub fn extract_state(poly: &BiasPolynomial, point: AnticommPoint) -> Result<OptimalState> {
    let m = game_matrix(poly, point)?;
    let spectrum = hermitian_spectrum(&m)?;
    Ok(finish(
        spectrum.max_vec,
        point,
        spectrum.max_eig,
        spectrum.is_degenerate(),
    ))
}

/// Like [`extract_state`], but diagonalizes in a random orthonormal frame
/// drawn from `seed`. Outside degenerate cases the result agrees with the
/// unseeded extraction up to phase.
pub fn extract_state_seeded(
    poly: &BiasPolynomial,
    point: AnticommPoint,
    seed: u64,
) -> Result<OptimalState> {
    let m = game_matrix(poly, point)?;
    let w = random_unitary(seed);
    let eig = jacobi_eigen(&(w.adjoint() * m * w));
    let spectrum = spectrum_from_eigen(&eig);
    Ok(finish(
        w.apply(&spectrum.max_vec),
        point,
        spectrum.max_eig,
        spectrum.is_degenerate(),
    ))
}

fn random_unitary(seed: u64) -> Mat4 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cols: Vec<Vec4> = Vec::with_capacity(4);
    while cols.len() < 4 {
        let mut v: Vec4 =
            std::array::from_fn(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        for c in &cols {
            let proj = inner(c, &v);
            for i in 0..4 {
                v[i] -= c[i] * proj;
            }
        }
        let n = vec_norm(&v);
        if n > 1e-3 {
            cols.push(v.map(|x| x / n));
        }
    }
    let mut w = Mat4::zeros();
    for (j, c) in cols.iter().enumerate() {
        for i in 0..4 {
            w.0[i][j] = c[i];
        }
    }
    w
}

/// `⟨vector| mat(alice, s) ⊗ mat(bob, t) |vector⟩` with words multiplied out letter by letter.
pub fn moment(state: &OptimalState, alice: &Word, bob: &Word) -> C64 {
    let r = StandardRealization;
    let a = r.word_matrix(alice, state.point.s);
    let b = r.word_matrix(bob, state.point.t);
    a.kron(&b).expectation(&state.vector)
}

/// Moments of the four basis words on each side.
pub fn basis_moments(state: &OptimalState) -> [[C64; 4]; 4] {
    let r = StandardRealization;
    let a = r.basis_matrices(state.point.s);
    let b = r.basis_matrices(state.point.t);
    std::array::from_fn(|i| std::array::from_fn(|j| a[i].kron(&b[j]).expectation(&state.vector)))
}

/// A moment computed from the basis table and the reduction coefficients of both words.
pub fn reduced_moment(state: &OptimalState, alice: &Word, bob: &Word) -> Result<C64> {
    let table = basis_moments(state);
    let ca = reduce_word(alice, state.point.s)?;
    let cb = reduce_word(bob, state.point.t)?;
    let mut total = ZERO;
    for x in BasisWord::ALL {
        for y in BasisWord::ALL {
            total += table[x.index()][y.index()] * (ca[x.index()] * cb[y.index()]);
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct MomentTable {
    pub entries: BTreeMap<(Word, Word), C64>,
}

impl MomentTable {
    pub fn get(&self, alice: &Word, bob: &Word) -> Option<C64> {
        self.entries.get(&(alice.clone(), bob.clone())).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Largest entrywise distance to `other` over shared keys; `∞` if the key sets differ.
    pub fn max_difference(&self, other: &MomentTable) -> f64 {
        if self.entries.len() != other.entries.len() {
            return f64::INFINITY;
        }
        let mut worst: f64 = 0.0;
        for (k, v) in &self.entries {
            match other.entries.get(k) {
                Some(w) => worst = worst.max((v - w).norm()),
                None => return f64::INFINITY,
            }
        }
        worst
    }
}

/// All word pairs with at most `max_len` letters per side.
pub fn moment_table(state: &OptimalState, max_len: usize) -> Result<MomentTable> {
    if max_len < 1 {
        return Err(Error::Config(
            "moment table length bound must be at least 1".into(),
        ));
    }
    let words = Word::enumerate(max_len);
    let mut entries = BTreeMap::new();
    for a in &words {
        for b in &words {
            entries.insert((a.clone(), b.clone()), moment(state, a, b));
        }
    }
    Ok(MomentTable { entries })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub alice: Word,
    pub bob: Word,
    pub re: f64,
    pub im: f64,
}

/// JSON shape of the `state` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateReport {
    pub point: AnticommPoint,
    pub eigenvalue: f64,
    pub vector: Vec<[f64; 2]>,
    pub a: f64,
    pub d: f64,
    pub degenerate: bool,
    pub moments: Vec<MomentEntry>,
}

impl StateReport {
    pub fn new(state: &OptimalState, max_len: usize) -> Result<Self> {
        let table = moment_table(state, max_len)?;
        Ok(StateReport {
            point: state.point,
            eigenvalue: state.eigenvalue,
            vector: state.vector.iter().map(|z| [z.re, z.im]).collect(),
            a: state.schmidt.a,
            d: state.schmidt.d,
            degenerate: state.degenerate,
            moments: table
                .entries
                .into_iter()
                .map(|((alice, bob), z)| MomentEntry {
                    alice,
                    bob,
                    re: z.re,
                    im: z.im,
                })
                .collect(),
        })
    }
}
