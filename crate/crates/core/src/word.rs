//! Bias polynomials as formal sums of tensor words, and their reduction to
//! the span of `{1, u, v, uv}` under `u² = v² = 1`, `{u, v} = 2s`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::realize::{check_anticommutation, AnticommPoint};

/// One of the two order-two generators held by a player.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    U,
    V,
}

impl Letter {
    pub fn as_char(self) -> char {
        match self {
            Letter::U => 'u',
            Letter::V => 'v',
        }
    }
}

/// A finite product of generators; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The word read backwards; generators are self-adjoint, so this is `w*`.
    pub fn adjoint(&self) -> Self {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn concat(&self, other: &Word) -> Self {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        Word(letters)
    }

    /// All words of length `0..=max_len`, shortest first, lexicographic within a length.
    pub fn enumerate(max_len: usize) -> Vec<Word> {
        let mut out = vec![Word::identity()];
        let mut frontier = vec![Word::identity()];
        for _ in 0..max_len {
            let mut next = Vec::with_capacity(frontier.len() * 2);
            for w in &frontier {
                for letter in [Letter::U, Letter::V] {
                    let mut letters = w.0.clone();
                    letters.push(letter);
                    next.push(Word(letters));
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// Letters as a string over `{u, v}`; empty for the identity.
    pub fn to_letter_string(&self) -> String {
        self.0.iter().map(|l| l.as_char()).collect()
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .enumerate()
            .map(|(position, c)| match c {
                'u' => Ok(Letter::U),
                'v' => Ok(Letter::V),
                found => Err(Error::InvalidWord {
                    input: s.to_string(),
                    found,
                    position,
                }),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&self.to_letter_string())
        }
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_letter_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// The canonical basis `(1, u, v, uv)` of one player's quotient algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisWord {
    One,
    U,
    V,
    UV,
}

impl BasisWord {
    pub const ALL: [BasisWord; 4] = [BasisWord::One, BasisWord::U, BasisWord::V, BasisWord::UV];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn word(self) -> Word {
        match self {
            BasisWord::One => Word::identity(),
            BasisWord::U => Word(vec![Letter::U]),
            BasisWord::V => Word(vec![Letter::V]),
            BasisWord::UV => Word(vec![Letter::U, Letter::V]),
        }
    }

    fn from_normal_form(letters: &[Letter]) -> BasisWord {
        match letters {
            [] => BasisWord::One,
            [Letter::U] => BasisWord::U,
            [Letter::V] => BasisWord::V,
            [Letter::U, Letter::V] => BasisWord::UV,
            other => unreachable!("{other:?} still contains a redex"),
        }
    }
}

/// Coefficients over the basis `(1, u, v, uv)`.
pub type BasisCoeffs = [f64; 4];

enum Redex {
    /// `uu` or `vv`.
    Square,
    /// `vu`.
    Swap,
}

fn first_redex(letters: &[Letter]) -> Option<(usize, Redex)> {
    letters
        .windows(2)
        .position(|pair| pair[0] == pair[1] || pair == [Letter::V, Letter::U])
        .map(|i| {
            let kind = if letters[i] == letters[i + 1] {
                Redex::Square
            } else {
                Redex::Swap
            };
            (i, kind)
        })
}

/// Rewrites `letters` into the basis by the rules `uu = vv = 1` and
/// `vu = -uv + 2s`. Each rewrite lowers (length, inversions), so the loop
/// terminates; pending words are merged as they are generated.
fn reduce_letters(letters: &[Letter], s: f64) -> BasisCoeffs {
    if first_redex(letters).is_none() {
        let mut out = [0.0; 4];
        out[BasisWord::from_normal_form(letters).index()] = 1.0;
        return out;
    }
    let mut pending: BTreeMap<Vec<Letter>, f64> = BTreeMap::new();
    pending.insert(letters.to_vec(), 1.0);
    let mut out = [0.0; 4];
    while let Some((w, c)) = pending.pop_first() {
        if c == 0.0 {
            continue;
        }
        match first_redex(&w) {
            None => out[BasisWord::from_normal_form(&w).index()] += c,
            Some((i, Redex::Square)) => {
                let mut shorter = w[..i].to_vec();
                shorter.extend_from_slice(&w[i + 2..]);
                *pending.entry(shorter).or_insert(0.0) += c;
            }
            Some((i, Redex::Swap)) => {
                let mut swapped = w.clone();
                swapped[i] = Letter::U;
                swapped[i + 1] = Letter::V;
                *pending.entry(swapped).or_insert(0.0) -= c;

                let mut shorter = w[..i].to_vec();
                shorter.extend_from_slice(&w[i + 2..]);
                *pending.entry(shorter).or_insert(0.0) += 2.0 * s * c;
            }
        }
    }
    out
}

/// Expresses `word` as a combination of `(1, u, v, uv)` at anticommutation `{u, v} = 2s`.
pub fn reduce_word(word: &Word, s: f64) -> Result<BasisCoeffs> {
    check_anticommutation("s", s)?;
    Ok(reduce_letters(word.letters(), s))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub alice: Word,
    pub bob: Word,
}

impl Term {
    pub fn new(coeff: f64, alice: Word, bob: Word) -> Self {
        Term { coeff, alice, bob }
    }

    /// Convenience constructor from letter strings; panics on letters outside `{u, v}`.
    pub fn parse(coeff: f64, alice: &str, bob: &str) -> Self {
        Term {
            coeff,
            alice: alice.parse().expect("alice word"),
            bob: bob.parse().expect("bob word"),
        }
    }
}

/// Real-linear combination of tensor words `alice ⊗ bob`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct BiasPolynomial {
    pub terms: Vec<Term>,
}

impl BiasPolynomial {
    pub fn new(terms: Vec<Term>) -> Self {
        BiasPolynomial { terms }
    }

    pub fn zero() -> Self {
        BiasPolynomial::default()
    }

    /// Parses the `{"terms":[{"coeff", "alice", "bob"}]}` schema.
    pub fn from_json(text: &str) -> Result<Self> {
        let poly: BiasPolynomial = serde_json::from_str(text)?;
        poly.validate()?;
        Ok(poly)
    }

    pub fn validate(&self) -> Result<()> {
        for (index, term) in self.terms.iter().enumerate() {
            if !term.coeff.is_finite() {
                return Err(Error::InvalidCoefficient {
                    index,
                    value: term.coeff,
                });
            }
        }
        Ok(())
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: f64) -> Self {
        BiasPolynomial {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(c * t.coeff, t.alice.clone(), t.bob.clone()))
                .collect(),
        }
    }

    /// Formal sum (terms concatenated, not merged).
    pub fn add(&self, other: &BiasPolynomial) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        BiasPolynomial { terms }
    }

    pub fn adjoint(&self) -> Self {
        BiasPolynomial {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff, t.alice.adjoint(), t.bob.adjoint()))
                .collect(),
        }
    }

    /// True when `p* = p` as formal sums (after canonicalization).
    pub fn is_self_adjoint(&self) -> bool {
        canonicalize(self) == canonicalize(&self.adjoint())
    }

    /// Coefficient of `1 ⊗ 1` after merging duplicates.
    pub fn identity_coefficient(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.alice.is_empty() && t.bob.is_empty())
            .map(|t| t.coeff)
            .sum()
    }
}

/// Merges duplicate word pairs, drops exact zeros, sorts by `(alice, bob)`.
pub fn canonicalize(poly: &BiasPolynomial) -> BiasPolynomial {
    let mut merged: BTreeMap<(Word, Word), f64> = BTreeMap::new();
    for t in &poly.terms {
        *merged
            .entry((t.alice.clone(), t.bob.clone()))
            .or_insert(0.0) += t.coeff;
    }
    BiasPolynomial {
        terms: merged
            .into_iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|((alice, bob), coeff)| Term { coeff, alice, bob })
            .collect(),
    }
}

/// The 16 coefficients `λ(w_A, w_B)` over `{1,u,v,uv} ⊗ {1,u,v,uv}` at a fixed point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReducedForm {
    /// `lambda[a][b]` pairs Alice's basis word `a` with Bob's basis word `b`.
    pub lambda: [[f64; 4]; 4],
    pub point: AnticommPoint,
}

impl ReducedForm {
    pub fn zero(point: AnticommPoint) -> Self {
        ReducedForm {
            lambda: [[0.0; 4]; 4],
            point,
        }
    }

    pub fn get(&self, alice: BasisWord, bob: BasisWord) -> f64 {
        self.lambda[alice.index()][bob.index()]
    }

    pub fn is_finite(&self) -> bool {
        self.lambda.iter().flatten().all(|x| x.is_finite())
    }

    /// The form read back as a polynomial in basis words.
    pub fn to_polynomial(&self) -> BiasPolynomial {
        let mut terms = Vec::new();
        for a in BasisWord::ALL {
            for b in BasisWord::ALL {
                let c = self.get(a, b);
                if c != 0.0 {
                    terms.push(Term::new(c, a.word(), b.word()));
                }
            }
        }
        BiasPolynomial { terms }
    }

    fn accumulate(&mut self, coeff: f64, alice: &BasisCoeffs, bob: &BasisCoeffs) {
        for (row, &ca) in self.lambda.iter_mut().zip(alice) {
            if ca == 0.0 {
                continue;
            }
            for (x, &cb) in row.iter_mut().zip(bob) {
                *x += coeff * ca * cb;
            }
        }
    }
}

/// Reduces every tensor word factor-wise at `point`.
pub fn reduce_polynomial(poly: &BiasPolynomial, point: AnticommPoint) -> Result<ReducedForm> {
    point.validate()?;
    let mut form = ReducedForm::zero(point);
    for t in &poly.terms {
        let alice = reduce_letters(t.alice.letters(), point.s);
        let bob = reduce_letters(t.bob.letters(), point.t);
        form.accumulate(t.coeff, &alice, &bob);
    }
    Ok(form)
}

/// A polynomial with its distinct words indexed, so that repeated reduction
/// over many points reduces each word once per point.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    alice_words: Vec<Word>,
    bob_words: Vec<Word>,
    terms: Vec<(f64, usize, usize)>,
}

impl CompiledPolynomial {
    pub fn new(poly: &BiasPolynomial) -> Self {
        let canonical = canonicalize(poly);
        let mut alice_words: Vec<Word> = Vec::new();
        let mut bob_words: Vec<Word> = Vec::new();
        let index_of = |words: &mut Vec<Word>, w: &Word| match words.iter().position(|x| x == w) {
            Some(i) => i,
            None => {
                words.push(w.clone());
                words.len() - 1
            }
        };
        let terms = canonical
            .terms
            .iter()
            .map(|t| {
                let a = index_of(&mut alice_words, &t.alice);
                let b = index_of(&mut bob_words, &t.bob);
                (t.coeff, a, b)
            })
            .collect();
        CompiledPolynomial {
            alice_words,
            bob_words,
            terms,
        }
    }

    pub fn reduce_at(&self, point: AnticommPoint) -> ReducedForm {
        let alice: Vec<BasisCoeffs> = self
            .alice_words
            .iter()
            .map(|w| reduce_letters(w.letters(), point.s))
            .collect();
        let bob: Vec<BasisCoeffs> = self
            .bob_words
            .iter()
            .map(|w| reduce_letters(w.letters(), point.t))
            .collect();
        let mut form = ReducedForm::zero(point);
        for &(c, a, b) in &self.terms {
            form.accumulate(c, &alice[a], &bob[b]);
        }
        form
    }
}
