//! Closed forms for the tilted CHSH family
//! `CHSH(α, β) = α u⊗(u+v) + v⊗(u−v) + 2β u⊗1`.
//!
//! Note the factor two on the marginal term: other conventions write the
//! same family with an unscaled `β`.
//!
//! Three candidate values compete:
//!
//! | label | `‖CHSH‖²`           | attained at          |
//! |-------|---------------------|----------------------|
//! | Q     | `4(1+α²)(1+β²)`     | `s = 0, t = t*`      |
//! | L1    | `4(1+β)²`           | `s = ±1, t = −1`     |
//! | La    | `4(α+β)²`           | `s` arbitrary, `t = 1` |
//!
//! with `t* = ((α²−1)/(α²+1))(β²+1) + β²`, admissible only for `|αβ| ≤ 1`.
//! All formulas are evaluated on `(|α|, |β|)`; the norm is invariant under
//! either sign flip.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::realize::AnticommPoint;
use crate::word::{canonicalize, reduce_word, BasisWord, BiasPolynomial, Term, Word};

/// Tolerance on the defining polynomial inequalities of the phase regions.
pub const REGION_TOL: f64 = 1e-12;

/// Column scalings of the moment table: `1, 2u, 2v, 4uv`.
pub const MOMENT_COLUMN_SCALE: [f64; 4] = [1.0, 2.0, 2.0, 4.0];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltedParams {
    pub alpha: f64,
    pub beta: f64,
}

impl TiltedParams {
    pub fn new(alpha: f64, beta: f64) -> Self {
        TiltedParams { alpha, beta }
    }

    /// Representative with `α, β ≥ 0`.
    pub fn reduced(&self) -> (f64, f64) {
        (self.alpha.abs(), self.beta.abs())
    }
}

pub fn build_polynomial(p: TiltedParams) -> BiasPolynomial {
    let TiltedParams { alpha, beta } = p;
    canonicalize(&BiasPolynomial::new(vec![
        Term::parse(alpha, "u", "u"),
        Term::parse(alpha, "u", "v"),
        Term::parse(1.0, "v", "u"),
        Term::parse(-1.0, "v", "v"),
        Term::parse(2.0 * beta, "u", ""),
    ]))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Open region where `(Q)` strictly beats both local values.
    Quantum,
    LocalL1,
    LocalLa,
    /// `(Q) = (L1)`: `α²(1+β²) = 2β`.
    BoundaryQL1,
    /// `(Q) = (La)`: `|αβ| = 1`.
    BoundaryQLa,
}

impl Region {
    pub fn name(self) -> &'static str {
        match self {
            Region::Quantum => "quantum",
            Region::LocalL1 => "local_l1",
            Region::LocalLa => "local_la",
            Region::BoundaryQL1 => "boundary_q_l1",
            Region::BoundaryQLa => "boundary_q_la",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegionClass {
    pub label: Region,
    pub q_value_sq: f64,
    pub l1_value_sq: f64,
    pub la_value_sq: f64,
}

impl RegionClass {
    /// The maximal bias `‖CHSH(α, β)‖`.
    pub fn value(&self) -> f64 {
        match self.label {
            Region::Quantum | Region::BoundaryQL1 | Region::BoundaryQLa => self.q_value_sq.sqrt(),
            Region::LocalL1 => self.l1_value_sq.sqrt(),
            Region::LocalLa => self.la_value_sq.sqrt(),
        }
    }
}

pub fn classify(p: TiltedParams) -> RegionClass {
    let (a, b) = p.reduced();
    let q_value_sq = 4.0 * (1.0 + a * a) * (1.0 + b * b);
    let l1_value_sq = 4.0 * (1.0 + b) * (1.0 + b);
    let la_value_sq = 4.0 * (a + b) * (a + b);

    // > 0 iff (Q) > (L1); > 0 iff t* < 1 (equivalently (Q) > (La)).
    let q_vs_l1 = a * a * (1.0 + b * b) - 2.0 * b;
    let q_vs_la = 1.0 - a * a * b * b;

    let label = if q_vs_l1 < -REGION_TOL {
        Region::LocalL1
    } else if q_vs_l1 <= REGION_TOL {
        if q_vs_la < -REGION_TOL {
            Region::LocalL1
        } else {
            Region::BoundaryQL1
        }
    } else if q_vs_la > REGION_TOL {
        Region::Quantum
    } else if q_vs_la >= -REGION_TOL {
        Region::BoundaryQLa
    } else if a >= 1.0 {
        // t* would leave [-1, 1]; the best admissible point is t = 1, where
        // (La) competes with (L1) and wins exactly when α ≥ 1.
        Region::LocalLa
    } else {
        Region::LocalL1
    };

    RegionClass {
        label,
        q_value_sq,
        l1_value_sq,
        la_value_sq,
    }
}

/// Bob's optimal anticommutation `t* = ((α²−1)/(α²+1))(β²+1) + β²`.
pub fn t_star(p: TiltedParams) -> Result<f64> {
    let (a, b) = p.reduced();
    let product_sq = a * a * b * b;
    if product_sq > 1.0 + REGION_TOL {
        return Err(Error::Range { product: a * b });
    }
    let a2 = a * a;
    let b2 = b * b;
    let t = (a2 - 1.0) / (a2 + 1.0) * (b2 + 1.0) + b2;
    Ok(t.clamp(-1.0, 1.0))
}

/// Closed-form optimal state inside the quantum region.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosedFormState {
    pub a: f64,
    pub d: f64,
    pub w_plus_norm: f64,
    pub w_minus_norm: f64,
    pub t_star: f64,
    /// Rows `1, u, v, uv` (Alice); columns `1, 2u, 2v, 4uv` (Bob, scaled).
    pub moments: [[f64; 4]; 4],
}

pub fn closed_form_state(p: TiltedParams) -> Result<ClosedFormState> {
    let class = classify(p);
    if class.label != Region::Quantum {
        return Err(Error::Region {
            alpha: p.alpha,
            beta: p.beta,
            region: class.label.name(),
        });
    }
    closed_form_unchecked(p)
}

/// The same formulas without the region check; only `|αβ| ≤ 1` is required.
///
/// Outside the quantum region they describe the top eigenvector at the
/// critical point `(0, t*)`, which is then not the global optimum.
pub fn closed_form_unchecked(p: TiltedParams) -> Result<ClosedFormState> {
    let t_star = t_star(p)?;
    let (al, be) = p.reduced();
    let ra = (1.0 + al * al).sqrt();
    let rb = (1.0 + be * be).sqrt();
    let a = ((rb + be * ra) / (2.0 * rb)).sqrt();
    let d = ((rb - be * ra).max(0.0) / (2.0 * rb)).sqrt();
    let w_plus = 2.0 * al * rb / ra;
    let w_minus = 2.0 * ((1.0 - al * al * be * be).max(0.0) / (1.0 + al * al)).sqrt();

    let sum = a * a + d * d;
    let diff = a * a - d * d;
    let cross = w_plus * w_plus - w_minus * w_minus;
    let moments = [
        [sum, diff * w_plus, diff * w_plus, sum * cross],
        [diff, sum * w_plus, sum * w_plus, diff * cross],
        [0.0, 2.0 * a * d * w_minus, -2.0 * a * d * w_minus, 0.0],
        // ⟨uv⊗uv⟩ = −a·d·|w₊|·|w₋|; the opposite sign belongs to uv⊗vu.
        [0.0, 0.0, 0.0, -4.0 * a * d * w_plus * w_minus],
    ];

    Ok(ClosedFormState {
        a,
        d,
        w_plus_norm: w_plus,
        w_minus_norm: w_minus,
        t_star,
        moments,
    })
}

impl ClosedFormState {
    /// Anticommutation point carrying the optimal state: `(0, t*)`.
    pub fn point(&self) -> AnticommPoint {
        AnticommPoint {
            s: 0.0,
            t: self.t_star,
        }
    }

    /// Unscaled `φ(a ⊗ b)` for basis words.
    pub fn basis_moment(&self, alice: BasisWord, bob: BasisWord) -> f64 {
        self.moments[alice.index()][bob.index()] / MOMENT_COLUMN_SCALE[bob.index()]
    }

    /// `φ(w_A ⊗ w_B)` for arbitrary words, by reducing both words at `(0, t*)`
    /// and contracting with the basis table.
    pub fn moment(&self, alice: &Word, bob: &Word) -> f64 {
        let ca = reduce_word(alice, 0.0).expect("s = 0 is in range");
        let cb = reduce_word(bob, self.t_star).expect("t* is clamped to [-1, 1]");
        let mut total = 0.0;
        for x in BasisWord::ALL {
            for y in BasisWord::ALL {
                total += ca[x.index()] * cb[y.index()] * self.basis_moment(x, y);
            }
        }
        total
    }

    /// `φ(CHSH(α, β))` computed from the moment table.
    pub fn bias(&self, p: TiltedParams) -> f64 {
        let (alpha, beta) = p.reduced();
        use BasisWord::{One, U, V};
        alpha * self.basis_moment(U, U) + alpha * self.basis_moment(U, V) + self.basis_moment(V, U)
            - self.basis_moment(V, V)
            + 2.0 * beta * self.basis_moment(U, One)
    }
}

/// JSON shape of the `tilted` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TiltedReport {
    pub alpha: f64,
    pub beta: f64,
    pub region: Region,
    pub value: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_plus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w_minus: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub moments: Option<[[f64; 4]; 4]>,
}

impl TiltedReport {
    pub fn new(p: TiltedParams) -> Self {
        let class = classify(p);
        let state = closed_form_state(p).ok();
        TiltedReport {
            alpha: p.alpha,
            beta: p.beta,
            region: class.label,
            value: class.value(),
            t_star: state.map(|s| s.t_star),
            a: state.map(|s| s.a),
            d: state.map(|s| s.d),
            w_plus: state.map(|s| s.w_plus_norm),
            w_minus: state.map(|s| s.w_minus_norm),
            moments: state.map(|s| s.moments),
        }
    }
}
