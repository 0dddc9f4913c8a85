//! Brute-force lower bounds from explicit qubit strategies.
//!
//! Each player's observables are `cos θ·Z + sin θ·X`; angles follow an
//! additive recurrence on the 4-torus (generalized golden ratio) started at
//! a seeded random offset, so any prefix of the sample sequence is itself a
//! valid, smaller run. Matrices here are real and built with `nalgebra`,
//! independently of the word-reduction pipeline.

use std::f64::consts::TAU;

use nalgebra::{Matrix2, Matrix4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{BiasPolynomial, Letter};

/// Unique real root of `x⁵ = x + 1`; its inverse powers generate a
/// low-discrepancy sequence in four dimensions.
const PLASTIC_4: f64 = 1.167_303_978_261_418_7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledStrategy {
    /// `(θ_u, θ_v)` for Alice, radians.
    pub alice_angles: [f64; 2],
    pub bob_angles: [f64; 2],
    pub achieved: f64,
}

fn observable(theta: f64) -> Matrix2<f64> {
    let (sin, cos) = theta.sin_cos();
    Matrix2::new(cos, sin, sin, -cos)
}

fn word_product(letters: &[Letter], u: &Matrix2<f64>, v: &Matrix2<f64>) -> Matrix2<f64> {
    letters.iter().fold(Matrix2::identity(), |acc, l| match l {
        Letter::U => acc * u,
        Letter::V => acc * v,
    })
}

/// Bias achieved by the angle strategy: the spectral radius of the realized
/// operator (largest singular value when it is not symmetric).
pub fn strategy_value(poly: &BiasPolynomial, alice: [f64; 2], bob: [f64; 2]) -> f64 {
    let (au, av) = (observable(alice[0]), observable(alice[1]));
    let (bu, bv) = (observable(bob[0]), observable(bob[1]));
    let mut m = Matrix4::<f64>::zeros();
    for t in &poly.terms {
        let a = word_product(t.alice.letters(), &au, &av);
        let b = word_product(t.bob.letters(), &bu, &bv);
        m += a.kronecker(&b) * t.coeff;
    }
    let asymmetry = (m - m.transpose()).norm();
    if asymmetry <= 1e-12 * m.norm().max(1.0) {
        let sym = (m + m.transpose()) * 0.5;
        sym.symmetric_eigenvalues().amax()
    } else {
        m.singular_values().max()
    }
}

fn sample_angles(offset: &[f64; 4], n: usize) -> [f64; 4] {
    let mut g = 1.0;
    std::array::from_fn(|k| {
        g /= PLASTIC_4;
        TAU * (offset[k] + g * n as f64).fract()
    })
}

/// Best strategy among the first `samples` points of the seeded sequence.
///
/// Deterministic for fixed `(samples, seed)` regardless of thread count:
/// ties keep the earliest sample.
pub fn brute_force_value(
    poly: &BiasPolynomial,
    samples: usize,
    seed: u64,
) -> Result<SampledStrategy> {
    if samples < 1 {
        return Err(Error::Config("oracle needs at least one sample".into()));
    }
    poly.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offset: [f64; 4] = std::array::from_fn(|_| rng.gen::<f64>());

    let (achieved, best) = (0..samples)
        .into_par_iter()
        .map(|n| {
            let th = sample_angles(&offset, n);
            (strategy_value(poly, [th[0], th[1]], [th[2], th[3]]), n)
        })
        .reduce(
            || (f64::NEG_INFINITY, usize::MAX),
            |x, y| {
                if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                    y
                } else {
                    x
                }
            },
        );
    let th = sample_angles(&offset, best);
    Ok(SampledStrategy {
        alice_angles: [th[0], th[1]],
        bob_angles: [th[2], th[3]],
        achieved,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyAngles {
    pub alice: [f64; 2],
    pub bob: [f64; 2],
}

/// JSON shape of the `oracle` command.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub achieved: f64,
    pub angles: StrategyAngles,
}

impl From<&SampledStrategy> for OracleReport {
    fn from(s: &SampledStrategy) -> Self {
        OracleReport {
            achieved: s.achieved,
            angles: StrategyAngles {
                alice: s.alice_angles,
                bob: s.bob_angles,
            },
        }
    }
}
