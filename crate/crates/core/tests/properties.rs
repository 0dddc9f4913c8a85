use biquad::convert::to_game;
use biquad::matrix::{vec_norm, CMat, Mat2, Mat4, C64};
use biquad::optimize::{optimize, NormSurface, OptimizeConfig};
use biquad::oracle::{brute_force_value, strategy_value};
use biquad::realize::{
    assemble, evaluate_direct, realize_generators, word_matrix, AnticommPoint, Realization,
    StandardRealization,
};
use biquad::spectral::{
    eigen_residual, hermitian_spectrum, jacobi_eigen, operator_norm, operator_norm2,
};
use biquad::state::{extract_state, moment, reduced_moment};
use biquad::tilted::{build_polynomial, classify, closed_form_state, Region, TiltedParams};
use biquad::word::{reduce_polynomial, reduce_word, BasisWord, BiasPolynomial, Letter, Term, Word};
use proptest::prelude::*;

fn word_strategy(max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(prop::bool::ANY, 0..=max_len).prop_map(|bits| {
        Word::new(
            bits.into_iter()
                .map(|b| if b { Letter::U } else { Letter::V })
                .collect(),
        )
    })
}

fn poly_strategy(max_terms: usize, max_len: usize) -> impl Strategy<Value = BiasPolynomial> {
    prop::collection::vec(
        (-2.0f64..2.0, word_strategy(max_len), word_strategy(max_len)),
        0..=max_terms,
    )
    .prop_map(|terms| {
        BiasPolynomial::new(
            terms
                .into_iter()
                .map(|(c, a, b)| Term::new(c, a, b))
                .collect(),
        )
    })
}

/// `p + p*`: self-adjoint by construction.
fn hermitian_poly_strategy(
    max_terms: usize,
    max_len: usize,
) -> impl Strategy<Value = BiasPolynomial> {
    poly_strategy(max_terms, max_len).prop_map(|p| p.add(&p.adjoint()))
}

fn c64() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(re, im)| C64::new(re, im))
}

fn mat4() -> impl Strategy<Value = Mat4> {
    prop::array::uniform4(prop::array::uniform4(c64())).prop_map(CMat)
}

fn hermitian2() -> impl Strategy<Value = Mat2> {
    (-1.0f64..1.0, -1.0f64..1.0, c64())
        .prop_map(|(p, r, q)| CMat([[C64::new(p, 0.0), q], [q.conj(), C64::new(r, 0.0)]]))
}

fn point() -> impl Strategy<Value = AnticommPoint> {
    (-1.0f64..=1.0, -1.0f64..=1.0).prop_map(|(s, t)| AnticommPoint { s, t })
}

fn max_abs_diff(a: &Mat4, b: &Mat4) -> f64 {
    (*a - *b).frobenius_norm()
}

fn quantum_params() -> impl Strategy<Value = TiltedParams> {
    (0.05f64..2.5, 0.0f64..1.5)
        .prop_map(|(a, b)| TiltedParams::new(a, b))
        .prop_filter("open quantum region", |p| {
            classify(*p).label == Region::Quantum
        })
}

proptest! {
    #[test]
    fn reduced_words_reproduce_letter_products(w in word_strategy(8), s in -1.0f64..=1.0) {
        let coeffs = reduce_word(&w, s).unwrap();
        let basis = StandardRealization.basis_matrices(s);
        let mut rebuilt = Mat2::zeros();
        for b in BasisWord::ALL {
            rebuilt = rebuilt + basis[b.index()].scale_real(coeffs[b.index()]);
        }
        let direct = word_matrix(&w, s).unwrap();
        prop_assert!((rebuilt - direct).frobenius_norm() <= 1e-12);
    }

    #[test]
    fn reduction_degree_is_bounded_by_word_length(w in word_strategy(6)) {
        // Interpolate through |w|+1 nodes, then predict elsewhere.
        let deg = w.len();
        let nodes: Vec<f64> = (0..=deg)
            .map(|k| (std::f64::consts::PI * (k as f64 + 0.5) / (deg as f64 + 1.0)).cos())
            .collect();
        let values: Vec<[f64; 4]> = nodes.iter().map(|&s| reduce_word(&w, s).unwrap()).collect();
        for probe in [-0.93, -0.41, 0.07, 0.66, 1.0] {
            let actual = reduce_word(&w, probe).unwrap();
            for c in 0..4 {
                let mut predicted = 0.0;
                for (i, &xi) in nodes.iter().enumerate() {
                    let mut basis = 1.0;
                    for (j, &xj) in nodes.iter().enumerate() {
                        if i != j {
                            basis *= (probe - xj) / (xi - xj);
                        }
                    }
                    predicted += values[i][c] * basis;
                }
                prop_assert!((predicted - actual[c]).abs() <= 1e-9, "{w} coeff {c}: {predicted} vs {}", actual[c]);
            }
        }
    }

    #[test]
    fn reduction_is_linear(p in poly_strategy(5, 4), q in poly_strategy(5, 4), c in -3.0f64..3.0, pt in point()) {
        let lhs = reduce_polynomial(&p.scale(c).add(&q), pt).unwrap();
        let rp = reduce_polynomial(&p, pt).unwrap();
        let rq = reduce_polynomial(&q, pt).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = c * rp.lambda[i][j] + rq.lambda[i][j];
                prop_assert!((lhs.lambda[i][j] - expected).abs() <= 1e-12 * (1.0 + expected.abs()));
            }
        }
    }

    #[test]
    fn realization_is_a_homomorphism(p in poly_strategy(6, 4), pt in point()) {
        let reduced = assemble(&reduce_polynomial(&p, pt).unwrap()).entries;
        let direct = evaluate_direct(&p, pt).unwrap().entries;
        prop_assert!(max_abs_diff(&reduced, &direct) <= 1e-12);
    }

    #[test]
    fn tensor_norm_is_multiplicative(a in hermitian2(), b in hermitian2()) {
        let lhs = operator_norm(&a.kron(&b));
        let rhs = operator_norm2(&a) * operator_norm2(&b);
        prop_assert!((lhs - rhs).abs() <= 1e-12);
    }

    #[test]
    fn eigenvector_residual_is_small(m in mat4()) {
        let h = (m + m.adjoint()).scale_real(0.5);
        let spectrum = hermitian_spectrum(&h).unwrap();
        prop_assert!(eigen_residual(&h, spectrum.max_eig, &spectrum.max_vec) <= 1e-10);
    }

    #[test]
    fn reconstruction_and_reduced_moments(
        p in hermitian_poly_strategy(4, 3),
        pt in point(),
        wa in word_strategy(5),
        wb in word_strategy(5),
    ) {
        let state = extract_state(&p, pt).unwrap();
        prop_assert!((vec_norm(&state.vector) - 1.0).abs() <= 1e-12);
        let sch = state.schmidt;
        prop_assert!(sch.a >= sch.d && sch.d >= 0.0);
        prop_assert!((sch.a * sch.a + sch.d * sch.d - 1.0).abs() <= 1e-12);
        let r = sch.reconstruct();
        let diff: [C64; 4] = std::array::from_fn(|i| r[i] - state.vector[i]);
        prop_assert!(vec_norm(&diff) <= 1e-10);
        let direct = moment(&state, &wa, &wb);
        let reduced = reduced_moment(&state, &wa, &wb).unwrap();
        prop_assert!((direct - reduced).norm() <= 1e-10);
        if wa == wa.adjoint() && wb == wb.adjoint() {
            prop_assert!(direct.im.abs() <= 1e-10);
        }
    }

    #[test]
    fn oracle_relative_angles_suffice(
        p in hermitian_poly_strategy(4, 3),
        angles in prop::array::uniform4(0.0f64..6.3),
        shifts in prop::array::uniform2(-3.0f64..3.0),
    ) {
        let base = strategy_value(&p, [angles[0], angles[1]], [angles[2], angles[3]]);
        let moved = strategy_value(
            &p,
            [angles[0] + shifts[0], angles[1] + shifts[0]],
            [angles[2] + shifts[1], angles[3] + shifts[1]],
        );
        prop_assert!((base - moved).abs() <= 1e-10);
    }

    #[test]
    fn game_spectrum_is_shifted_bias_spectrum(p in hermitian_poly_strategy(4, 3), pt in point()) {
        let game = to_game(&p).unwrap();
        let bias_m = assemble(&reduce_polynomial(&p, pt).unwrap()).entries;
        let game_m = assemble(&reduce_polynomial(&game.shifted(), pt).unwrap()).entries;
        let eb = hermitian_spectrum(&bias_m).unwrap().eigenvalues;
        let eg = hermitian_spectrum(&game_m).unwrap().eigenvalues;
        for i in 0..4 {
            prop_assert!((eg[i] - eb[i] - game.shift).abs() <= 1e-12 * (1.0 + game.shift));
        }
        prop_assert!(eg[0] >= -1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn c_star_identity_against_independent_svd(m in mat4()) {
        let ours = operator_norm(&m);
        let gram = m.adjoint() * m;
        let top = jacobi_eigen(&gram).values[3];
        prop_assert!((ours * ours - top).abs() <= 1e-10);
        let na = nalgebra::Matrix4::<nalgebra::Complex<f64>>::from_fn(|i, j| {
            nalgebra::Complex::new(m.0[i][j].re, m.0[i][j].im)
        });
        let reference = na.singular_values().max();
        prop_assert!((ours - reference).abs() <= 1e-10);
    }

    #[test]
    fn random_walk_norm_law(a in -3.0f64..3.0, b in -3.0f64..3.0, c in -3.0f64..3.0, d in -3.0f64..3.0) {
        let (u, v) = realize_generators(0.0).unwrap();
        let w = (u * v).scale(C64::new(0.0, 1.0));
        let m = u.scale_real(a) + v.scale_real(b) + w.scale_real(c) + Mat2::identity().scale_real(d);
        let expected = (a * a + b * b + c * c).sqrt() + d.abs();
        prop_assert!((operator_norm2(&m) - expected).abs() <= 1e-10);
    }

    #[test]
    fn optimizer_history_is_monotone_and_dominates_oracle(p in hermitian_poly_strategy(4, 3)) {
        let cfg = OptimizeConfig { grid_n: 41, refine_iters: 4, tol: 1e-8 };
        let r = optimize(&p, &cfg).unwrap();
        prop_assert!(r.history.windows(2).all(|w| w[1] >= w[0]));
        let oracle = brute_force_value(&p, 2000, 5).unwrap();
        prop_assert!(oracle.achieved <= r.value + 1e-6);
    }

    #[test]
    fn off_best_set_points_cannot_attain_the_value(p in hermitian_poly_strategy(4, 3), pts in prop::collection::vec(point(), 20)) {
        let r = optimize(&p, &OptimizeConfig { grid_n: 41, refine_iters: 4, tol: 1e-8 }).unwrap();
        let surface = NormSurface::new(&p);
        for pt in pts {
            if surface.norm_at(pt) < r.value - 1e-3 {
                let m = assemble(&reduce_polynomial(&p, pt).unwrap()).entries;
                prop_assert!(hermitian_spectrum(&m).unwrap().max_eig < r.value);
            }
        }
    }

    #[test]
    fn oracle_never_decreases_with_more_samples(p in hermitian_poly_strategy(3, 2), seed in 0u64..1000) {
        let small = brute_force_value(&p, 300, seed).unwrap().achieved;
        let large = brute_force_value(&p, 600, seed).unwrap().achieved;
        prop_assert!(large >= small);
    }

    #[test]
    fn bias_is_saturated_by_the_optimal_state(params in quantum_params()) {
        let poly = build_polynomial(params);
        let r = optimize(&poly, &OptimizeConfig::default()).unwrap();
        let state = extract_state(&poly, r.best_points[0]).unwrap();
        let total: f64 = poly
            .terms
            .iter()
            .map(|t| t.coeff * moment(&state, &t.alice, &t.bob).re)
            .sum();
        prop_assert!((total - r.value).abs() <= 1e-8);
        let closed = closed_form_state(params).unwrap();
        prop_assert!((state.schmidt.a - closed.a).abs() <= 1e-6);
    }

    #[test]
    fn symmetric_spectrum_norms_add(alpha in 0.1f64..2.0, pt in point()) {
        // Without marginal terms the tilted family has spectrum symmetric about zero.
        let poly = build_polynomial(TiltedParams::new(alpha, 0.0));
        let game = to_game(&poly).unwrap();
        let bias_m = assemble(&reduce_polynomial(&poly, pt).unwrap()).entries;
        let game_m = assemble(&reduce_polynomial(&game.shifted(), pt).unwrap()).entries;
        let nb = hermitian_spectrum(&bias_m).unwrap().norm;
        let ng = hermitian_spectrum(&game_m).unwrap().norm;
        prop_assert!((ng - nb - game.shift).abs() <= 1e-12 * (1.0 + game.shift));
    }
}

#[test]
fn oracle_matrix_convention_matches_kronecker_assembly() {
    // At θ_u = 0 the oracle's observables coincide with the standard realization.
    let poly = build_polynomial(TiltedParams::new(0.7, 0.2));
    let (s, t) = (0.3f64, -0.6f64);
    let value = strategy_value(&poly, [0.0, s.acos()], [0.0, t.acos()]);
    let m = assemble(&reduce_polynomial(&poly, AnticommPoint { s, t }).unwrap()).entries;
    let spectrum = hermitian_spectrum(&m).unwrap();
    assert!((value - spectrum.norm).abs() < 1e-12);
}
