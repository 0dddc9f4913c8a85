//! Spectra and operator norms of small matrices.
//!
//! Hermitian 4x4 problems are diagonalized by cyclic complex Jacobi rotations;
//! non-normal operators go through the C*-identity `‖M‖² = ‖M*M‖`.

use crate::error::{Error, Result};
use crate::matrix::{vec_norm, CMat, Mat2, Mat4, Vec4, C64, ZERO};

/// Tolerance on `‖M - M*‖_F` accepted as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Eigenvalues this close to the maximum count as a degenerate top eigenspace.
pub const DEGENERACY_TOL: f64 = 1e-9;

const JACOBI_OFF_TOL: f64 = 1e-13;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Ascending eigenvalues and the unitary whose columns are matching eigenvectors.
#[derive(Clone, Copy, Debug)]
pub struct Eigen<const N: usize> {
    pub values: [f64; N],
    pub vectors: CMat<N>,
}

fn off_diagonal_norm<const N: usize>(a: &CMat<N>) -> f64 {
    let mut sum = 0.0;
    for i in 0..N {
        for j in 0..N {
            if i != j {
                sum += a.0[i][j].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// Cyclic Jacobi diagonalization of a Hermitian matrix (the input is trusted
/// to be Hermitian; only its upper triangle drives the rotations).
///
/// Stops once the off-diagonal Frobenius norm drops below `1e-13` relative to
/// `max(1, ‖A‖_F)`, or after 100 sweeps.
pub fn jacobi_eigen<const N: usize>(m: &CMat<N>) -> Eigen<N> {
    let mut a = *m;
    let mut v = CMat::<N>::identity();
    let scale = m.frobenius_norm().max(1.0);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..N {
            for q in (p + 1)..N {
                let apq = a.0[p][q];
                let g = apq.norm();
                if g <= f64::MIN_POSITIVE {
                    continue;
                }
                // Phase e makes the (p,q) entry real, then a real rotation kills it.
                let e = apq / g;
                let app = a.0[p][p].re;
                let aqq = a.0[q][q].re;
                let theta = (aqq - app) / (2.0 * g);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                // J = [[c, s], [-s·ē, c·ē]] on the (p, q) plane; A ← J* A J, V ← V J.
                let jqp = -e.conj() * s;
                let jqq = e.conj() * c;
                for k in 0..N {
                    let akp = a.0[k][p];
                    let akq = a.0[k][q];
                    a.0[k][p] = akp * c + akq * jqp;
                    a.0[k][q] = akp * s + akq * jqq;
                }
                for k in 0..N {
                    let apk = a.0[p][k];
                    let aqk = a.0[q][k];
                    a.0[p][k] = apk * c + aqk * jqp.conj();
                    a.0[q][k] = apk * s + aqk * jqq.conj();
                }
                a.0[p][q] = ZERO;
                a.0[q][p] = ZERO;
                a.0[p][p] = C64::new(a.0[p][p].re, 0.0);
                a.0[q][q] = C64::new(a.0[q][q].re, 0.0);
                for k in 0..N {
                    let vkp = v.0[k][p];
                    let vkq = v.0[k][q];
                    v.0[k][p] = vkp * c + vkq * jqp;
                    v.0[k][q] = vkp * s + vkq * jqq;
                }
            }
        }
    }

    let mut order: [usize; N] = std::array::from_fn(|i| i);
    order.sort_by(|&i, &j| a.0[i][i].re.total_cmp(&a.0[j][j].re));
    let values = std::array::from_fn(|k| a.0[order[k]][order[k]].re);
    let mut vectors = CMat::<N>::zeros();
    for (new, &old) in order.iter().enumerate() {
        for k in 0..N {
            vectors.0[k][new] = v.0[k][old];
        }
    }
    Eigen { values, vectors }
}

/// Closed-form eigendecomposition of a 2x2 Hermitian matrix.
pub fn hermitian_eigen2(m: &Mat2) -> Eigen<2> {
    let p = m.0[0][0].re;
    let r = m.0[1][1].re;
    let q = m.0[0][1];
    let mean = 0.5 * (p + r);
    let radius = (0.5 * (p - r)).hypot(q.norm());
    let hi = mean + radius;
    let lo = mean - radius;

    let top: [C64; 2] = if q.norm() <= 1e-300 {
        if p >= r {
            [C64::new(1.0, 0.0), ZERO]
        } else {
            [ZERO, C64::new(1.0, 0.0)]
        }
    } else {
        // Rows of (M - hi) give two candidate null vectors; keep the larger one.
        let from_row0 = [q, C64::new(hi - p, 0.0)];
        let from_row1 = [C64::new(hi - r, 0.0), q.conj()];
        let pick = if vec_norm(&from_row0) >= vec_norm(&from_row1) {
            from_row0
        } else {
            from_row1
        };
        let n = vec_norm(&pick);
        [pick[0] / n, pick[1] / n]
    };
    let bottom = [-top[1].conj(), top[0].conj()];
    Eigen {
        values: [lo, hi],
        vectors: CMat([[bottom[0], top[0]], [bottom[1], top[1]]]),
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SpectralResult {
    pub max_eig: f64,
    pub min_eig: f64,
    /// Unit eigenvector for `max_eig`; any unit vector of the top eigenspace when degenerate.
    pub max_vec: Vec4,
    pub norm: f64,
    /// All four eigenvalues, ascending.
    pub eigenvalues: [f64; 4],
    /// Number of eigenvalues within `DEGENERACY_TOL` of the maximum.
    pub top_multiplicity: usize,
}

impl SpectralResult {
    pub fn is_degenerate(&self) -> bool {
        self.top_multiplicity > 1
    }
}

/// Spectrum of a Hermitian 4x4 matrix; rejects inputs with `‖M - M*‖_F > 1e-10`.
pub fn hermitian_spectrum(m: &Mat4) -> Result<SpectralResult> {
    let deviation = m.hermitian_deviation();
    if deviation.is_nan() || deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(spectrum_from_eigen(&jacobi_eigen(m)))
}

pub(crate) fn spectrum_from_eigen(eig: &Eigen<4>) -> SpectralResult {
    let values = eig.values;
    let max_eig = values[3];
    let min_eig = values[0];
    let top_multiplicity = values
        .iter()
        .filter(|&&x| max_eig - x <= DEGENERACY_TOL)
        .count();
    SpectralResult {
        max_eig,
        min_eig,
        max_vec: eig.vectors.column(3),
        norm: max_eig.abs().max(min_eig.abs()),
        eigenvalues: values,
        top_multiplicity,
    }
}

/// `‖M‖ = √λ_max(M*M)`; valid for any, possibly non-normal, matrix.
pub fn operator_norm<const N: usize>(m: &CMat<N>) -> f64 {
    let gram = m.adjoint() * *m;
    let top = jacobi_eigen(&gram).values[N - 1];
    top.max(0.0).sqrt()
}

/// `‖M‖` of a 2x2 matrix via the closed-form Hermitian route on `M*M`.
pub fn operator_norm2(m: &Mat2) -> f64 {
    let gram = m.adjoint() * *m;
    hermitian_eigen2(&gram).values[1].max(0.0).sqrt()
}

/// Whether the sorted spectrum equals its own negation within `tol`.
pub fn spectrum_is_symmetric(m: &Mat4, tol: f64) -> Result<bool> {
    let spectrum = hermitian_spectrum(m)?;
    let e = spectrum.eigenvalues;
    Ok((0..4).all(|i| (e[i] + e[3 - i]).abs() <= tol))
}

/// `‖M v - λ v‖₂`.
pub fn eigen_residual(m: &Mat4, value: f64, vector: &Vec4) -> f64 {
    let mv = m.apply(vector);
    let diff: Vec4 = std::array::from_fn(|i| mv[i] - vector[i] * value);
    vec_norm(&diff)
}
