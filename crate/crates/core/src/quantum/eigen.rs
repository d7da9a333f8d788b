//! Cyclic Jacobi eigensolver for small dense Hermitian matrices.

use num_complex::Complex64;

use super::matrix::CMatrix;
use crate::error::{Error, Result};

/// Largest tolerated `|A_ij - conj(A_ji)|` for an input to be accepted.
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues in descending order with the matching eigenvectors as
/// columns of `vectors`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<Complex64> {
        self.vectors.column(k)
    }
}

fn off_diagonal_norm(a: &CMatrix) -> f64 {
    let n = a.dim();
    let mut acc = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                acc += a[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

pub fn eigh(input: &CMatrix) -> Result<HermitianEigen> {
    let defect = input.hermitian_defect();
    if defect > HERMITIAN_TOLERANCE {
        return Err(Error::NotHermitian(defect));
    }
    let n = input.dim();
    // symmetrize so the rotations act on an exactly Hermitian matrix
    let mut a = CMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = (input[(i, j)] + input[(j, i)].conj()) * 0.5;
        }
    }
    let mut v = CMatrix::identity(n);
    let scale = input.data().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let threshold = f64::EPSILON * scale.max(f64::MIN_POSITIVE);

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= threshold {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[j].total_cmp(&diag[i]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let mut vectors = CMatrix::zeros(n);
    for (k, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[(r, k)] = v[(r, src)];
        }
    }
    Ok(HermitianEigen { values, vectors })
}

/// Zeroes `a[p][q]` with the unitary
/// `[[c, -s e^{i phi}], [s e^{-i phi}, c]]` acting on rows/columns p, q.
fn rotate(a: &mut CMatrix, v: &mut CMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = apq.norm();
    if r == 0.0 {
        return;
    }
    let n = a.dim();
    let phase = apq / r;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let theta = 0.5 * (2.0 * r).atan2(app - aqq);
    let (s, c) = theta.sin_cos();
    let upq = -phase * s; // U[p][q]
    let uqp = phase.conj() * s; // U[q][p]

    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * uqp;
        a[(k, q)] = akp * upq + akq * c;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * uqp.conj();
        a[(q, k)] = apk * upq.conj() + aqk * c;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * c + vkq * uqp;
        v[(k, q)] = vkp * upq + vkq * c;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(m: &CMatrix, e: &HermitianEigen) -> f64 {
        (0..m.dim())
            .map(|k| {
                let x = e.vector(k);
                let mx = m.apply(&x);
                mx.iter()
                    .zip(&x)
                    .map(|(a, b)| (a - b * e.values[k]).norm())
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn two_by_two_pauli() {
        let m = CMatrix::pauli_observable([0.6, 0.0, 0.8]);
        let e = eigh(&m).unwrap();
        assert!((e.values[0] - 1.0).abs() < 1e-14);
        assert!((e.values[1] + 1.0).abs() < 1e-14);
        assert!(residual(&m, &e) < 1e-14);
    }

    #[test]
    fn complex_phases() {
        let y = CMatrix::pauli_observable([0.0, 1.0, 0.0]);
        let x = CMatrix::pauli_observable([1.0, 0.0, 0.0]);
        let m = y.kron(&x);
        let mut m2 = m.clone();
        m2.add_scaled(0.3, &x.kron(&y));
        let e = eigh(&m2).unwrap();
        assert!(residual(&m2, &e) < 1e-12);
        let sum: f64 = e.values.iter().sum();
        assert!((sum - m2.trace().re).abs() < 1e-12);
        let vv = e.vectors.adjoint().matmul(&e.vectors);
        assert!(vv.max_abs_diff(&CMatrix::identity(4)) < 1e-12);
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(eigh(&m), Err(Error::NotHermitian(_))));
    }

    #[test]
    fn zero_matrix() {
        let e = eigh(&CMatrix::zeros(4)).unwrap();
        assert!(e.values.iter().all(|&v| v == 0.0));
    }
}
