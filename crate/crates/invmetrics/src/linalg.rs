//! Small helpers for complex vectors and their realifications.
//!
//! Real coordinates are always ordered `(x_1, y_1, ..., x_n, y_n)` where
//! `z_j = x_j + i y_j`; every 2n x 2n real Hessian in the crate uses this
//! ordering.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Hermitian inner product `<z, w> = sum z_j conj(w_j)`.
pub fn herm(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

/// Bilinear dot product `z . w = sum z_j w_j` (no conjugation).
pub fn dot(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b).sum()
}

pub fn norm_sq(z: &[Complex64]) -> f64 {
    z.iter().map(|a| a.norm_sqr()).sum()
}

pub fn norm(z: &[Complex64]) -> f64 {
    norm_sq(z).sqrt()
}

pub fn sub(z: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    z.iter().zip(w).map(|(a, b)| a - b).collect()
}

pub fn add(z: &[Complex64], w: &[Complex64]) -> Vec<Complex64> {
    z.iter().zip(w).map(|(a, b)| a + b).collect()
}

pub fn scale(z: &[Complex64], s: Complex64) -> Vec<Complex64> {
    z.iter().map(|a| a * s).collect()
}

pub fn dist(z: &[Complex64], w: &[Complex64]) -> f64 {
    z.iter()
        .zip(w)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Complex vector -> interleaved real vector `(x_1, y_1, ...)`.
pub fn realify(z: &[Complex64]) -> DVector<f64> {
    let mut v = DVector::zeros(2 * z.len());
    for (j, c) in z.iter().enumerate() {
        v[2 * j] = c.re;
        v[2 * j + 1] = c.im;
    }
    v
}

/// Interleaved real vector -> complex vector.
pub fn complexify(v: &[f64]) -> Vec<Complex64> {
    assert!(v.len() % 2 == 0);
    (0..v.len() / 2)
        .map(|j| Complex64::new(v[2 * j], v[2 * j + 1]))
        .collect()
}

/// Realified Jacobian of a holomorphic map from its complex Jacobian.
///
/// `jc` is m x n with entries `d Phi_i / d z_j`; the result is 2m x 2n with
/// the 2x2 block `[[a, -b], [b, a]]` for each complex entry `a + i b`.
pub fn realify_jacobian(jc: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (m, n) = jc.shape();
    let mut jr = DMatrix::zeros(2 * m, 2 * n);
    for i in 0..m {
        for j in 0..n {
            let c = jc[(i, j)];
            jr[(2 * i, 2 * j)] = c.re;
            jr[(2 * i, 2 * j + 1)] = -c.im;
            jr[(2 * i + 1, 2 * j)] = c.im;
            jr[(2 * i + 1, 2 * j + 1)] = c.re;
        }
    }
    jr
}

/// Spectral norm (largest absolute eigenvalue) of a symmetric matrix.
pub fn sym_spectral_norm(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &e| acc.max(e.abs()))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn sym_min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let sym = (m + m.transpose()) * 0.5;
    sym.symmetric_eigen()
        .eigenvalues
        .iter()
        .fold(f64::INFINITY, |acc, &e| acc.min(e))
}

/// Orthonormal basis of the orthogonal complement of `v` in R^k.
///
/// Returns k-1 columns obtained from the Householder reflection that maps
/// `v` onto a coordinate axis.
pub fn orthogonal_complement(v: &DVector<f64>) -> DMatrix<f64> {
    let k = v.len();
    let n = v.norm();
    assert!(n > 0.0, "cannot complement the zero vector");
    let mut u = v / n;
    // Reflect onto +/- e_p where p is the largest component, for stability.
    let p = u.iamax();
    let sign = if u[p] >= 0.0 { 1.0 } else { -1.0 };
    u[p] += sign;
    let un = u.norm();
    let u = u / un;
    // H = I - 2 u u^T maps v to -sign * e_p (up to scale); its other columns
    // span the complement of v.
    let mut basis = DMatrix::zeros(k, k - 1);
    let mut col = 0;
    for j in 0..k {
        if j == p {
            continue;
        }
        for i in 0..k {
            let h = (if i == j { 1.0 } else { 0.0 }) - 2.0 * u[i] * u[j];
            basis[(i, col)] = h;
        }
        col += 1;
    }
    basis
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn herm_and_dot_disagree_off_reals() {
        let z = vec![Complex64::new(0.0, 1.0)];
        let w = vec![Complex64::new(0.0, 1.0)];
        assert_eq!(herm(&z, &w), Complex64::new(1.0, 0.0));
        assert_eq!(dot(&z, &w), Complex64::new(-1.0, 0.0));
    }

    #[test]
    fn realify_round_trip() {
        let z = vec![Complex64::new(1.5, -2.0), Complex64::new(0.0, 3.25)];
        assert_eq!(complexify(realify(&z).as_slice()), z);
    }

    #[test]
    fn complement_is_orthonormal() {
        let v = DVector::from_vec(vec![1.0, 2.0, -3.0, 0.5]);
        let b = orthogonal_complement(&v);
        assert_eq!(b.ncols(), 3);
        for j in 0..3 {
            assert!((b.column(j).norm() - 1.0).abs() < 1e-12);
            assert!(b.column(j).dot(&v).abs() < 1e-12);
            for k in (j + 1)..3 {
                assert!(b.column(j).dot(&b.column(k)).abs() < 1e-12);
            }
        }
    }
}
