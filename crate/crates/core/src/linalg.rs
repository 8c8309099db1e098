//! Small dense helpers on top of nalgebra.

use alloc::format;
use nalgebra::{Complex, DMatrix, SymmetricEigen};

use crate::{Error, Result};

pub type C64 = Complex<f64>;

/// Condition number above which a symmetric positive matrix is treated as
/// singular.
pub const MAX_CONDITION: f64 = 1e12;

pub fn c64(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

/// `|z|`.
pub fn modulus(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `exp(-j * phase)` scaled by `magnitude`.
pub fn phasor(magnitude: f64, phase: f64) -> C64 {
    let (s, c) = libm::sincos(phase);
    Complex::new(magnitude * c, -magnitude * s)
}

/// `m ⊗ [1, 1]`: every column repeated twice in place.
pub fn duplicate_columns<T: nalgebra::Scalar + Copy>(m: &DMatrix<T>) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), 2 * m.ncols(), |i, j| m[(i, j / 2)])
}

pub fn max_abs_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

pub fn max_abs_anti_hermitian(m: &DMatrix<C64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..=i {
            worst = worst.max(modulus(m[(i, j)] - m[(j, i)].conj()));
        }
    }
    worst
}

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn hermitize(m: &DMatrix<C64>) -> DMatrix<C64> {
    (m + m.adjoint()) * c64(0.5, 0.0)
}

pub fn trace_c(m: &DMatrix<C64>) -> C64 {
    m.diagonal().iter().copied().sum()
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> alloc::vec::Vec<f64> {
    let mut ev: alloc::vec::Vec<f64> = SymmetricEigen::new(symmetrize(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Eigenvalues of a complex Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &DMatrix<C64>) -> alloc::vec::Vec<f64> {
    let mut ev: alloc::vec::Vec<f64> = SymmetricEigen::new(hermitize(m))
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// Real `2n × 2n` embedding `[[Re, -Im], [Im, Re]]` of a complex matrix.
/// A Hermitian matrix is PSD iff its embedding is.
pub fn real_embedding(m: &DMatrix<C64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    DMatrix::from_fn(2 * r, 2 * c, |i, j| {
        let z = m[(i % r, j % c)];
        match (i < r, j < c) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    })
}

/// Inverse of a symmetric positive-definite matrix through its
/// eigendecomposition. Fails with [`Error::UnidentifiableScene`] when the
/// matrix is indefinite or its condition number exceeds [`MAX_CONDITION`].
pub fn spd_inverse(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let n = m.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = SymmetricEigen::new(symmetrize(m));
    let max = eig.eigenvalues.max();
    let min = eig.eigenvalues.min();
    let condition = if min > 0.0 { max / min } else { f64::INFINITY };
    if !(max > 0.0) || !(min > 0.0) || condition > MAX_CONDITION || !condition.is_finite() {
        return Err(Error::UnidentifiableScene {
            min_eigenvalue: min,
            condition,
        });
    }
    let scaled = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, j)] / eig.eigenvalues[j]);
    Ok(symmetrize(&(scaled * eig.eigenvectors.transpose())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedding_layout() {
        let m = DMatrix::from_row_slice(1, 1, &[c64(2.0, 3.0)]);
        let e = real_embedding(&m);
        assert_eq!(e, DMatrix::from_row_slice(2, 2, &[2.0, -3.0, 3.0, 2.0]));
    }

    #[test]
    fn spd_inverse_rejects_singular() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        assert!(matches!(
            spd_inverse(&m),
            Err(Error::UnidentifiableScene { .. })
        ));
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1e-13]);
        assert!(matches!(
            spd_inverse(&m),
            Err(Error::UnidentifiableScene { .. })
        ));
    }

    #[test]
    fn spd_inverse_matches_lu() {
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 1.0, 0.5, 1.0, 3.0, 0.2, 0.5, 0.2, 2.0]);
        let inv = spd_inverse(&m).unwrap();
        let lu = m.clone().try_inverse().unwrap();
        assert!((inv - lu).norm() < 1e-14);
    }

    #[test]
    fn duplicate_columns_is_kronecker_with_ones() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 3.0, 4.0]);
        let ones = DMatrix::from_row_slice(1, 2, &[1.0, 1.0]);
        assert_eq!(duplicate_columns(&m), m.kronecker(&ones));
    }
}
