//! Small dense complex linear-algebra helpers on top of `nalgebra`.
//!
//! Inner products follow one convention throughout the
//! crate: `<a, b> = sum_i a_i * conj(b_i)`, linear in the first argument.

use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// `<a, b>`, linear in `a` and anti-linear in `b`.
#[inline]
pub fn inner(a: &CVector, b: &CVector) -> C64 {
    b.dotc(a)
}

/// Euclidean norm.
#[inline]
pub fn norm(v: &CVector) -> f64 {
    libm::sqrt(norm_sq(v))
}

#[inline]
pub fn norm_sq(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest entry modulus, `0` for empty input.
pub fn max_abs<'a, I>(entries: I) -> f64
where
    I: IntoIterator<Item = &'a C64>,
{
    entries.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest entry modulus of `a - b`. Shapes must agree.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    debug_assert_eq!(a.shape(), b.shape());
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Largest entry modulus of `v - w`. Lengths must agree.
pub fn max_abs_diff_vec(v: &CVector, w: &CVector) -> f64 {
    debug_assert_eq!(v.len(), w.len());
    v.iter()
        .zip(w.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// `max |m - I|` entrywise. `m` must be square.
pub fn identity_residual(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let target = if i == j { ONE } else { ZERO };
            worst = worst.max((m[(i, j)] - target).norm());
        }
    }
    worst
}

/// Worst of `W W* - I` and `W* W - I`.
pub fn unitarity_residual(w: &CMatrix) -> f64 {
    if !w.is_square() {
        return f64::INFINITY;
    }
    let row_form = w * w.adjoint();
    let col_form = w.adjoint() * w;
    identity_residual(&row_form).max(identity_residual(&col_form))
}

/// `max |A - A*|`, or infinity if `A` is not square.
pub fn hermitian_residual(a: &CMatrix) -> f64 {
    if !a.is_square() {
        return f64::INFINITY;
    }
    max_abs_diff(a, &a.adjoint())
}

/// Singular values in no particular order. Empty matrices have none.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .collect()
}

/// Number of singular values at or above `threshold`.
pub fn numerical_rank(m: &CMatrix, threshold: f64) -> usize {
    singular_values(m)
        .into_iter()
        .filter(|&s| s >= threshold)
        .count()
}

/// Removes from `v` its components along the orthonormal vectors `basis`,
/// running classical Gram-Schmidt twice.
pub fn project_out(basis: &[CVector], v: &mut CVector) {
    for _ in 0..2 {
        for q in basis {
            let c = q.dotc(v);
            v.axpy(-c, q, ONE);
        }
    }
}

/// Orthonormalizes the columns of `m` in order with re-orthogonalized
/// Gram-Schmidt. Returns `None` as soon as a column falls below `threshold`
/// after projection.
pub fn orthonormalize_columns(m: &CMatrix, threshold: f64) -> Option<CMatrix> {
    let mut basis: Vec<CVector> = Vec::with_capacity(m.ncols());
    for j in 0..m.ncols() {
        let mut v: CVector = m.column(j).into_owned();
        project_out(&basis, &mut v);
        let n = norm(&v);
        if n < threshold {
            return None;
        }
        v.unscale_mut(n);
        basis.push(v);
    }
    Some(columns_to_matrix(m.nrows(), &basis))
}

/// Packs column vectors of length `rows` into a matrix.
pub fn columns_to_matrix(rows: usize, cols: &[CVector]) -> CMatrix {
    let mut out = CMatrix::zeros(rows, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// `<A v, v>`.
pub(crate) fn quadratic_form(a: &CMatrix, v: &CVector) -> C64 {
    inner(&(a * v), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn inner_is_linear_in_first_argument() {
        let a = CVector::from_vec(alloc::vec![c(1.0, 1.0), c(0.0, 2.0)]);
        let b = CVector::from_vec(alloc::vec![c(2.0, 0.0), c(1.0, -1.0)]);
        let i = c(0.0, 1.0);
        let lhs = inner(&(&a * i), &b);
        assert!((lhs - i * inner(&a, &b)).norm() < 1e-15);
        let rhs = inner(&a, &(&b * i));
        assert!((rhs + i * inner(&a, &b)).norm() < 1e-15);
        // sum a_i conj(b_i)
        let expected = c(1.0, 1.0) * c(2.0, 0.0) + c(0.0, 2.0) * c(1.0, 1.0);
        assert!((inner(&a, &b) - expected).norm() < 1e-15);
    }

    #[test]
    fn rank_of_empty_and_deficient_matrices() {
        assert_eq!(numerical_rank(&CMatrix::zeros(3, 0), 1e-8), 0);
        let mut m = CMatrix::zeros(3, 2);
        m[(0, 0)] = ONE;
        m[(0, 1)] = c(2.0, 0.0);
        assert_eq!(numerical_rank(&m, 1e-8), 1);
        m[(1, 1)] = c(1e-9, 0.0);
        assert_eq!(numerical_rank(&m, 1e-8), 1);
        m[(1, 1)] = c(1e-6, 0.0);
        assert_eq!(numerical_rank(&m, 1e-8), 2);
    }

    #[test]
    fn orthonormalize_rejects_dependent_columns() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 0)] = ONE;
        m[(0, 1)] = c(0.0, 3.0);
        assert!(orthonormalize_columns(&m, 1e-8).is_none());
        m[(1, 1)] = ONE;
        let q = orthonormalize_columns(&m, 1e-8).unwrap();
        assert!(unitarity_residual(&q) < 1e-15);
    }
}
