//! Small dense-vector helpers over slices.

use crate::Scalar;

#[inline]
pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y)
}

#[inline]
pub fn norm_sq<T: Scalar>(a: &[T]) -> T {
    dot(a, a)
}

#[inline]
pub fn norm<T: Scalar>(a: &[T]) -> T {
    norm_sq(a).sqrt()
}

pub fn norm_l1<T: Scalar>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |acc, &x| acc + x.abs())
}

pub fn dist<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (&x, &y)| acc + (x - y) * (x - y))
        .sqrt()
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x - y).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + y).collect()
}

/// `a + s * b`
pub fn add_scaled<T: Scalar>(a: &[T], s: T, b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(&x, &y)| x + s * y).collect()
}

pub fn scale<T: Scalar>(s: T, a: &[T]) -> Vec<T> {
    a.iter().map(|&x| s * x).collect()
}

/// Dense row-major matrix-vector product; `mat` has `rows * x.len()` entries.
pub fn mat_vec<T: Scalar>(mat: &[T], rows: usize, x: &[T]) -> Vec<T> {
    let cols = x.len();
    debug_assert_eq!(mat.len(), rows * cols);
    (0..rows).map(|i| dot(&mat[i * cols..(i + 1) * cols], x)).collect()
}

/// Transposed product `matᵀ y` for a row-major `rows x cols` matrix.
pub fn mat_t_vec<T: Scalar>(mat: &[T], cols: usize, y: &[T]) -> Vec<T> {
    let rows = y.len();
    debug_assert_eq!(mat.len(), rows * cols);
    let mut out = vec![T::zero(); cols];
    for (i, &yi) in y.iter().enumerate() {
        for (o, &a) in out.iter_mut().zip(&mat[i * cols..(i + 1) * cols]) {
            *o = *o + a * yi;
        }
    }
    out
}

pub fn frobenius_sq<T: Scalar>(mat: &[T]) -> T {
    norm_sq(mat)
}

pub fn is_finite<T: Scalar>(a: &[T]) -> bool {
    a.iter().all(|x| x.is_finite())
}
