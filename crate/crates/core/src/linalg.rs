//! Small fixed-size vector and matrix helpers.
//!
//! Ambient vectors are always stored with three components; planar curves
//! keep the third component at zero. Tensors on the parameter manifold are
//! stored as 2x2 arrays and only the leading `m x m` block is meaningful.

use crate::scalar::Real;

pub type Vec3<T> = [T; 3];
pub type Vec2<T> = [T; 2];
pub type Mat2<T> = [[T; 2]; 2];

#[inline]
pub fn zero3<T: Real>() -> Vec3<T> {
    [T::zero(); 3]
}

#[inline]
pub fn add3<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

#[inline]
pub fn sub3<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub fn scale3<T: Real>(s: T, a: Vec3<T>) -> Vec3<T> {
    [s * a[0], s * a[1], s * a[2]]
}

/// `a + s * b`
#[inline]
pub fn axpy3<T: Real>(a: Vec3<T>, s: T, b: Vec3<T>) -> Vec3<T> {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

#[inline]
pub fn dot3<T: Real>(a: Vec3<T>, b: Vec3<T>) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn cross3<T: Real>(a: Vec3<T>, b: Vec3<T>) -> Vec3<T> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

#[inline]
pub fn norm3<T: Real>(a: Vec3<T>) -> T {
    dot3(a, a).sqrt()
}

#[inline]
pub fn zero_mat<T: Real>() -> Mat2<T> {
    [[T::zero(); 2]; 2]
}

#[inline]
pub fn identity_mat<T: Real>(m: usize) -> Mat2<T> {
    let mut a = zero_mat();
    for (i, row) in a.iter_mut().enumerate().take(m) {
        row[i] = T::one();
    }
    a
}

#[inline]
pub fn det<T: Real>(a: &Mat2<T>, m: usize) -> T {
    if m == 1 {
        a[0][0]
    } else {
        a[0][0] * a[1][1] - a[0][1] * a[1][0]
    }
}

/// Inverse of the leading `m x m` block; the caller guarantees `det != 0`.
#[inline]
pub fn inverse<T: Real>(a: &Mat2<T>, m: usize) -> Mat2<T> {
    let d = det(a, m);
    if m == 1 {
        [[T::one() / d, T::zero()], [T::zero(), T::zero()]]
    } else {
        [[a[1][1] / d, -a[0][1] / d], [-a[1][0] / d, a[0][0] / d]]
    }
}

#[inline]
pub fn mat_mul<T: Real>(a: &Mat2<T>, b: &Mat2<T>, m: usize) -> Mat2<T> {
    let mut c = zero_mat();
    for i in 0..m {
        for j in 0..m {
            let mut s = T::zero();
            for k in 0..m {
                s = s + a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    c
}

#[inline]
pub fn mat_vec<T: Real>(a: &Mat2<T>, x: Vec2<T>, m: usize) -> Vec2<T> {
    let mut y = [T::zero(); 2];
    for i in 0..m {
        for j in 0..m {
            y[i] = y[i] + a[i][j] * x[j];
        }
    }
    y
}

#[inline]
pub fn trace<T: Real>(a: &Mat2<T>, m: usize) -> T {
    (0..m).map(|i| a[i][i]).sum()
}

/// Full contraction `sum_ij a_ij b_ij` of the leading blocks.
#[inline]
pub fn frobenius<T: Real>(a: &Mat2<T>, b: &Mat2<T>, m: usize) -> T {
    let mut s = T::zero();
    for i in 0..m {
        for j in 0..m {
            s = s + a[i][j] * b[i][j];
        }
    }
    s
}
