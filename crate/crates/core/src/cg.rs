//! Preconditioned conjugate gradients on `D`-component grid fields.

use crate::error::{Result, ShapeError};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgReport {
    pub iterations: usize,
    /// Final value of the caller-supplied residual measure.
    pub residual: f64,
}

fn dot<T: Real, const D: usize>(a: &[[T; D]], b: &[[T; D]]) -> T {
    a.iter()
        .zip(b)
        .map(|(x, y)| (0..D).map(|c| x[c] * y[c]).sum::<T>())
        .sum()
}

fn axpy<T: Real, const D: usize>(y: &mut [[T; D]], s: T, x: &[[T; D]]) {
    for (a, b) in y.iter_mut().zip(x) {
        for c in 0..D {
            a[c] = a[c] + s * b[c];
        }
    }
}

/// Solves `A x = b` for symmetric positive definite `A` given matrix-free.
///
/// `x` holds the initial guess on entry. Iteration stops when
/// `res_norm(r) <= tol`, where `r = b - A x`.
pub fn pcg<T: Real, const D: usize>(
    apply: impl Fn(&[[T; D]]) -> Vec<[T; D]>,
    precond: impl Fn(&[[T; D]]) -> Vec<[T; D]>,
    res_norm: impl Fn(&[[T; D]]) -> T,
    b: &[[T; D]],
    x: &mut [[T; D]],
    tol: T,
    max_iter: usize,
) -> Result<CgReport> {
    let ax = apply(x);
    let mut r: Vec<[T; D]> = b
        .iter()
        .zip(&ax)
        .map(|(bi, ai)| std::array::from_fn(|c| bi[c] - ai[c]))
        .collect();
    let mut rn = res_norm(&r);
    if rn <= tol {
        return Ok(CgReport {
            iterations: 0,
            residual: rn.to_f64_lossy(),
        });
    }
    let mut z = precond(&r);
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > T::zero()) {
            return Err(ShapeError::NoConvergence {
                iterations: it,
                residual: rn.to_f64_lossy(),
            });
        }
        let alpha = rz / pap;
        axpy(x, alpha, &p);
        axpy(&mut r, -alpha, &ap);
        rn = res_norm(&r);
        if !rn.is_finite() {
            break;
        }
        if rn <= tol {
            return Ok(CgReport {
                iterations: it,
                residual: rn.to_f64_lossy(),
            });
        }
        z = precond(&r);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for (pi, zi) in p.iter_mut().zip(&z) {
            for c in 0..D {
                pi[c] = zi[c] + beta * pi[c];
            }
        }
    }
    Err(ShapeError::NoConvergence {
        iterations: max_iter,
        residual: rn.to_f64_lossy(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_tridiagonal() {
        let n = 50;
        let apply = |x: &[[f64; 1]]| -> Vec<[f64; 1]> {
            (0..n)
                .map(|i| {
                    let l = if i > 0 { x[i - 1][0] } else { 0.0 };
                    let r = if i + 1 < n { x[i + 1][0] } else { 0.0 };
                    [3.0 * x[i][0] - l - r]
                })
                .collect()
        };
        let b: Vec<[f64; 1]> = (0..n).map(|i| [(i as f64).sin()]).collect();
        let mut x = vec![[0.0]; n];
        let norm = |r: &[[f64; 1]]| r.iter().map(|v| v[0] * v[0]).sum::<f64>().sqrt();
        let rep = pcg(apply, |r| r.to_vec(), norm, &b, &mut x, 1e-12, 200).unwrap();
        assert!(rep.iterations <= n);
        let ax = apply(&x);
        for i in 0..n {
            assert!((ax[i][0] - b[i][0]).abs() < 1e-11);
        }
    }

    #[test]
    fn reports_cap() {
        let apply = |x: &[[f64; 1]]| x.iter().enumerate().map(|(i, v)| [(1.0 + i as f64) * v[0]]).collect();
        let b = vec![[1.0]; 20];
        let mut x = vec![[0.0]; 20];
        let norm = |r: &[[f64; 1]]| r.iter().map(|v| v[0].abs()).sum::<f64>();
        let err = pcg(apply, |r| r.to_vec(), norm, &b, &mut x, 1e-14, 3).unwrap_err();
        assert!(matches!(err, ShapeError::NoConvergence { iterations: 3, .. }));
    }
}
