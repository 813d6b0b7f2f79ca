//! Induced metric, volume density, normal and second fundamental form of an
//! immersion, plus pointwise tensor contractions and integration.

use crate::domain::{diff1, diff2, Domain};
use crate::error::{Result, ShapeError};
use crate::immersion::{FieldAlongF, Immersion};
use crate::linalg::{
    cross3, det, dot3, inverse, mat_mul, norm3, scale3, trace, zero_mat, Mat2, Vec2, Vec3,
};
use crate::scalar::Real;

/// Ambient-valued one-form: the Jacobian columns `d_i h` at every node.
pub type Jacobian<T> = [Vec3<T>; 2];

/// Cached differential geometry of an immersion.
#[derive(Clone, Debug)]
pub struct InducedGeometry<T: Real> {
    domain: Domain,
    ambient: usize,
    /// Tangent vectors `d_u f`, `d_v f`.
    pub tf: Vec<Jacobian<T>>,
    pub g: Vec<Mat2<T>>,
    pub g_inv: Vec<Mat2<T>>,
    pub vol_density: Vec<T>,
    pub normal: Option<Vec<Vec3<T>>>,
    pub second_ff: Option<Vec<Mat2<T>>>,
    pub weingarten: Option<Vec<Mat2<T>>>,
    pub mean_curv: Option<Vec<T>>,
    /// `sqrt(det g) g^{-1}` per node: coefficient of the weak Laplacian.
    pub stiffness: Vec<Mat2<T>>,
    /// Quadrature weight times volume density.
    pub mass: Vec<T>,
}

/// Scale-aware degeneracy threshold `1e-12 * median(det g)`.
pub fn degeneracy_threshold<T: Real>(f: &Immersion<T>) -> T {
    let m = f.domain().dim();
    let tf = tangents(f);
    let mut dets: Vec<f64> = tf
        .iter()
        .map(|t| det(&metric_of(t, m), m).to_f64_lossy())
        .collect();
    dets.sort_by(|a, b| a.total_cmp(b));
    T::lit(1e-12 * dets[dets.len() / 2])
}

fn tangents<T: Real>(f: &Immersion<T>) -> Vec<Jacobian<T>> {
    jacobian(f.domain(), f.values())
}

/// Centered-difference Jacobian of a grid field (one-sided at Dirichlet edges).
pub fn jacobian<T: Real>(domain: &Domain, data: &[Vec3<T>]) -> Vec<Jacobian<T>> {
    let du = diff1(domain, data, 0);
    if domain.dim() == 1 {
        return du.into_iter().map(|a| [a, [T::zero(); 3]]).collect();
    }
    let dv = diff1(domain, data, 1);
    du.into_iter().zip(dv).map(|(a, b)| [a, b]).collect()
}

fn metric_of<T: Real>(t: &Jacobian<T>, m: usize) -> Mat2<T> {
    let mut g = zero_mat();
    for i in 0..m {
        for j in 0..m {
            g[i][j] = dot3(t[i], t[j]);
        }
    }
    g
}

/// Builds the geometry, failing only on non-positive or non-finite `det g`.
pub fn build_geometry<T: Real>(f: &Immersion<T>) -> Result<InducedGeometry<T>> {
    build_geometry_guarded(f, T::zero())
}

/// Builds the geometry, failing with `DegenerateMetric` when `det g < eps_deg`
/// at some node.
pub fn build_geometry_guarded<T: Real>(f: &Immersion<T>, eps_deg: T) -> Result<InducedGeometry<T>> {
    let domain = f.domain();
    let m = domain.dim();
    let nodes = f.nodes();
    let tf = tangents(f);
    let mut g = Vec::with_capacity(nodes);
    let mut g_inv = Vec::with_capacity(nodes);
    let mut vol_density = Vec::with_capacity(nodes);
    let mut stiffness = Vec::with_capacity(nodes);
    let mut mass = Vec::with_capacity(nodes);
    for (k, t) in tf.iter().enumerate() {
        let gk = metric_of(t, m);
        let d = det(&gk, m);
        if !(d.is_finite() && d > T::zero() && d >= eps_deg) {
            return Err(ShapeError::DegenerateMetric {
                node: k,
                det: d.to_f64_lossy(),
                threshold: eps_deg.to_f64_lossy(),
            });
        }
        let gi = inverse(&gk, m);
        let sq = d.sqrt();
        let mut st = zero_mat();
        for i in 0..m {
            for j in 0..m {
                st[i][j] = sq * gi[i][j];
            }
        }
        g.push(gk);
        g_inv.push(gi);
        vol_density.push(sq);
        stiffness.push(st);
        mass.push(T::lit(domain.quad_weight(k)) * sq);
    }

    let (normal, second_ff, weingarten, mean_curv) = if f.is_hypersurface() {
        let normal: Vec<Vec3<T>> = tf
            .iter()
            .map(|t| {
                let n = if m == 1 {
                    [t[0][1], -t[0][0], T::zero()]
                } else {
                    cross3(t[0], t[1])
                };
                scale3(T::one() / norm3(n), n)
            })
            .collect();
        let second = second_derivatives(domain, f.values());
        let mut s_all = Vec::with_capacity(nodes);
        let mut l_all = Vec::with_capacity(nodes);
        let mut h_all = Vec::with_capacity(nodes);
        for k in 0..nodes {
            let mut s = zero_mat();
            for i in 0..m {
                for j in 0..m {
                    s[i][j] = dot3(second[k][i][j], normal[k]);
                }
            }
            let l = mat_mul(&g_inv[k], &s, m);
            h_all.push(trace(&l, m));
            s_all.push(s);
            l_all.push(l);
        }
        (Some(normal), Some(s_all), Some(l_all), Some(h_all))
    } else {
        (None, None, None, None)
    };

    Ok(InducedGeometry {
        domain: domain.clone(),
        ambient: f.ambient_dim(),
        tf,
        g,
        g_inv,
        vol_density,
        normal,
        second_ff,
        weingarten,
        mean_curv,
        stiffness,
        mass,
    })
}

/// `d_i d_j f` at every node.
fn second_derivatives<T: Real>(domain: &Domain, f: &[Vec3<T>]) -> Vec<[[Vec3<T>; 2]; 2]> {
    let z = [T::zero(); 3];
    let fuu = diff2(domain, f, 0);
    if domain.dim() == 1 {
        return fuu.into_iter().map(|a| [[a, z], [z, z]]).collect();
    }
    let fvv = diff2(domain, f, 1);
    let fu = diff1(domain, f, 0);
    let fuv = diff1(domain, &fu, 1);
    (0..f.len())
        .map(|k| [[fuu[k], fuv[k]], [fuv[k], fvv[k]]])
        .collect()
}

impl<T: Real> InducedGeometry<T> {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn nodes(&self) -> usize {
        self.vol_density.len()
    }

    pub fn normal(&self) -> Result<&[Vec3<T>]> {
        self.normal.as_deref().ok_or(ShapeError::NotHypersurface)
    }

    pub fn second_ff(&self) -> Result<&[Mat2<T>]> {
        self.second_ff.as_deref().ok_or(ShapeError::NotHypersurface)
    }

    pub fn mean_curv(&self) -> Result<&[T]> {
        self.mean_curv.as_deref().ok_or(ShapeError::NotHypersurface)
    }

    pub fn min_det(&self) -> T {
        let m = self.dim();
        self.g
            .iter()
            .map(|g| det(g, m))
            .fold(T::infinity(), |a, b| a.min(b))
    }

    /// `int phi vol(g)` with trapezoid weights at Dirichlet edges.
    pub fn integrate(&self, phi: &[T]) -> T {
        phi.iter().zip(&self.mass).map(|(&a, &w)| a * w).sum()
    }

    /// `Vol(f)`.
    pub fn volume(&self) -> T {
        self.mass.iter().copied().sum()
    }

    /// `int ḡ(h, k) vol(g)`.
    pub fn inner(&self, h: &FieldAlongF<T>, k: &FieldAlongF<T>) -> T {
        h.values
            .iter()
            .zip(&k.values)
            .zip(&self.mass)
            .map(|((a, b), &w)| dot3(*a, *b) * w)
            .sum()
    }

    pub fn norm(&self, h: &FieldAlongF<T>) -> T {
        self.inner(h, h).sqrt()
    }

    /// Ambient vector `Tf . X`.
    #[inline]
    pub fn push_forward(&self, node: usize, x: Vec2<T>) -> Vec3<T> {
        let t = &self.tf[node];
        let mut out = scale3(x[0], t[0]);
        if self.dim() == 2 {
            out = crate::linalg::axpy3(out, x[1], t[1]);
        }
        out
    }

    /// Tangential part `h^⊤ = g^{-1} Tf^T h` as a vector field on `M`.
    #[inline]
    pub fn tangential_part(&self, node: usize, h: Vec3<T>) -> Vec2<T> {
        let m = self.dim();
        let t = &self.tf[node];
        let mut c = [T::zero(); 2];
        for i in 0..m {
            c[i] = dot3(t[i], h);
        }
        crate::linalg::mat_vec(&self.g_inv[node], c, m)
    }

    /// `ḡ(∇h, ∇k)` as a bilinear form on `TM` at every node.
    pub fn gbar_forms(&self, dh: &[Jacobian<T>], dk: &[Jacobian<T>]) -> Vec<Mat2<T>> {
        let m = self.dim();
        dh.iter()
            .zip(dk)
            .map(|(a, b)| {
                let mut out = zero_mat();
                for i in 0..m {
                    for j in 0..m {
                        out[i][j] = dot3(a[i], b[j]);
                    }
                }
                out
            })
            .collect()
    }

    /// `Tr^g B = Tr(g^{-1} B)`.
    pub fn trace_g(&self, b: &[Mat2<T>]) -> Vec<T> {
        let m = self.dim();
        b.iter()
            .zip(&self.g_inv)
            .map(|(b, gi)| trace(&mat_mul(gi, b, m), m))
            .collect()
    }

    /// `g^0_2(A, B) = Tr(g^{-1} A g^{-1} B)`.
    pub fn g02(&self, a: &[Mat2<T>], b: &[Mat2<T>]) -> Vec<T> {
        let m = self.dim();
        a.iter()
            .zip(b)
            .zip(&self.g_inv)
            .map(|((a, b), gi)| {
                let x = mat_mul(&mat_mul(gi, a, m), &mat_mul(gi, b, m), m);
                trace(&x, m)
            })
            .collect()
    }
}

/// Coordinate Jacobian `∇h` of a field along `f` (flat ambient connection).
pub fn covariant_grad<T: Real>(geo: &InducedGeometry<T>, h: &FieldAlongF<T>) -> Result<Vec<Jacobian<T>>> {
    if h.len() != geo.nodes() {
        return Err(ShapeError::ShapeMismatch {
            expected: geo.nodes(),
            actual: h.len(),
        });
    }
    Ok(jacobian(geo.domain(), &h.values))
}

/// Grid tensor fields with their valence, for the metric pairing `g^r_s ⊗ ḡ`.
#[derive(Clone, Copy, Debug)]
pub enum GridTensor<'a, T: Real> {
    /// Scalar function.
    Scalar(&'a [T]),
    /// Vector field on `M`, valence (1, 0).
    Vector(&'a [Vec2<T>]),
    /// One-form on `M`, valence (0, 1).
    Covector(&'a [Vec2<T>]),
    /// Bilinear form on `M`, valence (0, 2).
    Bilinear(&'a [Mat2<T>]),
    /// Ambient-valued one-form such as `∇h`.
    AmbientCovector(&'a [Jacobian<T>]),
}

impl<T: Real> GridTensor<'_, T> {
    fn name(&self) -> &'static str {
        match self {
            GridTensor::Scalar(_) => "scalar",
            GridTensor::Vector(_) => "vector",
            GridTensor::Covector(_) => "covector",
            GridTensor::Bilinear(_) => "bilinear form",
            GridTensor::AmbientCovector(_) => "ambient-valued covector",
        }
    }

    fn len(&self) -> usize {
        match self {
            GridTensor::Scalar(a) => a.len(),
            GridTensor::Vector(a) | GridTensor::Covector(a) => a.len(),
            GridTensor::Bilinear(a) => a.len(),
            GridTensor::AmbientCovector(a) => a.len(),
        }
    }
}

/// Pointwise pairing of two tensor fields of equal valence with the induced metric.
pub fn inner_products<T: Real>(
    geo: &InducedGeometry<T>,
    a: GridTensor<'_, T>,
    b: GridTensor<'_, T>,
) -> Result<Vec<T>> {
    for t in [&a, &b] {
        if t.len() != geo.nodes() {
            return Err(ShapeError::ShapeMismatch {
                expected: geo.nodes(),
                actual: t.len(),
            });
        }
    }
    let m = geo.dim();
    let pair = |x: &Vec2<T>, y: &Vec2<T>, metric: &Mat2<T>| {
        let mut s = T::zero();
        for i in 0..m {
            for j in 0..m {
                s = s + metric[i][j] * x[i] * y[j];
            }
        }
        s
    };
    Ok(match (a, b) {
        (GridTensor::Scalar(x), GridTensor::Scalar(y)) => {
            x.iter().zip(y).map(|(&p, &q)| p * q).collect()
        }
        (GridTensor::Vector(x), GridTensor::Vector(y)) => (0..geo.nodes())
            .map(|k| pair(&x[k], &y[k], &geo.g[k]))
            .collect(),
        (GridTensor::Covector(x), GridTensor::Covector(y)) => (0..geo.nodes())
            .map(|k| pair(&x[k], &y[k], &geo.g_inv[k]))
            .collect(),
        (GridTensor::Bilinear(x), GridTensor::Bilinear(y)) => geo.g02(x, y),
        (GridTensor::AmbientCovector(x), GridTensor::AmbientCovector(y)) => {
            geo.trace_g(&geo.gbar_forms(x, y))
        }
        (a, b) => {
            return Err(ShapeError::ValenceMismatch {
                left: a.name(),
                right: b.name(),
            })
        }
    })
}
