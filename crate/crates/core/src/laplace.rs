//! Weak-form Laplace–Beltrami operator.
//!
//! The stiffness form is a sum over grid cells of corner-wise one-sided
//! gradients weighted by `sqrt(det g) g^{-1}` at the corner. The assembled
//! matrix is symmetric by construction, and dividing by the lumped mass
//! gives `Δ = ∇*∇` acting componentwise. Dirichlet boundary values are
//! treated as zero and the result vanishes there.

use crate::geometry::InducedGeometry;
use crate::immersion::FieldAlongF;
use crate::linalg::Vec3;
use crate::scalar::Real;

/// Applies the stiffness matrix `L` (positive semidefinite) to a
/// `D`-component grid field.
pub fn stiffness_apply<T: Real, const D: usize>(geo: &InducedGeometry<T>, h: &[[T; D]]) -> Vec<[T; D]> {
    let dom = geo.domain();
    let nodes = dom.nodes();
    debug_assert_eq!(h.len(), nodes);
    let dirichlet = !dom.is_periodic();
    let val = |k: usize| -> [T; D] {
        if dirichlet && dom.is_boundary(k) {
            [T::zero(); D]
        } else {
            h[k]
        }
    };
    let mut out = vec![[T::zero(); D]; nodes];
    let du = T::lit(dom.spacing(0));
    if dom.dim() == 1 {
        let q = du / T::lit(2.0) / (du * du);
        for [a, b, _, _] in dom.cells() {
            let (ha, hb) = (val(a), val(b));
            let w = q * (geo.stiffness[a][0][0] + geo.stiffness[b][0][0]);
            for comp in 0..D {
                let flux = w * (hb[comp] - ha[comp]);
                out[a][comp] = out[a][comp] - flux;
                out[b][comp] = out[b][comp] + flux;
            }
        }
    } else {
        let dv = T::lit(dom.spacing(1));
        let q = du * dv / T::lit(4.0);
        for [c00, c10, c01, c11] in dom.cells() {
            // corner, u-neighbour, v-neighbour, signs
            let corners = [
                (c00, c10, c01, T::one(), T::one()),
                (c10, c00, c11, -T::one(), T::one()),
                (c01, c11, c00, T::one(), -T::one()),
                (c11, c01, c10, -T::one(), -T::one()),
            ];
            for (c, un, vn, su, sv) in corners {
                let k = geo.stiffness[c];
                let (hc, hu, hv) = (val(c), val(un), val(vn));
                for comp in 0..D {
                    let gu = su * (hu[comp] - hc[comp]) / du;
                    let gv = sv * (hv[comp] - hc[comp]) / dv;
                    let fu = q * su * (k[0][0] * gu + k[0][1] * gv) / du;
                    let fv = q * sv * (k[1][0] * gu + k[1][1] * gv) / dv;
                    out[c][comp] = out[c][comp] - fu - fv;
                    out[un][comp] = out[un][comp] + fu;
                    out[vn][comp] = out[vn][comp] + fv;
                }
            }
        }
    }
    if dirichlet {
        for (k, o) in out.iter_mut().enumerate() {
            if dom.is_boundary(k) {
                *o = [T::zero(); D];
            }
        }
    }
    out
}

/// `Δh = M^{-1} L h` for a `D`-component grid field.
pub fn laplacian_raw<T: Real, const D: usize>(geo: &InducedGeometry<T>, h: &[[T; D]]) -> Vec<[T; D]> {
    let mut out = stiffness_apply(geo, h);
    for (o, &m) in out.iter_mut().zip(&geo.mass) {
        for x in o.iter_mut() {
            *x = *x / m;
        }
    }
    out
}

/// Bochner Laplacian of a field along `f` in flat ambient space.
pub fn laplacian<T: Real>(geo: &InducedGeometry<T>, h: &FieldAlongF<T>) -> FieldAlongF<T> {
    FieldAlongF::from_values(laplacian_raw::<T, 3>(geo, &h.values))
}

/// Laplace–Beltrami operator on a scalar field.
pub fn laplacian_scalar<T: Real>(geo: &InducedGeometry<T>, phi: &[T]) -> Vec<T> {
    let wrapped: Vec<[T; 1]> = phi.iter().map(|&x| [x]).collect();
    laplacian_raw(geo, &wrapped).into_iter().map(|[x]| x).collect()
}

/// `Δ^k h`.
pub fn laplacian_power<T: Real>(geo: &InducedGeometry<T>, h: &FieldAlongF<T>, k: u32) -> FieldAlongF<T> {
    let mut out = h.clone();
    for _ in 0..k {
        out = laplacian(geo, &out);
    }
    out
}

/// Helper for callers that need the raw vector type.
pub fn laplacian_vec<T: Real>(geo: &InducedGeometry<T>, h: &[Vec3<T>]) -> Vec<Vec3<T>> {
    laplacian_raw::<T, 3>(geo, h)
}
