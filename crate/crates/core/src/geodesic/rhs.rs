//! Velocity recovery and the momentum right-hand sides.

use crate::cg::CgReport;
use crate::error::{Result, ShapeError};
use crate::geometry::{covariant_grad, InducedGeometry};
use crate::immersion::FieldAlongF;
use crate::linalg::dot3;
use crate::scalar::Real;
use crate::sobolev::{adjoint_terms, apply_p, solve_p, OperatorConfig};

/// Solves `P f_t = (b / vol density) ν`.
pub fn velocity_from_momentum<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    b: &[T],
    guess: Option<&FieldAlongF<T>>,
) -> Result<(FieldAlongF<T>, CgReport)> {
    let nu = geo.normal()?;
    let a: Vec<T> = b.iter().zip(&geo.vol_density).map(|(&b, &s)| b / s).collect();
    let rhs = FieldAlongF::scaled_vectors(&a, nu);
    solve_p(cfg, geo, &rhs, guess)
}

fn zero_on_boundary<T: Real>(geo: &InducedGeometry<T>, mut out: Vec<T>) -> Vec<T> {
    let dom = geo.domain();
    if !dom.is_periodic() {
        for (k, v) in out.iter_mut().enumerate() {
            if dom.is_boundary(k) {
                *v = T::zero();
            }
        }
    }
    out
}

/// `∂_t b` for `p = 1`:
/// `(A g^0_2(s, ḡ(∇f_t,∇f_t)) − ½ Tr L (|f_t|² + A Tr^g ḡ(∇f_t,∇f_t))) √det g`.
pub fn momentum_rhs_h1<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    f_t: &FieldAlongF<T>,
) -> Result<Vec<T>> {
    if cfg.p != 1 {
        return Err(ShapeError::InvalidOperator(format!(
            "H1 right-hand side needs p = 1, got {}",
            cfg.p
        )));
    }
    let s = geo.second_ff()?;
    let tr_l = geo.mean_curv()?;
    let grad = covariant_grad(geo, f_t)?;
    let forms = geo.gbar_forms(&grad, &grad);
    let curv = geo.g02(s, &forms);
    let grad_sq = geo.trace_g(&forms);
    let a = T::lit(cfg.a);
    let half = T::lit(0.5);
    let out = (0..geo.nodes())
        .map(|k| {
            let v2 = dot3(f_t.values[k], f_t.values[k]);
            (a * curv[k] - half * tr_l[k] * (v2 + a * grad_sq[k])) * geo.vol_density[k]
        })
        .collect();
    Ok(zero_on_boundary(geo, out))
}

/// `∂_t b` for general `p`:
/// `√det g [A Σ Tr(g⁻¹sg⁻¹ ḡ(∇Δ^{p-1-i}f_t, ∇Δ^i f_t))
///  + A/2 Σ ∇*ḡ(∇Δ^{p-1-i}f_t, Δ^i f_t) Tr L − ½ ḡ(P f_t, f_t) Tr L]`.
///
/// `pf_t` may supply `P f_t` when it is already known.
pub fn momentum_rhs_general<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    f_t: &FieldAlongF<T>,
    pf_t: Option<&FieldAlongF<T>>,
) -> Result<Vec<T>> {
    let tr_l = geo.mean_curv()?;
    let terms = adjoint_terms(cfg, geo, f_t, f_t)?;
    let owned;
    let pf = match pf_t {
        Some(p) => p,
        None => {
            owned = apply_p(cfg, geo, f_t);
            &owned
        }
    };
    let a = T::lit(cfg.a);
    let half = T::lit(0.5);
    let out = (0..geo.nodes())
        .map(|k| {
            let e = dot3(pf.values[k], f_t.values[k]);
            (a * terms.curvature_sum[k] + half * a * terms.divergence_sum[k] * tr_l[k]
                - half * e * tr_l[k])
                * geo.vol_density[k]
        })
        .collect();
    Ok(zero_on_boundary(geo, out))
}
