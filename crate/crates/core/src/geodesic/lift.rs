//! Horizontal lift of a path of immersions on a periodic domain.
//!
//! Given frames `f_k` at spacing `dt`, the reparametrization `φ` solves
//! `∂_t φ = ξ∘φ` with `ξ = −hVer(∂_t f)`, and the lifted path is `f_k∘φ_k`.

use crate::domain::Domain;
use crate::error::{Result, ShapeError};
use crate::geometry::build_geometry;
use crate::immersion::{FieldAlongF, Immersion};
use crate::linalg::Vec2;
use crate::scalar::Real;
use crate::sobolev::{solve_tangential, OperatorConfig};

/// Bilinear periodic interpolation of a grid field at parameter point `x`.
pub fn interpolate<T: Real, const D: usize>(domain: &Domain, data: &[[T; D]], x: [f64; 2]) -> [T; D] {
    let dim = domain.dim();
    let mut base = [0usize; 2];
    let mut frac = [0.0f64; 2];
    for a in 0..dim {
        let n = domain.count(a);
        let s = x[a] / domain.spacing(a);
        let fl = s.floor();
        frac[a] = s - fl;
        base[a] = (fl as i64).rem_euclid(n as i64) as usize;
    }
    let mut out = [T::zero(); D];
    let corners: &[(usize, usize)] = if dim == 1 { &[(0, 0), (1, 0)] } else { &[(0, 0), (1, 0), (0, 1), (1, 1)] };
    for &(di, dj) in corners {
        let i = (base[0] + di) % domain.count(0);
        let j = if dim == 2 { (base[1] + dj) % domain.count(1) } else { 0 };
        let wu = if di == 0 { 1.0 - frac[0] } else { frac[0] };
        let wv = if dim == 1 { 1.0 } else if dj == 0 { 1.0 - frac[1] } else { frac[1] };
        let w = T::lit(wu * wv);
        let v = data[domain.index(i, j)];
        for c in 0..D {
            out[c] = out[c] + w * v[c];
        }
    }
    out
}

/// Resamples `f` at the points `phi` (parameter coordinates per node).
///
/// Ambient values on a periodic domain may wrap with a translation (e.g. a
/// closed curve is periodic, so no correction is needed); only periodic
/// maps `M → R^n` are supported.
pub fn compose<T: Real>(f: &Immersion<T>, phi: &[[f64; 2]]) -> Result<Immersion<T>> {
    let values = phi.iter().map(|&x| interpolate(f.domain(), f.values(), x)).collect();
    Immersion::new(f.domain().clone(), f.ambient_dim(), values)
}

/// Result of a horizontal lift.
#[derive(Clone, Debug)]
pub struct Lift<T: Real> {
    pub frames: Vec<Immersion<T>>,
    /// Reparametrization `φ_k` as parameter coordinates per node.
    pub phi: Vec<Vec<[f64; 2]>>,
    /// `ξ_k` on the original grid.
    pub xi: Vec<Vec<Vec2<T>>>,
}

/// Horizontal lift of equally spaced frames by explicit Euler in time and
/// bilinear interpolation in space.
pub fn horizontal_lift<T: Real>(cfg: &OperatorConfig, frames: &[Immersion<T>], dt: f64) -> Result<Lift<T>> {
    let first = frames
        .first()
        .ok_or_else(|| ShapeError::InvalidImmersion("empty frame path".into()))?;
    let domain = first.domain().clone();
    if !domain.is_periodic() {
        return Err(ShapeError::InvalidDomain(
            "horizontal lift needs a periodic domain".into(),
        ));
    }
    if !(dt > 0.0) {
        return Err(ShapeError::InvalidOperator(format!("dt = {dt} must be positive")));
    }
    let dim = domain.dim();
    let mut phi: Vec<[f64; 2]> = (0..domain.nodes()).map(|k| domain.param(k)).collect();
    let mut out_frames = vec![first.clone()];
    let mut out_phi = vec![phi.clone()];
    let mut out_xi = Vec::new();
    let inv_dt = T::lit(1.0 / dt);
    let mut guess = None;
    for w in frames.windows(2) {
        let (f0, f1) = (&w[0], &w[1]);
        if f1.domain() != &domain {
            return Err(ShapeError::InvalidDomain("frames on different domains".into()));
        }
        let geo = build_geometry(f0)?;
        let df = FieldAlongF::from_values(
            f0.values()
                .iter()
                .zip(f1.values())
                .map(|(a, b)| crate::linalg::scale3(inv_dt, crate::linalg::sub3(*b, *a)))
                .collect(),
        );
        let (ver, _) = solve_tangential(cfg, &geo, &df, guess.as_ref())?;
        let xi: Vec<Vec2<T>> = ver.values.iter().map(|v| [-v[0], -v[1]]).collect();
        for p in phi.iter_mut() {
            let v = interpolate(&domain, &xi, *p);
            for a in 0..dim {
                p[a] += dt * v[a].to_f64_lossy();
            }
        }
        out_frames.push(compose(f1, &phi)?);
        out_phi.push(phi.clone());
        out_xi.push(xi);
        guess = Some(ver);
    }
    Ok(Lift {
        frames: out_frames,
        phi: out_phi,
        xi: out_xi,
    })
}

/// Discrete `‖(P ∂_t f)^⊤‖` along a path, using forward differences.
pub fn reparam_norms<T: Real>(cfg: &OperatorConfig, frames: &[Immersion<T>], dt: f64) -> Result<Vec<f64>> {
    let inv_dt = T::lit(1.0 / dt);
    frames
        .windows(2)
        .map(|w| {
            let geo = build_geometry(&w[0])?;
            let df = FieldAlongF::from_values(
                w[0].values()
                    .iter()
                    .zip(w[1].values())
                    .map(|(a, b)| crate::linalg::scale3(inv_dt, crate::linalg::sub3(*b, *a)))
                    .collect(),
            );
            let pdf = crate::sobolev::apply_p(cfg, &geo, &df);
            Ok(super::diagnostics::momenta(&w[0], &geo, &pdf).reparam_mom_norm)
        })
        .collect()
}
