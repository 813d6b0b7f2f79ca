//! The operator `P = 1 + A Δ^p`, its inverse, the horizontal/vertical
//! splitting and the adjoint of `∇P` in flat ambient space.

use serde::{Deserialize, Serialize};

use crate::cg::{pcg, CgReport};
use crate::error::{Result, ShapeError};
use crate::geometry::{jacobian, InducedGeometry, Jacobian};
use crate::immersion::{FieldAlongF, TangentField};
use crate::laplace::{laplacian, laplacian_raw, stiffness_apply};
use crate::linalg::{dot3, mat_vec, Mat2, Vec2, Vec3};
use crate::scalar::Real;
use crate::spectral::SpectralInverse;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorConfig {
    /// Metric weight `A >= 0`.
    #[serde(rename = "A", alias = "a")]
    pub a: f64,
    /// Sobolev order `p >= 1`.
    pub p: u32,
    #[serde(default = "default_tol", rename = "cgTol", alias = "cg_tol")]
    pub cg_tol: f64,
    #[serde(default = "default_max_iter", rename = "cgMaxIter", alias = "cg_max_iter")]
    pub cg_max_iter: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    2000
}

impl OperatorConfig {
    pub fn new(a: f64, p: u32) -> Self {
        OperatorConfig {
            a,
            p,
            cg_tol: default_tol(),
            cg_max_iter: default_max_iter(),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.cg_tol = tol;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(ShapeError::InvalidOperator(format!("A = {} must be >= 0", self.a)));
        }
        if self.p < 1 {
            return Err(ShapeError::InvalidOperator("p must be >= 1".into()));
        }
        if !(self.cg_tol > 0.0 && self.cg_tol <= 1e-4) {
            return Err(ShapeError::InvalidOperator(format!(
                "cgTol = {} outside (0, 1e-4]",
                self.cg_tol
            )));
        }
        if self.cg_max_iter == 0 {
            return Err(ShapeError::InvalidOperator("cgMaxIter must be positive".into()));
        }
        Ok(())
    }
}

fn zero_boundary_raw<T: Real, const D: usize>(geo: &InducedGeometry<T>, x: &mut [[T; D]]) {
    let dom = geo.domain();
    if !dom.is_periodic() {
        for (k, v) in x.iter_mut().enumerate() {
            if dom.is_boundary(k) {
                *v = [T::zero(); D];
            }
        }
    }
}

/// `Ph = h + A Δ^p h`.
pub fn apply_p<T: Real>(cfg: &OperatorConfig, geo: &InducedGeometry<T>, h: &FieldAlongF<T>) -> FieldAlongF<T> {
    FieldAlongF::from_values(apply_p_raw(cfg, geo, &h.values))
}

fn apply_p_raw<T: Real, const D: usize>(cfg: &OperatorConfig, geo: &InducedGeometry<T>, h: &[[T; D]]) -> Vec<[T; D]> {
    let mut out = h.to_vec();
    zero_boundary_raw(geo, &mut out);
    if cfg.a == 0.0 {
        return out;
    }
    let mut d = laplacian_raw(geo, h);
    for _ in 1..cfg.p {
        d = laplacian_raw(geo, &d);
    }
    let a = T::lit(cfg.a);
    for (o, x) in out.iter_mut().zip(&d) {
        for c in 0..D {
            o[c] = o[c] + a * x[c];
        }
    }
    out
}

/// Mass-weighted form `K_P x = M P x`, symmetric in the Euclidean product.
fn apply_kp<T: Real, const D: usize>(cfg: &OperatorConfig, geo: &InducedGeometry<T>, x: &[[T; D]]) -> Vec<[T; D]> {
    if cfg.a == 0.0 || cfg.p == 1 {
        let mut out = if cfg.a == 0.0 {
            vec![[T::zero(); D]; x.len()]
        } else {
            stiffness_apply(geo, x)
        };
        let a = T::lit(cfg.a);
        for ((o, v), &m) in out.iter_mut().zip(x).zip(&geo.mass) {
            for c in 0..D {
                o[c] = m * v[c] + a * o[c];
            }
        }
        zero_boundary_raw(geo, &mut out);
        return out;
    }
    let mut out = apply_p_raw(cfg, geo, x);
    for (o, &m) in out.iter_mut().zip(&geo.mass) {
        for v in o.iter_mut() {
            *v = *v * m;
        }
    }
    out
}

/// Spectral preconditioner fitted to the mean metric of `geo`.
pub fn preconditioner<T: Real>(cfg: &OperatorConfig, geo: &InducedGeometry<T>) -> SpectralInverse {
    let dom = geo.domain();
    let mut count = 0.0;
    let mut mbar = 0.0;
    let mut kbar = [0.0; 2];
    for k in dom.free_nodes() {
        count += 1.0;
        mbar += geo.vol_density[k].to_f64_lossy();
        for (a, kb) in kbar.iter_mut().enumerate().take(dom.dim()) {
            *kb += geo.stiffness[k][a][a].to_f64_lossy();
        }
    }
    SpectralInverse::sobolev(dom, mbar / count, [kbar[0] / count, kbar[1] / count], cfg.a, cfg.p)
}

fn vol_norm<T: Real, const D: usize>(geo: &InducedGeometry<T>, x: &[[T; D]]) -> T {
    x.iter()
        .zip(&geo.mass)
        .map(|(v, &m)| m * (0..D).map(|c| v[c] * v[c]).sum::<T>())
        .sum::<T>()
        .sqrt()
}

/// Solves `P h = rhs` by preconditioned CG.
///
/// Convergence is declared when `‖rhs − P h‖_vol <= cgTol ‖rhs‖_vol`.
/// `guess` warm-starts the iteration.
pub fn solve_p<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    rhs: &FieldAlongF<T>,
    guess: Option<&FieldAlongF<T>>,
) -> Result<(FieldAlongF<T>, CgReport)> {
    let mut rhs_v = rhs.values.clone();
    zero_boundary_raw(geo, &mut rhs_v);
    if cfg.a == 0.0 {
        return Ok((
            FieldAlongF::from_values(rhs_v),
            CgReport {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let pre = preconditioner(cfg, geo);
    let b: Vec<Vec3<T>> = rhs_v
        .iter()
        .zip(&geo.mass)
        .map(|(v, &m)| crate::linalg::scale3(m, *v))
        .collect();
    let scale = vol_norm(geo, &rhs_v);
    let mut x = match guess {
        Some(g) => g.values.clone(),
        None => pre.apply(&b),
    };
    zero_boundary_raw(geo, &mut x);
    if scale == T::zero() {
        return Ok((
            FieldAlongF::zeros(rhs.len()),
            CgReport {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let res_norm = |r: &[Vec3<T>]| {
        r.iter()
            .zip(&geo.mass)
            .map(|(v, &m)| if m > T::zero() { dot3(*v, *v) / m } else { T::zero() })
            .sum::<T>()
            .sqrt()
    };
    let tol = T::lit(cfg.cg_tol) * scale;
    let report = pcg(
        |v| apply_kp(cfg, geo, v),
        |r| pre.apply(r),
        res_norm,
        &b,
        &mut x,
        tol,
        cfg.cg_max_iter,
    )?;
    Ok((
        FieldAlongF::from_values(x),
        CgReport {
            iterations: report.iterations,
            residual: report.residual / scale.to_f64_lossy(),
        },
    ))
}

fn push<T: Real>(geo: &InducedGeometry<T>, x: &[Vec2<T>]) -> Vec<Vec3<T>> {
    x.iter().enumerate().map(|(k, v)| geo.push_forward(k, *v)).collect()
}

fn pull<T: Real>(geo: &InducedGeometry<T>, h: &[Vec3<T>]) -> Vec<Vec2<T>> {
    let m = geo.dim();
    h.iter()
        .zip(&geo.tf)
        .map(|(v, t)| {
            let mut out = [T::zero(); 2];
            for i in 0..m {
                out[i] = dot3(t[i], *v);
            }
            out
        })
        .collect()
}

/// `X -> Tf^T K_P (Tf X)`: the tangential operator in symmetric form.
pub fn apply_tangential<T: Real>(cfg: &OperatorConfig, geo: &InducedGeometry<T>, x: &TangentField<T>) -> TangentField<T> {
    let mut xv = x.values.clone();
    zero_boundary_raw(geo, &mut xv);
    let mut out = pull(geo, &apply_kp(cfg, geo, &push(geo, &xv)));
    zero_boundary_raw(geo, &mut out);
    TangentField { values: out }
}

/// `(P h)^⊤` as a vector field on `M`.
pub fn tangential_part<T: Real>(geo: &InducedGeometry<T>, h: &FieldAlongF<T>) -> TangentField<T> {
    TangentField {
        values: h
            .values
            .iter()
            .enumerate()
            .map(|(k, v)| geo.tangential_part(k, *v))
            .collect(),
    }
}

/// Splits `h = Tf.hVer + hHor` with `(P hHor)^⊤ = 0`.
pub fn split_horizontal_vertical<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    h: &FieldAlongF<T>,
) -> Result<(TangentField<T>, FieldAlongF<T>)> {
    let x = solve_tangential(cfg, geo, h, None)?.0;
    let tx = push(geo, &x.values);
    let hor = FieldAlongF::from_values(
        h.values
            .iter()
            .zip(&tx)
            .map(|(a, b)| crate::linalg::sub3(*a, *b))
            .collect(),
    );
    Ok((x, hor))
}

/// Solves `P^⊤ X = (P h)^⊤` for the vertical part of `h`.
pub fn solve_tangential<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    h: &FieldAlongF<T>,
    guess: Option<&TangentField<T>>,
) -> Result<(TangentField<T>, CgReport)> {
    let m = geo.dim();
    let mut hv = h.values.clone();
    zero_boundary_raw(geo, &mut hv);
    let mut b = pull(geo, &apply_kp(cfg, geo, &hv));
    zero_boundary_raw(geo, &mut b);
    let dom = geo.domain();
    let pre = preconditioner(cfg, geo);
    let mut gbar: Mat2<f64> = [[0.0; 2]; 2];
    let mut count = 0.0;
    for k in dom.free_nodes() {
        count += 1.0;
        for i in 0..m {
            for j in 0..m {
                gbar[i][j] += geo.g[k][i][j].to_f64_lossy();
            }
        }
    }
    for row in gbar.iter_mut() {
        for v in row.iter_mut() {
            *v /= count;
        }
    }
    let gbar_inv = crate::linalg::inverse(&gbar, m);
    let precond = |r: &[Vec2<T>]| -> Vec<Vec2<T>> {
        let y = pre.apply(r);
        y.iter()
            .map(|v| {
                let vf = [v[0].to_f64_lossy(), v[1].to_f64_lossy()];
                mat_vec(&gbar_inv, vf, m).map(T::lit)
            })
            .collect()
    };
    let bnorm = b
        .iter()
        .map(|v| v[0] * v[0] + v[1] * v[1])
        .sum::<T>()
        .sqrt();
    if bnorm == T::zero() {
        return Ok((
            TangentField::zeros(h.len()),
            CgReport {
                iterations: 0,
                residual: 0.0,
            },
        ));
    }
    let mut x = match guess {
        Some(g) => g.values.clone(),
        None => precond(&b),
    };
    zero_boundary_raw(geo, &mut x);
    let norm = |r: &[Vec2<T>]| r.iter().map(|v| v[0] * v[0] + v[1] * v[1]).sum::<T>().sqrt();
    let rep = pcg(
        |v| apply_tangential(cfg, geo, &TangentField { values: v.to_vec() }).values,
        precond,
        norm,
        &b,
        &mut x,
        T::lit(cfg.cg_tol) * bnorm,
        cfg.cg_max_iter,
    )?;
    Ok((
        TangentField { values: x },
        CgReport {
            iterations: rep.iterations,
            residual: rep.residual / bnorm.to_f64_lossy(),
        },
    ))
}

/// `Δ^i h` for `i = 0..=p`.
pub(crate) fn laplacian_tower<T: Real>(geo: &InducedGeometry<T>, h: &FieldAlongF<T>, p: u32) -> Vec<FieldAlongF<T>> {
    let mut out = Vec::with_capacity(p as usize + 1);
    let mut cur = h.clone();
    cur.zero_boundary(geo.domain());
    out.push(cur);
    for i in 0..p as usize {
        let next = laplacian(geo, &out[i]);
        out.push(next);
    }
    out
}

/// Pieces of the normal part of `adj(∇P)(h, k)` that the geodesic
/// right-hand side reuses.
pub(crate) struct AdjointTerms<T: Real> {
    /// `Σ_i Tr(g^{-1} s g^{-1} ḡ(∇Δ^{p-1-i}h, ∇Δ^i k))`
    pub curvature_sum: Vec<T>,
    /// `Σ_i ∇*ḡ(∇Δ^{p-1-i}h, Δ^i k)`
    pub divergence_sum: Vec<T>,
}

/// `∇*ḡ(∇u, w) = ḡ(Δu, w) − Tr^g ḡ(∇u, ∇w)`.
fn adjoint_divergence<T: Real>(
    geo: &InducedGeometry<T>,
    lap_u: &FieldAlongF<T>,
    du: &[Jacobian<T>],
    w: &FieldAlongF<T>,
    dw: &[Jacobian<T>],
) -> Vec<T> {
    let tr = geo.trace_g(&geo.gbar_forms(du, dw));
    lap_u
        .values
        .iter()
        .zip(&w.values)
        .zip(tr)
        .map(|((a, b), t)| dot3(*a, *b) - t)
        .collect()
}

pub(crate) fn adjoint_terms<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    h: &FieldAlongF<T>,
    k: &FieldAlongF<T>,
) -> Result<AdjointTerms<T>> {
    let s = geo.second_ff()?;
    let p = cfg.p;
    let th = laplacian_tower(geo, h, p);
    let tk = if std::ptr::eq(h, k) {
        th.clone()
    } else {
        laplacian_tower(geo, k, p)
    };
    let dom = geo.domain();
    let dh: Vec<Vec<Jacobian<T>>> = th[..p as usize].iter().map(|x| jacobian(dom, &x.values)).collect();
    let dk: Vec<Vec<Jacobian<T>>> = tk[..p as usize].iter().map(|x| jacobian(dom, &x.values)).collect();
    let n = geo.nodes();
    let mut curvature_sum = vec![T::zero(); n];
    let mut divergence_sum = vec![T::zero(); n];
    for i in 0..p as usize {
        let j = p as usize - 1 - i;
        let forms = geo.gbar_forms(&dh[j], &dk[i]);
        for (acc, v) in curvature_sum.iter_mut().zip(geo.g02(s, &forms)) {
            *acc = *acc + v;
        }
        let div = adjoint_divergence(geo, &th[j + 1], &dh[j], &tk[i], &dk[i]);
        for (acc, v) in divergence_sum.iter_mut().zip(div) {
            *acc = *acc + v;
        }
    }
    if !dom.is_periodic() {
        for idx in 0..n {
            if dom.is_boundary(idx) {
                curvature_sum[idx] = T::zero();
                divergence_sum[idx] = T::zero();
            }
        }
    }
    Ok(AdjointTerms {
        curvature_sum,
        divergence_sum,
    })
}

/// Scalar coefficient `α` of the normal part `adj(∇P)(h, k)^⊥ = α ν`.
pub fn adjoint_normal_coefficient<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    h: &FieldAlongF<T>,
    k: &FieldAlongF<T>,
) -> Result<Vec<T>> {
    let terms = adjoint_terms(cfg, geo, h, k)?;
    let tr_l = geo.mean_curv()?;
    let a = T::lit(cfg.a);
    let two = T::lit(2.0);
    Ok((0..geo.nodes())
        .map(|i| two * a * terms.curvature_sum[i] + a * terms.divergence_sum[i] * tr_l[i])
        .collect())
}

/// Normal part of `adj(∇P)(h, k)` for flat ambient space.
pub fn adjoint_nabla_p_perp<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    h: &FieldAlongF<T>,
    k: &FieldAlongF<T>,
) -> Result<FieldAlongF<T>> {
    let alpha = adjoint_normal_coefficient(cfg, geo, h, k)?;
    Ok(FieldAlongF::scaled_vectors(&alpha, geo.normal()?))
}

/// Tangential part `g^{-1}(ḡ(∇Ph, k) − ḡ(∇h, Pk))` of `adj(∇P)(h, k)`.
pub fn adjoint_nabla_p_tangential<T: Real>(
    cfg: &OperatorConfig,
    geo: &InducedGeometry<T>,
    h: &FieldAlongF<T>,
    k: &FieldAlongF<T>,
) -> TangentField<T> {
    let m = geo.dim();
    let dom = geo.domain();
    let ph = apply_p(cfg, geo, h);
    let pk = apply_p(cfg, geo, k);
    let dph = jacobian(dom, &ph.values);
    let dh = jacobian(dom, &h.values);
    let values = (0..geo.nodes())
        .map(|n| {
            if dom.is_boundary(n) {
                return [T::zero(); 2];
            }
            let mut c = [T::zero(); 2];
            for i in 0..m {
                c[i] = dot3(dph[n][i], k.values[n]) - dot3(dh[n][i], pk.values[n]);
            }
            mat_vec(&geo.g_inv[n], c, m)
        })
        .collect();
    TangentField { values }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::geometry::build_geometry;
    use crate::immersion::Immersion;

    #[test]
    fn config_validation() {
        assert!(OperatorConfig::new(1.0, 1).validate().is_ok());
        assert!(OperatorConfig::new(-1.0, 1).validate().is_err());
        assert!(OperatorConfig::new(1.0, 0).validate().is_err());
        assert!(OperatorConfig::new(1.0, 1).with_tol(1e-3).validate().is_err());
    }

    #[test]
    fn flat_eigen_inverse() {
        let d = Domain::dirichlet_square(41, 41).unwrap();
        let f = Immersion::<f64>::flat_sheet(d.clone()).unwrap();
        let geo = build_geometry(&f).unwrap();
        let cfg = OperatorConfig::new(1.0, 1);
        let rhs = FieldAlongF::from_fn(&d, |u, v| [0.0, 0.0, u.sin() * v.sin()]);
        let (h, rep) = solve_p(&cfg, &geo, &rhs, None).unwrap();
        assert!(rep.residual <= 1e-10);
        for k in d.free_nodes() {
            assert!((h.values[k][2] - rhs.values[k][2] / 3.0).abs() < 2e-3);
        }
    }

    #[test]
    fn round_trip_on_torus_p2() {
        let d = Domain::torus(24, 16).unwrap();
        let f = Immersion::<f64>::torus(d.clone(), 2.0, 0.8).unwrap();
        let geo = build_geometry(&f).unwrap();
        let cfg = OperatorConfig::new(0.5, 2);
        let h = FieldAlongF::from_fn(&d, |u, v| [u.cos(), (2.0 * v).sin(), (u + v).cos()]);
        let ph = apply_p(&cfg, &geo, &h);
        let (back, _) = solve_p(&cfg, &geo, &ph, None).unwrap();
        let err = geo.norm(&back.axpy(-1.0, &h));
        assert!(err < 1e-8 * geo.norm(&h), "{err}");
    }

    #[test]
    fn identity_when_a_is_zero() {
        let d = Domain::circle(16).unwrap();
        let f = Immersion::<f64>::circle(d.clone(), 1.0, [0.0, 0.0]).unwrap();
        let geo = build_geometry(&f).unwrap();
        let cfg = OperatorConfig::new(0.0, 1);
        let h = FieldAlongF::from_fn(&d, |u, _| [u.sin(), 1.0, 0.0]);
        assert_eq!(apply_p(&cfg, &geo, &h), h);
        assert_eq!(solve_p(&cfg, &geo, &h, None).unwrap().0, h);
    }

    #[test]
    fn vertical_input_has_no_horizontal_part() {
        let d = Domain::torus(16, 12).unwrap();
        let f = Immersion::<f64>::torus(d.clone(), 2.0, 0.8).unwrap();
        let geo = build_geometry(&f).unwrap();
        let cfg = OperatorConfig::new(1.0, 1);
        let x: Vec<[f64; 2]> = (0..d.nodes())
            .map(|k| {
                let [u, v] = d.param(k);
                [u.sin(), (u - v).cos()]
            })
            .collect();
        let h = FieldAlongF::from_values(push(&geo, &x));
        let (ver, hor) = split_horizontal_vertical(&cfg, &geo, &h).unwrap();
        assert!(hor.max_abs() < 1e-7);
        for k in 0..d.nodes() {
            assert!((ver.values[k][0] - x[k][0]).abs() < 1e-7);
        }
    }

    #[test]
    fn flat_sheet_adjoint_vanishes() {
        let d = Domain::dirichlet_square(12, 12).unwrap();
        let f = Immersion::<f64>::flat_sheet(d.clone()).unwrap();
        let geo = build_geometry(&f).unwrap();
        let cfg = OperatorConfig::new(1.0, 2);
        let mut h = FieldAlongF::from_fn(&d, |u, v| [u * v, v.sin(), u.sin() * v]);
        h.zero_boundary(&d);
        let adj = adjoint_nabla_p_perp(&cfg, &geo, &h, &h).unwrap();
        assert!(adj.max_abs() < 1e-12);
    }
}
