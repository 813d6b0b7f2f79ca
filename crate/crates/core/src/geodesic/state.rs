//! Geodesic state `(f, b)` and one explicit Runge–Kutta step.

use crate::error::{Result, ShapeError};
use crate::geometry::{build_geometry_guarded, degeneracy_threshold, InducedGeometry};
use crate::immersion::{FieldAlongF, Immersion};
use crate::linalg::{axpy3, dot3};
use crate::scalar::Real;
use crate::sobolev::{apply_p, OperatorConfig};

use super::rhs::{momentum_rhs_general, momentum_rhs_h1, velocity_from_momentum};

/// Which discretization of `∂_t b` the integrator uses.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RhsForm {
    /// Specialized form for `p = 1`, general form otherwise.
    #[default]
    Auto,
    H1,
    General,
}

/// State of a horizontal geodesic in momentum form.
#[derive(Clone, Debug)]
pub struct GeodesicState<T: Real> {
    pub t: f64,
    pub f: Immersion<T>,
    /// Momentum density `b = a sqrt(det g)`.
    pub b: Vec<T>,
    pub geo: InducedGeometry<T>,
    /// Velocity solving `P f_t = a ν`.
    pub f_t: FieldAlongF<T>,
    /// `∂_t b` at this state.
    pub b_t: Vec<T>,
    /// Degeneracy threshold fixed at the initial state.
    pub eps_deg: T,
    /// CG iterations spent on the most recent velocity solve.
    pub cg_iterations: usize,
}

fn momentum_rhs<T: Real>(
    cfg: &OperatorConfig,
    form: RhsForm,
    geo: &InducedGeometry<T>,
    f_t: &FieldAlongF<T>,
    b: &[T],
) -> Result<Vec<T>> {
    let use_h1 = match form {
        RhsForm::Auto => cfg.p == 1,
        RhsForm::H1 => true,
        RhsForm::General => false,
    };
    if use_h1 {
        momentum_rhs_h1(cfg, geo, f_t)
    } else {
        let nu = geo.normal()?;
        let a: Vec<T> = b.iter().zip(&geo.vol_density).map(|(&b, &s)| b / s).collect();
        let pf = FieldAlongF::scaled_vectors(&a, nu);
        momentum_rhs_general(cfg, geo, f_t, Some(&pf))
    }
}

impl<T: Real> GeodesicState<T> {
    /// Initial state from an immersion and a momentum density.
    pub fn new(cfg: &OperatorConfig, form: RhsForm, f: Immersion<T>, mut b: Vec<T>) -> Result<Self> {
        cfg.validate()?;
        if cfg.a == 0.0 {
            return Err(ShapeError::InvalidOperator(
                "geodesic integration needs A > 0".into(),
            ));
        }
        if !f.is_hypersurface() {
            return Err(ShapeError::NotHypersurface);
        }
        if b.len() != f.nodes() {
            return Err(ShapeError::ShapeMismatch {
                expected: f.nodes(),
                actual: b.len(),
            });
        }
        let dom = f.domain().clone();
        if !dom.is_periodic() {
            for (k, v) in b.iter_mut().enumerate() {
                if dom.is_boundary(k) {
                    *v = T::zero();
                }
            }
        }
        let eps_deg = degeneracy_threshold(&f);
        Self::assemble(cfg, form, 0.0, f, b, eps_deg, None)
    }

    /// Initial state whose velocity is the normal field `v ν`: the momentum
    /// density is `sqrt(det g) ḡ(P(v ν), ν)`.
    pub fn from_normal_velocity(cfg: &OperatorConfig, form: RhsForm, f: Immersion<T>, v: &[T]) -> Result<Self> {
        let geo = crate::geometry::build_geometry(&f)?;
        let nu = geo.normal()?;
        let h = FieldAlongF::scaled_vectors(v, nu);
        let ph = apply_p(cfg, &geo, &h);
        let b = (0..f.nodes())
            .map(|k| dot3(ph.values[k], nu[k]) * geo.vol_density[k])
            .collect();
        Self::new(cfg, form, f, b)
    }

    fn assemble(
        cfg: &OperatorConfig,
        form: RhsForm,
        t: f64,
        f: Immersion<T>,
        b: Vec<T>,
        eps_deg: T,
        guess: Option<&FieldAlongF<T>>,
    ) -> Result<Self> {
        let geo = build_geometry_guarded(&f, eps_deg)?;
        let (f_t, rep) = velocity_from_momentum(cfg, &geo, &b, guess)?;
        let b_t = momentum_rhs(cfg, form, &geo, &f_t, &b)?;
        Ok(GeodesicState {
            t,
            f,
            b,
            geo,
            f_t,
            b_t,
            eps_deg,
            cg_iterations: rep.iterations,
        })
    }

    /// `G^P(f_t, f_t) = ∫ (b / sqrt det g) ḡ(ν, f_t) vol(g)`.
    pub fn energy(&self) -> T {
        let dom = self.f.domain();
        let nu = self.geo.normal.as_deref().expect("hypersurface state");
        (0..self.b.len())
            .map(|k| T::lit(dom.quad_weight(k)) * self.b[k] * dot3(nu[k], self.f_t.values[k]))
            .sum()
    }
}

/// Outcome of a successful step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInfo {
    pub drift: f64,
    pub cg_iterations: usize,
}

fn advance<T: Real>(f: &Immersion<T>, b: &[T], dt: T, kf: &FieldAlongF<T>, kb: &[T]) -> Result<(Immersion<T>, Vec<T>)> {
    let f2 = f.displaced(dt, kf)?;
    let b2 = b.iter().zip(kb).map(|(&x, &k)| x + dt * k).collect();
    Ok((f2, b2))
}

/// One classical RK4 step. With `drift_tol` set, the step fails with
/// `StepRejected` when the relative energy change exceeds it.
pub fn step<T: Real>(
    cfg: &OperatorConfig,
    form: RhsForm,
    state: &GeodesicState<T>,
    dt: f64,
    drift_tol: Option<f64>,
) -> Result<(GeodesicState<T>, StepInfo)> {
    if !(dt > 0.0) {
        return Err(ShapeError::InvalidOperator(format!("time step {dt} must be positive")));
    }
    let h = T::lit(dt);
    let half = T::lit(0.5 * dt);
    let eps = state.eps_deg;
    let mut iters = 0;

    let stage = |f: &Immersion<T>, b: &[T], guess: &FieldAlongF<T>| -> Result<(FieldAlongF<T>, Vec<T>, usize)> {
        let geo = build_geometry_guarded(f, eps)?;
        let (ft, rep) = velocity_from_momentum(cfg, &geo, b, Some(guess))?;
        let bt = momentum_rhs(cfg, form, &geo, &ft, b)?;
        Ok((ft, bt, rep.iterations))
    };

    let (k1f, k1b) = (&state.f_t, &state.b_t);
    let (f2, b2) = advance(&state.f, &state.b, half, k1f, k1b)?;
    let (k2f, k2b, i2) = stage(&f2, &b2, k1f)?;
    let (f3, b3) = advance(&state.f, &state.b, half, &k2f, &k2b)?;
    let (k3f, k3b, i3) = stage(&f3, &b3, &k2f)?;
    let (f4, b4) = advance(&state.f, &state.b, h, &k3f, &k3b)?;
    let (k4f, k4b, i4) = stage(&f4, &b4, &k3f)?;
    iters += i2 + i3 + i4;

    let sixth = T::lit(dt / 6.0);
    let two = T::lit(2.0);
    let vals = (0..state.f.nodes())
        .map(|k| {
            let mut inc = axpy3(k1f.values[k], two, k2f.values[k]);
            inc = axpy3(inc, two, k3f.values[k]);
            inc = axpy3(inc, T::one(), k4f.values[k]);
            axpy3(state.f.values()[k], sixth, inc)
        })
        .collect();
    let f_new = Immersion::new(state.f.domain().clone(), state.f.ambient_dim(), vals)?;
    let b_new: Vec<T> = (0..state.b.len())
        .map(|k| state.b[k] + sixth * (k1b[k] + two * k2b[k] + two * k3b[k] + k4b[k]))
        .collect();
    let next = GeodesicState::assemble(cfg, form, state.t + dt, f_new, b_new, eps, Some(&k4f))?;
    iters += next.cg_iterations;

    let e0 = state.energy().to_f64_lossy();
    let e1 = next.energy().to_f64_lossy();
    let drift = if e0 > 0.0 { (e1 - e0).abs() / e0 } else { (e1 - e0).abs() };
    if !drift.is_finite() {
        return Err(ShapeError::StepRejected {
            drift,
            tolerance: drift_tol.unwrap_or(f64::INFINITY),
        });
    }
    if let Some(tol) = drift_tol {
        if drift > tol {
            return Err(ShapeError::StepRejected { drift, tolerance: tol });
        }
    }
    Ok((
        next,
        StepInfo {
            drift,
            cg_iterations: iters,
        },
    ))
}
