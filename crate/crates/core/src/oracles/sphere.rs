//! Concentric spheres `S^{n-1}` of radius `r(t)` in `R^n`: the closed-form
//! geodesic ODE, its conserved energy and the path length.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::error::{Result, ShapeError};

use super::quadrature::{adaptive_simpson, composite_simpson};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereState {
    pub r: f64,
    pub r_t: f64,
    /// Ambient dimension.
    pub n: u32,
    #[serde(rename = "A")]
    pub a: f64,
    pub p: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SphereSample {
    pub t: f64,
    pub r: f64,
    pub r_t: f64,
}

impl SphereState {
    fn validate(&self) -> Result<()> {
        if !(self.r > 0.0) {
            return Err(ShapeError::InvalidImmersion(format!("radius {} must be positive", self.r)));
        }
        if self.n < 2 || self.p < 1 || !(self.a >= 0.0) {
            return Err(ShapeError::InvalidOperator(format!(
                "need n >= 2, p >= 1, A >= 0; got n = {}, p = {}, A = {}",
                self.n, self.p, self.a
            )));
        }
        Ok(())
    }

    fn c(&self) -> f64 {
        self.a * ((self.n - 1) as f64).powi(self.p as i32)
    }

    /// `r_tt = −r_t² ((n−1)/(2r) − p A (n−1)^p / (r (r^{2p} + A (n−1)^p)))`.
    pub fn acceleration(&self) -> f64 {
        sphere_rtt(self.r, self.r_t, self.n, self.a, self.p)
    }

    /// `r_t² (1 + A (n−1)^p / r^{2p}) r^{n−1}`, conserved along the ODE.
    pub fn invariant(&self) -> f64 {
        let r2p = self.r.powi(2 * self.p as i32);
        self.r_t * self.r_t * (1.0 + self.c() / r2p) * self.r.powi(self.n as i32 - 1)
    }

    /// Energy `G^P(f_t, f_t)` of the sphere: the invariant times the unit
    /// sphere area.
    pub fn energy(&self) -> f64 {
        unit_sphere_area(self.n) * self.invariant()
    }
}

pub fn sphere_rtt(r: f64, r_t: f64, n: u32, a: f64, p: u32) -> f64 {
    let nm1 = (n - 1) as f64;
    let c = a * nm1.powi(p as i32);
    let r2p = r.powi(2 * p as i32);
    -r_t * r_t * (nm1 / (2.0 * r) - p as f64 * c / (r * (r2p + c)))
}

/// Area `n π^{n/2} / Γ(n/2 + 1)` of the unit sphere in `R^n`.
pub fn unit_sphere_area(n: u32) -> f64 {
    let h = n as f64 / 2.0;
    n as f64 * std::f64::consts::PI.powf(h) / gamma(h + 1.0)
}

/// One RK4 step of the first-order system `(r, r_t)`. Returns `None` when
/// a stage or the result has a non-positive radius.
pub fn sphere_ode_step(s: &SphereState, dt: f64) -> Option<SphereState> {
    let f = |r: f64, v: f64| (r > 0.0).then(|| (v, sphere_rtt(r, v, s.n, s.a, s.p)));
    let (k1r, k1v) = f(s.r, s.r_t)?;
    let (k2r, k2v) = f(s.r + 0.5 * dt * k1r, s.r_t + 0.5 * dt * k1v)?;
    let (k3r, k3v) = f(s.r + 0.5 * dt * k2r, s.r_t + 0.5 * dt * k2v)?;
    let (k4r, k4v) = f(s.r + dt * k3r, s.r_t + dt * k3v)?;
    let next = SphereState {
        r: s.r + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r),
        r_t: s.r_t + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
        ..*s
    };
    (next.r > 0.0 && next.r.is_finite() && next.r_t.is_finite()).then_some(next)
}

/// Integrates to `t_end` with fixed step `dt` (the last step is shortened).
/// Fails with `Aborted` when the radius reaches zero.
pub fn sphere_ode_solve(s0: &SphereState, dt: f64, t_end: f64) -> Result<Vec<SphereSample>> {
    s0.validate()?;
    if !(dt > 0.0 && t_end >= 0.0) {
        return Err(ShapeError::InvalidOperator(format!("need dt > 0, tEnd >= 0; got {dt}, {t_end}")));
    }
    let mut s = *s0;
    let mut t = 0.0;
    let mut out = vec![SphereSample { t, r: s.r, r_t: s.r_t }];
    while t < t_end - 1e-12 * t_end.max(1.0) {
        let h = dt.min(t_end - t);
        s = sphere_ode_step(&s, h).ok_or_else(|| ShapeError::Aborted {
            t,
            reason: format!("radius reached zero after r = {}", s.r),
        })?;
        t += h;
        out.push(SphereSample { t, r: s.r, r_t: s.r_t });
    }
    Ok(out)
}

/// Linear interpolation of the radius at time `t`.
pub fn radius_at(samples: &[SphereSample], t: f64) -> f64 {
    let k = samples.partition_point(|s| s.t < t);
    if k == 0 {
        return samples[0].r;
    }
    if k >= samples.len() {
        return samples[samples.len() - 1].r;
    }
    let (a, b) = (samples[k - 1], samples[k]);
    let w = (t - a.t) / (b.t - a.t);
    a.r + w * (b.r - a.r)
}

fn length_integrand(n: u32, a: f64, p: u32) -> impl Fn(f64) -> f64 {
    let c = a * ((n - 1) as f64).powi(p as i32);
    // substitution r = e^s, dr = r ds
    move |s: f64| {
        let r = s.exp();
        ((1.0 + c / r.powi(2 * p as i32)) * r.powi(n as i32 - 1)).sqrt() * r
    }
}

/// Length of the path of concentric spheres from radius `r0` to `r1`.
pub fn sphere_path_length(r0: f64, r1: f64, n: u32, a: f64, p: u32) -> f64 {
    if r0 == r1 {
        return 0.0;
    }
    let (lo, hi) = if r0 < r1 { (r0, r1) } else { (r1, r0) };
    let f = length_integrand(n, a, p);
    let scale = unit_sphere_area(n).sqrt();
    scale * adaptive_simpson(&f, lo.ln(), hi.ln(), 1e-12 * (1.0 + f(hi.ln())))
}

/// Same integral with a fixed composite Simpson rule of `panels` subintervals.
pub fn sphere_path_length_composite(r0: f64, r1: f64, n: u32, a: f64, p: u32, panels: usize) -> f64 {
    let f = length_integrand(n, a, p);
    unit_sphere_area(n).sqrt() * composite_simpson(f, r0.ln(), r1.ln(), panels)
}

/// Finite surrogate for completeness of the sphere sub-family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompletenessProbe {
    /// Exponent `(n − 1 − 2p)/2` of the integrand near `r = 0`.
    pub exponent: f64,
    /// The exponent predicts an infinite length to `r = 0`.
    pub predicts_divergence: bool,
    pub eps: Vec<f64>,
    /// `spherePathLength(ε, 1)` for each `ε`.
    pub partial: Vec<f64>,
    /// Partial lengths grow without apparent bound.
    pub grows: bool,
    /// Partial lengths settle.
    pub converges: bool,
}

impl CompletenessProbe {
    pub fn consistent(&self) -> bool {
        self.predicts_divergence == self.grows && self.grows != self.converges
    }
}

/// Evaluates partial lengths over `ε ∈ {1e-1, …, 1e-6}`.
pub fn completeness_probe(n: u32, a: f64, p: u32) -> CompletenessProbe {
    let exponent = (n as f64 - 1.0 - 2.0 * p as f64) / 2.0;
    let eps: Vec<f64> = (1..=6).map(|k| 10f64.powi(-k)).collect();
    let partial: Vec<f64> = eps.iter().map(|&e| sphere_path_length(e, 1.0, n, a, p)).collect();
    let inc: Vec<f64> = partial.windows(2).map(|w| w[1] - w[0]).collect();
    let monotone = inc.iter().all(|&d| d > 0.0);
    // Divergent partial sums keep adding at least as much per decade
    // (logarithmic growth adds a constant, power growth an increasing amount);
    // convergent ones add geometrically shrinking increments.
    let last = inc[inc.len() - 1];
    let first = inc[0];
    let grows = monotone && last >= 0.9 * first && last > 1e-3 * partial[0];
    let converges = monotone && last < 0.1 * first && last < 1e-2 * partial[partial.len() - 1];
    CompletenessProbe {
        exponent,
        predicts_divergence: exponent <= -1.0,
        eps,
        partial,
        grows,
        converges,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn acceleration_example() {
        let s = SphereState { r: 1.0, r_t: 1.0, n: 3, a: 1.0, p: 1 };
        assert!((s.acceleration() + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn equilibrium() {
        let s = SphereState { r: 0.7, r_t: 0.0, n: 2, a: 1.0, p: 2 };
        let tr = sphere_ode_solve(&s, 0.01, 1.0).unwrap();
        assert!(tr.iter().all(|x| x.r == 0.7));
    }

    #[test]
    fn invariant_is_conserved() {
        let s0 = SphereState { r: 1.0, r_t: 0.8, n: 3, a: 0.5, p: 2 };
        let tr = sphere_ode_solve(&s0, 1e-3, 2.0).unwrap();
        let i0 = s0.invariant();
        for x in &tr {
            let s = SphereState { r: x.r, r_t: x.r_t, ..s0 };
            assert!(((s.invariant() - i0) / i0).abs() < 1e-8);
        }
    }

    #[test]
    fn shrinking_without_penalty_aborts() {
        let s0 = SphereState { r: 1.0, r_t: -3.0, n: 2, a: 0.0, p: 1 };
        assert!(matches!(sphere_ode_solve(&s0, 1e-3, 5.0), Err(ShapeError::Aborted { .. })));
    }

    #[test]
    fn unit_areas() {
        assert!((unit_sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn length_with_zero_weight() {
        let (r0, r1): (f64, f64) = (0.3, 2.0);
        let exact = (2.0 * std::f64::consts::PI).sqrt() * 2.0 / 3.0 * (r1.powf(1.5) - r0.powf(1.5));
        assert!((sphere_path_length(r0, r1, 2, 0.0, 1) - exact).abs() < 1e-10);
        assert_eq!(sphere_path_length(1.0, 1.0, 3, 1.0, 2), 0.0);
    }
}
