//! Cost of the scale-down, translate, scale-up path between `f₀` and a
//! translate of `f₀` at distance `ℓ`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::build_geometry;
use crate::immersion::{FieldAlongF, Immersion};
use crate::laplace::laplacian_power;
use crate::scalar::Real;

use super::quadrature::adaptive_simpson;

/// Moments of `f₀` that determine the scaling-leg energy
/// `G(r) = c0 r^m + A c_p r^{m−2p}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingMoments {
    pub m: usize,
    pub vol: f64,
    /// `∫ |f₀|² vol`.
    pub c0: f64,
    /// `∫ ḡ(Δ^p f₀, f₀) vol`.
    pub cp: f64,
    #[serde(rename = "A")]
    pub a: f64,
    pub p: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCost {
    pub scaling: f64,
    pub translation: f64,
    pub total: f64,
    pub r0: f64,
}

pub fn scaling_moments<T: Real>(f0: &Immersion<T>, a: f64, p: u32) -> Result<ScalingMoments> {
    let geo = build_geometry(f0)?;
    let f = FieldAlongF::from_values(f0.values().to_vec());
    let lp = laplacian_power(&geo, &f, p);
    Ok(ScalingMoments {
        m: f0.domain().dim(),
        vol: geo.volume().to_f64_lossy(),
        c0: geo.inner(&f, &f).to_f64_lossy(),
        cp: geo.inner(&lp, &f).to_f64_lossy(),
        a,
        p,
    })
}

impl ScalingMoments {
    fn speed(&self, r: f64) -> f64 {
        let m = self.m as i32;
        let e = self.c0 * r.powi(m) + self.a * self.cp * r.powi(m - 2 * self.p as i32);
        e.max(0.0).sqrt()
    }

    /// Whether the scaling leg stays bounded as `r0 → 0` (`p < m/2 + 1`).
    pub fn bounded(&self) -> bool {
        (self.p as f64) < self.m as f64 / 2.0 + 1.0
    }

    /// Cost of one scaling leg from `r0` to 1.
    pub fn scaling_leg(&self, r0: f64) -> f64 {
        let f = |s: f64| {
            let r = s.exp();
            self.speed(r) * r
        };
        adaptive_simpson(f, r0.ln(), 0.0, 1e-12)
    }

    /// Limit of the scaling leg as `r0 → 0`; infinite when unbounded.
    pub fn scaling_leg_limit(&self) -> f64 {
        if !self.bounded() {
            return f64::INFINITY;
        }
        // tail below r = 1e-12 is O(r^(1 + (m - 2p)/2))
        self.scaling_leg(1e-12)
    }

    pub fn cost(&self, ell: f64, r0: f64) -> ScalingCost {
        let scaling = 2.0 * self.scaling_leg(r0);
        let translation = ell * (r0.powi(self.m as i32) * self.vol).sqrt();
        ScalingCost {
            scaling,
            translation,
            total: scaling + translation,
            r0,
        }
    }

    /// Minimizes the total cost over `r0 ∈ [1e-12, 1]` (golden section in `log r0`).
    pub fn optimal_cost(&self, ell: f64) -> ScalingCost {
        let total = |s: f64| self.cost(ell, s.exp()).total;
        let (mut lo, mut hi) = ((1e-12f64).ln(), 0.0);
        let phi = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..80 {
            let x1 = hi - phi * (hi - lo);
            let x2 = lo + phi * (hi - lo);
            if total(x1) < total(x2) {
                hi = x2;
            } else {
                lo = x1;
            }
        }
        self.cost(ell, (0.5 * (lo + hi)).exp())
    }
}

/// Convenience wrapper: cost for given `ℓ` and `r0`.
pub fn scaling_translation_cost<T: Real>(f0: &Immersion<T>, ell: f64, r0: f64, a: f64, p: u32) -> Result<ScalingCost> {
    Ok(scaling_moments(f0, a, p)?.cost(ell, r0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;

    fn torus() -> Immersion<f64> {
        Immersion::torus(Domain::torus(32, 24).unwrap(), 2.0, 0.7).unwrap()
    }

    #[test]
    fn zero_distance_has_no_translation_leg() {
        let c = scaling_translation_cost(&torus(), 0.0, 0.1, 1.0, 1).unwrap();
        assert_eq!(c.translation, 0.0);
        assert!(c.scaling > 0.0);
    }

    #[test]
    fn translation_is_linear_in_distance() {
        let m = scaling_moments(&torus(), 1.0, 1).unwrap();
        let a = m.cost(3.0, 0.2).translation;
        let b = m.cost(6.0, 0.2).translation;
        assert!((b - 2.0 * a).abs() < 1e-12 * b);
    }

    #[test]
    fn optimal_cost_is_bounded_in_distance() {
        let m = scaling_moments(&torus(), 1.0, 1).unwrap();
        assert!(m.bounded());
        let limit = m.scaling_leg_limit();
        for ell in [1.0, 1e2, 1e4, 1e6] {
            assert!(m.optimal_cost(ell).total <= 2.0 * limit * (1.0 + 1e-4));
        }
    }
}
