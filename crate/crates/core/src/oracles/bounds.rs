//! Geodesic-distance estimates evaluated on sampled paths.

use serde::{Deserialize, Serialize};

use crate::geodesic::Diagnostics;

/// Time sample of a path with the quantities the bounds need.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub vol: f64,
    /// `G^P(f_t, f_t)`.
    pub energy: f64,
    /// `∫ |ḡ(f_t, ν)| vol(g)`.
    pub normal_speed: f64,
}

impl From<&Diagnostics> for PathSample {
    fn from(d: &Diagnostics) -> Self {
        PathSample {
            t: d.t,
            vol: d.vol,
            energy: d.energy,
            normal_speed: d.normal_speed,
        }
    }
}

pub fn samples_from(diag: &[Diagnostics]) -> Vec<PathSample> {
    diag.iter().map(PathSample::from).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub name: String,
    /// Left-hand side of `lhs <= rhs`.
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs / rhs` (0 when both vanish).
    pub ratio: f64,
    pub pass: bool,
}

/// Relative slack allowed for time-quadrature roundoff.
pub const BOUND_SLACK: f64 = 1e-6;

impl BoundReport {
    pub fn new(name: &str, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs.abs() <= 1e-300 {
            0.0
        } else {
            f64::INFINITY
        };
        BoundReport {
            name: name.to_string(),
            lhs,
            rhs,
            ratio,
            pass: ratio.is_finite() && ratio <= 1.0 + BOUND_SLACK,
        }
    }
}

/// Cumulative trapezoid integral of `f(sample)` over time.
fn cumulative(samples: &[PathSample], f: impl Fn(&PathSample) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(samples.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in samples.windows(2) {
        acc += 0.5 * (w[1].t - w[0].t) * (f(&w[0]) + f(&w[1]));
        out.push(acc);
    }
    out
}

/// Path length `∫ sqrt(G^P(f_t, f_t)) dt` by the trapezoid rule.
pub fn path_length(samples: &[PathSample]) -> f64 {
    cumulative(samples, |s| s.energy.max(0.0).sqrt()).last().copied().unwrap_or(0.0)
}

/// `C₁ · (swept area) <= max_t sqrt(Vol) · L` with `C₁ = 1`, valid since
/// `G^P >= H⁰` for `A >= 0`.
pub fn area_swept_bound_check(samples: &[PathSample]) -> BoundReport {
    let swept = cumulative(samples, |s| s.normal_speed).last().copied().unwrap_or(0.0);
    let max_sqrt_vol = samples.iter().map(|s| s.vol.sqrt()).fold(0.0, f64::max);
    BoundReport::new("area-swept", swept, max_sqrt_vol * path_length(samples))
}

/// `C₂² = min_{λ >= 0} (1 + A λ^p) / (1 + λ)`, so that `G^P >= C₂² H¹`.
pub fn c2_squared(a: f64, p: u32) -> f64 {
    if p == 1 {
        return a.min(1.0);
    }
    // minimum of a smooth function with one interior critical point
    let g = |l: f64| (1.0 + a * l.powi(p as i32)) / (1.0 + l);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while g(hi * 2.0) < g(hi) {
        hi *= 2.0;
    }
    hi *= 2.0;
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let x1 = hi - phi * (hi - lo);
        let x2 = lo + phi * (hi - lo);
        if g(x1) < g(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    g(0.5 * (lo + hi)).min(1.0)
}

/// `|sqrt Vol(t_j) − sqrt Vol(t_i)| <= sqrt(m) / (2 C₂) · L(t_i, t_j)` over
/// all sample pairs; reports the pair with the largest ratio.
pub fn sqrt_vol_lipschitz_check(samples: &[PathSample], dim_m: usize, a: f64, p: u32) -> BoundReport {
    let c2 = c2_squared(a, p).sqrt();
    let k = (dim_m as f64).sqrt() / (2.0 * c2);
    let len = cumulative(samples, |s| s.energy.max(0.0).sqrt());
    let sv: Vec<f64> = samples.iter().map(|s| s.vol.sqrt()).collect();
    let mut worst = BoundReport::new("sqrt-vol-lipschitz", 0.0, 0.0);
    for i in 0..samples.len() {
        for j in i + 1..samples.len() {
            let r = BoundReport::new("sqrt-vol-lipschitz", (sv[j] - sv[i]).abs(), k * (len[j] - len[i]));
            if r.ratio > worst.ratio || (worst.rhs == 0.0 && r.rhs > 0.0 && r.ratio >= worst.ratio) {
                worst = r;
            }
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn static_path_has_zero_sides() {
        let s: Vec<PathSample> = (0..5)
            .map(|k| PathSample { t: k as f64, vol: 2.0, energy: 0.0, normal_speed: 0.0 })
            .collect();
        let r = area_swept_bound_check(&s);
        assert_eq!((r.lhs, r.rhs, r.pass), (0.0, 0.0, true));
        assert!(sqrt_vol_lipschitz_check(&s, 2, 1.0, 1).pass);
    }

    #[test]
    fn c2_values() {
        assert_eq!(c2_squared(0.25, 1), 0.25);
        assert_eq!(c2_squared(4.0, 1), 1.0);
        // p = 2, A = 1: min (1 + l^2)/(1 + l) = 2(sqrt 2 - 1)
        assert!((c2_squared(1.0, 2) - 2.0 * (2f64.sqrt() - 1.0)).abs() < 1e-9);
    }
}
