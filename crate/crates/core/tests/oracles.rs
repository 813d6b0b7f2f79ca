mod common;

use common::*;
use shapeflow::domain::Domain;
use shapeflow::geometry::build_geometry;
use shapeflow::immersion::{FieldAlongF, Immersion};
use shapeflow::linalg::dot3;
use shapeflow::oracles::sphere::sphere_path_length_composite;
use shapeflow::oracles::{
    area_swept_bound_check, c2_squared, completeness_probe, path_length, scaling_moments, sphere_ode_solve,
    sphere_path_length, sqrt_vol_lipschitz_check, PathSample, SphereState,
};
use std::f64::consts::PI;

#[test]
fn path_length_closed_forms() {
    let want = (2.0 * PI).sqrt() * 2.0 / 3.0 * (2.0f64.powf(1.5) - 0.3f64.powf(1.5));
    assert!(rel_err(sphere_path_length(0.3, 2.0, 2, 0.0, 1), want) < 1e-10);
    assert_eq!(sphere_path_length(0.7, 0.7, 3, 1.0, 2), 0.0);
    // n = 3, p = 1: the integrand is sqrt(4π) sqrt(r² + 2A)
    let (a, r0, r1) = (0.6, 0.1, 1.5);
    let c: f64 = 2.0 * a;
    let prim = |r: f64| 0.5 * (r * (r * r + c).sqrt() + c * (r / c.sqrt()).asinh());
    let want = (4.0 * PI).sqrt() * (prim(r1) - prim(r0));
    assert!(rel_err(sphere_path_length(r0, r1, 3, a, 1), want) < 1e-10);
    assert!(rel_err(sphere_path_length(r1, r0, 3, a, 1), want) < 1e-10);
}

#[test]
fn composite_simpson_refines_at_fourth_order() {
    let exact = sphere_path_length(0.2, 1.0, 3, 1.0, 2);
    let e1 = (sphere_path_length_composite(0.2, 1.0, 3, 1.0, 2, 16) - exact).abs();
    let e2 = (sphere_path_length_composite(0.2, 1.0, 3, 1.0, 2, 32) - exact).abs();
    let ratio = e1 / e2;
    assert!((13.0..19.0).contains(&ratio), "{ratio}");
}

/// Divergence to r = 0 exactly when (n − 1 − 2p)/2 <= −1.
#[test]
fn completeness_table() {
    for (n, p, diverges) in [(2, 1, false), (2, 2, true), (3, 1, false), (3, 2, true), (3, 3, true), (4, 1, false)] {
        let probe = completeness_probe(n, 1.0, p);
        assert_eq!(probe.predicts_divergence, diverges, "n={n} p={p}");
        assert!(probe.consistent(), "n={n} p={p}: {probe:?}");
        assert!(probe.partial.windows(2).all(|w| w[1] > w[0]));
    }
    // (n, p) = (3, 1) converges to the closed form at r0 = 0
    let c: f64 = 2.0;
    let limit = (4.0 * PI).sqrt() * 0.5 * ((1.0 + c).sqrt() + c * (1.0 / c.sqrt()).asinh());
    let probe = completeness_probe(3, 1.0, 1);
    assert!(rel_err(*probe.partial.last().unwrap(), limit) < 1e-5);
}

#[test]
fn sphere_ode_reaches_zero_only_for_incomplete_cases() {
    // n = 2, p = 1 with A = 0: a shrinking circle hits r = 0 in finite time
    let s = SphereState { r: 1.0, r_t: -1.0, n: 2, a: 0.0, p: 1 };
    assert!(sphere_ode_solve(&s, 1e-3, 5.0).is_err());
    // n = 2, p = 2 is complete: the radius stays positive
    let s = SphereState { r: 1.0, r_t: -1.0, n: 2, a: 1.0, p: 2 };
    let tr = sphere_ode_solve(&s, 1e-3, 5.0).unwrap();
    assert!(tr.iter().all(|x| x.r > 0.0));
    let i0 = s.invariant();
    let last = tr.last().unwrap();
    assert!(rel_err(SphereState { r: last.r, r_t: last.r_t, ..s }.invariant(), i0) < 1e-6);
}

fn sample(geo: &shapeflow::geometry::InducedGeometry<f64>, t: f64, v: &FieldAlongF<f64>, energy: f64) -> PathSample {
    let nu = geo.normal().unwrap();
    let ns: Vec<f64> = (0..geo.nodes()).map(|k| dot3(nu[k], v.values[k]).abs()).collect();
    PathSample { t, vol: geo.volume(), energy, normal_speed: geo.integrate(&ns) }
}

/// Translating the flat sheet along its normal makes the area bound an equality.
#[test]
fn normal_translation_attains_area_bound() {
    let dom = Domain::dirichlet_square(32, 32).unwrap();
    let f0 = Immersion::<f64>::flat_sheet(dom.clone()).unwrap();
    let e = FieldAlongF::<f64>::constant(dom.nodes(), [0.0, 0.0, 1.0]);
    let samples: Vec<PathSample> = (0..=10)
        .map(|i| {
            let t = 0.1 * i as f64;
            let geo = build_geometry(&f0.displaced(t, &e).unwrap()).unwrap();
            // Δ of a constant field vanishes, so G^P(e, e) = H⁰(e, e)
            sample(&geo, t, &e, geo.inner(&e, &e))
        })
        .collect();
    let r = area_swept_bound_check(&samples);
    assert!(r.pass);
    assert!((r.ratio - 1.0).abs() < 1e-2, "{r:?}");
    assert!(rel_err(path_length(&samples), PI) < 1e-10);
}

/// A shrinking circle with A = 1, p = 1 has C₂ = 1; the Lipschitz bound is
/// tight to within a modest factor.
#[test]
fn lipschitz_bound_on_shrinking_circle() {
    let dom = Domain::circle(256).unwrap();
    let mut samples = Vec::new();
    for i in 0..=20 {
        let t = 0.02 * i as f64;
        let r = 1.0 - t;
        let geo = build_geometry(&Immersion::<f64>::circle(dom.clone(), r, [0.0, 0.0]).unwrap()).unwrap();
        let v = FieldAlongF::<f64>::scaled_vectors(&vec![-1.0; dom.nodes()], geo.normal().unwrap());
        let energy = geo.inner(&v, &v) * (1.0 + 1.0 / (r * r));
        samples.push(sample(&geo, t, &v, energy));
    }
    assert_eq!(c2_squared(1.0, 1), 1.0);
    let r = sqrt_vol_lipschitz_check(&samples, 1, 1.0, 1);
    assert!(r.pass && r.ratio > 0.1, "{r:?}");
    let a = area_swept_bound_check(&samples);
    assert!(a.pass && a.ratio > 0.5, "{a:?}");
}

#[test]
fn rotation_has_zero_lipschitz_lhs() {
    let dom = Domain::circle(64).unwrap();
    let samples: Vec<PathSample> = (0..5)
        .map(|i| {
            let geo = build_geometry(&Immersion::<f64>::circle(dom.clone(), 1.0, [0.0, 0.0]).unwrap()).unwrap();
            PathSample { t: i as f64 * 0.1, vol: geo.volume(), energy: 1.0, normal_speed: 0.0 }
        })
        .collect();
    let r = sqrt_vol_lipschitz_check(&samples, 1, 1.0, 1);
    assert_eq!(r.lhs, 0.0);
    assert!(r.pass);
    assert_eq!(area_swept_bound_check(&samples).lhs, 0.0);
}

#[test]
fn c2_matches_brute_force_minimum() {
    for (a, p) in [(0.5, 2), (2.0, 2), (1.0, 3), (0.1, 4)] {
        let brute = (0..200_000)
            .map(|i| i as f64 * 1e-4)
            .map(|l: f64| (1.0 + a * l.powi(p)) / (1.0 + l))
            .fold(f64::INFINITY, f64::min)
            .min(1.0);
        assert!((c2_squared(a, p as u32) - brute).abs() < 1e-6, "A={a} p={p}");
    }
}

fn torus() -> Immersion<f64> {
    Immersion::<f64>::torus(Domain::torus(48, 32).unwrap(), 2.0, 0.7).unwrap()
}

#[test]
fn scaling_cost_is_bounded_in_distance() {
    let mom = scaling_moments(&torus(), 1.0, 1).unwrap();
    assert!(mom.bounded());
    let opt = mom.optimal_cost(1.0);
    assert!(opt.total <= mom.cost(1.0, 1.0).total + 1e-12);
    assert!(opt.total <= mom.cost(1.0, 1e-3).total + 1e-12);
    // two scaling legs bound the cost for every distance; direct
    // translation grows linearly
    let cap = 2.0 * mom.scaling_leg_limit();
    assert!(cap.is_finite());
    for ell in [1e3, 1e6, 1e9] {
        let c = mom.optimal_cost(ell);
        assert!(c.total <= cap * (1.0 + 1e-3), "ell={ell}: {c:?}");
        assert!(c.total < 1e-2 * ell * mom.vol.sqrt());
    }
    let far = mom.cost(1e6, 1e-8);
    assert!(far.total < 1.01 * cap, "{far:?}");
    // the scaling leg alone settles as r0 -> 0
    let (l1, l2) = (mom.scaling_leg(1e-6), mom.scaling_leg(1e-9));
    assert!(rel_err(l1, l2) < 1e-5);
}

#[test]
fn translation_leg_is_linear_in_distance() {
    let mom = scaling_moments(&torus(), 1.0, 1).unwrap();
    let (a, b) = (mom.cost(10.0, 0.1), mom.cost(30.0, 0.1));
    assert!(rel_err(b.translation, 3.0 * a.translation) < 1e-14);
    assert_eq!(a.scaling, b.scaling);
    assert!(rel_err(a.translation, 10.0 * (0.01 * mom.vol).sqrt()) < 1e-14);
}

#[test]
fn scaling_moments_of_circle() {
    // |f|² = r², Δ^p f = r^{−2p} f on a circle of radius r about the origin
    let r = 1.3;
    let f = Immersion::<f64>::circle(Domain::circle(512).unwrap(), r, [0.0, 0.0]).unwrap();
    for p in [1, 2] {
        let m = scaling_moments(&f, 1.0, p).unwrap();
        assert!(rel_err(m.vol, 2.0 * PI * r) < 1e-4);
        assert!(rel_err(m.c0, 2.0 * PI * r.powi(3)) < 1e-4);
        assert!(rel_err(m.cp, 2.0 * PI * r.powi(3 - 2 * p as i32)) < 1e-3);
        assert!(m.bounded() == (p == 1));
    }
    let m = scaling_moments(&torus(), 1.0, 2).unwrap();
    assert!(!m.bounded());
    assert!(m.scaling_leg_limit().is_infinite());
    assert!(m.scaling_leg(1e-3) < m.scaling_leg(1e-4));
}
