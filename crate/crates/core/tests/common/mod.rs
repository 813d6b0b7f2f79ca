#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shapeflow::domain::Domain;
use shapeflow::geometry::build_geometry;
use shapeflow::immersion::{FieldAlongF, Immersion};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Smooth random scalar: low Fourier modes on periodic axes, sine modes
/// vanishing at the edges of the square.
pub fn smooth_scalar(rng: &mut impl Rng, dom: &Domain, amp: f64) -> Vec<f64> {
    let periodic = dom.is_periodic();
    let terms: Vec<(f64, f64, f64, f64)> = (0..4)
        .map(|_| {
            let lo = if periodic { 0 } else { 1 };
            (
                rng.gen_range(lo..=3) as f64,
                if dom.dim() == 2 { rng.gen_range(lo..=3) as f64 } else { 0.0 },
                amp * rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..std::f64::consts::TAU),
            )
        })
        .collect();
    (0..dom.nodes())
        .map(|k| {
            let [u, v] = dom.param(k);
            terms
                .iter()
                .map(|&(a, b, c, ph)| {
                    if periodic {
                        c * (a * u + b * v + ph).cos()
                    } else {
                        c * (a * u).sin() * (b * v).sin()
                    }
                })
                .sum()
        })
        .collect()
}

pub fn smooth_field(rng: &mut impl Rng, dom: &Domain, amp: f64) -> FieldAlongF<f64> {
    let c: Vec<Vec<f64>> = (0..3).map(|_| smooth_scalar(rng, dom, amp)).collect();
    FieldAlongF::<f64>::from_values((0..dom.nodes()).map(|k| [c[0][k], c[1][k], c[2][k]]).collect())
}

/// Torus of revolution (torus domain) or flat sheet (square), bent along its normal.
pub fn bent_surface(rng: &mut impl Rng, dom: &Domain, amp: f64) -> Immersion<f64> {
    let base = if dom.is_periodic() {
        Immersion::<f64>::torus(dom.clone(), 2.0, 0.8).unwrap()
    } else {
        Immersion::<f64>::flat_sheet(dom.clone()).unwrap()
    };
    let geo = build_geometry(&base).unwrap();
    let phi = smooth_scalar(rng, dom, amp);
    base.displaced(1.0, &FieldAlongF::scaled_vectors(&phi, geo.normal().unwrap()))
        .unwrap()
}

/// Centered difference along `axis` with periodic wrap; test-side stencil.
pub fn central_diff(dom: &Domain, data: &[[f64; 3]], axis: usize) -> Vec<[f64; 3]> {
    let h = dom.spacing(axis);
    (0..dom.nodes())
        .map(|k| {
            let (i, j) = dom.coords(k);
            let (n0, n1) = (dom.count(0), if dom.dim() == 2 { dom.count(1) } else { 1 });
            let (a, b) = if axis == 0 {
                (dom.index((i + 1) % n0, j), dom.index((i + n0 - 1) % n0, j))
            } else {
                (dom.index(i, (j + 1) % n1), dom.index(i, (j + n1 - 1) % n1))
            };
            [0, 1, 2].map(|c| (data[a][c] - data[b][c]) / (2.0 * h))
        })
        .collect()
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
