mod common;

use common::*;
use nalgebra::Matrix2;
use shapeflow::domain::Domain;
use shapeflow::geometry::build_geometry;
use shapeflow::immersion::Immersion;
use shapeflow::validation::variation_errors;

fn mat(a: [[f64; 2]; 2]) -> Matrix2<f64> {
    Matrix2::new(a[0][0], a[0][1], a[1][0], a[1][1])
}

/// Test-side first variations of `g`, `g⁻¹` and the volume density,
/// compared with centered differences in ε of the crate's geometry.
#[test]
fn first_variations_match_test_oracle() {
    let mut r = rng(2024);
    for dom in [Domain::torus(24, 20).unwrap(), Domain::dirichlet_square(20, 20).unwrap()] {
        let f = bent_surface(&mut r, &dom, 0.2);
        let h = smooth_field(&mut r, &dom, 1.0);
        let geo = build_geometry(&f).unwrap();
        let df = [central_diff(&dom, f.values(), 0), central_diff(&dom, f.values(), 1)];
        let dh = [central_diff(&dom, &h.values, 0), central_diff(&dom, &h.values, 1)];
        let e = 1e-5;
        let gp = build_geometry(&f.displaced(e, &h).unwrap()).unwrap();
        let gm = build_geometry(&f.displaced(-e, &h).unwrap()).unwrap();
        let dot = |a: [f64; 3], b: [f64; 3]| a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
        for n in dom.free_nodes() {
            let mut dg = Matrix2::zeros();
            let mut g = Matrix2::zeros();
            for i in 0..2 {
                for j in 0..2 {
                    g[(i, j)] = dot(df[i][n], df[j][n]);
                    dg[(i, j)] = dot(dh[i][n], df[j][n]) + dot(dh[j][n], df[i][n]);
                }
            }
            let gi = g.try_inverse().unwrap();
            let dgi = -gi * dg * gi;
            let dvol = 0.5 * (gi * dg).trace() * g.determinant().sqrt();

            let fd_g = (mat(gp.g[n]) - mat(gm.g[n])) / (2.0 * e);
            let fd_gi = (mat(gp.g_inv[n]) - mat(gm.g_inv[n])) / (2.0 * e);
            let fd_vol = (gp.vol_density[n] - gm.vol_density[n]) / (2.0 * e);
            assert!((fd_g - dg).abs().max() < 1e-7 * (1.0 + dg.abs().max()));
            assert!((fd_gi - dgi).abs().max() < 1e-6 * (1.0 + dgi.abs().max()));
            assert!((fd_vol - dvol).abs() < 1e-7 * (1.0 + dvol.abs()));
            assert!((mat(geo.g[n]) - g).abs().max() < 1e-12);
        }
    }
}

#[test]
fn curve_volume_variation() {
    let dom = Domain::circle(128).unwrap();
    let f = Immersion::<f64>::circle(dom.clone(), 1.0, [0.0, 0.0]).unwrap();
    let geo = build_geometry(&f).unwrap();
    let nu = shapeflow::immersion::FieldAlongF::<f64>::from_values(geo.normal().unwrap().to_vec());
    let e = 1e-6;
    let gp = build_geometry(&f.displaced(e, &nu).unwrap()).unwrap();
    // outward normal: the length 2πr grows at rate 2π
    let rate = (gp.volume() - geo.volume()) / e;
    assert!(rel_err(rate, std::f64::consts::TAU) < 1e-3, "{rate}");
}

#[test]
fn difference_quotient_errors_are_first_order() {
    let mut r = rng(99);
    for dom in [Domain::torus(16, 16).unwrap(), Domain::dirichlet_square(16, 16).unwrap()] {
        let f = bent_surface(&mut r, &dom, 0.2);
        let h = smooth_field(&mut r, &dom, 1.0);
        let eps = [1e-2, 5e-3, 2.5e-3, 1.25e-3];
        let errs = variation_errors(&f, &h, &eps).unwrap();
        for (name, e) in ["g", "g_inv", "vol"].iter().zip(&errs) {
            let x: Vec<f64> = eps.iter().map(|v| v.ln()).collect();
            let y: Vec<f64> = e.iter().map(|v| v.ln()).collect();
            let (mx, my) = (x.iter().sum::<f64>() / 4.0, y.iter().sum::<f64>() / 4.0);
            let slope = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
                / x.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
            assert!((slope - 1.0).abs() < 0.1, "{name}: slope {slope}");
        }
    }
}
