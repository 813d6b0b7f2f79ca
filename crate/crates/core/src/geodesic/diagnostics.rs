//! Conserved quantities and monitoring values along a geodesic.

use serde::{Deserialize, Serialize};

use crate::geometry::InducedGeometry;
use crate::immersion::{FieldAlongF, Immersion};
use crate::linalg::{dot3, Vec3};
use crate::scalar::Real;
use crate::sobolev::{apply_p, OperatorConfig};

/// Momenta of a tangent vector `f_t` with `P f_t` given.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Momenta {
    /// `∫ P f_t vol(g)`.
    pub lin_mom: [f64; 3],
    /// `∫ (f^i (Pf_t)^j − f^j (Pf_t)^i) vol(g)` for `(i, j)` in
    /// [`angular_pairs`] order.
    pub ang_mom: Vec<f64>,
    /// L² norm of `g((P f_t)^⊤)` against `vol(g)`.
    pub reparam_mom_norm: f64,
    /// `‖P f_t‖_{L²(vol)}`, the scale for `reparam_mom_norm`.
    pub pf_norm: f64,
}

/// Coordinate planes carrying an angular momentum component.
pub fn angular_pairs(ambient: usize) -> &'static [(usize, usize)] {
    if ambient == 2 {
        &[(0, 1)]
    } else {
        &[(0, 1), (0, 2), (1, 2)]
    }
}

pub fn momenta<T: Real>(f: &Immersion<T>, geo: &InducedGeometry<T>, pf_t: &FieldAlongF<T>) -> Momenta {
    let mut lin = [0.0; 3];
    let pairs = angular_pairs(f.ambient_dim());
    let mut ang = vec![0.0; pairs.len()];
    let mut reparam = 0.0;
    let mut pf_sq = 0.0;
    let m = geo.dim();
    for k in 0..f.nodes() {
        let w = geo.mass[k].to_f64_lossy();
        let p: Vec3<f64> = pf_t.values[k].map(|x| x.to_f64_lossy());
        let x: Vec3<f64> = f.values()[k].map(|x| x.to_f64_lossy());
        for c in 0..3 {
            lin[c] += w * p[c];
        }
        for (a, &(i, j)) in ang.iter_mut().zip(pairs) {
            *a += w * (x[i] * p[j] - x[j] * p[i]);
        }
        let tang = geo.tangential_part(k, pf_t.values[k]);
        let mut g_tt = T::zero();
        for i in 0..m {
            for j in 0..m {
                g_tt = g_tt + geo.g[k][i][j] * tang[i] * tang[j];
            }
        }
        reparam += w * g_tt.to_f64_lossy();
        pf_sq += w * dot3(p, p);
    }
    Momenta {
        lin_mom: lin,
        ang_mom: ang,
        reparam_mom_norm: reparam.sqrt(),
        pf_norm: pf_sq.sqrt(),
    }
}

/// One row of monitoring output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub t: f64,
    pub dt: f64,
    pub energy: f64,
    #[serde(flatten)]
    pub momenta: Momenta,
    pub min_det_g: f64,
    pub vol: f64,
    /// `∫ |ḡ(ν, f_t)| vol(g)`: rate of swept-out area.
    pub normal_speed: f64,
    pub accepted: usize,
    pub rejected: usize,
    pub cg_iterations: usize,
}

impl Diagnostics {
    /// Evaluates all fields at a state. `energy` comes from the momentum
    /// representation, momenta from an explicit application of `P`.
    #[allow(clippy::too_many_arguments)]
    pub fn evaluate<T: Real>(
        cfg: &OperatorConfig,
        f: &Immersion<T>,
        geo: &InducedGeometry<T>,
        f_t: &FieldAlongF<T>,
        energy: T,
        t: f64,
        dt: f64,
    ) -> Self {
        let pf = apply_p(cfg, geo, f_t);
        let momenta = momenta(f, geo, &pf);
        let normal_speed = match geo.normal.as_deref() {
            Some(nu) => (0..f.nodes())
                .map(|k| geo.mass[k].to_f64_lossy() * dot3(nu[k], f_t.values[k]).to_f64_lossy().abs())
                .sum(),
            None => f64::NAN,
        };
        Diagnostics {
            t,
            dt,
            energy: energy.to_f64_lossy(),
            momenta,
            min_det_g: geo.min_det().to_f64_lossy(),
            vol: geo.volume().to_f64_lossy(),
            normal_speed,
            accepted: 0,
            rejected: 0,
            cg_iterations: 0,
        }
    }

    /// Column names in [`Diagnostics::csv_row`] order.
    pub fn csv_header(ambient: usize) -> Vec<String> {
        let mut cols: Vec<String> = ["t", "dt", "energy", "linMom_x", "linMom_y", "linMom_z"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        let names = ["x", "y", "z"];
        for &(i, j) in angular_pairs(ambient) {
            cols.push(format!("angMom_{}{}", names[i], names[j]));
        }
        for c in [
            "reparamMomNorm",
            "minDetG",
            "Vol",
            "normalSpeed",
            "accepted",
            "rejected",
            "cgIterations",
        ] {
            cols.push(c.to_string());
        }
        cols
    }

    pub fn csv_row(&self) -> Vec<String> {
        let mut row = vec![
            fmt(self.t),
            fmt(self.dt),
            fmt(self.energy),
            fmt(self.momenta.lin_mom[0]),
            fmt(self.momenta.lin_mom[1]),
            fmt(self.momenta.lin_mom[2]),
        ];
        row.extend(self.momenta.ang_mom.iter().map(|&x| fmt(x)));
        row.extend([
            fmt(self.momenta.reparam_mom_norm),
            fmt(self.min_det_g),
            fmt(self.vol),
            fmt(self.normal_speed),
            self.accepted.to_string(),
            self.rejected.to_string(),
            self.cg_iterations.to_string(),
        ]);
        row
    }
}

fn fmt(x: f64) -> String {
    format!("{x:?}")
}
