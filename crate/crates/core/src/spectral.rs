//! Constant-coefficient spectral inverse used to precondition the Sobolev
//! solves. Periodic axes use the FFT, Dirichlet axes the type-I sine
//! transform on interior nodes. All transforms run in `f64`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::domain::Domain;
use crate::scalar::Real;

/// Forward and inverse plans of one length.
type PlanPair = (Arc<dyn Fft<f64>>, Arc<dyn Fft<f64>>);

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, PlanPair>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn plans(n: usize) -> PlanPair {
    PLANS.with(|p| {
        let mut p = p.borrow_mut();
        let (planner, cache) = &mut *p;
        if let Some(pair) = cache.get(&n) {
            return pair.clone();
        }
        let pair = (planner.plan_fft_forward(n), planner.plan_fft_inverse(n));
        cache.insert(n, pair.clone());
        pair
    })
}

/// One axis of the transform: either periodic over `n` nodes or a sine
/// transform over `n` interior nodes.
#[derive(Clone, Copy, Debug)]
struct Axis {
    n: usize,
    periodic: bool,
    spacing: f64,
}

impl Axis {
    fn eigenvalues(&self) -> Vec<f64> {
        let s = 4.0 / (self.spacing * self.spacing);
        (0..self.n)
            .map(|k| {
                let arg = if self.periodic {
                    std::f64::consts::PI * k as f64 / self.n as f64
                } else {
                    std::f64::consts::PI * (k + 1) as f64 / (2.0 * (self.n + 1) as f64)
                };
                s * arg.sin().powi(2)
            })
            .collect()
    }

    /// Forward transform of a strided line, in place.
    fn forward(&self, line: &mut [Complex64]) {
        if self.periodic {
            plans(self.n).0.process(line);
        } else {
            self.dst(line);
        }
    }

    /// Inverse transform (normalised) of a strided line, in place.
    fn inverse(&self, line: &mut [Complex64]) {
        if self.periodic {
            plans(self.n).1.process(line);
            let s = 1.0 / self.n as f64;
            line.iter_mut().for_each(|z| *z *= s);
        } else {
            self.dst(line);
            let s = 2.0 / (self.n + 1) as f64;
            line.iter_mut().for_each(|z| *z *= s);
        }
    }

    /// Unnormalised DST-I via an odd extension of length `2(n+1)`. Real and
    /// imaginary parts are transformed independently.
    fn dst(&self, line: &mut [Complex64]) {
        let n = self.n;
        let len = 2 * (n + 1);
        let fft = plans(len).0;
        for part in 0..2 {
            let mut ext = vec![Complex64::new(0.0, 0.0); len];
            for j in 0..n {
                let x = if part == 0 { line[j].re } else { line[j].im };
                ext[j + 1] = Complex64::new(x, 0.0);
                ext[len - 1 - j] = Complex64::new(-x, 0.0);
            }
            fft.process(&mut ext);
            for k in 0..n {
                let y = -ext[k + 1].im / 2.0;
                if part == 0 {
                    line[k].re = y;
                } else {
                    line[k].im = y;
                }
            }
        }
    }
}

/// Diagonal-in-frequency approximation of a symmetric operator on the free
/// nodes of a domain.
#[derive(Clone, Debug)]
pub struct SpectralInverse {
    domain: Domain,
    axes: Vec<Axis>,
    /// Reciprocal symbol on the frequency grid.
    inv_symbol: Vec<f64>,
}

impl SpectralInverse {
    /// Builds the inverse of `cell * (mbar + a * lam^p / mbar^(p-1))` where
    /// `lam = k00 * lam_u + k11 * lam_v` ranges over the grid Laplacian
    /// eigenvalues.
    pub fn sobolev(domain: &Domain, mbar: f64, kbar: [f64; 2], a: f64, p: u32) -> Self {
        let axes: Vec<Axis> = (0..domain.dim())
            .map(|ax| Axis {
                n: if domain.is_periodic() {
                    domain.count(ax)
                } else {
                    domain.count(ax) - 2
                },
                periodic: domain.is_periodic(),
                spacing: domain.spacing(ax),
            })
            .collect();
        let cell = domain.cell_measure();
        let ev: Vec<Vec<f64>> = axes.iter().map(|a| a.eigenvalues()).collect();
        let n1 = if axes.len() == 2 { axes[1].n } else { 1 };
        let mut inv_symbol = Vec::with_capacity(axes[0].n * n1);
        for j in 0..n1 {
            for i in 0..axes[0].n {
                let mut lam = kbar[0] * ev[0][i];
                if axes.len() == 2 {
                    lam += kbar[1] * ev[1][j];
                }
                let sym = cell * (mbar + a * lam.powi(p as i32) / mbar.powi(p as i32 - 1));
                inv_symbol.push(1.0 / sym);
            }
        }
        SpectralInverse {
            domain: domain.clone(),
            axes,
            inv_symbol,
        }
    }

    /// Applies the approximate inverse to one scalar component given on all
    /// grid nodes; Dirichlet boundary entries are ignored and returned as zero.
    pub fn apply_scalar(&self, x: &[f64]) -> Vec<f64> {
        let dom = &self.domain;
        let n0 = self.axes[0].n;
        let n1 = if self.axes.len() == 2 { self.axes[1].n } else { 1 };
        let off = if dom.is_periodic() { 0 } else { 1 };
        let mut buf = vec![Complex64::new(0.0, 0.0); n0 * n1];
        for j in 0..n1 {
            for i in 0..n0 {
                let idx = if self.axes.len() == 2 {
                    dom.index(i + off, j + off)
                } else {
                    dom.index(i + off, 0)
                };
                buf[i + n0 * j] = Complex64::new(x[idx], 0.0);
            }
        }
        self.transform(&mut buf, n0, n1, true);
        for (z, s) in buf.iter_mut().zip(&self.inv_symbol) {
            *z *= *s;
        }
        self.transform(&mut buf, n0, n1, false);
        let mut out = vec![0.0; dom.nodes()];
        for j in 0..n1 {
            for i in 0..n0 {
                let idx = if self.axes.len() == 2 {
                    dom.index(i + off, j + off)
                } else {
                    dom.index(i + off, 0)
                };
                out[idx] = buf[i + n0 * j].re;
            }
        }
        out
    }

    fn transform(&self, buf: &mut [Complex64], n0: usize, n1: usize, forward: bool) {
        let run = |axis: &Axis, line: &mut [Complex64]| {
            if forward {
                axis.forward(line)
            } else {
                axis.inverse(line)
            }
        };
        for row in buf.chunks_mut(n0) {
            run(&self.axes[0], row);
        }
        if self.axes.len() == 2 {
            let mut col = vec![Complex64::new(0.0, 0.0); n1];
            for i in 0..n0 {
                for j in 0..n1 {
                    col[j] = buf[i + n0 * j];
                }
                run(&self.axes[1], &mut col);
                for j in 0..n1 {
                    buf[i + n0 * j] = col[j];
                }
            }
        }
    }

    /// Applies the inverse to each component of a `D`-component field.
    pub fn apply<T: Real, const D: usize>(&self, x: &[[T; D]]) -> Vec<[T; D]> {
        let mut out = vec![[T::zero(); D]; x.len()];
        for c in 0..D {
            let comp: Vec<f64> = x.iter().map(|v| v[c].to_f64_lossy()).collect();
            let y = self.apply_scalar(&comp);
            for (o, v) in out.iter_mut().zip(y) {
                o[c] = T::lit(v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::build_geometry;
    use crate::immersion::Immersion;
    use crate::laplace::stiffness_apply;

    #[test]
    fn exact_on_flat_dirichlet() {
        let domain = Domain::dirichlet_square(9, 12).unwrap();
        let f = Immersion::<f64>::flat_sheet(domain.clone()).unwrap();
        let geo = build_geometry(&f).unwrap();
        let pre = SpectralInverse::sobolev(&domain, 1.0, [1.0, 1.0], 0.7, 1);
        let x: Vec<[f64; 1]> = (0..domain.nodes())
            .map(|k| {
                if domain.is_boundary(k) {
                    [0.0]
                } else {
                    [((k * 7919) % 13) as f64 - 6.0]
                }
            })
            .collect();
        let lx = stiffness_apply(&geo, &x);
        let kx: Vec<[f64; 1]> = (0..domain.nodes())
            .map(|k| [geo.mass[k] * x[k][0] + 0.7 * lx[k][0]])
            .collect();
        let y = pre.apply(&kx);
        for k in 0..domain.nodes() {
            assert!((y[k][0] - x[k][0]).abs() < 1e-10, "{k}: {} vs {}", y[k][0], x[k][0]);
        }
    }

    #[test]
    fn exact_on_round_circle_with_p2() {
        let r = 1.5;
        let domain = Domain::circle(32).unwrap();
        let f = Immersion::<f64>::circle(domain.clone(), r, [0.0, 0.0]).unwrap();
        let geo = build_geometry(&f).unwrap();
        let mbar = geo.vol_density[0];
        let k00 = geo.stiffness[0][0][0];
        let pre = SpectralInverse::sobolev(&domain, mbar, [k00, 0.0], 2.0, 2);
        let x: Vec<[f64; 1]> = (0..32).map(|k| [((k * 31) % 7) as f64]).collect();
        let lx = stiffness_apply(&geo, &x);
        let mlx: Vec<[f64; 1]> = lx.iter().zip(&geo.mass).map(|(v, m)| [v[0] / m]).collect();
        let llx = stiffness_apply(&geo, &mlx);
        let kx: Vec<[f64; 1]> = (0..32).map(|k| [geo.mass[k] * x[k][0] + 2.0 * llx[k][0]]).collect();
        let y = pre.apply(&kx);
        for k in 0..32 {
            assert!((y[k][0] - x[k][0]).abs() < 1e-9);
        }
    }

    #[test]
    fn torus_fourier_mode_is_eigenvector() {
        let domain = Domain::torus(8, 6).unwrap();
        let pre = SpectralInverse::sobolev(&domain, 1.0, [1.0, 1.0], 1.0, 1);
        let (hu, hv) = (domain.spacing(0), domain.spacing(1));
        let (ku, kv) = (3.0, 1.0);
        let x: Vec<f64> = (0..domain.nodes())
            .map(|k| {
                let (i, j) = domain.coords(k);
                (2.0 * std::f64::consts::PI * (ku * i as f64 / 8.0 + kv * j as f64 / 6.0)).cos()
            })
            .collect();
        let lam = 4.0 / (hu * hu) * (std::f64::consts::PI * ku / 8.0).sin().powi(2)
            + 4.0 / (hv * hv) * (std::f64::consts::PI * kv / 6.0).sin().powi(2);
        let y = pre.apply_scalar(&x);
        let scale = 1.0 / (hu * hv * (1.0 + lam));
        for k in 0..domain.nodes() {
            assert!((y[k] - scale * x[k]).abs() < 1e-12);
        }
    }
}
