//! Structured grids on the parameter manifold and their finite-difference
//! stencils.
//!
//! Three parameter manifolds are supported: the periodic circle, the
//! periodic torus and the square with Dirichlet boundary. Nodes are stored
//! row-major with axis 0 varying fastest: `index = i + n0 * j`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ShapeError};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    Circle,
    Torus,
    DirichletSquare,
}

impl DomainKind {
    pub fn dim(self) -> usize {
        match self {
            DomainKind::Circle => 1,
            DomainKind::Torus | DomainKind::DirichletSquare => 2,
        }
    }

    pub fn is_periodic(self) -> bool {
        !matches!(self, DomainKind::DirichletSquare)
    }

    fn default_extent(self) -> f64 {
        match self {
            DomainKind::Circle | DomainKind::Torus => 2.0 * PI,
            DomainKind::DirichletSquare => PI,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    kind: DomainKind,
    resolution: [usize; 2],
    extent: [f64; 2],
}

impl Domain {
    /// Minimum grid count per axis.
    pub const MIN_RESOLUTION: usize = 4;

    pub fn new(kind: DomainKind, resolution: &[usize], extent: Option<&[f64]>) -> Result<Self> {
        let dim = kind.dim();
        if resolution.len() != dim {
            return Err(ShapeError::InvalidDomain(format!(
                "{kind:?} needs {dim} resolution entries, got {}",
                resolution.len()
            )));
        }
        if let Some(&n) = resolution.iter().find(|&&n| n < Self::MIN_RESOLUTION) {
            return Err(ShapeError::InvalidDomain(format!(
                "resolution {n} below minimum {}",
                Self::MIN_RESOLUTION
            )));
        }
        let mut ext = [kind.default_extent(); 2];
        if let Some(e) = extent {
            if e.len() != dim {
                return Err(ShapeError::InvalidDomain(format!(
                    "{kind:?} needs {dim} extent entries, got {}",
                    e.len()
                )));
            }
            for (k, &x) in e.iter().enumerate() {
                if !(x.is_finite() && x > 0.0) {
                    return Err(ShapeError::InvalidDomain(format!("extent {x} must be positive")));
                }
                ext[k] = x;
            }
        }
        let mut res = [1, 1];
        res[..dim].copy_from_slice(resolution);
        if dim == 1 {
            ext[1] = 1.0;
        }
        Ok(Domain {
            kind,
            resolution: res,
            extent: ext,
        })
    }

    pub fn circle(n: usize) -> Result<Self> {
        Self::new(DomainKind::Circle, &[n], None)
    }

    pub fn torus(n0: usize, n1: usize) -> Result<Self> {
        Self::new(DomainKind::Torus, &[n0, n1], None)
    }

    pub fn dirichlet_square(n0: usize, n1: usize) -> Result<Self> {
        Self::new(DomainKind::DirichletSquare, &[n0, n1], None)
    }

    pub fn kind(&self) -> DomainKind {
        self.kind
    }

    /// Dimension `m` of the parameter manifold.
    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    pub fn is_periodic(&self) -> bool {
        self.kind.is_periodic()
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution[..self.dim()]
    }

    pub fn extent(&self) -> &[f64] {
        &self.extent[..self.dim()]
    }

    pub fn count(&self, axis: usize) -> usize {
        self.resolution[axis]
    }

    pub fn nodes(&self) -> usize {
        self.resolution[0] * self.resolution[1]
    }

    /// Grid spacing along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        let n = self.resolution[axis] as f64;
        if self.is_periodic() {
            self.extent[axis] / n
        } else {
            self.extent[axis] / (n - 1.0)
        }
    }

    /// Parameter area of one grid cell (length on the circle).
    pub fn cell_measure(&self) -> f64 {
        (0..self.dim()).map(|a| self.spacing(a)).product()
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + self.resolution[0] * j
    }

    #[inline]
    pub fn coords(&self, idx: usize) -> (usize, usize) {
        (idx % self.resolution[0], idx / self.resolution[0])
    }

    /// Parameter coordinates of a node.
    pub fn param(&self, idx: usize) -> [f64; 2] {
        let (i, j) = self.coords(idx);
        [i as f64 * self.spacing(0), j as f64 * self.spacing(1)]
    }

    pub fn is_boundary(&self, idx: usize) -> bool {
        if self.is_periodic() {
            return false;
        }
        let (i, j) = self.coords(idx);
        i == 0 || j == 0 || i + 1 == self.resolution[0] || j + 1 == self.resolution[1]
    }

    /// Trapezoidal quadrature weight of a node in parameter measure.
    pub fn quad_weight(&self, idx: usize) -> f64 {
        let mut w = self.cell_measure();
        if !self.is_periodic() {
            let (i, j) = self.coords(idx);
            if i == 0 || i + 1 == self.resolution[0] {
                w *= 0.5;
            }
            if j == 0 || j + 1 == self.resolution[1] {
                w *= 0.5;
            }
        }
        w
    }

    /// Index of the node `offset` steps away along `axis` (periodic wrap).
    /// Returns `None` when stepping off a Dirichlet boundary.
    #[inline]
    pub fn neighbor(&self, idx: usize, axis: usize, offset: isize) -> Option<usize> {
        let (i, j) = self.coords(idx);
        let pos = if axis == 0 { i } else { j } as isize + offset;
        let n = self.resolution[axis] as isize;
        let p = if self.is_periodic() {
            pos.rem_euclid(n)
        } else if (0..n).contains(&pos) {
            pos
        } else {
            return None;
        } as usize;
        Some(if axis == 0 {
            self.index(p, j)
        } else {
            self.index(i, p)
        })
    }

    /// Iterator over nodes that carry unknowns (all nodes for periodic grids,
    /// interior nodes for the Dirichlet square).
    pub fn free_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes()).filter(move |&k| !self.is_boundary(k))
    }

    /// Grid cells as the node indices of their corners. In two dimensions
    /// the corners are ordered `(i,j), (i+1,j), (i,j+1), (i+1,j+1)`; on the
    /// circle a cell is an edge `(i, i+1)` and the last two entries repeat.
    pub fn cells(&self) -> Vec<[usize; 4]> {
        let n0 = self.resolution[0];
        let n1 = self.resolution[1];
        let periodic = self.is_periodic();
        if self.dim() == 1 {
            return (0..n0).map(|i| [i, (i + 1) % n0, i, (i + 1) % n0]).collect();
        }
        let (c0, c1) = if periodic { (n0, n1) } else { (n0 - 1, n1 - 1) };
        let mut out = Vec::with_capacity(c0 * c1);
        for j in 0..c1 {
            for i in 0..c0 {
                let ip = (i + 1) % n0;
                let jp = (j + 1) % n1;
                out.push([
                    self.index(i, j),
                    self.index(ip, j),
                    self.index(i, jp),
                    self.index(ip, jp),
                ]);
            }
        }
        out
    }
}

/// Centered first derivative along `axis`; one-sided second order at
/// Dirichlet boundaries.
pub fn diff1<T: Real, const D: usize>(dom: &Domain, data: &[[T; D]], axis: usize) -> Vec<[T; D]> {
    let h = T::lit(dom.spacing(axis));
    let two_h = h + h;
    let three = T::lit(3.0);
    let four = T::lit(4.0);
    let mut out = vec![[T::zero(); D]; data.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        match (dom.neighbor(idx, axis, -1), dom.neighbor(idx, axis, 1)) {
            (Some(m), Some(p)) => {
                for c in 0..D {
                    o[c] = (data[p][c] - data[m][c]) / two_h;
                }
            }
            (None, Some(p)) => {
                let pp = dom.neighbor(idx, axis, 2).expect("grid has at least 4 nodes");
                for c in 0..D {
                    o[c] = (-three * data[idx][c] + four * data[p][c] - data[pp][c]) / two_h;
                }
            }
            (Some(m), None) => {
                let mm = dom.neighbor(idx, axis, -2).expect("grid has at least 4 nodes");
                for c in 0..D {
                    o[c] = (three * data[idx][c] - four * data[m][c] + data[mm][c]) / two_h;
                }
            }
            (None, None) => unreachable!("axis with a single node"),
        }
    }
    out
}

/// Centered second derivative along `axis`; one-sided second order at
/// Dirichlet boundaries.
pub fn diff2<T: Real, const D: usize>(dom: &Domain, data: &[[T; D]], axis: usize) -> Vec<[T; D]> {
    let h = T::lit(dom.spacing(axis));
    let h2 = h * h;
    let two = T::lit(2.0);
    let four = T::lit(4.0);
    let five = T::lit(5.0);
    let mut out = vec![[T::zero(); D]; data.len()];
    for (idx, o) in out.iter_mut().enumerate() {
        match (dom.neighbor(idx, axis, -1), dom.neighbor(idx, axis, 1)) {
            (Some(m), Some(p)) => {
                for c in 0..D {
                    o[c] = (data[p][c] - two * data[idx][c] + data[m][c]) / h2;
                }
            }
            (None, Some(p1)) => {
                let p2 = dom.neighbor(idx, axis, 2).expect("grid has at least 4 nodes");
                let p3 = dom.neighbor(idx, axis, 3).expect("grid has at least 4 nodes");
                for c in 0..D {
                    o[c] = (two * data[idx][c] - five * data[p1][c] + four * data[p2][c]
                        - data[p3][c])
                        / h2;
                }
            }
            (Some(m1), None) => {
                let m2 = dom.neighbor(idx, axis, -2).expect("grid has at least 4 nodes");
                let m3 = dom.neighbor(idx, axis, -3).expect("grid has at least 4 nodes");
                for c in 0..D {
                    o[c] = (two * data[idx][c] - five * data[m1][c] + four * data[m2][c]
                        - data[m3][c])
                        / h2;
                }
            }
            (None, None) => unreachable!("axis with a single node"),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_follows_boundary_convention() {
        let t = Domain::torus(8, 16).unwrap();
        assert!((t.spacing(0) - 2.0 * PI / 8.0).abs() < 1e-15);
        let d = Domain::dirichlet_square(11, 11).unwrap();
        assert!((d.spacing(1) - PI / 10.0).abs() < 1e-15);
        assert_eq!(Domain::circle(32).unwrap().nodes(), 32);
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(Domain::circle(3).is_err());
        assert!(Domain::new(DomainKind::Torus, &[8], None).is_err());
        assert!(Domain::new(DomainKind::Circle, &[8], Some(&[-1.0])).is_err());
    }

    #[test]
    fn trapezoid_weights_sum_to_area() {
        let d = Domain::dirichlet_square(9, 13).unwrap();
        let s: f64 = (0..d.nodes()).map(|k| d.quad_weight(k)).sum();
        assert!((s - PI * PI).abs() < 1e-12);
        let t = Domain::torus(6, 5).unwrap();
        let s: f64 = (0..t.nodes()).map(|k| t.quad_weight(k)).sum();
        assert!((s - 4.0 * PI * PI).abs() < 1e-12);
    }

    #[test]
    fn neighbors_wrap_or_stop() {
        let t = Domain::torus(5, 4).unwrap();
        assert_eq!(t.neighbor(t.index(0, 0), 0, -1), Some(t.index(4, 0)));
        assert_eq!(t.neighbor(t.index(2, 3), 1, 1), Some(t.index(2, 0)));
        let d = Domain::dirichlet_square(5, 5).unwrap();
        assert_eq!(d.neighbor(d.index(0, 2), 0, -1), None);
        assert!(d.is_boundary(d.index(4, 1)));
        assert!(!d.is_boundary(d.index(1, 1)));
        assert_eq!(d.free_nodes().count(), 9);
        assert_eq!(d.cells().len(), 16);
        assert_eq!(t.cells().len(), 20);
    }

    #[test]
    fn stencils_are_exact_on_quadratics() {
        let d = Domain::dirichlet_square(7, 6).unwrap();
        let data: Vec<[f64; 1]> = (0..d.nodes())
            .map(|k| {
                let [u, v] = d.param(k);
                [u * u + 3.0 * u * v - v]
            })
            .collect();
        let du = diff1(&d, &data, 0);
        let dvv = diff2(&d, &data, 1);
        let duu = diff2(&d, &data, 0);
        for k in 0..d.nodes() {
            let [u, v] = d.param(k);
            assert!((du[k][0] - (2.0 * u + 3.0 * v)).abs() < 1e-12);
            assert!(dvv[k][0].abs() < 1e-10);
            assert!((duu[k][0] - 2.0).abs() < 1e-10);
        }
    }
}
