//! Grid-sampled immersions and fields along them.

use crate::domain::{Domain, DomainKind};
use crate::error::{Result, ShapeError};
use crate::linalg::{dot3, zero3, Vec2, Vec3};
use crate::scalar::Real;

/// A map `f: M -> R^n` sampled on the nodes of a [`Domain`].
#[derive(Clone, Debug, PartialEq)]
pub struct Immersion<T: Real> {
    domain: Domain,
    ambient: usize,
    values: Vec<Vec3<T>>,
}

impl<T: Real> Immersion<T> {
    pub fn new(domain: Domain, ambient: usize, values: Vec<Vec3<T>>) -> Result<Self> {
        if !(2..=3).contains(&ambient) {
            return Err(ShapeError::InvalidImmersion(format!(
                "ambient dimension {ambient} not in {{2, 3}}"
            )));
        }
        if ambient <= domain.dim() {
            return Err(ShapeError::InvalidImmersion(format!(
                "ambient dimension {ambient} must exceed dim M = {}",
                domain.dim()
            )));
        }
        if values.len() != domain.nodes() {
            return Err(ShapeError::ShapeMismatch {
                expected: domain.nodes(),
                actual: values.len(),
            });
        }
        if values.iter().flatten().any(|x| !x.is_finite()) {
            return Err(ShapeError::InvalidImmersion("non-finite coordinate".into()));
        }
        let mut values = values;
        if ambient == 2 {
            for p in &mut values {
                p[2] = T::zero();
            }
        }
        Ok(Immersion {
            domain,
            ambient,
            values,
        })
    }

    /// Samples `map` at every node's parameter coordinates.
    pub fn from_fn(domain: Domain, ambient: usize, map: impl Fn(f64, f64) -> [f64; 3]) -> Result<Self> {
        let values = (0..domain.nodes())
            .map(|k| {
                let [u, v] = domain.param(k);
                map(u, v).map(T::lit)
            })
            .collect();
        Self::new(domain, ambient, values)
    }

    /// The identity embedding `(u, v) -> (u, v, 0)`.
    pub fn flat_sheet(domain: Domain) -> Result<Self> {
        Self::graph(domain, |_, _| 0.0)
    }

    /// Graph surface `(u, v) -> (u, v, phi(u, v))`.
    pub fn graph(domain: Domain, phi: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if domain.kind() != DomainKind::DirichletSquare {
            return Err(ShapeError::InvalidImmersion(
                "graph surfaces need the dirichlet-square domain".into(),
            ));
        }
        Self::from_fn(domain, 3, |u, v| [u, v, phi(u, v)])
    }

    /// Counter-clockwise circle of radius `r` about `center`.
    pub fn circle(domain: Domain, r: f64, center: [f64; 2]) -> Result<Self> {
        if domain.kind() != DomainKind::Circle {
            return Err(ShapeError::InvalidImmersion("circle needs the circle domain".into()));
        }
        let scale = std::f64::consts::TAU / domain.extent()[0];
        Self::from_fn(domain, 2, |u, _| {
            let th = u * scale;
            [center[0] + r * th.cos(), center[1] + r * th.sin(), 0.0]
        })
    }

    /// Torus of revolution with tube radius `rho` around a circle of radius `big_r`.
    pub fn torus(domain: Domain, big_r: f64, rho: f64) -> Result<Self> {
        if domain.kind() != DomainKind::Torus {
            return Err(ShapeError::InvalidImmersion("torus needs the torus domain".into()));
        }
        if !(big_r > rho && rho > 0.0) {
            return Err(ShapeError::InvalidImmersion(format!(
                "torus radii need R > rho > 0, got R = {big_r}, rho = {rho}"
            )));
        }
        let su = std::f64::consts::TAU / domain.extent()[0];
        let sv = std::f64::consts::TAU / domain.extent()[1];
        Self::from_fn(domain, 3, |u, v| {
            let (u, v) = (u * su, v * sv);
            let w = big_r + rho * v.cos();
            [w * u.cos(), w * u.sin(), rho * v.sin()]
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn values(&self) -> &[Vec3<T>] {
        &self.values
    }

    pub fn nodes(&self) -> usize {
        self.values.len()
    }

    pub fn is_hypersurface(&self) -> bool {
        self.ambient == self.domain.dim() + 1
    }

    /// Returns `f + s * h`.
    pub fn displaced(&self, s: T, h: &FieldAlongF<T>) -> Result<Self> {
        self.check_field(h)?;
        let values = self
            .values
            .iter()
            .zip(&h.values)
            .map(|(p, d)| crate::linalg::axpy3(*p, s, *d))
            .collect();
        Self::new(self.domain.clone(), self.ambient, values)
    }

    pub fn check_field(&self, h: &FieldAlongF<T>) -> Result<()> {
        if h.len() != self.nodes() {
            return Err(ShapeError::ShapeMismatch {
                expected: self.nodes(),
                actual: h.len(),
            });
        }
        Ok(())
    }

    /// Converts to another scalar type.
    pub fn cast<U: Real>(&self) -> Immersion<U> {
        Immersion {
            domain: self.domain.clone(),
            ambient: self.ambient,
            values: self.values.iter().map(|p| p.map(|x| U::lit(x.to_f64_lossy()))).collect(),
        }
    }
}

/// Ambient vector field `h` along an immersion (a tangent vector to `Imm`).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct FieldAlongF<T: Real> {
    pub values: Vec<Vec3<T>>,
}

impl<T: Real> FieldAlongF<T> {
    pub fn zeros(nodes: usize) -> Self {
        FieldAlongF {
            values: vec![zero3(); nodes],
        }
    }

    pub fn from_values(values: Vec<Vec3<T>>) -> Self {
        FieldAlongF { values }
    }

    pub fn constant(nodes: usize, c: Vec3<T>) -> Self {
        FieldAlongF {
            values: vec![c; nodes],
        }
    }

    /// Samples `map` at node parameters.
    pub fn from_fn(domain: &Domain, map: impl Fn(f64, f64) -> [f64; 3]) -> Self {
        FieldAlongF {
            values: (0..domain.nodes())
                .map(|k| {
                    let [u, v] = domain.param(k);
                    map(u, v).map(T::lit)
                })
                .collect(),
        }
    }

    /// Scalar field times a per-node vector field, `phi * nu`.
    pub fn scaled_vectors(phi: &[T], vectors: &[Vec3<T>]) -> Self {
        FieldAlongF {
            values: phi
                .iter()
                .zip(vectors)
                .map(|(&s, v)| crate::linalg::scale3(s, *v))
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `self + s * other`
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        FieldAlongF {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| crate::linalg::axpy3(*a, s, *b))
                .collect(),
        }
    }

    pub fn scale(&self, s: T) -> Self {
        FieldAlongF {
            values: self.values.iter().map(|a| crate::linalg::scale3(s, *a)).collect(),
        }
    }

    /// Pointwise ambient inner product.
    pub fn pointwise_dot(&self, other: &Self) -> Vec<T> {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| dot3(*a, *b))
            .collect()
    }

    /// Sets Dirichlet boundary values to zero.
    pub fn zero_boundary(&mut self, domain: &Domain) {
        if !domain.is_periodic() {
            for (k, v) in self.values.iter_mut().enumerate() {
                if domain.is_boundary(k) {
                    *v = zero3();
                }
            }
        }
    }

    pub fn max_abs(&self) -> T {
        self.values
            .iter()
            .flatten()
            .fold(T::zero(), |m, x| m.max(x.abs()))
    }
}

/// Vector field `X` on the parameter manifold (components in the coordinate
/// frame; only the first `m` entries are used).
#[derive(Clone, Debug, PartialEq, Default)]
pub struct TangentField<T: Real> {
    pub values: Vec<Vec2<T>>,
}

impl<T: Real> TangentField<T> {
    pub fn zeros(nodes: usize) -> Self {
        TangentField {
            values: vec![[T::zero(); 2]; nodes],
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}
