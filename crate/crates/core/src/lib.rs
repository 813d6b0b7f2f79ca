//! Sobolev metrics `G^P`, `P = 1 + A Δ^p`, on immersed curves and surfaces
//! in flat Euclidean space.
//!
//! The crate discretizes the parameter manifold on structured grids,
//! builds the induced geometry, applies and inverts `P`, integrates the
//! geodesic equation in momentum form and provides closed-form oracles and
//! distance bounds for validation.
//!
//! Everything numerical is generic over [`Real`] (`f32` or `f64`); the
//! aliases at the crate root fix the scalar to `f64`.

// `!(x > 0)` rejects NaN as well; index loops mirror the tensor formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod cg;
pub mod domain;
pub mod error;
pub mod geodesic;
pub mod geometry;
pub mod immersion;
pub mod io;
pub mod laplace;
pub mod linalg;
pub mod oracles;
pub mod runner;
pub mod scalar;
pub mod sobolev;
pub mod spectral;
pub mod validation;

pub use domain::{Domain, DomainKind};
pub use error::{Result, ShapeError};
pub use scalar::Real;
pub use sobolev::OperatorConfig;

pub type Immersion = immersion::Immersion<f64>;
pub type FieldAlongF = immersion::FieldAlongF<f64>;
pub type TangentField = immersion::TangentField<f64>;
pub type InducedGeometry = geometry::InducedGeometry<f64>;
