//! Horizontal geodesics in momentum form: state `(f, b)` with
//! `P f_t = (b / sqrt det g) ν`, advanced by explicit RK4.

pub mod diagnostics;
pub mod integrate;
pub mod lift;
pub mod rhs;
pub mod state;

pub use diagnostics::{angular_pairs, momenta, Diagnostics, Momenta};
pub use integrate::{integrate, Frame, TimeConfig, Trajectory};
pub use lift::{horizontal_lift, reparam_norms, Lift};
pub use rhs::{momentum_rhs_general, momentum_rhs_h1, velocity_from_momentum};
pub use state::{step, GeodesicState, RhsForm, StepInfo};
