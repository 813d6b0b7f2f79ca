//! Closed-form oracles and distance bounds.

pub mod bounds;
pub mod quadrature;
pub mod scaling;
pub mod sphere;

pub use bounds::{
    area_swept_bound_check, c2_squared, path_length, samples_from, sqrt_vol_lipschitz_check, BoundReport,
    PathSample,
};
pub use scaling::{scaling_moments, scaling_translation_cost, ScalingCost, ScalingMoments};
pub use sphere::{
    completeness_probe, sphere_ode_solve, sphere_ode_step, sphere_path_length, CompletenessProbe, SphereSample,
    SphereState,
};
