//! Diffusionless dynamics: fixed-step integration, limit cycles and their
//! continuation toward the heteroclinic limit, Floquet analysis and the scalar
//! travelling-wave profile.

mod cycle;
mod floquet;
mod front;
mod heteroclinic;
mod integrate;

pub use cycle::{
    cycle_family, find_limit_cycle, find_limit_cycle_with, localization_band_violation, CycleFamily, CycleSettings,
    FamilyMember, LimitCycleRecord, Rotation,
};
pub use floquet::{floquet, FloquetReport};
pub use front::{scalar_front_profile, ScalarFrontProfile};
pub use heteroclinic::{hausdorff_distance, reference_cycle_c0, ReferenceCycle};
pub use integrate::{integrate, integrate_with, Scheme, Trajectory, NONNEGATIVITY_TOL};
