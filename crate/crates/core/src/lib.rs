//! Numerical laboratory for the three-phenotype oscillatory KPP system
//!
//! ```text
//! ∂t u − Δu = u + μ M u − (C u) ∘ u,   M = circ(−2, 1, 1),  C = circ(1, 8, 1)/10
//! ```
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] – reaction term, Jacobian and the circulant spectral algebra.
//! * [`bifurcation`] – Hopf eigenvalues, first Lyapunov coefficient, steady-state
//!   uniqueness, speed formulas and the instability criterion for general `L`, `C`.
//! * [`dynamics`] – ODE integration, limit cycles, the heteroclinic limit, Floquet
//!   analysis and the scalar travelling-wave profile.
//! * [`pde`] – the 1-D explicit finite-difference simulator and front/wave-train
//!   measurements.
//! * [`cli`] – the `kpp` command-line front end.

pub mod bifurcation;
pub mod cli;
pub mod dynamics;
pub mod error;
mod linalg;
pub mod model;
pub mod pde;

pub use error::{KppError, Result};
pub use model::{CirculantCoords, Circulant3, ModelParams, StateVec};
