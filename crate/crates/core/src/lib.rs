//! Lagrangian descriptors for the detection of normally hyperbolic invariant
//! manifolds (NHIMs) and their stable and unstable manifolds in linear
//! saddle x center [x center] Hamiltonian systems.
//!
//! The crate is organised in four layers:
//!
//! * [`dynamics`]: the four benchmark quadratic Hamiltonians, their analytic
//!   flows and the symplectic transforms that couple them.
//! * [`ld`]: the descriptor itself, evaluated either by augmented RK4
//!   integration or by quadrature of the closed-form flow, plus the
//!   large-time asymptotics.
//! * [`sections`]: the catalog of isoenergetic two-dimensional surfaces and
//!   descriptor fields evaluated over grids on them.
//! * [`features`]: closed-form NHIM / manifold intersections with each
//!   surface, minimum and ridge detection on grids, and matching.
//!
//! [`pipeline`] glues the last two together for whole-section verification.

pub mod dynamics;
pub mod error;
pub mod features;
pub mod ld;
pub mod pipeline;
pub mod sections;

pub use dynamics::symplectic::{check_symplectic, SymplecticMatrix};
pub use dynamics::{HyperbolicConstants, ModelKind, ModelParams, PhasePoint, SystemModel};
pub use error::{Error, Result};
pub use ld::{LDMethod, LDParams, LDResult};
