//! Numerical laboratory for anisotropic curve shortening flow (ACSF).
//!
//! A family of convex plane curves moves by ACSF when each point travels in
//! the inward normal direction with speed `g(θ)·κ`, where `θ` is the tangent
//! angle, `κ` the curvature, and `g` a smooth strictly positive weight on the
//! circle. This crate builds the two classes of distinguished solutions that
//! exist for every such `g` — translators sweeping a slab, and compact
//! solutions glued from a pair of opposing translators — and measures the
//! quantitative structure they are known to satisfy: the linear area law, the
//! differential Harnack bound, slab confinement, reach and tip-curvature
//! bounds, and convergence of the glued family as its depth grows.
//!
//! Modules mirror the pipeline: [`anisotropy`] holds the weight `g` and its
//! integrals, [`translator`] constructs exact translating profiles by
//! quadrature, [`convexgeom`] provides hulls and support functions,
//! [`flow`] time-steps the PDE, [`ancient`] runs the glued construction and
//! its verification report, and [`suite`] bundles the acceptance checks.

pub mod ancient;
pub mod anisotropy;
pub mod convexgeom;
pub mod error;
pub mod flow;
pub mod quadrature;
pub mod suite;
pub mod translator;

pub use anisotropy::{AnisotropyFn, AnisotropyStats};
pub use convexgeom::{HullPolygon, SupportCurve};
pub use error::Error;
pub use flow::{FlowTrace, GraphState};
pub use translator::TranslatorProfile;
