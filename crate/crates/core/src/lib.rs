//! Numerical laboratory for quasi-Fuchsian groups.
//!
//! The crate builds concrete Kleinian groups (a genus-2 Fuchsian octagon
//! group, its bending deformations and Möbius conjugates), enumerates their
//! orbits, samples the limit-set Jordan curve, computes the Riemann map onto
//! its interior with a slit-map zipper, and studies the quantized
//! differential `[F, Z]` of the boundary function: weak-Schatten decay,
//! Dixmier-trace estimates against the geometric (Patterson–Sullivan)
//! measure, and the supporting operator identities on small matrices.
//!
//! Modules follow the pipeline order: [`mobius`]/[`quaternion`] (matrix
//! arithmetic and the hyperbolic 3-space action), [`groups`]/[`orbit`]
//! (group catalog and orbit engine), [`boundary`] (limit-set sampling and
//! box-counting dimension), [`conformal`] (zipper Riemann map),
//! [`quantized`]/[`traces`]/[`covariance`] (operator core), [`measures`]
//! (geometric measure), [`doi`] (double-operator-integral identities), and
//! [`pipeline`] (end-to-end experiment driver used by the CLI).

pub mod boundary;
pub mod conformal;
pub mod covariance;
pub mod doi;
pub mod groups;
pub mod io;
pub mod linalg;
pub mod measures;
pub mod mobius;
pub mod orbit;
pub mod pipeline;
pub mod quantized;
pub mod quaternion;
pub mod traces;

pub use mobius::{ExtComplex, MobiusClass, MobiusElement};
pub use quaternion::{BallPoint, Quaternion};
