//! Numerical toolkit for constant-mean-curvature annuli in the round
//! 3-sphere and hyperbolic 3-space.
//!
//! The crate builds conformal CMC immersions foliated by spherical curvature
//! lines from a three-parameter family of sinh-Gordon seed data, locates the
//! parameters at which compact pieces become free-boundary (or capillary)
//! annuli in a geodesic ball, and certifies the resulting surfaces: boundary
//! sphere fit, contact angle, containment, symmetry group and embeddedness.
//!
//! Module layout mirrors the pipeline:
//!
//! * [`spaceform`] — ambient quadric geometry of `M^3(eps)` in `R^4`.
//! * [`sinh_system`] — seed parameters, the Hamiltonian `(y, z)` system,
//!   profile `X(v)`, half-period `sigma`, and the field `rho(u, v)`.
//! * [`frame`] — Gauss–Weingarten frame integration, center curve,
//!   symmetry planes, rebasing.
//! * [`period`] — the period map and its level-set solvers.
//! * [`rotational`] — Delaunay-type rotational surfaces and their
//!   free-boundary data.
//! * [`search`] — level sweeps, continuation of annulus families,
//!   assembly and certification.
//! * [`mesh`] — triangulation, self-intersection tests, OBJ/PLY export.

pub mod error;
pub mod mesh;
pub mod ode;
pub mod quad;
pub mod roots;

pub mod frame;
pub mod period;
pub mod rotational;
pub mod search;
pub mod sinh_system;
pub mod spaceform;

pub use error::{Error, Result};
pub use spaceform::{Ambient, Vec4};
