//! Exact rational toolkit for cut-generating lattice-free sets in the plane.
//!
//! Everything here works over arbitrary-precision rationals: two-row corner
//! relaxations `f + sum_j r^j s_j in Z^2, s >= 0` are described by a rational
//! point `f` and rational ray directions `r^j`, and the library enumerates
//! the finitely many candidate inequalities `gamma . s >= 1` derived from
//! lattice-free splits, triangles and quadrilaterals, then filters them into
//! the facets of the mixed integer hull and of the triangle closure.
//!
//! Modules:
//! - [`rat`], [`geom`], [`linalg`], [`lp`]: exact scalar/vector arithmetic,
//!   dense rational linear solves and an exact simplex (Bland's rule).
//! - [`cone`]: integer hulls of two-dimensional affine cones.
//! - [`body`]: lattice-free bodies `M(B)`, their gauge values and the
//!   split/triangle/quadrilateral classification.
//! - [`tilt`]: tilting spaces of a body, facet tilts and the exact
//!   reconstruction of triangles/quadrilaterals from corner rays and
//!   boundary integer points.
//! - [`instance`], [`candidates`]: corner-relaxation instances and the
//!   polynomial candidate families.
//! - [`closure`]: extreme-point filtering, mixed integer hull facets and
//!   triangle closure facets.
//! - [`oracle`]: independent brute-force enumeration used to cross-check
//!   every other module.

pub mod body;
pub mod candidates;
pub mod closure;
pub mod cone;
pub mod error;
pub mod geom;
pub mod instance;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod rat;
pub mod tilt;

pub use error::Error;
pub use rat::Rat;

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
