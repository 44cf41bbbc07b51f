//! Conformal modulus of quadrilaterals.
//!
//! A quadrilateral is a Jordan domain with four marked boundary points
//! `z1, z2, z3, z4` in positive order. Its modulus is the Dirichlet energy of
//! the harmonic function that vanishes on the arc `z2 z3`, equals one on
//! `z4 z1` and has zero normal derivative on the other two arcs.
//!
//! * [`specfun`]: Gauss hypergeometric function, complete elliptic integrals,
//!   the function `μ_a` and its inverse.
//! * [`exact`]: closed-form moduli used as references.
//! * [`geometry`]: polygonal quadrilaterals and the test families.
//! * [`mesh`]: quality triangulation and newest-vertex bisection.
//! * [`fem`]: P1 finite elements and the adaptive modulus driver.
//!
//! Everything numerical is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix the scalar type.

pub mod error;
pub mod exact;
pub mod fem;
pub mod geometry;
pub mod mesh;
pub mod scalar;
pub mod specfun;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Point64 = geometry::Point<f64>;
pub type PolygonQuad64 = geometry::PolygonQuad<f64>;
pub type TriMesh64 = mesh::TriMesh<f64>;
pub type SparseSystem64 = fem::SparseSystem<f64>;
pub type ModulusResult64 = fem::ModulusResult<f64>;
pub type EllipticModulusPair64 = specfun::EllipticModulusPair<f64>;

pub type Point32 = geometry::Point<f32>;
pub type PolygonQuad32 = geometry::PolygonQuad<f32>;
pub type TriMesh32 = mesh::TriMesh<f32>;
pub type SparseSystem32 = fem::SparseSystem<f32>;
pub type ModulusResult32 = fem::ModulusResult<f32>;
pub type EllipticModulusPair32 = specfun::EllipticModulusPair<f32>;
