//! Curvature laboratory for oriented Riemannian and almost-Kähler
//! 4-manifolds.
//!
//! The crate evaluates the curvature operator of explicit 4-dimensional
//! metrics, splits it into its self-dual Weyl, anti-self-dual Weyl,
//! trace-free Ricci and scalar blocks, and verifies the pointwise and
//! integral identities that tie those blocks to the topology (Euler
//! characteristic, signature, Chern numbers) and to almost-Kähler
//! structure theory (star-scalar curvature, Weitzenböck formulas, the
//! Blair connection on the anti-canonical bundle).
//!
//! Everything numerical is generic over a scalar type implementing
//! [`Real`]; the aliases below fix `f64`, which is what the binary and the
//! test suite use.

// Indexed loops mirror the tensor index notation they implement;
// iterator rewrites of Σ_j a_{ij} b_{jk} kernels obscure the math.
#![allow(clippy::needless_range_loop)]
// `!(x > 0.0)` deliberately rejects NaN along with nonpositive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Jet division is defined as multiplication by the reciprocal jet.
#![allow(clippy::suspicious_arithmetic_impl)]

pub mod almost_kahler;
pub mod catalog;
pub mod charts;
pub mod cli;
pub mod error;
pub mod exact;
pub mod functionals;
pub mod geometry;
pub mod grid;
pub mod jet;
pub mod linalg;
pub mod real;
pub mod report;
pub mod sd_algebra;

pub use error::{Error, Result};
pub use real::{Real, Scalarlike};

/// Double-precision aliases for the generic core types; the binary and
/// the integration tests work with these.
pub type TwoForm64 = sd_algebra::TwoForm<f64>;
pub type SelfDualVector64 = sd_algebra::SelfDualVector<f64>;
pub type AntiSelfDualVector64 = sd_algebra::AntiSelfDualVector<f64>;
pub type WeylPlusOperator64 = sd_algebra::WeylPlusOperator<f64>;
pub type MetricDescription64 = geometry::MetricDescription<f64>;
pub type PointGeometry64 = geometry::PointGeometry<f64>;
pub type CurvatureBlocks64 = geometry::CurvatureBlocks<f64>;
pub type CompatibleJ64 = almost_kahler::CompatibleJ<f64>;
pub type AkPoint64 = almost_kahler::AkPoint<f64>;
pub type CatalogEntry64 = catalog::CatalogEntry<f64>;
pub type QuadratureScheme64 = functionals::QuadratureScheme<f64>;
