//! Fisher information metrics of parametric probability-density families,
//! and the reverse construction: density families built so that their Fisher
//! metric equals a prescribed Riemannian metric.
//!
//! The forward direction computes
//!
//! ```text
//! g_ab(θ) = ∫_X P(x;θ) ∂ₐln P(x;θ) ∂_b ln P(x;θ) dx
//! ```
//!
//! by deterministic adaptive quadrature, either directly, through the
//! additivity of spatially disjoint products, or through a change-of-variables
//! formula for families generated by a symmetry of the spatial domain.
//!
//! The reverse direction starts from an embedding `h: M → ℝⁿ` whose pullback
//! `JᵀJ` is the target metric and assembles a product of one-dimensional
//! location or scale families (or a squared orthonormal expansion) whose
//! Fisher metric reproduces it. A verification harness compares the two
//! sides on parameter grids and reports per-entry errors.
//!
//! Start with the `examples/` directory for runnable tours of each
//! capability, or the `verify` module's named demos for pinned end-to-end
//! pipelines.

pub mod cli;
pub mod construct;
pub mod domain;
pub mod embedding;
pub mod expr;
pub mod fisher;
pub mod quadrature;
pub mod verify;

pub use domain::{
    DensityFamily, DomainError, Interval, MetricField, MetricTensor, ParamPoint, ParametricDomain,
    ScalarMap, SpatialDomain,
};
pub use quadrature::{IntegrationResult, QuadratureError, QuadratureSpec};
