//! Grid-based verification of constructed families against target metric
//! fields, plus a set of named end-to-end demos with pinned grids and
//! tolerances.
//!
//! A verification run computes the Fisher metric of a family at every grid
//! point (decomposed engine for products, direct engine otherwise), compares
//! it entrywise against the target field, and reports per-point and summary
//! errors. Grid points are evaluated in parallel; the report is assembled in
//! grid order, so identical invocations produce identical reports.

use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::construct::{
    gaussian_construction, mixed_construction, orthonormal_construction, sech_construction,
    BasePdf, ComponentMode, ConstructError, DisjointProductFamily, OrthonormalBasis,
};
use crate::domain::{
    DensityFamily, DomainError, MetricField, MetricTensor, ParamPoint, ParametricDomain, ScalarMap,
};
use crate::embedding::{self, EmbeddingError};
use crate::fisher::{
    fisher_metric_decomposed, fisher_metric_direct, fisher_metric_symmetry, DiffeoFamily,
    FisherError, MetricComputation,
};
use crate::quadrature::{IntegrationResult, QuadratureSpec};

/// The demo names accepted by [`run_demo`].
pub const DEMO_NAMES: [&str; 8] = [
    "normal",
    "cauchy",
    "sech-location",
    "sphere-gaussian",
    "sphere-sech",
    "hyperbolic-mixed",
    "circle-orthonormal",
    "symmetry-crosscheck",
];

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("unknown demo `{name}`; valid names: {}", DEMO_NAMES.join(", "))]
    UnknownDemo { name: String },
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },
    #[error("grid is empty after exclusions")]
    EmptyGrid,
    #[error("grid point {theta:?} lies outside the family's parametric domain")]
    GridPointOutsideDomain { theta: Vec<f64> },
    #[error(
        "family parameter dimension {family_dim} does not match the target field's {target_dim}"
    )]
    ParamsMismatch {
        family_dim: usize,
        target_dim: usize,
    },
    #[error("metric computation failed at θ = {theta:?}: {source}")]
    Engine {
        theta: Vec<f64>,
        #[source]
        source: FisherError,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Embedding(#[from] EmbeddingError),
    #[error(transparent)]
    Fisher(#[from] FisherError),
}

/// One linearly spaced grid axis, endpoints included.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct AxisSpec {
    pub start: f64,
    pub end: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn new(start: f64, end: f64, count: usize) -> Self {
        Self { start, end, count }
    }

    fn points(&self) -> Vec<f64> {
        let n = self.count;
        (0..n)
            .map(|i| self.start + (self.end - self.start) * i as f64 / (n - 1) as f64)
            .collect()
    }
}

type ExclusionFn = Arc<dyn Fn(&ParamPoint) -> bool + Send + Sync>;

/// A parameter grid: either the tensor product of linear axes or an explicit
/// point list, optionally filtered by exclusion predicates (a predicate
/// returning true drops the point).
#[derive(Clone)]
pub struct VerificationGrid {
    axes: Option<Vec<AxisSpec>>,
    explicit: Option<Vec<ParamPoint>>,
    exclusions: Vec<ExclusionFn>,
}

impl fmt::Debug for VerificationGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("VerificationGrid")
            .field("axes", &self.axes)
            .field("explicit", &self.explicit.as_ref().map(|p| p.len()))
            .field("exclusions", &self.exclusions.len())
            .finish()
    }
}

impl VerificationGrid {
    pub fn from_axes(axes: Vec<AxisSpec>) -> Result<Self, VerifyError> {
        if axes.is_empty() {
            return Err(VerifyError::InvalidGrid {
                reason: "no axes given".to_string(),
            });
        }
        for (i, axis) in axes.iter().enumerate() {
            if axis.count < 2 {
                return Err(VerifyError::InvalidGrid {
                    reason: format!("axis {i} needs at least 2 points, got {}", axis.count),
                });
            }
            if !axis.start.is_finite() || !axis.end.is_finite() || axis.start >= axis.end {
                return Err(VerifyError::InvalidGrid {
                    reason: format!("axis {i} has invalid range ({}, {})", axis.start, axis.end),
                });
            }
        }
        Ok(Self {
            axes: Some(axes),
            explicit: None,
            exclusions: Vec::new(),
        })
    }

    pub fn explicit(points: Vec<ParamPoint>) -> Result<Self, VerifyError> {
        if points.is_empty() {
            return Err(VerifyError::EmptyGrid);
        }
        Ok(Self {
            axes: None,
            explicit: Some(points),
            exclusions: Vec::new(),
        })
    }

    pub fn with_exclusion<F>(mut self, predicate: F) -> Self
    where
        F: Fn(&ParamPoint) -> bool + Send + Sync + 'static,
    {
        self.exclusions.push(Arc::new(predicate));
        self
    }

    pub fn dim(&self) -> usize {
        match (&self.axes, &self.explicit) {
            (Some(axes), _) => axes.len(),
            (None, Some(points)) => points[0].dim(),
            (None, None) => 0,
        }
    }

    /// All grid points after exclusions, in deterministic row-major order
    /// (first axis slowest).
    pub fn points(&self) -> Vec<ParamPoint> {
        let raw: Vec<ParamPoint> = if let Some(axes) = &self.axes {
            let per_axis: Vec<Vec<f64>> = axes.iter().map(AxisSpec::points).collect();
            let mut points = vec![Vec::new()];
            for axis in &per_axis {
                let mut next = Vec::with_capacity(points.len() * axis.len());
                for p in &points {
                    for &v in axis {
                        let mut q = p.clone();
                        q.push(v);
                        next.push(q);
                    }
                }
                points = next;
            }
            points.into_iter().map(ParamPoint::new).collect()
        } else {
            self.explicit.clone().unwrap_or_default()
        };
        raw.into_iter()
            .filter(|p| !self.exclusions.iter().any(|excl| excl(p)))
            .collect()
    }

    fn descriptor(&self) -> GridDescriptor {
        GridDescriptor {
            axes: self.axes.clone(),
            points_total: self.points().len(),
        }
    }
}

/// Serializable summary of the grid actually used.
#[derive(Debug, Clone, Serialize)]
pub struct GridDescriptor {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub axes: Option<Vec<AxisSpec>>,
    pub points_total: usize,
}

/// Per-grid-point comparison of computed vs target metric.
#[derive(Debug, Clone, Serialize)]
pub struct PointReport {
    pub theta: Vec<f64>,
    pub computed: MetricTensor,
    pub target: MetricTensor,
    pub abs_error: Vec<Vec<f64>>,
    pub max_abs_error: f64,
    pub max_rel_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportSummary {
    pub max_abs_err: f64,
    pub max_rel_err: f64,
    pub worst_point: Vec<f64>,
    pub points_checked: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct QuadratureStats {
    pub total_evaluations: u64,
    pub worst_error_estimate: f64,
}

/// The outcome of one verification run.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub pass: bool,
    pub tolerance: f64,
    pub summary: ReportSummary,
    pub grid: GridDescriptor,
    pub quadrature: QuadratureStats,
    pub points: Vec<PointReport>,
}

/// Entrywise comparison: maximum absolute error, and maximum relative error
/// with denominator `max(1, |target entry|)` so exact zero targets are
/// governed by absolute error.
pub fn compare_metrics(a: &MetricTensor, b: &MetricTensor) -> Result<(f64, f64), VerifyError> {
    if a.dim() != b.dim() {
        return Err(DomainError::DimensionMismatch {
            expected: a.dim(),
            got: b.dim(),
        }
        .into());
    }
    let mut max_abs = 0.0f64;
    let mut max_rel = 0.0f64;
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            let diff = (a.get(i, j) - b.get(i, j)).abs();
            max_abs = max_abs.max(diff);
            max_rel = max_rel.max(diff / b.get(i, j).abs().max(1.0));
        }
    }
    Ok((max_abs, max_rel))
}

/// A family whose Fisher metric can be verified: a plain density family
/// (direct engine) or a spatially disjoint product (decomposed engine).
#[derive(Debug, Clone)]
pub enum Family {
    Single(DensityFamily),
    Product(DisjointProductFamily),
}

impl Family {
    pub fn params(&self) -> &ParametricDomain {
        match self {
            Family::Single(f) => f.params(),
            Family::Product(p) => p.params(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Family::Single(f) => f.name().to_string(),
            Family::Product(p) => p.to_density_family().name().to_string(),
        }
    }

    /// The Fisher metric at a point, routed to the appropriate engine.
    pub fn metric_at(
        &self,
        theta: &ParamPoint,
        spec: &QuadratureSpec,
    ) -> Result<MetricComputation, FisherError> {
        match self {
            Family::Single(f) => fisher_metric_direct(f, theta, spec),
            Family::Product(p) => fisher_metric_decomposed(p, theta, spec),
        }
    }

    /// Integral of the density over the spatial domain (should be 1).
    pub fn normalization(
        &self,
        theta: &ParamPoint,
        spec: &QuadratureSpec,
    ) -> Result<IntegrationResult, VerifyError> {
        match self {
            Family::Single(f) => Ok(crate::fisher::normalization_check(f, theta, spec)?),
            Family::Product(p) => Ok(p.normalization_check(theta, spec)?),
        }
    }
}

/// Compare a family's Fisher metric against a target field on a grid.
pub fn verify_construction(
    family: &Family,
    target: &MetricField,
    grid: &VerificationGrid,
    tolerance: f64,
    spec: &QuadratureSpec,
) -> Result<VerificationReport, VerifyError> {
    if family.params().dim() != target.params().dim() {
        return Err(VerifyError::ParamsMismatch {
            family_dim: family.params().dim(),
            target_dim: target.params().dim(),
        });
    }
    let points = grid.points();
    if points.is_empty() {
        return Err(VerifyError::EmptyGrid);
    }
    for p in &points {
        if !family.params().contains(p) {
            return Err(VerifyError::GridPointOutsideDomain {
                theta: p.coords().to_vec(),
            });
        }
    }
    pointwise_report(
        &points,
        grid.descriptor(),
        |_, theta| family.metric_at(theta, spec),
        |_, theta| target.evaluate(theta),
        tolerance,
    )
}

/// Shared driver: evaluate `compute` and `target` at each indexed point (in
/// parallel), compare entrywise, and assemble the report in grid order.
fn pointwise_report<C, T>(
    points: &[ParamPoint],
    grid: GridDescriptor,
    compute: C,
    target: T,
    tolerance: f64,
) -> Result<VerificationReport, VerifyError>
where
    C: Fn(usize, &ParamPoint) -> Result<MetricComputation, FisherError> + Sync,
    T: Fn(usize, &ParamPoint) -> MetricTensor + Sync,
{
    let outcomes: Vec<Result<(MetricComputation, MetricTensor), FisherError>> = points
        .par_iter()
        .enumerate()
        .map(|(i, theta)| compute(i, theta).map(|c| (c, target(i, theta))))
        .collect();

    let mut reports = Vec::with_capacity(points.len());
    let mut total_evaluations = 0u64;
    let mut worst_error_estimate = 0.0f64;
    for (theta, outcome) in points.iter().zip(outcomes) {
        let (computation, target_tensor) = outcome.map_err(|source| VerifyError::Engine {
            theta: theta.coords().to_vec(),
            source,
        })?;
        let (max_abs, max_rel) = compare_metrics(&computation.tensor, &target_tensor)?;
        let dim = target_tensor.dim();
        let abs_error = (0..dim)
            .map(|i| {
                (0..dim)
                    .map(|j| (computation.tensor.get(i, j) - target_tensor.get(i, j)).abs())
                    .collect()
            })
            .collect();
        total_evaluations += computation.evaluations;
        worst_error_estimate = worst_error_estimate.max(computation.worst_error);
        reports.push(PointReport {
            theta: theta.coords().to_vec(),
            computed: computation.tensor,
            target: target_tensor,
            abs_error,
            max_abs_error: max_abs,
            max_rel_error: max_rel,
        });
    }

    let mut max_abs_err = 0.0f64;
    let mut max_rel_err = 0.0f64;
    let mut worst_point = reports[0].theta.clone();
    for r in &reports {
        if r.max_abs_error > max_abs_err {
            max_abs_err = r.max_abs_error;
            worst_point = r.theta.clone();
        }
        max_rel_err = max_rel_err.max(r.max_rel_error);
    }

    Ok(VerificationReport {
        pass: max_abs_err <= tolerance,
        tolerance,
        summary: ReportSummary {
            max_abs_err,
            max_rel_err,
            worst_point,
            points_checked: reports.len(),
        },
        grid,
        quadrature: QuadratureStats {
            total_evaluations,
            worst_error_estimate,
        },
        points: reports,
    })
}

/// Run a named demo at its pinned tolerance.
pub fn run_demo(name: &str) -> Result<VerificationReport, VerifyError> {
    run_demo_with_tolerance(name, None)
}

/// Run a named demo, optionally overriding the pinned tolerance.
///
/// Every demo uses fixed grids with margins away from domain boundaries and
/// chart singularities, and the default quadrature spec, so reports are
/// reproducible bit-for-bit across runs.
pub fn run_demo_with_tolerance(
    name: &str,
    tolerance: Option<f64>,
) -> Result<VerificationReport, VerifyError> {
    let spec = QuadratureSpec::default();
    match name {
        // Direct engine vs the closed form diag(1/σ², 2/σ²) on a 5×2 grid.
        "normal" => {
            let tol = tolerance.unwrap_or(1e-8);
            let family = Family::Single(DensityFamily::univariate_normal());
            let target = MetricField::new(family.params().clone(), |theta: &ParamPoint| {
                let sigma = theta.get(1);
                MetricTensor::from_upper_triangle(2, |a, b| match (a, b) {
                    (0, 0) => 1.0 / (sigma * sigma),
                    (1, 1) => 2.0 / (sigma * sigma),
                    _ => 0.0,
                })
            });
            let grid = VerificationGrid::from_axes(vec![
                AxisSpec::new(-2.0, 2.0, 5),
                AxisSpec::new(0.4, 3.0, 2),
            ])?;
            verify_construction(&family, &target, &grid, tol, &spec)
        }
        // Direct engine vs δ_ab/(2γ²) at pinned location/scale points.
        "cauchy" => {
            let tol = tolerance.unwrap_or(1e-6);
            let family = Family::Single(DensityFamily::univariate_cauchy());
            let target = MetricField::new(family.params().clone(), |theta: &ParamPoint| {
                let gamma = theta.get(1);
                MetricTensor::identity(2).scale(1.0 / (2.0 * gamma * gamma))
            });
            let mut points = Vec::new();
            for x0 in [-0.5, 0.5] {
                for gamma in [0.5, 1.0, 2.0] {
                    points.push(ParamPoint::from([x0, gamma]));
                }
            }
            let grid = VerificationGrid::explicit(points)?;
            verify_construction(&family, &target, &grid, tol, &spec)
        }
        // Location family over the sech base with the √2-adjusted map has
        // unit metric: D = ½ compensated by the factor √2.
        "sech-location" => {
            let tol = tolerance.unwrap_or(1e-6);
            let h = ScalarMap::linear(&[std::f64::consts::SQRT_2]);
            let family = Family::Single(crate::construct::location_family(
                &BasePdf::sech(),
                &h,
                ParametricDomain::unconstrained(1),
            )?);
            let target = MetricField::constant(
                ParametricDomain::unconstrained(1),
                MetricTensor::identity(1),
            );
            let grid = VerificationGrid::from_axes(vec![AxisSpec::new(-2.0, 2.0, 5)])?;
            verify_construction(&family, &target, &grid, tol, &spec)
        }
        // Gaussian construction over the sphere chart vs its pullback.
        "sphere-gaussian" => {
            let tol = tolerance.unwrap_or(1e-5);
            let sphere = embedding::sphere2();
            let family = Family::Product(gaussian_construction(&sphere)?);
            let target = sphere.pullback_field();
            verify_construction(&family, &target, &sphere_grid()?, tol, &spec)
        }
        // Sech construction over the same chart and target.
        "sphere-sech" => {
            let tol = tolerance.unwrap_or(1e-5);
            let sphere = embedding::sphere2();
            let family = Family::Product(sech_construction(&sphere)?);
            let target = sphere.pullback_field();
            verify_construction(&family, &target, &sphere_grid()?, tol, &spec)
        }
        // Mixed normal/sech/cauchy product over the hyperbolic patch vs the
        // conformal target β⁻²δ.
        "hyperbolic-mixed" => {
            let tol = tolerance.unwrap_or(1e-5);
            let family = Family::Product(hyperbolic_mixed_family(&spec)?);
            let target = MetricField::new(
                embedding::hyperbolic_patch().params().clone(),
                |theta: &ParamPoint| {
                    let beta = theta.get(1);
                    MetricTensor::identity(2).scale(1.0 / (beta * beta))
                },
            );
            let grid = VerificationGrid::from_axes(vec![
                AxisSpec::new(-3.0, 3.0, 5),
                AxisSpec::new(1.1, 4.0, 5),
            ])?;
            verify_construction(&family, &target, &grid, tol, &spec)
        }
        // Squared Legendre expansion over the radius-2 circle: g = [[4]].
        "circle-orthonormal" => {
            let tol = tolerance.unwrap_or(1e-6);
            let circle = embedding::circle(2.0)?;
            let family = Family::Single(orthonormal_construction(
                &OrthonormalBasis::normalized_legendre_pair(),
                &circle,
                &spec,
            )?);
            let target = circle.pullback_field();
            let grid = VerificationGrid::from_axes(vec![AxisSpec::new(0.3, 6.0, 7)])?;
            verify_construction(&family, &target, &grid, tol, &spec)
        }
        // Change-of-variables formula vs the direct engine on the induced
        // families. Points 1–4: translation of the normal base by 1.3θ;
        // points 5–8: dilation of the exponential base by e^{0.6θ}.
        "symmetry-crosscheck" => {
            let tol = tolerance.unwrap_or(1e-6);
            let params = ParametricDomain::unconstrained(1);
            let cases: Vec<(BasePdf, DiffeoFamily)> = vec![
                (
                    BasePdf::standard_normal(),
                    DiffeoFamily::location(&ScalarMap::linear(&[1.3]), params.clone()),
                ),
                (
                    BasePdf::exponential(),
                    DiffeoFamily::scale(&ScalarMap::linear(&[0.6]), params.clone()),
                ),
            ];
            let thetas = [-0.9, -0.3, 0.3, 0.9];
            let mut points = Vec::new();
            let mut computations = Vec::new();
            let mut targets = Vec::new();
            for (base, diffeo) in &cases {
                let induced = diffeo.induced_family(base);
                for &t in &thetas {
                    let theta = ParamPoint::from([t]);
                    let symmetry =
                        fisher_metric_symmetry(base, diffeo, &theta, &spec).map_err(|source| {
                            VerifyError::Engine {
                                theta: theta.coords().to_vec(),
                                source,
                            }
                        })?;
                    let direct =
                        fisher_metric_direct(&induced, &theta, &spec).map_err(|source| {
                            VerifyError::Engine {
                                theta: theta.coords().to_vec(),
                                source,
                            }
                        })?;
                    points.push(theta);
                    computations.push(symmetry);
                    targets.push(direct.tensor);
                }
            }
            let descriptor = GridDescriptor {
                axes: None,
                points_total: points.len(),
            };
            pointwise_report(
                &points,
                descriptor,
                |i, _| Ok(computations[i].clone()),
                |i, _| targets[i].clone(),
                tol,
            )
        }
        other => Err(VerifyError::UnknownDemo {
            name: other.to_string(),
        }),
    }
}

/// The pinned sphere grid: 5×5 over (0.3, 6) × (0.3, 2.8), with a pole-band
/// exclusion of half-width 0.05 (redundant on this range, but kept so the
/// grid is safe under modification).
fn sphere_grid() -> Result<VerificationGrid, VerifyError> {
    Ok(
        VerificationGrid::from_axes(vec![AxisSpec::new(0.3, 6.0, 5), AxisSpec::new(0.3, 2.8, 5)])?
            .with_exclusion(|theta| {
                let phi = theta.get(1);
                phi < 0.05 || (std::f64::consts::PI - phi).abs() < 0.05
            }),
    )
}

/// The three-component location product over the hyperbolic patch: normal,
/// sech, and Cauchy bases with the `1/√Dᵢ` adjustments.
pub fn hyperbolic_mixed_family(
    spec: &QuadratureSpec,
) -> Result<DisjointProductFamily, ConstructError> {
    mixed_construction(
        &embedding::hyperbolic_patch(),
        &[
            BasePdf::standard_normal(),
            BasePdf::sech(),
            BasePdf::standard_cauchy(),
        ],
        &[ComponentMode::Location; 3],
        spec,
    )
}

/// Closed forms for the three component metrics of the hyperbolic mixed
/// product at `(α, β)`; their sum is `β⁻²δ`.
pub fn hyperbolic_component_closed_forms(alpha: f64, beta: f64) -> [MetricTensor; 3] {
    let b4 = beta.powi(4);
    let (sin, cos) = alpha.sin_cos();
    let g1 = MetricTensor::from_upper_triangle(2, |a, b| match (a, b) {
        (0, 0) => beta * beta * sin * sin / b4,
        (0, 1) => beta * sin * cos / b4,
        (1, 1) => cos * cos / b4,
        _ => unreachable!(),
    });
    let g2 = MetricTensor::from_upper_triangle(2, |a, b| match (a, b) {
        (0, 0) => beta * beta * cos * cos / b4,
        (0, 1) => -beta * sin * cos / b4,
        (1, 1) => sin * sin / b4,
        _ => unreachable!(),
    });
    let g3 = MetricTensor::from_upper_triangle(2, |a, b| match (a, b) {
        (1, 1) => (beta * beta - 1.0) / b4,
        _ => 0.0,
    });
    [g1, g2, g3]
}
