//! Shared domain types: spatial and parametric domains, parametric density
//! families, and symmetric metric tensors.
//!
//! A density family is a parametric family of continuous functions
//! `P(x; θ) ≥ 0` on a spatial domain `X` (a product of open intervals),
//! normalized to one for every parameter point `θ` in the parametric
//! domain `M ⊂ ℝᵐ`. All types here are immutable after construction and
//! all operations are pure, so values can be shared freely across threads.

use std::fmt;
use std::sync::Arc;

use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};
use thiserror::Error;

/// Densities below this floor are treated as zero for quotient purposes.
///
/// Fisher integrands of the form `(∂ₐP)(∂_bP)/P` have a finite limit where
/// `P → 0` together with `∂P → 0`; clamping the denominator keeps the
/// quotient form numerically stable without biasing converged integrals.
pub const DENSITY_FLOOR: f64 = 1e-300;

/// Default step factor for central finite differences: cube root of machine
/// epsilon, the usual truncation/round-off balance. The per-coordinate step
/// is `default_fd_step() * (1 + |θᵃ|)`.
pub fn default_fd_step() -> f64 {
    f64::EPSILON.cbrt()
}

/// Errors from domain-type validation and checked evaluation.
#[derive(Debug, Error)]
pub enum DomainError {
    #[error("invalid interval ({lower}, {upper}): lower bound must be strictly below upper")]
    InvalidInterval { lower: f64, upper: f64 },
    #[error("a spatial domain needs at least one interval")]
    EmptySpatialDomain,
    #[error("a parametric domain needs dimension at least one")]
    EmptyParametricDomain,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("spatial point {x:?} lies outside the declared spatial domain")]
    OutsideSpatialDomain { x: Vec<f64> },
    #[error("parameter point {theta:?} lies outside the declared parametric domain")]
    OutsideParametricDomain { theta: Vec<f64> },
    #[error("density {value:.3e} at the evaluation point is below the floor {floor:.1e}")]
    ZeroDensity { value: f64, floor: f64 },
    #[error("matrix entries are not symmetric: entry ({a},{b}) = {upper} but ({b},{a}) = {lower}")]
    NotSymmetric {
        a: usize,
        b: usize,
        upper: f64,
        lower: f64,
    },
}

/// An open 1-D interval; endpoints may be infinite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    lower: f64,
    upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Result<Self, DomainError> {
        if lower.is_nan() || upper.is_nan() || lower >= upper {
            return Err(DomainError::InvalidInterval { lower, upper });
        }
        Ok(Self { lower, upper })
    }

    /// The whole real line `(−∞, ∞)`.
    pub fn real_line() -> Self {
        Self {
            lower: f64::NEG_INFINITY,
            upper: f64::INFINITY,
        }
    }

    /// The positive half line `(0, ∞)`.
    pub fn positive_half_line() -> Self {
        Self {
            lower: 0.0,
            upper: f64::INFINITY,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    /// Strict interior membership; the domain is open, so endpoints are out.
    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    pub fn is_bounded(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn is_real_line(&self) -> bool {
        self.lower == f64::NEG_INFINITY && self.upper == f64::INFINITY
    }

    /// True for domains invariant under `x ↦ c·x` with `c > 0`.
    pub fn is_scale_invariant(&self) -> bool {
        self.is_real_line() || (self.lower == 0.0 && self.upper == f64::INFINITY)
    }
}

/// A spatial domain `X`: the Cartesian product of open 1-D intervals.
#[derive(Debug, Clone, PartialEq)]
pub struct SpatialDomain {
    intervals: Vec<Interval>,
}

impl SpatialDomain {
    pub fn new(intervals: Vec<Interval>) -> Result<Self, DomainError> {
        if intervals.is_empty() {
            return Err(DomainError::EmptySpatialDomain);
        }
        Ok(Self { intervals })
    }

    /// A 1-D domain from a single interval.
    pub fn line(interval: Interval) -> Self {
        Self {
            intervals: vec![interval],
        }
    }

    pub fn real_line() -> Self {
        Self::line(Interval::real_line())
    }

    pub fn dim(&self) -> usize {
        self.intervals.len()
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim() && self.intervals.iter().zip(x).all(|(iv, &c)| iv.contains(c))
    }

    /// The concatenated product `X₁ × X₂`, used by spatially disjoint products.
    pub fn product(&self, other: &SpatialDomain) -> SpatialDomain {
        let mut intervals = self.intervals.clone();
        intervals.extend_from_slice(&other.intervals);
        SpatialDomain { intervals }
    }
}

type PredicateFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// The parametric domain `M ⊂ ℝᵐ`: an open box, optionally refined by a
/// predicate. Membership is total: every candidate point is accepted or
/// rejected deterministically.
#[derive(Clone)]
pub struct ParametricDomain {
    bounds: Vec<(f64, f64)>,
    predicate: Option<PredicateFn>,
}

impl fmt::Debug for ParametricDomain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ParametricDomain")
            .field("bounds", &self.bounds)
            .field("predicate", &self.predicate.as_ref().map(|_| "<fn>"))
            .finish()
    }
}

impl ParametricDomain {
    /// All of `ℝᵐ`.
    pub fn unconstrained(dim: usize) -> Self {
        Self {
            bounds: vec![(f64::NEG_INFINITY, f64::INFINITY); dim.max(1)],
            predicate: None,
        }
    }

    /// An open box; entries may be infinite on either side.
    pub fn from_bounds(bounds: Vec<(f64, f64)>) -> Result<Self, DomainError> {
        if bounds.is_empty() {
            return Err(DomainError::EmptyParametricDomain);
        }
        for &(lo, hi) in &bounds {
            if lo.is_nan() || hi.is_nan() || lo >= hi {
                return Err(DomainError::InvalidInterval {
                    lower: lo,
                    upper: hi,
                });
            }
        }
        Ok(Self {
            bounds,
            predicate: None,
        })
    }

    /// Refine the box with an arbitrary predicate (e.g. `β > 1`).
    pub fn with_predicate<F>(mut self, predicate: F) -> Self
    where
        F: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        self.predicate = Some(Arc::new(predicate));
        self
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, theta: &ParamPoint) -> bool {
        if theta.dim() != self.dim() {
            return false;
        }
        let inside_box = self
            .bounds
            .iter()
            .zip(theta.coords())
            .all(|(&(lo, hi), &c)| c > lo && c < hi);
        if !inside_box {
            return false;
        }
        match &self.predicate {
            Some(p) => p(theta.coords()),
            None => true,
        }
    }
}

/// A point `θ = (θ¹, …, θᵐ)` in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamPoint {
    coords: Vec<f64>,
}

impl ParamPoint {
    pub fn new(coords: Vec<f64>) -> Self {
        Self { coords }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn get(&self, a: usize) -> f64 {
        self.coords[a]
    }
}

impl From<Vec<f64>> for ParamPoint {
    fn from(coords: Vec<f64>) -> Self {
        Self::new(coords)
    }
}

impl From<&[f64]> for ParamPoint {
    fn from(coords: &[f64]) -> Self {
        Self::new(coords.to_vec())
    }
}

impl<const N: usize> From<[f64; N]> for ParamPoint {
    fn from(coords: [f64; N]) -> Self {
        Self::new(coords.to_vec())
    }
}

type ScalarEvalFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type ScalarGradientFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// A scalar function `h(θ)` together with its parameter gradient `∂ₐh`.
///
/// These appear as the mean functions of location and scale families and as
/// single components of embeddings.
#[derive(Clone)]
pub struct ScalarMap {
    param_dim: usize,
    eval: ScalarEvalFn,
    gradient: ScalarGradientFn,
}

impl fmt::Debug for ScalarMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarMap")
            .field("param_dim", &self.param_dim)
            .finish()
    }
}

impl ScalarMap {
    pub fn new<E, G>(param_dim: usize, eval: E, gradient: G) -> Self
    where
        E: Fn(&[f64]) -> f64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self {
            param_dim,
            eval: Arc::new(eval),
            gradient: Arc::new(gradient),
        }
    }

    /// `h(θ) = Σ cₐ θᵃ`.
    pub fn linear(coefficients: &[f64]) -> Self {
        let c = coefficients.to_vec();
        let grad = c.clone();
        Self::new(
            c.len(),
            move |theta| theta.iter().zip(&c).map(|(t, c)| t * c).sum(),
            move |_| grad.clone(),
        )
    }

    /// A constant map; its gradient vanishes identically.
    pub fn constant(value: f64, param_dim: usize) -> Self {
        Self::new(param_dim, move |_| value, move |_| vec![0.0; param_dim])
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn eval(&self, theta: &[f64]) -> f64 {
        (self.eval)(theta)
    }

    pub fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        (self.gradient)(theta)
    }

    /// The rescaled map `s·h`, gradient included.
    pub fn scaled(&self, s: f64) -> ScalarMap {
        let eval = Arc::clone(&self.eval);
        let gradient = Arc::clone(&self.gradient);
        ScalarMap {
            param_dim: self.param_dim,
            eval: Arc::new(move |theta| s * eval(theta)),
            gradient: Arc::new(move |theta| gradient(theta).into_iter().map(|g| s * g).collect()),
        }
    }
}

pub type DensityFn = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;
pub type LogParamGradientFn = Arc<dyn Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync>;

/// A parametric family of probability densities `P(x; θ)`.
///
/// The density closure must be nonnegative on its declared domain and
/// normalized over `X` for every admissible `θ`. An analytic log-density
/// parameter gradient `∂ₐ ln P` may be attached; families without one fall
/// back to central finite differences.
#[derive(Clone)]
pub struct DensityFamily {
    name: String,
    domain: SpatialDomain,
    params: ParametricDomain,
    density: DensityFn,
    log_param_gradient: Option<LogParamGradientFn>,
}

impl fmt::Debug for DensityFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DensityFamily")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("params", &self.params)
            .field("analytic_gradient", &self.log_param_gradient.is_some())
            .finish()
    }
}

impl DensityFamily {
    pub fn new<F>(
        name: impl Into<String>,
        domain: SpatialDomain,
        params: ParametricDomain,
        density: F,
    ) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            params,
            density: Arc::new(density),
            log_param_gradient: None,
        }
    }

    pub fn with_log_param_gradient<G>(mut self, gradient: G) -> Self
    where
        G: Fn(&[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        self.log_param_gradient = Some(Arc::new(gradient));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &SpatialDomain {
        &self.domain
    }

    pub fn params(&self) -> &ParametricDomain {
        &self.params
    }

    pub fn has_analytic_gradient(&self) -> bool {
        self.log_param_gradient.is_some()
    }

    /// Evaluate `P(x; θ)` with full domain validation.
    pub fn density_at(&self, x: &[f64], theta: &ParamPoint) -> Result<f64, DomainError> {
        if !self.domain.contains(x) {
            return Err(DomainError::OutsideSpatialDomain { x: x.to_vec() });
        }
        if !self.params.contains(theta) {
            return Err(DomainError::OutsideParametricDomain {
                theta: theta.coords().to_vec(),
            });
        }
        Ok((self.density)(x, theta.coords()))
    }

    /// Unchecked density evaluation for quadrature hot paths. The caller is
    /// responsible for having validated `theta` once up front; `x` values come
    /// from quadrature nodes inside the declared domain.
    pub(crate) fn density_unchecked(&self, x: &[f64], theta: &[f64]) -> f64 {
        (self.density)(x, theta)
    }

    pub(crate) fn log_param_gradient_unchecked(
        &self,
        x: &[f64],
        theta: &[f64],
    ) -> Option<Vec<f64>> {
        self.log_param_gradient.as_ref().map(|g| g(x, theta))
    }

    /// The gradient `∂ₐ ln P(x; θ)` over all parameters.
    ///
    /// Uses the analytic gradient when the family carries one, otherwise a
    /// central finite difference of `ln P` with per-coordinate step
    /// `fd_step · (1 + |θᵃ|)`. Requires `θ` far enough inside `M` that the
    /// perturbed points stay admissible.
    pub fn log_param_gradient_at(
        &self,
        x: &[f64],
        theta: &ParamPoint,
        fd_step: Option<f64>,
    ) -> Result<Vec<f64>, DomainError> {
        if !self.domain.contains(x) {
            return Err(DomainError::OutsideSpatialDomain { x: x.to_vec() });
        }
        if !self.params.contains(theta) {
            return Err(DomainError::OutsideParametricDomain {
                theta: theta.coords().to_vec(),
            });
        }
        let p = (self.density)(x, theta.coords());
        if p < DENSITY_FLOOR {
            return Err(DomainError::ZeroDensity {
                value: p,
                floor: DENSITY_FLOOR,
            });
        }
        if let Some(grad) = &self.log_param_gradient {
            return Ok(grad(x, theta.coords()));
        }

        let step = fd_step.unwrap_or_else(default_fd_step);
        let m = theta.dim();
        let mut grad = vec![0.0; m];
        let mut shifted = theta.coords().to_vec();
        for a in 0..m {
            let h = step * (1.0 + theta.get(a).abs());
            shifted[a] = theta.get(a) + h;
            let plus = ParamPoint::new(shifted.clone());
            if !self.params.contains(&plus) {
                return Err(DomainError::OutsideParametricDomain {
                    theta: plus.coords().to_vec(),
                });
            }
            let p_plus = (self.density)(x, plus.coords());
            shifted[a] = theta.get(a) - h;
            let minus = ParamPoint::new(shifted.clone());
            if !self.params.contains(&minus) {
                return Err(DomainError::OutsideParametricDomain {
                    theta: minus.coords().to_vec(),
                });
            }
            let p_minus = (self.density)(x, minus.coords());
            shifted[a] = theta.get(a);
            if p_plus < DENSITY_FLOOR || p_minus < DENSITY_FLOOR {
                return Err(DomainError::ZeroDensity {
                    value: p_plus.min(p_minus),
                    floor: DENSITY_FLOOR,
                });
            }
            grad[a] = (p_plus.ln() - p_minus.ln()) / (2.0 * h);
        }
        Ok(grad)
    }

    /// The univariate normal family with `θ = (μ, σ)`, `σ > 0`.
    ///
    /// Its Fisher metric is `diag(1/σ², 2/σ²)`.
    pub fn univariate_normal() -> Self {
        let params = ParametricDomain::from_bounds(vec![
            (f64::NEG_INFINITY, f64::INFINITY),
            (0.0, f64::INFINITY),
        ])
        .expect("static bounds");
        DensityFamily::new("normal", SpatialDomain::real_line(), params, |x, th| {
            let (mu, sigma) = (th[0], th[1]);
            let z = (x[0] - mu) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        })
        .with_log_param_gradient(|x, th| {
            let (mu, sigma) = (th[0], th[1]);
            let z = (x[0] - mu) / sigma;
            vec![z / sigma, (z * z - 1.0) / sigma]
        })
    }

    /// The Cauchy family with `θ = (x₀, γ)`, `γ > 0`.
    ///
    /// Its Fisher metric is `δ_ab/(2γ²)`.
    pub fn univariate_cauchy() -> Self {
        let params = ParametricDomain::from_bounds(vec![
            (f64::NEG_INFINITY, f64::INFINITY),
            (0.0, f64::INFINITY),
        ])
        .expect("static bounds");
        DensityFamily::new("cauchy", SpatialDomain::real_line(), params, |x, th| {
            let (x0, gamma) = (th[0], th[1]);
            let d = x[0] - x0;
            gamma / (std::f64::consts::PI * (gamma * gamma + d * d))
        })
        .with_log_param_gradient(|x, th| {
            let (x0, gamma) = (th[0], th[1]);
            let d = x[0] - x0;
            let denom = gamma * gamma + d * d;
            vec![2.0 * d / denom, 1.0 / gamma - 2.0 * gamma / denom]
        })
    }
}

/// A symmetric `m×m` metric tensor at a parameter point.
///
/// Entries are stored exactly symmetric: constructors either mirror the
/// upper triangle or reject asymmetric input.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricTensor {
    dim: usize,
    entries: Vec<f64>,
}

impl MetricTensor {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut t = Self::zeros(dim);
        for a in 0..dim {
            t.entries[a * dim + a] = 1.0;
        }
        t
    }

    /// Build from an upper-triangle evaluator; the lower triangle is mirrored
    /// bit-for-bit, so symmetry holds exactly.
    pub fn from_upper_triangle<F>(dim: usize, mut entry: F) -> Self
    where
        F: FnMut(usize, usize) -> f64,
    {
        let mut entries = vec![0.0; dim * dim];
        for a in 0..dim {
            for b in a..dim {
                let v = entry(a, b);
                entries[a * dim + b] = v;
                entries[b * dim + a] = v;
            }
        }
        Self { dim, entries }
    }

    /// Build from full rows, rejecting anything not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, DomainError> {
        let dim = rows.len();
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(DomainError::DimensionMismatch {
                    expected: dim,
                    got: row.len(),
                });
            }
            for (j, &entry) in row.iter().enumerate() {
                if entry.to_bits() != rows[j][i].to_bits() {
                    return Err(DomainError::NotSymmetric {
                        a: i,
                        b: j,
                        upper: entry,
                        lower: rows[j][i],
                    });
                }
            }
        }
        let entries = rows.iter().flatten().copied().collect();
        Ok(Self { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, a: usize, b: usize) -> f64 {
        self.entries[a * self.dim + b]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|a| self.entries[a * self.dim..(a + 1) * self.dim].to_vec())
            .collect()
    }

    pub fn add(&self, other: &MetricTensor) -> Result<MetricTensor, DomainError> {
        if self.dim != other.dim {
            return Err(DomainError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        Ok(MetricTensor {
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, factor: f64) -> MetricTensor {
        MetricTensor {
            dim: self.dim,
            entries: self.entries.iter().map(|e| e * factor).collect(),
        }
    }

    /// Congruence transform `Jᵀ g J` for a parameter change with Jacobian `J`
    /// (`J[i][a] = ∂θⁱ/∂ψᵃ`).
    pub fn congruence(&self, jacobian: &[Vec<f64>]) -> Result<MetricTensor, DomainError> {
        if jacobian.len() != self.dim {
            return Err(DomainError::DimensionMismatch {
                expected: self.dim,
                got: jacobian.len(),
            });
        }
        let m = jacobian[0].len();
        for row in jacobian {
            if row.len() != m {
                return Err(DomainError::DimensionMismatch {
                    expected: m,
                    got: row.len(),
                });
            }
        }
        Ok(MetricTensor::from_upper_triangle(m, |a, b| {
            let mut sum = 0.0;
            for i in 0..self.dim {
                for j in 0..self.dim {
                    sum += jacobian[i][a] * self.get(i, j) * jacobian[j][b];
                }
            }
            sum
        }))
    }

    /// Smallest eigenvalue via cyclic Jacobi rotations. Intended for the
    /// positive-semidefiniteness check on small matrices.
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.dim;
        if n == 1 {
            return self.entries[0];
        }
        let mut a = self.entries.clone();
        let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-30);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q] * a[p * n + q];
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq.abs() <= 1e-18 * scale {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        (0..n).map(|i| a[i * n + i]).fold(f64::INFINITY, f64::min)
    }

    /// Positive semidefinite up to numerical tolerance.
    pub fn is_positive_semidefinite(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// Entrywise maximum absolute difference; dimensions must agree.
    pub fn max_abs_diff(&self, other: &MetricTensor) -> Result<f64, DomainError> {
        if self.dim != other.dim {
            return Err(DomainError::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs())))
    }
}

impl Serialize for MetricTensor {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim))?;
        for row in self.rows() {
            seq.serialize_element(&row)?;
        }
        seq.end()
    }
}

type MetricEvaluatorFn = Arc<dyn Fn(&ParamPoint) -> MetricTensor + Send + Sync>;

/// A metric tensor field over the parametric domain.
#[derive(Clone)]
pub struct MetricField {
    params: ParametricDomain,
    evaluator: MetricEvaluatorFn,
}

impl fmt::Debug for MetricField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MetricField")
            .field("params", &self.params)
            .finish()
    }
}

impl MetricField {
    pub fn new<F>(params: ParametricDomain, evaluator: F) -> Self
    where
        F: Fn(&ParamPoint) -> MetricTensor + Send + Sync + 'static,
    {
        Self {
            params,
            evaluator: Arc::new(evaluator),
        }
    }

    /// A field that is the same tensor everywhere.
    pub fn constant(params: ParametricDomain, tensor: MetricTensor) -> Self {
        Self::new(params, move |_| tensor.clone())
    }

    pub fn params(&self) -> &ParametricDomain {
        &self.params
    }

    pub fn evaluate(&self, theta: &ParamPoint) -> MetricTensor {
        let tensor = (self.evaluator)(theta);
        assert_eq!(
            tensor.dim(),
            self.params.dim(),
            "metric field evaluator returned a tensor of wrong dimension"
        );
        tensor
    }
}
