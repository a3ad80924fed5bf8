//! Builders for the reverse direction: density families whose Fisher metric
//! equals the Euclidean pullback of a supplied embedding.
//!
//! A spatially disjoint product glues 1-D families on concatenated
//! coordinates over one shared parameter space; its Fisher metric is the sum
//! of the component metrics. Each builder here arranges components so that
//! the sum telescopes to `JᵀJ`:
//!
//! * unit-variance Gaussians with means `hⁱ(θ)` need no adjustment;
//! * sech components carry the factor `√2` that compensates their location
//!   constant `D = ½`;
//! * mixed products rescale `hⁱ` by `1/√Dᵢ` (location) or `1/√Eᵢ` (scale)
//!   for arbitrary admissible bases;
//! * the squared orthonormal expansion `¼(Σ hⁱfᵢ)²w` realizes the same
//!   pullback under the constraint `h·h = 4` (that is, `h` lands on the
//!   sphere of radius 2).

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::domain::{
    DensityFamily, Interval, ParamPoint, ParametricDomain, ScalarMap, SpatialDomain,
};
use crate::embedding::Embedding;
use crate::fisher::{location_constant_d, scale_constant_e};
use crate::quadrature::{integrate_1d, IntegrationResult, QuadratureError, QuadratureSpec};

/// Tolerance for the orthonormality and `h·h = 4` preconditions.
pub const CONSTRUCTION_CHECK_TOL: f64 = 1e-8;

/// Sample points per parameter axis when checking `h·h = 4` numerically.
const CONSTRAINT_GRID_POINTS: usize = 17;

/// Window substituted for unbounded parameter axes in the constraint check.
const CONSTRAINT_WINDOW: f64 = 8.0;

/// Sign-preserving clamp for the expansion value in the orthonormal
/// construction's log-gradient; keeps the cancelled quotient finite at
/// isolated zeros of the expansion.
const EXPANSION_CLAMP: f64 = 1e-150;

#[derive(Debug, Error)]
pub enum ConstructError {
    #[error("a disjoint product needs at least one component")]
    EmptyProduct,
    #[error("component {index} ({name}) is {dim}-dimensional; product components must be 1-D")]
    ComponentNotUnivariate {
        index: usize,
        name: String,
        dim: usize,
    },
    #[error(
        "component {index} ({name}) has parameter dimension {got}, but the shared \
         parametric domain has dimension {expected}"
    )]
    MismatchedParametricDomains {
        index: usize,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("component {index} has multiplicity 0; multiplicities must be positive")]
    ZeroMultiplicity { index: usize },
    #[error("base `{name}` lives on a domain that is not translation-invariant; location families need X = ℝ")]
    DomainNotTranslationInvariant { name: String },
    #[error("base `{name}` lives on a domain that is not scale-invariant; scale families need X = ℝ or X = (0, ∞)")]
    DomainNotScaleInvariant { name: String },
    #[error("expected {expected} {what}, got {got}")]
    ArityMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("component {index} (base `{name}`) is inadmissible: {reason}")]
    InadmissibleBase {
        index: usize,
        name: String,
        reason: String,
    },
    #[error(transparent)]
    Domain(#[from] crate::domain::DomainError),
    #[error(
        "basis functions {i} and {j} are not orthonormal: ∫ fᵢfⱼw = {value:.6e}, expected {expected}"
    )]
    OrthonormalityViolation {
        i: usize,
        j: usize,
        value: f64,
        expected: f64,
    },
    #[error(
        "the map violates the h·h = 4 constraint: max |h·h − 4| = {max_abs_deviation:.6e} over the sample grid"
    )]
    ConstraintViolation { max_abs_deviation: f64 },
    #[error("parameter map has dimension {got}, expected {expected}")]
    ParamDimMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error(transparent)]
    Embedding(#[from] crate::embedding::EmbeddingError),
}

/// A fixed one-dimensional probability density `P̂` with its spatial
/// log-derivative `d ln P̂/dx`, the raw material for location and scale
/// families.
#[derive(Clone)]
pub struct BasePdf {
    name: String,
    domain: Interval,
    density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    log_spatial_derivative: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl fmt::Debug for BasePdf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BasePdf")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl BasePdf {
    pub fn new<D, L>(
        name: impl Into<String>,
        domain: Interval,
        density: D,
        log_spatial_derivative: L,
    ) -> Self
    where
        D: Fn(f64) -> f64 + Send + Sync + 'static,
        L: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            domain,
            density: Arc::new(density),
            log_spatial_derivative: Arc::new(log_spatial_derivative),
        }
    }

    /// `P̂(x) = e^{−x²/2}/√(2π)` on ℝ. Location constant `D = 1`,
    /// scale constant `E = 2`.
    pub fn standard_normal() -> Self {
        Self::new(
            "normal",
            Interval::real_line(),
            |x| (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt(),
            |x| -x,
        )
    }

    /// `P̂(x) = sech(x)/π` on ℝ. Location constant `D = ½`.
    pub fn sech() -> Self {
        Self::new(
            "sech",
            Interval::real_line(),
            |x| 1.0 / (std::f64::consts::PI * x.cosh()),
            |x| -x.tanh(),
        )
    }

    /// `P̂(x) = 1/(π(1+x²))` on ℝ. Location constant `D = ½`.
    pub fn standard_cauchy() -> Self {
        Self::new(
            "cauchy",
            Interval::real_line(),
            |x| 1.0 / (std::f64::consts::PI * (1.0 + x * x)),
            |x| -2.0 * x / (1.0 + x * x),
        )
    }

    /// `P̂(x) = e^{−x}` on (0, ∞). Scale constant `E = 1`.
    pub fn exponential() -> Self {
        Self::new(
            "exponential",
            Interval::positive_half_line(),
            |x| (-x).exp(),
            |_| -1.0,
        )
    }

    /// Look up a built-in base by name: `normal`, `sech`, `cauchy`,
    /// `exponential`.
    pub fn by_name(name: &str) -> Option<Self> {
        match name {
            "normal" => Some(Self::standard_normal()),
            "sech" => Some(Self::sech()),
            "cauchy" => Some(Self::standard_cauchy()),
            "exponential" => Some(Self::exponential()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn density(&self, x: f64) -> f64 {
        (self.density)(x)
    }

    pub fn log_spatial_derivative(&self, x: f64) -> f64 {
        (self.log_spatial_derivative)(x)
    }

    pub(crate) fn density_fn(&self) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        Arc::clone(&self.density)
    }

    pub(crate) fn log_spatial_derivative_fn(&self) -> Arc<dyn Fn(f64) -> f64 + Send + Sync> {
        Arc::clone(&self.log_spatial_derivative)
    }
}

/// An ordered list of 1-D families with multiplicities, all sharing one
/// parametric domain. The joint density is the product of the component
/// densities on concatenated spatial coordinates.
///
/// Component metrics of a product are understood with zero entries in the
/// directions a component does not depend on; only the sum over all
/// components is the metric of the product itself.
#[derive(Debug, Clone)]
pub struct DisjointProductFamily {
    components: Vec<(DensityFamily, u32)>,
    params: ParametricDomain,
}

impl DisjointProductFamily {
    pub fn new(components: Vec<(DensityFamily, u32)>) -> Result<Self, ConstructError> {
        if components.is_empty() {
            return Err(ConstructError::EmptyProduct);
        }
        let expected = components[0].0.params().dim();
        for (index, (family, multiplicity)) in components.iter().enumerate() {
            if family.domain().dim() != 1 {
                return Err(ConstructError::ComponentNotUnivariate {
                    index,
                    name: family.name().to_string(),
                    dim: family.domain().dim(),
                });
            }
            if family.params().dim() != expected {
                return Err(ConstructError::MismatchedParametricDomains {
                    index,
                    name: family.name().to_string(),
                    expected,
                    got: family.params().dim(),
                });
            }
            if *multiplicity == 0 {
                return Err(ConstructError::ZeroMultiplicity { index });
            }
        }
        let params = components[0].0.params().clone();
        Ok(Self { components, params })
    }

    pub fn components(&self) -> &[(DensityFamily, u32)] {
        &self.components
    }

    pub fn params(&self) -> &ParametricDomain {
        &self.params
    }

    /// Total spatial dimension `Σ eᵢ`.
    pub fn spatial_dim(&self) -> usize {
        self.components.iter().map(|(_, e)| *e as usize).sum()
    }

    /// Joint density at concatenated coordinates.
    pub fn density_at(&self, x: &[f64], theta: &ParamPoint) -> Result<f64, ConstructError> {
        Ok(self.to_density_family().density_at(x, theta)?)
    }

    /// Materialize the product as a single joint [`DensityFamily`] on the
    /// concatenated spatial domain. The joint log-gradient is the sum of the
    /// component gradients and is analytic whenever every component's is.
    pub fn to_density_family(&self) -> DensityFamily {
        let mut intervals = Vec::with_capacity(self.spatial_dim());
        for (family, multiplicity) in &self.components {
            for _ in 0..*multiplicity {
                intervals.push(family.domain().intervals()[0]);
            }
        }
        let domain = SpatialDomain::new(intervals).expect("products are non-empty");
        let name = format!(
            "product({})",
            self.components
                .iter()
                .map(|(f, e)| if *e > 1 {
                    format!("{}^{}", f.name(), e)
                } else {
                    f.name().to_string()
                })
                .collect::<Vec<_>>()
                .join(" ⊙ ")
        );
        let components = self.components.clone();
        let density_components = components.clone();
        let all_analytic = components.iter().all(|(f, _)| f.has_analytic_gradient());
        let m = self.params.dim();
        let family = DensityFamily::new(name, domain, self.params.clone(), move |x, th| {
            let mut offset = 0;
            let mut product = 1.0;
            for (component, multiplicity) in &density_components {
                for _ in 0..*multiplicity {
                    product *= component.density_unchecked(&x[offset..=offset], th);
                    offset += 1;
                }
            }
            product
        });
        if all_analytic {
            family.with_log_param_gradient(move |x, th| {
                let mut grad = vec![0.0; m];
                let mut offset = 0;
                for (component, multiplicity) in &components {
                    for _ in 0..*multiplicity {
                        let g = component
                            .log_param_gradient_unchecked(&x[offset..=offset], th)
                            .expect("all components carry analytic gradients");
                        for (acc, gi) in grad.iter_mut().zip(&g) {
                            *acc += gi;
                        }
                        offset += 1;
                    }
                }
                grad
            })
        } else {
            family
        }
    }

    /// Normalization of the joint density as the product of per-component
    /// 1-D integrals (exact for products by Fubini). The combined error
    /// estimate follows the product rule.
    pub fn normalization_check(
        &self,
        theta: &ParamPoint,
        spec: &QuadratureSpec,
    ) -> Result<IntegrationResult, ConstructError> {
        let mut value = 1.0;
        let mut rel_err = 0.0;
        let mut evaluations = 0u64;
        for (family, multiplicity) in &self.components {
            let iv = family.domain().intervals()[0];
            let th = theta.coords().to_vec();
            let fam = family.clone();
            let r = integrate_1d(
                move |x| fam.density_unchecked(&[x], &th),
                (iv.lower(), iv.upper()),
                spec,
            )?;
            let e = f64::from(*multiplicity);
            value *= r.value.powi(*multiplicity as i32);
            rel_err += e * r.error_estimate / r.value.abs().max(1e-3);
            evaluations += r.evaluations * *multiplicity as u64;
        }
        Ok(IntegrationResult {
            value,
            error_estimate: value.abs() * rel_err,
            evaluations,
            converged: true,
        })
    }
}

/// Form the spatially disjoint product of 1-D families over one shared
/// parametric domain.
pub fn disjoint_product(
    components: Vec<(DensityFamily, u32)>,
) -> Result<DisjointProductFamily, ConstructError> {
    DisjointProductFamily::new(components)
}

/// The location family `P(x;θ) = P̂(x − h(θ))`. Needs `X = ℝ`; its Fisher
/// metric is `D·(∂ₐh)(∂_bh)`.
pub fn location_family(
    base: &BasePdf,
    h: &ScalarMap,
    params: ParametricDomain,
) -> Result<DensityFamily, ConstructError> {
    if !base.domain().is_real_line() {
        return Err(ConstructError::DomainNotTranslationInvariant {
            name: base.name().to_string(),
        });
    }
    if h.param_dim() != params.dim() {
        return Err(ConstructError::ParamDimMismatch {
            expected: params.dim(),
            got: h.param_dim(),
        });
    }
    let density = base.density_fn();
    let logd = base.log_spatial_derivative_fn();
    let h_density = h.clone();
    let h_grad = h.clone();
    Ok(DensityFamily::new(
        format!("{}-location", base.name()),
        SpatialDomain::real_line(),
        params,
        move |x, th| density(x[0] - h_density.eval(th)),
    )
    .with_log_param_gradient(move |x, th| {
        let slope = logd(x[0] - h_grad.eval(th));
        h_grad
            .gradient(th)
            .into_iter()
            .map(|g| -g * slope)
            .collect()
    }))
}

/// The scale family `P(x;θ) = e^{h(θ)}·P̂(x·e^{h(θ)})`. Needs a domain
/// invariant under positive dilation; its Fisher metric is `E·(∂ₐh)(∂_bh)`.
pub fn scale_family(
    base: &BasePdf,
    h: &ScalarMap,
    params: ParametricDomain,
) -> Result<DensityFamily, ConstructError> {
    if !base.domain().is_scale_invariant() {
        return Err(ConstructError::DomainNotScaleInvariant {
            name: base.name().to_string(),
        });
    }
    if h.param_dim() != params.dim() {
        return Err(ConstructError::ParamDimMismatch {
            expected: params.dim(),
            got: h.param_dim(),
        });
    }
    let domain = SpatialDomain::line(base.domain());
    let density = base.density_fn();
    let logd = base.log_spatial_derivative_fn();
    let h_density = h.clone();
    let h_grad = h.clone();
    Ok(DensityFamily::new(
        format!("{}-scale", base.name()),
        domain,
        params,
        move |x, th| {
            let e = h_density.eval(th).exp();
            e * density(x[0] * e)
        },
    )
    .with_log_param_gradient(move |x, th| {
        let e = h_grad.eval(th).exp();
        let y = x[0] * e;
        let factor = 1.0 + y * logd(y);
        h_grad
            .gradient(th)
            .into_iter()
            .map(|g| g * factor)
            .collect()
    }))
}

/// Unit-variance Gaussian components with means `hⁱ(θ)`: the product's
/// Fisher metric is exactly the pullback `JᵀJ` of the embedding.
pub fn gaussian_construction(
    embedding: &Embedding,
) -> Result<DisjointProductFamily, ConstructError> {
    let base = BasePdf::standard_normal();
    let components = (0..embedding.ambient_dim())
        .map(|i| {
            location_family(&base, &embedding.component(i), embedding.params().clone())
                .map(|f| (f, 1))
        })
        .collect::<Result<Vec<_>, _>>()?;
    DisjointProductFamily::new(components)
}

/// Sech components with the `√2`-rescaled means `√2·hⁱ(θ)`; the factor
/// compensates the sech location constant `D = ½`, so the metric again
/// equals the pullback of the embedding.
pub fn sech_construction(embedding: &Embedding) -> Result<DisjointProductFamily, ConstructError> {
    let base = BasePdf::sech();
    let components = (0..embedding.ambient_dim())
        .map(|i| {
            let scaled = embedding.component(i).scaled(std::f64::consts::SQRT_2);
            location_family(&base, &scaled, embedding.params().clone()).map(|f| (f, 1))
        })
        .collect::<Result<Vec<_>, _>>()?;
    DisjointProductFamily::new(components)
}

/// Whether a mixed-construction component shifts or dilates its base.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComponentMode {
    Location,
    Scale,
}

impl ComponentMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "location" => Some(Self::Location),
            "scale" => Some(Self::Scale),
            _ => None,
        }
    }
}

/// One component per embedding dimension, each with its own base density and
/// mode. Component `i` uses the adjusted map `hⁱ/√Dᵢ` (location) or
/// `hⁱ/√Eᵢ` (scale), so the product's Fisher metric equals the pullback of
/// the original embedding regardless of the bases chosen.
pub fn mixed_construction(
    embedding: &Embedding,
    bases: &[BasePdf],
    modes: &[ComponentMode],
    spec: &QuadratureSpec,
) -> Result<DisjointProductFamily, ConstructError> {
    let n = embedding.ambient_dim();
    if bases.len() != n {
        return Err(ConstructError::ArityMismatch {
            what: "base densities",
            expected: n,
            got: bases.len(),
        });
    }
    if modes.len() != n {
        return Err(ConstructError::ArityMismatch {
            what: "component modes",
            expected: n,
            got: modes.len(),
        });
    }
    let mut components = Vec::with_capacity(n);
    for (index, (base, mode)) in bases.iter().zip(modes).enumerate() {
        let inadmissible = |reason: String| ConstructError::InadmissibleBase {
            index,
            name: base.name().to_string(),
            reason,
        };
        // Domain compatibility comes first so the error names the component
        // instead of surfacing as a bare location/scale failure.
        match mode {
            ComponentMode::Location if !base.domain().is_real_line() => {
                return Err(inadmissible(
                    "its domain is not translation-invariant".to_string(),
                ));
            }
            ComponentMode::Scale if !base.domain().is_scale_invariant() => {
                return Err(inadmissible(
                    "its domain is not scale-invariant".to_string(),
                ));
            }
            _ => {}
        }
        let constant = match mode {
            ComponentMode::Location => {
                location_constant_d(base, spec).map_err(|e| inadmissible(e.to_string()))?
            }
            ComponentMode::Scale => {
                scale_constant_e(base, spec).map_err(|e| inadmissible(e.to_string()))?
            }
        };
        if !constant.value.is_finite() || constant.value <= 0.0 {
            return Err(inadmissible(format!(
                "normalization constant {} is not a positive finite number",
                constant.value
            )));
        }
        let adjusted = embedding
            .component(index)
            .scaled(1.0 / constant.value.sqrt());
        let family = match mode {
            ComponentMode::Location => location_family(base, &adjusted, embedding.params().clone()),
            ComponentMode::Scale => scale_family(base, &adjusted, embedding.params().clone()),
        }?;
        components.push((family, 1));
    }
    DisjointProductFamily::new(components)
}

/// Real functions `fᵢ` orthonormal with weight `w ≥ 0` on a shared 1-D
/// domain: `∫ fᵢfⱼ w = δᵢⱼ`.
#[derive(Clone)]
pub struct OrthonormalBasis {
    functions: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
    weight: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    domain: Interval,
}

impl fmt::Debug for OrthonormalBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrthonormalBasis")
            .field("functions", &self.functions.len())
            .field("domain", &self.domain)
            .finish()
    }
}

impl OrthonormalBasis {
    pub fn new(
        functions: Vec<Arc<dyn Fn(f64) -> f64 + Send + Sync>>,
        weight: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        domain: Interval,
    ) -> Self {
        Self {
            functions,
            weight,
            domain,
        }
    }

    /// The first two normalized Legendre functions on (−1, 1) with unit
    /// weight: `f₁ = 1/√2`, `f₂ = √(3/2)·x`.
    pub fn normalized_legendre_pair() -> Self {
        Self::new(
            vec![
                Arc::new(|_| std::f64::consts::FRAC_1_SQRT_2),
                Arc::new(|x| (1.5f64).sqrt() * x),
            ],
            Arc::new(|_| 1.0),
            Interval::new(-1.0, 1.0).expect("static bounds"),
        )
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    /// Verify `∫ fᵢfⱼw = δᵢⱼ` for all pairs by quadrature.
    pub fn check_orthonormality(
        &self,
        spec: &QuadratureSpec,
        tol: f64,
    ) -> Result<(), ConstructError> {
        for i in 0..self.functions.len() {
            for j in i..self.functions.len() {
                let fi = Arc::clone(&self.functions[i]);
                let fj = Arc::clone(&self.functions[j]);
                let w = Arc::clone(&self.weight);
                let r = integrate_1d(
                    move |x| fi(x) * fj(x) * w(x),
                    (self.domain.lower(), self.domain.upper()),
                    spec,
                )?;
                let expected = if i == j { 1.0 } else { 0.0 };
                if (r.value - expected).abs() > tol {
                    return Err(ConstructError::OrthonormalityViolation {
                        i,
                        j,
                        value: r.value,
                        expected,
                    });
                }
            }
        }
        Ok(())
    }
}

/// The squared-expansion family `P(x;θ) = ¼(Σ hⁱ(θ)fᵢ(x))²·w(x)`.
///
/// Normalization forces `hⁱhʲδᵢⱼ = 4` — the map must land on the sphere of
/// radius 2 — and then the Fisher metric is `(∂ₐhⁱ)(∂_bhʲ)δᵢⱼ`, the pullback
/// of the flat metric. The constraint is checked numerically on a
/// 17-point-per-axis grid over the parameter box (unbounded axes are sampled
/// on a fixed window); the basis is checked for orthonormality first.
pub fn orthonormal_construction(
    basis: &OrthonormalBasis,
    h: &Embedding,
    spec: &QuadratureSpec,
) -> Result<DensityFamily, ConstructError> {
    if basis.len() != h.ambient_dim() {
        return Err(ConstructError::ArityMismatch {
            what: "basis functions",
            expected: h.ambient_dim(),
            got: basis.len(),
        });
    }
    basis.check_orthonormality(spec, CONSTRUCTION_CHECK_TOL)?;

    let mut max_deviation = 0.0f64;
    for theta in constraint_sample_grid(h.params()) {
        let hv = h.map_raw(theta.coords());
        let norm2: f64 = hv.iter().map(|c| c * c).sum();
        max_deviation = max_deviation.max((norm2 - 4.0).abs());
    }
    if max_deviation > CONSTRUCTION_CHECK_TOL {
        return Err(ConstructError::ConstraintViolation {
            max_abs_deviation: max_deviation,
        });
    }

    let functions = basis.functions.clone();
    let weight = Arc::clone(&basis.weight);
    let grad_functions = basis.functions.clone();
    let h_map = h.clone();
    let h_grad = h.clone();
    let m = h.params().dim();
    Ok(DensityFamily::new(
        format!("orthonormal[{}]", h.name()),
        SpatialDomain::line(basis.domain),
        h.params().clone(),
        move |x, th| {
            let hv = h_map.map_raw(th);
            let s: f64 = hv
                .iter()
                .zip(&functions)
                .map(|(hi, fi)| hi * fi(x[0]))
                .sum();
            0.25 * s * s * weight(x[0])
        },
    )
    .with_log_param_gradient(move |x, th| {
        let hv = h_grad.map_raw(th);
        let jac = h_grad.jacobian_raw(th);
        let fvals: Vec<f64> = grad_functions.iter().map(|f| f(x[0])).collect();
        let mut s: f64 = hv.iter().zip(&fvals).map(|(hi, fv)| hi * fv).sum();
        if s.abs() < EXPANSION_CLAMP {
            s = if s.is_sign_negative() {
                -EXPANSION_CLAMP
            } else {
                EXPANSION_CLAMP
            };
        }
        (0..m)
            .map(|a| {
                let sa: f64 = (0..fvals.len()).map(|i| jac[i][a] * fvals[i]).sum();
                2.0 * sa / s
            })
            .collect()
    }))
}

/// Deterministic sample grid for the `h·h = 4` check: 17 points per axis over
/// the parameter box, with unbounded sides clamped to ±[`CONSTRAINT_WINDOW`].
fn constraint_sample_grid(params: &ParametricDomain) -> Vec<ParamPoint> {
    let axes: Vec<Vec<f64>> = params
        .bounds()
        .iter()
        .map(|&(lo, hi)| {
            let lo = if lo.is_finite() {
                lo
            } else {
                -CONSTRAINT_WINDOW
            };
            let hi = if hi.is_finite() {
                hi
            } else {
                CONSTRAINT_WINDOW
            };
            // Stay strictly inside the open box.
            let pad = (hi - lo) / (CONSTRAINT_GRID_POINTS as f64 + 1.0);
            (1..=CONSTRAINT_GRID_POINTS)
                .map(|k| lo + pad * k as f64)
                .collect()
        })
        .collect();
    let mut points = vec![Vec::new()];
    for axis in &axes {
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
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::MetricTensor;
    use crate::embedding;
    use crate::fisher::{fisher_metric_decomposed, fisher_metric_direct, normalization_check};

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn builtin_bases_are_normalized_with_consistent_log_derivatives() {
        let s = spec();
        for base in [
            BasePdf::standard_normal(),
            BasePdf::sech(),
            BasePdf::standard_cauchy(),
            BasePdf::exponential(),
        ] {
            let iv = base.domain();
            let b = base.clone();
            let norm = integrate_1d(move |x| b.density(x), (iv.lower(), iv.upper()), &s).unwrap();
            assert!(
                (norm.value - 1.0).abs() < 1e-8,
                "{}: ∫P̂ = {}",
                base.name(),
                norm.value
            );
            let step = 1e-6;
            for x in [0.2, 0.9, 1.7, 3.1] {
                let fd =
                    ((base.density(x + step)).ln() - (base.density(x - step)).ln()) / (2.0 * step);
                let analytic = base.log_spatial_derivative(x);
                assert!(
                    (fd - analytic).abs() < 1e-6 * (1.0 + analytic.abs()),
                    "{} at {x}: {analytic} vs {fd}",
                    base.name()
                );
            }
        }
    }

    #[test]
    fn gaussian_construction_over_hyperbolic_patch_matches_conformal_target() {
        let patch = embedding::hyperbolic_patch();
        let product = gaussian_construction(&patch).unwrap();
        for (alpha, beta) in [(0.4, 1.8), (-2.0, 3.2)] {
            let theta = ParamPoint::from([alpha, beta]);
            let g = fisher_metric_decomposed(&product, &theta, &spec()).unwrap();
            let target = MetricTensor::identity(2).scale(1.0 / (beta * beta));
            assert!(
                g.tensor.max_abs_diff(&target).unwrap() < 1e-7,
                "at ({alpha}, {beta}): {:?}",
                g.tensor.rows()
            );
        }
    }

    #[test]
    fn sech_construction_over_the_line_has_unit_metric() {
        let line = embedding::Embedding::new("line", ParametricDomain::unconstrained(1), 1, |th| {
            vec![th[0]]
        })
        .unwrap()
        .with_analytic_jacobian(|_| vec![vec![1.0]]);
        let product = sech_construction(&line).unwrap();
        let g = fisher_metric_decomposed(&product, &ParamPoint::from([0.6]), &spec()).unwrap();
        assert!(
            (g.tensor.get(0, 0) - 1.0).abs() < 1e-8,
            "{}",
            g.tensor.get(0, 0)
        );
    }

    #[test]
    fn location_family_density_shifts_the_base() {
        let h = ScalarMap::linear(&[1.0]);
        let family = location_family(
            &BasePdf::standard_normal(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let p = family.density_at(&[2.0], &ParamPoint::from([2.0])).unwrap();
        assert!((p - BasePdf::standard_normal().density(0.0)).abs() < 1e-15);
    }

    #[test]
    fn location_family_rejects_half_line_bases() {
        let h = ScalarMap::linear(&[1.0]);
        let err = location_family(
            &BasePdf::exponential(),
            &h,
            ParametricDomain::unconstrained(1),
        );
        assert!(matches!(
            err,
            Err(ConstructError::DomainNotTranslationInvariant { .. })
        ));
    }

    #[test]
    fn normal_location_family_has_unit_metric() {
        let h = ScalarMap::linear(&[1.0]);
        let family = location_family(
            &BasePdf::standard_normal(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let g = fisher_metric_direct(&family, &ParamPoint::from([0.3]), &spec()).unwrap();
        assert!((g.tensor.get(0, 0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sech_location_family_with_sqrt2_has_unit_metric() {
        let h = ScalarMap::linear(&[std::f64::consts::SQRT_2]);
        let family =
            location_family(&BasePdf::sech(), &h, ParametricDomain::unconstrained(1)).unwrap();
        let g = fisher_metric_direct(&family, &ParamPoint::from([-0.4]), &spec()).unwrap();
        assert!(
            (g.tensor.get(0, 0) - 1.0).abs() < 1e-8,
            "{}",
            g.tensor.get(0, 0)
        );
    }

    #[test]
    fn constant_map_gives_zero_metric() {
        let h = ScalarMap::constant(1.5, 1);
        let family = location_family(
            &BasePdf::standard_normal(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let g = fisher_metric_direct(&family, &ParamPoint::from([0.0]), &spec()).unwrap();
        assert!(g.tensor.get(0, 0).abs() < 1e-12);
    }

    #[test]
    fn exponential_scale_family_has_unit_metric() {
        let h = ScalarMap::linear(&[1.0]);
        let family = scale_family(
            &BasePdf::exponential(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let g = fisher_metric_direct(&family, &ParamPoint::from([0.2]), &spec()).unwrap();
        assert!(
            (g.tensor.get(0, 0) - 1.0).abs() < 1e-8,
            "{}",
            g.tensor.get(0, 0)
        );
    }

    #[test]
    fn normal_scale_family_has_metric_two() {
        let h = ScalarMap::linear(&[1.0]);
        let family = scale_family(
            &BasePdf::standard_normal(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let g = fisher_metric_direct(&family, &ParamPoint::from([-0.1]), &spec()).unwrap();
        assert!(
            (g.tensor.get(0, 0) - 2.0).abs() < 1e-8,
            "{}",
            g.tensor.get(0, 0)
        );
    }

    #[test]
    fn scale_family_rejects_bounded_domains() {
        let base = BasePdf::new(
            "unit-box",
            Interval::new(0.0, 1.0).unwrap(),
            |_| 1.0,
            |_| 0.0,
        );
        let h = ScalarMap::linear(&[1.0]);
        let err = scale_family(&base, &h, ParametricDomain::unconstrained(1));
        assert!(matches!(
            err,
            Err(ConstructError::DomainNotScaleInvariant { .. })
        ));
    }

    #[test]
    fn product_density_is_product_of_components() {
        let h1 = ScalarMap::new(2, |th: &[f64]| th[0], |_| vec![1.0, 0.0]);
        let h2 = ScalarMap::new(2, |th: &[f64]| th[1], |_| vec![0.0, 1.0]);
        let params = ParametricDomain::unconstrained(2);
        let c1 = location_family(&BasePdf::standard_normal(), &h1, params.clone()).unwrap();
        let c2 = location_family(&BasePdf::sech(), &h2, params).unwrap();
        let product = disjoint_product(vec![(c1.clone(), 1), (c2.clone(), 1)]).unwrap();
        let theta = ParamPoint::from([0.3, -0.6]);
        // Deterministic pseudo-random sample points.
        let mut state = 0x9e3779b97f4a7c15u64;
        for _ in 0..100 {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x0 = ((state >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0;
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            let x1 = ((state >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0;
            let joint = product.density_at(&[x0, x1], &theta).unwrap();
            let split =
                c1.density_at(&[x0], &theta).unwrap() * c2.density_at(&[x1], &theta).unwrap();
            assert!((joint - split).abs() <= 1e-15 * split.abs().max(1.0));
        }
    }

    #[test]
    fn single_component_product_is_identity() {
        let h = ScalarMap::linear(&[1.0]);
        let family = location_family(
            &BasePdf::standard_normal(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let product = disjoint_product(vec![(family.clone(), 1)]).unwrap();
        let theta = ParamPoint::from([0.7]);
        let a = product.density_at(&[0.5], &theta).unwrap();
        let b = family.density_at(&[0.5], &theta).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }

    #[test]
    fn mismatched_parameter_dims_are_rejected() {
        let c1 = location_family(
            &BasePdf::standard_normal(),
            &ScalarMap::linear(&[1.0]),
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let c2 = location_family(
            &BasePdf::standard_normal(),
            &ScalarMap::linear(&[1.0, 0.0]),
            ParametricDomain::unconstrained(2),
        )
        .unwrap();
        let err = disjoint_product(vec![(c1, 1), (c2, 1)]);
        assert!(matches!(
            err,
            Err(ConstructError::MismatchedParametricDomains { .. })
        ));
    }

    #[test]
    fn multiplicity_doubles_the_metric() {
        let h = ScalarMap::linear(&[1.0]);
        let family = location_family(
            &BasePdf::standard_normal(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let single = disjoint_product(vec![(family.clone(), 1)]).unwrap();
        let double = disjoint_product(vec![(family, 2)]).unwrap();
        let theta = ParamPoint::from([0.1]);
        let g1 = fisher_metric_decomposed(&single, &theta, &spec()).unwrap();
        let g2 = fisher_metric_decomposed(&double, &theta, &spec()).unwrap();
        assert!((g2.tensor.get(0, 0) - 2.0 * g1.tensor.get(0, 0)).abs() < 1e-12);
    }

    #[test]
    fn theta_free_component_contributes_zero() {
        let h = ScalarMap::linear(&[1.0]);
        let active = location_family(
            &BasePdf::standard_normal(),
            &h,
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let frozen = location_family(
            &BasePdf::sech(),
            &ScalarMap::constant(0.8, 1),
            ParametricDomain::unconstrained(1),
        )
        .unwrap();
        let with_frozen = disjoint_product(vec![(active.clone(), 1), (frozen, 1)]).unwrap();
        let alone = disjoint_product(vec![(active, 1)]).unwrap();
        let theta = ParamPoint::from([-0.2]);
        let g_with = fisher_metric_decomposed(&with_frozen, &theta, &spec()).unwrap();
        let g_alone = fisher_metric_decomposed(&alone, &theta, &spec()).unwrap();
        assert!((g_with.tensor.get(0, 0) - g_alone.tensor.get(0, 0)).abs() < 1e-10);
    }

    #[test]
    fn gaussian_construction_over_sphere_matches_pullback() {
        let sphere = embedding::sphere2();
        let product = gaussian_construction(&sphere).unwrap();
        let theta = ParamPoint::from([1.0, 1.2]);
        let g = fisher_metric_decomposed(&product, &theta, &spec()).unwrap();
        let target = sphere.pullback_metric(&theta).unwrap();
        assert!(g.tensor.max_abs_diff(&target).unwrap() < 1e-7);
    }

    #[test]
    fn constant_embedding_gives_zero_metric() {
        let constant =
            embedding::Embedding::new("constant", ParametricDomain::unconstrained(1), 2, |_| {
                vec![1.0, -2.0]
            })
            .unwrap();
        let product = gaussian_construction(&constant).unwrap();
        let g = fisher_metric_decomposed(&product, &ParamPoint::from([0.0]), &spec()).unwrap();
        assert!(g.tensor.max_abs_diff(&MetricTensor::zeros(1)).unwrap() < 1e-12);
    }

    #[test]
    fn sech_and_gaussian_constructions_agree() {
        let sphere = embedding::sphere2();
        let theta = ParamPoint::from([2.0, 0.9]);
        let g_gauss =
            fisher_metric_decomposed(&gaussian_construction(&sphere).unwrap(), &theta, &spec())
                .unwrap();
        let g_sech =
            fisher_metric_decomposed(&sech_construction(&sphere).unwrap(), &theta, &spec())
                .unwrap();
        assert!(g_gauss.tensor.max_abs_diff(&g_sech.tensor).unwrap() < 1e-5);
    }

    #[test]
    fn mixed_construction_all_gaussian_equals_gaussian_construction() {
        let circle = embedding::circle(2.0).unwrap();
        let bases = vec![BasePdf::standard_normal(), BasePdf::standard_normal()];
        let modes = vec![ComponentMode::Location, ComponentMode::Location];
        let mixed = mixed_construction(&circle, &bases, &modes, &spec()).unwrap();
        let gauss = gaussian_construction(&circle).unwrap();
        let theta = ParamPoint::from([0.8]);
        let x = [0.4, -1.3];
        let a = mixed.density_at(&x, &theta).unwrap();
        let b = gauss.density_at(&x, &theta).unwrap();
        // D(normal) = 1 up to quadrature error, so the densities agree to
        // the same precision.
        assert!((a - b).abs() < 1e-9 * b.max(1.0), "{a} vs {b}");
    }

    #[test]
    fn mixed_construction_checks_arity() {
        let circle = embedding::circle(2.0).unwrap();
        let err = mixed_construction(
            &circle,
            &[BasePdf::standard_normal()],
            &[ComponentMode::Location],
            &spec(),
        );
        assert!(matches!(err, Err(ConstructError::ArityMismatch { .. })));
    }

    #[test]
    fn mixed_construction_names_inadmissible_component() {
        let circle = embedding::circle(2.0).unwrap();
        // The exponential base lives on (0,∞): not translation-invariant.
        let bases = vec![BasePdf::standard_normal(), BasePdf::exponential()];
        let modes = vec![ComponentMode::Location, ComponentMode::Location];
        let err = mixed_construction(&circle, &bases, &modes, &spec());
        match err {
            Err(ConstructError::InadmissibleBase { index: 1, name, .. }) => {
                assert_eq!(name, "exponential");
            }
            other => panic!("expected InadmissibleBase for component 1, got {other:?}"),
        }
    }

    #[test]
    fn legendre_pair_is_orthonormal() {
        OrthonormalBasis::normalized_legendre_pair()
            .check_orthonormality(&spec(), 1e-10)
            .unwrap();
    }

    #[test]
    fn orthonormality_check_catches_unnormalized_functions() {
        let basis = OrthonormalBasis::new(
            vec![Arc::new(|_| 1.0), Arc::new(|x| x)],
            Arc::new(|_| 1.0),
            Interval::new(-1.0, 1.0).unwrap(),
        );
        let err = basis.check_orthonormality(&spec(), 1e-8);
        assert!(matches!(
            err,
            Err(ConstructError::OrthonormalityViolation { .. })
        ));
    }

    #[test]
    fn orthonormal_construction_on_radius_two_circle() {
        let basis = OrthonormalBasis::normalized_legendre_pair();
        let circle = embedding::circle(2.0).unwrap();
        let family = orthonormal_construction(&basis, &circle, &spec()).unwrap();
        let theta = ParamPoint::from([0.9]);
        let norm = normalization_check(&family, &theta, &spec()).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-9, "{}", norm.value);
        let g = fisher_metric_direct(&family, &theta, &spec()).unwrap();
        assert!(
            (g.tensor.get(0, 0) - 4.0).abs() < 1e-7,
            "{}",
            g.tensor.get(0, 0)
        );
    }

    #[test]
    fn expansion_identity_reproduces_the_pullback() {
        // ∫ (Σᵢ ∂ₐhⁱ fᵢ)(Σⱼ ∂_b hʲ fⱼ) w dx collapses to (∂ₐh)·(∂_b h) by
        // orthonormality; quadrature confirms it for the Legendre pair over
        // the radius-2 circle, where |∂ₜh|² = 4.
        let basis = OrthonormalBasis::normalized_legendre_pair();
        let circle = embedding::circle(2.0).unwrap();
        for t in [0.3, 1.1, 2.6, 4.4] {
            let jac = circle.jacobian_at(&ParamPoint::from([t])).unwrap();
            let f1 = Arc::clone(&basis.functions[0]);
            let f2 = Arc::clone(&basis.functions[1]);
            let w = Arc::clone(&basis.weight);
            let (c1, c2) = (jac[0][0], jac[1][0]);
            let r = integrate_1d(
                move |x| {
                    let s = c1 * f1(x) + c2 * f2(x);
                    s * s * w(x)
                },
                (-1.0, 1.0),
                &spec(),
            )
            .unwrap();
            let expected = c1 * c1 + c2 * c2;
            assert!((r.value - expected).abs() < 1e-10, "t = {t}: {}", r.value);
            assert!((expected - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn orthonormal_construction_rejects_radius_one() {
        let basis = OrthonormalBasis::normalized_legendre_pair();
        let circle = embedding::circle(1.0).unwrap();
        let err = orthonormal_construction(&basis, &circle, &spec());
        match err {
            Err(ConstructError::ConstraintViolation { max_abs_deviation }) => {
                assert!((max_abs_deviation - 3.0).abs() < 1e-12);
            }
            other => panic!("expected ConstraintViolation, got {other:?}"),
        }
    }

    #[test]
    fn constant_orthonormal_map_is_normalized_with_zero_metric() {
        let basis = OrthonormalBasis::normalized_legendre_pair();
        let constant =
            embedding::Embedding::new("constant", ParametricDomain::unconstrained(1), 2, |_| {
                vec![2.0, 0.0]
            })
            .unwrap();
        let family = orthonormal_construction(&basis, &constant, &spec()).unwrap();
        let theta = ParamPoint::from([0.0]);
        let norm = normalization_check(&family, &theta, &spec()).unwrap();
        assert!((norm.value - 1.0).abs() < 1e-10);
        let g = fisher_metric_direct(&family, &theta, &spec()).unwrap();
        assert!(g.tensor.get(0, 0).abs() < 1e-12);
    }

    #[test]
    fn product_normalization_matches_box_integral() {
        let sphere = embedding::sphere2();
        let product = gaussian_construction(&sphere).unwrap();
        let theta = ParamPoint::from([1.5, 1.5]);
        let r = product.normalization_check(&theta, &spec()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9, "{}", r.value);
    }
}
