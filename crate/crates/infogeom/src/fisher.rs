//! Fisher-metric engines and the location/scale normalization constants.
//!
//! Three routes to the same tensor:
//!
//! * the direct engine integrates `(∂ₐP)(∂_bP)/P` over the spatial domain;
//! * the decomposed engine exploits additivity over spatially disjoint
//!   products, `g(⨀ Pᵢ^{⊙eᵢ}) = Σ eᵢ·g(Pᵢ)`, reducing everything to 1-D
//!   integrals;
//! * the symmetry engine evaluates the change-of-variables formula for a
//!   family generated from a fixed base density by a parametric
//!   diffeomorphism of the spatial domain.
//!
//! The scalar constants `D = ∫ P̂ (d ln P̂/dx)² dx` and
//! `E = ∫ P̂ (1 + x·d ln P̂/dx)² dx` convert location and scale families'
//! metrics into multiples of `(∂ₐh)(∂_bh)`.

use std::cell::RefCell;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::construct::{BasePdf, DisjointProductFamily};
use crate::domain::{
    DensityFamily, DomainError, MetricTensor, ParamPoint, ParametricDomain, ScalarMap,
    DENSITY_FLOOR,
};
use crate::quadrature::{
    integrate_1d, integrate_box, IntegrationResult, QuadratureError, QuadratureSpec, MAX_BOX_DIM,
};

#[derive(Debug, Error)]
pub enum FisherError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("quadrature failed for metric entry ({a},{b}): {source}")]
    Entry {
        a: usize,
        b: usize,
        #[source]
        source: QuadratureError,
    },
    #[error("component {index} ({name}): {source}")]
    Component {
        index: usize,
        name: String,
        #[source]
        source: Box<FisherError>,
    },
    #[error(
        "spatial dimension {dim} is too large for the direct engine (max {max}); \
         use the decomposed engine on the product structure instead"
    )]
    SpatialDimTooLarge { dim: usize, max: usize },
    #[error("diffeomorphism is not orientation-preserving: f_x = {fx:.6e} at x = {x:.6e}")]
    InvalidDiffeo { x: f64, fx: f64 },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
}

/// A computed metric together with quadrature bookkeeping.
#[derive(Debug, Clone)]
pub struct MetricComputation {
    pub tensor: MetricTensor,
    /// Worst per-entry quadrature error estimate.
    pub worst_error: f64,
    /// Total integrand evaluations across all entries.
    pub evaluations: u64,
}

type SpatialParamFn = Arc<dyn Fn(f64, &[f64]) -> f64 + Send + Sync>;
type SpatialParamVecFn = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

/// A differentiable family of diffeomorphisms `f(·;θ): X → X` with the
/// derivative data needed by the symmetry formula: `f_x = ∂f/∂x`,
/// `f_a = ∂ₐf`, `f_ax = ∂ₐ∂ₓf`, and the spatial inverse `x = f⁻¹(y;θ)`.
#[derive(Clone)]
pub struct DiffeoFamily {
    params: ParametricDomain,
    f: SpatialParamFn,
    f_x: SpatialParamFn,
    f_a: SpatialParamVecFn,
    f_ax: SpatialParamVecFn,
    inverse: SpatialParamFn,
}

impl fmt::Debug for DiffeoFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiffeoFamily")
            .field("params", &self.params)
            .finish()
    }
}

impl DiffeoFamily {
    pub fn new<F, Fx, Fa, Fax, Inv>(
        params: ParametricDomain,
        f: F,
        f_x: Fx,
        f_a: Fa,
        f_ax: Fax,
        inverse: Inv,
    ) -> Self
    where
        F: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        Fx: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
        Fa: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
        Fax: Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static,
        Inv: Fn(f64, &[f64]) -> f64 + Send + Sync + 'static,
    {
        Self {
            params,
            f: Arc::new(f),
            f_x: Arc::new(f_x),
            f_a: Arc::new(f_a),
            f_ax: Arc::new(f_ax),
            inverse: Arc::new(inverse),
        }
    }

    /// The translation `f(x;θ) = x − h(θ)`.
    pub fn location(h: &ScalarMap, params: ParametricDomain) -> Self {
        let m = h.param_dim();
        let h_eval = h.clone();
        let h_grad = h.clone();
        let h_inv = h.clone();
        Self::new(
            params,
            move |x, th| x - h_eval.eval(th),
            |_, _| 1.0,
            move |_, th| h_grad.gradient(th).into_iter().map(|g| -g).collect(),
            move |_, _| vec![0.0; m],
            move |y, th| y + h_inv.eval(th),
        )
    }

    /// The dilation `f(x;θ) = x·e^{h(θ)}`.
    pub fn scale(h: &ScalarMap, params: ParametricDomain) -> Self {
        let h_f = h.clone();
        let h_fx = h.clone();
        let h_fa = h.clone();
        let h_fax = h.clone();
        let h_inv = h.clone();
        Self::new(
            params,
            move |x, th| x * h_f.eval(th).exp(),
            move |_, th| h_fx.eval(th).exp(),
            move |x, th| {
                let e = h_fa.eval(th).exp();
                h_fa.gradient(th).into_iter().map(|g| g * x * e).collect()
            },
            move |_, th| {
                let e = h_fax.eval(th).exp();
                h_fax.gradient(th).into_iter().map(|g| g * e).collect()
            },
            move |y, th| y * (-h_inv.eval(th)).exp(),
        )
    }

    pub fn params(&self) -> &ParametricDomain {
        &self.params
    }

    pub fn apply(&self, x: f64, theta: &[f64]) -> f64 {
        (self.f)(x, theta)
    }

    pub fn apply_inverse(&self, y: f64, theta: &[f64]) -> f64 {
        (self.inverse)(y, theta)
    }

    /// Spot-check that the supplied inverse really inverts `f(·;θ)`.
    pub fn check_inverse(
        &self,
        xs: &[f64],
        theta: &ParamPoint,
        tol: f64,
    ) -> Result<(), FisherError> {
        for &x in xs {
            let y = (self.f)(x, theta.coords());
            let back = (self.inverse)(y, theta.coords());
            if (back - x).abs() > tol * (1.0 + x.abs()) {
                return Err(FisherError::InvalidDiffeo { x, fx: f64::NAN });
            }
        }
        Ok(())
    }

    /// The family `P(x;θ) = f_x(x;θ)·P̂(f(x;θ))` induced by pushing the base
    /// density through the inverse diffeomorphism, with its analytic
    /// log-gradient `∂ₐ ln P = f_ax/f_x + (d ln P̂/dy)(f)·f_a`.
    pub fn induced_family(&self, base: &BasePdf) -> DensityFamily {
        let f = Arc::clone(&self.f);
        let fx = Arc::clone(&self.f_x);
        let fa = Arc::clone(&self.f_a);
        let fax = Arc::clone(&self.f_ax);
        let fx_grad = Arc::clone(&self.f_x);
        let f_grad = Arc::clone(&self.f);
        let base_density = base.density_fn();
        let base_logd = base.log_spatial_derivative_fn();
        let name = format!("{}-induced", base.name());
        DensityFamily::new(
            name,
            crate::domain::SpatialDomain::line(base.domain()),
            self.params.clone(),
            move |x, th| fx(x[0], th) * base_density(f(x[0], th)),
        )
        .with_log_param_gradient(move |x, th| {
            let y = f_grad(x[0], th);
            let fxv = fx_grad(x[0], th);
            let logd = base_logd(y);
            let fav = fa(x[0], th);
            let faxv = fax(x[0], th);
            fav.iter()
                .zip(&faxv)
                .map(|(a, ax)| ax / fxv + logd * a)
                .collect()
        })
    }
}

fn check_theta(params: &ParametricDomain, theta: &ParamPoint) -> Result<(), FisherError> {
    if !params.contains(theta) {
        return Err(FisherError::Domain(DomainError::OutsideParametricDomain {
            theta: theta.coords().to_vec(),
        }));
    }
    Ok(())
}

/// The direct engine: `g_ab = ∫_X (∂ₐP)(∂_bP)/P dx` entry by entry, with the
/// density clamped below by [`DENSITY_FLOOR`] in the quotient. Only the upper
/// triangle is integrated; the mirror image is exact.
pub fn fisher_metric_direct(
    family: &DensityFamily,
    theta: &ParamPoint,
    spec: &QuadratureSpec,
) -> Result<MetricComputation, FisherError> {
    check_theta(family.params(), theta)?;
    let spatial_dim = family.domain().dim();
    if spatial_dim > MAX_BOX_DIM {
        return Err(FisherError::SpatialDimTooLarge {
            dim: spatial_dim,
            max: MAX_BOX_DIM,
        });
    }
    let m = family.params().dim();
    let th = theta.coords();

    let gradient = |x: &[f64]| -> Vec<f64> {
        match family.log_param_gradient_unchecked(x, th) {
            Some(g) => g,
            None => central_log_gradient(family, x, th),
        }
    };

    let mut worst_error = 0.0f64;
    let mut evaluations = 0u64;
    let mut upper = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let integrand = |x: &[f64]| {
                let p = family.density_unchecked(x, th);
                let grad = gradient(x);
                (p * grad[a]) * (p * grad[b]) / p.max(DENSITY_FLOOR)
            };
            let result = integrate_box(integrand, family.domain(), spec)
                .map_err(|source| FisherError::Entry { a, b, source })?;
            upper[a * m + b] = result.value;
            worst_error = worst_error.max(result.error_estimate);
            evaluations += result.evaluations;
        }
    }
    Ok(MetricComputation {
        tensor: MetricTensor::from_upper_triangle(m, |a, b| upper[a * m + b]),
        worst_error,
        evaluations,
    })
}

fn central_log_gradient(family: &DensityFamily, x: &[f64], theta: &[f64]) -> Vec<f64> {
    let step = crate::domain::default_fd_step();
    let mut shifted = theta.to_vec();
    let mut grad = vec![0.0; theta.len()];
    for a in 0..theta.len() {
        let h = step * (1.0 + theta[a].abs());
        shifted[a] = theta[a] + h;
        let plus = family.density_unchecked(x, &shifted).max(DENSITY_FLOOR);
        shifted[a] = theta[a] - h;
        let minus = family.density_unchecked(x, &shifted).max(DENSITY_FLOOR);
        shifted[a] = theta[a];
        grad[a] = (plus.ln() - minus.ln()) / (2.0 * h);
    }
    grad
}

/// The decomposed engine: `Σᵢ eᵢ·g(Pᵢ)` over the components of a spatially
/// disjoint product, each component metric computed by the direct engine on
/// its own 1-D domain. Cost is linear in the number of components.
pub fn fisher_metric_decomposed(
    product: &DisjointProductFamily,
    theta: &ParamPoint,
    spec: &QuadratureSpec,
) -> Result<MetricComputation, FisherError> {
    check_theta(product.params(), theta)?;
    let m = product.params().dim();
    let mut tensor = MetricTensor::zeros(m);
    let mut worst_error = 0.0f64;
    let mut evaluations = 0u64;
    for (index, (component, multiplicity)) in product.components().iter().enumerate() {
        let part =
            fisher_metric_direct(component, theta, spec).map_err(|e| FisherError::Component {
                index,
                name: component.name().to_string(),
                source: Box::new(e),
            })?;
        let factor = f64::from(*multiplicity);
        tensor = tensor
            .add(&part.tensor.scale(factor))
            .expect("component metrics share the parameter dimension");
        worst_error += factor * part.worst_error;
        evaluations += part.evaluations;
    }
    Ok(MetricComputation {
        tensor,
        worst_error,
        evaluations,
    })
}

/// The symmetry engine: for `P(x;θ) = f_x·P̂(f(x;θ))` the metric is
///
/// ```text
/// g_ab = ∫_X [ f_ax f_bx/(f_x)² · P̂(y)
///            + (∂_y(f_a f_b) + f_a f_b · d ln P̂/dy) · dP̂/dy ] dy
/// ```
///
/// with every x-dependence rewritten through the supplied inverse
/// `x = f⁻¹(y;θ)`. The base density must be strictly positive on `X` and the
/// diffeomorphism orientation-preserving (`f_x > 0`); a non-positive `f_x`
/// at any node aborts with an invalid-diffeomorphism error.
pub fn fisher_metric_symmetry(
    base: &BasePdf,
    diffeo: &DiffeoFamily,
    theta: &ParamPoint,
    spec: &QuadratureSpec,
) -> Result<MetricComputation, FisherError> {
    check_theta(diffeo.params(), theta)?;
    let m = diffeo.params().dim();
    let th = theta.coords();
    let interval = base.domain();

    let bad_diffeo: RefCell<Option<FisherError>> = RefCell::new(None);
    let mut worst_error = 0.0f64;
    let mut evaluations = 0u64;
    let mut upper = vec![0.0; m * m];
    for a in 0..m {
        for b in a..m {
            let integrand = |y: f64| {
                let x = diffeo.apply_inverse(y, th);
                let fx = (diffeo.f_x)(x, th);
                if fx <= 0.0 || !fx.is_finite() {
                    *bad_diffeo.borrow_mut() = Some(FisherError::InvalidDiffeo { x, fx });
                    return f64::NAN;
                }
                let fa = (diffeo.f_a)(x, th);
                let fax = (diffeo.f_ax)(x, th);
                let py = base.density(y);
                let logd = base.log_spatial_derivative(y);
                let dpy = py * logd;
                let dy_fafb = (fax[a] * fa[b] + fa[a] * fax[b]) / fx;
                fax[a] * fax[b] / (fx * fx) * py + (dy_fafb + fa[a] * fa[b] * logd) * dpy
            };
            let result = integrate_1d(integrand, (interval.lower(), interval.upper()), spec)
                .map_err(|source| match bad_diffeo.borrow_mut().take() {
                    Some(invalid) => invalid,
                    None => FisherError::Entry { a, b, source },
                })?;
            upper[a * m + b] = result.value;
            worst_error = worst_error.max(result.error_estimate);
            evaluations += result.evaluations;
        }
    }
    Ok(MetricComputation {
        tensor: MetricTensor::from_upper_triangle(m, |a, b| upper[a * m + b]),
        worst_error,
        evaluations,
    })
}

/// The location constant `D = ∫ (∂P̂/∂x)(∂ ln P̂/∂x) dx = ∫ P̂·(d ln P̂/dx)² dx`.
/// A non-convergent integral signals a base that is inadmissible for
/// location families.
pub fn location_constant_d(
    base: &BasePdf,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult, FisherError> {
    let interval = base.domain();
    let integrand = |x: f64| {
        let logd = base.log_spatial_derivative(x);
        base.density(x) * logd * logd
    };
    Ok(integrate_1d(
        integrand,
        (interval.lower(), interval.upper()),
        spec,
    )?)
}

/// The scale constant `E = ∫ P̂·(1 + x·d ln P̂/dx)² dx`.
pub fn scale_constant_e(
    base: &BasePdf,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult, FisherError> {
    let interval = base.domain();
    let integrand = |x: f64| {
        let t = 1.0 + x * base.log_spatial_derivative(x);
        base.density(x) * t * t
    };
    Ok(integrate_1d(
        integrand,
        (interval.lower(), interval.upper()),
        spec,
    )?)
}

/// Integrate the density over the spatial domain; callers compare the result
/// against one.
pub fn normalization_check(
    family: &DensityFamily,
    theta: &ParamPoint,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult, FisherError> {
    check_theta(family.params(), theta)?;
    let th = theta.coords().to_vec();
    Ok(integrate_box(
        |x| family.density_unchecked(x, &th),
        family.domain(),
        spec,
    )?)
}
