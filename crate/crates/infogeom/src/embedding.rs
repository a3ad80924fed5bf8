//! Embeddings `h: M → ℝⁿ` with Jacobian access, the pullback metric `JᵀJ`,
//! and a small catalog of ready-made maps.
//!
//! Target metrics for the construction pipeline arise as Euclidean pullbacks
//! of such maps: `g_ab = Σᵢ (∂ₐhⁱ)(∂_bhⁱ)`. Embeddings may also be parsed
//! from expression strings; see [`parse_expression`] and the grammar in
//! [`crate::expr`].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::domain::{
    default_fd_step, DomainError, MetricField, MetricTensor, ParamPoint, ParametricDomain,
    ScalarMap,
};
use crate::expr::{self, ParseError};

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error("ambient dimension {ambient} is smaller than the parameter dimension {params}; an immersion needs n ≥ m")]
    AmbientTooSmall { ambient: usize, params: usize },
    #[error("embedding map returned {got} components, expected {expected}")]
    WrongComponentCount { expected: usize, got: usize },
    #[error("circle radius must be positive, got {radius}")]
    InvalidRadius { radius: f64 },
    #[error("an embedding needs at least one declared parameter")]
    NoParameters,
    #[error(transparent)]
    Parse(#[from] ParseError),
}

type MapFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
type JacobianFn = Arc<dyn Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync>;

#[derive(Clone)]
enum Jacobian {
    Analytic(JacobianFn),
    CentralDifference,
}

/// A differentiable map `h: M → ℝⁿ` with `n ≥ m`. The Jacobian is either
/// analytic or a central finite difference with the shared step rule.
#[derive(Clone)]
pub struct Embedding {
    name: String,
    params: ParametricDomain,
    ambient_dim: usize,
    map: MapFn,
    jacobian: Jacobian,
}

impl fmt::Debug for Embedding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Embedding")
            .field("name", &self.name)
            .field("params", &self.params)
            .field("ambient_dim", &self.ambient_dim)
            .field(
                "jacobian",
                &match self.jacobian {
                    Jacobian::Analytic(_) => "analytic",
                    Jacobian::CentralDifference => "central-difference",
                },
            )
            .finish()
    }
}

impl Embedding {
    pub fn new<F>(
        name: impl Into<String>,
        params: ParametricDomain,
        ambient_dim: usize,
        map: F,
    ) -> Result<Self, EmbeddingError>
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        if ambient_dim < params.dim() {
            return Err(EmbeddingError::AmbientTooSmall {
                ambient: ambient_dim,
                params: params.dim(),
            });
        }
        Ok(Self {
            name: name.into(),
            params,
            ambient_dim,
            map: Arc::new(map),
            jacobian: Jacobian::CentralDifference,
        })
    }

    pub fn with_analytic_jacobian<J>(mut self, jacobian: J) -> Self
    where
        J: Fn(&[f64]) -> Vec<Vec<f64>> + Send + Sync + 'static,
    {
        self.jacobian = Jacobian::Analytic(Arc::new(jacobian));
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn params(&self) -> &ParametricDomain {
        &self.params
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn param_dim(&self) -> usize {
        self.params.dim()
    }

    pub fn has_analytic_jacobian(&self) -> bool {
        matches!(self.jacobian, Jacobian::Analytic(_))
    }

    /// Evaluate `h(θ)` with domain and shape validation.
    pub fn map_at(&self, theta: &ParamPoint) -> Result<Vec<f64>, EmbeddingError> {
        if !self.params.contains(theta) {
            return Err(DomainError::OutsideParametricDomain {
                theta: theta.coords().to_vec(),
            }
            .into());
        }
        let value = (self.map)(theta.coords());
        if value.len() != self.ambient_dim {
            return Err(EmbeddingError::WrongComponentCount {
                expected: self.ambient_dim,
                got: value.len(),
            });
        }
        Ok(value)
    }

    /// The Jacobian `J[i][a] = ∂ₐhⁱ` as `n` rows of `m` entries.
    pub fn jacobian_at(&self, theta: &ParamPoint) -> Result<Vec<Vec<f64>>, EmbeddingError> {
        if !self.params.contains(theta) {
            return Err(DomainError::OutsideParametricDomain {
                theta: theta.coords().to_vec(),
            }
            .into());
        }
        Ok(self.jacobian_raw(theta.coords()))
    }

    /// Unvalidated map evaluation; used on pre-checked grid points.
    pub(crate) fn map_raw(&self, theta: &[f64]) -> Vec<f64> {
        (self.map)(theta)
    }

    pub(crate) fn jacobian_raw(&self, theta: &[f64]) -> Vec<Vec<f64>> {
        match &self.jacobian {
            Jacobian::Analytic(j) => j(theta),
            Jacobian::CentralDifference => {
                let step = default_fd_step();
                let m = theta.len();
                let mut rows = vec![vec![0.0; m]; self.ambient_dim];
                let mut shifted = theta.to_vec();
                for a in 0..m {
                    let h = step * (1.0 + theta[a].abs());
                    shifted[a] = theta[a] + h;
                    let plus = (self.map)(&shifted);
                    shifted[a] = theta[a] - h;
                    let minus = (self.map)(&shifted);
                    shifted[a] = theta[a];
                    for i in 0..self.ambient_dim.min(plus.len()).min(minus.len()) {
                        rows[i][a] = (plus[i] - minus[i]) / (2.0 * h);
                    }
                }
                rows
            }
        }
    }

    /// Component `hⁱ` as a scalar map with gradient row `i` of the Jacobian.
    pub fn component(&self, i: usize) -> ScalarMap {
        assert!(i < self.ambient_dim, "component index out of range");
        let map = Arc::clone(&self.map);
        let this = self.clone();
        ScalarMap::new(
            self.params.dim(),
            move |theta| map(theta)[i],
            move |theta| this.jacobian_raw(theta)[i].clone(),
        )
    }

    /// The pullback metric `g = JᵀJ` at a parameter point.
    pub fn pullback_metric(&self, theta: &ParamPoint) -> Result<MetricTensor, EmbeddingError> {
        let jac = self.jacobian_at(theta)?;
        let m = self.params.dim();
        Ok(MetricTensor::from_upper_triangle(m, |a, b| {
            jac.iter().map(|row| row[a] * row[b]).sum()
        }))
    }

    /// The pullback as a metric field over the embedding's parameter domain.
    /// Evaluation skips domain validation so the field is total on grids that
    /// were checked once up front.
    pub fn pullback_field(&self) -> MetricField {
        let this = self.clone();
        MetricField::new(self.params.clone(), move |theta| {
            let jac = this.jacobian_raw(theta.coords());
            MetricTensor::from_upper_triangle(theta.dim(), |a, b| {
                jac.iter().map(|row| row[a] * row[b]).sum()
            })
        })
    }

    /// True where the Jacobian drops below full column rank, i.e. the
    /// pullback is only positive semidefinite there.
    pub fn is_rank_deficient_at(
        &self,
        theta: &ParamPoint,
        tol: f64,
    ) -> Result<bool, EmbeddingError> {
        let g = self.pullback_metric(theta)?;
        Ok(g.min_eigenvalue() < tol)
    }
}

/// The unit-sphere chart `h(θ, φ) = (cos θ sin φ, sin θ sin φ, cos φ)` on
/// `(0, 2π) × (0, π)`, with analytic Jacobian. Its pullback is
/// `diag(sin²φ, 1)`, degenerate at the poles `φ ∈ {0, π}`.
pub fn sphere2() -> Embedding {
    let params = ParametricDomain::from_bounds(vec![
        (0.0, 2.0 * std::f64::consts::PI),
        (0.0, std::f64::consts::PI),
    ])
    .expect("static bounds");
    Embedding::new("sphere2", params, 3, |th| {
        let (theta, phi) = (th[0], th[1]);
        vec![theta.cos() * phi.sin(), theta.sin() * phi.sin(), phi.cos()]
    })
    .expect("3 >= 2")
    .with_analytic_jacobian(|th| {
        let (theta, phi) = (th[0], th[1]);
        vec![
            vec![-theta.sin() * phi.sin(), theta.cos() * phi.cos()],
            vec![theta.cos() * phi.sin(), theta.sin() * phi.cos()],
            vec![0.0, -phi.sin()],
        ]
    })
}

/// An isometric embedding of a hyperbolic half-plane patch
/// `{(α, β) : β > 1}` into ℝ³:
///
/// ```text
/// h = (cos α/β, sin α/β, ln(β + √(β²−1)) − √(β²−1)/β)
/// ```
///
/// Its pullback is `β⁻²δ`. The third component's derivative decays like
/// `√(β²−1)/β²`, so verification grids should keep a margin above `β = 1`.
pub fn hyperbolic_patch() -> Embedding {
    let params = ParametricDomain::from_bounds(vec![
        (f64::NEG_INFINITY, f64::INFINITY),
        (1.0, f64::INFINITY),
    ])
    .expect("static bounds");
    Embedding::new("hyperbolic", params, 3, |th| {
        let (alpha, beta) = (th[0], th[1]);
        let s = (beta * beta - 1.0).sqrt();
        vec![
            alpha.cos() / beta,
            alpha.sin() / beta,
            (beta + s).ln() - s / beta,
        ]
    })
    .expect("3 >= 2")
    .with_analytic_jacobian(|th| {
        let (alpha, beta) = (th[0], th[1]);
        let s = (beta * beta - 1.0).sqrt();
        vec![
            vec![-alpha.sin() / beta, -alpha.cos() / (beta * beta)],
            vec![alpha.cos() / beta, -alpha.sin() / (beta * beta)],
            vec![0.0, s / (beta * beta)],
        ]
    })
}

/// The circle `h(t) = r·(cos t, sin t)` with analytic Jacobian; `h·h = r²`
/// everywhere, so radius 2 satisfies the orthonormal construction's
/// constraint.
pub fn circle(radius: f64) -> Result<Embedding, EmbeddingError> {
    if !radius.is_finite() || radius <= 0.0 {
        return Err(EmbeddingError::InvalidRadius { radius });
    }
    let r = radius;
    Ok(Embedding::new(
        format!("circle(r={radius})"),
        ParametricDomain::unconstrained(1),
        2,
        move |th| vec![r * th[0].cos(), r * th[0].sin()],
    )
    .expect("2 >= 1")
    .with_analytic_jacobian(move |th| vec![vec![-r * th[0].sin()], vec![r * th[0].cos()]]))
}

/// Parse an embedding from expression source: components separated by `;`,
/// identifiers restricted to the declared parameter names plus the constant
/// `pi`. The resulting map evaluates the parsed expressions; its Jacobian is
/// a central finite difference.
pub fn parse_expression(source: &str, param_names: &[&str]) -> Result<Embedding, EmbeddingError> {
    if param_names.is_empty() {
        return Err(EmbeddingError::NoParameters);
    }
    let components = expr::parse_components(source, param_names)?;
    let m = param_names.len();
    let n = components.len();
    Embedding::new(
        format!("expr({source})"),
        ParametricDomain::unconstrained(m),
        n,
        move |theta| components.iter().map(|c| c.eval(theta)).collect(),
    )
}

/// Look up a catalog embedding by CLI name.
pub fn by_name(name: &str) -> Option<Embedding> {
    match name {
        "sphere2" => Some(sphere2()),
        "hyperbolic" => Some(hyperbolic_patch()),
        "circle2" => Some(circle(2.0).expect("positive radius")),
        _ => None,
    }
}
