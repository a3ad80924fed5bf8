//! Compute Fisher metrics with the direct engine and compare them against
//! closed forms.
//!
//! The univariate normal family has metric diag(1/σ², 2/σ²); the Cauchy
//! family has δ_ab/(2γ²). Both fall out of one integral,
//! g_ab = ∫ P ∂ₐln P ∂_b ln P dx, evaluated here by adaptive quadrature.
//!
//! Run with: cargo run --example direct_metric

use infogeom::fisher::fisher_metric_direct;
use infogeom::{DensityFamily, MetricTensor, ParamPoint, QuadratureSpec};

fn print_metric(label: &str, tensor: &MetricTensor) {
    println!("{label}:");
    for row in tensor.rows() {
        println!("    {row:?}");
    }
}

fn main() {
    let spec = QuadratureSpec::default();

    let normal = DensityFamily::univariate_normal();
    for (mu, sigma) in [(0.0, 1.0), (3.0, 0.5), (-1.0, 2.0)] {
        let theta = ParamPoint::from([mu, sigma]);
        let computed = fisher_metric_direct(&normal, &theta, &spec).unwrap();
        let closed = MetricTensor::from_upper_triangle(2, |a, b| match (a, b) {
            (0, 0) => 1.0 / (sigma * sigma),
            (1, 1) => 2.0 / (sigma * sigma),
            _ => 0.0,
        });
        print_metric(
            &format!("normal at (μ, σ) = ({mu}, {sigma})"),
            &computed.tensor,
        );
        println!(
            "    closed-form deviation: {:.3e} ({} integrand evaluations)\n",
            computed.tensor.max_abs_diff(&closed).unwrap(),
            computed.evaluations
        );
    }

    let cauchy = DensityFamily::univariate_cauchy();
    for gamma in [0.5, 1.0, 2.0] {
        let theta = ParamPoint::from([0.0, gamma]);
        let computed = fisher_metric_direct(&cauchy, &theta, &spec).unwrap();
        let closed = MetricTensor::identity(2).scale(1.0 / (2.0 * gamma * gamma));
        print_metric(
            &format!("cauchy at (x₀, γ) = (0, {gamma})"),
            &computed.tensor,
        );
        println!(
            "    closed-form deviation: {:.3e}\n",
            computed.tensor.max_abs_diff(&closed).unwrap()
        );
    }

    // The metric transforms as a (0,2)-tensor: under θ = φ(ψ) with Jacobian
    // J, the metric in ψ-coordinates is Jᵀ g J. Check with φ(ψ) = (ψ¹, e^ψ²).
    let psi: [f64; 2] = [0.4, -0.3];
    let theta = ParamPoint::from([psi[0], psi[1].exp()]);
    let g_theta = fisher_metric_direct(&normal, &theta, &spec).unwrap();
    let jac = vec![vec![1.0, 0.0], vec![0.0, psi[1].exp()]];
    let congruent = g_theta.tensor.congruence(&jac).unwrap();

    let reparam = DensityFamily::new(
        "normal-log-sigma",
        infogeom::SpatialDomain::real_line(),
        infogeom::ParametricDomain::unconstrained(2),
        |x, th| {
            let sigma = th[1].exp();
            let z = (x[0] - th[0]) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        },
    );
    let g_psi = fisher_metric_direct(&reparam, &ParamPoint::from(psi), &spec).unwrap();
    print_metric("normal reparameterized by (μ, ln σ)", &g_psi.tensor);
    println!(
        "    congruence Jᵀ g J deviation: {:.3e}",
        g_psi.tensor.max_abs_diff(&congruent).unwrap()
    );
}
