//! A hyperbolic metric realized by a three-component product of *different*
//! base densities: one Gaussian, one sech, one Cauchy.
//!
//! The patch {(α, β) : β > 1} embeds isometrically in ℝ³ with pullback
//! β⁻²δ. Component i shifts its base by hⁱ/√Dᵢ, so each contributes
//! (∂ₐhⁱ)(∂_bhⁱ) to the metric and the sum telescopes to the target. For
//! the sech and Cauchy bases D = ½, which is where the √2 factors come from.
//!
//! Run with: cargo run --example hyperbolic_mixed

use infogeom::fisher::{fisher_metric_decomposed, fisher_metric_direct};
use infogeom::verify::{hyperbolic_component_closed_forms, hyperbolic_mixed_family, run_demo};
use infogeom::{ParamPoint, QuadratureSpec};

fn main() {
    let spec = QuadratureSpec::default();
    let family = hyperbolic_mixed_family(&spec).unwrap();

    let (alpha, beta) = (0.0, 2.0);
    let theta = ParamPoint::from([alpha, beta]);
    println!("component metrics at (α, β) = ({alpha}, {beta}):");
    let closed = hyperbolic_component_closed_forms(alpha, beta);
    for (i, (component, _)) in family.components().iter().enumerate() {
        let g = fisher_metric_direct(component, &theta, &spec).unwrap();
        println!(
            "  g(P{}) = {:?}   (closed-form deviation {:.2e})",
            i + 1,
            g.tensor.rows(),
            g.tensor.max_abs_diff(&closed[i]).unwrap()
        );
    }

    let total = fisher_metric_decomposed(&family, &theta, &spec).unwrap();
    println!("\nsum of components:");
    println!("  {:?}", total.tensor.rows());
    println!("  target β⁻²δ = [[0.25, 0], [0, 0.25]] at β = 2");

    // The pinned demo sweeps a 5×5 grid over (−3, 3) × (1.1, 4).
    let report = run_demo("hyperbolic-mixed").unwrap();
    println!(
        "\ngrid verification: {} (max abs err {:.3e} at {:?})",
        if report.pass { "PASS" } else { "FAIL" },
        report.summary.max_abs_err,
        report.summary.worst_point
    );
}
