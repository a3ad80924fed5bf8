//! Two different density families with the same Fisher metric: the round
//! metric of the 2-sphere.
//!
//! The chart h(θ, φ) = (cos θ sin φ, sin θ sin φ, cos φ) has pullback
//! diag(sin²φ, 1). A product of three unit-variance Gaussians with means
//! hⁱ(θ, φ) reproduces it — and so does a product of three sech densities
//! with √2-rescaled means. The construction is massively non-unique; only
//! the means' derivatives survive into the metric.
//!
//! Run with: cargo run --example sphere_constructions

use infogeom::construct::{gaussian_construction, sech_construction};
use infogeom::embedding;
use infogeom::verify::{verify_construction, AxisSpec, Family, VerificationGrid};
use infogeom::{ParamPoint, QuadratureSpec};

fn main() {
    let spec = QuadratureSpec::default();
    let sphere = embedding::sphere2();

    let theta = ParamPoint::from([1.0, 1.2]);
    println!("pullback metric at (θ, φ) = (1.0, 1.2):");
    println!("  {:?}", sphere.pullback_metric(&theta).unwrap().rows());

    let gauss = gaussian_construction(&sphere).unwrap();
    let sech = sech_construction(&sphere).unwrap();

    // The two joint densities are genuinely different functions...
    let x = [0.2, -0.4, 0.9];
    println!("\njoint densities at x = {x:?}:");
    println!("  gaussian: {:.6e}", gauss.density_at(&x, &theta).unwrap());
    println!("  sech:     {:.6e}", sech.density_at(&x, &theta).unwrap());

    // ...but their Fisher metrics agree on the whole chart (pole bands
    // excluded: the pullback degenerates at φ ∈ {0, π} by geometry).
    let grid =
        VerificationGrid::from_axes(vec![AxisSpec::new(0.3, 6.0, 5), AxisSpec::new(0.3, 2.8, 5)])
            .unwrap()
            .with_exclusion(|p| {
                let phi = p.get(1);
                phi < 0.05 || (std::f64::consts::PI - phi).abs() < 0.05
            });

    let target = sphere.pullback_field();
    for (label, family) in [
        ("gaussian", Family::Product(gauss)),
        ("sech", Family::Product(sech)),
    ] {
        let report = verify_construction(&family, &target, &grid, 1e-5, &spec).unwrap();
        println!(
            "\n{label} construction vs pullback: {} (max abs err {:.3e} over {} points)",
            if report.pass { "PASS" } else { "FAIL" },
            report.summary.max_abs_err,
            report.summary.points_checked
        );
    }
}
