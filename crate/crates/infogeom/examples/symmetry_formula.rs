//! The change-of-variables route to the Fisher metric.
//!
//! When a family arises from a fixed base density P̂ through a parametric
//! diffeomorphism y = f(x; θ) of the spatial domain, the metric can be
//! written as a single integral in y over base-density data and the
//! derivatives f_x, f_a, f_ax — no parameter derivatives of the density
//! needed. Translations f = x − h(θ) and dilations f = x·e^{h(θ)} are the
//! two workhorse symmetries; both reduce to (∂ₐh)(∂_bh) times a constant.
//!
//! Run with: cargo run --example symmetry_formula

use infogeom::construct::BasePdf;
use infogeom::fisher::{fisher_metric_direct, fisher_metric_symmetry, DiffeoFamily};
use infogeom::{ParamPoint, ParametricDomain, QuadratureSpec, ScalarMap};

fn main() {
    let spec = QuadratureSpec::default();
    let params = ParametricDomain::unconstrained(2);
    // A scalar map over two parameters, so the metrics below are full 2×2.
    let h = ScalarMap::linear(&[0.8, -0.5]);

    let cases: Vec<(&str, BasePdf, DiffeoFamily)> = vec![
        (
            "translation of the normal base",
            BasePdf::standard_normal(),
            DiffeoFamily::location(&h, params.clone()),
        ),
        (
            "dilation of the exponential base",
            BasePdf::exponential(),
            DiffeoFamily::scale(&h, params.clone()),
        ),
        (
            "dilation of the normal base",
            BasePdf::standard_normal(),
            DiffeoFamily::scale(&h, params),
        ),
    ];

    let theta = ParamPoint::from([0.6, -0.2]);
    for (label, base, diffeo) in &cases {
        let symmetry = fisher_metric_symmetry(base, diffeo, &theta, &spec).unwrap();
        let induced = diffeo.induced_family(base);
        let direct = fisher_metric_direct(&induced, &theta, &spec).unwrap();
        println!("{label}:");
        println!("  symmetry formula: {:?}", symmetry.tensor.rows());
        println!("  direct engine:    {:?}", direct.tensor.rows());
        println!(
            "  agreement: {:.3e}\n",
            symmetry.tensor.max_abs_diff(&direct.tensor).unwrap()
        );
    }

    // A θ-independent diffeomorphism contributes nothing.
    let frozen = DiffeoFamily::location(
        &ScalarMap::constant(1.0, 2),
        ParametricDomain::unconstrained(2),
    );
    let g = fisher_metric_symmetry(&BasePdf::standard_normal(), &frozen, &theta, &spec).unwrap();
    println!(
        "θ-independent map gives the zero matrix: {:?}",
        g.tensor.rows()
    );
}
