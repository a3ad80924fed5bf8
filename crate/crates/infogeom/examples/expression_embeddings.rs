//! User-supplied embeddings from expression strings.
//!
//! Components are separated by semicolons; identifiers must be declared
//! parameter names (`pi` is predefined). Parsed embeddings get a
//! finite-difference Jacobian and plug into the same construction and
//! verification pipeline as the built-in catalog.
//!
//! Run with: cargo run --example expression_embeddings

use infogeom::construct::sech_construction;
use infogeom::embedding::{self, parse_expression};
use infogeom::verify::{verify_construction, AxisSpec, Family, VerificationGrid};
use infogeom::{ParamPoint, QuadratureSpec};

fn main() {
    // The unit circle, written out by hand.
    let circle = parse_expression("cos(a); sin(a)", &["a"]).unwrap();
    let g = circle.pullback_metric(&ParamPoint::from([0.7])).unwrap();
    println!("pullback of \"cos(a); sin(a)\" at a = 0.7: {:?}", g.rows());

    // A parsed copy of the sphere chart agrees with the catalog version.
    let sphere_expr =
        parse_expression("cos(a)*sin(b); sin(a)*sin(b); cos(b)", &["a", "b"]).unwrap();
    let builtin = embedding::sphere2();
    let theta = ParamPoint::from([1.1, 0.9]);
    let deviation = sphere_expr
        .pullback_metric(&theta)
        .unwrap()
        .max_abs_diff(&builtin.pullback_metric(&theta).unwrap())
        .unwrap();
    println!("parsed sphere chart vs catalog pullback: deviation {deviation:.3e}");

    // End to end: build a sech product over the parsed circle and verify it
    // against the pullback field [[1]].
    let family = Family::Product(sech_construction(&circle).unwrap());
    let grid = VerificationGrid::from_axes(vec![AxisSpec::new(0.0, 6.0, 7)]).unwrap();
    let report = verify_construction(
        &family,
        &circle.pullback_field(),
        &grid,
        1e-5,
        &QuadratureSpec::default(),
    )
    .unwrap();
    println!(
        "sech construction over the parsed circle: {} (max abs err {:.3e})",
        if report.pass { "PASS" } else { "FAIL" },
        report.summary.max_abs_err
    );

    // Diagnostics carry positions and expectations.
    for bad in ["a +", "2 ** a", "cos(q)", "sinh(a)"] {
        match parse_expression(bad, &["a"]) {
            Err(e) => println!("  \"{bad}\" → {e}"),
            Ok(_) => unreachable!("`{bad}` should not parse"),
        }
    }
}
