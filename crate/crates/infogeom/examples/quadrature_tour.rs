//! A tour of the adaptive quadrature layer: finite intervals, unbounded
//! domains under two variable transforms, and tensor-product boxes.
//!
//! Run with: cargo run --example quadrature_tour

use infogeom::quadrature::{integrate_1d, integrate_box, InfiniteMap, QuadratureSpec};
use infogeom::{Interval, SpatialDomain};

fn std_normal(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn main() {
    let spec = QuadratureSpec::default();
    let inf = f64::INFINITY;

    println!("finite intervals:");
    for (label, f, range, exact) in [
        (
            "∫₀¹ x² dx",
            (|x: f64| x * x) as fn(f64) -> f64,
            (0.0, 1.0),
            1.0 / 3.0,
        ),
        ("∫₀¹ ln x dx", |x: f64| x.ln(), (0.0, 1.0), -1.0),
        ("∫₀^π sin x dx", f64::sin, (0.0, std::f64::consts::PI), 2.0),
    ] {
        let r = integrate_1d(f, range, &spec).unwrap();
        println!(
            "  {label:18} = {:+.15} (true error {:.1e}, estimate {:.1e}, {} evals)",
            r.value,
            (r.value - exact).abs(),
            r.error_estimate,
            r.evaluations
        );
    }

    println!("\nunbounded domains (default rational transform):");
    for (label, f, range, exact) in [
        (
            "standard normal over ℝ",
            std_normal as fn(f64) -> f64,
            (-inf, inf),
            1.0,
        ),
        (
            "sech(x)/π over ℝ",
            |x: f64| 1.0 / (std::f64::consts::PI * x.cosh()),
            (-inf, inf),
            1.0,
        ),
        ("e^(−x) over (0,∞)", |x: f64| (-x).exp(), (0.0, inf), 1.0),
    ] {
        let r = integrate_1d(f, range, &spec).unwrap();
        println!(
            "  {label:24} = {:.15} (true error {:.1e})",
            r.value,
            (r.value - exact).abs()
        );
    }

    println!("\nsame integrals under the tan/log transform:");
    let tan_spec = QuadratureSpec {
        infinite_map: InfiniteMap::TanLog,
        ..spec
    };
    let r = integrate_1d(std_normal, (-inf, inf), &tan_spec).unwrap();
    println!("  standard normal over ℝ  = {:.15}", r.value);

    println!("\ntensor-product boxes:");
    let plane = SpatialDomain::new(vec![Interval::real_line(), Interval::real_line()]).unwrap();
    let r = integrate_box(|x| std_normal(x[0]) * std_normal(x[1]), &plane, &spec).unwrap();
    println!(
        "  product of two normals over ℝ² = {:.12} ({} innermost evals)",
        r.value, r.evaluations
    );
    let odd = integrate_box(
        |x| x[0] * x[1] * std_normal(x[0]) * std_normal(x[1]),
        &plane,
        &spec,
    )
    .unwrap();
    println!(
        "  odd integrand over ℝ²          = {:+.3e} (symmetry)",
        odd.value
    );

    println!("\nnon-convergence carries the best estimate:");
    let tight = QuadratureSpec {
        max_evaluations: 500,
        ..spec
    };
    match integrate_1d(|x| 1.0 / x, (0.0, 1.0), &tight) {
        Err(e) => println!("  ∫₀¹ dx/x → {e}"),
        Ok(_) => unreachable!("the harmonic integral diverges"),
    }
}
