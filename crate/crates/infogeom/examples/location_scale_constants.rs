//! The normalization constants that turn location and scale families into
//! metric-matching building blocks.
//!
//! A location family P̂(x − h(θ)) has Fisher metric D·(∂ₐh)(∂_bh) with
//! D = ∫ P̂ (d ln P̂/dx)² dx; a scale family e^h·P̂(x·e^h) has E·(∂ₐh)(∂_bh)
//! with E = ∫ P̂ (1 + x·d ln P̂/dx)² dx. Rescaling h by 1/√D (or 1/√E)
//! cancels the constant, which is how arbitrary bases are made
//! interchangeable.
//!
//! Run with: cargo run --example location_scale_constants

use infogeom::construct::BasePdf;
use infogeom::fisher::{location_constant_d, scale_constant_e};
use infogeom::QuadratureSpec;

fn main() {
    let spec = QuadratureSpec::default();
    let bases = [
        BasePdf::standard_normal(),
        BasePdf::sech(),
        BasePdf::standard_cauchy(),
        BasePdf::exponential(),
    ];

    println!("{:<14} {:>22} {:>22}", "base", "D (location)", "E (scale)");
    for base in &bases {
        let d = match location_constant_d(base, &spec) {
            Ok(r) => format!("{:.12}", r.value),
            Err(e) => format!("({e})"),
        };
        let e = match scale_constant_e(base, &spec) {
            Ok(r) => format!("{:.12}", r.value),
            Err(err) => format!("({err})"),
        };
        println!("{:<14} {d:>22} {e:>22}", base.name());
    }

    println!();
    println!("expected closed forms:");
    println!("  D(normal) = 1        D(sech) = 1/2      D(cauchy) = 1/2");
    println!("  E(exponential) = 1   E(normal) = 2      E(sech) = π²/8");
    println!();
    println!(
        "note: the exponential base lives on (0, ∞). Its D integral is finite,\n\
         but translation does not preserve the half line, so only scale\n\
         families accept it; location builders reject the domain."
    );
}
