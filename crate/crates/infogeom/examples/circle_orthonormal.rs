//! A one-dimensional spatial domain is enough: the squared orthonormal
//! expansion P = ¼(Σ hⁱ(θ)fᵢ(x))²·w(x) has Fisher metric (∂ₐhⁱ)(∂_bhⁱ)
//! whenever h·h = 4, i.e. h stays on the sphere of radius 2.
//!
//! With the first two normalized Legendre functions on (−1, 1) and
//! h(t) = 2(cos t, sin t), the metric is constantly [[4]] — the circle of
//! radius 2 — encoded in a family of polynomial densities on an interval.
//!
//! Run with: cargo run --example circle_orthonormal

use infogeom::construct::{orthonormal_construction, ConstructError, OrthonormalBasis};
use infogeom::embedding::circle;
use infogeom::fisher::{fisher_metric_direct, normalization_check};
use infogeom::{ParamPoint, QuadratureSpec};

fn main() {
    let spec = QuadratureSpec::default();
    let basis = OrthonormalBasis::normalized_legendre_pair();

    let family = orthonormal_construction(&basis, &circle(2.0).unwrap(), &spec).unwrap();
    for t in [0.4, 1.5, 3.0, 5.2] {
        let theta = ParamPoint::from([t]);
        let norm = normalization_check(&family, &theta, &spec).unwrap();
        let g = fisher_metric_direct(&family, &theta, &spec).unwrap();
        println!(
            "t = {t:>4}: ∫P = {:.12}, g = [[{:.12}]]",
            norm.value,
            g.tensor.get(0, 0)
        );
    }
    println!("expected: ∫P = 1 and g = [[4]] everywhere\n");

    // The constraint is enforced: a radius-1 circle has h·h = 1 ≠ 4 and the
    // squared expansion would not even be normalized.
    match orthonormal_construction(&basis, &circle(1.0).unwrap(), &spec) {
        Err(ConstructError::ConstraintViolation { max_abs_deviation }) => {
            println!("radius-1 circle rejected: max |h·h − 4| = {max_abs_deviation}");
        }
        other => panic!("expected a constraint violation, got {other:?}"),
    }
}
