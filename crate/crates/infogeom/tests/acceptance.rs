//! Acceptance suite: one test per release criterion, each printing a
//! pass/fail line with the measured figure next to its pinned tolerance.
//!
//! Run with: cargo test -p infogeom --test acceptance -- --nocapture

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use infogeom::construct::{
    disjoint_product, gaussian_construction, location_family, orthonormal_construction,
    scale_family, sech_construction, BasePdf, ConstructError, OrthonormalBasis,
};
use infogeom::embedding;
use infogeom::fisher::{
    fisher_metric_decomposed, fisher_metric_direct, fisher_metric_symmetry, location_constant_d,
    scale_constant_e, DiffeoFamily,
};
use infogeom::verify::{
    compare_metrics, hyperbolic_component_closed_forms, hyperbolic_mixed_family, run_demo, Family,
};
use infogeom::{
    DensityFamily, MetricTensor, ParamPoint, ParametricDomain, QuadratureSpec, ScalarMap,
    SpatialDomain,
};

fn criterion(n: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n:>2} [{}] {name}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::default()
}

#[test]
fn c01_normal_family_metric() {
    let started = std::time::Instant::now();
    let report = run_demo("normal").unwrap();
    let elapsed = started.elapsed();
    let pass = report.pass
        && report.summary.max_abs_err <= 1e-8
        && report.summary.points_checked == 10
        && elapsed.as_secs_f64() < 5.0;
    criterion(
        1,
        "normal-family metric vs diag(1/σ², 2/σ²)",
        pass,
        &format!(
            "max abs err {:.3e} ≤ 1e-8 over 10 grid points in {elapsed:?}",
            report.summary.max_abs_err
        ),
    );
}

#[test]
fn c02_cauchy_family_metric() {
    let family = DensityFamily::univariate_cauchy();
    let mut worst = 0.0f64;
    for gamma in [0.5, 1.0, 2.0] {
        let theta = ParamPoint::from([0.3, gamma]);
        let computed = fisher_metric_direct(&family, &theta, &spec()).unwrap();
        let target = MetricTensor::identity(2).scale(1.0 / (2.0 * gamma * gamma));
        worst = worst.max(computed.tensor.max_abs_diff(&target).unwrap());
    }
    criterion(
        2,
        "cauchy-family metric vs δ_ab/(2γ²) at γ ∈ {0.5, 1, 2}",
        worst <= 1e-6,
        &format!("max abs err {worst:.3e} ≤ 1e-6"),
    );
}

#[test]
fn c03_location_and_scale_constants() {
    let s = spec();
    let cases: Vec<(&str, f64, f64)> = vec![
        (
            "D(normal)",
            location_constant_d(&BasePdf::standard_normal(), &s)
                .unwrap()
                .value,
            1.0,
        ),
        (
            "D(sech)",
            location_constant_d(&BasePdf::sech(), &s).unwrap().value,
            0.5,
        ),
        (
            "D(cauchy)",
            location_constant_d(&BasePdf::standard_cauchy(), &s)
                .unwrap()
                .value,
            0.5,
        ),
        (
            "E(exponential)",
            scale_constant_e(&BasePdf::exponential(), &s).unwrap().value,
            1.0,
        ),
        (
            "E(normal)",
            scale_constant_e(&BasePdf::standard_normal(), &s)
                .unwrap()
                .value,
            2.0,
        ),
    ];
    let mut worst = 0.0f64;
    let mut detail = String::new();
    for (name, value, expected) in &cases {
        let err = (value - expected).abs();
        worst = worst.max(err);
        detail.push_str(&format!("{name}={value:.12} "));
    }
    criterion(
        3,
        "location/scale constants",
        worst <= 1e-9,
        &format!("{detail}(worst abs err {worst:.3e} ≤ 1e-9)"),
    );
}

#[test]
fn c04_gaussian_construction_over_sphere() {
    let report = run_demo("sphere-gaussian").unwrap();
    criterion(
        4,
        "gaussian construction vs sphere pullback on 5×5 grid",
        report.pass && report.summary.max_abs_err <= 1e-5,
        &format!("max abs err {:.3e} ≤ 1e-5", report.summary.max_abs_err),
    );
}

#[test]
fn c05_sech_construction_over_sphere() {
    let sech_report = run_demo("sphere-sech").unwrap();
    let gauss_report = run_demo("sphere-gaussian").unwrap();
    let mut pairwise = 0.0f64;
    for (a, b) in gauss_report.points.iter().zip(&sech_report.points) {
        assert_eq!(a.theta, b.theta, "reports must share the grid");
        let (abs, _) = compare_metrics(&a.computed, &b.computed).unwrap();
        pairwise = pairwise.max(abs);
    }
    let pass = sech_report.pass && sech_report.summary.max_abs_err <= 1e-5 && pairwise <= 2e-5;
    criterion(
        5,
        "sech construction vs sphere pullback, and agreement with gaussian",
        pass,
        &format!(
            "max abs err {:.3e} ≤ 1e-5, pairwise {:.3e} ≤ 2e-5",
            sech_report.summary.max_abs_err, pairwise
        ),
    );
}

#[test]
fn c06_hyperbolic_mixed_component_metrics() {
    let s = spec();
    let family = hyperbolic_mixed_family(&s).unwrap();
    let mut worst_component = 0.0f64;
    let mut worst_sum = 0.0f64;
    for (alpha, beta) in [(0.0, 2.0), (0.7, 2.0), (std::f64::consts::FRAC_PI_2, 1.5)] {
        let theta = ParamPoint::from([alpha, beta]);
        let closed = hyperbolic_component_closed_forms(alpha, beta);
        let mut sum = MetricTensor::zeros(2);
        for (i, (component, _)) in family.components().iter().enumerate() {
            let g = fisher_metric_direct(component, &theta, &s).unwrap();
            worst_component = worst_component.max(g.tensor.max_abs_diff(&closed[i]).unwrap());
            sum = sum.add(&g.tensor).unwrap();
        }
        let target = MetricTensor::identity(2).scale(1.0 / (beta * beta));
        worst_sum = worst_sum.max(sum.max_abs_diff(&target).unwrap());
    }
    criterion(
        6,
        "hyperbolic mixed example: components and their sum",
        worst_component <= 1e-6 && worst_sum <= 1e-6,
        &format!(
            "component err {worst_component:.3e} ≤ 1e-6, sum vs β⁻²δ err {worst_sum:.3e} ≤ 1e-6"
        ),
    );
}

#[test]
fn c07_disjoint_product_additivity() {
    let s = spec();
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let bases = [
        BasePdf::standard_normal(),
        BasePdf::sech(),
        BasePdf::standard_cauchy(),
    ];
    let mut worst_vs_direct = 0.0f64;
    let mut worst_vs_sum = 0.0f64;
    for _ in 0..20 {
        let params = ParametricDomain::unconstrained(2);
        let mut components = Vec::new();
        for _ in 0..2 {
            let base = &bases[rng.random_range(0..bases.len())];
            let coeffs = [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)];
            components.push((
                location_family(base, &ScalarMap::linear(&coeffs), params.clone()).unwrap(),
                1u32,
            ));
        }
        let product = disjoint_product(components.clone()).unwrap();
        let theta = ParamPoint::from([rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)]);

        let decomposed = fisher_metric_decomposed(&product, &theta, &s).unwrap();

        let mut sum = MetricTensor::zeros(2);
        for (component, _) in &components {
            sum = sum
                .add(&fisher_metric_direct(component, &theta, &s).unwrap().tensor)
                .unwrap();
        }
        worst_vs_sum = worst_vs_sum.max(decomposed.tensor.max_abs_diff(&sum).unwrap());

        let joint = product.to_density_family();
        let direct = fisher_metric_direct(&joint, &theta, &s).unwrap();
        worst_vs_direct =
            worst_vs_direct.max(decomposed.tensor.max_abs_diff(&direct.tensor).unwrap());
    }
    criterion(
        7,
        "additivity over 20 random location-family pairs",
        worst_vs_direct <= 1e-5 && worst_vs_sum <= 1e-12,
        &format!(
            "decomposed vs direct 2-D box {worst_vs_direct:.3e} ≤ 1e-5, vs component sum {worst_vs_sum:.3e} ≤ 1e-12"
        ),
    );
}

#[test]
fn c08_symmetry_formula_crosscheck() {
    let s = spec();
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);
    let params = ParametricDomain::unconstrained(1);
    type MakeDiffeo = fn(&ScalarMap, ParametricDomain) -> DiffeoFamily;
    let cases: Vec<(&str, BasePdf, MakeDiffeo)> = vec![
        (
            "location/normal",
            BasePdf::standard_normal(),
            DiffeoFamily::location,
        ),
        (
            "scale/exponential",
            BasePdf::exponential(),
            DiffeoFamily::scale,
        ),
        (
            "scale/normal",
            BasePdf::standard_normal(),
            DiffeoFamily::scale,
        ),
    ];
    let mut worst = 0.0f64;
    for (_, base, make_diffeo) in &cases {
        let slope = rng.random_range(0.5..1.5);
        let h = ScalarMap::linear(&[slope]);
        let diffeo = make_diffeo(&h, params.clone());
        let induced = diffeo.induced_family(base);
        for _ in 0..20 {
            let theta = ParamPoint::from([rng.random_range(-1.0..1.0)]);
            let symmetry = fisher_metric_symmetry(base, &diffeo, &theta, &s).unwrap();
            let direct = fisher_metric_direct(&induced, &theta, &s).unwrap();
            worst = worst.max(symmetry.tensor.max_abs_diff(&direct.tensor).unwrap());
        }
    }
    criterion(
        8,
        "change-of-variables formula vs direct engine (60 random θ)",
        worst <= 1e-6,
        &format!("max abs err {worst:.3e} ≤ 1e-6"),
    );
}

#[test]
fn c09_orthonormal_construction() {
    let report = run_demo("circle-orthonormal").unwrap();
    let mut worst = 0.0f64;
    for point in &report.points {
        worst = worst.max((point.computed.get(0, 0) - 4.0).abs());
    }
    let rejection = matches!(
        orthonormal_construction(
            &OrthonormalBasis::normalized_legendre_pair(),
            &embedding::circle(1.0).unwrap(),
            &spec(),
        ),
        Err(ConstructError::ConstraintViolation { .. })
    );
    criterion(
        9,
        "orthonormal construction: g = [[4]] and radius-1 rejection",
        report.pass && worst <= 1e-6 && rejection,
        &format!(
            "max |g−4| = {worst:.3e} ≤ 1e-6 over {} θ, rejection fired: {rejection}",
            report.summary.points_checked
        ),
    );
}

#[test]
fn c10_constructed_families_are_normalized() {
    let s = spec();
    let mut rng = StdRng::seed_from_u64(0x5eed_0010);
    let sphere = embedding::sphere2();
    let mut worst = 0.0f64;

    let mut check = |family: &Family, sample: &mut dyn FnMut(&mut StdRng) -> ParamPoint| {
        for _ in 0..10 {
            let theta = sample(&mut rng);
            let r = family.normalization(&theta, &s).unwrap();
            worst = worst.max((r.value - 1.0).abs());
        }
    };

    let mut sphere_sample = |rng: &mut StdRng| {
        ParamPoint::from([rng.random_range(0.3..6.0), rng.random_range(0.3..2.8)])
    };
    check(
        &Family::Product(gaussian_construction(&sphere).unwrap()),
        &mut sphere_sample,
    );
    check(
        &Family::Product(sech_construction(&sphere).unwrap()),
        &mut sphere_sample,
    );
    check(
        &Family::Product(hyperbolic_mixed_family(&s).unwrap()),
        &mut |rng: &mut StdRng| {
            ParamPoint::from([rng.random_range(-3.0..3.0), rng.random_range(1.1..4.0)])
        },
    );
    check(
        &Family::Single(
            orthonormal_construction(
                &OrthonormalBasis::normalized_legendre_pair(),
                &embedding::circle(2.0).unwrap(),
                &s,
            )
            .unwrap(),
        ),
        &mut |rng: &mut StdRng| ParamPoint::from([rng.random_range(-3.0..3.0)]),
    );
    check(
        &Family::Single(
            location_family(
                &BasePdf::standard_cauchy(),
                &ScalarMap::linear(&[1.2]),
                ParametricDomain::unconstrained(1),
            )
            .unwrap(),
        ),
        &mut |rng: &mut StdRng| ParamPoint::from([rng.random_range(-2.0..2.0)]),
    );
    check(
        &Family::Single(
            scale_family(
                &BasePdf::exponential(),
                &ScalarMap::linear(&[0.7]),
                ParametricDomain::unconstrained(1),
            )
            .unwrap(),
        ),
        &mut |rng: &mut StdRng| ParamPoint::from([rng.random_range(-2.0..2.0)]),
    );

    criterion(
        10,
        "normalization of constructed families at random θ",
        worst <= 1e-8,
        &format!("max |∫P − 1| = {worst:.3e} ≤ 1e-8"),
    );
}

#[test]
fn c11_reparameterization_congruence() {
    let s = spec();
    let mut rng = StdRng::seed_from_u64(0x5eed_0011);
    let normal = DensityFamily::univariate_normal();
    let reparam = DensityFamily::new(
        "normal-log-sigma",
        SpatialDomain::real_line(),
        ParametricDomain::unconstrained(2),
        |x, th| {
            let sigma = th[1].exp();
            let z = (x[0] - th[0]) / sigma;
            (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
        },
    );
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let psi: [f64; 2] = [rng.random_range(-2.0..2.0), rng.random_range(-1.0..1.0)];
        let theta = ParamPoint::from([psi[0], psi[1].exp()]);
        let g_theta = fisher_metric_direct(&normal, &theta, &s).unwrap();
        let jacobian = vec![vec![1.0, 0.0], vec![0.0, psi[1].exp()]];
        let expected = g_theta.tensor.congruence(&jacobian).unwrap();
        let g_psi = fisher_metric_direct(&reparam, &ParamPoint::from(psi), &s).unwrap();
        worst = worst.max(g_psi.tensor.max_abs_diff(&expected).unwrap());
    }
    criterion(
        11,
        "reparameterization congruence Jᵀ g J under θ = (ψ¹, e^ψ²)",
        worst <= 1e-6,
        &format!("max abs err {worst:.3e} ≤ 1e-6 at 10 random ψ"),
    );
}

#[test]
fn c12_cli_contract() {
    let bin = env!("CARGO_BIN_EXE_infogeom");
    let run = |args: &[&str]| {
        std::process::Command::new(bin)
            .args(args)
            .output()
            .expect("binary runs")
    };

    // Exit 0 with parseable, round-tripping JSON.
    let ok = run(&["demo", "cauchy"]);
    let stdout = String::from_utf8(ok.stdout).unwrap();
    let parsed: serde_json::Value = serde_json::from_str(&stdout).unwrap();
    let reserialized = serde_json::to_string(&parsed).unwrap();
    let reparsed: serde_json::Value = serde_json::from_str(&reserialized).unwrap();
    let roundtrip = parsed == reparsed;
    let schema = parsed.get("demo").is_some()
        && parsed.get("pass").is_some()
        && parsed.get("summary").is_some()
        && parsed.get("grid").is_some()
        && parsed.get("points").is_some();

    // Exit 1 on a numeric failure: a tolerance below the quadrature floor.
    let fail = run(&["demo", "sphere-gaussian", "--tol", "1e-14"]);
    // Exit 2 on usage errors.
    let usage = run(&["demo", "nope"]);

    let pass = ok.status.code() == Some(0)
        && fail.status.code() == Some(1)
        && usage.status.code() == Some(2)
        && roundtrip
        && schema;
    criterion(
        12,
        "CLI exit codes and JSON stability",
        pass,
        &format!(
            "exit codes (0,1,2) = ({:?},{:?},{:?}), schema ok: {schema}, round-trip ok: {roundtrip}",
            ok.status.code(),
            fail.status.code(),
            usage.status.code()
        ),
    );
}
