//! Command-line front end: named demos, construction verification, direct
//! metric evaluation, and the D/E constants, all with machine-readable JSON
//! on standard output.
//!
//! Exit codes are a stable contract: `0` for a passing run, `1` for a
//! numeric failure (a failed verification or a non-convergent integral), and
//! `2` for usage errors (unknown names, malformed expressions or grids,
//! inadmissible inputs). JSON goes to standard output (or `--out`); the
//! `--pretty` flag adds a human-readable summary on standard error so
//! pipelines stay parseable.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::construct::{BasePdf, ComponentMode, ConstructError};
use crate::domain::{MetricTensor, ParamPoint};
use crate::embedding::{self, Embedding};
use crate::fisher::{fisher_metric_direct, location_constant_d, scale_constant_e, FisherError};
use crate::quadrature::{QuadratureError, QuadratureSpec};
use crate::verify::{
    run_demo_with_tolerance, verify_construction, AxisSpec, Family, GridDescriptor, PointReport,
    ReportSummary, VerificationGrid, VerificationReport, VerifyError,
};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_NUMERIC_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "infogeom",
    version,
    about = "Fisher information metrics of density families, and families constructed to match a target metric"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a named demo pipeline and report pass/fail.
    Demo {
        /// One of: normal, cauchy, sech-location, sphere-gaussian,
        /// sphere-sech, hyperbolic-mixed, circle-orthonormal,
        /// symmetry-crosscheck.
        name: String,
        /// Override the demo's pinned tolerance.
        #[arg(long)]
        tol: Option<f64>,
        /// Write the JSON report to a file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Print a human-readable summary to standard error.
        #[arg(long)]
        pretty: bool,
    },
    /// Build a construction over an embedding and verify its Fisher metric
    /// against the embedding's pullback metric on a parameter grid.
    Verify {
        /// Catalog name (sphere2, hyperbolic, circle2) or an expression like
        /// "cos(a)*sin(b); sin(a)*sin(b); cos(b)".
        #[arg(long, allow_hyphen_values = true)]
        embedding: String,
        /// Parameter names for expression embeddings, comma-separated.
        #[arg(long, value_delimiter = ',')]
        params: Vec<String>,
        /// Which construction to verify.
        #[arg(long, value_enum)]
        construction: ConstructionKind,
        /// Base densities for the mixed construction, comma-separated
        /// (normal, sech, cauchy, exponential); all components use location
        /// mode.
        #[arg(long, value_delimiter = ',')]
        bases: Vec<String>,
        /// Grid spec, one "start:end:count" per parameter, comma-separated.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        /// Pass tolerance on the maximum absolute entry error.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
    /// Compute the Fisher metric of a named family at one parameter point
    /// with the direct engine.
    Metric {
        /// Family name: normal or cauchy.
        #[arg(long)]
        family: String,
        /// Parameter point, comma-separated (e.g. "0.0,1.0").
        #[arg(long, allow_hyphen_values = true)]
        theta: String,
        /// Quadrature tolerance (absolute and relative).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
    /// Compute a location (D) or scale (E) normalization constant.
    Constant {
        #[arg(long, value_enum)]
        kind: ConstantKind,
        /// Base density: normal, sech, cauchy, or exponential.
        #[arg(long)]
        base: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        pretty: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstructionKind {
    Gaussian,
    Sech,
    Mixed,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ConstantKind {
    #[value(name = "D", alias = "d")]
    D,
    #[value(name = "E", alias = "e")]
    E,
}

/// The stable JSON envelope. Exactly one of the payload keys is present,
/// along with `pass`; verification-shaped outputs add `summary`, `grid`, and
/// `points`.
#[derive(Serialize)]
struct Envelope {
    #[serde(skip_serializing_if = "Option::is_none")]
    demo: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verify: Option<VerifyPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<MetricPayload>,
    #[serde(skip_serializing_if = "Option::is_none")]
    constant: Option<ConstantPayload>,
    pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<ReportSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid: Option<GridDescriptor>,
    #[serde(skip_serializing_if = "Option::is_none")]
    points: Option<Vec<PointReport>>,
}

impl Envelope {
    fn empty() -> Self {
        Self {
            demo: None,
            verify: None,
            metric: None,
            constant: None,
            pass: false,
            summary: None,
            grid: None,
            points: None,
        }
    }

    fn from_report(report: VerificationReport) -> Self {
        Self {
            pass: report.pass,
            summary: Some(report.summary),
            grid: Some(report.grid),
            points: Some(report.points),
            ..Self::empty()
        }
    }
}

#[derive(Serialize)]
struct VerifyPayload {
    embedding: String,
    construction: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    bases: Option<Vec<String>>,
    tolerance: f64,
}

#[derive(Serialize)]
struct MetricPayload {
    family: String,
    theta: Vec<f64>,
    entries: MetricTensor,
    worst_error_estimate: f64,
    evaluations: u64,
}

#[derive(Serialize)]
struct ConstantPayload {
    kind: String,
    base: String,
    value: f64,
    error_estimate: f64,
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_PASS,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match cli.command {
        Command::Demo {
            name,
            tol,
            out,
            pretty,
        } => cmd_demo(&name, tol, out.as_deref(), pretty),
        Command::Verify {
            embedding,
            params,
            construction,
            bases,
            grid,
            tol,
            out,
            pretty,
        } => cmd_verify(
            &embedding,
            &params,
            construction,
            &bases,
            &grid,
            tol,
            out.as_deref(),
            pretty,
        ),
        Command::Metric {
            family,
            theta,
            tol,
            out,
            pretty,
        } => cmd_metric(&family, &theta, tol, out.as_deref(), pretty),
        Command::Constant {
            kind,
            base,
            out,
            pretty,
        } => cmd_constant(kind, &base, out.as_deref(), pretty),
    }
}

fn cmd_demo(name: &str, tol: Option<f64>, out: Option<&std::path::Path>, pretty: bool) -> i32 {
    match run_demo_with_tolerance(name, tol) {
        Ok(report) => {
            let pass = report.pass;
            let mut envelope = Envelope::from_report(report);
            envelope.demo = Some(name.to_string());
            if pretty {
                print_pretty_report(&envelope);
            }
            if emit(&envelope, out).is_err() {
                return EXIT_USAGE;
            }
            if pass {
                EXIT_PASS
            } else {
                EXIT_NUMERIC_FAILURE
            }
        }
        Err(e) => fail(&e.to_string(), classify_verify_error(&e)),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    embedding_arg: &str,
    params: &[String],
    construction: ConstructionKind,
    bases: &[String],
    grid_arg: &str,
    tol: f64,
    out: Option<&std::path::Path>,
    pretty: bool,
) -> i32 {
    let embedding = match resolve_embedding(embedding_arg, params) {
        Ok(e) => e,
        Err((msg, code)) => return fail(&msg, code),
    };
    let axes = match parse_grid_spec(grid_arg) {
        Ok(axes) => axes,
        Err(msg) => return fail(&msg, EXIT_USAGE),
    };
    if axes.len() != embedding.param_dim() {
        return fail(
            &format!(
                "grid has {} axes but the embedding has {} parameters",
                axes.len(),
                embedding.param_dim()
            ),
            EXIT_USAGE,
        );
    }
    let grid = match VerificationGrid::from_axes(axes) {
        Ok(g) => g,
        Err(e) => return fail(&e.to_string(), EXIT_USAGE),
    };

    let spec = QuadratureSpec::default();
    let (family, construction_name, base_names) = match construction {
        ConstructionKind::Gaussian => match crate::construct::gaussian_construction(&embedding) {
            Ok(p) => (Family::Product(p), "gaussian", None),
            Err(e) => return fail(&e.to_string(), classify_construct_error(&e)),
        },
        ConstructionKind::Sech => match crate::construct::sech_construction(&embedding) {
            Ok(p) => (Family::Product(p), "sech", None),
            Err(e) => return fail(&e.to_string(), classify_construct_error(&e)),
        },
        ConstructionKind::Mixed => {
            if bases.is_empty() {
                return fail(
                    "the mixed construction needs --bases (one per embedding component)",
                    EXIT_USAGE,
                );
            }
            let mut resolved = Vec::with_capacity(bases.len());
            for name in bases {
                match BasePdf::by_name(name) {
                    Some(b) => resolved.push(b),
                    None => return fail(
                        &format!(
                            "unknown base `{name}`; valid bases: normal, sech, cauchy, exponential"
                        ),
                        EXIT_USAGE,
                    ),
                }
            }
            let modes = vec![ComponentMode::Location; resolved.len()];
            match crate::construct::mixed_construction(&embedding, &resolved, &modes, &spec) {
                Ok(p) => (Family::Product(p), "mixed", Some(bases.to_vec())),
                Err(e) => return fail(&e.to_string(), classify_construct_error(&e)),
            }
        }
    };

    let target = embedding.pullback_field();
    match verify_construction(&family, &target, &grid, tol, &spec) {
        Ok(report) => {
            let pass = report.pass;
            let mut envelope = Envelope::from_report(report);
            envelope.verify = Some(VerifyPayload {
                embedding: embedding.name().to_string(),
                construction: construction_name.to_string(),
                bases: base_names,
                tolerance: tol,
            });
            if pretty {
                print_pretty_report(&envelope);
            }
            if emit(&envelope, out).is_err() {
                return EXIT_USAGE;
            }
            if pass {
                EXIT_PASS
            } else {
                EXIT_NUMERIC_FAILURE
            }
        }
        Err(e) => fail(&e.to_string(), classify_verify_error(&e)),
    }
}

fn cmd_metric(
    family: &str,
    theta_arg: &str,
    tol: Option<f64>,
    out: Option<&std::path::Path>,
    pretty: bool,
) -> i32 {
    let family_obj = match family {
        "normal" => crate::domain::DensityFamily::univariate_normal(),
        "cauchy" => crate::domain::DensityFamily::univariate_cauchy(),
        other => {
            return fail(
                &format!("unknown family `{other}`; valid families: normal, cauchy"),
                EXIT_USAGE,
            )
        }
    };
    let theta = match parse_theta(theta_arg) {
        Ok(coords) => ParamPoint::new(coords),
        Err(msg) => return fail(&msg, EXIT_USAGE),
    };
    let spec = match tol {
        Some(t) => QuadratureSpec::with_tolerance(t, t),
        None => QuadratureSpec::default(),
    };
    match fisher_metric_direct(&family_obj, &theta, &spec) {
        Ok(computation) => {
            let envelope = Envelope {
                metric: Some(MetricPayload {
                    family: family.to_string(),
                    theta: theta.coords().to_vec(),
                    entries: computation.tensor,
                    worst_error_estimate: computation.worst_error,
                    evaluations: computation.evaluations,
                }),
                pass: true,
                ..Envelope::empty()
            };
            if pretty {
                eprintln!(
                    "metric of `{family}` at {:?}: worst error estimate {:.3e}",
                    theta.coords(),
                    envelope
                        .metric
                        .as_ref()
                        .map(|m| m.worst_error_estimate)
                        .unwrap_or(f64::NAN)
                );
            }
            if emit(&envelope, out).is_err() {
                return EXIT_USAGE;
            }
            EXIT_PASS
        }
        Err(e) => fail(&e.to_string(), classify_fisher_error(&e)),
    }
}

fn cmd_constant(
    kind: ConstantKind,
    base: &str,
    out: Option<&std::path::Path>,
    pretty: bool,
) -> i32 {
    let base_pdf = match BasePdf::by_name(base) {
        Some(b) => b,
        None => {
            return fail(
                &format!("unknown base `{base}`; valid bases: normal, sech, cauchy, exponential"),
                EXIT_USAGE,
            )
        }
    };
    let spec = QuadratureSpec::default();
    let (kind_name, result) = match kind {
        ConstantKind::D => ("D", location_constant_d(&base_pdf, &spec)),
        ConstantKind::E => ("E", scale_constant_e(&base_pdf, &spec)),
    };
    match result {
        Ok(r) => {
            let envelope = Envelope {
                constant: Some(ConstantPayload {
                    kind: kind_name.to_string(),
                    base: base.to_string(),
                    value: r.value,
                    error_estimate: r.error_estimate,
                }),
                pass: true,
                ..Envelope::empty()
            };
            if pretty {
                eprintln!(
                    "{kind_name}({base}) = {} ± {:.3e}",
                    r.value, r.error_estimate
                );
            }
            if emit(&envelope, out).is_err() {
                return EXIT_USAGE;
            }
            EXIT_PASS
        }
        Err(e) => fail(&e.to_string(), classify_fisher_error(&e)),
    }
}

fn resolve_embedding(arg: &str, params: &[String]) -> Result<Embedding, (String, i32)> {
    if let Some(known) = embedding::by_name(arg) {
        return Ok(known);
    }
    // Not a catalog name: treat it as an expression.
    if params.is_empty() {
        return Err((
            format!(
                "`{arg}` is not a catalog embedding (sphere2, hyperbolic, circle2); \
                 to parse it as an expression, declare parameter names with --params"
            ),
            EXIT_USAGE,
        ));
    }
    let names: Vec<&str> = params.iter().map(String::as_str).collect();
    embedding::parse_expression(arg, &names).map_err(|e| (e.to_string(), EXIT_USAGE))
}

fn parse_grid_spec(spec: &str) -> Result<Vec<AxisSpec>, String> {
    spec.split(',')
        .map(|axis| {
            let parts: Vec<&str> = axis.split(':').collect();
            if parts.len() != 3 {
                return Err(format!(
                    "grid axis `{axis}` must have the form start:end:count"
                ));
            }
            let start: f64 = parts[0]
                .parse()
                .map_err(|_| format!("bad axis start `{}`", parts[0]))?;
            let end: f64 = parts[1]
                .parse()
                .map_err(|_| format!("bad axis end `{}`", parts[1]))?;
            let count: usize = parts[2]
                .parse()
                .map_err(|_| format!("bad axis count `{}`", parts[2]))?;
            Ok(AxisSpec::new(start, end, count))
        })
        .collect()
}

fn parse_theta(arg: &str) -> Result<Vec<f64>, String> {
    arg.split(',')
        .map(|c| {
            c.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad parameter coordinate `{c}`"))
        })
        .collect()
}

fn emit(envelope: &Envelope, out: Option<&std::path::Path>) -> Result<(), ()> {
    let json = serde_json::to_string(envelope).expect("report serialization cannot fail");
    match out {
        Some(path) => std::fs::write(path, json + "\n").map_err(|e| {
            eprintln!("cannot write report to {}: {e}", path.display());
        }),
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

fn print_pretty_report(envelope: &Envelope) {
    if let Some(summary) = &envelope.summary {
        eprintln!(
            "{}: {} | max abs err {:.3e} | max rel err {:.3e} | worst point {:?} | {} points",
            envelope
                .demo
                .clone()
                .or_else(|| envelope.verify.as_ref().map(|v| v.embedding.clone()))
                .unwrap_or_else(|| "report".to_string()),
            if envelope.pass { "PASS" } else { "FAIL" },
            summary.max_abs_err,
            summary.max_rel_err,
            summary.worst_point,
            summary.points_checked,
        );
    }
}

fn fail(message: &str, code: i32) -> i32 {
    eprintln!("error: {message}");
    code
}

fn classify_verify_error(e: &VerifyError) -> i32 {
    match e {
        VerifyError::UnknownDemo { .. }
        | VerifyError::InvalidGrid { .. }
        | VerifyError::EmptyGrid
        | VerifyError::GridPointOutsideDomain { .. }
        | VerifyError::ParamsMismatch { .. }
        | VerifyError::Domain(_)
        | VerifyError::Embedding(_) => EXIT_USAGE,
        VerifyError::Construct(c) => classify_construct_error(c),
        VerifyError::Engine { source, .. } => classify_fisher_error(source),
        VerifyError::Fisher(source) => classify_fisher_error(source),
    }
}

fn classify_construct_error(e: &ConstructError) -> i32 {
    match e {
        // Numeric breakdowns keep exit 1; everything else is a usage error.
        ConstructError::Quadrature(q) => classify_quadrature_error(q),
        _ => EXIT_USAGE,
    }
}

fn classify_fisher_error(e: &FisherError) -> i32 {
    match e {
        FisherError::Domain(_) | FisherError::SpatialDimTooLarge { .. } => EXIT_USAGE,
        FisherError::Entry { source, .. } => classify_quadrature_error(source),
        FisherError::Component { source, .. } => classify_fisher_error(source),
        FisherError::InvalidDiffeo { .. } => EXIT_NUMERIC_FAILURE,
        FisherError::Quadrature(q) => classify_quadrature_error(q),
    }
}

fn classify_quadrature_error(e: &QuadratureError) -> i32 {
    match e {
        QuadratureError::NonConvergence { .. } | QuadratureError::NonFiniteIntegrand { .. } => {
            EXIT_NUMERIC_FAILURE
        }
        QuadratureError::DimensionTooLarge { .. }
        | QuadratureError::InvalidSpec { .. }
        | QuadratureError::InvalidInterval { .. } => EXIT_USAGE,
    }
}
