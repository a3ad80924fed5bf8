//! Deterministic adaptive quadrature over 1-D intervals and tensor-product
//! boxes, including unbounded domains.
//!
//! Each panel is integrated with an embedded 7-point Gauss / 15-point Kronrod
//! pair; the panel with the worst error estimate is bisected until the global
//! error contract `err ≤ max(abs_tol, rel_tol·|value|)` is met or the
//! evaluation budget runs out. Unbounded endpoints are mapped onto a finite
//! interval by a smooth variable transform before any node is placed, so no
//! tail truncation is involved. Identical inputs produce bit-identical
//! results: there is no randomness, no threading, and the final sum runs over
//! panels in left-to-right order.

use std::cell::{Cell, RefCell};
use std::collections::BinaryHeap;

use thiserror::Error;

use crate::domain::SpatialDomain;

/// Largest box dimension accepted by [`integrate_box`]. Beyond this the cost
/// of nested adaptive quadrature blows up; product structure should be used
/// to reduce the integral to 1-D pieces instead.
pub const MAX_BOX_DIM: usize = 4;

pub const DEFAULT_ABS_TOL: f64 = 1e-10;
pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_EVALUATIONS: u64 = 1_000_000;

/// Variable transform applied to unbounded endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InfiniteMap {
    /// `x = t/(1−t²)` on `(−1,1)` for the full line; `x = a + t/(1−t)` on
    /// `(0,1)` for half lines. Singularity-free for sub-exponential tails.
    #[default]
    Rational,
    /// `x = tan(πt/2)` for the full line; `x = a − ln(1−t)` for half lines.
    TanLog,
}

/// Tolerances and budget for one integration call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_evaluations: u64,
    pub infinite_map: InfiniteMap,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: DEFAULT_ABS_TOL,
            rel_tol: DEFAULT_REL_TOL,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
            infinite_map: InfiniteMap::default(),
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerance(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), QuadratureError> {
        let positive = |t: f64| t.is_finite() && t > 0.0;
        if !positive(self.abs_tol) || !positive(self.rel_tol) {
            return Err(QuadratureError::InvalidSpec {
                reason: format!(
                    "tolerances must be positive (abs_tol = {}, rel_tol = {})",
                    self.abs_tol, self.rel_tol
                ),
            });
        }
        if self.max_evaluations < 100 {
            return Err(QuadratureError::InvalidSpec {
                reason: format!(
                    "max_evaluations must be at least 100 (got {})",
                    self.max_evaluations
                ),
            });
        }
        Ok(())
    }
}

/// Outcome of a converged integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: u64,
    pub converged: bool,
}

#[derive(Debug, Error)]
pub enum QuadratureError {
    #[error(
        "integral did not converge within {evaluations} evaluations \
         (best estimate {value:.12e} ± {error_estimate:.3e})"
    )]
    NonConvergence {
        value: f64,
        error_estimate: f64,
        evaluations: u64,
    },
    #[error("integrand returned a non-finite value at x = {x:.6e}")]
    NonFiniteIntegrand { x: f64 },
    #[error("box dimension {dim} exceeds the direct-integration limit of {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("invalid quadrature spec: {reason}")]
    InvalidSpec { reason: String },
    #[error("invalid integration interval ({lower}, {upper})")]
    InvalidInterval { lower: f64, upper: f64 },
}

// 15-point Kronrod nodes (positive half, descending) with the embedded
// 7-point Gauss rule. Odd indices are the Gauss points.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_838_258_730,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// Scale the raw `|K15 − G7|` difference into a safe error estimate.
/// Follows the QUADPACK heuristic: shrink only when the integrand looks
/// smooth relative to its variation, and never drop below the round-off
/// floor of the computed panel sum.
fn rescale_error(err: f64, result_abs: f64, result_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if result_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / result_asc).powf(1.5);
        scaled = if scale < 1.0 {
            result_asc * scale
        } else {
            result_asc
        };
    }
    if result_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * result_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

/// A node evaluation yields the (transformed) integrand plus a nonnegative
/// side component that is integrated along with it. The side channel carries
/// inner error estimates through nested box integration; plain 1-D calls set
/// it to zero.
type NodePair = Result<(f64, f64), QuadratureError>;

struct PanelRule {
    value: f64,
    error: f64,
    side: f64,
}

/// Apply the G7/K15 pair to one panel. 15 evaluations.
fn qk15(g: &dyn Fn(f64) -> NodePair, a: f64, b: f64) -> Result<PanelRule, QuadratureError> {
    let center = 0.5 * (a + b);
    let half_len = 0.5 * (b - a);
    let abs_half_len = half_len.abs();

    let (f_center, s_center) = g(center)?;
    let mut fv = [0.0f64; 15]; // [0..7] = center-offset pairs, index via loops below
    let mut res_gauss = f_center * WG[3];
    let mut res_kronrod = f_center * WGK[7];
    let mut res_abs = res_kronrod.abs();
    let mut res_side = s_center * WGK[7];

    let mut idx = 0;
    for j in 0..7 {
        let abscissa = half_len * XGK[j];
        let (f1, s1) = g(center - abscissa)?;
        let (f2, s2) = g(center + abscissa)?;
        let fsum = f1 + f2;
        fv[idx] = f1;
        fv[idx + 1] = f2;
        idx += 2;
        if j % 2 == 1 {
            res_gauss += WG[j / 2] * fsum;
        }
        res_kronrod += WGK[j] * fsum;
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        res_side += WGK[j] * (s1 + s2);
    }

    let mean = res_kronrod * 0.5;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for (wk, pair) in WGK[..7].iter().zip(fv.chunks_exact(2)) {
        res_asc += wk * ((pair[0] - mean).abs() + (pair[1] - mean).abs());
    }

    let err = (res_kronrod - res_gauss) * half_len;
    Ok(PanelRule {
        value: res_kronrod * half_len,
        error: rescale_error(err, res_abs * abs_half_len, res_asc * abs_half_len),
        side: res_side * half_len,
    })
}

#[derive(Debug)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    side: f64,
    seq: u64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error && self.seq == other.seq
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Worst error first; older panels win ties so pops are deterministic.
        self.error
            .total_cmp(&other.error)
            .then(other.seq.cmp(&self.seq))
    }
}

struct AdaptiveOutcome {
    value: f64,
    error: f64,
    side: f64,
    evaluations: u64,
}

/// Adaptive bisection driver on a finite interval `(a, b)`.
fn adaptive(
    g: &dyn Fn(f64) -> NodePair,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<AdaptiveOutcome, QuadratureError> {
    let mut heap: BinaryHeap<Panel> = BinaryHeap::new();
    let mut seq = 0u64;
    let mut evaluations = 0u64;

    let first = qk15(g, a, b)?;
    evaluations += 15;
    let mut total_value = first.value;
    let mut total_error = first.error;
    heap.push(Panel {
        a,
        b,
        value: first.value,
        error: first.error,
        side: first.side,
        seq,
    });

    // Sum panels in left-to-right order, so the reported totals do not
    // depend on the history of heap operations.
    let sorted_sums = |heap: &BinaryHeap<Panel>| {
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let (mut value, mut error, mut side) = (0.0, 0.0, 0.0);
        for p in panels {
            value += p.value;
            error += p.error;
            side += p.side;
        }
        (value, error, side)
    };
    let threshold = |value: f64| spec.abs_tol.max(spec.rel_tol * value.abs());

    loop {
        // The incremental totals carry rounding drift, so they are only a
        // fast pre-check; convergence is decided on the exact sorted sums
        // that the result will report.
        if total_error <= threshold(total_value) {
            let (value, error, side) = sorted_sums(&heap);
            if error <= threshold(value) {
                return Ok(AdaptiveOutcome {
                    value,
                    error,
                    side,
                    evaluations,
                });
            }
            total_value = value;
            total_error = error;
        }
        let too_narrow = {
            let worst = heap.peek().expect("heap never empties");
            let mid = 0.5 * (worst.a + worst.b);
            mid <= worst.a || mid >= worst.b
        };
        if evaluations + 30 > spec.max_evaluations || too_narrow {
            let (value, error, _) = sorted_sums(&heap);
            return Err(QuadratureError::NonConvergence {
                value,
                error_estimate: error,
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap never empties");
        let mid = 0.5 * (worst.a + worst.b);
        let left = qk15(g, worst.a, mid)?;
        let right = qk15(g, mid, worst.b)?;
        evaluations += 30;
        total_value += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        seq += 1;
        heap.push(Panel {
            a: worst.a,
            b: mid,
            value: left.value,
            error: left.error,
            side: left.side,
            seq,
        });
        seq += 1;
        heap.push(Panel {
            a: mid,
            b: worst.b,
            value: right.value,
            error: right.error,
            side: right.side,
            seq,
        });
    }
}

/// Rescale one integrand component by the transform Jacobian. An exact zero
/// short-circuits so that underflowed tails never produce `0 · ∞ = NaN`.
fn scaled_component(raw: f64, jacobian: f64, x: f64) -> Result<f64, QuadratureError> {
    if raw == 0.0 {
        return Ok(0.0);
    }
    if !raw.is_finite() {
        return Err(QuadratureError::NonFiniteIntegrand { x });
    }
    let v = raw * jacobian;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(QuadratureError::NonFiniteIntegrand { x })
    }
}

/// Wrap a pair-valued integrand on `(lower, upper)` into one on a finite
/// parameter interval, mapping unbounded endpoints per `map`.
fn transform<'f>(
    f: Box<dyn Fn(f64) -> NodePair + 'f>,
    lower: f64,
    upper: f64,
    map: InfiniteMap,
) -> (Box<dyn Fn(f64) -> NodePair + 'f>, f64, f64) {
    let lower_inf = lower == f64::NEG_INFINITY;
    let upper_inf = upper == f64::INFINITY;
    match (lower_inf, upper_inf) {
        (false, false) => (f, lower, upper),
        (true, true) => {
            let g: Box<dyn Fn(f64) -> NodePair + 'f> = match map {
                InfiniteMap::Rational => Box::new(move |t: f64| {
                    let u = 1.0 - t * t;
                    let x = t / u;
                    let jac = (1.0 + t * t) / (u * u);
                    let (v, s) = f(x)?;
                    Ok((scaled_component(v, jac, x)?, scaled_component(s, jac, x)?))
                }),
                InfiniteMap::TanLog => Box::new(move |t: f64| {
                    let half_pi = std::f64::consts::FRAC_PI_2;
                    let x = (half_pi * t).tan();
                    let c = (half_pi * t).cos();
                    let jac = half_pi / (c * c);
                    let (v, s) = f(x)?;
                    Ok((scaled_component(v, jac, x)?, scaled_component(s, jac, x)?))
                }),
            };
            (g, -1.0, 1.0)
        }
        (false, true) => {
            let g: Box<dyn Fn(f64) -> NodePair + 'f> = match map {
                InfiniteMap::Rational => Box::new(move |t: f64| {
                    let u = 1.0 - t;
                    let x = lower + t / u;
                    let jac = 1.0 / (u * u);
                    let (v, s) = f(x)?;
                    Ok((scaled_component(v, jac, x)?, scaled_component(s, jac, x)?))
                }),
                InfiniteMap::TanLog => Box::new(move |t: f64| {
                    let u = 1.0 - t;
                    let x = lower - u.ln();
                    let jac = 1.0 / u;
                    let (v, s) = f(x)?;
                    Ok((scaled_component(v, jac, x)?, scaled_component(s, jac, x)?))
                }),
            };
            (g, 0.0, 1.0)
        }
        (true, false) => {
            let g: Box<dyn Fn(f64) -> NodePair + 'f> = match map {
                InfiniteMap::Rational => Box::new(move |t: f64| {
                    let u = 1.0 - t;
                    let x = upper - t / u;
                    let jac = 1.0 / (u * u);
                    let (v, s) = f(x)?;
                    Ok((scaled_component(v, jac, x)?, scaled_component(s, jac, x)?))
                }),
                InfiniteMap::TanLog => Box::new(move |t: f64| {
                    let u = 1.0 - t;
                    let x = upper + u.ln();
                    let jac = 1.0 / u;
                    let (v, s) = f(x)?;
                    Ok((scaled_component(v, jac, x)?, scaled_component(s, jac, x)?))
                }),
            };
            (g, 0.0, 1.0)
        }
    }
}

fn check_interval(lower: f64, upper: f64) -> Result<(), QuadratureError> {
    if lower.is_nan() || upper.is_nan() || lower >= upper {
        return Err(QuadratureError::InvalidInterval { lower, upper });
    }
    Ok(())
}

/// Integrate `f` over the open interval `(lower, upper)`; either endpoint may
/// be infinite. Returns a non-convergence error (carrying the best estimate)
/// when the budget runs out, and a non-finite-integrand error if `f` produces
/// NaN or ±∞ at a node.
pub fn integrate_1d<F>(
    f: F,
    interval: (f64, f64),
    spec: &QuadratureSpec,
) -> Result<IntegrationResult, QuadratureError>
where
    F: Fn(f64) -> f64,
{
    spec.validate()?;
    let (lower, upper) = interval;
    check_interval(lower, upper)?;
    let base: Box<dyn Fn(f64) -> NodePair> = Box::new(move |x: f64| {
        let v = f(x);
        if v.is_nan() || v.is_infinite() {
            return Err(QuadratureError::NonFiniteIntegrand { x });
        }
        Ok((v, 0.0))
    });
    let (g, t_lo, t_hi) = transform(base, lower, upper, spec.infinite_map);
    let out = adaptive(g.as_ref(), t_lo, t_hi, spec)?;
    Ok(IntegrationResult {
        value: out.value,
        error_estimate: out.error,
        evaluations: out.evaluations,
        converged: true,
    })
}

/// Integrate `f` over a product of open intervals by nested 1-D quadrature.
///
/// Inner error estimates are integrated alongside the value and added to the
/// outer estimate, so the reported error is conservative for the whole box.
/// `evaluations` counts innermost calls to `f`; the per-stage budget is
/// `spec.max_evaluations` at every nesting level.
pub fn integrate_box<F>(
    f: F,
    domain: &SpatialDomain,
    spec: &QuadratureSpec,
) -> Result<IntegrationResult, QuadratureError>
where
    F: Fn(&[f64]) -> f64,
{
    spec.validate()?;
    let dim = domain.dim();
    if dim > MAX_BOX_DIM {
        return Err(QuadratureError::DimensionTooLarge {
            dim,
            max: MAX_BOX_DIM,
        });
    }
    for iv in domain.intervals() {
        check_interval(iv.lower(), iv.upper())?;
    }
    let coords = RefCell::new(vec![0.0f64; dim]);
    let inner_evals = Cell::new(0u64);
    let (value, error) = integrate_box_rec(&f, domain, 0, &coords, &inner_evals, spec)?;
    Ok(IntegrationResult {
        value,
        error_estimate: error,
        evaluations: inner_evals.get(),
        converged: true,
    })
}

fn integrate_box_rec<F>(
    f: &F,
    domain: &SpatialDomain,
    depth: usize,
    coords: &RefCell<Vec<f64>>,
    inner_evals: &Cell<u64>,
    spec: &QuadratureSpec,
) -> Result<(f64, f64), QuadratureError>
where
    F: Fn(&[f64]) -> f64,
{
    let iv = domain.intervals()[depth];
    let last = depth + 1 == domain.dim();
    let base: Box<dyn Fn(f64) -> NodePair + '_> = Box::new(move |x: f64| {
        coords.borrow_mut()[depth] = x;
        if last {
            inner_evals.set(inner_evals.get() + 1);
            let v = f(&coords.borrow());
            if v.is_nan() || v.is_infinite() {
                return Err(QuadratureError::NonFiniteIntegrand { x });
            }
            Ok((v, 0.0))
        } else {
            let (value, err) = integrate_box_rec(f, domain, depth + 1, coords, inner_evals, spec)?;
            Ok((value, err))
        }
    });
    let (g, t_lo, t_hi) = transform(base, iv.lower(), iv.upper(), spec.infinite_map);
    let out = adaptive(g.as_ref(), t_lo, t_hi, spec)?;
    Ok((out.value, out.error + out.side))
}
