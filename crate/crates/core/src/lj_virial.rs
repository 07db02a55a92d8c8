//! Reduced second virial coefficient of the Lennard-Jones fluid.
//!
//! Three independent routes are offered:
//!
//! * [`b2_integral`]: the force-weighted form
//!   `(4/T) ∫ x² (12/x¹² − 6/x⁶) exp(−(4/T)(x⁻¹² − x⁻⁶)) dx`,
//! * [`b2_series`]: the inverse-temperature series `Σ α_n T^−(2n+1)/4`,
//! * [`b2_pair_oracle`]: the Mayer-function form `−3 ∫ (e^{−u(x)/T} − 1) x² dx`.
//!
//! The first and third are related by one integration by parts. All values
//! are in units of b₀ = 2πσ³/3 and x = r/σ.
//!
//! Both quadratures split the half line at x = 1. The inner piece starts at
//! a temperature-dependent cutoff `x_min` below which the Boltzmann factor
//! underflows; the outer piece is mapped onto (0, 1] with s = 1/x, which
//! turns the slow x⁻⁴ tail into a smooth polynomial-times-exponential.

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, Quadrature};
use crate::specfun::SeriesCoefficients;

/// Boltzmann exponent at which the inner region is dropped; e^{-740} is
/// below the smallest normal f64.
pub const UNDERFLOW_EXPONENT: f64 = 740.0;

/// Subinterval budget for each quadrature piece.
pub const MAX_INTERVALS: usize = 4000;

/// Lowest temperature at which the series route is offered.
pub const SERIES_MIN_T: f64 = 1.5;

pub const DEFAULT_ABS_TOL: f64 = 1e-12;
pub const DEFAULT_TERM_TOL: f64 = 1e-17;
pub const DEFAULT_MAX_TERMS: usize = 400;

/// Relative step of the central finite difference in [`db2_dt_fd`].
pub const FD_REL_STEP: f64 = 1e-6;

/// Quadrature tolerance used under the finite difference.
const FD_ABS_TOL: f64 = 1e-13;

/// Reduced temperature T* = kT/ε₀.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
#[serde(transparent)]
pub struct ReducedTemperature(f64);

impl ReducedTemperature {
    pub fn new(t_star: f64) -> Result<Self> {
        if t_star.is_finite() && t_star > 0.0 {
            Ok(Self(t_star))
        } else {
            Err(Error::InvalidTemperature { t: t_star })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum B2Method {
    Integral,
    Series,
    PairOracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct B2Evaluation {
    pub value: f64,
    pub method: B2Method,
    /// Upper-bound style estimate, not a guarantee.
    pub est_error: f64,
    /// Series terms used, or integrand evaluations for the quadratures.
    pub terms_or_nodes: usize,
}

/// Reduced Lennard-Jones pair potential u(x)/ε₀ = 4(x⁻¹² − x⁻⁶).
pub fn lj_potential(x: f64) -> f64 {
    let x6 = x.powi(-6);
    4.0 * (x6 * x6 - x6)
}

/// Inner cutoff where u(x)/T reaches [`UNDERFLOW_EXPONENT`].
pub fn inner_cutoff(t: ReducedTemperature) -> f64 {
    // Solve y² − y = E·T/4 for y = x⁻⁶.
    let c = UNDERFLOW_EXPONENT * t.get() / 4.0;
    let y = 0.5 * (1.0 + (1.0 + 4.0 * c).sqrt());
    y.powf(-1.0 / 6.0)
}

fn check_tol(abs_tol: f64) -> Result<()> {
    if abs_tol > 0.0 && abs_tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "absolute tolerance must be positive, got {abs_tol}"
        )))
    }
}

/// Sum two quadrature pieces, turning a budget failure in either into a
/// convergence error that carries the combined best estimate.
fn two_piece<F, G>(inner: F, outer: G, x_min: f64, abs_tol: f64) -> Result<(f64, f64, usize)>
where
    F: Fn(f64) -> f64,
    G: Fn(f64) -> f64,
{
    let half = 0.5 * abs_tol;
    let a = integrate(inner, x_min, 1.0, half, MAX_INTERVALS);
    let b = integrate(outer, 0.0, 1.0, half, MAX_INTERVALS);
    match (a, b) {
        (Ok(a), Ok(b)) => Ok((a.value + b.value, a.est_error + b.est_error, a.evaluations + b.evaluations)),
        (a, b) => {
            let (va, ea, na) = best_effort(a);
            let (vb, eb, nb) = best_effort(b);
            Err(Error::QuadratureNotConverged {
                estimate: va + vb,
                est_error: ea + eb,
                abs_tol,
                intervals: na + nb,
            })
        }
    }
}

fn best_effort(r: Result<Quadrature>) -> (f64, f64, usize) {
    match r {
        Ok(q) => (q.value, q.est_error, q.intervals),
        Err(Error::QuadratureNotConverged { estimate, est_error, intervals, .. }) => {
            (estimate, est_error, intervals)
        }
        Err(_) => (f64::NAN, f64::INFINITY, 0),
    }
}

/// B₂ from the force-weighted integral.
pub fn b2_integral(t: ReducedTemperature, abs_tol: f64) -> Result<B2Evaluation> {
    check_tol(abs_tol)?;
    let beta4 = 4.0 / t.get();
    let inner = |x: f64| {
        let x6 = x.powi(-6);
        let x12 = x6 * x6;
        beta4 * x * x * (12.0 * x12 - 6.0 * x6) * (-beta4 * (x12 - x6)).exp()
    };
    let outer = |s: f64| {
        let s2 = s * s;
        let s6 = s2 * s2 * s2;
        let s8 = s6 * s2;
        beta4 * (12.0 * s8 - 6.0 * s2) * (-beta4 * (s6 * s6 - s6)).exp()
    };
    let x_min = inner_cutoff(t);
    // The integrand rises monotonically on (0, x_min], so x_min·g(x_min)
    // bounds the dropped piece.
    let dropped = x_min * inner(x_min).abs();
    let (value, err, evals) = two_piece(inner, outer, x_min, abs_tol)?;
    Ok(B2Evaluation {
        value,
        method: B2Method::Integral,
        est_error: err + dropped,
        terms_or_nodes: evals,
    })
}

/// B₂ from the Mayer-function form, used as an independent check on
/// [`b2_integral`].
pub fn b2_pair_oracle(t: ReducedTemperature, abs_tol: f64) -> Result<B2Evaluation> {
    check_tol(abs_tol)?;
    let beta = 1.0 / t.get();
    let inner = |x: f64| -3.0 * (-beta * lj_potential(x)).exp_m1() * x * x;
    let outer = |s: f64| {
        if s == 0.0 {
            return 0.0;
        }
        let s2 = s * s;
        let s6 = s2 * s2 * s2;
        -3.0 * (-4.0 * beta * (s6 * s6 - s6)).exp_m1() / (s2 * s2)
    };
    let x_min = inner_cutoff(t);
    // Below x_min the Mayer function is −1 to within e^{-740}, so that
    // piece is exactly ∫ 3x² dx = x_min³.
    let core = x_min.powi(3);
    let (value, err, evals) = two_piece(inner, outer, x_min, abs_tol)?;
    Ok(B2Evaluation {
        value: value + core,
        method: B2Method::PairOracle,
        est_error: err + core * (-UNDERFLOW_EXPONENT).exp(),
        terms_or_nodes: evals,
    })
}

fn default_coefficients() -> &'static SeriesCoefficients {
    static TABLE: OnceLock<SeriesCoefficients> = OnceLock::new();
    TABLE.get_or_init(|| SeriesCoefficients::compute(DEFAULT_MAX_TERMS))
}

/// B₂ from the inverse-temperature series with the built-in α_n table.
pub fn b2_series(t: ReducedTemperature, term_tol: f64, max_terms: usize) -> Result<B2Evaluation> {
    if max_terms <= DEFAULT_MAX_TERMS {
        b2_series_with(default_coefficients(), t, term_tol, max_terms)
    } else {
        b2_series_with(&SeriesCoefficients::compute(max_terms), t, term_tol, max_terms)
    }
}

/// B₂ from the series using a caller-supplied α_n table.
pub fn b2_series_with(
    coeffs: &SeriesCoefficients,
    t: ReducedTemperature,
    term_tol: f64,
    max_terms: usize,
) -> Result<B2Evaluation> {
    if t.get() < SERIES_MIN_T {
        return Err(Error::OutsideSeriesRegion { t: t.get(), min: SERIES_MIN_T });
    }
    if !(term_tol > 0.0) {
        return Err(Error::InvalidArgument(format!("term tolerance must be positive, got {term_tol}")));
    }
    if max_terms == 0 || max_terms > coeffs.truncation_order() {
        return Err(Error::InvalidArgument(format!(
            "max_terms must be in 1..={}, got {max_terms}",
            coeffs.truncation_order()
        )));
    }
    let step = t.get().powf(-0.5);
    let mut power = t.get().powf(-0.25);
    let mut sum = 0.0;
    let mut abs_sum = 0.0;
    let mut last = f64::INFINITY;
    let mut used = 0;
    for &alpha in &coeffs.alphas()[..max_terms] {
        let term = alpha * power;
        sum += term;
        abs_sum += term.abs();
        last = term;
        used += 1;
        if term.abs() < term_tol {
            break;
        }
        power *= step;
    }
    if last.abs() >= term_tol {
        return Err(Error::SeriesNotConverged { value: sum, last_term: last, terms: used });
    }
    Ok(B2Evaluation {
        value: sum,
        method: B2Method::Series,
        est_error: last.abs() + 4.0 * f64::EPSILON * abs_sum,
        terms_or_nodes: used,
    })
}

/// Term-wise derivative of the series, Σ α_n·(−(2n+1)/4)·T^−(2n+5)/4.
pub fn db2_dt_series(t: ReducedTemperature) -> Result<f64> {
    if t.get() < SERIES_MIN_T {
        return Err(Error::OutsideSeriesRegion { t: t.get(), min: SERIES_MIN_T });
    }
    let coeffs = default_coefficients();
    let step = t.get().powf(-0.5);
    let mut power = t.get().powf(-1.25);
    let mut sum = 0.0;
    for (n, &alpha) in coeffs.alphas().iter().enumerate() {
        let term = -alpha * (2 * n + 1) as f64 / 4.0 * power;
        sum += term;
        if term.abs() < DEFAULT_TERM_TOL * 1e-2 {
            return Ok(sum);
        }
        power *= step;
    }
    Err(Error::SeriesNotConverged {
        value: sum,
        last_term: f64::NAN,
        terms: coeffs.truncation_order(),
    })
}

/// Central finite difference of [`b2_integral`] with step h = T·1e-6.
pub fn db2_dt_fd(t: ReducedTemperature) -> Result<f64> {
    let h = t.get() * FD_REL_STEP;
    let up = b2_integral(ReducedTemperature::new(t.get() + h)?, FD_ABS_TOL)?.value;
    let down = b2_integral(ReducedTemperature::new(t.get() - h)?, FD_ABS_TOL)?.value;
    Ok((up - down) / (2.0 * h))
}

/// dB₂/dT*: differentiated series where it applies, finite differences of
/// the integral elsewhere.
pub fn db2_dt(t: ReducedTemperature) -> Result<f64> {
    match db2_dt_series(t) {
        Ok(d) => Ok(d),
        Err(Error::OutsideSeriesRegion { .. } | Error::SeriesNotConverged { .. }) => db2_dt_fd(t),
        Err(e) => Err(e),
    }
}

/// dB₂/dT* by differentiating the Mayer form under the integral sign,
/// `−3 ∫ e^{−u/T} (u/T²) x² dx`. Shares no code path with the series.
pub fn db2_dt_integral(t: ReducedTemperature, abs_tol: f64) -> Result<f64> {
    check_tol(abs_tol)?;
    let beta = 1.0 / t.get();
    let inner = |x: f64| {
        let u = lj_potential(x);
        -3.0 * (-beta * u).exp() * u * beta * beta * x * x
    };
    let outer = |s: f64| {
        let s2 = s * s;
        let s6 = s2 * s2 * s2;
        let w = s6 * s6 - s6;
        -12.0 * beta * beta * (s6 * s2 - s2) * (-4.0 * beta * w).exp()
    };
    let x_min = inner_cutoff(t);
    let (value, _, _) = two_piece(inner, outer, x_min, abs_tol)?;
    Ok(value)
}
