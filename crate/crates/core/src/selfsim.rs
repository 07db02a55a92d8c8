//! The self-similarity condition dB₂/dT* = B₂/T* and its root, together
//! with the Boyle point where B₂ itself vanishes.
//!
//! The residual r(T) = dB₂/dT − B₂/T equals T·d(B₂/T)/dT, so its root is
//! the maximum of B₂/T. [`maximize_b2_over_t`] locates that maximum along
//! a separate path (Mayer-form quadrature and its under-the-integral
//! derivative) as a cross-check on [`find_selfsim_fixpoint`].

use serde::Serialize;

use crate::error::{Error, Result};
use crate::lj_virial::{
    b2_integral, b2_pair_oracle, db2_dt, db2_dt_integral, ReducedTemperature, DEFAULT_ABS_TOL,
};
use crate::roots::{brent, golden_max, Root, Stop};

/// Search window for the self-similar point. Contains 20/3 and excludes
/// the Boyle region, where the residual is positive.
pub const DEFAULT_WINDOW: (f64, f64) = (4.0, 12.0);

/// Bracket for the Boyle root.
pub const DEFAULT_BOYLE_WINDOW: (f64, f64) = (2.0, 5.0);

pub const DEFAULT_TOL: f64 = 1e-10;

pub const MAX_ITERATIONS: usize = 200;

/// Frozen self-similar point, computed independently at 30 digits.
pub const GOLDEN_T_G: f64 = 6.430_798_472_240_579_4;
pub const GOLDEN_B2_AT_T_G: f64 = 0.348_274_831_903_363_73;
/// Frozen Boyle temperature, computed independently at 30 digits.
pub const GOLDEN_T_BOYLE: f64 = 3.417_928_023_049_112_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FixedPointResult {
    pub t_star: ReducedTemperature,
    pub b2_at_t: f64,
    pub residual: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
    pub converged: bool,
}

/// r(T*) = dB₂/dT* − B₂(T*)/T*.
pub fn residual(t: ReducedTemperature) -> Result<f64> {
    let b2 = b2_integral(t, DEFAULT_ABS_TOL)?.value;
    Ok(db2_dt(t)? - b2 / t.get())
}

fn check_bracket(bracket: (f64, f64), tol: f64) -> Result<()> {
    ReducedTemperature::new(bracket.0)?;
    ReducedTemperature::new(bracket.1)?;
    if !(bracket.0 < bracket.1) {
        return Err(Error::InvalidArgument(format!(
            "bracket must satisfy low < high, got [{}, {}]",
            bracket.0, bracket.1
        )));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    Ok(())
}

fn stop_rule(bracket: (f64, f64), tol: f64) -> Stop {
    Stop {
        f_tol: tol,
        x_tol: tol * bracket.1,
        max_iter: MAX_ITERATIONS,
    }
}

fn finish(root: Root) -> Result<FixedPointResult> {
    let t = ReducedTemperature::new(root.x)?;
    Ok(FixedPointResult {
        t_star: t,
        b2_at_t: b2_integral(t, DEFAULT_ABS_TOL)?.value,
        residual: root.fx,
        bracket: root.bracket,
        iterations: root.iterations,
        converged: true,
    })
}

/// Root of the self-similarity residual inside `bracket`.
pub fn find_selfsim_fixpoint(bracket: (f64, f64), tol: f64) -> Result<FixedPointResult> {
    check_bracket(bracket, tol)?;
    let root = brent(
        |x| residual(ReducedTemperature::new(x)?),
        bracket.0,
        bracket.1,
        stop_rule(bracket, tol),
    )?;
    finish(root)
}

/// Root of B₂(T*) inside `bracket`.
pub fn find_boyle(bracket: (f64, f64), tol: f64) -> Result<FixedPointResult> {
    check_bracket(bracket, tol)?;
    let root = brent(
        |x| Ok(b2_integral(ReducedTemperature::new(x)?, DEFAULT_ABS_TOL)?.value),
        bracket.0,
        bracket.1,
        stop_rule(bracket, tol),
    )?;
    finish(root)
}

/// Boyle root found from the Mayer form instead of the force-weighted one.
pub fn find_boyle_pair_oracle(bracket: (f64, f64), tol: f64) -> Result<f64> {
    check_bracket(bracket, tol)?;
    let root = brent(
        |x| Ok(b2_pair_oracle(ReducedTemperature::new(x)?, DEFAULT_ABS_TOL)?.value),
        bracket.0,
        bracket.1,
        stop_rule(bracket, tol),
    )?;
    Ok(root.x)
}

/// Maximizer of B₂(T)/T over `window`: golden-section search to 1e-4,
/// then a root of d(B₂/T)/dT built from the Mayer form and its
/// under-the-integral derivative.
pub fn maximize_b2_over_t(window: (f64, f64), tol: f64) -> Result<f64> {
    check_bracket(window, tol)?;
    let ratio = |x: f64| {
        let t = ReducedTemperature::new(x)?;
        Ok(b2_pair_oracle(t, DEFAULT_ABS_TOL)?.value / x)
    };
    let coarse = golden_max(ratio, window.0, window.1, 1e-4)?;
    let slope = |x: f64| {
        let t = ReducedTemperature::new(x)?;
        let b2 = b2_pair_oracle(t, DEFAULT_ABS_TOL)?.value;
        let d = db2_dt_integral(t, 1e-13)?;
        Ok((d - b2 / x) / x)
    };
    let lo = (coarse - 1e-2).max(window.0);
    let hi = (coarse + 1e-2).min(window.1);
    let stop = Stop { f_tol: 0.0, x_tol: tol * hi, max_iter: MAX_ITERATIONS };
    Ok(brent(slope, lo, hi, stop)?.x)
}

/// Number of sign changes of the residual on the grid low, low + step, ….
pub fn residual_sign_changes(window: (f64, f64), step: f64) -> Result<usize> {
    let n = ((window.1 - window.0) / step).round() as usize;
    let mut changes = 0;
    let mut prev = residual(ReducedTemperature::new(window.0)?)?;
    for i in 1..=n {
        let r = residual(ReducedTemperature::new(window.0 + i as f64 * step)?)?;
        if r.signum() != prev.signum() {
            changes += 1;
        }
        prev = r;
    }
    Ok(changes)
}

/// E_c = T_g*·ε₀ from a converged self-similar point.
pub fn localized_energy(eps0: f64, fixpoint: &FixedPointResult) -> Result<f64> {
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps0 must be positive, got {eps0}")));
    }
    if !fixpoint.converged {
        return Err(Error::InvalidArgument("self-similar point did not converge".into()));
    }
    Ok(fixpoint.t_star.get() * eps0)
}
