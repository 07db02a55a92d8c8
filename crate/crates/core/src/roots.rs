//! Bracketed scalar root refinement (Brent's method).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub bracket: (f64, f64),
    pub iterations: usize,
}

/// Stopping rule: |f(x)| <= `f_tol`, or the bracket is narrower than `x_tol`.
#[derive(Debug, Clone, Copy)]
pub struct Stop {
    pub f_tol: f64,
    pub x_tol: f64,
    pub max_iter: usize,
}

/// Brent's method on a sign-changing bracket. `f` may fail; its error is
/// propagated unchanged.
pub fn brent<F>(mut f: F, low: f64, high: f64, stop: Stop) -> Result<Root>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut a, mut b) = (low, high);
    let mut fa = f(a)?;
    let mut fb = f(b)?;
    if fa == 0.0 {
        return Ok(Root { x: a, fx: fa, bracket: (a, a), iterations: 0 });
    }
    if fb == 0.0 {
        return Ok(Root { x: b, fx: fb, bracket: (b, b), iterations: 0 });
    }
    if fa.signum() == fb.signum() || fa.is_nan() || fb.is_nan() {
        return Err(Error::NoSignChange { low, high, f_low: fa, f_high: fb });
    }

    // b is the best estimate, c the contrapoint with f(c) of opposite sign.
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;

    for iter in 1..=stop.max_iter {
        if fb.signum() == fc.signum() {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * stop.x_tol;
        let xm = 0.5 * (c - b);
        if fb.abs() <= stop.f_tol || xm.abs() <= tol1 {
            return Ok(Root { x: b, fx: fb, bracket: ordered(b, c), iterations: iter });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            // Inverse quadratic interpolation, or secant when a == c.
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b)?;
    }
    Err(Error::RootNotConverged {
        best: b,
        bracket: ordered(b, c),
        iterations: stop.max_iter,
    })
}

fn ordered(x: f64, y: f64) -> (f64, f64) {
    if x <= y {
        (x, y)
    } else {
        (y, x)
    }
}

/// Golden-section search for the maximum of a unimodal function on
/// `[low, high]`, stopping when the bracket is narrower than `x_tol`.
pub fn golden_max<F>(mut f: F, low: f64, high: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (low, high);
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while (b - a).abs() > x_tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2)?;
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1)?;
        }
    }
    Ok(0.5 * (a + b))
}

#[cfg(test)]
mod tests {
    use super::*;

    const STOP: Stop = Stop { f_tol: 1e-14, x_tol: 1e-14, max_iter: 100 };

    #[test]
    fn cubic_root() {
        let r = brent(|x| Ok(x * x * x - 2.0), 0.0, 2.0, STOP).unwrap();
        assert!((r.x - 2f64.cbrt()).abs() < 1e-13);
        assert!(r.bracket.0 <= r.x && r.x <= r.bracket.1);
    }

    #[test]
    fn no_sign_change() {
        let err = brent(|x| Ok(x * x + 1.0), -1.0, 1.0, STOP).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn iteration_cap() {
        let stop = Stop { f_tol: 0.0, x_tol: 0.0, max_iter: 3 };
        let err = brent(|x: f64| Ok(x.tan() - 1.0), 0.0, 1.0, stop).unwrap_err();
        assert!(matches!(err, Error::RootNotConverged { iterations: 3, .. }));
    }

    #[test]
    fn golden_section() {
        let x = golden_max(|x: f64| Ok(-(x - 1.3).powi(2)), 0.0, 4.0, 1e-9).unwrap();
        assert!((x - 1.3).abs() < 1e-8);
    }
}
