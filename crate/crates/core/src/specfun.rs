//! Real gamma function and the coefficients of the inverse-temperature
//! series for the Lennard-Jones second virial coefficient.
//!
//! `gamma` uses the Lanczos approximation with Pugh's parameters
//! (r = 10.900511, 11 terms) for x >= 1/2 and the reflection formula
//! below that. Relative error stays below 1e-12 on [-30, 30] away from
//! the poles.

use std::f64::consts::{E, LN_2, PI};

use crate::error::{Error, Result};

const LANCZOS_R: f64 = 10.900511;

const LANCZOS_DK: [f64; 11] = [
    2.48574089138753565546e-5,
    1.05142378581721974210,
    -3.45687097222016235469,
    4.51227709466894823700,
    -2.98285225323576655721,
    1.05639711577126713077,
    -1.95428773191645869583e-1,
    1.70970543404441224307e-2,
    -5.71926117404305781283e-4,
    4.63399473359905636708e-6,
    -2.71994908488607703910e-9,
];

// 2 * sqrt(e / pi)
const TWO_SQRT_E_OVER_PI: f64 = 1.8603827342052657173362492472666631120594218414085755;

// ln(2 * sqrt(e / pi))
const LN_TWO_SQRT_E_OVER_PI: f64 = 0.6207822376352452223455184457816472122519;

/// Largest n for which `alpha_coefficient` uses the direct factorial form.
pub const DIRECT_ALPHA_MAX_N: u32 = 20;

/// Argument of the gamma function, checked against the poles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaArgument(f64);

impl GammaArgument {
    pub fn new(x: f64) -> Result<Self> {
        if !x.is_finite() || (x <= 0.0 && x == x.round()) {
            return Err(Error::Pole { x });
        }
        Ok(Self(x))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn lanczos_sum(x: f64) -> f64 {
    LANCZOS_DK
        .iter()
        .enumerate()
        .skip(1)
        .fold(LANCZOS_DK[0], |s, (i, &dk)| s + dk / (x + i as f64 - 1.0))
}

/// sin(pi * x) with the argument reduced exactly before scaling by pi, so
/// that large |x| near an integer keeps full relative accuracy.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if n.rem_euclid(2.0) == 0.0 {
        s
    } else {
        -s
    }
}

/// Gamma function for real arguments.
pub fn gamma(x: f64) -> Result<f64> {
    let x = GammaArgument::new(x)?.value();
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        PI / (sin_pi(x) * gamma_unchecked(1.0 - x))
    } else {
        let s = lanczos_sum(x);
        s * TWO_SQRT_E_OVER_PI * ((x - 0.5 + LANCZOS_R) / E).powf(x - 0.5)
    }
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "ln_gamma needs a positive finite argument, got {x}"
        )));
    }
    if x < 0.5 {
        // Γ(x) = Γ(x + 1) / x keeps the Lanczos sum in its accurate range.
        return Ok(ln_gamma_lanczos(x + 1.0) - x.ln());
    }
    Ok(ln_gamma_lanczos(x))
}

fn ln_gamma_lanczos(x: f64) -> f64 {
    lanczos_sum(x).ln() + LN_TWO_SQRT_E_OVER_PI + (x - 0.5) * ((x - 0.5 + LANCZOS_R).ln() - 1.0)
}

/// ln|Γ(x)| together with the sign of Γ(x), for any non-pole real x.
pub fn ln_gamma_signed(x: f64) -> Result<(f64, f64)> {
    let x = GammaArgument::new(x)?.value();
    if x > 0.0 {
        return Ok((ln_gamma(x)?, 1.0));
    }
    // Reflection: Γ(x) = π / (sin(πx) Γ(1 - x)).
    let s = sin_pi(x);
    let lg = PI.ln() - s.abs().ln() - ln_gamma(1.0 - x)?;
    Ok((lg, s.signum()))
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// α_n by the direct product form −√2·Γ((2n−1)/4) / (2^(2−n)·n!).
///
/// Overflows for large n; see [`alpha_coefficient_log`].
pub fn alpha_coefficient_direct(n: u32) -> f64 {
    let g = gamma_unchecked((2.0 * n as f64 - 1.0) / 4.0);
    -std::f64::consts::SQRT_2 * g / (2f64.powi(2 - n as i32) * factorial(n))
}

/// α_n evaluated in log space with the sign carried separately.
pub fn alpha_coefficient_log(n: u32) -> f64 {
    let arg = (2.0 * n as f64 - 1.0) / 4.0;
    // (2n - 1)/4 is never an integer, so this cannot hit a pole.
    let (ln_g, sign_g) = ln_gamma_signed(arg).expect("(2n-1)/4 is never a pole");
    let ln_fact = if n <= DIRECT_ALPHA_MAX_N {
        factorial(n).ln()
    } else {
        ln_gamma(n as f64 + 1.0).expect("n + 1 > 0")
    };
    let ln_mag = 0.5 * LN_2 + ln_g - (2.0 - n as f64) * LN_2 - ln_fact;
    -sign_g * ln_mag.exp()
}

/// α_n, the coefficient of (1/T*)^((2n+1)/4) in the series for the reduced
/// Lennard-Jones second virial coefficient.
pub fn alpha_coefficient(n: u32) -> f64 {
    if n <= DIRECT_ALPHA_MAX_N {
        alpha_coefficient_direct(n)
    } else {
        alpha_coefficient_log(n)
    }
}

/// A truncated table of α_n.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesCoefficients {
    alphas: Vec<f64>,
}

impl SeriesCoefficients {
    /// α_0 .. α_{order-1}.
    pub fn compute(order: usize) -> Self {
        let alphas = (0..order as u32).map(alpha_coefficient).collect();
        Self { alphas }
    }

    /// Build from arbitrary values. Used for fault injection in `verify`.
    pub fn from_values(alphas: Vec<f64>) -> Self {
        Self { alphas }
    }

    pub fn truncation_order(&self) -> usize {
        self.alphas.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.alphas.get(n).copied()
    }

    /// Replace α_n in place.
    pub fn set(&mut self, n: usize, value: f64) {
        self.alphas[n] = value;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn known_values() {
        assert!(rel(gamma(0.5).unwrap(), 1.772_453_850_905_516) < 1e-12);
        assert!(rel(gamma(5.0).unwrap(), 24.0) < 1e-12);
        assert!(rel(gamma(-0.25).unwrap(), -4.901_666_809_860_710_4) < 1e-12);
        assert!(rel(gamma(1.0).unwrap(), 1.0) < 1e-14);
    }

    // Reference values from a 30-digit evaluation.
    #[test]
    fn reference_table() {
        let table = [
            (0.1, 9.513_507_698_668_731_285_8),
            (0.3, 2.991_568_987_687_590_744_6),
            (0.7, 1.298_055_332_647_557_856_0),
            (1.3, 0.897_470_696_306_277_181_75),
            (2.5, 1.329_340_388_179_137_020_5),
            (7.5, 1_871.254_305_797_788_346_5),
            (12.5, 136_843_365.465_565_857_26),
            (15.2, 149_037_380_723.386_112_22),
            (29.5, 1.634_812_519_827_426_644_4e30),
            (-0.5, -3.544_907_701_811_032_054_6),
            (-2.5, -0.945_308_720_482_941_881_23),
            (-7.3, 4.183_878_730_135_480_213_3e-4),
            (-29.5, 6.514_182_203_267_232_407_7e-32),
            (0.25, 3.625_609_908_221_908_311_9),
            (0.75, 1.225_416_702_465_177_645_1),
        ];
        for (x, g) in table {
            let got = gamma(x).unwrap();
            assert!(rel(got, g) < 1e-12, "gamma({x}) = {got}, want {g}");
        }
    }

    #[test]
    fn poles_are_rejected() {
        for x in [0.0, -1.0, -2.0, -17.0] {
            match gamma(x) {
                Err(Error::Pole { x: bad }) => assert_eq!(bad, x),
                other => panic!("expected pole error for {x}, got {other:?}"),
            }
        }
        assert!(gamma(f64::NAN).is_err());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for x in [0.05, 0.3, 1.0, 2.5, 10.0, 25.0, 100.5] {
            let lg = ln_gamma(x).unwrap();
            if x < 150.0 {
                assert!((lg - gamma(x).unwrap().ln()).abs() < 1e-12 * lg.abs().max(1.0));
            }
        }
        let (lg, s) = ln_gamma_signed(-0.25).unwrap();
        assert_eq!(s, -1.0);
        assert!((lg - 4.901_666_809_860_710_4f64.ln()).abs() < 1e-13);
        assert!(ln_gamma(0.0).is_err());
        assert!(ln_gamma(-1.5).is_err());
    }

    #[test]
    fn first_alphas() {
        // Γ(-1/4) and Γ(1/4) from a 30-digit evaluation.
        let a0 = -std::f64::consts::SQRT_2 * -4.901_666_809_860_710_58 / 4.0;
        let a1 = -std::f64::consts::SQRT_2 * 3.625_609_908_221_908_311_9 / 2.0;
        assert!(rel(alpha_coefficient(0), a0) < 1e-12);
        assert!(rel(alpha_coefficient(1), a1) < 1e-12);
        assert!((alpha_coefficient(0) - 1.733_00).abs() < 1e-4);
        assert!((alpha_coefficient(1) + 2.563_69).abs() < 1e-4);
    }

    #[test]
    fn alpha_algebraic_identity() {
        for n in 0..=20u32 {
            let alt = -(2f64).powf(n as f64 + 0.5) * gamma((2.0 * n as f64 - 1.0) / 4.0).unwrap()
                / (4.0 * factorial(n));
            assert!(rel(alpha_coefficient(n), alt) < 1e-13, "n = {n}");
        }
    }

    #[test]
    fn direct_and_log_space_agree() {
        for n in 0..=30u32 {
            let d = alpha_coefficient_direct(n);
            let l = alpha_coefficient_log(n);
            assert!(rel(l, d) < 1e-12, "n = {n}: {d} vs {l}");
        }
    }

    #[test]
    fn alpha_signs_and_finiteness() {
        let c = SeriesCoefficients::compute(400);
        assert_eq!(c.truncation_order(), 400);
        assert!(c.alphas()[0] > 0.0);
        for (n, a) in c.alphas().iter().enumerate().skip(1) {
            assert!(a.is_finite(), "alpha_{n} not finite");
            // Magnitudes fall below the subnormal range near n = 350.
            if n < 300 {
                assert!(*a < 0.0, "alpha_{n} = {a}");
            } else {
                assert!(*a <= 0.0, "alpha_{n} = {a}");
            }
        }
    }

    #[test]
    fn sin_pi_is_exact_at_integers() {
        assert_eq!(sin_pi(3.0), 0.0);
        assert!((sin_pi(-29.5) - 1.0).abs() < 1e-15);
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-15);
    }
}
