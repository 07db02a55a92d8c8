use num_rational::BigRational;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("gamma function pole at x = {x}")]
    Pole { x: f64 },

    #[error("reduced temperature must be finite and positive, got {t}")]
    InvalidTemperature { t: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "quadrature did not reach tolerance {abs_tol:e} within {intervals} intervals \
         (best estimate {estimate}, error estimate {est_error:e})"
    )]
    QuadratureNotConverged {
        estimate: f64,
        est_error: f64,
        abs_tol: f64,
        intervals: usize,
    },

    #[error("series did not converge after {terms} terms (partial sum {value}, last term {last_term:e})")]
    SeriesNotConverged {
        value: f64,
        last_term: f64,
        terms: usize,
    },

    #[error("series route is only offered for T* >= {min}, got {t}")]
    OutsideSeriesRegion { t: f64, min: f64 },

    #[error("no sign change over [{low}, {high}] (f = {f_low:e}, {f_high:e})")]
    NoSignChange {
        low: f64,
        high: f64,
        f_low: f64,
        f_high: f64,
    },

    #[error("root refinement stopped after {iterations} iterations with bracket [{}, {}]", .bracket.0, .bracket.1)]
    RootNotConverged {
        best: f64,
        bracket: (f64, f64),
        iterations: usize,
    },

    #[error("fugacity must be non-negative, got {0}")]
    NegativeFugacity(BigRational),

    #[error("orbit left the magnitude cap at step {step}")]
    Diverged {
        step: usize,
        orbit: Vec<BigRational>,
    },

    #[error("exact orbit exceeded the {max_bits}-bit size cap at step {step}")]
    PrecisionLimit {
        step: usize,
        max_bits: u64,
        orbit: Vec<BigRational>,
    },

    #[error("cluster integrals must start with b1 = 1, got {0}")]
    Normalization(BigRational),

    #[error("need at least {min} samples, got {samples}")]
    TooFewSamples { samples: u64, min: u64 },

    #[error("cascade order must be in 1..=8, got {0}")]
    InvalidOrder(u32),
}
