//! Fugacity scaling map K' = ½K² + ⅓K³ + ⅙K⁴ in exact rational arithmetic.
//!
//! The map is assembled from track contributions on the ½K' side
//! (¼K², ⅙K³, 1/12·K⁴); each coefficient of K' is twice the summed track
//! weight at that degree. The coefficients sum to one, so K = 1 is always
//! a fixed point. Its multiplier f'(1) = 8/3 makes it repelling, and the
//! reciprocal 3/8 is the reduced second virial coefficient at the critical
//! fugacity.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default magnitude cap for [`ScalingMap::iterate`].
pub const DEFAULT_MAGNITUDE_CAP: i64 = 1_000_000_000_000;

/// Default cap on numerator/denominator bit length for [`ScalingMap::iterate`].
pub const DEFAULT_MAX_BITS: u64 = 1 << 16;

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FixedPointLocation {
    Finite(BigRational),
    Infinity,
}

impl fmt::Display for FixedPointLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(k) => write!(f, "{k}"),
            Self::Infinity => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Attracting,
    Repelling,
    Neutral,
    Divergent,
}

impl Stability {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Attracting => "attracting",
            Self::Repelling => "repelling",
            Self::Neutral => "neutral",
            Self::Divergent => "divergent",
        }
    }

    fn from_multiplier(m: &BigRational) -> Self {
        let one = BigRational::one();
        match m.abs().cmp(&one) {
            std::cmp::Ordering::Less => Self::Attracting,
            std::cmp::Ordering::Greater => Self::Repelling,
            std::cmp::Ordering::Equal => Self::Neutral,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MapFixedPoint {
    pub location: FixedPointLocation,
    /// f' at the point; `None` at infinity.
    pub multiplier: Option<BigRational>,
    pub stability: Stability,
}

/// Limits applied while iterating the map.
#[derive(Debug, Clone)]
pub struct IterateLimits {
    pub magnitude_cap: BigRational,
    pub max_bits: u64,
}

impl Default for IterateLimits {
    fn default() -> Self {
        Self {
            magnitude_cap: BigRational::from_integer(DEFAULT_MAGNITUDE_CAP.into()),
            max_bits: DEFAULT_MAX_BITS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScalingMap {
    coefficients: BTreeMap<u32, BigRational>,
    track_terms: Vec<(u32, BigRational)>,
}

impl Default for ScalingMap {
    fn default() -> Self {
        Self::from_track_terms(vec![(2, rat(1, 4)), (3, rat(1, 6)), (4, rat(1, 12))])
            .expect("built-in track weights sum to one half")
    }
}

impl ScalingMap {
    /// The map from its track terms, given on the ½K' side. Fails unless
    /// the resulting coefficients sum to one.
    pub fn from_track_terms(track_terms: Vec<(u32, BigRational)>) -> Result<Self> {
        let mut coefficients: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (degree, weight) in &track_terms {
            if *degree < 1 {
                return Err(Error::InvalidArgument("track degrees must be at least 1".into()));
            }
            *coefficients.entry(*degree).or_insert_with(BigRational::zero) += weight * rat(2, 1);
        }
        let total: BigRational = coefficients.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidArgument(format!(
                "map coefficients must sum to 1 so that f(1) = 1, got {total}"
            )));
        }
        Ok(Self { coefficients, track_terms })
    }

    pub fn coefficients(&self) -> &BTreeMap<u32, BigRational> {
        &self.coefficients
    }

    pub fn track_terms(&self) -> &[(u32, BigRational)] {
        &self.track_terms
    }

    fn degree(&self) -> u32 {
        *self.coefficients.keys().next_back().unwrap_or(&0)
    }

    /// Dense coefficient vector, index = degree.
    fn dense(&self) -> Vec<BigRational> {
        let mut v = vec![BigRational::zero(); self.degree() as usize + 1];
        for (d, c) in &self.coefficients {
            v[*d as usize] = c.clone();
        }
        v
    }

    fn check_fugacity(k: &BigRational) -> Result<()> {
        if k.is_negative() {
            Err(Error::NegativeFugacity(k.clone()))
        } else {
            Ok(())
        }
    }

    /// K_{i+1} = f(K_i).
    pub fn apply(&self, k: &BigRational) -> Result<BigRational> {
        Self::check_fugacity(k)?;
        Ok(horner(&self.dense(), k))
    }

    /// ∂K_{i+1}/∂K_i = f'(K_i).
    pub fn derivative(&self, k: &BigRational) -> Result<BigRational> {
        Self::check_fugacity(k)?;
        Ok(horner(&differentiate(&self.dense()), k))
    }

    /// Real fixed points of f, in increasing order, followed by infinity.
    ///
    /// Rational roots of f(K) − K are found exactly and deflated out; the
    /// remaining factor must be free of real roots (checked through its
    /// discriminant), otherwise the fixed points are not representable.
    pub fn fixed_points(&self) -> Result<Vec<MapFixedPoint>> {
        let mut g = self.dense();
        if g.len() < 2 {
            g.resize(2, BigRational::zero());
        }
        g[1] -= BigRational::one();
        let (mut roots, rest) = rational_roots(g);
        roots.sort();
        roots.dedup();
        if has_real_roots(&rest)? {
            return Err(Error::InvalidArgument(
                "map has irrational real fixed points; not representable exactly".into(),
            ));
        }
        let mut out = Vec::with_capacity(roots.len() + 1);
        for r in roots {
            if r.is_negative() {
                continue;
            }
            let m = self.derivative(&r)?;
            out.push(MapFixedPoint {
                location: FixedPointLocation::Finite(r),
                stability: Stability::from_multiplier(&m),
                multiplier: Some(m),
            });
        }
        if self.degree() >= 2 {
            out.push(MapFixedPoint {
                location: FixedPointLocation::Infinity,
                multiplier: None,
                stability: Stability::Divergent,
            });
        }
        Ok(out)
    }

    /// The critical fugacity K_c: the finite repelling fixed point.
    pub fn critical_fugacity(&self) -> Result<BigRational> {
        self.fixed_points()?
            .into_iter()
            .find_map(|p| match (p.location, p.stability) {
                (FixedPointLocation::Finite(k), Stability::Repelling) => Some(k),
                _ => None,
            })
            .ok_or_else(|| Error::InvalidArgument("map has no finite repelling fixed point".into()))
    }

    /// μ/kT = ln K_c; zero when K_c = 1.
    pub fn chemical_potential_over_kt(&self) -> Result<f64> {
        let kc = self.critical_fugacity()?;
        if kc.is_one() {
            return Ok(0.0);
        }
        Ok(kc.to_f64().unwrap_or(f64::NAN).ln())
    }

    /// B₂* = ∂K_i/∂K_{i+1} at K_c, i.e. 1/f'(K_c).
    pub fn b2_star(&self) -> Result<BigRational> {
        let kc = self.critical_fugacity()?;
        Ok(self.derivative(&kc)?.recip())
    }

    /// Orbit [k0, f(k0), …, fⁿ(k0)]. Stops with an error carrying the
    /// partial orbit when a value exceeds the magnitude cap or its exact
    /// representation outgrows the bit cap.
    pub fn iterate(&self, k0: &BigRational, n: usize, limits: &IterateLimits) -> Result<Vec<BigRational>> {
        Self::check_fugacity(k0)?;
        if n == 0 {
            return Err(Error::InvalidArgument("iteration count must be at least 1".into()));
        }
        let coeffs = self.dense();
        let common = coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let scaled: Vec<BigInt> = coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(common.clone())).to_integer())
            .collect();
        let mut orbit = Vec::with_capacity(n + 1);
        orbit.push(k0.clone());
        for step in 1..=n {
            let prev = orbit.last().expect("orbit is never empty");
            if bits(prev) > limits.max_bits / self.degree().max(1) as u64 {
                return Err(Error::PrecisionLimit { step, max_bits: limits.max_bits, orbit });
            }
            let next = eval_homogeneous(&scaled, &common, prev);
            let escaped = next > limits.magnitude_cap;
            orbit.push(next);
            if escaped {
                return Err(Error::Diverged { step, orbit });
            }
        }
        Ok(orbit)
    }
}

impl fmt::Display for ScalingMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .map(|(d, c)| format!("{c}*K^{d}"))
            .collect();
        f.write_str(&terms.join(" + "))
    }
}

fn bits(k: &BigRational) -> u64 {
    k.numer().bits().max(k.denom().bits())
}

fn horner(coeffs: &[BigRational], x: &BigRational) -> BigRational {
    coeffs
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// f(p/q) = Σ c_d p^d q^(D−d) / (L q^D) with integer c_d = L·coefficient,
/// so only the final quotient needs a gcd.
fn eval_homogeneous(scaled: &[BigInt], common: &BigInt, x: &BigRational) -> BigRational {
    let (p, q) = (x.numer(), x.denom());
    let degree = scaled.len() - 1;
    let mut total = BigInt::zero();
    let mut p_pow = BigInt::one();
    let mut q_pows = vec![BigInt::one(); degree + 1];
    for d in 1..=degree {
        q_pows[d] = &q_pows[d - 1] * q;
    }
    for (d, c) in scaled.iter().enumerate() {
        if !c.is_zero() {
            total += c * &p_pow * &q_pows[degree - d];
        }
        p_pow *= p;
    }
    BigRational::new(total, common * &q_pows[degree])
}

fn differentiate(coeffs: &[BigRational]) -> Vec<BigRational> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(d, c)| c * BigRational::from_integer(BigInt::from(d)))
        .collect()
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(Zero::is_zero) {
        p.pop();
    }
}

/// Divide by (x − r); the remainder must be zero.
fn deflate(p: &[BigRational], r: &BigRational) -> Vec<BigRational> {
    let n = p.len() - 1;
    let mut q = vec![BigRational::zero(); n];
    let mut carry = BigRational::zero();
    for i in (0..n).rev() {
        carry = &p[i + 1] + carry * r;
        q[i] = carry.clone();
    }
    q
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let n = n.abs();
    let limit = n.to_u64().expect("small integer coefficients");
    let mut out = Vec::new();
    let mut d = 1u64;
    while d * d <= limit {
        if limit % d == 0 {
            out.push(BigInt::from(d));
            if d * d != limit {
                out.push(BigInt::from(limit / d));
            }
        }
        d += 1;
    }
    out
}

/// All rational roots (with multiplicity) and the deflated remainder.
fn rational_roots(mut p: Vec<BigRational>) -> (Vec<BigRational>, Vec<BigRational>) {
    trim(&mut p);
    let mut roots = Vec::new();
    while p.len() > 1 && p[0].is_zero() {
        roots.push(BigRational::zero());
        p.remove(0);
    }
    'outer: while p.len() > 1 {
        // Clear denominators so the rational root theorem applies.
        let lcm = p
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = p.iter().map(|c| (c * BigRational::from_integer(lcm.clone())).to_integer()).collect();
        let lead = ints.last().expect("non-empty");
        for num in divisors(&ints[0]) {
            for den in divisors(lead) {
                for sign in [1, -1] {
                    let cand = BigRational::new(&num * sign, den.clone());
                    if horner(&p, &cand).is_zero() {
                        p = deflate(&p, &cand);
                        roots.push(cand);
                        continue 'outer;
                    }
                }
            }
        }
        break;
    }
    (roots, p)
}

fn has_real_roots(p: &[BigRational]) -> Result<bool> {
    match p.len() {
        0 | 1 => Ok(false),
        2 => Ok(true),
        3 => {
            let disc = &p[1] * &p[1] - rat(4, 1) * &p[2] * &p[0];
            Ok(!disc.is_negative())
        }
        _ => Err(Error::InvalidArgument(
            "fixed-point residual factor of degree > 2 is not supported".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(n: i64, d: i64) -> BigRational {
        rat(n, d)
    }

    #[test]
    fn coefficients_from_tracks() {
        let map = ScalingMap::default();
        let c = map.coefficients();
        assert_eq!(c[&2], k(1, 2));
        assert_eq!(c[&3], k(1, 3));
        assert_eq!(c[&4], k(1, 6));
        assert_eq!(c.values().sum::<BigRational>(), k(1, 1));
        assert_eq!(map.to_string(), "1/2*K^2 + 1/3*K^3 + 1/6*K^4");
    }

    #[test]
    fn unbalanced_tracks_are_rejected() {
        assert!(ScalingMap::from_track_terms(vec![(2, k(1, 4)), (3, k(1, 6))]).is_err());
    }

    #[test]
    fn apply_examples() {
        let map = ScalingMap::default();
        assert_eq!(map.apply(&k(1, 1)).unwrap(), k(1, 1));
        assert_eq!(map.apply(&k(0, 1)).unwrap(), k(0, 1));
        assert_eq!(map.apply(&k(2, 1)).unwrap(), k(22, 3));
        assert!(matches!(map.apply(&k(-1, 2)), Err(Error::NegativeFugacity(_))));
    }

    #[test]
    fn derivative_examples() {
        let map = ScalingMap::default();
        assert_eq!(map.derivative(&k(1, 1)).unwrap(), k(8, 3));
        assert_eq!(map.derivative(&k(0, 1)).unwrap(), k(0, 1));
        assert_eq!(map.derivative(&k(1, 2)).unwrap(), k(5, 6));
        assert!(map.derivative(&k(-1, 1)).is_err());
    }

    #[test]
    fn fixed_points_are_zero_one_infinity() {
        let map = ScalingMap::default();
        let fps = map.fixed_points().unwrap();
        assert_eq!(fps.len(), 3);
        assert_eq!(fps[0].location, FixedPointLocation::Finite(k(0, 1)));
        assert_eq!(fps[0].multiplier, Some(k(0, 1)));
        assert_eq!(fps[0].stability, Stability::Attracting);
        assert_eq!(fps[1].location, FixedPointLocation::Finite(k(1, 1)));
        assert_eq!(fps[1].multiplier, Some(k(8, 3)));
        assert_eq!(fps[1].stability, Stability::Repelling);
        assert_eq!(fps[2].location, FixedPointLocation::Infinity);
        assert_eq!(fps[2].stability, Stability::Divergent);
        for p in &fps {
            if let FixedPointLocation::Finite(x) = &p.location {
                assert_eq!(&map.apply(x).unwrap(), x);
            }
        }
    }

    #[test]
    fn b2_star_is_three_eighths() {
        let map = ScalingMap::default();
        let b2 = map.b2_star().unwrap();
        assert_eq!(b2, k(3, 8));
        assert_eq!(&b2 * map.derivative(&k(1, 1)).unwrap(), k(1, 1));
        assert_eq!(b2 + k(5, 8), k(1, 1));
        assert_eq!(map.critical_fugacity().unwrap(), k(1, 1));
        assert_eq!(map.chemical_potential_over_kt().unwrap(), 0.0);
    }

    #[test]
    fn orbit_below_one_decays() {
        let map = ScalingMap::default();
        let err = map.iterate(&k(9, 10), 20, &IterateLimits::default()).unwrap_err();
        let Error::PrecisionLimit { step, orbit, .. } = err else {
            panic!("expected the exact orbit to hit the bit cap");
        };
        assert!(step >= 7, "stopped at step {step}");
        assert!(orbit.windows(2).all(|w| w[1] < w[0]));
        assert!(orbit.last().unwrap() < &k(1, 1_000_000_000));
    }

    #[test]
    fn orbit_at_one_is_constant() {
        let map = ScalingMap::default();
        let orbit = map.iterate(&k(1, 1), 50, &IterateLimits::default()).unwrap();
        assert_eq!(orbit.len(), 51);
        assert!(orbit.iter().all(|x| x.is_one()));
    }

    #[test]
    fn orbit_above_one_diverges() {
        let map = ScalingMap::default();
        let err = map.iterate(&k(11, 10), 20, &IterateLimits::default()).unwrap_err();
        let Error::Diverged { step, orbit } = err else {
            panic!("expected divergence");
        };
        assert!(step <= 20);
        assert_eq!(orbit.len(), step + 1);
        assert!(orbit.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn iterate_argument_checks() {
        let map = ScalingMap::default();
        assert!(map.iterate(&k(1, 2), 0, &IterateLimits::default()).is_err());
        assert!(map.iterate(&k(-1, 2), 3, &IterateLimits::default()).is_err());
    }
}
