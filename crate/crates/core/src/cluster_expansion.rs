//! Virial coefficients from cluster integrals.
//!
//! With z the fugacity variable, the grand-canonical expansions read
//! βp = Σ b̄_l z^l and ρ = Σ l·b̄_l z^l. Matching βp = Σ B_k ρ^k order by
//! order gives the virial coefficients; B_k first appears at order z^k,
//! so the match is a triangular solve. All arithmetic is exact.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Truncated power series Σ_{k=0}^{N} c_k z^k. Coefficients beyond the
/// truncation order N are never read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalSeries {
    coefficients: Vec<BigRational>,
}

impl FormalSeries {
    /// Series with the given coefficients c_0, c_1, …; the truncation
    /// order is `coefficients.len() - 1`.
    pub fn new(coefficients: Vec<BigRational>) -> Self {
        assert!(!coefficients.is_empty(), "a series needs at least c_0");
        Self { coefficients }
    }

    pub fn zero(truncation: usize) -> Self {
        Self::new(vec![BigRational::zero(); truncation + 1])
    }

    /// The series z truncated at `truncation`.
    pub fn variable(truncation: usize) -> Self {
        let mut s = Self::zero(truncation);
        if truncation >= 1 {
            s.coefficients[1] = BigRational::one();
        }
        s
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.coefficients
    }

    /// Coefficient of z^k, zero beyond the truncation.
    pub fn coeff(&self, k: usize) -> BigRational {
        self.coefficients.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Same series re-truncated at `truncation` (padding with zeros).
    pub fn truncate(&self, truncation: usize) -> Self {
        Self::new((0..=truncation).map(|k| self.coeff(k)).collect())
    }

    fn common(&self, other: &Self) -> usize {
        self.truncation().min(other.truncation())
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.common(other);
        Self::new((0..=n).map(|k| self.coeff(k) + other.coeff(k)).collect())
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coefficients.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.common(other);
        let mut out = vec![BigRational::zero(); n + 1];
        for (i, a) in self.coefficients.iter().enumerate().take(n + 1) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coefficients.iter().enumerate().take(n + 1 - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Powers self^0 ..= self^max at this series' truncation.
    pub fn powers(&self, max: usize) -> Vec<Self> {
        let mut one = Self::zero(self.truncation());
        one.coefficients[0] = BigRational::one();
        let mut out = vec![one];
        for k in 1..=max {
            let next = out[k - 1].mul(self);
            out.push(next);
        }
        out
    }

    /// self(inner(z)); `inner` must have no constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        if !inner.coeff(0).is_zero() {
            return Err(Error::InvalidArgument("inner series must vanish at z = 0".into()));
        }
        let n = self.common(inner);
        let inner = inner.truncate(n);
        let mut out = Self::zero(n);
        for (k, p) in inner.powers(n).iter().enumerate() {
            out = out.add(&p.scale(&self.coeff(k)));
        }
        Ok(out)
    }

    /// Compositional inverse g with self(g(w)) = w; requires c_0 = 0 and
    /// c_1 ≠ 0.
    pub fn revert(&self) -> Result<Self> {
        if !self.coeff(0).is_zero() || self.coeff(1).is_zero() {
            return Err(Error::InvalidArgument(
                "reversion needs c_0 = 0 and c_1 != 0".into(),
            ));
        }
        let n = self.truncation();
        // Build g one order at a time: the z^k coefficient of self(g) is
        // c_1·g_k plus terms in g_1..g_{k-1}.
        let mut g = Self::zero(n);
        let c1 = self.coeff(1);
        for k in 1..=n {
            let current = self.compose(&g)?;
            let target = if k == 1 { BigRational::one() } else { BigRational::zero() };
            g.coefficients[k] = (target - current.coeff(k)) / &c1;
        }
        Ok(g)
    }

    /// Series in the rescaled variable w = z/c, i.e. coefficient k becomes
    /// c^k·c_k.
    pub fn rescale_variable(&self, c: &BigRational) -> Self {
        let mut factor = BigRational::one();
        let mut out = Vec::with_capacity(self.coefficients.len());
        for x in &self.coefficients {
            out.push(x * &factor);
            factor *= c;
        }
        Self::new(out)
    }
}

impl fmt::Display for FormalSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})*z")?,
                _ => write!(f, "({c})*z^{k}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(z^{})", self.truncation() + 1)
    }
}

/// Cluster integrals b̄_1 ..= b̄_L with b̄_1 = 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClusterIntegralVector {
    values: Vec<BigRational>,
}

impl ClusterIntegralVector {
    pub fn new(values: Vec<BigRational>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least b1 and b2, got {} values",
                values.len()
            )));
        }
        if !values[0].is_one() {
            return Err(Error::Normalization(values[0].clone()));
        }
        Ok(Self { values })
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }
}

/// Virial coefficients B_1 ..= B_L.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VirialVector {
    values: Vec<BigRational>,
}

impl VirialVector {
    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    /// B_l for l ≥ 1.
    pub fn get(&self, l: usize) -> Option<&BigRational> {
        l.checked_sub(1).and_then(|i| self.values.get(i))
    }
}

/// βp = Σ b̄_l z^l.
pub fn pressure_series(b: &ClusterIntegralVector) -> FormalSeries {
    let mut c = vec![BigRational::zero()];
    c.extend(b.values.iter().cloned());
    FormalSeries::new(c)
}

/// ρ = Σ l·b̄_l z^l.
pub fn density_series(b: &ClusterIntegralVector) -> FormalSeries {
    let mut c = vec![BigRational::zero()];
    c.extend(
        b.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * BigRational::from_integer((i + 1).into())),
    );
    FormalSeries::new(c)
}

/// Solve pressure = Σ_k B_k·density^k for B_1 ..= B_L, where L is the
/// common truncation. Both series must vanish at z = 0 and the density
/// must have a nonzero linear term.
pub fn virial_from_series(pressure: &FormalSeries, density: &FormalSeries) -> Result<VirialVector> {
    let n = pressure.truncation().min(density.truncation());
    if !pressure.coeff(0).is_zero() || !density.coeff(0).is_zero() {
        return Err(Error::InvalidArgument("series must vanish at z = 0".into()));
    }
    let lead = density.coeff(1);
    if lead.is_zero() {
        return Err(Error::InvalidArgument("density series needs a linear term".into()));
    }
    let powers = density.truncate(n).powers(n);
    let mut b: Vec<BigRational> = Vec::with_capacity(n);
    for m in 1..=n {
        // [z^m] of density^k vanishes for k > m; density^m contributes lead^m.
        let mut rhs = pressure.coeff(m);
        for (k, bk) in b.iter().enumerate() {
            rhs -= bk * powers[k + 1].coeff(m);
        }
        b.push(rhs / powers[m].coeff(m));
    }
    Ok(VirialVector { values: b })
}

/// B_1 ..= B_L from b̄_1 ..= b̄_L.
pub fn virial_from_clusters(b: &ClusterIntegralVector) -> Result<VirialVector> {
    virial_from_series(&pressure_series(b), &density_series(b))
}
