//! Exact rational arithmetic for the univariate TV identity
//! `q² Σ_{j=0}^{d−2} α_j² y^{2j} = (d−1) − d y² + y^{2d}`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Univariate polynomial with exact rational coefficients, ascending degree.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPoly(Vec<BigRational>);

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RationalPoly {
    pub fn new(coeffs: Vec<BigRational>) -> Self {
        RationalPoly(coeffs).trimmed()
    }

    pub fn zero() -> Self {
        RationalPoly(Vec::new())
    }

    /// `c·y^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut v = vec![BigRational::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.0
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Self::new(
            (0..n)
                .map(|k| self.0.get(k).unwrap_or(&zero) + other.0.get(k).unwrap_or(&zero))
                .collect(),
        )
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.0.is_empty() || other.0.is_empty() {
            return Self::zero();
        }
        let mut v = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                v[i + j] += a * b;
            }
        }
        Self::new(v)
    }
}

/// Both sides of the identity for `d ≥ 2`, as exact polynomials in `y`.
pub fn tv_identity_sides(d: usize) -> Result<(RationalPoly, RationalPoly)> {
    if d < 2 {
        return Err(Error::InvalidParameter(format!("the identity needs d ≥ 2, got {d}")));
    }
    let dm1 = (d - 1) as i64;
    // q² = (d−1)(y² − 1)²; the square root of d−1 never appears.
    let y2_minus_1 = RationalPoly::new(vec![int(-1), int(0), int(1)]);
    let q2 = y2_minus_1.mul(&y2_minus_1).mul(&RationalPoly::new(vec![int(dm1)]));
    let mut sum = RationalPoly::zero();
    for j in 0..=d - 2 {
        let alpha2 = BigRational::new(BigInt::from(dm1 - j as i64), BigInt::from(dm1));
        sum = sum.add(&RationalPoly::monomial(alpha2, 2 * j));
    }
    let lhs = q2.mul(&sum);
    let rhs = RationalPoly::new(vec![int(dm1)])
        .add(&RationalPoly::monomial(int(-(d as i64)), 2))
        .add(&RationalPoly::monomial(BigRational::one(), 2 * d));
    Ok((lhs, rhs))
}

/// Exact check of the identity in rational arithmetic.
pub fn verify_tv_identity(d: usize) -> Result<bool> {
    let (lhs, rhs) = tv_identity_sides(d)?;
    Ok(lhs == rhs)
}
