use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::real::parse_rational;

/// Dense polynomial in `n` with rational coefficients, constant term first.
/// Trailing zero coefficients are always trimmed.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly({})", self)
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (j, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match j {
                0 => write!(f, "{}", c)?,
                1 => write!(f, "({})n", c)?,
                _ => write!(f, "({})n^{}", c, j)?,
            }
        }
        Ok(())
    }
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn from_int(c: i64) -> Self {
        Self::constant(BigRational::from_integer(c.into()))
    }

    /// `c·nʲ`.
    pub fn monomial(c: BigRational, j: usize) -> Self {
        let mut v = vec![BigRational::zero(); j + 1];
        v[j] = c;
        Self::from_coeffs(v)
    }

    /// The polynomial `n`.
    pub fn n() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `nʲ` (zero beyond the degree).
    pub fn coeff(&self, j: usize) -> BigRational {
        self.coeffs.get(j).cloned().unwrap_or_else(BigRational::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_int(&self, n: i64) -> BigRational {
        self.eval(&BigRational::from_integer(n.into()))
    }

    /// `P(n) mod 1`, exactly, in `[0, 1)`.
    pub fn eval_mod1(&self, n: i64) -> BigRational {
        let v = self.eval_int(n);
        let r = v.numer().mod_floor(v.denom());
        BigRational::new(r, v.denom().clone())
    }

    pub fn add(&self, other: &RationalPoly) -> RationalPoly {
        let len = self.coeffs.len().max(other.coeffs.len());
        Self::from_coeffs((0..len).map(|j| self.coeff(j) + other.coeff(j)).collect())
    }

    pub fn sub(&self, other: &RationalPoly) -> RationalPoly {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> RationalPoly {
        Self::from_coeffs(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn mul(&self, other: &RationalPoly) -> RationalPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::from_coeffs(out)
    }

    pub fn pow(&self, e: u32) -> RationalPoly {
        let mut acc = Self::from_int(1);
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// `self(inner(n))`.
    pub fn compose(&self, inner: &RationalPoly) -> RationalPoly {
        self.coeffs
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| {
                acc.mul(inner).add(&Self::constant(c.clone()))
            })
    }

    /// `Σ_{l=0}^{n−1} self(l)`, via Faulhaber polynomials.
    pub fn sum_below(&self) -> RationalPoly {
        let sums = faulhaber_table(self.coeffs.len());
        self.coeffs
            .iter()
            .zip(&sums)
            .fold(Self::zero(), |acc, (c, s)| acc.add(&s.scale(c)))
    }

    /// JSON array of `"p/q"` strings, constant term first.
    pub fn to_json(&self) -> String {
        let v: Vec<String> = self
            .coeffs
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect();
        serde_json::to_string(&v).expect("strings serialize")
    }

    pub fn from_json(text: &str) -> Result<RationalPoly> {
        let v: Vec<String> =
            serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.to_string()))?;
        if v.len() > MAX_JSON_TERMS {
            return Err(Error::invalid("polynomial has too many coefficients"));
        }
        Ok(Self::from_coeffs(
            v.iter()
                .map(|s| parse_rational(s))
                .collect::<Result<_>>()?,
        ))
    }
}

const MAX_JSON_TERMS: usize = 4096;

/// `Σ_{l=0}^{n−1} lʲ` as a polynomial in `n` of degree `j + 1`, with `0⁰ = 1`.
pub fn faulhaber(j: usize) -> RationalPoly {
    faulhaber_table(j + 1).pop().expect("table has j + 1 entries")
}

/// `S_0, …, S_{count−1}` from `n^{j+1} = Σ_{i≤j} C(j+1, i) S_i(n)`.
fn faulhaber_table(count: usize) -> Vec<RationalPoly> {
    let mut sums: Vec<RationalPoly> = Vec::with_capacity(count);
    for j in 0..count {
        let mut acc = RationalPoly::monomial(BigRational::one(), j + 1);
        let mut binom = BigInt::one(); // C(j+1, i)
        for (i, s) in sums.iter().enumerate() {
            acc = acc.sub(&s.scale(&BigRational::from_integer(binom.clone())));
            binom = binom * BigInt::from(j + 1 - i) / BigInt::from(i + 1);
        }
        sums.push(acc.scale(&BigRational::new(BigInt::one(), BigInt::from(j + 1))));
    }
    sums
}
