//! Exact real inputs: finite sums `q₀ + Σ qᵣ·√r` with rational `qᵣ` and
//! squarefree radicands `r`.
//!
//! Every parameter the tools accept (rotation numbers, β, α, coefficients) is
//! parsed into a [`Real`] once. Rational values feed the exact backends; the
//! high-precision backends ask for a dyadic enclosure at whatever precision
//! they run at, so the same input string always denotes the same number.
//!
//! Accepted syntax: decimals (`0.25`, `1e-3`), fractions (`3/8`), integer
//! powers (`2^-20`), `sqrt(n)` or `sqrt(p/q)`, the constant `phi`, parentheses,
//! `+ - * /` where the divisor must be rational.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest radicand accepted under `sqrt(..)`; keeps squarefree reduction cheap.
const MAX_RADICAND: u64 = 1 << 40;
/// Largest absolute exponent accepted in `x^e` and decimal `e` notation.
const MAX_EXPONENT: i64 = 4096;
/// Nesting limit for parentheses.
const MAX_DEPTH: usize = 64;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Real {
    // radicand (squarefree, 1 = rational part) -> coefficient, zero entries removed
    terms: BTreeMap<u64, BigRational>,
}

impl Real {
    pub fn zero() -> Self {
        Real {
            terms: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Real::from_rational(BigRational::one())
    }

    pub fn from_rational(q: BigRational) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() {
            terms.insert(1, q);
        }
        Real { terms }
    }

    pub fn from_int(n: i64) -> Self {
        Real::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// `√n` for any nonnegative rational `n`.
    pub fn sqrt_of(n: &BigRational) -> Result<Self> {
        if n.is_negative() {
            return Err(Error::invalid("square root of a negative number"));
        }
        if n.is_zero() {
            return Ok(Real::zero());
        }
        // √(p/q) = √(pq)/q
        let pq = n.numer() * n.denom();
        let pq = pq
            .to_u64()
            .filter(|&v| v <= MAX_RADICAND)
            .ok_or_else(|| Error::invalid("radicand too large"))?;
        let (outside, radicand) = squarefree_split(pq);
        let coeff = BigRational::new(BigInt::from(outside), n.denom().clone());
        let mut terms = BTreeMap::new();
        terms.insert(radicand, coeff);
        Ok(Real { terms })
    }

    /// The golden ratio `(1 + √5)/2`.
    pub fn golden_ratio() -> Self {
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let mut terms = BTreeMap::new();
        terms.insert(1, half.clone());
        terms.insert(5, half);
        Real { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(BigRational::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }

    pub fn is_rational(&self) -> bool {
        self.as_rational().is_some()
    }

    /// Floor and ceiling of `self · 2^bits`.
    pub fn enclose_fixed(&self, bits: u32) -> (BigInt, BigInt) {
        let mut lo = BigInt::zero();
        let mut hi = BigInt::zero();
        for (&r, q) in &self.terms {
            let (n, d) = (q.numer(), q.denom());
            if r == 1 {
                let scaled = n << bits as usize;
                lo += scaled.div_floor(d);
                hi += ceil_div(&scaled, d);
            } else {
                let root = BigUint::from(r) << (2 * bits as usize);
                let s = BigInt::from_biguint(Sign::Plus, root.sqrt());
                let exact = &s * &s == BigInt::from(r) << (2 * bits as usize);
                let s_hi = if exact { s.clone() } else { &s + 1 };
                let (a, b) = if n.is_negative() {
                    (n * &s_hi, n * &s)
                } else {
                    (n * &s, n * &s_hi)
                };
                lo += a.div_floor(d);
                hi += ceil_div(&b, d);
            }
        }
        (lo, hi)
    }

    /// Nearest-ish `f64` (error well below one ulp for moderate magnitudes).
    pub fn to_f64(&self) -> f64 {
        if let Some(q) = self.as_rational() {
            return rational_to_f64(&q);
        }
        let (lo, hi) = self.enclose_fixed(96);
        let mid: BigInt = (lo + hi) >> 1usize;
        rational_to_f64(&BigRational::new(mid, BigInt::one() << 96usize))
    }

    /// Sign of the value: -1, 0 or 1. Terminates because distinct squarefree
    /// roots are linearly independent over ℚ, so a nonzero value is nonzero
    /// numerically.
    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            return 0;
        }
        let mut bits = 64;
        loop {
            let (lo, hi) = self.enclose_fixed(bits);
            if lo.is_positive() {
                return 1;
            }
            if hi.is_negative() {
                return -1;
            }
            bits *= 2;
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, &BigRational)> {
        self.terms.iter().map(|(&r, q)| (r, q))
    }

    fn insert_term(&mut self, radicand: u64, q: BigRational) {
        let entry = self
            .terms
            .entry(radicand)
            .or_insert_with(BigRational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&radicand);
        }
    }

    pub fn add(&self, other: &Real) -> Real {
        let mut out = self.clone();
        for (&r, q) in &other.terms {
            out.insert_term(r, q.clone());
        }
        out
    }

    pub fn neg(&self) -> Real {
        Real {
            terms: self.terms.iter().map(|(&r, q)| (r, -q)).collect(),
        }
    }

    pub fn sub(&self, other: &Real) -> Real {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Real) -> Result<Real> {
        let mut out = Real::zero();
        for (&r, p) in &self.terms {
            for (&s, q) in &other.terms {
                let g = r.gcd(&s);
                let radicand = (r / g)
                    .checked_mul(s / g)
                    .filter(|&v| v <= MAX_RADICAND)
                    .ok_or_else(|| Error::invalid("radicand too large"))?;
                let coeff = p * q * BigRational::from_integer(BigInt::from(g));
                out.insert_term(radicand, coeff);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, q: &BigRational) -> Real {
        if q.is_zero() {
            return Real::zero();
        }
        Real {
            terms: self.terms.iter().map(|(&r, c)| (r, c * q)).collect(),
        }
    }
}

impl Default for Real {
    fn default() -> Self {
        Real::zero()
    }
}

impl From<BigRational> for Real {
    fn from(q: BigRational) -> Self {
        Real::from_rational(q)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&r, q)) in self.terms.iter().enumerate() {
            let q = if i == 0 {
                q.clone()
            } else if q.is_negative() {
                write!(f, "-")?;
                -q
            } else {
                write!(f, "+")?;
                q.clone()
            };
            if r == 1 {
                write!(f, "{}", q)?;
            } else {
                write!(f, "{}*sqrt({})", q, r)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({})", self)
    }
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut p = Parser {
            src: s.as_bytes(),
            pos: 0,
            depth: 0,
        };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("trailing characters"));
        }
        Ok(v)
    }
}

/// Parse a string that must denote a rational number.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let r: Real = s.parse()?;
    r.as_rational()
        .ok_or_else(|| Error::NotExact(format!("'{}' is irrational", s.trim())))
}

/// Round a rational to an `f64` (correct to within one ulp).
pub fn rational_to_f64(q: &BigRational) -> f64 {
    if q.is_zero() {
        return 0.0;
    }
    let n = q.numer().abs();
    let d = q.denom();
    // scale so the integer quotient carries at least 64 significant bits
    let shift = 64 + d.bits() as i64 - n.bits() as i64;
    let quotient = if shift >= 0 {
        (n << shift as usize) / d
    } else {
        n / (d << (-shift) as usize)
    };
    let v = ldexp(quotient.to_f64().unwrap_or(f64::INFINITY), -shift);
    if q.is_negative() {
        -v
    } else {
        v
    }
}

/// `x · 2^e` without intermediate overflow of the power.
pub(crate) fn ldexp(mut x: f64, mut e: i64) -> f64 {
    while e > 1000 {
        x *= 2f64.powi(1000);
        e -= 1000;
    }
    while e < -1000 {
        x *= 2f64.powi(-1000);
        e += 1000;
    }
    x * 2f64.powi(e as i32)
}

/// `n = outside² · radicand` with radicand squarefree.
fn squarefree_split(mut n: u64) -> (u64, u64) {
    let mut outside = 1u64;
    let mut radicand = 1u64;
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n % p == 0 {
            n /= p;
            e += 1;
        }
        outside *= p.pow(e / 2);
        if e % 2 == 1 {
            radicand *= p;
        }
        p += 1;
    }
    radicand *= n;
    (outside, radicand)
}

fn ceil_div(a: &BigInt, b: &BigInt) -> BigInt {
    -((-a).div_floor(b))
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    depth: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::invalid(format!(
            "bad number '{}': {} at offset {}",
            String::from_utf8_lossy(self.src),
            msg,
            self.pos
        ))
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Real> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("nesting too deep"));
        }
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            if self.eat(b'+') {
                acc = acc.add(&self.term()?);
            } else if self.eat(b'-') {
                acc = acc.sub(&self.term()?);
            } else {
                break;
            }
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<Real> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.factor()?;
                acc = acc.mul(&rhs)?;
            } else if self.eat(b'/') {
                let rhs = self.factor()?;
                let q = rhs
                    .as_rational()
                    .ok_or_else(|| self.err("divisor must be rational"))?;
                if q.is_zero() {
                    return Err(self.err("division by zero"));
                }
                acc = acc.scale(&q.recip());
            } else {
                break;
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Real> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let neg = if self.eat(b'-') {
                true
            } else {
                self.eat(b'+');
                false
            };
            let e = self.integer()?;
            if e > MAX_EXPONENT {
                return Err(self.err("exponent too large"));
            }
            let q = base
                .as_rational()
                .ok_or_else(|| self.err("only rational bases may be raised to a power"))?;
            if q.is_zero() && neg {
                return Err(self.err("zero to a negative power"));
            }
            let p = num_traits::pow(q, e as usize);
            return Ok(Real::from_rational(if neg { p.recip() } else { p }));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Real> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.err("expected ')'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.decimal(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphabetic() {
                    self.pos += 1;
                }
                match &self.src[start..self.pos] {
                    b"phi" => Ok(Real::golden_ratio()),
                    b"sqrt" => {
                        if !self.eat(b'(') {
                            return Err(self.err("expected '(' after sqrt"));
                        }
                        let inner = self.expr()?;
                        if !self.eat(b')') {
                            return Err(self.err("expected ')'"));
                        }
                        let q = inner
                            .as_rational()
                            .ok_or_else(|| self.err("sqrt argument must be rational"))?;
                        Real::sqrt_of(&q).map_err(|e| self.err(&e.to_string()))
                    }
                    _ => Err(self.err("unknown identifier")),
                }
            }
            _ => Err(self.err("expected a number")),
        }
    }

    fn integer(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<i64>().ok())
            .ok_or_else(|| self.err("integer out of range"))
    }

    fn decimal(&mut self) -> Result<Real> {
        self.skip_ws();
        let start = self.pos;
        let mut int_digits = String::new();
        let mut frac_digits = String::new();
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            int_digits.push(self.src[self.pos] as char);
            self.pos += 1;
        }
        if self.pos < self.src.len() && self.src[self.pos] == b'.' {
            self.pos += 1;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                frac_digits.push(self.src[self.pos] as char);
                self.pos += 1;
            }
        }
        if int_digits.is_empty() && frac_digits.is_empty() {
            self.pos = start;
            return Err(self.err("expected digits"));
        }
        let mut exp10: i64 = 0;
        if self.pos < self.src.len() && (self.src[self.pos] == b'e' || self.src[self.pos] == b'E')
        {
            self.pos += 1;
            let neg = match self.src.get(self.pos) {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            let e = self.integer()?;
            exp10 = if neg { -e } else { e };
        }
        exp10 -= frac_digits.len() as i64;
        if exp10.abs() > MAX_EXPONENT {
            return Err(self.err("exponent too large"));
        }
        let digits = format!("{}{}", int_digits, frac_digits);
        let mantissa: BigInt = digits.parse().map_err(|_| self.err("bad digits"))?;
        let ten = BigInt::from(10);
        let q = if exp10 >= 0 {
            BigRational::from_integer(mantissa * num_traits::pow(ten, exp10 as usize))
        } else {
            BigRational::new(mantissa, num_traits::pow(ten, (-exp10) as usize))
        };
        Ok(Real::from_rational(q))
    }
}
