//! Sparse Laurent polynomials in `q^(1/2)` with arbitrary-precision integer
//! coefficients.
//!
//! A term with exponent `e` stands for `c * q^(e/2)`; the map never holds a
//! zero coefficient, so structural equality is polynomial equality.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LaurentError {
    #[error("exponent overflow")]
    Overflow,
    #[error("division is not exact")]
    NotDivisible,
    #[error("division by zero")]
    DivisionByZero,
    #[error("cannot parse Laurent polynomial at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
}

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct Laurent {
    terms: BTreeMap<i32, BigInt>,
}

impl Laurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c * q^(half_exp/2)`.
    pub fn monomial(c: impl Into<BigInt>, half_exp: i32) -> Self {
        let c = c.into();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(half_exp, c);
        }
        Self { terms }
    }

    /// Builds from `(coefficient, half_exponent)` pairs, merging duplicates.
    pub fn from_terms<I, C>(terms: I) -> Self
    where
        I: IntoIterator<Item = (C, i32)>,
        C: Into<BigInt>,
    {
        let mut p = Self::zero();
        for (c, e) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms.get(&0).is_some_and(|c| c.is_one())
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i32, &BigInt)> {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn coeff(&self, half_exp: i32) -> BigInt {
        self.terms.get(&half_exp).cloned().unwrap_or_default()
    }

    pub fn min_exp(&self) -> Option<i32> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i32> {
        self.terms.keys().next_back().copied()
    }

    /// `Some((c, e))` when the polynomial is a single term.
    pub fn as_monomial(&self) -> Option<(&BigInt, i32)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (c, *e))
        } else {
            None
        }
    }

    fn add_term(&mut self, e: i32, c: BigInt) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn checked_add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, c.clone());
        }
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self, LaurentError> {
        let mut out = Self::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e = e1.checked_add(*e2).ok_or(LaurentError::Overflow)?;
                out.add_term(e, c1 * c2);
            }
        }
        Ok(out)
    }

    /// Multiplies by `c * q^(half_exp/2)`.
    pub fn scale(&self, c: &BigInt, half_exp: i32) -> Result<Self, LaurentError> {
        if c.is_zero() {
            return Ok(Self::zero());
        }
        let mut terms = BTreeMap::new();
        for (e, v) in &self.terms {
            let e = e.checked_add(half_exp).ok_or(LaurentError::Overflow)?;
            terms.insert(e, v * c);
        }
        Ok(Self { terms })
    }

    /// Exact integer power; negative powers are only defined for `±q^k`.
    pub fn pow(&self, k: i32) -> Result<Self, LaurentError> {
        if k < 0 {
            let inv = self.inverse_unit()?;
            return inv.pow(-k);
        }
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut k = k as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.checked_mul(&base)?;
            }
            k >>= 1;
            if k > 0 {
                base = base.checked_mul(&base)?;
            }
        }
        Ok(acc)
    }

    /// Inverse of a unit of the ring, i.e. of `±q^(e/2)`.
    pub fn inverse_unit(&self) -> Result<Self, LaurentError> {
        match self.as_monomial() {
            Some((c, e)) if c.abs().is_one() => {
                let e = e.checked_neg().ok_or(LaurentError::Overflow)?;
                Ok(Self::monomial(c.clone(), e))
            }
            _ if self.is_zero() => Err(LaurentError::DivisionByZero),
            _ => Err(LaurentError::NotDivisible),
        }
    }

    /// The substitution `q -> q^-1`.
    pub fn substitute_q_inverse(&self) -> Self {
        Self { terms: self.terms.iter().map(|(e, c)| (-e, c.clone())).collect() }
    }

    /// Exact division; fails unless `divisor` divides `self` in the Laurent ring.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, LaurentError> {
        let (dmin, dmax) = match (divisor.min_exp(), divisor.max_exp()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(LaurentError::DivisionByZero),
        };
        let lead = divisor.terms[&dmax].clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some(rmax) = rem.max_exp() {
            let rmin = rem.min_exp().unwrap_or(rmax);
            if rmax - rmin < dmax - dmin {
                return Err(LaurentError::NotDivisible);
            }
            let rc = &rem.terms[&rmax];
            if !(rc % &lead).is_zero() {
                return Err(LaurentError::NotDivisible);
            }
            let qc = rc / &lead;
            let qe = rmax.checked_sub(dmax).ok_or(LaurentError::Overflow)?;
            let step = divisor.scale(&qc, qe)?;
            rem = &rem - &step;
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    /// True when every exponent is even, i.e. the value lies in `Z[q, q^-1]`.
    pub fn has_integral_powers(&self) -> bool {
        self.terms.keys().all(|e| e % 2 == 0)
    }
}

impl Add for &Laurent {
    type Output = Laurent;
    fn add(self, rhs: &Laurent) -> Laurent {
        self.checked_add(rhs)
    }
}

impl Sub for &Laurent {
    type Output = Laurent;
    fn sub(self, rhs: &Laurent) -> Laurent {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, -c);
        }
        out
    }
}

impl Neg for &Laurent {
    type Output = Laurent;
    fn neg(self) -> Laurent {
        Laurent { terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect() }
    }
}

impl Mul for &Laurent {
    type Output = Laurent;
    /// Panics on exponent overflow; use [`Laurent::checked_mul`] where that can occur.
    fn mul(self, rhs: &Laurent) -> Laurent {
        self.checked_mul(rhs).expect("Laurent exponent overflow")
    }
}

fn fmt_power(f: &mut fmt::Formatter<'_>, e: i32) -> fmt::Result {
    if e % 2 == 0 {
        let k = e / 2;
        if k == 1 {
            write!(f, "q")
        } else {
            write!(f, "q^{k}")
        }
    } else {
        write!(f, "q^({e}/2)")
    }
}

/// Canonical form: ascending exponents, `-q^-4+q^-3+q^-1`, `3*q^(1/2)`, `0`.
impl fmt::Display for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if neg {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            let mag = c.abs();
            if *e == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                fmt_power(f, *e)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Laurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Laurent({self})")
    }
}

struct Cursor<'a> {
    s: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<u8> {
        self.s.get(self.pos).copied()
    }
    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }
    fn err(&self, msg: &str) -> LaurentError {
        LaurentError::Parse { pos: self.pos, msg: msg.to_string() }
    }
    fn int(&mut self) -> Result<BigInt, LaurentError> {
        let start = self.pos;
        if self.peek() == Some(b'-') {
            self.pos += 1;
        }
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        let txt = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
        BigInt::from_str(txt).map_err(|_| LaurentError::Parse { pos: start, msg: "expected integer".into() })
    }
    fn small_int(&mut self) -> Result<i32, LaurentError> {
        let start = self.pos;
        let v = self.int()?;
        i32::try_from(v).map_err(|_| LaurentError::Parse { pos: start, msg: "exponent out of range".into() })
    }
}

/// Parses the canonical text form (whitespace is ignored).
impl FromStr for Laurent {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let mut cur = Cursor { s: compact.as_bytes(), pos: 0 };
        if cur.s.is_empty() {
            return Err(cur.err("empty input"));
        }
        let mut out = Laurent::zero();
        let mut first = true;
        while cur.peek().is_some() {
            let sign: i32 = if cur.eat(b'-') {
                -1
            } else if cur.eat(b'+') || first {
                1
            } else {
                return Err(cur.err("expected '+' or '-'"));
            };
            first = false;
            let mut coeff = BigInt::one();
            let mut exp = 0;
            if cur.peek().is_some_and(|b| b.is_ascii_digit()) {
                coeff = cur.int()?;
                if cur.eat(b'*') {
                    if !cur.eat(b'q') {
                        return Err(cur.err("expected 'q'"));
                    }
                    exp = parse_exponent(&mut cur)?;
                }
            } else if cur.eat(b'q') {
                exp = parse_exponent(&mut cur)?;
            } else {
                return Err(cur.err("expected coefficient or 'q'"));
            }
            out.add_term(exp, coeff * sign);
        }
        Ok(out)
    }
}

fn parse_exponent(cur: &mut Cursor<'_>) -> Result<i32, LaurentError> {
    if !cur.eat(b'^') {
        return Ok(2);
    }
    if cur.eat(b'(') {
        let num = cur.small_int()?;
        if !cur.eat(b'/') || !cur.eat(b'2') || !cur.eat(b')') {
            return Err(cur.err("expected '/2)'"));
        }
        Ok(num)
    } else {
        let k = cur.small_int()?;
        k.checked_mul(2).ok_or_else(|| cur.err("exponent out of range"))
    }
}
