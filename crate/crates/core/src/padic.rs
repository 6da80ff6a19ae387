//! Exact arithmetic in `Q(π)` with `π^(p-1) = -p`.
//!
//! An element is stored as `Σ_{m=0}^{p-2} q_m π^m` with exact rational
//! `q_m`. Because the exponents `m/(p-1)` have distinct fractional parts,
//! the valuation is exactly `min_m ord_p(q_m) + m/(p-1)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// A p-adic valuation, normalized so that `v(p) = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(Rational64),
    Infinite,
}

impl Valuation {
    pub fn int(v: i64) -> Self {
        Valuation::Finite(Rational64::from_integer(v))
    }

    pub fn ratio(num: i64, den: i64) -> Self {
        Valuation::Finite(Rational64::new(num, den))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Valuation::Infinite)
    }

    pub fn finite(&self) -> Option<Rational64> {
        match self {
            Valuation::Finite(r) => Some(*r),
            Valuation::Infinite => None,
        }
    }

    /// Sum of valuations (valuation of a product).
    pub fn plus(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }

    pub fn plus_rational(self, r: Rational64) -> Valuation {
        self.plus(Valuation::Finite(r))
    }

    /// `self - other`, with `∞ - finite = ∞`. Panics on `finite - ∞`.
    pub fn minus(self, other: Valuation) -> Valuation {
        match (self, other) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a - b),
            (Valuation::Infinite, Valuation::Finite(_)) => Valuation::Infinite,
            _ => panic!("cannot subtract an infinite valuation"),
        }
    }

    /// Valuation in units of `ord π = 1/(p-1)`.
    pub fn in_pi_units(&self, p: u32) -> Option<Rational64> {
        self.finite()
            .map(|v| v * Rational64::from_integer(p as i64 - 1))
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(r) => write!(f, "{r}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

impl From<Rational64> for Valuation {
    fn from(r: Rational64) -> Self {
        Valuation::Finite(r)
    }
}

/// `Ok` iff `p` is an odd prime.
pub fn check_odd_prime(p: u32) -> Result<()> {
    if p < 3 || p.is_multiple_of(2) || !is_prime(p) {
        return Err(Error::UnsupportedPrime(p));
    }
    Ok(())
}

pub fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// `ord_p` of a nonzero integer; `None` for zero.
pub fn ord_p_int(n: &BigInt, p: u32) -> Option<i64> {
    if n.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let mut n = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = n.div_rem(&pb);
        if !r.is_zero() {
            return Some(k);
        }
        n = q;
        k += 1;
    }
}

/// `ord_p` of a nonzero rational; `None` for zero.
pub fn ord_p(q: &BigRational, p: u32) -> Option<i64> {
    let num = ord_p_int(q.numer(), p)?;
    Some(num - ord_p_int(q.denom(), p).expect("nonzero denominator"))
}

/// Valuation of an exact rational.
pub fn rational_valuation(q: &BigRational, p: u32) -> Valuation {
    match ord_p(q, p) {
        Some(k) => Valuation::int(k),
        None => Valuation::Infinite,
    }
}

fn pow_big(p: u32, e: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// Balanced representative of `q` modulo `p^e Z_(p)`; `q` must be nonzero.
fn reduce_rational(q: &BigRational, p: u32, e: i64) -> BigRational {
    let k = ord_p(q, p).expect("nonzero coefficient");
    if k >= e {
        return BigRational::zero();
    }
    let shift = |k: i64| -> BigRational {
        if k >= 0 {
            BigRational::from_integer(pow_big(p, k as u32))
        } else {
            BigRational::new(BigInt::one(), pow_big(p, (-k) as u32))
        }
    };
    let unit = q / shift(k);
    let modulus = pow_big(p, (e - k) as u32);
    let inv = unit
        .denom()
        .modinv(&modulus)
        .expect("unit denominator is invertible");
    let mut r = (unit.numer() * inv).mod_floor(&modulus);
    if &r * 2 > modulus {
        r -= &modulus;
    }
    BigRational::from_integer(r) * shift(k)
}

/// Element of `Q(π)`, `π^(p-1) = -p`, optionally known only modulo
/// valuation `≥ cap`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PiAdic {
    p: u32,
    coeffs: Vec<BigRational>,
    cap: Option<Rational64>,
}

impl PiAdic {
    /// Zero; `p` is trusted to be an odd prime.
    pub fn zero(p: u32) -> Self {
        debug_assert!(p >= 3);
        Self {
            p,
            coeffs: vec![BigRational::zero(); p as usize - 1],
            cap: None,
        }
    }

    pub fn one(p: u32) -> Self {
        Self::from_int(p, 1)
    }

    pub fn from_int(p: u32, n: i64) -> Self {
        Self::from_rational(p, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_bigint(p: u32, n: BigInt) -> Self {
        Self::from_rational(p, BigRational::from_integer(n))
    }

    pub fn from_rational(p: u32, q: BigRational) -> Self {
        let mut x = Self::zero(p);
        x.coeffs[0] = q;
        x
    }

    /// Builds `Σ q_m π^m` from coefficients given for `m = 0..p-2`.
    pub fn from_coeffs(p: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        check_odd_prime(p)?;
        if coeffs.len() != p as usize - 1 {
            return Err(Error::Incompatible(format!(
                "expected {} coefficients, got {}",
                p - 1,
                coeffs.len()
            )));
        }
        Ok(Self {
            p,
            coeffs,
            cap: None,
        })
    }

    /// Normal form of `π^e`; rejects `p` that is not an odd prime.
    pub fn pi_power(p: u32, e: i64) -> Result<Self> {
        check_odd_prime(p)?;
        Ok(Self::pi_power_unchecked(p, e))
    }

    pub(crate) fn pi_power_unchecked(p: u32, e: i64) -> Self {
        let d = p as i64 - 1;
        let (q, r) = (e.div_euclid(d), e.rem_euclid(d));
        let base = BigRational::from_integer(-BigInt::from(p));
        let scalar = if q >= 0 {
            num_traits::pow(base, q as usize)
        } else {
            num_traits::pow(base, (-q) as usize).recip()
        };
        let mut x = Self::zero(p);
        x.coeffs[r as usize] = scalar;
        x
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn cap(&self) -> Option<Rational64> {
        self.cap
    }

    pub fn with_cap(mut self, cap: Rational64) -> Self {
        self.cap = Some(self.cap.map_or(cap, |c| c.min(cap)));
        self
    }

    pub fn without_cap(mut self) -> Self {
        self.cap = None;
        self
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|q| q.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|q| q.is_zero())
    }

    /// The rational value, if the element lies in `Q`.
    pub fn as_rational(&self) -> Option<&BigRational> {
        self.coeffs[1..]
            .iter()
            .all(|q| q.is_zero())
            .then(|| &self.coeffs[0])
    }

    pub fn valuation(&self) -> Valuation {
        let d = self.p as i64 - 1;
        self.coeffs
            .iter()
            .enumerate()
            .filter_map(|(m, q)| ord_p(q, self.p).map(|k| Rational64::new(k * d + m as i64, d)))
            .min()
            .map_or(Valuation::Infinite, Valuation::Finite)
    }

    /// Valuation in units of `ord π`, an integer for nonzero elements.
    pub fn pi_order(&self) -> Option<i64> {
        self.valuation().in_pi_units(self.p).map(|r| r.to_integer())
    }

    fn assert_same_prime(&self, other: &Self) {
        assert_eq!(self.p, other.p, "mixing elements over different primes");
    }

    fn combine_cap_add(&self, other: &Self) -> Option<Rational64> {
        match (self.cap, other.cap) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    fn combine_cap_mul(&self, other: &Self) -> Option<Rational64> {
        let term = |cap: Option<Rational64>, v: Valuation| -> Option<Rational64> {
            let c = cap?;
            v.finite().map(|v| c + v)
        };
        let a = term(self.cap, other.valuation());
        let b = term(other.cap, self.valuation());
        match (a, b) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        }
    }

    pub fn scale(&self, q: &BigRational) -> Self {
        let v = rational_valuation(q, self.p);
        Self {
            p: self.p,
            coeffs: self.coeffs.iter().map(|c| c * q).collect(),
            cap: self.cap.and_then(|c| v.finite().map(|v| c + v)),
        }
    }

    /// `self · π^e`.
    pub fn mul_pi_power(&self, e: i64) -> Self {
        self * &Self::pi_power_unchecked(self.p, e)
    }

    /// Multiplicative inverse of a nonzero element.
    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let v = self.valuation();
        if let Some(cap) = self.cap {
            if Valuation::Finite(cap) <= v {
                return Err(Error::PrecisionExhausted {
                    requested: v,
                    available: Valuation::Finite(cap),
                });
            }
        }
        let d = self.p as usize - 1;
        let y = match self.as_rational() {
            Some(q) => {
                let mut y = Self::zero(self.p);
                y.coeffs[0] = q.recip();
                y
            }
            None => {
                // columns of the multiplication-by-self matrix are self·π^j
                let cols: Vec<Self> = (0..d)
                    .map(|j| self.clone().without_cap().mul_pi_power(j as i64))
                    .collect();
                let mut rows: Vec<Vec<BigRational>> = (0..d)
                    .map(|i| {
                        let mut row: Vec<BigRational> =
                            cols.iter().map(|c| c.coeffs[i].clone()).collect();
                        row.push(if i == 0 {
                            BigRational::one()
                        } else {
                            BigRational::zero()
                        });
                        row
                    })
                    .collect();
                let sol =
                    solve_dense(&mut rows).ok_or_else(|| Error::NotInvertible(self.to_string()))?;
                Self {
                    p: self.p,
                    coeffs: sol,
                    cap: None,
                }
            }
        };
        Ok(match self.cap {
            Some(cap) => {
                let two_v = v.finite().unwrap() * Rational64::from_integer(2);
                y.with_cap(cap - two_v)
            }
            None => y,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.inverse()?)
    }

    /// Canonical representative modulo `{valuation ≥ k}`: each `q_m` is
    /// replaced by its balanced residue modulo the matching power of `p`.
    pub fn truncate(&self, k: Rational64) -> Self {
        let d = self.p as i64 - 1;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(m, q)| {
                if q.is_zero() {
                    return q.clone();
                }
                // term vanishes iff ord(q) >= k - m/(p-1)
                let threshold = (k - Rational64::new(m as i64, d)).ceil().to_integer();
                reduce_rational(q, self.p, threshold)
            })
            .collect();
        Self {
            p: self.p,
            coeffs,
            cap: Some(self.cap.map_or(k, |c| c.min(k))),
        }
    }

    /// Equality of values, ignoring precision caps.
    pub fn same_value(&self, other: &Self) -> bool {
        self.p == other.p && self.coeffs == other.coeffs
    }

    /// Parses the format produced by `Display`.
    pub fn parse(p: u32, text: &str) -> Result<Self> {
        check_odd_prime(p)?;
        let text = text.trim();
        let (body, cap) = match text.find(" (mod ord ≥ ") {
            Some(pos) => {
                let rest = &text[pos + " (mod ord ≥ ".len()..];
                let inner = rest
                    .strip_suffix(')')
                    .ok_or_else(|| Error::Parse(format!("unterminated precision in {text:?}")))?;
                (&text[..pos], Some(parse_rational64(inner)?))
            }
            None => (text, None),
        };
        let mut x = Self::zero(p);
        if body != "0" {
            for term in body.split(" + ") {
                let (coef, m) = parse_term(term.trim())?;
                x = &x + &Self::from_rational(p, coef).mul_pi_power(m);
            }
        }
        x.cap = cap;
        Ok(x)
    }
}

fn parse_term(term: &str) -> Result<(BigRational, i64)> {
    let (coef, pi) = match term.split_once('·') {
        Some((c, rest)) => (c, Some(rest)),
        None if term.starts_with('π') => ("1", Some(term)),
        None => (term, None),
    };
    let q = parse_big_rational(coef)?;
    let m = match pi {
        None => 0,
        Some("π") => 1,
        Some(s) => s
            .strip_prefix("π^")
            .ok_or_else(|| Error::Parse(format!("bad π power in {term:?}")))?
            .parse::<i64>()
            .map_err(|e| Error::Parse(format!("bad exponent in {term:?}: {e}")))?,
    };
    Ok((q, m))
}

pub fn parse_big_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            let d: BigInt = d
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
            if d.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            s.parse()
                .map_err(|_| Error::Parse(format!("bad integer {s:?}")))?,
        )),
    }
}

pub fn parse_rational64(s: &str) -> Result<Rational64> {
    let q = parse_big_rational(s)?;
    match (q.numer().to_i64(), q.denom().to_i64()) {
        (Some(n), Some(d)) => Ok(Rational64::new(n, d)),
        _ => Err(Error::Parse(format!("rational {s:?} out of range"))),
    }
}

/// Gaussian elimination on an augmented `d × (d+1)` matrix.
fn solve_dense(rows: &mut [Vec<BigRational>]) -> Option<Vec<BigRational>> {
    let d = rows.len();
    for col in 0..d {
        let pivot = (col..d).find(|&r| !rows[r][col].is_zero())?;
        rows.swap(col, pivot);
        let inv = rows[col][col].recip();
        for x in rows[col].iter_mut() {
            *x *= &inv;
        }
        for r in 0..d {
            if r != col && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                let pivot_row = rows[col].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot_row) {
                    *x -= &f * y;
                }
            }
        }
    }
    Some(rows.iter().map(|r| r[d].clone()).collect())
}

impl fmt::Display for PiAdic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, q)| !q.is_zero())
            .map(|(m, q)| match m {
                0 => q.to_string(),
                1 => format!("{q}·π"),
                _ => format!("{q}·π^{m}"),
            })
            .collect();
        if terms.is_empty() {
            write!(f, "0")?;
        } else {
            write!(f, "{}", terms.join(" + "))?;
        }
        if let Some(cap) = self.cap {
            write!(f, " (mod ord ≥ {cap})")?;
        }
        Ok(())
    }
}

impl Add for &PiAdic {
    type Output = PiAdic;
    fn add(self, other: &PiAdic) -> PiAdic {
        self.assert_same_prime(other);
        PiAdic {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
            cap: self.combine_cap_add(other),
        }
    }
}

impl Sub for &PiAdic {
    type Output = PiAdic;
    fn sub(self, other: &PiAdic) -> PiAdic {
        self.assert_same_prime(other);
        PiAdic {
            p: self.p,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
            cap: self.combine_cap_add(other),
        }
    }
}

impl Mul for &PiAdic {
    type Output = PiAdic;
    fn mul(self, other: &PiAdic) -> PiAdic {
        self.assert_same_prime(other);
        let d = self.p as usize - 1;
        let minus_p = BigRational::from_integer(-BigInt::from(self.p));
        let mut coeffs = vec![BigRational::zero(); d];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let prod = a * b;
                if i + j < d {
                    coeffs[i + j] += prod;
                } else {
                    coeffs[i + j - d] += prod * &minus_p;
                }
            }
        }
        PiAdic {
            p: self.p,
            coeffs,
            cap: self.combine_cap_mul(other),
        }
    }
}

impl Neg for &PiAdic {
    type Output = PiAdic;
    fn neg(self) -> PiAdic {
        PiAdic {
            p: self.p,
            coeffs: self.coeffs.iter().map(|q| -q).collect(),
            cap: self.cap,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for PiAdic {
            type Output = PiAdic;
            fn $m(self, other: PiAdic) -> PiAdic {
                (&self).$m(&other)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for PiAdic {
    type Output = PiAdic;
    fn neg(self) -> PiAdic {
        -&self
    }
}

/// Compares two valuations where `None` stands for `+∞`.
pub fn cmp_optional(a: Option<Rational64>, b: Option<Rational64>) -> Ordering {
    match (a, b) {
        (Some(a), Some(b)) => a.cmp(&b),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn pi_powers() {
        assert_eq!(PiAdic::pi_power(3, 2).unwrap(), PiAdic::from_int(3, -3));
        assert!(PiAdic::pi_power(5, 0).unwrap().is_one());
        let inv = PiAdic::pi_power(3, -1).unwrap();
        assert_eq!(inv.coeffs(), &[q(0, 1), q(-1, 3)]);
        assert_eq!(inv.valuation(), Valuation::ratio(-1, 2));
        assert!(matches!(
            PiAdic::pi_power(2, 1),
            Err(Error::UnsupportedPrime(2))
        ));
        assert!(PiAdic::pi_power(9, 1).is_err());
        for p in [3u32, 5, 7, 11] {
            let pi = PiAdic::pi_power(p, 1).unwrap();
            let mut x = PiAdic::one(p);
            for _ in 0..p - 1 {
                x = &x * &pi;
            }
            assert!((&x + &PiAdic::from_int(p, p as i64)).is_zero());
            for e in -7..7 {
                assert_eq!(
                    PiAdic::pi_power(p, e).unwrap().valuation(),
                    Valuation::ratio(e, p as i64 - 1)
                );
            }
        }
    }

    #[test]
    fn multiplication_and_inverse() {
        let pi = PiAdic::pi_power(3, 1).unwrap();
        assert_eq!(&pi * &pi, PiAdic::from_int(3, -3));
        assert_eq!(PiAdic::zero(3).valuation(), Valuation::Infinite);
        let x = PiAdic::from_rational(3, q(-3, 2));
        let y = x.inverse().unwrap();
        assert_eq!(y, PiAdic::from_rational(3, q(-2, 3)));
        assert!((&x * &y).is_one());
        // 1 + π at p = 5
        let z = &PiAdic::one(5) + &PiAdic::pi_power(5, 1).unwrap();
        assert!((&z * &z.inverse().unwrap()).is_one());
        assert_eq!(PiAdic::zero(5).inverse(), Err(Error::DivisionByZero));
    }

    #[test]
    fn truncation_examples() {
        let pi2 = PiAdic::pi_power(3, 2).unwrap();
        let t = pi2.truncate(Rational64::from_integer(2));
        assert!(t.same_value(&PiAdic::from_int(3, -3)));
        assert!(PiAdic::from_int(3, 7)
            .truncate(Rational64::from_integer(0))
            .is_zero());
        assert!(PiAdic::from_int(3, 3 * 5)
            .truncate(Rational64::from_integer(1))
            .is_zero());
        // 1/2 mod 9 balanced is -4
        let h = PiAdic::from_rational(3, q(1, 2)).truncate(Rational64::from_integer(2));
        assert!(h.same_value(&PiAdic::from_int(3, -4)));
        // the π coefficient is reduced one half-step less
        let x = PiAdic::from_coeffs(3, vec![q(0, 1), q(4, 1)]).unwrap();
        assert!(x
            .truncate(Rational64::from_integer(1))
            .same_value(&PiAdic::pi_power(3, 1).unwrap()));
    }

    #[test]
    fn cap_propagation() {
        let x = PiAdic::from_int(3, 1).with_cap(Rational64::from_integer(3));
        let y = PiAdic::from_int(3, 3).with_cap(Rational64::from_integer(2));
        assert_eq!((&x + &y).cap(), Some(Rational64::from_integer(2)));
        assert_eq!((&x * &y).cap(), Some(Rational64::from_integer(2)));
        let inv = y.inverse();
        assert!(inv.is_ok());
        assert_eq!(inv.unwrap().cap(), Some(Rational64::from_integer(0)));
        let bad = PiAdic::from_int(3, 9).with_cap(Rational64::from_integer(2));
        assert!(matches!(
            bad.inverse(),
            Err(Error::PrecisionExhausted { .. })
        ));
    }

    #[test]
    fn display_parse_examples() {
        let x = PiAdic::from_coeffs(5, vec![q(1, 2), q(0, 1), q(-3, 7), q(5, 1)]).unwrap();
        assert_eq!(x.to_string(), "1/2 + -3/7·π^2 + 5·π^3");
        assert_eq!(PiAdic::parse(5, &x.to_string()).unwrap(), x);
        let c = x.clone().with_cap(Rational64::new(5, 4));
        assert_eq!(c.to_string(), "1/2 + -3/7·π^2 + 5·π^3 (mod ord ≥ 5/4)");
        assert_eq!(PiAdic::parse(5, &c.to_string()).unwrap(), c);
        assert_eq!(PiAdic::parse(3, "0").unwrap(), PiAdic::zero(3));
        assert_eq!(
            PiAdic::parse(3, "π").unwrap(),
            PiAdic::pi_power(3, 1).unwrap()
        );
        assert!(PiAdic::parse(3, "1·x").is_err());
    }

    fn arb_elem(p: u32) -> impl Strategy<Value = PiAdic> {
        proptest::collection::vec((-60i64..60, 1i64..30), p as usize - 1).prop_map(move |v| {
            PiAdic::from_coeffs(p, v.into_iter().map(|(n, d)| q(n, d)).collect()).unwrap()
        })
    }

    fn arb_pair() -> impl Strategy<Value = (PiAdic, PiAdic)> {
        prop_oneof![Just(3u32), Just(5u32), Just(7u32)]
            .prop_flat_map(|p| (arb_elem(p), arb_elem(p)))
    }

    proptest! {
        #[test]
        fn ultrametric((x, y) in arb_pair()) {
            let (vx, vy, vs) = (x.valuation(), y.valuation(), (&x + &y).valuation());
            prop_assert!(vs >= vx.min(vy));
            if vx != vy {
                prop_assert_eq!(vs, vx.min(vy));
            }
        }

        #[test]
        fn multiplicative((x, y) in arb_pair()) {
            prop_assert_eq!((&x * &y).valuation(), x.valuation().plus(y.valuation()));
        }

        #[test]
        fn inverse_roundtrip((x, _y) in arb_pair()) {
            prop_assume!(!x.is_zero());
            prop_assert!((&x * &x.inverse().unwrap()).is_one());
        }

        #[test]
        fn parse_print_roundtrip((x, _y) in arb_pair()) {
            prop_assert_eq!(PiAdic::parse(x.p(), &x.to_string()).unwrap(), x);
        }

        #[test]
        fn truncation_idempotent_and_close((x, _y) in arb_pair(), k in 0i64..8) {
            let k = Rational64::new(k, 2);
            let t = x.truncate(k);
            prop_assert_eq!(t.truncate(k), t.clone());
            prop_assert!((&x - &t).valuation() >= Valuation::Finite(k));
        }
    }
}
