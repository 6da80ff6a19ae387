//! Sparse multivariate power series in `t_1..t_N`, truncated by total degree.
//!
//! A `Series` with bound `D` is exact in every total degree `≤ D`; nothing
//! is known above `D`. Binary operations take the smaller bound.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::padic::{ord_p_int, PiAdic, Valuation};

/// Ring operations needed by `Series`; `Ring` carries whatever context is
/// needed to build constants (a modulus, a prime).
pub trait Coefficient: Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync {
    type Ring: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn zero(ring: &Self::Ring) -> Self;
    fn from_int(ring: &Self::Ring, n: &BigInt) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn negated(&self) -> Self;
    fn try_inverse(&self) -> Result<Self>;
    /// `p`-adic valuation (for residues mod `p^s`, that of the residue).
    fn valuation_at(&self, p: u32) -> Valuation;
    fn parse(ring: &Self::Ring, text: &str) -> Result<Self>;

    fn one(ring: &Self::Ring) -> Self {
        Self::from_int(ring, &<BigInt as One>::one())
    }
}

/// The ring `Z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Integers;

impl Coefficient for BigInt {
    type Ring = Integers;

    fn zero(_: &Integers) -> Self {
        <BigInt as Zero>::zero()
    }
    fn from_int(_: &Integers, n: &BigInt) -> Self {
        n.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn try_inverse(&self) -> Result<Self> {
        if One::is_one(self) || *self == -<BigInt as One>::one() {
            Ok(self.clone())
        } else {
            Err(Error::NotInvertible(self.to_string()))
        }
    }
    fn valuation_at(&self, p: u32) -> Valuation {
        ord_p_int(self, p).map_or(Valuation::Infinite, Valuation::int)
    }
    fn parse(_: &Integers, text: &str) -> Result<Self> {
        text.trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer {text:?}")))
    }
}

/// The ring `Z / p^s`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Residues {
    pub p: u32,
    pub s: u32,
}

impl Residues {
    pub fn new(p: u32, s: u32) -> Self {
        assert!(s >= 1, "modulus exponent must be positive");
        Self { p, s }
    }

    pub fn modulus(&self) -> u64 {
        (self.p as u64)
            .checked_pow(self.s)
            .expect("modulus p^s must fit in 64 bits")
    }
}

/// A residue modulo `p^s`, stored in `[0, p^s)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModInt {
    value: u64,
    modulus: u64,
}

impl ModInt {
    pub fn new(value: i128, modulus: u64) -> Self {
        Self {
            value: value.rem_euclid(modulus as i128) as u64,
            modulus,
        }
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }
}

impl fmt::Display for ModInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl Coefficient for ModInt {
    type Ring = Residues;

    fn zero(ring: &Residues) -> Self {
        ModInt::new(0, ring.modulus())
    }
    fn from_int(ring: &Residues, n: &BigInt) -> Self {
        let m = BigInt::from(ring.modulus());
        ModInt::new(n.mod_floor(&m).to_i128().expect("reduced"), ring.modulus())
    }
    fn is_zero(&self) -> bool {
        self.value == 0
    }
    fn is_one(&self) -> bool {
        self.value == 1 % self.modulus
    }
    fn plus(&self, other: &Self) -> Self {
        ModInt::new(self.value as i128 + other.value as i128, self.modulus)
    }
    fn minus(&self, other: &Self) -> Self {
        ModInt::new(self.value as i128 - other.value as i128, self.modulus)
    }
    fn times(&self, other: &Self) -> Self {
        let v = (self.value as u128 * other.value as u128) % self.modulus as u128;
        ModInt::new(v as i128, self.modulus)
    }
    fn negated(&self) -> Self {
        ModInt::new(-(self.value as i128), self.modulus)
    }
    fn try_inverse(&self) -> Result<Self> {
        let e = (self.value as i128).extended_gcd(&(self.modulus as i128));
        if e.gcd != 1 {
            return Err(Error::NotInvertible(format!(
                "{} mod {}",
                self.value, self.modulus
            )));
        }
        Ok(ModInt::new(e.x, self.modulus))
    }
    fn valuation_at(&self, p: u32) -> Valuation {
        self.value_valuation(p)
    }
    fn parse(ring: &Residues, text: &str) -> Result<Self> {
        let n: BigInt = BigInt::parse(&Integers, text)?;
        Ok(ModInt::from_int(ring, &n))
    }
}

impl ModInt {
    fn value_valuation(&self, p: u32) -> Valuation {
        if self.value == 0 {
            return Valuation::Infinite;
        }
        let mut v = self.value;
        let mut k = 0;
        while v.is_multiple_of(p as u64) {
            v /= p as u64;
            k += 1;
        }
        Valuation::int(k)
    }
}

/// Context for `PiAdic` coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PiRing {
    pub p: u32,
}

impl Coefficient for PiAdic {
    type Ring = PiRing;

    fn zero(ring: &PiRing) -> Self {
        PiAdic::zero(ring.p)
    }
    fn from_int(ring: &PiRing, n: &BigInt) -> Self {
        PiAdic::from_bigint(ring.p, n.clone())
    }
    fn is_zero(&self) -> bool {
        PiAdic::is_zero(self)
    }
    fn is_one(&self) -> bool {
        PiAdic::is_one(self)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn negated(&self) -> Self {
        -self
    }
    fn try_inverse(&self) -> Result<Self> {
        self.inverse()
    }
    fn valuation_at(&self, p: u32) -> Valuation {
        assert_eq!(p, self.p(), "valuation at a different prime");
        self.valuation()
    }
    fn parse(ring: &PiRing, text: &str) -> Result<Self> {
        PiAdic::parse(ring.p, text)
    }
}

/// Exponent vector ordered by total degree, then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    degree: u32,
    exps: Vec<u32>,
}

impl Monomial {
    pub fn new(exps: Vec<u32>) -> Self {
        Self {
            degree: exps.iter().sum(),
            exps,
        }
    }

    pub fn one(nvars: usize) -> Self {
        Self::new(vec![0; nvars])
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        Monomial {
            degree: self.degree + other.degree,
            exps: self
                .exps
                .iter()
                .zip(&other.exps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn power(&self, k: u32) -> Monomial {
        Monomial {
            degree: self.degree * k,
            exps: self.exps.iter().map(|a| a * k).collect(),
        }
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .exps
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("t{}", i + 1)
                } else {
                    format!("t{}^{e}", i + 1)
                }
            })
            .collect();
        if factors.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", factors.join("·"))
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series<C: Coefficient> {
    ring: C::Ring,
    nvars: usize,
    bound: u32,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Coefficient> Series<C> {
    pub fn zero(ring: C::Ring, nvars: usize, bound: u32) -> Self {
        Self {
            ring,
            nvars,
            bound,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: C::Ring, nvars: usize, bound: u32, c: C) -> Self {
        let mut s = Self::zero(ring, nvars, bound);
        s.add_term(Monomial::one(nvars), c);
        s
    }

    pub fn one(ring: C::Ring, nvars: usize, bound: u32) -> Self {
        let one = C::one(&ring);
        Self::constant(ring, nvars, bound, one)
    }

    /// Sums the given terms; terms above `bound` are dropped.
    pub fn from_terms<I>(ring: C::Ring, nvars: usize, bound: u32, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let mut s = Self::zero(ring, nvars, bound);
        for (e, c) in terms {
            assert_eq!(e.len(), nvars, "exponent vector has wrong length");
            s.add_term(Monomial::new(e), c);
        }
        s
    }

    /// Adds `c·m` in place, ignoring it if `m` is above the bound.
    pub fn add_term(&mut self, m: Monomial, c: C) {
        if m.degree > self.bound || c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(old) => {
                let s = old.plus(&c);
                if s.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *old = s;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn ring(&self) -> &C::Ring {
        &self.ring
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> C {
        self.terms
            .get(&Monomial::new(exps.to_vec()))
            .cloned()
            .unwrap_or_else(|| C::zero(&self.ring))
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&vec![0; self.nvars])
    }

    /// Highest degree of a stored term.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(|m| m.degree)
    }

    /// Terms of total degree exactly `k`.
    pub fn layer(&self, k: u32) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter().filter(move |(m, _)| m.degree == k)
    }

    /// Lowers the bound, discarding terms above it.
    pub fn truncated(&self, bound: u32) -> Self {
        let bound = bound.min(self.bound);
        Self {
            ring: self.ring.clone(),
            nvars: self.nvars,
            bound,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.degree <= bound)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Reinterprets an exact polynomial as known up to `bound`. Only valid
    /// when the series has no terms above its current bound, which the
    /// caller asserts.
    pub fn polynomial_with_bound(&self, bound: u32) -> Self {
        let mut s = self.truncated(bound);
        s.bound = bound;
        s
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(self.nvars, other.nvars, "series in different variables");
        assert_eq!(self.ring, other.ring, "series over different rings");
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut s = Self::zero(self.ring.clone(), self.nvars, self.bound);
        for (m, x) in &self.terms {
            s.add_term(m.clone(), x.times(c));
        }
        s
    }

    pub fn times_monomial(&self, m: &Monomial) -> Self {
        let mut s = Self::zero(self.ring.clone(), self.nvars, self.bound);
        for (n, x) in &self.terms {
            s.add_term(n.times(m), x.clone());
        }
        s
    }

    pub fn map<D: Coefficient>(&self, ring: D::Ring, f: impl Fn(&C) -> D) -> Series<D> {
        let mut s = Series::zero(ring, self.nvars, self.bound);
        for (m, x) in &self.terms {
            s.add_term(m.clone(), f(x));
        }
        s
    }

    /// `a / b` for `b` with invertible constant term, exact up to the
    /// smaller bound.
    pub fn divide_by_unit(&self, b: &Self) -> Result<Self> {
        self.check_compatible(b);
        let b0_inv = b.constant_term().try_inverse().map_err(|_| {
            Error::NotInvertible(format!("constant term {} of divisor", b.constant_term()))
        })?;
        let bound = self.bound.min(b.bound);
        let mut rem: BTreeMap<Monomial, C> = self.truncated(bound).terms;
        let mut q = Self::zero(self.ring.clone(), self.nvars, bound);
        while let Some((m, c)) = rem.pop_first() {
            if c.is_zero() {
                continue;
            }
            let qc = c.times(&b0_inv);
            for (mb, cb) in b.terms.iter().skip_while(|(mb, _)| mb.degree == 0) {
                if mb.degree + m.degree > bound {
                    break;
                }
                let key = m.times(mb);
                let delta = qc.times(cb);
                let entry = rem.entry(key).or_insert_with(|| C::zero(&self.ring));
                *entry = entry.minus(&delta);
            }
            q.add_term(m, qc);
        }
        Ok(q)
    }

    /// `t_i ↦ t_i^p`. Exact up to the same bound: unknown input terms have
    /// degree `> bound`, hence land in degree `> p·bound`.
    pub fn frobenius(&self, p: u32) -> Self {
        let mut s = Self::zero(self.ring.clone(), self.nvars, self.bound);
        for (m, x) in &self.terms {
            s.add_term(m.power(p), x.clone());
        }
        s
    }

    /// Minimum valuation of the coefficients, i.e. `-log_p` of the Gauss norm.
    pub fn gauss_valuation(&self, p: u32) -> Valuation {
        self.terms
            .values()
            .map(|c| c.valuation_at(p))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    /// Evaluates the stored terms at `t = values`.
    pub fn evaluate(&self, values: &[C]) -> C {
        assert_eq!(values.len(), self.nvars);
        let mut acc = C::zero(&self.ring);
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (v, &e) in values.iter().zip(&m.exps) {
                for _ in 0..e {
                    term = term.times(v);
                }
            }
            acc = acc.plus(&term);
        }
        acc
    }

    /// Line format: a header `series nvars=N bound=D`, then one
    /// `(e1,...,eN) : coeff` line per term in monomial order.
    pub fn to_text(&self) -> String {
        let mut out = format!("series nvars={} bound={}\n", self.nvars, self.bound);
        for (m, c) in &self.terms {
            let exps: Vec<String> = m.exps.iter().map(|e| e.to_string()).collect();
            out.push_str(&format!("({}) : {}\n", exps.join(","), c));
        }
        out
    }

    pub fn from_text(ring: C::Ring, text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty series text".into()))?;
        let mut nvars = None;
        let mut bound = None;
        let mut fields = header.split_whitespace();
        if fields.next() != Some("series") {
            return Err(Error::Parse(format!("bad series header {header:?}")));
        }
        for f in fields {
            match f.split_once('=') {
                Some(("nvars", v)) => nvars = v.parse::<usize>().ok(),
                Some(("bound", v)) => bound = v.parse::<u32>().ok(),
                _ => return Err(Error::Parse(format!("bad series header field {f:?}"))),
            }
        }
        let (nvars, bound) = match (nvars, bound) {
            (Some(n), Some(b)) => (n, b),
            _ => return Err(Error::Parse(format!("incomplete series header {header:?}"))),
        };
        let mut s = Self::zero(ring, nvars, bound);
        for line in lines {
            let (exps, coeff) = line
                .split_once(" : ")
                .ok_or_else(|| Error::Parse(format!("bad series line {line:?}")))?;
            let exps = exps
                .trim()
                .strip_prefix('(')
                .and_then(|e| e.strip_suffix(')'))
                .ok_or_else(|| Error::Parse(format!("bad exponent vector in {line:?}")))?;
            let exps: Vec<u32> = if exps.is_empty() {
                Vec::new()
            } else {
                exps.split(',')
                    .map(|e| e.trim().parse::<u32>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::Parse(format!("bad exponent in {line:?}")))?
            };
            if exps.len() != nvars {
                return Err(Error::Parse(format!(
                    "wrong number of exponents in {line:?}"
                )));
            }
            let m = Monomial::new(exps);
            if m.degree > bound {
                return Err(Error::Parse(format!("term above bound in {line:?}")));
            }
            let c = C::parse(&s.ring, coeff)?;
            s.add_term(m, c);
        }
        Ok(s)
    }
}

impl Series<BigInt> {
    pub fn integer(nvars: usize, bound: u32) -> Self {
        Self::zero(Integers, nvars, bound)
    }

    pub fn reduce_mod(&self, p: u32, s: u32) -> Series<ModInt> {
        let ring = Residues::new(p, s);
        self.map(ring, |c| ModInt::from_int(&ring, c))
    }

    pub fn to_pi_adic(&self, p: u32) -> Series<PiAdic> {
        self.map(PiRing { p }, |c| PiAdic::from_bigint(p, c.clone()))
    }
}

impl<C: Coefficient> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in &self.terms {
            let is_const = m.degree == 0;
            let neg_one = c.negated().is_one();
            let cs = c.to_string();
            let cs = if cs.contains(" + ") {
                format!("({cs})")
            } else {
                cs
            };
            let (negative, body) = if is_const {
                match cs.strip_prefix('-') {
                    Some(rest) if !first => (true, rest.to_string()),
                    _ => (false, cs),
                }
            } else if c.is_one() {
                (false, m.to_string())
            } else if neg_one {
                if first {
                    (false, format!("-{m}"))
                } else {
                    (true, m.to_string())
                }
            } else {
                match cs.strip_prefix('-') {
                    Some(rest) if !first => (true, format!("{rest}·{m}")),
                    _ => (false, format!("{cs}·{m}")),
                }
            };
            if first {
                write!(f, "{body}")?;
            } else if negative {
                write!(f, " - {body}")?;
            } else {
                write!(f, " + {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl<C: Coefficient> Add for &Series<C> {
    type Output = Series<C>;
    fn add(self, other: &Series<C>) -> Series<C> {
        self.check_compatible(other);
        let mut s = self.truncated(other.bound);
        for (m, c) in &other.terms {
            s.add_term(m.clone(), c.clone());
        }
        s
    }
}

impl<C: Coefficient> Sub for &Series<C> {
    type Output = Series<C>;
    fn sub(self, other: &Series<C>) -> Series<C> {
        self.check_compatible(other);
        let mut s = self.truncated(other.bound);
        for (m, c) in &other.terms {
            s.add_term(m.clone(), c.negated());
        }
        s
    }
}

impl<C: Coefficient> Mul for &Series<C> {
    type Output = Series<C>;
    fn mul(self, other: &Series<C>) -> Series<C> {
        self.check_compatible(other);
        let bound = self.bound.min(other.bound);
        let mut acc: BTreeMap<Monomial, C> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            if m1.degree > bound {
                break;
            }
            for (m2, c2) in &other.terms {
                if m1.degree + m2.degree > bound {
                    break;
                }
                let key = m1.times(m2);
                let prod = c1.times(c2);
                match acc.get_mut(&key) {
                    Some(x) => *x = x.plus(&prod),
                    None => {
                        acc.insert(key, prod);
                    }
                }
            }
        }
        acc.retain(|_, c| !c.is_zero());
        Series {
            ring: self.ring.clone(),
            nvars: self.nvars,
            bound,
            terms: acc,
        }
    }
}

impl<C: Coefficient> Neg for &Series<C> {
    type Output = Series<C>;
    fn neg(self) -> Series<C> {
        self.map(self.ring.clone(), |c| c.negated())
    }
}
