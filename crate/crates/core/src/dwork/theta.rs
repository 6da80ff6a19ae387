//! Coefficients `b_i` of `θ(t) = exp(π(t - t^p)) = Σ b_i t^i`.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::One;

use crate::error::{Error, Result};
use crate::hypergeom::factorial;
use crate::padic::{check_odd_prime, PiAdic, Valuation};

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaTable {
    p: u32,
    b: Vec<PiAdic>,
}

/// `i(p-1)/p²`, the classical lower bound for `ord b_i`.
pub fn linear_bound(p: u32, i: u64) -> Rational64 {
    let p = p as i64;
    Rational64::new(i as i64 * (p - 1), p * p)
}

impl ThetaTable {
    /// `b_0..b_max` from `b_i = Σ_{j+pk=i} (-1)^k π^{j+k} / (j! k!)`.
    pub fn new(p: u32, max_index: usize) -> Result<Self> {
        check_odd_prime(p)?;
        let b = (0..=max_index)
            .map(|i| {
                let mut acc = PiAdic::zero(p);
                for k in 0..=i / p as usize {
                    let j = i - p as usize * k;
                    let sign = if k % 2 == 1 {
                        -BigInt::one()
                    } else {
                        BigInt::one()
                    };
                    let q = BigRational::new(sign, factorial(j as u64) * factorial(k as u64));
                    acc = &acc + &PiAdic::pi_power_unchecked(p, (j + k) as i64).scale(&q);
                }
                acc
            })
            .collect();
        Ok(Self { p, b })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn max_index(&self) -> usize {
        self.b.len() - 1
    }

    pub fn get(&self, i: usize) -> &PiAdic {
        &self.b[i]
    }

    pub fn coeffs(&self) -> &[PiAdic] {
        &self.b
    }

    /// Fails unless the table reaches index `i`.
    pub fn require(&self, i: usize) -> Result<()> {
        if i > self.max_index() {
            return Err(Error::Incompatible(format!(
                "theta table stops at index {}, need {i}",
                self.max_index()
            )));
        }
        Ok(())
    }

    pub fn valuation(&self, i: usize) -> Valuation {
        self.b[i].valuation()
    }

    /// `ord b_i` in units of `ord π`.
    pub fn pi_order(&self, i: usize) -> i64 {
        self.b[i].pi_order().expect("b_i is nonzero")
    }

    /// `ord b_i - i(p-1)/p²` for every stored `i`.
    pub fn bound_margins(&self) -> Vec<Rational64> {
        (0..self.b.len())
            .map(|i| {
                self.valuation(i).finite().expect("b_i is nonzero") - linear_bound(self.p, i as u64)
            })
            .collect()
    }

    /// One `b_i` per line in the `PiAdic` text format, after a header.
    pub fn to_text(&self) -> String {
        let mut out = format!("theta p={} max={}\n", self.p, self.max_index());
        for (i, b) in self.b.iter().enumerate() {
            out.push_str(&format!("{i} : {b}\n"));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty theta table".into()))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        let (p, max) = match fields.as_slice() {
            ["theta", p, m] => (
                p.strip_prefix("p=").and_then(|v| v.parse::<u32>().ok()),
                m.strip_prefix("max=").and_then(|v| v.parse::<usize>().ok()),
            ),
            _ => (None, None),
        };
        let (p, max) = match (p, max) {
            (Some(p), Some(m)) => (p, m),
            _ => return Err(Error::Parse(format!("bad theta header {header:?}"))),
        };
        let mut b = Vec::with_capacity(max + 1);
        for (expected, line) in lines.enumerate() {
            let (i, v) = line
                .split_once(" : ")
                .ok_or_else(|| Error::Parse(format!("bad theta line {line:?}")))?;
            if i.trim().parse::<usize>().ok() != Some(expected) {
                return Err(Error::Parse(format!(
                    "theta index out of order in {line:?}"
                )));
            }
            b.push(PiAdic::parse(p, v)?);
        }
        if b.len() != max + 1 {
            return Err(Error::Parse(format!(
                "theta table has {} entries, header says {}",
                b.len(),
                max + 1
            )));
        }
        Ok(Self { p, b })
    }
}

/// `b_0..b_max` from the recurrence `(i+1) b_{i+1} = π (b_i - p b_{i-p+1})`,
/// which follows from `θ' = π(1 - p t^{p-1}) θ`.
pub fn theta_by_recurrence(p: u32, max_index: usize) -> Result<Vec<PiAdic>> {
    check_odd_prime(p)?;
    let pi = PiAdic::pi_power_unchecked(p, 1);
    let mut b = vec![PiAdic::one(p)];
    for i in 0..max_index {
        let mut inner = b[i].clone();
        if i + 1 >= p as usize {
            inner = &inner - &b[i + 1 - p as usize].scale(&BigRational::from_integer(p.into()));
        }
        let next = (&pi * &inner).scale(&BigRational::new(BigInt::one(), BigInt::from(i + 1)));
        b.push(next);
    }
    Ok(b)
}

/// Lower bounds `G(m)` for the valuation of any coefficient of `B_μ` with
/// `μ_0 = m`.
///
/// Such a coefficient is a single product `Π b_{ν_i}` with `Σ ν_i = m`, so
/// `G` is the min-plus convolution closure of the exact valuations `ord b_i`
/// for `i` within the table and of `i(p-1)/p²` beyond it.
#[derive(Clone, Debug)]
pub struct ChainBound {
    p: u32,
    table: Vec<Rational64>,
}

impl ChainBound {
    pub fn new(theta: &ThetaTable) -> Self {
        let p = theta.p();
        let w: Vec<Rational64> = (0..=theta.max_index())
            .map(|i| theta.valuation(i).finite().expect("b_i is nonzero"))
            .collect();
        let mut table = vec![Rational64::from_integer(0)];
        for m in 1..w.len() {
            let best = (1..=m).map(|i| w[i] + table[m - i]).min().unwrap();
            table.push(best);
        }
        Self { p, table }
    }

    pub fn get(&self, m: u64) -> Rational64 {
        // beyond the table only the linear bound is available, and it is
        // additive, so it bounds every composition of m
        self.table
            .get(m as usize)
            .copied()
            .unwrap_or_else(|| linear_bound(self.p, m))
    }

    pub fn table_len(&self) -> usize {
        self.table.len()
    }
}
