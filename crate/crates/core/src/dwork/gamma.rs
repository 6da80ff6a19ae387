//! One-variable identities fixing the eigenvalue: `H = pG` and the
//! evaluation `-p Σ b_{pl} (-1)^l l! π^{-l} = (-1)^{p+1} p!`.

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};

use crate::dwork::theta::{linear_bound, ThetaTable};
use crate::error::Result;
use crate::hypergeom::factorial;
use crate::padic::{check_odd_prime, PiAdic, Valuation};

/// One coefficient of `H` against `p(-1)^l l!`.
#[derive(Clone, Debug)]
pub struct HCoefficient {
    pub l: u32,
    /// The coefficient of `(πu)^{-1-l}` in `H`, summed until the remaining
    /// terms have valuation `≥ certified`.
    pub value: PiAdic,
    pub terms: usize,
    pub certified: Rational64,
    pub difference_valuation: Valuation,
}

impl HCoefficient {
    /// Valuation of `H_l - p(-1)^l l!` that is actually proven.
    pub fn margin(&self) -> Valuation {
        self.difference_valuation
            .min(Valuation::Finite(self.certified))
    }
}

fn sign(k: u64) -> BigInt {
    if k % 2 == 1 {
        BigInt::from(-1)
    } else {
        BigInt::from(1)
    }
}

/// Lower bound for the valuation of the `m`-th summand of `H_l`.
fn summand_floor(p: u32, l: u32, m: u32) -> Rational64 {
    let idx = (p * (1 + m)) as i64 - 1 - l as i64;
    let b = if idx < 0 {
        Rational64::from_integer(0)
    } else {
        linear_bound(p, idx as u64)
    };
    b + Rational64::new(l as i64 - m as i64, p as i64 - 1)
}

/// `H_l = π^{1+l} Σ_{m≥0} b_{p(1+m)-1-l} (-1)^m m! π^{-1-m}` for `l ≤ max_l`,
/// each compared with `p(-1)^l l!`.
pub fn g_identity_check(p: u32, max_l: u32, certified: Rational64) -> Result<Vec<HCoefficient>> {
    check_odd_prime(p)?;
    // summands grow in valuation with m; find how many are needed
    let last_m = |l: u32| {
        (0..)
            .find(|&m| summand_floor(p, l, m) >= certified)
            .unwrap()
    };
    let max_index = (0..=max_l)
        .map(|l| (p * (1 + last_m(l))) as usize)
        .max()
        .unwrap();
    let theta = ThetaTable::new(p, max_index)?;
    Ok((0..=max_l)
        .map(|l| {
            let stop = last_m(l);
            let mut value = PiAdic::zero(p);
            let mut terms = 0;
            for m in 0..stop {
                let idx = (p * (1 + m)) as i64 - 1 - l as i64;
                if idx < 0 {
                    continue;
                }
                let c = BigRational::from_integer(sign(m as u64) * factorial(m as u64));
                value = &value
                    + &theta
                        .get(idx as usize)
                        .scale(&c)
                        .mul_pi_power(l as i64 - m as i64);
                terms += 1;
            }
            let target = PiAdic::from_bigint(p, sign(l as u64) * factorial(l as u64) * p);
            HCoefficient {
                l,
                difference_valuation: (&value - &target).valuation(),
                value,
                terms,
                certified,
            }
        })
        .collect())
}

/// `(-1)^{p+1} p!`.
pub fn boyarsky_target(p: u32) -> BigInt {
    sign(p as u64 + 1) * factorial(p as u64)
}

/// Valuations of `S_M - (-1)^{p+1} p!` for `M = 0..=max_m`, where
/// `S_M = -p Σ_{l≤M} b_{pl} (-1)^l l! π^{-l}`.
pub fn boyarsky_check(p: u32, max_m: u32) -> Result<Vec<(u32, Valuation)>> {
    check_odd_prime(p)?;
    let theta = ThetaTable::new(p, (p * max_m) as usize)?;
    let target = PiAdic::from_bigint(p, boyarsky_target(p));
    let minus_p = BigRational::from_integer(BigInt::from(-(p as i64)));
    let mut partial = PiAdic::zero(p);
    let mut out = Vec::new();
    for m in 0..=max_m {
        let c = BigRational::from_integer(sign(m as u64) * factorial(m as u64)) * &minus_p;
        partial = &partial
            + &theta
                .get((p * m) as usize)
                .scale(&c)
                .mul_pi_power(-(m as i64));
        out.push((m, (&partial - &target).valuation()));
    }
    Ok(out)
}
