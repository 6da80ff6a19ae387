//! The polynomials `B_μ(1, t)` with `F(λ, x) = Π_j θ(λ_j x^{â_j}) = Σ_μ B_μ(λ) x^μ`.

use std::collections::BTreeMap;

use num_rational::Rational64;

use crate::dwork::theta::{linear_bound, ThetaTable};
use crate::error::{Error, Result};
use crate::lattice::{CompositionSolver, IVec, PointConfiguration};
use crate::padic::{PiAdic, Valuation};
use crate::series::{PiRing, Series};

#[derive(Clone, Debug, PartialEq)]
pub struct BmuPolynomial {
    pub mu: IVec,
    /// `B_μ(1, t_1, ..., t_N)` as an exact polynomial (bound `μ_0`).
    pub poly: Series<PiAdic>,
    /// Number of `ν ≥ 0` with `Σ ν_i â_i = μ`; zero means `μ ∉ M`.
    pub solutions: usize,
}

impl BmuPolynomial {
    pub fn weight(&self) -> i64 {
        self.mu[0]
    }

    /// Whether no `ν` solves `Σ ν_i â_i = μ`.
    pub fn is_empty(&self) -> bool {
        self.solutions == 0
    }

    /// Gauss valuation minus `μ_0(p-1)/p²`; never negative.
    pub fn bound_margin(&self) -> Valuation {
        let p = self.poly.ring().p;
        self.poly
            .gauss_valuation(p)
            .minus(Valuation::Finite(linear_bound(p, self.mu[0] as u64)))
    }
}

/// Solver for `Σ_{i=0}^N ν_i â_i = μ` over all lifts.
pub fn lift_solver(config: &PointConfiguration) -> CompositionSolver {
    CompositionSolver::new(config.lifts())
}

/// `B_μ(1, t) = Σ_ν Π b_{ν_i} t^{(ν_1..ν_N)}` over solutions of
/// `Σ ν_i â_i = μ`; each has `Σ ν_i = μ_0`.
pub fn bmu_polynomial(
    config: &PointConfiguration,
    solver: &CompositionSolver,
    mu: &[i64],
    theta: &ThetaTable,
) -> BmuPolynomial {
    let p = theta.p();
    let weight = mu[0];
    let ring = PiRing { p };
    if weight < 0 {
        return BmuPolynomial {
            mu: mu.to_vec(),
            poly: Series::zero(ring, config.num_vertices(), 0),
            solutions: 0,
        };
    }
    theta
        .require(weight as usize)
        .expect("theta table covers μ_0");
    let sols = solver.solve(weight as u32, mu);
    let terms = sols.iter().map(|nu| {
        debug_assert_eq!(nu.iter().map(|&x| x as i64).sum::<i64>(), weight);
        let c = nu
            .iter()
            .fold(PiAdic::one(p), |acc, &k| &acc * theta.get(k as usize));
        (nu[1..].to_vec(), c)
    });
    let poly = Series::from_terms(ring, config.num_vertices(), weight as u32, terms);
    BmuPolynomial {
        mu: mu.to_vec(),
        poly,
        solutions: sols.len(),
    }
}

/// `p^{-1} B_{(p-1)â_0}(1, t)`, which has `p`-integral rational coefficients.
pub fn scaled_bmu_at_interior(config: &PointConfiguration, theta: &ThetaTable) -> Series<PiAdic> {
    let p = theta.p();
    let mu: IVec = config.lift(0).iter().map(|x| x * (p as i64 - 1)).collect();
    let b = bmu_polynomial(config, &lift_solver(config), &mu, theta);
    let inv_p = num_rational::BigRational::new(1.into(), (p as i64).into());
    b.poly.scale(&PiAdic::from_rational(p, inv_p))
}

/// `(p-1)/p²` as a valuation.
pub fn pi_tilde_valuation(p: u32) -> Rational64 {
    linear_bound(p, 1)
}

fn join(v: &[i64]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

/// Blocks `bmu mu=.. solutions=..` followed by the polynomial's series text.
pub fn bmu_table_to_text(table: &BTreeMap<IVec, BmuPolynomial>) -> String {
    let mut out = String::new();
    for (mu, b) in table {
        out.push_str(&format!("bmu mu={} solutions={}\n", join(mu), b.solutions));
        out.push_str(&b.poly.to_text());
    }
    out
}

pub fn bmu_table_from_text(p: u32, text: &str) -> Result<BTreeMap<IVec, BmuPolynomial>> {
    let mut table = BTreeMap::new();
    let mut blocks: Vec<(String, String)> = Vec::new();
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("bmu ") {
            blocks.push((rest.to_string(), String::new()));
        } else if let Some((_, body)) = blocks.last_mut() {
            body.push_str(line);
            body.push('\n');
        } else if !line.trim().is_empty() {
            return Err(Error::Parse(format!("line outside a bmu block: {line:?}")));
        }
    }
    for (header, body) in blocks {
        let mut mu = None;
        let mut solutions = None;
        for f in header.split_whitespace() {
            match f.split_once('=') {
                Some(("mu", v)) => {
                    mu = v
                        .split(',')
                        .map(|x| x.parse::<i64>())
                        .collect::<std::result::Result<IVec, _>>()
                        .ok()
                }
                Some(("solutions", v)) => solutions = v.parse::<usize>().ok(),
                _ => return Err(Error::Parse(format!("bad bmu header field {f:?}"))),
            }
        }
        let (mu, solutions) = match (mu, solutions) {
            (Some(m), Some(s)) => (m, s),
            _ => return Err(Error::Parse(format!("incomplete bmu header {header:?}"))),
        };
        let poly = Series::from_text(PiRing { p }, &body)?;
        table.insert(
            mu.clone(),
            BmuPolynomial {
                mu,
                poly,
                solutions,
            },
        );
    }
    Ok(table)
}
