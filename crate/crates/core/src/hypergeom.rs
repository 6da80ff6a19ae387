//! The series `Φ(λ) = Σ_{l ∈ L₊} (-1)^{|l|} |l|! / Π l_i! · Π (λ_i/λ_0)^{l_i}`,
//! its truncation `Φ₁`, and termwise checks of the A-hypergeometric
//! system satisfied by `λ_0^{-1} Φ`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::lattice::{relation_lattice_basis, CompositionSolver, IVec, PointConfiguration};
use crate::series::{Monomial, Series};

/// `l = (l_0, ..., l_N)` with `l_1..l_N ≥ 0` and `Σ l_j â_j = 0`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LplusElement {
    pub l: IVec,
}

impl LplusElement {
    /// `l_1 + ... + l_N`, which equals `-l_0`.
    pub fn degree(&self) -> u32 {
        (-self.l[0]) as u32
    }

    pub fn exponents(&self) -> Vec<u32> {
        self.l[1..].iter().map(|&x| x as u32).collect()
    }

    /// `(-1)^k k! / Π l_i!` with `k` the degree.
    pub fn phi_coefficient(&self) -> BigInt {
        let c = multinomial(&self.exponents());
        if self.degree() % 2 == 1 {
            -c
        } else {
            c
        }
    }
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// `(Σ parts)! / Π parts_i!`, as an exact integer.
pub fn multinomial(parts: &[u32]) -> BigInt {
    let total: u64 = parts.iter().map(|&x| x as u64).sum();
    let den = parts
        .iter()
        .fold(BigInt::one(), |acc, &x| acc * factorial(x as u64));
    factorial(total) / den
}

/// Solutions of `Σ_{i≥1} l_i â_i = k â_0` of a fixed degree `k`.
fn lplus_layer(
    config: &PointConfiguration,
    solver: &CompositionSolver,
    k: u32,
) -> Vec<LplusElement> {
    let target: IVec = config.lift(0).iter().map(|x| x * k as i64).collect();
    solver
        .solve(k, &target)
        .into_iter()
        .map(|c| {
            let mut l = vec![-(k as i64)];
            l.extend(c.iter().map(|&x| x as i64));
            LplusElement { l }
        })
        .collect()
}

fn vertex_solver(config: &PointConfiguration) -> CompositionSolver {
    CompositionSolver::new(
        (1..=config.num_vertices())
            .map(|j| config.lift(j))
            .collect(),
    )
}

/// All `l ∈ L₊` with `l_1 + ... + l_N ≤ bound`, by degree and then
/// lexicographically.
pub fn enumerate_lplus(config: &PointConfiguration, bound: u32) -> Vec<LplusElement> {
    let solver = vertex_solver(config);
    (0..=bound)
        .into_par_iter()
        .map(|k| lplus_layer(config, &solver, k))
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

/// `Φ` in `t_i = λ_i/λ_0`, exact through total degree `bound`.
pub fn phi_series(config: &PointConfiguration, bound: u32) -> Series<BigInt> {
    let terms = enumerate_lplus(config, bound)
        .into_par_iter()
        .map(|l| (l.exponents(), l.phi_coefficient()))
        .collect::<Vec<_>>();
    Series::from_terms(Default::default(), config.num_vertices(), bound, terms)
}

/// `Φ₁`: the part of `Φ` with `l_1 + ... + l_N ≤ p - 1`. It is a polynomial;
/// the returned series has bound `p - 1`.
pub fn phi1_series(config: &PointConfiguration, p: u32) -> Series<BigInt> {
    phi_series(config, p - 1)
}

/// Operators of the A-hypergeometric system with parameter `-â_0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HypergeometricOperator {
    /// `□_l = Π_{l_j>0} ∂_j^{l_j} - Π_{l_j<0} ∂_j^{-l_j}` for `l ∈ L`.
    Box(IVec),
    /// `Z_i = Σ_j â_{ji} λ_j ∂_j + â_{0i}`, `i = 0..n`.
    Euler(usize),
}

impl HypergeometricOperator {
    /// Box operators from the relation-lattice basis, followed by every
    /// Euler operator.
    pub fn system(config: &PointConfiguration) -> Vec<Self> {
        let mut ops: Vec<Self> = relation_lattice_basis(config)
            .into_iter()
            .map(HypergeometricOperator::Box)
            .collect();
        ops.extend((0..=config.dim()).map(HypergeometricOperator::Euler));
        ops
    }
}

/// Result of applying an operator to the truncated `λ_0^{-1}Φ`, keyed by
/// full exponent vectors `(e_0, ..., e_N)` in the `λ_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorResidual {
    pub terms: BTreeMap<IVec, BigInt>,
    /// Residual monomials whose `t`-degree `e_1 + ... + e_N` is at most this
    /// value receive every contribution they would get from the full series.
    pub reliable_degree: i64,
}

impl OperatorResidual {
    pub fn reliable_terms(&self) -> impl Iterator<Item = (&IVec, &BigInt)> {
        let d = self.reliable_degree;
        self.terms
            .iter()
            .filter(move |(e, _)| e[1..].iter().sum::<i64>() <= d)
    }

    pub fn reliably_zero(&self) -> bool {
        self.reliable_terms().next().is_none()
    }
}

fn falling(e: i64, k: i64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * (e - i))
}

fn differentiate(e: &[i64], orders: &[i64]) -> Option<(IVec, BigInt)> {
    let c = e
        .iter()
        .zip(orders)
        .fold(BigInt::one(), |acc, (&ej, &k)| acc * falling(ej, k));
    if c.is_zero() {
        return None;
    }
    Some((e.iter().zip(orders).map(|(a, b)| a - b).collect(), c))
}

/// Applies `op` termwise to `λ_0^{-1} Φ`, where `phi` is `Φ` truncated at
/// its bound `D`.
///
/// For `□_l` a residual monomial of `t`-degree `d` collects terms of `Φ`
/// of degrees `d + Σ_{i≥1} l_i^+` and `d + Σ_{i≥1} l_i^-`, so only
/// `d ≤ D - max(Σ l_i^+, Σ l_i^-)` is reliable.
pub fn apply_operator(
    op: &HypergeometricOperator,
    config: &PointConfiguration,
    phi: &Series<BigInt>,
) -> OperatorResidual {
    let lifts = config.lifts();
    let lambda_exps = |m: &Monomial| -> IVec {
        let mut e = vec![-(m.degree() as i64) - 1];
        e.extend(m.exps().iter().map(|&x| x as i64));
        e
    };
    let mut terms: BTreeMap<IVec, BigInt> = BTreeMap::new();
    let mut add = |key: IVec, c: BigInt| {
        let entry = terms.entry(key.clone()).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            terms.remove(&key);
        }
    };
    let reliable_degree = match op {
        HypergeometricOperator::Euler(i) => {
            let shift = lifts[0][*i];
            for (m, c) in phi.terms() {
                let e = lambda_exps(m);
                let eigen: i64 =
                    e.iter().zip(&lifts).map(|(ej, a)| ej * a[*i]).sum::<i64>() + shift;
                if eigen != 0 {
                    add(e, c * eigen);
                }
            }
            phi.bound() as i64
        }
        HypergeometricOperator::Box(l) => {
            let plus: IVec = l.iter().map(|&x| x.max(0)).collect();
            let minus: IVec = l.iter().map(|&x| (-x).max(0)).collect();
            for (m, c) in phi.terms() {
                let e = lambda_exps(m);
                if let Some((key, f)) = differentiate(&e, &plus) {
                    add(key, c * f);
                }
                if let Some((key, f)) = differentiate(&e, &minus) {
                    add(key, -(c * f));
                }
            }
            let width = plus[1..]
                .iter()
                .sum::<i64>()
                .max(minus[1..].iter().sum::<i64>());
            phi.bound() as i64 - width
        }
    };
    OperatorResidual {
        terms,
        reliable_degree,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Integers;
    use std::collections::HashMap;

    fn ls(v: &[LplusElement]) -> Vec<IVec> {
        v.iter().map(|l| l.l.clone()).collect()
    }

    #[test]
    fn lplus_examples() {
        let dwork = PointConfiguration::dwork(2);
        assert_eq!(
            ls(&enumerate_lplus(&dwork, 4)),
            vec![vec![0, 0, 0], vec![-2, 1, 1], vec![-4, 2, 2]]
        );
        let hex = PointConfiguration::hexagon();
        assert_eq!(ls(&enumerate_lplus(&hex, 0)), vec![vec![0; 7]]);
        let got = ls(&enumerate_lplus(&hex, 2));
        assert_eq!(
            got,
            vec![
                vec![0, 0, 0, 0, 0, 0, 0],
                vec![-2, 0, 0, 1, 0, 0, 1],
                vec![-2, 0, 1, 0, 0, 1, 0],
                vec![-2, 1, 0, 0, 1, 0, 0],
            ]
        );
    }

    #[test]
    fn phi_dwork_central_binomials() {
        let phi = phi_series(&PointConfiguration::dwork(2), 6);
        for (l, c) in [(0u32, 1i64), (1, 2), (2, 6), (3, 20)] {
            assert_eq!(phi.coeff(&[l, l]), BigInt::from(c));
        }
        assert_eq!(phi.len(), 4);
        // n = 3: (-1)^{3l} (3l)!/(l!)^3
        let phi3 = phi_series(&PointConfiguration::dwork(3), 6);
        assert_eq!(phi3.coeff(&[1, 1, 1]), BigInt::from(-6));
        assert_eq!(phi3.coeff(&[2, 2, 2]), BigInt::from(90));
    }

    #[test]
    fn phi_hexagon_degree_two() {
        let phi = phi_series(&PointConfiguration::hexagon(), 2);
        assert_eq!(phi.constant_term(), BigInt::one());
        for (i, j) in [(0, 3), (1, 4), (2, 5)] {
            let mut e = vec![0u32; 6];
            e[i] = 1;
            e[j] = 1;
            assert_eq!(phi.coeff(&e), BigInt::from(2));
        }
        assert_eq!(phi.len(), 4);
    }

    #[test]
    fn phi1_examples() {
        let dwork = PointConfiguration::dwork(2);
        assert_eq!(phi1_series(&dwork, 3).to_string(), "1 + 2·t1·t2");
        assert_eq!(
            phi1_series(&dwork, 5).to_string(),
            "1 + 2·t1·t2 + 6·t1^2·t2^2"
        );
        let hex = PointConfiguration::hexagon();
        assert_eq!(phi1_series(&hex, 7), phi_series(&hex, 12).truncated(6));
    }

    /// Coefficient of `x^{k a_0}` in `(Σ_{i≥1} λ_i x^{a_i})^k`, times `(-1)^k`,
    /// by direct expansion of the Laurent polynomial.
    fn constant_term_layer(config: &PointConfiguration, k: u32) -> Series<BigInt> {
        let nv = config.num_vertices();
        // x-exponent -> (λ-exponent -> coefficient)
        let mut acc: HashMap<IVec, HashMap<Vec<u32>, BigInt>> = HashMap::new();
        acc.insert(
            vec![0; config.dim()],
            HashMap::from([(vec![0; nv], BigInt::one())]),
        );
        for _ in 0..k {
            let mut next: HashMap<IVec, HashMap<Vec<u32>, BigInt>> = HashMap::new();
            for (x, poly) in &acc {
                for (i, a) in config.vertices().iter().enumerate() {
                    let nx: IVec = x.iter().zip(a).map(|(u, v)| u + v).collect();
                    let slot = next.entry(nx).or_default();
                    for (le, c) in poly {
                        let mut ne = le.clone();
                        ne[i] += 1;
                        *slot.entry(ne).or_insert_with(BigInt::zero) += c;
                    }
                }
            }
            acc = next;
        }
        let target: IVec = config
            .interior_point()
            .iter()
            .map(|x| x * k as i64)
            .collect();
        let sign = if k % 2 == 1 {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        let terms = acc
            .remove(&target)
            .unwrap_or_default()
            .into_iter()
            .map(|(e, c)| (e, c * &sign));
        Series::from_terms(Integers, nv, k, terms)
    }

    #[test]
    fn layers_match_constant_term_expansion() {
        for config in [
            PointConfiguration::dwork(2),
            PointConfiguration::dwork(3),
            PointConfiguration::hexagon(),
        ] {
            let phi = phi_series(&config, 6);
            for k in 0..=6u32 {
                let layer = Series::from_terms(
                    Integers,
                    config.num_vertices(),
                    k,
                    phi.layer(k).map(|(m, c)| (m.exps().to_vec(), c.clone())),
                );
                assert_eq!(layer, constant_term_layer(&config, k), "k = {k}");
            }
        }
    }

    #[test]
    fn annihilated_by_system() {
        for config in [
            PointConfiguration::dwork(2),
            PointConfiguration::dwork(3),
            PointConfiguration::hexagon(),
        ] {
            let phi = phi_series(&config, 8);
            for op in HypergeometricOperator::system(&config) {
                let r = apply_operator(&op, &config, &phi);
                assert!(r.reliably_zero(), "{op:?}");
                if let HypergeometricOperator::Euler(_) = op {
                    assert!(r.terms.is_empty());
                }
            }
        }
    }

    #[test]
    fn box_window_for_dwork() {
        let config = PointConfiguration::dwork(2);
        let phi = phi_series(&config, 9);
        let r = apply_operator(&HypergeometricOperator::Box(vec![-2, 1, 1]), &config, &phi);
        assert_eq!(r.reliable_degree, 7);
        assert!(r.reliably_zero());
        // truncation leaves residue at the top
        assert!(!r.terms.is_empty());
        let zero = apply_operator(&HypergeometricOperator::Box(vec![0, 0, 0]), &config, &phi);
        assert!(zero.terms.is_empty());
    }

    #[test]
    fn wrong_parameter_is_detected() {
        // scaling keeps the residual zero, changing one coefficient does not
        let config = PointConfiguration::dwork(2);
        let phi = phi_series(&config, 4);
        let shifted = phi.map(Integers, |c| c * 2);
        let r = apply_operator(
            &HypergeometricOperator::Box(vec![-2, 1, 1]),
            &config,
            &shifted,
        );
        assert!(r.reliably_zero());
        let perturbed = &phi + &Series::from_terms(Integers, 2, 4, [(vec![1, 1], BigInt::one())]);
        let r = apply_operator(
            &HypergeometricOperator::Box(vec![-2, 1, 1]),
            &config,
            &perturbed,
        );
        assert!(!r.reliably_zero());
    }
}
