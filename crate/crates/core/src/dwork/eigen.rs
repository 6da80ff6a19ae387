//! The eigenvector `ξ` of `α*` (eigenvalue `p`) built from contiguous
//! A-hypergeometric series, with `ξ_{â_0} = Φ`.

use num_bigint::BigInt;
use num_rational::Rational64;

use crate::dwork::operator::{lift_series, p_element, reduce_series, DworkOperator, SElement};
use crate::error::Result;
use crate::hypergeom::{factorial, multinomial};
use crate::lattice::{CompositionSolver, PointConfiguration};
use crate::padic::Valuation;
use crate::series::{Integers, Series};

/// `ξ_ρ(t) = Σ (-1)^{ρ_0-1+k} (ρ_0-1+k)! / Π l_i! · t^l` over
/// `l ∈ Z_{≥0}^N`, `k = Σ l_i ≤ degree_bound`, with
/// `Σ l_i â_i = (ρ_0 + k) â_0 - ρ`.
pub fn xi_component(config: &PointConfiguration, rho: &[i64], degree_bound: u32) -> Series<BigInt> {
    let solver = CompositionSolver::new(
        (1..=config.num_vertices())
            .map(|j| config.lift(j))
            .collect(),
    );
    let base = config.lift(0);
    let mut terms = Vec::new();
    for k in 0..=degree_bound {
        let target: Vec<i64> = base
            .iter()
            .zip(rho)
            .map(|(a, r)| (rho[0] + k as i64) * a - r)
            .collect();
        let top = (rho[0] - 1 + k as i64) as u64;
        for l in solver.solve(k, &target) {
            // multinomial(l) = k!/Π l_i!, so rescale to top!/Π l_i!
            let c = multinomial(&l) * factorial(top) / factorial(k as u64);
            let c = if top % 2 == 1 { -c } else { c };
            terms.push((l, c));
        }
    }
    Series::from_terms(Integers, config.num_vertices(), degree_bound, terms)
}

/// All components with `ρ` among the operator's interior points.
pub fn build_xi_explicit(op: &DworkOperator) -> SElement {
    let mut xi = op.zero_element();
    for rho in op.interior_points() {
        let s = xi_component(op.config(), rho, op.degree_bound());
        xi.set(rho.clone(), lift_series(&s, op.p()))
            .expect("interior point");
    }
    xi
}

/// `α*(ξ) - pξ` for the explicit eigenvector, with the tolerance it is
/// expected to meet.
#[derive(Clone, Debug)]
pub struct EigenCheck {
    pub defect_valuation: Valuation,
    /// `min(K, least refined tail bound)`.
    pub tolerance: Rational64,
    pub refined_tail: Rational64,
    pub linear_tail: Rational64,
    pub precision: Rational64,
}

impl EigenCheck {
    pub fn passes(&self) -> bool {
        self.defect_valuation >= Valuation::Finite(self.tolerance)
    }
}

pub fn eigenvector_check(op: &DworkOperator, precision: Rational64) -> Result<EigenCheck> {
    let xi = build_xi_explicit(op);
    let image = op.alpha_star(&xi)?;
    let defect = image.image.sub(&xi.scale(&p_element(op.p())))?;
    let refined_tail = image.min_tail();
    let linear_tail = image.tails.iter().map(|t| t.linear).min().expect("weights");
    Ok(EigenCheck {
        defect_valuation: defect.valuation(),
        tolerance: precision.min(refined_tail),
        refined_tail,
        linear_tail,
        precision,
    })
}

/// `ξ / Φ`, componentwise, reduced modulo valuation `≥ precision`.
pub fn normalized_eigenvector(op: &DworkOperator, precision: Rational64) -> Result<SElement> {
    let xi = build_xi_explicit(op);
    let phi = xi.component_or_zero(&op.base_point());
    let inverse = reduce_series(
        &Series::one(*phi.ring(), phi.nvars(), phi.bound()).divide_by_unit(&phi)?,
        precision,
    );
    Ok(xi.map_components(|_, s| reduce_series(&(s * &inverse), precision)))
}
