//! `α*` and `β` on finitely supported S-elements.
//!
//! An `SElement` stores `ξ_ρ(t)` for interior cone points `ρ` of weight at
//! most `D_x`, each truncated at total degree `D_λ`, and stands for
//! `Σ_ρ ξ_ρ(λ) (πλ_0)^{-ρ_0} x^{-ρ}`. Then
//!
//! `η_ρ = Σ_{ν ∈ M°, μ = pν - ρ ∈ M} π^{ρ_0 - ν_0} B_μ(1, t) ξ_ν(t^p)`
//!
//! is computed exactly over the stored `ν`. Components of weight above
//! `D_x` are not stored; `tail_bound` says how much they could contribute.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use rayon::prelude::*;

use crate::dwork::kernel::{bmu_polynomial, lift_solver, BmuPolynomial};
use crate::dwork::theta::{linear_bound, ChainBound, ThetaTable};
use crate::error::{Error, Result};
use crate::lattice::{unique_interior_gate, IVec, PointConfiguration};
use crate::padic::{check_odd_prime, PiAdic, Valuation};
use crate::series::{Coefficient, PiRing, Series};

/// Reduces every coefficient modulo `{valuation ≥ k}`.
pub fn reduce_series(s: &Series<PiAdic>, k: Rational64) -> Series<PiAdic> {
    s.map(*s.ring(), |c| c.truncate(k).without_cap())
}

#[derive(Clone, Debug, PartialEq)]
pub struct SElement {
    p: u32,
    nvars: usize,
    weight_bound: i64,
    degree_bound: u32,
    comps: BTreeMap<IVec, Series<PiAdic>>,
}

impl SElement {
    pub fn zero(p: u32, nvars: usize, weight_bound: i64, degree_bound: u32) -> Self {
        Self {
            p,
            nvars,
            weight_bound,
            degree_bound,
            comps: BTreeMap::new(),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn weight_bound(&self) -> i64 {
        self.weight_bound
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    /// Sets `ξ_ρ`. The series is cut to the element's degree bound.
    pub fn set(&mut self, rho: IVec, series: Series<PiAdic>) -> Result<()> {
        if rho[0] > self.weight_bound || rho[0] < 1 {
            return Err(Error::Incompatible(format!(
                "point {rho:?} outside weights 1..={}",
                self.weight_bound
            )));
        }
        if series.nvars() != self.nvars || series.ring().p != self.p {
            return Err(Error::Incompatible("component has the wrong shape".into()));
        }
        if series.bound() < self.degree_bound {
            return Err(Error::Incompatible(format!(
                "component known to degree {} < {}",
                series.bound(),
                self.degree_bound
            )));
        }
        let series = series.truncated(self.degree_bound);
        if series.is_zero() {
            self.comps.remove(&rho);
        } else {
            self.comps.insert(rho, series);
        }
        Ok(())
    }

    pub fn component(&self, rho: &[i64]) -> Option<&Series<PiAdic>> {
        self.comps.get(rho)
    }

    pub fn component_or_zero(&self, rho: &[i64]) -> Series<PiAdic> {
        self.comps
            .get(rho)
            .cloned()
            .unwrap_or_else(|| Series::zero(PiRing { p: self.p }, self.nvars, self.degree_bound))
    }

    pub fn components(&self) -> impl Iterator<Item = (&IVec, &Series<PiAdic>)> {
        self.comps.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// `-log_p` of the norm: the least Gauss valuation of a component.
    pub fn valuation(&self) -> Valuation {
        self.comps
            .values()
            .map(|s| s.gauss_valuation(self.p))
            .min()
            .unwrap_or(Valuation::Infinite)
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        if (self.p, self.nvars, self.weight_bound, self.degree_bound)
            != (other.p, other.nvars, other.weight_bound, other.degree_bound)
        {
            return Err(Error::Incompatible(
                "S-elements with different bounds".into(),
            ));
        }
        Ok(())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let mut out = self.clone();
        for (rho, s) in &other.comps {
            let d = &out.component_or_zero(rho) - s;
            out.set(rho.clone(), d)?;
        }
        Ok(out)
    }

    pub fn map_components(&self, f: impl Fn(&IVec, &Series<PiAdic>) -> Series<PiAdic>) -> Self {
        let mut out = Self::zero(self.p, self.nvars, self.weight_bound, self.degree_bound);
        for (rho, s) in &self.comps {
            out.set(rho.clone(), f(rho, s)).expect("same shape");
        }
        out
    }

    pub fn scale(&self, c: &PiAdic) -> Self {
        self.map_components(|_, s| s.scale(c))
    }

    pub fn truncate_precision(&self, k: Rational64) -> Self {
        self.map_components(|_, s| reduce_series(s, k))
    }

    /// Component-by-component text dump.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "selement p={} weight={} degree={}\n",
            self.p, self.weight_bound, self.degree_bound
        );
        for (rho, s) in &self.comps {
            let r: Vec<String> = rho.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("component ({})\n", r.join(",")));
            out.push_str(&s.to_text());
        }
        out
    }
}

/// A term `π^{ρ_0 - ν_0} B_μ(1, t)` feeding `η_ρ` from `ξ_ν`.
#[derive(Clone, Debug)]
pub struct Link {
    pub nu: IVec,
    pub mu: IVec,
    pub poly: Series<PiAdic>,
    /// Valuation of the untruncated polynomial.
    pub valuation: Valuation,
}

/// Valuation guaranteed for the part of `η_ρ` coming from unstored `ξ_ν`,
/// assuming those components are integral.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailBound {
    pub weight: i64,
    /// From the exact valuations of the `b_i`.
    pub refined: Rational64,
    /// `(D_x+1)((p-1)/p - 1/(p-1)) - ρ_0(p-1)/p²`, the bound obtained from
    /// `ord b_i ≥ i(p-1)/p²` alone. It bounds `π^{-ρ_0} η_ρ`.
    pub linear: Rational64,
}

#[derive(Clone, Debug)]
pub struct AlphaImage {
    pub image: SElement,
    pub tails: Vec<TailBound>,
}

impl AlphaImage {
    /// Least refined tail bound over the stored weights.
    pub fn min_tail(&self) -> Rational64 {
        self.tails.iter().map(|t| t.refined).min().expect("weights")
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecayEntry {
    pub step: usize,
    /// Valuation of `β^{step}(seed) - β^{step-1}(seed)`.
    pub valuation: Valuation,
}

#[derive(Clone, Debug)]
pub struct FixedPointRun {
    pub fixed_point: SElement,
    pub log: Vec<DecayEntry>,
    pub converged: bool,
    /// Number of steps that changed the element.
    pub steps: usize,
    /// Least valuation gain between consecutive steps after the first; the
    /// measured contraction ratio is `p^{-gap}`.
    pub contraction_gap: Option<Rational64>,
}

impl FixedPointRun {
    pub fn c_hat(&self) -> Option<f64> {
        let p = self.fixed_point.p() as f64;
        self.contraction_gap
            .map(|g| p.powf(-(*g.numer() as f64) / (*g.denom() as f64)))
    }

    pub fn decay_table(&self) -> String {
        let mut out = format!("{:>5}  {:>12}  {:>8}\n", "step", "valuation", "gain");
        let mut prev: Option<Valuation> = None;
        for e in &self.log {
            let gain = match (prev, e.valuation) {
                (Some(Valuation::Finite(a)), Valuation::Finite(b)) => (b - a).to_string(),
                _ => "-".to_string(),
            };
            out.push_str(&format!(
                "{:>5}  {:>12}  {:>8}\n",
                e.step,
                e.valuation.to_string(),
                gain
            ));
            prev = Some(e.valuation);
        }
        out
    }
}

impl fmt::Display for DecayEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "step {} valuation {}", self.step, self.valuation)
    }
}

/// `α*` on S-elements with weights `≤ D_x` and degrees `≤ D_λ`.
pub struct DworkOperator {
    config: PointConfiguration,
    p: u32,
    weight_bound: i64,
    degree_bound: u32,
    theta: ThetaTable,
    chain: ChainBound,
    interior: Vec<IVec>,
    bmu: BTreeMap<IVec, BmuPolynomial>,
    links: BTreeMap<IVec, Vec<Link>>,
    gate: std::result::Result<IVec, Error>,
}

impl DworkOperator {
    pub fn new(
        config: &PointConfiguration,
        p: u32,
        weight_bound: i64,
        degree_bound: u32,
    ) -> Result<Self> {
        check_odd_prime(p)?;
        let theta = ThetaTable::new(p, Self::theta_len(p, weight_bound))?;
        Self::with_tables(
            config,
            p,
            weight_bound,
            degree_bound,
            theta,
            BTreeMap::new(),
        )
    }

    /// Index up to which `b_i` are needed (the largest `μ_0` is `p D_x - 1`).
    pub fn theta_len(p: u32, weight_bound: i64) -> usize {
        (p as i64 * weight_bound.max(1)) as usize
    }

    /// Builds the operator reusing a θ table and any already known `B_μ`.
    pub fn with_tables(
        config: &PointConfiguration,
        p: u32,
        weight_bound: i64,
        degree_bound: u32,
        theta: ThetaTable,
        mut bmu: BTreeMap<IVec, BmuPolynomial>,
    ) -> Result<Self> {
        check_odd_prime(p)?;
        if weight_bound < 1 {
            return Err(Error::InvalidConfiguration(
                "weight bound must be at least 1".into(),
            ));
        }
        if theta.p() != p {
            return Err(Error::Incompatible(
                "theta table for a different prime".into(),
            ));
        }
        theta.require(Self::theta_len(p, weight_bound))?;
        let cone = config.cone()?;
        let interior: Vec<IVec> = cone
            .enumerate(weight_bound, true)
            .into_iter()
            .map(|c| c.coords)
            .collect();

        let mut pairs = Vec::new();
        for rho in &interior {
            for nu in &interior {
                let mu: IVec = nu.iter().zip(rho).map(|(n, r)| p as i64 * n - r).collect();
                if cone.in_m(&mu) {
                    pairs.push((rho.clone(), nu.clone(), mu));
                }
            }
        }
        let missing: Vec<IVec> = {
            let mut m: Vec<IVec> = pairs
                .iter()
                .map(|(_, _, mu)| mu.clone())
                .filter(|mu| !bmu.contains_key(mu))
                .collect();
            m.sort();
            m.dedup();
            m
        };
        let solver = lift_solver(config);
        let computed: Vec<BmuPolynomial> = missing
            .par_iter()
            .map(|mu| bmu_polynomial(config, &solver, mu, &theta))
            .collect();
        for b in computed {
            bmu.insert(b.mu.clone(), b);
        }

        let pi_ring = PiRing { p };
        let mut links: BTreeMap<IVec, Vec<Link>> =
            interior.iter().map(|r| (r.clone(), Vec::new())).collect();
        for (rho, nu, mu) in pairs {
            let b = &bmu[&mu];
            let pi = PiAdic::pi_power_unchecked(p, rho[0] - nu[0]);
            let full = b.poly.scale(&pi);
            let valuation = full.gauss_valuation(p);
            let poly = full.polynomial_with_bound(degree_bound);
            debug_assert_eq!(poly.ring(), &pi_ring);
            links.get_mut(&rho).unwrap().push(Link {
                nu,
                mu,
                poly,
                valuation,
            });
        }

        // exact b-valuations well past the stored range keep the tail bound sharp
        let chain_theta = if theta.max_index() >= 120 {
            theta.clone()
        } else {
            ThetaTable::new(p, 120)?
        };
        let chain = ChainBound::new(&chain_theta);
        Ok(Self {
            config: config.clone(),
            p,
            weight_bound,
            degree_bound,
            theta,
            chain,
            interior,
            bmu,
            links,
            gate: unique_interior_gate(config),
        })
    }

    pub fn config(&self) -> &PointConfiguration {
        &self.config
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn weight_bound(&self) -> i64 {
        self.weight_bound
    }

    pub fn degree_bound(&self) -> u32 {
        self.degree_bound
    }

    pub fn theta(&self) -> &ThetaTable {
        &self.theta
    }

    pub fn bmu_table(&self) -> &BTreeMap<IVec, BmuPolynomial> {
        &self.bmu
    }

    pub fn interior_points(&self) -> &[IVec] {
        &self.interior
    }

    pub fn links(&self, rho: &[i64]) -> &[Link] {
        self.links.get(rho).map_or(&[], |v| v.as_slice())
    }

    pub fn gate(&self) -> std::result::Result<&IVec, &Error> {
        self.gate.as_ref()
    }

    /// `â_0 = (1, a_0)`.
    pub fn base_point(&self) -> IVec {
        self.config.lift(0)
    }

    pub fn zero_element(&self) -> SElement {
        SElement::zero(
            self.p,
            self.config.num_vertices(),
            self.weight_bound,
            self.degree_bound,
        )
    }

    /// `ξ_{â_0} = 1`, every other component zero.
    pub fn seed(&self) -> SElement {
        let mut s = self.zero_element();
        let one = Series::one(
            PiRing { p: self.p },
            self.config.num_vertices(),
            self.degree_bound,
        );
        s.set(self.base_point(), one).expect("â_0 is stored");
        s
    }

    /// Lower bound for the valuation of the contribution to `η_ρ`
    /// (`ρ_0 = weight`) of components of weight `> D_x`.
    pub fn tail_bound(&self, weight: i64) -> TailBound {
        let p = self.p as i64;
        let pi_unit = Rational64::new(1, p - 1);
        let mut best: Option<Rational64> = None;
        let mut nu0 = self.weight_bound + 1;
        loop {
            let mu0 = (p * nu0 - weight) as u64;
            let shift = Rational64::from_integer(weight - nu0) * pi_unit;
            let exact = shift + self.chain.get(mu0);
            best = Some(best.map_or(exact, |b| b.min(exact)));
            // the linear estimate grows with ν_0; once it passes the best
            // value no later ν_0 can do better
            if shift + linear_bound(self.p, mu0) > best.unwrap() {
                break;
            }
            nu0 += 1;
        }
        let growth = Rational64::new(p - 1, p) - pi_unit;
        let linear = Rational64::from_integer(self.weight_bound + 1) * growth
            - linear_bound(self.p, weight as u64);
        TailBound {
            weight,
            refined: best.unwrap(),
            linear,
        }
    }

    pub fn tail_bounds(&self) -> Vec<TailBound> {
        let mut weights: Vec<i64> = self.interior.iter().map(|r| r[0]).collect();
        weights.dedup();
        weights.into_iter().map(|w| self.tail_bound(w)).collect()
    }

    /// Least `ord(π^{ρ_0-ν_0} B_μ) - 1` over links with `ν_0 ≥ 2`: the
    /// valuation form of the contraction constant, here computed exactly for
    /// the stored range.
    pub fn contraction_bound(&self) -> Option<Rational64> {
        self.links
            .values()
            .flatten()
            .filter(|l| l.nu[0] >= 2)
            .filter_map(|l| l.valuation.finite())
            .map(|v| v - Rational64::from_integer(1))
            .min()
    }

    fn check_element(&self, xi: &SElement) -> Result<()> {
        if (xi.p, xi.nvars, xi.weight_bound, xi.degree_bound)
            != (
                self.p,
                self.config.num_vertices(),
                self.weight_bound,
                self.degree_bound,
            )
        {
            return Err(Error::Incompatible(format!(
                "element has bounds (p={}, D_x={}, D_λ={}), operator has (p={}, D_x={}, D_λ={})",
                xi.p,
                xi.weight_bound,
                xi.degree_bound,
                self.p,
                self.weight_bound,
                self.degree_bound
            )));
        }
        if let Some(rho) = xi.comps.keys().find(|r| !self.links.contains_key(*r)) {
            return Err(Error::Incompatible(format!(
                "{rho:?} is not an interior cone point"
            )));
        }
        Ok(())
    }

    pub fn alpha_star(&self, xi: &SElement) -> Result<AlphaImage> {
        self.check_element(xi)?;
        let frob: BTreeMap<&IVec, Series<PiAdic>> = xi
            .comps
            .par_iter()
            .map(|(nu, s)| (nu, s.frobenius(self.p)))
            .collect();
        let ring = PiRing { p: self.p };
        let nvars = self.config.num_vertices();
        let etas: Vec<(IVec, Series<PiAdic>)> = self
            .interior
            .par_iter()
            .map(|rho| {
                let mut acc = Series::zero(ring, nvars, self.degree_bound);
                for link in &self.links[rho] {
                    if let Some(f) = frob.get(&link.nu) {
                        acc = &acc + &(&link.poly * f);
                    }
                }
                (rho.clone(), acc)
            })
            .collect();
        let mut image = self.zero_element();
        for (rho, s) in etas {
            image.set(rho, s)?;
        }
        Ok(AlphaImage {
            image,
            tails: self.tail_bounds(),
        })
    }

    /// `β(ξ) = α*(ξ) / η_{â_0}`, computed as `(η_ρ / p) / (η_{â_0} / p)`.
    /// With `precision = Some(k)` every coefficient is reduced modulo
    /// valuation `≥ k`.
    pub fn beta_step(&self, xi: &SElement, precision: Option<Rational64>) -> Result<SElement> {
        if let Err(e) = &self.gate {
            return Err(e.clone());
        }
        let image = self.alpha_star(xi)?.image;
        let inv_p = PiAdic::from_rational(
            self.p,
            BigRational::new(BigInt::from(1), BigInt::from(self.p)),
        );
        let unit = image.component_or_zero(&self.base_point()).scale(&inv_p);
        if unit.constant_term().valuation() != Valuation::int(0) {
            return Err(Error::NotInvertible(format!(
                "η_â0 / p has constant term {} of valuation {}",
                unit.constant_term(),
                unit.constant_term().valuation()
            )));
        }
        let one = Series::one(
            PiRing { p: self.p },
            self.config.num_vertices(),
            self.degree_bound,
        );
        let mut inverse = one.divide_by_unit(&unit)?;
        if let Some(k) = precision {
            inverse = reduce_series(&inverse, k);
        }
        Ok(image.map_components(|_, eta| {
            let q = &eta.scale(&inv_p) * &inverse;
            match precision {
                Some(k) => reduce_series(&q, k),
                None => q,
            }
        }))
    }

    /// Iterates `β` at working precision `k` until two iterates agree modulo
    /// valuation `k` or `max_iters` steps pass. Fails if a step after the
    /// first does not strictly improve the difference valuation.
    pub fn iterate_to_fixed_point(
        &self,
        seed: &SElement,
        max_iters: usize,
        k: Rational64,
    ) -> Result<FixedPointRun> {
        let mut current = seed.truncate_precision(k);
        let mut log: Vec<DecayEntry> = Vec::new();
        let mut converged = false;
        for step in 1..=max_iters {
            let next = self.beta_step(&current, Some(k))?;
            let v = next.sub(&current)?.valuation();
            if let Some(prev) = log.last() {
                if step >= 2 && !v.is_infinite() && v <= prev.valuation {
                    return Err(Error::NonContraction {
                        step,
                        previous: prev.valuation,
                        current: v,
                    });
                }
            }
            log.push(DecayEntry { step, valuation: v });
            current = next;
            if v.is_infinite() {
                converged = true;
                break;
            }
        }
        let finite: Vec<Rational64> = log.iter().filter_map(|e| e.valuation.finite()).collect();
        let contraction_gap = finite.windows(2).map(|w| w[1] - w[0]).min();
        let steps = finite.len();
        Ok(FixedPointRun {
            fixed_point: current,
            log,
            converged,
            steps,
            contraction_gap,
        })
    }
}

/// `p` as an element of `Q(π)`.
pub fn p_element(p: u32) -> PiAdic {
    PiAdic::from_int(p, p as i64)
}

/// Converts an integer series into one over `Q(π)`.
pub fn lift_series(s: &Series<BigInt>, p: u32) -> Series<PiAdic> {
    s.map(PiRing { p }, |c| PiAdic::from_int_big(p, c))
}

impl PiAdic {
    fn from_int_big(p: u32, n: &BigInt) -> Self {
        <PiAdic as Coefficient>::from_int(&PiRing { p }, n)
    }
}
