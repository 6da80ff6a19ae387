//! End-to-end checks with valuation margins, assembled into a report.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use sha2::{Digest, Sha256};

use crate::dwork::eigen::{build_xi_explicit, eigenvector_check, normalized_eigenvector};
use crate::dwork::gamma::{boyarsky_check, g_identity_check};
use crate::dwork::kernel::{bmu_polynomial, lift_solver, scaled_bmu_at_interior};
use crate::dwork::operator::{lift_series, DworkOperator};
use crate::dwork::theta::ThetaTable;
use crate::error::{Error, Result};
use crate::hypergeom::{
    apply_operator, factorial, phi1_series, phi_series, HypergeometricOperator,
};
use crate::lattice::{unique_interior_gate, IVec, PointConfiguration};
use crate::padic::{PiAdic, Valuation};
use crate::series::{Coefficient, ModInt, Residues, Series};

/// First 16 hex digits of the SHA-256 of `text`.
pub fn digest(text: &str) -> String {
    let h = Sha256::digest(text.as_bytes());
    hex::encode(&h[..8])
}

fn points_key(config: &PointConfiguration) -> String {
    config
        .points()
        .iter()
        .map(|a| {
            a.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        })
        .collect::<Vec<_>>()
        .join(";")
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckEntry {
    pub name: String,
    pub digest: String,
    /// Required valuation; `None` for exact yes/no checks.
    pub tolerance: Option<Valuation>,
    pub margin: Valuation,
    pub pass: bool,
    /// Reported but not counted toward the overall verdict.
    pub informational: bool,
    pub detail: String,
}

impl CheckEntry {
    fn valued(
        name: &str,
        inputs: &str,
        tolerance: Valuation,
        margin: Valuation,
        detail: String,
    ) -> Self {
        Self {
            name: name.to_string(),
            digest: digest(inputs),
            tolerance: Some(tolerance),
            margin,
            pass: margin >= tolerance,
            informational: false,
            detail,
        }
    }

    fn exact(name: &str, inputs: &str, pass: bool, detail: String) -> Self {
        Self {
            name: name.to_string(),
            digest: digest(inputs),
            tolerance: None,
            margin: if pass {
                Valuation::Infinite
            } else {
                Valuation::int(0)
            },
            pass,
            informational: false,
            detail,
        }
    }

    fn informational(mut self) -> Self {
        self.informational = true;
        self
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CongruenceReport {
    pub entries: Vec<CheckEntry>,
}

impl CongruenceReport {
    pub fn push(&mut self, entry: CheckEntry) {
        self.entries.push(entry);
        self.entries.sort_by(|a, b| a.name.cmp(&b.name));
    }

    pub fn extend(&mut self, entries: impl IntoIterator<Item = CheckEntry>) {
        for e in entries {
            self.push(e);
        }
    }

    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass || e.informational)
    }

    pub fn render_text(&self) -> String {
        let width = self
            .entries
            .iter()
            .map(|e| e.name.len())
            .max()
            .unwrap_or(5)
            .max(5);
        let mut out = String::new();
        writeln!(
            out,
            "{:<width$}  {:>9}  {:>9}  {:<6}  detail",
            "check", "tolerance", "margin", "result"
        )
        .unwrap();
        for e in &self.entries {
            let tol = e.tolerance.map_or("exact".to_string(), |t| t.to_string());
            let result = match (e.pass, e.informational) {
                (_, true) => "INFO",
                (true, false) => "PASS",
                (false, false) => "FAIL",
            };
            writeln!(
                out,
                "{:<width$}  {:>9}  {:>9}  {:<6}  {}",
                e.name,
                tol,
                e.margin.to_string(),
                result,
                e.detail
            )
            .unwrap();
        }
        writeln!(
            out,
            "overall: {}",
            if self.pass() { "PASS" } else { "FAIL" }
        )
        .unwrap();
        out
    }

    /// One `key=value` line per check; keys `check margin tolerance pass`
    /// are stable.
    pub fn render_structured(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let tol = e.tolerance.map_or("exact".to_string(), |t| t.to_string());
            writeln!(
                out,
                "check={} digest={} tolerance={} margin={} pass={} informational={}",
                e.name, e.digest, tol, e.margin, e.pass, e.informational
            )
            .unwrap();
        }
        writeln!(out, "overall pass={}", self.pass()).unwrap();
        out
    }
}

/// The gate, as a report entry.
pub fn gate_check(config: &PointConfiguration) -> CheckEntry {
    let inputs = format!("gate|{}", points_key(config));
    match unique_interior_gate(config) {
        Ok(a) => CheckEntry::exact(
            "gate",
            &inputs,
            true,
            format!("unique interior point {a:?}"),
        ),
        Err(Error::GateFailure { found, .. }) => CheckEntry::exact(
            "gate",
            &inputs,
            false,
            format!("interior points found: {found:?}"),
        ),
        Err(e) => CheckEntry::exact("gate", &inputs, false, e.to_string()),
    }
}

/// `Φ - Φ₁ · Φ(t^p)` over the integers through total degree `degree`.
pub fn ratio_defect(config: &PointConfiguration, p: u32, degree: u32) -> Series<BigInt> {
    let phi = phi_series(config, degree);
    let phi1 = phi.truncated(p - 1).polynomial_with_bound(degree);
    &phi - &(&phi1 * &phi.frobenius(p))
}

/// `Φ ≡ Φ₁ · Φ^σ (mod p)` through total degree `degree`. The margin is the
/// least valuation of a coefficient of the difference.
pub fn verify_mod_p_ratio(config: &PointConfiguration, p: u32, degree: u32) -> CheckEntry {
    let defect = ratio_defect(config, p, degree);
    let margin = defect.gauss_valuation(p);
    let worst = defect
        .terms()
        .min_by_key(|(_, c)| c.valuation_at(p))
        .map(|(m, _)| format!("; least margin at degree {}", m.degree()))
        .unwrap_or_default();
    CheckEntry::valued(
        "mod-p-ratio",
        &format!("mod-p-ratio|p={p}|{}|D={degree}", points_key(config)),
        Valuation::int(1),
        margin,
        format!(
            "{} nonzero difference coefficients through degree {degree}{worst}",
            defect.len()
        ),
    )
}

/// `p^{-1} B_{(p-1)â_0}(1, t) ≡ Φ₁ (mod p)`.
pub fn verify_scaled_bmu_congruence(config: &PointConfiguration, theta: &ThetaTable) -> CheckEntry {
    let p = theta.p();
    let scaled = scaled_bmu_at_interior(config, theta);
    let phi1 = lift_series(&phi1_series(config, p), p);
    let diff = &phi1 - &scaled.polynomial_with_bound(p - 1);
    CheckEntry::valued(
        "bmu-phi1-congruence",
        &format!("bmu-phi1|p={p}|{}", points_key(config)),
        Valuation::int(1),
        diff.gauss_valuation(p),
        format!("{} terms in p^-1 B", scaled.len()),
    )
}

/// Every coefficient of `B_{(p-1)â_0}(1, t)` has valuation `≥ 1`, and the
/// constant term is exactly `-p/(p-1)!`.
pub fn verify_bmu_norm(config: &PointConfiguration, theta: &ThetaTable) -> CheckEntry {
    let p = theta.p();
    let mu: IVec = config.lift(0).iter().map(|x| x * (p as i64 - 1)).collect();
    let b = bmu_polynomial(config, &lift_solver(config), &mu, theta);
    let expected = PiAdic::from_rational(
        p,
        BigRational::new(-BigInt::from(p), factorial(p as u64 - 1)),
    );
    let constant = b.poly.constant_term();
    let margin = b.poly.gauss_valuation(p);
    let mut entry = CheckEntry::valued(
        "bmu-norm",
        &format!("bmu-norm|p={p}|{}", points_key(config)),
        Valuation::int(1),
        margin,
        format!("constant term {constant}"),
    );
    entry.pass = entry.pass && constant == expected && constant.valuation() == Valuation::int(1);
    entry
}

/// Annihilation of `λ_0^{-1}Φ` by every operator of the system on the
/// reliable window.
pub fn verify_annihilation(config: &PointConfiguration, degree: u32) -> CheckEntry {
    let phi = phi_series(config, degree);
    let ops = HypergeometricOperator::system(config);
    let bad: Vec<String> = ops
        .iter()
        .filter(|op| !apply_operator(op, config, &phi).reliably_zero())
        .map(|op| format!("{op:?}"))
        .collect();
    CheckEntry::exact(
        "annihilation",
        &format!("annihilation|{}|D={degree}", points_key(config)),
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} operators", ops.len())
        } else {
            format!("nonzero residual for {}", bad.join(", "))
        },
    )
}

/// Bounds and working precision for the operator checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OperatorParams {
    pub weight: i64,
    pub degree: u32,
    pub precision: Rational64,
    pub max_iters: usize,
}

/// `α*(ξ) = pξ` for the explicit eigenvector, within `min(K, tail)`.
pub fn verify_eigenvector(op: &DworkOperator, params: &OperatorParams) -> Result<CheckEntry> {
    let check = eigenvector_check(op, params.precision)?;
    let mut e = CheckEntry::valued(
        "eigenvector",
        &format!(
            "eigen|p={}|{}|Dx={}|Dl={}",
            op.p(),
            points_key(op.config()),
            op.weight_bound(),
            op.degree_bound()
        ),
        Valuation::Finite(check.tolerance),
        check.defect_valuation,
        format!(
            "refined tail {}, linear tail estimate {}",
            check.refined_tail, check.linear_tail
        ),
    );
    e.pass = check.passes();
    Ok(e)
}

/// β-iteration from the seed: contraction in every step after the first,
/// and agreement of the limit with `ξ/Φ`.
pub fn verify_fixed_point(op: &DworkOperator, params: &OperatorParams) -> Result<Vec<CheckEntry>> {
    let inputs = format!(
        "fixpoint|p={}|{}|Dx={}|Dl={}|K={}",
        op.p(),
        points_key(op.config()),
        op.weight_bound(),
        op.degree_bound(),
        params.precision
    );
    let run = op.iterate_to_fixed_point(&op.seed(), params.max_iters, params.precision)?;
    let gap = run
        .contraction_gap
        .map_or(Valuation::Infinite, Valuation::Finite);
    let mut contraction = CheckEntry::valued(
        "contraction",
        &inputs,
        Valuation::int(0),
        gap,
        format!(
            "{} steps, C-hat {}",
            run.steps,
            run.c_hat().map_or("n/a".to_string(), |c| format!("{c:.4}"))
        ),
    );
    contraction.pass = run.converged && gap > Valuation::int(0);
    let tail = op.tail_bound(1).refined - Rational64::from_integer(1);
    let tolerance = params.precision.min(tail);
    let normalized = normalized_eigenvector(op, params.precision)?;
    let diff = run.fixed_point.sub(&normalized)?.valuation();
    let matches = CheckEntry::valued(
        "fixed-point-vs-eigenvector",
        &inputs,
        Valuation::Finite(tolerance),
        diff,
        format!(
            "tolerance min(K, tail - 1) with tail {}",
            tail + Rational64::from_integer(1)
        ),
    );
    Ok(vec![contraction, matches])
}

/// `Φ/Φ^σ` two ways: as `p^{-1} η_{â_0}` of `α*(ξ/Φ)`, and by direct series
/// division. Agreement is required to `min(K, tail - 1)`.
pub fn verify_ratio_via_operator(
    op: &DworkOperator,
    params: &OperatorParams,
) -> Result<CheckEntry> {
    let p = op.p();
    let normalized = normalized_eigenvector(op, params.precision)?;
    let eta = op
        .alpha_star(&normalized)?
        .image
        .component_or_zero(&op.base_point());
    let inv_p = PiAdic::from_rational(p, BigRational::new(<BigInt as One>::one(), BigInt::from(p)));
    let via_operator = eta.scale(&inv_p);
    let phi = build_xi_explicit(op).component_or_zero(&op.base_point());
    let direct = phi.divide_by_unit(&phi.frobenius(p))?;
    let diff = (&via_operator - &direct).gauss_valuation(p);
    let tail = op.tail_bound(1).refined - Rational64::from_integer(1);
    Ok(CheckEntry::valued(
        "ratio-two-routes",
        &format!(
            "ratio|p={p}|{}|Dx={}|Dl={}|K={}",
            points_key(op.config()),
            op.weight_bound(),
            op.degree_bound(),
            params.precision
        ),
        Valuation::Finite(params.precision.min(tail)),
        diff,
        format!("operator route vs division, degree {}", op.degree_bound()),
    ))
}

/// `p^{-1} η_{â_0}` of `α*(seed)` reduces to `Φ₁` mod `p`.
pub fn verify_seed_eta(op: &DworkOperator) -> Result<CheckEntry> {
    let p = op.p();
    let eta = op
        .alpha_star(&op.seed())?
        .image
        .component_or_zero(&op.base_point());
    let inv_p = PiAdic::from_rational(p, BigRational::new(<BigInt as One>::one(), BigInt::from(p)));
    let phi1 =
        lift_series(&phi1_series(op.config(), p), p).polynomial_with_bound(op.degree_bound());
    let diff = &eta.scale(&inv_p) - &phi1;
    Ok(CheckEntry::valued(
        "seed-eta-mod-p",
        &format!(
            "seed-eta|p={p}|{}|Dl={}",
            points_key(op.config()),
            op.degree_bound()
        ),
        Valuation::int(1),
        diff.gauss_valuation(p),
        "p^-1 eta_a0(seed) against Phi_1".to_string(),
    ))
}

/// `|α*(ξ)| ≤ |p| |ξ|` for the seed and the explicit eigenvector.
pub fn verify_norm_bound(op: &DworkOperator) -> Result<CheckEntry> {
    let mut worst = Valuation::Infinite;
    for xi in [op.seed(), build_xi_explicit(op)] {
        let gain = op.alpha_star(&xi)?.image.valuation().minus(xi.valuation());
        worst = worst.min(gain);
    }
    Ok(CheckEntry::valued(
        "operator-norm",
        &format!(
            "norm|p={}|{}|Dx={}|Dl={}",
            op.p(),
            points_key(op.config()),
            op.weight_bound(),
            op.degree_bound()
        ),
        Valuation::int(1),
        worst,
        "valuation gain of alpha* on seed and eigenvector".to_string(),
    ))
}

/// `H = pG` coefficients `l ≤ max_l` and Boyarsky partial sums to `max_m`.
pub fn verify_gamma(p: u32, max_l: u32, max_m: u32, k: Rational64) -> Result<Vec<CheckEntry>> {
    let h = g_identity_check(p, max_l, k + Rational64::from_integer(2))?;
    let h_margin = h.iter().map(|c| c.margin()).min().unwrap();
    let b = boyarsky_check(p, max_m)?;
    let (_, last) = *b.last().unwrap();
    Ok(vec![
        CheckEntry::valued(
            "h-equals-pg",
            &format!("h|p={p}|L={max_l}"),
            Valuation::Finite(k),
            h_margin,
            format!("coefficients l = 0..={max_l}"),
        ),
        CheckEntry::valued(
            "boyarsky",
            &format!("boyarsky|p={p}|M={max_m}"),
            Valuation::int(3),
            last,
            format!("partial sum M = {max_m}"),
        ),
    ])
}

/// Integer values for `t_1..t_N`, checked modulo `p^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Specialization {
    pub p: u32,
    pub values: Vec<i64>,
    pub s: u32,
}

impl Specialization {
    pub fn new(config: &PointConfiguration, p: u32, values: Vec<i64>, s: u32) -> Result<Self> {
        if values.len() != config.num_vertices() {
            return Err(Error::InvalidConfiguration(format!(
                "specialization has {} values, configuration has {} variables",
                values.len(),
                config.num_vertices()
            )));
        }
        if s == 0 {
            return Err(Error::InvalidConfiguration(
                "modulus power must be positive".into(),
            ));
        }
        Ok(Self { p, values, s })
    }

    /// `Φ₁(values) mod p`.
    pub fn phi1_residue(&self, config: &PointConfiguration) -> u64 {
        let ring = Residues::new(self.p, 1);
        let vals: Vec<ModInt> = self
            .values
            .iter()
            .map(|&v| ModInt::new(v as i128, ring.modulus()))
            .collect();
        phi1_series(config, self.p)
            .reduce_mod(self.p, 1)
            .evaluate(&vals)
            .value()
    }

    /// The unit-value proxy for the extended domain.
    pub fn in_domain(&self, config: &PointConfiguration) -> bool {
        self.phi1_residue(config) != 0
    }
}

/// `Φ/Φ^σ` truncated at each degree in `degrees`, evaluated at the
/// specialization modulo `p^s`. For `s = 1` the values must agree with each
/// other and with `Φ₁(values)`; for `s > 1` the entry is informational.
pub fn specialize_and_check(
    config: &PointConfiguration,
    specialization: &Specialization,
    degrees: &[u32],
) -> Result<(CheckEntry, Vec<(u32, u64)>)> {
    let p = specialization.p;
    let phi1_value = specialization.phi1_residue(config);
    if phi1_value == 0 {
        return Err(Error::OutsideDomain {
            value: phi1_value,
            p,
        });
    }
    let ring = Residues::new(p, specialization.s);
    let vals: Vec<ModInt> = specialization
        .values
        .iter()
        .map(|&v| ModInt::new(v as i128, ring.modulus()))
        .collect();
    let mut residues = Vec::new();
    for &d in degrees {
        let phi = phi_series(config, d).reduce_mod(p, specialization.s);
        let ratio = phi.divide_by_unit(&phi.frobenius(p))?;
        residues.push((d, ratio.evaluate(&vals).value()));
    }
    let stable = residues.windows(2).all(|w| w[0].1 == w[1].1);
    let agrees = residues.iter().all(|(_, r)| r % p as u64 == phi1_value);
    let pass = stable && (specialization.s > 1 || agrees);
    let detail = format!(
        "residues mod {}^{}: {}; Phi_1 = {} mod {}",
        p,
        specialization.s,
        residues
            .iter()
            .map(|(d, r)| format!("D={d}:{r}"))
            .collect::<Vec<_>>()
            .join(" "),
        phi1_value,
        p
    );
    let mut entry = CheckEntry::exact(
        &format!("specialize-s{}", specialization.s),
        &format!(
            "specialize|p={p}|{}|v={:?}|s={}|D={degrees:?}",
            points_key(config),
            specialization.values,
            specialization.s
        ),
        pass,
        detail,
    );
    if specialization.s > 1 {
        entry = entry.informational();
    }
    Ok((entry, residues))
}

/// Everything `verify` runs for one configuration and prime.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerifyParams {
    pub p: u32,
    pub operator: OperatorParams,
    /// Degree for the mod-p ratio congruence and annihilation checks.
    pub series_degree: u32,
    /// Run only the mod-p congruence, without the operator (used for `p = 2`).
    pub congruence_only: bool,
}

pub fn full_report(config: &PointConfiguration, params: &VerifyParams) -> Result<CongruenceReport> {
    full_report_using(config, params, None)
}

/// As [`full_report`], reusing `op` when it was built for the same inputs.
pub fn full_report_using(
    config: &PointConfiguration,
    params: &VerifyParams,
    op: Option<&DworkOperator>,
) -> Result<CongruenceReport> {
    let mut report = CongruenceReport::default();
    report.push(gate_check(config));
    let mut ratio = verify_mod_p_ratio(config, params.p, params.series_degree);
    if params.congruence_only {
        ratio.detail.push_str("; experimental prime, unproven");
        report.push(ratio);
        return Ok(report);
    }
    report.push(ratio);
    report.push(verify_annihilation(config, params.series_degree));
    if !report.pass() {
        return Ok(report);
    }
    let o = &params.operator;
    let built;
    let op = match op {
        Some(op) => op,
        None => {
            built = DworkOperator::new(config, params.p, o.weight, o.degree)?;
            &built
        }
    };
    let margins = op.theta().bound_margins();
    let theta_ok = margins.iter().all(|m| *m >= Rational64::zero());
    report.push(CheckEntry::exact(
        "theta-bound",
        &format!("theta|p={}|I={}", params.p, op.theta().max_index()),
        theta_ok,
        format!("ord b_i >= i(p-1)/p^2 for i <= {}", op.theta().max_index()),
    ));
    report.push(verify_scaled_bmu_congruence(config, op.theta()));
    report.push(verify_bmu_norm(config, op.theta()));
    report.push(verify_seed_eta(op)?);
    report.push(verify_norm_bound(op)?);
    report.push(verify_eigenvector(op, o)?);
    report.extend(verify_fixed_point(op, o)?);
    report.push(verify_ratio_via_operator(op, o)?);
    report.extend(verify_gamma(params.p, 8, 12, Rational64::from_integer(4))?);
    Ok(report)
}
