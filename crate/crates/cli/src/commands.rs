use std::fmt::Write as _;

use ahyper_core::dwork::eigen::build_xi_explicit;
use ahyper_core::dwork::kernel::{bmu_polynomial, lift_solver};
use ahyper_core::dwork::{DworkOperator, ThetaTable};
use ahyper_core::hypergeom::{phi1_series, phi_series};
use ahyper_core::lattice::unique_interior_gate;
use ahyper_core::verify::{
    full_report_using, gate_check, specialize_and_check, verify_eigenvector,
    verify_ratio_via_operator, CongruenceReport, OperatorParams, Specialization, VerifyParams,
};
use ahyper_core::{Error, PointConfiguration};
use anyhow::{anyhow, bail, Context, Result};

use crate::cache::{build_operator, Cache};
use crate::config::{ProblemConfig, ReportFormat};
use crate::{Cli, Command};

pub struct Outcome {
    pub output: String,
    pub pass: bool,
}

impl Outcome {
    fn ok(output: String) -> Self {
        Self { output, pass: true }
    }
}

fn tuple(v: &[i64]) -> String {
    format!(
        "({})",
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(",")
    )
}

fn parse_list(flag: &str, text: Option<&str>) -> Result<Vec<i64>> {
    let text = text.ok_or_else(|| anyhow!("--{flag} is required for this command"))?;
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .with_context(|| format!("--{flag}: bad integer {x:?}"))
        })
        .collect()
}

fn render(report: &CongruenceReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Text => report.render_text(),
        ReportFormat::Structured => report.render_structured(),
    }
}

struct Session {
    config: ProblemConfig,
    points: PointConfiguration,
    cache: Option<Cache>,
    format: ReportFormat,
}

impl Session {
    fn operator(&self) -> Result<DworkOperator> {
        build_operator(&self.config, self.cache.as_ref())
    }

    fn operator_params(&self, iters: usize) -> OperatorParams {
        OperatorParams {
            weight: self.config.weight,
            degree: self.config.degree,
            precision: self.config.precision,
            max_iters: iters,
        }
    }

    /// `Some(outcome)` with a failing gate entry when the gate does not pass.
    fn gate_failure(&self) -> Option<Outcome> {
        let entry = gate_check(&self.points);
        if entry.pass {
            return None;
        }
        let mut report = CongruenceReport::default();
        report.push(entry);
        Some(Outcome {
            output: render(&report, self.format),
            pass: false,
        })
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let text = std::fs::read_to_string(&cli.config)
        .with_context(|| format!("reading {}", cli.config.display()))?;
    let mut config = ProblemConfig::parse_with(&text, cli.allow_p2)?;
    if let Some(d) = cli.degree {
        if cli.command != Command::BTable {
            config.degree = d;
        }
    }
    if let Some(w) = cli.weight {
        if w < 1 {
            bail!("--weight must be positive");
        }
        config.weight = w;
    }
    let points = config.point_configuration()?;
    let ctx = Session {
        cache: Cache::resolve(cli.cache_dir.as_deref(), &config),
        format: cli.format.map(Into::into).unwrap_or(config.report_format),
        points,
        config,
    };
    let experimental = ctx.config.p == 2;
    if experimental
        && !matches!(
            cli.command,
            Command::CheckGate | Command::Phi | Command::Phi1 | Command::Verify
        )
    {
        bail!("p = 2 supports only check-gate, phi, phi1 and verify");
    }
    match cli.command {
        Command::CheckGate => check_gate(&ctx),
        Command::Phi => Ok(Outcome::ok(format!(
            "{}\n",
            phi_series(&ctx.points, ctx.config.degree)
        ))),
        Command::Phi1 => Ok(Outcome::ok(format!(
            "{}\n",
            phi1_series(&ctx.points, ctx.config.p)
        ))),
        Command::BTable => b_table(&ctx, cli.degree),
        Command::Bmu => bmu(&ctx, cli.mu.as_deref()),
        Command::Alpha => alpha(&ctx),
        Command::Fixpoint => fixpoint(&ctx, cli.iters),
        Command::Eigen => eigen(&ctx, cli.iters),
        Command::Verify => verify(&ctx, cli.iters, false),
        Command::Report => verify(&ctx, cli.iters, true),
        Command::Specialize => specialize(&ctx, cli.values.as_deref(), cli.modulus_power),
    }
}

fn check_gate(ctx: &Session) -> Result<Outcome> {
    match unique_interior_gate(&ctx.points) {
        Ok(a) => Ok(Outcome::ok(format!(
            "interior point: {}\ngate: PASS\n",
            tuple(&a)
        ))),
        Err(Error::GateFailure { expected, found }) => {
            let found: Vec<String> = found.iter().map(|v| tuple(v)).collect();
            Ok(Outcome {
                output: format!(
                    "expected interior point: {}\ninterior points found: [{}]\ngate: FAIL\n",
                    tuple(&expected),
                    found.join(", ")
                ),
                pass: false,
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn b_table(ctx: &Session, max_index: Option<u32>) -> Result<Outcome> {
    let p = ctx.config.p;
    let theta = match max_index {
        Some(i) => ThetaTable::new(p, i as usize)?,
        None => ctx.operator()?.theta().clone(),
    };
    let margins = theta.bound_margins();
    let mut out = format!("{:>4}  {:>6}  {:>8}  b_i\n", "i", "ord_pi", "margin");
    for (i, m) in margins.iter().enumerate() {
        writeln!(
            out,
            "{:>4}  {:>6}  {:>8}  {}",
            i,
            theta.pi_order(i),
            m.to_string(),
            theta.get(i)
        )
        .unwrap();
    }
    let pass = margins
        .iter()
        .all(|m| *m >= num_rational::Rational64::from_integer(0));
    Ok(Outcome { output: out, pass })
}

fn bmu(ctx: &Session, mu: Option<&str>) -> Result<Outcome> {
    let mu = parse_list("mu", mu)?;
    if mu.len() != ctx.config.n + 1 {
        bail!(
            "--mu needs {} entries (weight first), got {}",
            ctx.config.n + 1,
            mu.len()
        );
    }
    let theta_len = (ctx.config.p as i64 * mu[0].max(1)) as usize;
    let theta = ThetaTable::new(ctx.config.p, theta_len)?;
    let b = bmu_polynomial(&ctx.points, &lift_solver(&ctx.points), &mu, &theta);
    Ok(Outcome::ok(format!(
        "mu = {}\nsolutions = {}\nvaluation = {}\nmargin over the linear bound = {}\nB = {}\n",
        tuple(&mu),
        b.solutions,
        b.poly.gauss_valuation(ctx.config.p),
        b.bound_margin(),
        b.poly
    )))
}

fn alpha(ctx: &Session) -> Result<Outcome> {
    if let Some(o) = ctx.gate_failure() {
        return Ok(o);
    }
    let op = ctx.operator()?;
    let image = op.alpha_star(&op.seed())?;
    let mut out = String::new();
    for t in &image.tails {
        writeln!(
            out,
            "tail weight={} refined={} linear={}",
            t.weight, t.refined, t.linear
        )
        .unwrap();
    }
    writeln!(out, "valuation {}", image.image.valuation()).unwrap();
    out.push_str(&image.image.to_text());
    Ok(Outcome::ok(out))
}

fn fixpoint(ctx: &Session, iters: usize) -> Result<Outcome> {
    if let Some(o) = ctx.gate_failure() {
        return Ok(o);
    }
    let op = ctx.operator()?;
    match op.iterate_to_fixed_point(&op.seed(), iters, ctx.config.precision) {
        Ok(run) => {
            let mut out = run.decay_table();
            let c_hat = run.c_hat().map_or("n/a".to_string(), |c| format!("{c:.6}"));
            writeln!(
                out,
                "converged = {}\nsteps = {}\nC-hat = {}",
                run.converged, run.steps, c_hat
            )
            .unwrap();
            out.push_str(&run.fixed_point.to_text());
            Ok(Outcome {
                output: out,
                pass: run.converged,
            })
        }
        Err(e @ Error::NonContraction { .. }) => Ok(Outcome {
            output: format!("contraction alarm: {e}\n"),
            pass: false,
        }),
        Err(e) => Err(e.into()),
    }
}

fn eigen(ctx: &Session, iters: usize) -> Result<Outcome> {
    if let Some(o) = ctx.gate_failure() {
        return Ok(o);
    }
    let op = ctx.operator()?;
    let params = ctx.operator_params(iters);
    let mut report = CongruenceReport::default();
    report.push(verify_eigenvector(&op, &params)?);
    report.push(verify_ratio_via_operator(&op, &params)?);
    let mut out = render(&report, ctx.format);
    if ctx.format == ReportFormat::Text {
        out.push_str(&build_xi_explicit(&op).to_text());
    }
    Ok(Outcome {
        output: out,
        pass: report.pass(),
    })
}

fn verify(ctx: &Session, iters: usize, detailed: bool) -> Result<Outcome> {
    let params = VerifyParams {
        p: ctx.config.p,
        operator: ctx.operator_params(iters),
        series_degree: ctx.config.degree,
        congruence_only: ctx.config.p == 2,
    };
    let op = if !params.congruence_only && gate_check(&ctx.points).pass {
        Some(ctx.operator()?)
    } else {
        None
    };
    let report = full_report_using(&ctx.points, &params, op.as_ref())?;
    let mut out = render(&report, ctx.format);
    if detailed
        && ctx.format == ReportFormat::Text
        && report.entries.iter().any(|e| e.name == "contraction")
    {
        let op = op.as_ref().expect("operator checks ran");
        out.push_str("\nconfiguration\n");
        out.push_str(&ctx.config.to_text());
        out.push_str("\ntail bounds\n");
        for t in op.tail_bounds() {
            writeln!(
                out,
                "weight={} refined={} linear={}",
                t.weight, t.refined, t.linear
            )
            .unwrap();
        }
        let run = op.iterate_to_fixed_point(&op.seed(), iters, ctx.config.precision)?;
        out.push_str("\ndecay\n");
        out.push_str(&run.decay_table());
    }
    Ok(Outcome {
        output: out,
        pass: report.pass(),
    })
}

fn specialize(ctx: &Session, values: Option<&str>, s: u32) -> Result<Outcome> {
    if let Some(o) = ctx.gate_failure() {
        return Ok(o);
    }
    let values = parse_list("values", values)?;
    let specialization = Specialization::new(&ctx.points, ctx.config.p, values, s)?;
    let d = ctx.config.degree;
    match specialize_and_check(&ctx.points, &specialization, &[d, 2 * d, 3 * d]) {
        Ok((entry, _)) => {
            let pass = entry.pass || entry.informational;
            let mut report = CongruenceReport::default();
            report.push(entry);
            Ok(Outcome {
                output: render(&report, ctx.format),
                pass,
            })
        }
        Err(Error::OutsideDomain { p, .. }) => Ok(Outcome {
            output: format!(
                "rejected: Phi_1 at {:?} is divisible by {p}, outside the unit domain\n",
                specialization.values
            ),
            pass: false,
        }),
        Err(e) => Err(e.into()),
    }
}
