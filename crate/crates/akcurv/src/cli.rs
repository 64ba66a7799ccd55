//! Command-line front end: verification reports and convergence tables.
//!
//! Three subcommands cover the three report sections:
//!
//! * `decompose` — curvature-operator blocks at sampled points;
//! * `verify` — integral functionals plus every identity check the
//!   entry's certified flags license, with one pass/fail line each;
//! * `converge` — Weitzenböck residuals against grid spacing with the
//!   fitted convergence order.
//!
//! Configuration comes from flags, optionally seeded by a TOML file
//! with the same keys (`--config path`); flags win over file values.
//! `verify` exits 0 exactly when every asserted check passes —
//! functionals that refuse because the entry measurably violates their
//! hypotheses are listed as refusals, not counted as failures.
//! All output is deterministic: fixed sampling seeds, sequential
//! compensated reductions, and one write at the end of the run.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::almost_kahler::{omega_chart_slots, w_quadratic_identity_residual};
use crate::catalog::{self, CatalogEntry};
use crate::error::{Error, Result};
use crate::geometry::MetricDescription;
use crate::grid::probe_form;
use crate::report::{
    convergence_report, decomposition_table, integral_report, ConvergenceReport,
    DecompositionTable, IntegralReport, ReportNumber, SCHEMA_VERSION,
};

/// Default quadrature resolutions: two levels so every published
/// number carries an error estimate.
pub const DEFAULT_RESOLUTIONS: [usize; 2] = [8, 12];

/// Default grid levels for convergence fits (at least three needed).
pub const DEFAULT_CONVERGE_RESOLUTIONS: [usize; 3] = [8, 12, 16];

/// Points sampled by the pointwise section, and the fixed RNG seed
/// that keeps reports byte-stable.
pub const DECOMPOSE_POINTS: usize = 5;
pub const DECOMPOSE_SEED: u64 = 17;

/// Named tolerances with their defaults; `--tol name=value` overrides.
///
/// * `chi_tau_shortcut` / `chi_tau_quadrature` — χ, τ against the
///   topology table (exact shortcut vs node quadrature);
/// * `identity` — relative slack for integral identities;
/// * `c1` — the two c₁² evaluations against each other;
/// * `pointwise` — pointwise residuals at sampled points;
/// * `order_lo` / `order_hi` — admissible fitted convergence order.
const TOLERANCE_DEFAULTS: &[(&str, f64)] = &[
    ("chi_tau_shortcut", 1e-10),
    ("chi_tau_quadrature", 1e-4),
    ("identity", 1e-6),
    ("c1", 1e-3),
    ("pointwise", 1e-8),
    ("order_lo", 1.8),
    ("order_hi", 2.2),
];

#[derive(Clone, Debug)]
pub struct Tolerances {
    overrides: BTreeMap<String, f64>,
}

impl Tolerances {
    pub fn new(overrides: BTreeMap<String, f64>) -> Result<Self> {
        for (name, value) in &overrides {
            if !TOLERANCE_DEFAULTS.iter().any(|(k, _)| k == name) {
                let known: Vec<&str> = TOLERANCE_DEFAULTS.iter().map(|&(k, _)| k).collect();
                return Err(Error::Config(format!(
                    "unknown tolerance '{name}' (known: {})",
                    known.join(", ")
                )));
            }
            if !(*value > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance '{name}' must be positive, got {value}"
                )));
            }
        }
        Ok(Tolerances { overrides })
    }

    pub fn get(&self, name: &str) -> f64 {
        if let Some(v) = self.overrides.get(name) {
            return *v;
        }
        TOLERANCE_DEFAULTS
            .iter()
            .find(|(k, _)| *k == name)
            .map(|&(_, v)| v)
            .unwrap_or_else(|| unreachable!("tolerance '{name}' has no default"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sections {
    Pointwise,
    Integral,
    Weitzenboeck,
    All,
}

impl Sections {
    fn wants(self, s: Sections) -> bool {
        self == Sections::All || self == s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Flags shared by every subcommand; see the module docs for the
/// file-format equivalents.
#[derive(Args, Clone, Debug, Default)]
pub struct CommonArgs {
    /// Catalog entry id (t4_flat, s4_round, s2xs2, cp2_fs,
    /// kodaira_thurston, h4_hyperbolic, ch2_chart).
    #[arg(long)]
    pub entry: Option<String>,
    /// Entry parameter, repeatable: --param r=2 --param a=1.5
    #[arg(long = "param", value_name = "K=V")]
    pub params: Vec<String>,
    /// Quadrature / grid resolutions (nodes per axis).
    #[arg(long, value_delimiter = ',', value_name = "N1,N2,...")]
    pub resolutions: Option<Vec<usize>>,
    /// Which report sections `verify` runs.
    #[arg(long, value_enum)]
    pub sections: Option<Sections>,
    /// Directory to write JSON and CSV reports into (stdout still gets
    /// the --format rendering).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Tolerance override, repeatable: --tol identity=1e-7
    #[arg(long = "tol", value_name = "NAME=VALUE")]
    pub tols: Vec<String>,
    /// Stdout rendering.
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Optional TOML config file with the same keys; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// TOML mirror of the flags.
#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FileConfig {
    entry: Option<String>,
    param: Option<BTreeMap<String, f64>>,
    resolutions: Option<Vec<usize>>,
    sections: Option<String>,
    out: Option<PathBuf>,
    tol: Option<BTreeMap<String, f64>>,
    format: Option<String>,
}

/// Fully resolved run configuration.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub entry_id: String,
    pub params: BTreeMap<String, f64>,
    pub resolutions: Vec<usize>,
    pub sections: Sections,
    pub out: Option<PathBuf>,
    pub tols: Tolerances,
    pub format: OutputFormat,
}

fn parse_kv(flag: &str, s: &str) -> Result<(String, f64)> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("--{flag} expects k=v, got '{s}'")))?;
    let value: f64 = v
        .parse()
        .map_err(|_| Error::Config(format!("--{flag} {k}: '{v}' is not a number")))?;
    Ok((k.to_owned(), value))
}

impl RunConfig {
    /// Merge the optional config file with the flags (flags win) and
    /// validate the result.
    pub fn resolve(args: &CommonArgs) -> Result<Self> {
        let file: FileConfig = match &args.config {
            Some(path) => {
                let text = fs::read_to_string(path)?;
                toml::from_str(&text)
                    .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };

        let entry_id = args
            .entry
            .clone()
            .or(file.entry)
            .ok_or_else(|| Error::Config("no entry given (--entry or config file)".into()))?;

        let mut params = file.param.unwrap_or_default();
        for kv in &args.params {
            let (k, v) = parse_kv("param", kv)?;
            params.insert(k, v);
        }

        let resolutions = args
            .resolutions
            .clone()
            .or(file.resolutions)
            .unwrap_or_else(|| DEFAULT_RESOLUTIONS.to_vec());
        if resolutions.is_empty() {
            return Err(Error::Config("at least one resolution required".into()));
        }

        let sections = match &args.sections {
            Some(s) => *s,
            None => match &file.sections {
                Some(s) => ValueEnum::from_str(s, true)
                    .map_err(|e| Error::Config(format!("sections: {e}")))?,
                None => Sections::All,
            },
        };
        let format = match &args.format {
            Some(f) => *f,
            None => match &file.format {
                Some(f) => ValueEnum::from_str(f, true)
                    .map_err(|e| Error::Config(format!("format: {e}")))?,
                None => OutputFormat::Text,
            },
        };

        let mut tols = file.tol.unwrap_or_default();
        for kv in &args.tols {
            let (k, v) = parse_kv("tol", kv)?;
            tols.insert(k, v);
        }

        Ok(RunConfig {
            entry_id,
            params,
            resolutions,
            sections,
            out: args.out.clone().or(file.out),
            tols: Tolerances::new(tols)?,
            format,
        })
    }

    fn load_entry(&self) -> Result<CatalogEntry<f64>> {
        catalog::load(&self.entry_id, &self.params)
    }

    /// Grid levels for convergence fits: the configured resolutions if
    /// they suffice for a fit, else the three-level default.
    fn converge_resolutions(&self) -> Vec<usize> {
        if self.resolutions.len() >= 3 {
            self.resolutions.clone()
        } else {
            DEFAULT_CONVERGE_RESOLUTIONS.to_vec()
        }
    }
}

/// One asserted verification check.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub tolerance: f64,
    pub detail: String,
}

/// Everything `verify` produced, serialized as the JSON document.
#[derive(Debug, Serialize)]
pub struct VerifyDocument {
    pub schema_version: u32,
    pub entry: String,
    pub pointwise: Option<DecompositionTable>,
    pub integral: Option<Vec<IntegralReport>>,
    pub weitzenboeck: Option<Vec<ConvergenceReport>>,
    pub checks: Vec<Check>,
    /// Hypothesis-violation refusals and structural exclusions; listed,
    /// never counted as failures.
    pub refusals: Vec<String>,
    pub passed: bool,
}

fn push_le(checks: &mut Vec<Check>, name: &str, measured: f64, tol: f64, detail: &str) {
    checks.push(Check {
        name: name.to_owned(),
        passed: measured <= tol,
        measured,
        tolerance: tol,
        detail: detail.to_owned(),
    });
}

/// Slack checks: `measured ≥ −tol` (inequalities that may sit at the
/// boundary within quadrature error).
fn push_ge(checks: &mut Vec<Check>, name: &str, measured: f64, tol: f64, detail: &str) {
    checks.push(Check {
        name: name.to_owned(),
        passed: measured >= -tol,
        measured,
        tolerance: tol,
        detail: detail.to_owned(),
    });
}

fn value_of(n: &Option<ReportNumber>) -> Option<f64> {
    n.as_ref().map(|x| x.value)
}

fn pointwise_checks(
    entry: &CatalogEntry<f64>,
    table: &DecompositionTable,
    tols: &Tolerances,
    checks: &mut Vec<Check>,
) -> Result<()> {
    let tol = tols.get("pointwise");
    let max = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0_f64, f64::max);

    let dev = max(&mut table.rows.iter().map(|r| (r.s - entry.known_s).abs()));
    push_le(
        checks,
        "pointwise-scalar-curvature",
        dev,
        tol.max(1e-8 * entry.known_s.abs()),
        "max |s − reference| over sampled points",
    );
    if entry.flags.einstein {
        let dev = max(&mut table.rows.iter().map(|r| r.ric0_norm2));
        push_le(
            checks,
            "pointwise-einstein",
            dev,
            tol,
            "max |ric₀|² over sampled points",
        );
    }
    if entry.flags.self_dual {
        let dev = max(&mut table.rows.iter().map(|r| r.wminus_norm2));
        push_le(
            checks,
            "pointwise-self-dual",
            dev,
            tol,
            "max |W₋|² over sampled points",
        );
    }
    if let Some(j) = &entry.j {
        if let Some(known) = entry.known_s_star {
            let dev = max(&mut table.rows.iter().map(|r| (r.s_star.unwrap() - known).abs()));
            push_le(
                checks,
                "pointwise-star-scalar",
                dev,
                tol,
                "max |s* − reference| over sampled points",
            );
        }
        let mut dev = 0.0_f64;
        for row in &table.rows {
            let r = w_quadratic_identity_residual(&entry.desc, j, &row.point)?;
            dev = dev.max(r);
        }
        push_le(
            checks,
            "pointwise-quadratic-identity",
            dev,
            tol,
            "max |W₊(ω,ω) − (s*/2 − s/6)| over sampled points",
        );
        if entry.flags.kahler {
            let dev = max(&mut table.rows.iter().map(|r| r.nabla_omega_norm2.unwrap()));
            push_le(
                checks,
                "pointwise-parallel-omega",
                dev,
                tol,
                "max |∇ω|² over sampled points",
            );
        }
    }
    Ok(())
}

fn integral_checks(
    entry: &CatalogEntry<f64>,
    reports: &[IntegralReport],
    tols: &Tolerances,
    checks: &mut Vec<Check>,
    refusals: &mut Vec<String>,
) {
    let last = reports.last().expect("at least one report");
    refusals.extend(last.refusals.iter().cloned());
    let topo_tol = if last.resolution == 0 {
        tols.get("chi_tau_shortcut")
    } else {
        tols.get("chi_tau_quadrature")
    };
    let identity = tols.get("identity");

    if let Some(t) = &entry.topology {
        push_le(
            checks,
            "integral-chi",
            (last.chi.value - t.chi as f64).abs(),
            topo_tol,
            "χ quadrature against the topology table",
        );
        push_le(
            checks,
            "integral-tau",
            (last.tau.value - t.tau as f64).abs(),
            topo_tol,
            "τ quadrature against the topology table",
        );
    }
    if entry.flags.kahler && entry.flags.einstein {
        if let (Some(t), Some(b)) = (
            value_of(&last.c1_squared_topological),
            value_of(&last.c1_squared_blair),
        ) {
            push_le(
                checks,
                "integral-c1-squared",
                (b - t).abs(),
                tols.get("c1"),
                "Blair-curvature c₁² against 2χ + 3τ",
            );
        }
    }
    if entry.flags.delta_wplus_zero.is_some() {
        if let (Some(lhs), Some(rhs)) = (value_of(&last.prop1_lhs), value_of(&last.prop1_rhs)) {
            push_le(
                checks,
                "integral-prop1",
                (lhs - rhs).abs(),
                identity * lhs.abs().max(1.0),
                "∫s·W₊(ω,ω) against 8∫(|W₊|² − ½|W₊(ω)^⊥|²)",
            );
        }
        if let Some(v) = value_of(&last.prop2_value) {
            push_ge(
                checks,
                "integral-prop2",
                -v,
                identity,
                "∫W₊(ω,ω)(W₊(ω,ω) − s/3) ≤ 0 under certified δW₊ = 0",
            );
        }
        push_ge(
            checks,
            "integral-thm3-gap",
            last.thm3_gap.value,
            identity,
            "∫s²/24 ≥ ∫|W₊|² under certified δW₊ = 0",
        );
    }
    if entry.flags.einstein {
        if let (Some(lhs), Some(rhs)) = (value_of(&last.cor3_lhs), value_of(&last.cor3_rhs)) {
            push_le(
                checks,
                "integral-cor3",
                (lhs - rhs).abs(),
                identity * lhs.abs().max(1.0),
                "∫(ss*/8 − s²/24) against ∫(2|W₊|² − |W₊(ω)^⊥|²)",
            );
        }
    }
    if entry.j.is_some() {
        if let Some(slack) = value_of(&last.lebrun_wplus_vs_topology) {
            push_ge(
                checks,
                "integral-lebrun",
                slack,
                identity,
                "∫|W₊|² ≥ (4π²/3)(2χ+3τ) for almost-complex entries",
            );
        }
    }
}

fn weitzenboeck_section(
    entry: &CatalogEntry<f64>,
    cfg: &RunConfig,
    checks: &mut Vec<Check>,
    refusals: &mut Vec<String>,
) -> Result<Option<Vec<ConvergenceReport>>> {
    if matches!(entry.desc, MetricDescription::Frame { .. }) {
        refusals.push(format!(
            "weitzenboeck: {} is frame-presented; the identity is checked pointwise, \
             no grid discretization applies",
            entry.label()
        ));
        return Ok(None);
    }
    let levels = cfg.converge_resolutions();
    let (lo, hi) = (cfg.tols.get("order_lo"), cfg.tols.get("order_hi"));
    let mut out = Vec::new();

    // Both probe fields are smooth on the whole band of every catalog
    // chart, so an evaluation failure is a bug, not a data condition.
    let bump_desc = entry.desc.clone();
    let probe = move |x: &[f64; 4]| {
        probe_form(&bump_desc, x).expect("probe evaluation failed on chart band")
    };
    let rep = convergence_report(entry, "bump", &probe, &levels)?;
    order_check(&rep, lo, hi, checks);
    out.push(rep);

    if let Some(j) = &entry.j {
        let desc = entry.desc.clone();
        let j = j.clone();
        let omega = move |x: &[f64; 4]| {
            omega_chart_slots(&desc, &j, x).expect("ω evaluation failed on chart band")
        };
        let rep = convergence_report(entry, "omega", &omega, &levels)?;
        order_check(&rep, lo, hi, checks);
        out.push(rep);
    }
    Ok(Some(out))
}

fn order_check(rep: &ConvergenceReport, lo: f64, hi: f64, checks: &mut Vec<Check>) {
    let name = format!("weitzenboeck-order-{}", rep.field);
    match (rep.exact, rep.fitted_order) {
        (true, _) => checks.push(Check {
            name,
            passed: true,
            measured: 0.0,
            tolerance: hi,
            detail: "residuals at the rounding floor (exact)".to_owned(),
        }),
        (false, Some(order)) => checks.push(Check {
            name,
            passed: (lo..=hi).contains(&order),
            measured: order,
            tolerance: hi,
            detail: format!("fitted convergence order within [{lo}, {hi}]"),
        }),
        (false, None) => unreachable!("non-exact report always carries a fit"),
    }
}

/// Run every requested section and assemble the verdict.
pub fn cmd_verify(cfg: &RunConfig) -> Result<VerifyDocument> {
    let entry = cfg.load_entry()?;
    let mut checks = Vec::new();
    let mut refusals = Vec::new();

    let pointwise = if cfg.sections.wants(Sections::Pointwise) {
        let table = decomposition_table(&entry, DECOMPOSE_POINTS, DECOMPOSE_SEED)?;
        pointwise_checks(&entry, &table, &cfg.tols, &mut checks)?;
        Some(table)
    } else {
        None
    };

    let integral = if cfg.sections.wants(Sections::Integral) {
        if entry.pointwise_only() {
            refusals.push(format!(
                "integral: {} is noncompact; integral functionals are not defined for it",
                entry.label()
            ));
            None
        } else {
            let reports = integral_report(&entry, &cfg.resolutions)?;
            integral_checks(&entry, &reports, &cfg.tols, &mut checks, &mut refusals);
            Some(reports)
        }
    } else {
        None
    };

    let weitzenboeck = if cfg.sections.wants(Sections::Weitzenboeck) {
        weitzenboeck_section(&entry, cfg, &mut checks, &mut refusals)?
    } else {
        None
    };

    let passed = checks.iter().all(|c| c.passed);
    Ok(VerifyDocument {
        schema_version: SCHEMA_VERSION,
        entry: entry.label(),
        pointwise,
        integral,
        weitzenboeck,
        checks,
        refusals,
        passed,
    })
}

/// Curvature-block table at sampled points.
pub fn cmd_decompose(cfg: &RunConfig) -> Result<DecompositionTable> {
    let entry = cfg.load_entry()?;
    decomposition_table(&entry, DECOMPOSE_POINTS, DECOMPOSE_SEED)
}

/// Convergence study of the discretized Weitzenböck identity.
pub fn cmd_converge(cfg: &RunConfig) -> Result<Vec<ConvergenceReport>> {
    let entry = cfg.load_entry()?;
    let levels = cfg.converge_resolutions();
    if matches!(entry.desc, MetricDescription::Frame { .. }) {
        return Err(Error::PointwiseOnly {
            entry: entry.label(),
        });
    }
    let mut out = Vec::new();
    let bump_desc = entry.desc.clone();
    let probe = move |x: &[f64; 4]| {
        probe_form(&bump_desc, x).expect("probe evaluation failed on chart band")
    };
    out.push(convergence_report(&entry, "bump", &probe, &levels)?);
    if let Some(j) = &entry.j {
        let desc = entry.desc.clone();
        let j = j.clone();
        let omega = move |x: &[f64; 4]| {
            omega_chart_slots(&desc, &j, x).expect("ω evaluation failed on chart band")
        };
        out.push(convergence_report(&entry, "omega", &omega, &levels)?);
    }
    Ok(out)
}

// ---------------------------------------------------------------------
// rendering and output plumbing

fn render_number(label: &str, n: &ReportNumber) -> String {
    let err = n
        .error
        .map_or(String::new(), |e| format!(" ± {e:.3e}"));
    format!("  {label:<28} {:>18.12}{err}  [{}]\n", n.value, n.provenance)
}

fn render_report_text(r: &IntegralReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "integral report (resolution {})", r.resolution);
    s.push_str(&render_number("chi", &r.chi));
    s.push_str(&render_number("tau", &r.tau));
    for (label, field) in [
        ("c1_dot_omega", &r.c1_dot_omega),
        ("c1_squared_topological", &r.c1_squared_topological),
        ("c1_squared_blair", &r.c1_squared_blair),
        ("prop1_lhs", &r.prop1_lhs),
        ("prop1_rhs", &r.prop1_rhs),
        ("prop2_value", &r.prop2_value),
    ] {
        if let Some(n) = field {
            s.push_str(&render_number(label, n));
        }
    }
    s.push_str(&render_number("thm3_gap", &r.thm3_gap));
    for (label, field) in [
        ("cor3_lhs", &r.cor3_lhs),
        ("cor3_rhs", &r.cor3_rhs),
        ("lebrun_wplus_vs_topology", &r.lebrun_wplus_vs_topology),
    ] {
        if let Some(n) = field {
            s.push_str(&render_number(label, n));
        }
    }
    s
}

fn render_decomposition_text(t: &DecompositionTable) -> String {
    let mut s = format!("entry {}\n", t.entry);
    for r in &t.rows {
        let _ = writeln!(
            s,
            "  x = [{:+.4}, {:+.4}, {:+.4}, {:+.4}]",
            r.point[0], r.point[1], r.point[2], r.point[3]
        );
        let _ = writeln!(
            s,
            "    s = {:.9}   W₊ spectrum = [{:.9}, {:.9}, {:.9}]",
            r.s, r.wplus_eigenvalues[0], r.wplus_eigenvalues[1], r.wplus_eigenvalues[2]
        );
        let _ = writeln!(
            s,
            "    |ric₀|² = {:.3e}   |W₋|² = {:.3e}",
            r.ric0_norm2, r.wminus_norm2
        );
        if let (Some(ss), Some(no)) = (r.s_star, r.nabla_omega_norm2) {
            let _ = writeln!(s, "    s* = {ss:.9}   |∇ω|² = {no:.3e}");
        }
    }
    s
}

fn render_convergence_text(reports: &[ConvergenceReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(s, "entry {}  field {}", r.entry, r.field);
        let _ = writeln!(s, "  {:>6} {:>14} {:>14}", "n", "h", "residual");
        for l in &r.levels {
            let _ = writeln!(s, "  {:>6} {:>14.6e} {:>14.6e}", l.resolution, l.h, l.residual);
        }
        match (r.exact, r.fitted_order) {
            (true, _) => {
                let _ = writeln!(s, "  order: exact (residuals at rounding floor)");
            }
            (_, Some(o)) => {
                let _ = writeln!(s, "  order: {o:.3}");
            }
            _ => {}
        }
    }
    s
}

fn render_verify_text(doc: &VerifyDocument) -> String {
    let mut s = format!("entry {}\n", doc.entry);
    if let Some(t) = &doc.pointwise {
        s.push_str(&render_decomposition_text(t));
    }
    if let Some(reports) = &doc.integral {
        for r in reports {
            s.push_str(&render_report_text(r));
        }
    }
    if let Some(reports) = &doc.weitzenboeck {
        s.push_str(&render_convergence_text(reports));
    }
    s.push_str("checks:\n");
    for c in &doc.checks {
        let _ = writeln!(
            s,
            "  {} {:<32} measured {:.6e} vs {:.1e}  ({})",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.measured,
            c.tolerance,
            c.detail
        );
    }
    for r in &doc.refusals {
        let _ = writeln!(s, "  REFUSED {r}");
    }
    let _ = writeln!(
        s,
        "verdict: {} ({} checks, {} failed, {} refused)",
        if doc.passed { "PASS" } else { "FAIL" },
        doc.checks.len(),
        doc.checks.iter().filter(|c| !c.passed).count(),
        doc.refusals.len()
    );
    s
}

fn verify_csv(doc: &VerifyDocument) -> String {
    let mut s = format!("{}\n", IntegralReport::csv_header());
    if let Some(reports) = &doc.integral {
        for r in reports {
            s.push_str(&r.csv_row());
            s.push('\n');
        }
    }
    s
}

fn decompose_csv(t: &DecompositionTable) -> String {
    format!("{}\n{}", DecompositionTable::csv_header(), t.csv_rows())
}

fn converge_csv(reports: &[ConvergenceReport]) -> String {
    let mut s = format!("{}\n", ConvergenceReport::csv_header());
    for r in reports {
        s.push_str(&r.csv_rows());
    }
    s
}

/// Write `<kind>_<entry-id>.json` and `.csv` into the output directory.
fn write_outputs(dir: &Path, kind: &str, id: &str, json: &str, csv: &str) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(format!("{kind}_{id}.json")), json)?;
    fs::write(dir.join(format!("{kind}_{id}.csv")), csv)?;
    Ok(())
}

fn emit(cfg: &RunConfig, kind: &str, json: String, csv: String, text: String) -> Result<()> {
    match cfg.format {
        OutputFormat::Json => println!("{json}"),
        OutputFormat::Csv => print!("{csv}"),
        OutputFormat::Text => print!("{text}"),
    }
    if let Some(dir) = &cfg.out {
        write_outputs(dir, kind, &cfg.entry_id, &json, &csv)?;
    }
    Ok(())
}

#[derive(Parser, Debug)]
#[command(
    name = "akcurv",
    version,
    about = "Curvature laboratory for oriented Riemannian and almost-Kähler 4-manifolds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Curvature-operator block decomposition at sampled points.
    Decompose(CommonArgs),
    /// Integral functionals and identity checks; exit 0 iff every
    /// asserted check passes (refusals are listed, not failed).
    Verify(CommonArgs),
    /// Weitzenböck residuals against resolution with a fitted order.
    Converge(CommonArgs),
}

/// Execute the parsed command line; the returned code is the process
/// exit status (0 ok / all checks passed, 1 checks failed).
pub fn run(cli: Cli) -> Result<i32> {
    match &cli.command {
        Command::Decompose(args) => {
            let cfg = RunConfig::resolve(args)?;
            let table = cmd_decompose(&cfg)?;
            let json = serde_json::to_string_pretty(&table).expect("serializable");
            emit(
                &cfg,
                "decompose",
                json,
                decompose_csv(&table),
                render_decomposition_text(&table),
            )?;
            Ok(0)
        }
        Command::Verify(args) => {
            let cfg = RunConfig::resolve(args)?;
            let doc = cmd_verify(&cfg)?;
            let json = serde_json::to_string_pretty(&doc).expect("serializable");
            emit(&cfg, "verify", json, verify_csv(&doc), render_verify_text(&doc))?;
            Ok(if doc.passed { 0 } else { 1 })
        }
        Command::Converge(args) => {
            let cfg = RunConfig::resolve(args)?;
            let reports = cmd_converge(&cfg)?;
            let json = serde_json::to_string_pretty(&reports).expect("serializable");
            emit(
                &cfg,
                "converge",
                json,
                converge_csv(&reports),
                render_convergence_text(&reports),
            )?;
            Ok(0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(entry: &str) -> CommonArgs {
        CommonArgs {
            entry: Some(entry.to_owned()),
            ..Default::default()
        }
    }

    #[test]
    fn config_file_merges_and_flags_win() {
        let dir = std::env::temp_dir().join("akcurv-cli-test");
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("cfg.toml");
        fs::write(
            &path,
            "entry = \"s2xs2\"\nresolutions = [6]\nformat = \"json\"\n\
             [param]\na = 1.0\nb = 2.0\n[tol]\nidentity = 1e-7\n",
        )
        .unwrap();
        let mut a = CommonArgs {
            config: Some(path.clone()),
            ..Default::default()
        };
        let cfg = RunConfig::resolve(&a).unwrap();
        assert_eq!(cfg.entry_id, "s2xs2");
        assert_eq!(cfg.resolutions, vec![6]);
        assert_eq!(cfg.format, OutputFormat::Json);
        assert_eq!(cfg.params.get("b"), Some(&2.0));
        assert_eq!(cfg.tols.get("identity"), 1e-7);
        // Flags override the file per key.
        a.params = vec!["b=3".to_owned()];
        a.format = Some(OutputFormat::Csv);
        let cfg = RunConfig::resolve(&a).unwrap();
        assert_eq!(cfg.params.get("b"), Some(&3.0));
        assert_eq!(cfg.params.get("a"), Some(&1.0));
        assert_eq!(cfg.format, OutputFormat::Csv);
        fs::remove_file(&path).ok();
    }

    #[test]
    fn bad_configuration_is_rejected() {
        let mut a = CommonArgs::default();
        assert!(matches!(RunConfig::resolve(&a), Err(Error::Config(_))));
        a.entry = Some("t4_flat".into());
        a.tols = vec!["no_such_tol=1".to_owned()];
        assert!(matches!(RunConfig::resolve(&a), Err(Error::Config(_))));
        a.tols = vec!["identity=-1".to_owned()];
        assert!(matches!(RunConfig::resolve(&a), Err(Error::Config(_))));
        a.tols = vec![];
        a.resolutions = Some(vec![]);
        assert!(matches!(RunConfig::resolve(&a), Err(Error::Config(_))));
        a.resolutions = None;
        a.params = vec!["r".to_owned()];
        assert!(matches!(RunConfig::resolve(&a), Err(Error::Config(_))));
    }

    #[test]
    fn verify_flat_torus_passes_everything() {
        let mut a = args("t4_flat");
        a.resolutions = Some(vec![6, 8]);
        let cfg = RunConfig::resolve(&a).unwrap();
        let doc = cmd_verify(&cfg).unwrap();
        assert!(doc.passed, "checks: {:#?}", doc.checks);
        assert!(doc.refusals.is_empty());
        // All three sections ran and every licensed check appears.
        assert!(doc.pointwise.is_some());
        assert!(doc.integral.is_some());
        assert!(doc.weitzenboeck.is_some());
        let names: Vec<&str> = doc.checks.iter().map(|c| c.name.as_str()).collect();
        for want in [
            "pointwise-scalar-curvature",
            "integral-chi",
            "integral-prop1",
            "integral-cor3",
            "weitzenboeck-order-bump",
            "weitzenboeck-order-omega",
        ] {
            assert!(names.contains(&want), "missing {want} in {names:?}");
        }
    }

    #[test]
    fn verify_nilmanifold_is_observational_but_green() {
        let mut a = args("kodaira_thurston");
        a.sections = Some(Sections::All);
        let cfg = RunConfig::resolve(&a).unwrap();
        let doc = cmd_verify(&cfg).unwrap();
        assert!(doc.passed, "checks: {:#?}", doc.checks);
        // Non-Einstein: the Einstein-only identity is refused; the
        // frame presentation excludes the grid section.
        assert_eq!(doc.refusals.len(), 2, "{:?}", doc.refusals);
        assert!(doc.refusals.iter().any(|r| r.contains("Einstein")));
        assert!(doc.refusals.iter().any(|r| r.contains("frame-presented")));
        assert!(doc.weitzenboeck.is_none());
        // No δW₊ certificate ⇒ those identities are reported, not
        // asserted.
        assert!(!doc.checks.iter().any(|c| c.name.starts_with("integral-prop")));
        let report = &doc.integral.as_ref().unwrap()[0];
        assert_eq!(report.resolution, 0);
        assert!(report.prop2_value.is_some());
    }

    #[test]
    fn verify_noncompact_entry_refuses_integrals_only() {
        let mut a = args("ch2_chart");
        a.resolutions = Some(vec![8, 10, 12]);
        let cfg = RunConfig::resolve(&a).unwrap();
        let doc = cmd_verify(&cfg).unwrap();
        assert!(doc.passed, "checks: {:#?}", doc.checks);
        assert!(doc.integral.is_none());
        assert!(doc.refusals.iter().any(|r| r.contains("noncompact")));
        // Pointwise and grid sections still run on the chart band.
        assert!(doc.pointwise.is_some());
        assert!(doc.weitzenboeck.is_some());
    }

    #[test]
    fn converge_reports_bump_order_and_exact_omega() {
        let mut a = args("t4_flat");
        a.resolutions = Some(vec![8, 12, 16]);
        let cfg = RunConfig::resolve(&a).unwrap();
        let reports = cmd_converge(&cfg).unwrap();
        assert_eq!(reports.len(), 2);
        let bump = &reports[0];
        assert_eq!(bump.field, "bump");
        let order = bump.fitted_order.unwrap();
        assert!((1.8..=2.2).contains(&order), "{order}");
        // Constant ω on the flat torus sits at the rounding floor.
        let omega = &reports[1];
        assert_eq!(omega.field, "omega");
        assert!(omega.exact);
    }

    #[test]
    fn decompose_matches_spectrum_oracle() {
        let cfg = RunConfig::resolve(&args("cp2_fs")).unwrap();
        let table = cmd_decompose(&cfg).unwrap();
        assert_eq!(table.rows.len(), DECOMPOSE_POINTS);
        for r in &table.rows {
            assert!((r.wplus_eigenvalues[0] - 4.0).abs() < 1e-7);
        }
        let text = render_decomposition_text(&table);
        assert!(text.contains("W₊ spectrum"));
        let csv = decompose_csv(&table);
        assert_eq!(csv.lines().count(), 1 + DECOMPOSE_POINTS);
    }
}
