//! Serializable verification reports.
//!
//! Three report shapes cover the three CLI sections:
//!
//! * [`DecompositionTable`] — pointwise curvature-operator blocks at
//!   sampled points (spectrum of W₊, s, |ric₀|², |W₋|², and the
//!   almost-Kähler witnesses s*, |∇ω|² when a J is present);
//! * [`IntegralReport`] — every integral functional of a compact entry
//!   at one quadrature resolution, with per-field error estimates;
//! * [`ConvergenceReport`] — Weitzenböck residuals against grid
//!   spacing with the fitted convergence order.
//!
//! Every number is recorded as an `f64` with a provenance tag saying
//! whether it came from the exact homogeneous shortcut, a node
//! quadrature (and at which resolution), or the entry's topology
//! table.  Error estimates are resolution-to-resolution differences:
//! the field's value at the previous resolution subtracted from its
//! value at the current one, in absolute value.  Reports built twice
//! from the same configuration are byte-identical (sequential
//! compensated reductions, fixed sampling seeds), so they double as
//! regression fixtures.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::almost_kahler::ak_point;
use crate::catalog::{CatalogEntry, SchemeSpec};
use crate::error::{Error, Result};
use crate::functionals::{homogeneous_scheme, integrate_all, scheme_for, QuadratureScheme};
use crate::geometry::{decompose, riemann};
use crate::grid::{fitted_order, weitzenboeck_probe};
use crate::real::Real;

/// Bumped whenever a serialized field changes meaning or name.
pub const SCHEMA_VERSION: u32 = 1;

/// Residual level below which a convergence study reports "exact"
/// instead of a fitted order: discretization error has reached the
/// rounding floor and log–log slopes carry no information there.
pub const EXACT_FLOOR: f64 = 1e-10;

/// One reported real number with its provenance and, when it came from
/// a node quadrature with a predecessor, an error estimate.
#[derive(Clone, Debug, Serialize)]
pub struct ReportNumber {
    pub value: f64,
    /// |value − value at the previous resolution|; `None` at the first
    /// resolution and for exact (table or shortcut) numbers.
    pub error: Option<f64>,
    /// "homogeneous-shortcut", "quadrature(kind, n=…)", or
    /// "topology-table".
    pub provenance: String,
}

/// Quote a CSV cell when it contains a delimiter (entry labels carry
/// commas in their parameter lists).
fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_owned()
    }
}

impl ReportNumber {
    fn exact(value: f64, provenance: &str) -> Self {
        ReportNumber {
            value,
            error: None,
            provenance: provenance.to_owned(),
        }
    }

    fn csv_cells(opt: Option<&ReportNumber>) -> (String, String) {
        match opt {
            None => (String::new(), String::new()),
            Some(n) => (
                format!("{}", n.value),
                n.error.map_or(String::new(), |e| format!("{e}")),
            ),
        }
    }
}

/// Integral functionals of one compact entry at one resolution.
///
/// Fields that need an almost-complex structure are `None` on J-less
/// entries; fields whose hypotheses the entry measurably violates are
/// `None` with an explanation in `refusals` (a refusal is not a
/// failure — the functional correctly declined to assert anything).
#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub schema_version: u32,
    pub entry: String,
    /// Nodes per axis; 0 for the exact homogeneous shortcut.
    pub resolution: usize,
    pub chi: ReportNumber,
    pub tau: ReportNumber,
    pub c1_dot_omega: Option<ReportNumber>,
    pub c1_squared_topological: Option<ReportNumber>,
    pub c1_squared_blair: Option<ReportNumber>,
    pub prop1_lhs: Option<ReportNumber>,
    pub prop1_rhs: Option<ReportNumber>,
    pub prop2_value: Option<ReportNumber>,
    pub thm3_gap: ReportNumber,
    pub cor3_lhs: Option<ReportNumber>,
    pub cor3_rhs: Option<ReportNumber>,
    /// ∫|W₊|² − (4π²/3)(2χ+3τ): slack of the curvature bound against
    /// the entry's recorded topology.
    pub lebrun_wplus_vs_topology: Option<ReportNumber>,
    pub refusals: Vec<String>,
}

impl IntegralReport {
    /// Column names for the flat CSV row, one (value, error) pair per
    /// reported field.
    pub fn csv_header() -> String {
        let mut cols = vec!["entry".to_owned(), "resolution".to_owned()];
        for f in [
            "chi",
            "tau",
            "c1_dot_omega",
            "c1_squared_topological",
            "c1_squared_blair",
            "prop1_lhs",
            "prop1_rhs",
            "prop2_value",
            "thm3_gap",
            "cor3_lhs",
            "cor3_rhs",
            "lebrun_wplus_vs_topology",
        ] {
            cols.push(f.to_owned());
            cols.push(format!("{f}_error"));
        }
        cols.push("refusals".to_owned());
        cols.join(",")
    }

    /// One CSV row per (entry, resolution); empty cells for absent
    /// fields, refusal notes joined with ';'.
    pub fn csv_row(&self) -> String {
        let mut cells = vec![csv_quote(&self.entry), format!("{}", self.resolution)];
        for field in [
            Some(&self.chi),
            Some(&self.tau),
            self.c1_dot_omega.as_ref(),
            self.c1_squared_topological.as_ref(),
            self.c1_squared_blair.as_ref(),
            self.prop1_lhs.as_ref(),
            self.prop1_rhs.as_ref(),
            self.prop2_value.as_ref(),
            Some(&self.thm3_gap),
            self.cor3_lhs.as_ref(),
            self.cor3_rhs.as_ref(),
            self.lebrun_wplus_vs_topology.as_ref(),
        ] {
            let (v, e) = ReportNumber::csv_cells(field);
            cells.push(v);
            cells.push(e);
        }
        cells.push(csv_quote(&self.refusals.join(";")));
        cells.join(",")
    }
}

fn against_prev(value: f64, prev: Option<f64>, provenance: &str) -> ReportNumber {
    ReportNumber {
        value,
        error: prev.map(|p| (value - p).abs()),
        provenance: provenance.to_owned(),
    }
}

fn report_for_scheme<R: Real>(
    entry: &CatalogEntry<R>,
    scheme: &QuadratureScheme<R>,
    prev: Option<&IntegralReport>,
) -> Result<IntegralReport> {
    let data = integrate_all(entry, scheme)?;
    let prov = scheme.provenance();
    let mut refusals = Vec::new();

    let num = |value: R, prev_val: Option<f64>| against_prev(value.as_f64(), prev_val, &prov);
    let prev_of = |f: fn(&IntegralReport) -> Option<f64>| prev.and_then(f);

    let chi = num(data.chi(), prev_of(|p| Some(p.chi.value)));
    let tau = num(data.tau(), prev_of(|p| Some(p.tau.value)));
    let thm3_gap = num(data.thm3_gap(), prev_of(|p| Some(p.thm3_gap.value)));

    let c1_dot_omega = data
        .c1_dot_omega(entry)
        .ok()
        .map(|v| num(v, prev_of(|p| p.c1_dot_omega.as_ref().map(|n| n.value))));
    let (c1_squared_topological, c1_squared_blair) = match data.c1_squared(entry) {
        Ok((t, b)) => (
            Some(ReportNumber::exact(t.as_f64(), "topology-table")),
            Some(num(b, prev_of(|p| p.c1_squared_blair.as_ref().map(|n| n.value)))),
        ),
        Err(_) => (None, None),
    };
    let (prop1_lhs, prop1_rhs) = match data.prop1_pair(entry) {
        Ok((l, r)) => (
            Some(num(l, prev_of(|p| p.prop1_lhs.as_ref().map(|n| n.value)))),
            Some(num(r, prev_of(|p| p.prop1_rhs.as_ref().map(|n| n.value)))),
        ),
        Err(_) => (None, None),
    };
    let prop2_value = data
        .prop2_value(entry)
        .ok()
        .map(|v| num(v, prev_of(|p| p.prop2_value.as_ref().map(|n| n.value))));
    let (cor3_lhs, cor3_rhs) = match data.cor3_pair(entry) {
        Ok((l, r)) => (
            Some(num(l, prev_of(|p| p.cor3_lhs.as_ref().map(|n| n.value)))),
            Some(num(r, prev_of(|p| p.cor3_rhs.as_ref().map(|n| n.value)))),
        ),
        Err(Error::HypothesisViolation {
            hypothesis,
            measured,
            ..
        }) => {
            refusals.push(format!(
                "cor3: requires {hypothesis}; measured max |ric₀|² = {measured:.6e}"
            ));
            (None, None)
        }
        Err(_) => (None, None),
    };
    let lebrun_wplus_vs_topology = data.lebrun_pair(entry).ok().map(|(wp, bound)| {
        num(
            wp - bound,
            prev_of(|p| p.lebrun_wplus_vs_topology.as_ref().map(|n| n.value)),
        )
    });

    Ok(IntegralReport {
        schema_version: SCHEMA_VERSION,
        entry: entry.label(),
        resolution: scheme.resolution(),
        chi,
        tau,
        c1_dot_omega,
        c1_squared_topological,
        c1_squared_blair,
        prop1_lhs,
        prop1_rhs,
        prop2_value,
        thm3_gap,
        cor3_lhs,
        cor3_rhs,
        lebrun_wplus_vs_topology,
        refusals,
    })
}

/// Integral reports for a compact entry, one per resolution (ascending
/// gives meaningful error estimates).  Chart entries with an empty
/// resolution list, and homogeneous-only entries always, get the exact
/// shortcut report at `resolution` 0.  Noncompact entries refuse.
pub fn integral_report<R: Real>(
    entry: &CatalogEntry<R>,
    resolutions: &[usize],
) -> Result<Vec<IntegralReport>> {
    let schemes: Vec<QuadratureScheme<R>> =
        if resolutions.is_empty() || matches!(entry.scheme, SchemeSpec::HomogeneousOnly) {
            vec![homogeneous_scheme(entry)?]
        } else {
            resolutions
                .iter()
                .map(|&n| scheme_for(entry, n))
                .collect::<Result<_>>()?
        };
    let mut out: Vec<IntegralReport> = Vec::with_capacity(schemes.len());
    for scheme in &schemes {
        let report = report_for_scheme(entry, scheme, out.last())?;
        out.push(report);
    }
    Ok(out)
}

/// Pointwise curvature decomposition at one sampled point.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionRow {
    pub point: [f64; 4],
    pub s: f64,
    /// Spectrum of W₊ as an operator on Λ⁺, descending.
    pub wplus_eigenvalues: [f64; 3],
    pub ric0_norm2: f64,
    pub wminus_norm2: f64,
    pub s_star: Option<f64>,
    pub nabla_omega_norm2: Option<f64>,
}

/// Curvature blocks of one entry at deterministically sampled points.
#[derive(Clone, Debug, Serialize)]
pub struct DecompositionTable {
    pub schema_version: u32,
    pub entry: String,
    pub rows: Vec<DecompositionRow>,
}

impl DecompositionTable {
    pub fn csv_header() -> String {
        "entry,x0,x1,x2,x3,s,wplus_ev0,wplus_ev1,wplus_ev2,ric0_norm2,wminus_norm2,\
         s_star,nabla_omega_norm2"
            .to_owned()
    }

    pub fn csv_rows(&self) -> String {
        let mut out = String::new();
        for r in &self.rows {
            let opt = |v: Option<f64>| v.map_or(String::new(), |x| format!("{x}"));
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                csv_quote(&self.entry),
                r.point[0],
                r.point[1],
                r.point[2],
                r.point[3],
                r.s,
                r.wplus_eigenvalues[0],
                r.wplus_eigenvalues[1],
                r.wplus_eigenvalues[2],
                r.ric0_norm2,
                r.wminus_norm2,
                opt(r.s_star),
                opt(r.nabla_omega_norm2),
            ));
        }
        out
    }
}

/// Sample `count` points of the entry (fixed seed ⇒ byte-stable
/// reports) and record the curvature decomposition at each.
pub fn decomposition_table<R: Real>(
    entry: &CatalogEntry<R>,
    count: usize,
    seed: u64,
) -> Result<DecompositionTable> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(count);
    for _ in 0..count {
        let point = entry.desc.sample_point(&mut rng);
        let (row_point, s, evs, ric0, wm2) = {
            let pg = riemann(&entry.desc, &point)?;
            let blocks = decompose(&pg);
            let evs = blocks.wplus.eigenvalues();
            (
                [
                    point[0].as_f64(),
                    point[1].as_f64(),
                    point[2].as_f64(),
                    point[3].as_f64(),
                ],
                pg.s.as_f64(),
                [evs[0].as_f64(), evs[1].as_f64(), evs[2].as_f64()],
                pg.ric0_norm2().as_f64(),
                blocks.wminus_norm2().as_f64(),
            )
        };
        let (s_star, nabla2) = match &entry.j {
            Some(j) => {
                let ak = ak_point(&entry.desc, j, &point)?;
                (Some(ak.s_star.as_f64()), Some(ak.nabla_omega_norm2.as_f64()))
            }
            None => (None, None),
        };
        rows.push(DecompositionRow {
            point: row_point,
            s,
            wplus_eigenvalues: evs,
            ric0_norm2: ric0,
            wminus_norm2: wm2,
            s_star,
            nabla_omega_norm2: nabla2,
        });
    }
    Ok(DecompositionTable {
        schema_version: SCHEMA_VERSION,
        entry: entry.label(),
        rows,
    })
}

/// Weitzenböck residual at one grid resolution.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceLevel {
    /// Nodes per axis.
    pub resolution: usize,
    /// Largest grid spacing.
    pub h: f64,
    /// Frame-norm residual maximized over interior nodes.
    pub residual: f64,
}

/// Residual-versus-spacing table for one probe field on one entry.
#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub schema_version: u32,
    pub entry: String,
    /// Which probe field was discretized ("omega", "bump", …).
    pub field: String,
    pub levels: Vec<ConvergenceLevel>,
    /// Least-squares slope of log residual against log h; `None` when
    /// the residuals sit at the rounding floor (`exact` is then true).
    pub fitted_order: Option<f64>,
    pub exact: bool,
}

impl ConvergenceReport {
    pub fn csv_header() -> String {
        "entry,field,resolution,h,residual,fitted_order,exact".to_owned()
    }

    pub fn csv_rows(&self) -> String {
        let order = self
            .fitted_order
            .map_or(String::new(), |o| format!("{o}"));
        let mut out = String::new();
        for l in &self.levels {
            out.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                csv_quote(&self.entry),
                self.field,
                l.resolution,
                l.h,
                l.residual,
                order,
                self.exact
            ));
        }
        out
    }
}

/// Run the Weitzenböck probe at each resolution and fit the
/// convergence order, or report "exact" when every residual is at the
/// rounding floor.  Needs at least three levels for a meaningful fit.
pub fn convergence_report<R: Real>(
    entry: &CatalogEntry<R>,
    field: &str,
    alpha: &dyn Fn(&[R; 4]) -> [R; 6],
    resolutions: &[usize],
) -> Result<ConvergenceReport> {
    if resolutions.len() < 3 {
        return Err(Error::InsufficientLevels {
            min: 3,
            got: resolutions.len(),
        });
    }
    let mut levels = Vec::with_capacity(resolutions.len());
    for &n in resolutions {
        let (r, h) = weitzenboeck_probe(&entry.desc, alpha, n)?;
        levels.push(ConvergenceLevel {
            resolution: n,
            h,
            residual: r.as_f64(),
        });
    }
    let exact = levels.iter().all(|l| l.residual < EXACT_FLOOR);
    let fitted = if exact {
        None
    } else {
        let pairs: Vec<(f64, f64)> = levels.iter().map(|l| (l.h, l.residual)).collect();
        Some(fitted_order(&pairs)?)
    };
    Ok(ConvergenceReport {
        schema_version: SCHEMA_VERSION,
        entry: entry.label(),
        field: field.to_owned(),
        levels,
        fitted_order: fitted,
        exact,
    })
}
