//! Built-in manifold catalog: each entry packages a metric description,
//! an optional compatible almost-complex structure, structural flags
//! certified analytically, and reference data (topology, volume,
//! homogeneous curvature constants) that the rest of the crate verifies
//! against.
//!
//! Flags follow two certification rules rather than numerical tests:
//! an Einstein metric has δW₊ = 0 and constant scalar curvature, and a
//! Kähler metric with constant scalar curvature has δW₊ = 0. Divergence
//! of the Weyl tensor involves third metric derivatives, so certifying
//! these hypotheses structurally keeps them exact; every entry records
//! the justification string alongside the flag.
//!
//! Noncompact entries (the hyperbolic balls) are pointwise-only: block
//! decompositions and pointwise identities apply, integral functionals
//! refuse them.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::almost_kahler::CompatibleJ;
use crate::charts;
use crate::error::{Error, Result};
use crate::geometry::MetricDescription;
use crate::real::Real;

/// Structural properties certified analytically, not measured.
#[derive(Clone, Debug)]
pub struct Flags {
    pub kahler: bool,
    pub einstein: bool,
    pub constant_s: bool,
    /// `Some(justification)` when δW₊ = 0 holds for a structural reason;
    /// `None` when the status is unknown (it is never certified false).
    pub delta_wplus_zero: Option<&'static str>,
    /// W₋ ≡ 0 with the chart orientation.
    pub self_dual: bool,
}

/// Classical topological reference data for compact entries.
#[derive(Clone, Copy, Debug)]
pub struct Topology {
    pub chi: i64,
    pub tau: i64,
    /// c₁² = 2χ + 3τ when the entry carries an almost-complex structure.
    pub c1_squared: Option<i64>,
}

/// How integral functionals should cover the entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeSpec {
    /// Four periodic axes: product trapezoid rule (spectrally accurate).
    PeriodicBox,
    /// Two (polar, azimuthal) factors: Gauss–Legendre × trapezoid.
    ProductAngles,
    /// Unbounded chart covering the manifold minus a point: radial
    /// substitution |x| = scale·tan v with Gauss–Legendre in v and the
    /// spherical angles.
    RadialCompactified,
    /// Homogeneous entry without a chart: value × volume only.
    HomogeneousOnly,
    /// Noncompact: integral functionals refuse.
    PointwiseOnly,
}

/// A catalog manifold: metric, optional J, certified flags, reference
/// data. Immutable after load.
pub struct CatalogEntry<R> {
    pub id: &'static str,
    /// Parameters the entry was instantiated with (radii).
    pub params: Vec<(&'static str, f64)>,
    pub desc: MetricDescription<R>,
    pub j: Option<CompatibleJ<R>>,
    pub flags: Flags,
    /// `None` for noncompact entries.
    pub topology: Option<Topology>,
    /// Exact total volume; `None` for noncompact entries.
    pub volume: Option<R>,
    /// Scalar curvature, constant on every catalog entry.
    pub known_s: R,
    /// Star-scalar curvature for entries carrying a J.
    pub known_s_star: Option<R>,
    pub scheme: SchemeSpec,
    /// A sample point for homogeneous shortcuts and pointwise spot
    /// checks; any interior point works since invariants are constant.
    pub rep_point: [R; 4],
}

impl<R: Real> CatalogEntry<R> {
    /// Human-readable label with parameters, e.g. `s2xs2(a=1, b=2)`.
    pub fn label(&self) -> String {
        if self.params.is_empty() {
            self.id.to_string()
        } else {
            let args: Vec<String> = self
                .params
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect();
            format!("{}({})", self.id, args.join(", "))
        }
    }

    pub fn pointwise_only(&self) -> bool {
        self.scheme == SchemeSpec::PointwiseOnly
    }
}

/// Known entry identifiers in catalog order.
pub const IDS: [&str; 7] = [
    "t4_flat",
    "s4_round",
    "s2xs2",
    "cp2_fs",
    "kodaira_thurston",
    "h4_hyperbolic",
    "ch2_chart",
];

fn param(
    params: &BTreeMap<String, f64>,
    key: &str,
    default: f64,
    id: &str,
) -> Result<f64> {
    let v = params.get(key).copied().unwrap_or(default);
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::Config(format!(
            "parameter {key} = {v} of entry {id} must be positive and finite"
        )));
    }
    Ok(v)
}

fn check_keys(params: &BTreeMap<String, f64>, allowed: &[&str], id: &str) -> Result<()> {
    for k in params.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Config(format!(
                "entry {id} does not take a parameter named {k} (allowed: {allowed:?})"
            )));
        }
    }
    Ok(())
}

/// Load a catalog entry by id, with optional parameters (`r` for the
/// round sphere, `a`/`b` for the sphere product; defaults 1).
pub fn load<R: Real>(id: &str, params: &BTreeMap<String, f64>) -> Result<CatalogEntry<R>> {
    match id {
        "t4_flat" => {
            check_keys(params, &[], id)?;
            let two_pi = std::f64::consts::TAU;
            Ok(CatalogEntry {
                id: "t4_flat",
                params: vec![],
                desc: MetricDescription::Chart {
                    map: Arc::new(charts::FlatTorus),
                    domain: charts::FlatTorus::domain(),
                },
                j: Some(CompatibleJ::standard_chart()),
                flags: Flags {
                    kahler: true,
                    einstein: true,
                    constant_s: true,
                    delta_wplus_zero: Some("flat Kähler metric (Einstein with s = 0)"),
                    self_dual: true,
                },
                topology: Some(Topology {
                    chi: 0,
                    tau: 0,
                    c1_squared: Some(0),
                }),
                volume: Some(R::of(two_pi.powi(4))),
                known_s: R::zero(),
                known_s_star: Some(R::zero()),
                scheme: SchemeSpec::PeriodicBox,
                rep_point: [R::of(0.3), R::of(1.1), R::of(2.0), R::of(0.7)],
            })
        }
        "s4_round" => {
            check_keys(params, &["r"], id)?;
            let r = param(params, "r", 1.0, id)?;
            Ok(CatalogEntry {
                id: "s4_round",
                params: vec![("r", r)],
                desc: MetricDescription::Chart {
                    map: Arc::new(charts::RoundSphere { radius: r }),
                    domain: charts::RoundSphere { radius: r }.domain(),
                },
                j: None,
                flags: Flags {
                    kahler: false,
                    einstein: true,
                    constant_s: true,
                    delta_wplus_zero: Some("Einstein metric"),
                    self_dual: true,
                },
                topology: Some(Topology {
                    chi: 2,
                    tau: 0,
                    c1_squared: None,
                }),
                volume: Some(R::of(8.0 * std::f64::consts::PI.powi(2) * r.powi(4) / 3.0)),
                known_s: R::of(12.0 / (r * r)),
                known_s_star: None,
                scheme: SchemeSpec::RadialCompactified,
                rep_point: [R::of(0.12 * r), R::of(-0.07 * r), R::of(0.4 * r), R::of(0.2 * r)],
            })
        }
        "s2xs2" => {
            check_keys(params, &["a", "b"], id)?;
            let a = param(params, "a", 1.0, id)?;
            let b = param(params, "b", 1.0, id)?;
            let einstein = (a - b).abs() < 1e-12;
            Ok(CatalogEntry {
                id: "s2xs2",
                params: vec![("a", a), ("b", b)],
                desc: MetricDescription::Chart {
                    map: Arc::new(charts::ProductSpheres { a, b }),
                    domain: charts::ProductSpheres::domain(),
                },
                j: Some(CompatibleJ::product_spheres()),
                flags: Flags {
                    kahler: true,
                    einstein,
                    constant_s: true,
                    delta_wplus_zero: Some("Kähler metric with constant scalar curvature"),
                    self_dual: false,
                },
                topology: Some(Topology {
                    chi: 4,
                    tau: 0,
                    c1_squared: Some(8),
                }),
                volume: Some(R::of(
                    16.0 * std::f64::consts::PI.powi(2) * a * a * b * b,
                )),
                known_s: R::of(2.0 / (a * a) + 2.0 / (b * b)),
                known_s_star: Some(R::of(2.0 / (a * a) + 2.0 / (b * b))),
                scheme: SchemeSpec::ProductAngles,
                rep_point: [R::of(1.2), R::of(0.6), R::of(1.9), R::of(2.5)],
            })
        }
        "cp2_fs" => {
            check_keys(params, &[], id)?;
            let map = charts::ComplexSpaceForm::fubini_study();
            let domain = map.domain();
            Ok(CatalogEntry {
                id: "cp2_fs",
                params: vec![],
                desc: MetricDescription::Chart {
                    map: Arc::new(map),
                    domain,
                },
                j: Some(CompatibleJ::standard_chart()),
                flags: Flags {
                    kahler: true,
                    einstein: true,
                    constant_s: true,
                    delta_wplus_zero: Some("Kähler–Einstein metric"),
                    self_dual: true,
                },
                topology: Some(Topology {
                    chi: 3,
                    tau: 1,
                    c1_squared: Some(9),
                }),
                volume: Some(R::of(std::f64::consts::PI.powi(2) / 2.0)),
                known_s: R::of(24.0),
                known_s_star: Some(R::of(24.0)),
                scheme: SchemeSpec::RadialCompactified,
                rep_point: [R::of(0.1), R::of(-0.05), R::of(0.2), R::of(0.15)],
            })
        }
        "kodaira_thurston" => {
            check_keys(params, &[], id)?;
            Ok(CatalogEntry {
                id: "kodaira_thurston",
                params: vec![],
                desc: MetricDescription::Frame {
                    c: charts::nilmanifold_structure_constants(),
                    volume: 1.0,
                },
                j: Some(CompatibleJ::standard_frame()),
                flags: Flags {
                    kahler: false,
                    einstein: false,
                    constant_s: true,
                    // δW₊ = 0 is neither implied (non-Kähler, non-Einstein)
                    // nor refuted here; reports stay observational
                    delta_wplus_zero: None,
                    self_dual: false,
                },
                topology: Some(Topology {
                    chi: 0,
                    tau: 0,
                    c1_squared: Some(0),
                }),
                volume: Some(R::one()),
                known_s: R::of(-0.5),
                known_s_star: Some(R::of(0.5)),
                scheme: SchemeSpec::HomogeneousOnly,
                rep_point: [R::zero(); 4],
            })
        }
        "h4_hyperbolic" => {
            check_keys(params, &[], id)?;
            Ok(CatalogEntry {
                id: "h4_hyperbolic",
                params: vec![],
                desc: MetricDescription::Chart {
                    map: Arc::new(charts::HyperbolicBall),
                    domain: charts::HyperbolicBall::domain(),
                },
                j: None,
                flags: Flags {
                    kahler: false,
                    einstein: true,
                    constant_s: true,
                    delta_wplus_zero: Some("Einstein metric"),
                    self_dual: true,
                },
                topology: None,
                volume: None,
                known_s: R::of(-12.0),
                known_s_star: None,
                scheme: SchemeSpec::PointwiseOnly,
                rep_point: [R::of(0.1), R::of(-0.05), R::of(0.12), R::of(0.03)],
            })
        }
        "ch2_chart" => {
            check_keys(params, &[], id)?;
            let map = charts::ComplexSpaceForm::complex_hyperbolic();
            let domain = map.domain();
            Ok(CatalogEntry {
                id: "ch2_chart",
                params: vec![],
                desc: MetricDescription::Chart {
                    map: Arc::new(map),
                    domain,
                },
                j: Some(CompatibleJ::standard_chart()),
                flags: Flags {
                    kahler: true,
                    einstein: true,
                    constant_s: true,
                    delta_wplus_zero: Some("Kähler–Einstein metric"),
                    self_dual: true,
                },
                topology: None,
                volume: None,
                known_s: R::of(-24.0),
                known_s_star: Some(R::of(-24.0)),
                scheme: SchemeSpec::PointwiseOnly,
                rep_point: [R::of(0.08), R::of(0.12), R::of(-0.1), R::of(0.05)],
            })
        }
        other => Err(Error::UnknownEntry(other.to_string())),
    }
}

/// Load with default parameters.
pub fn load_default<R: Real>(id: &str) -> Result<CatalogEntry<R>> {
    load(id, &BTreeMap::new())
}
