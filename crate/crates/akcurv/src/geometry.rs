//! Curvature engine: from a metric description to the curvature operator
//! and its block decomposition at a point.
//!
//! Two kinds of metric description are supported. A *chart* is a smooth
//! map from four coordinates to a symmetric positive-definite 4×4 matrix;
//! it is evaluated on second-order jets, so the metric arrives with exact
//! first and second derivatives and the Christoffel symbols can be
//! differentiated once more by re-seeding first-order jets (no finite
//! differences anywhere). A *frame* description gives the structure
//! constants of a left-invariant orthonormal frame on a Lie group with
//! compact quotient; curvature is then pure linear algebra through the
//! Koszul formula.
//!
//! Index conventions, fixed once and verified by the constant-curvature
//! and product-metric oracles in the tests:
//!
//! * Γ^k_{ij} = ½ g^{kl}(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij}), stored as
//!   `gamma[k][i][j]`.
//! * R(∂_i,∂_j)∂_l = (∂_iΓ^m_{jl} − ∂_jΓ^m_{il} + Γ^m_{ip}Γ^p_{jl}
//!   − Γ^m_{jp}Γ^p_{il}) ∂_m.
//! * Rm[i][j][k][l] = g(R(∂_i,∂_j)∂_l, ∂_k), so that on the round sphere
//!   of radius r, Rm = (1/r²)(g_ik g_jl − g_il g_jk) and all sectional
//!   curvatures Rm[i][j][i][j] are +1/r².
//! * The curvature operator on Λ² in an orthonormal frame is
//!   M[A][B] = Rm[i_A][j_A][i_B][j_B] over the index pairs of [`PAIRS`];
//!   its Λ±-block form is (W₊ + s/12, ric₀; ric₀*, W₋ + s/12), with the
//!   trace of each diagonal block equal to s/4.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::jet::{Jet1, Jet2};
use crate::linalg;
use crate::real::Real;
use crate::sd_algebra::WeylPlusOperator;

/// Ordered index pairs (i, j), i < j, of the Λ² basis e^i∧e^j.
pub const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// Coordinate box of a chart, with per-axis periodicity. An unbounded
/// domain (chart covering the whole manifold up to measure zero) accepts
/// every point; its box then only delimits random sampling.
#[derive(Clone, Debug)]
pub struct Domain {
    pub ranges: [[f64; 2]; 4],
    pub periodic: [bool; 4],
    pub unbounded: bool,
}

impl Domain {
    pub fn contains(&self, p: &[f64; 4]) -> bool {
        self.unbounded
            || p.iter()
                .zip(self.ranges.iter())
                .enumerate()
                .all(|(a, (x, r))| self.periodic[a] || (*x >= r[0] && *x <= r[1]))
    }

    /// Random interior point; non-periodic axes are inset by 5% of their
    /// extent so coordinate-singular loci (polar-angle endpoints) are
    /// never sampled.
    pub fn sample<R: Real, G: Rng>(&self, rng: &mut G) -> [R; 4] {
        let mut p = [R::zero(); 4];
        for a in 0..4 {
            let [lo, hi] = self.ranges[a];
            let (lo, hi) = if self.periodic[a] {
                (lo, hi)
            } else {
                let inset = 0.05 * (hi - lo);
                (lo + inset, hi - inset)
            };
            p[a] = R::of(rng.gen_range(lo..hi));
        }
        p
    }
}

/// A coordinate-chart metric, evaluated on second-order jets.
pub trait ChartMap<R: Real>: Send + Sync {
    fn metric(&self, x: &[Jet2<R>; 4]) -> [[Jet2<R>; 4]; 4];

    /// Whether the chart is defined at the point (default: everywhere).
    fn contains(&self, _x: &[R; 4]) -> bool {
        true
    }
}

/// Metric description: coordinate chart with domain, or left-invariant
/// orthonormal frame with structure constants and quotient volume.
#[derive(Clone)]
pub enum MetricDescription<R> {
    Chart {
        map: Arc<dyn ChartMap<R>>,
        domain: Domain,
    },
    Frame {
        /// c[k][i][j] = c^k_{ij} with [e_i, e_j] = c^k_{ij} e_k;
        /// antisymmetric in (i, j).
        c: [[[R; 4]; 4]; 4],
        /// Volume of the compact quotient carrying the frame.
        volume: f64,
    },
}

impl<R: Real> MetricDescription<R> {
    pub fn is_chart(&self) -> bool {
        matches!(self, MetricDescription::Chart { .. })
    }

    /// Random evaluation point: interior chart point, or the (arbitrary,
    /// homogeneous) origin in frame mode.
    pub fn sample_point<G: Rng>(&self, rng: &mut G) -> [R; 4] {
        match self {
            MetricDescription::Chart { domain, .. } => domain.sample(rng),
            MetricDescription::Frame { .. } => [R::zero(); 4],
        }
    }
}

/// Everything the rest of the crate needs at one point: metric data,
/// connection coefficients, an oriented orthonormal frame, and the
/// Riemann tensor in that frame.
#[derive(Clone, Debug)]
pub struct PointGeometry<R> {
    pub point: [R; 4],
    /// Metric components (coordinate basis; identity in frame mode).
    pub g: [[R; 4]; 4],
    pub g_inv: [[R; 4]; 4],
    pub sqrt_det_g: R,
    /// Connection coefficients `gamma[k][i][j]` = Γ^k_{ij}: Christoffel
    /// symbols in chart mode (symmetric in i, j), Koszul coefficients
    /// ⟨∇_{e_i}e_j, e_k⟩ in frame mode.
    pub gamma: [[[R; 4]; 4]; 4],
    /// Oriented orthonormal frame, `frame[a][i]` = a-th coordinate of
    /// frame vector i. Identity in frame mode.
    pub frame: [[R; 4]; 4],
    /// Whether the orientation of the Gram–Schmidt frame had to be
    /// repaired by swapping the last two legs.
    pub frame_flipped: bool,
    /// Riemann components `rm[i][j][k][l]` in the orthonormal frame.
    pub rm: [[[[R; 4]; 4]; 4]; 4],
    /// Ricci in the orthonormal frame.
    pub ricci: [[R; 4]; 4],
    /// Scalar curvature.
    pub s: R,
}

/// The four blocks of the curvature operator with respect to Λ⁺ ⊕ Λ⁻.
#[derive(Clone, Debug)]
pub struct CurvatureBlocks<R> {
    pub wplus: WeylPlusOperator<R>,
    /// Trace-free symmetric anti-self-dual Weyl block.
    pub wminus: [[R; 3]; 3],
    /// The Λ⁻ → Λ⁺ off-diagonal block; vanishes exactly when the metric
    /// is Einstein at the point.
    pub ric0block: [[R; 3]; 3],
    pub s: R,
}

impl<R: Real> CurvatureBlocks<R> {
    pub fn wminus_norm2(&self) -> R {
        linalg::frobenius2(&self.wminus)
    }

    /// Rebuild the 6×6 curvature operator (in the e^i∧e^j basis) from the
    /// blocks; inverse of [`decompose`] up to the symmetrization residual.
    pub fn reassemble(&self) -> [[R; 6]; 6] {
        let twelfth = self.s / R::of(12.0);
        let mut split = [[R::zero(); 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                split[i][j] = self.wplus.matrix()[i][j];
                split[3 + i][3 + j] = self.wminus[i][j];
                split[i][3 + j] = self.ric0block[i][j];
                split[3 + i][j] = self.ric0block[j][i];
            }
            split[i][i] = split[i][i] + twelfth;
            split[3 + i][3 + i] = split[3 + i][3 + i] + twelfth;
        }
        // undo the orthogonal change of basis: M = B · split · Bᵀ
        let b = lambda_basis::<R>();
        linalg::congruence(&linalg::transpose(&b), &split)
    }
}

/// Orthogonal 6×6 matrix whose first three columns are the normalized
/// Λ⁺ basis ωⁱ/√2 and last three the normalized Λ⁻ basis, expressed in
/// the e^i∧e^j components.
pub fn lambda_basis<R: Real>() -> [[R; 6]; 6] {
    let h = R::of(0.5).sqrt();
    let z = R::zero();
    // rows: b1..b6 components; columns: ω⁺₁..₃, ω⁻₁..₃
    [
        [h, z, z, h, z, z],
        [z, h, z, z, h, z],
        [z, z, h, z, z, h],
        [z, z, h, z, z, -h],
        [z, -h, z, z, h, z],
        [h, z, z, -h, z, z],
    ]
}

/// Christoffel symbols Γ^k_{ij} at a point (chart mode), or the Koszul
/// connection coefficients of the left-invariant frame (frame mode,
/// point-independent).
pub fn christoffel<R: Real>(
    desc: &MetricDescription<R>,
    point: &[R; 4],
) -> Result<[[[R; 4]; 4]; 4]> {
    match desc {
        MetricDescription::Chart { map, domain } => {
            let jets = chart_jets(map.as_ref(), domain, point)?;
            let mut gamma = [[[R::zero(); 4]; 4]; 4];
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        gamma[k][i][j] = jets.gamma1[k][i][j].val;
                    }
                }
            }
            Ok(gamma)
        }
        MetricDescription::Frame { c, .. } => Ok(koszul(c)),
    }
}

/// Koszul formula for a left-invariant orthonormal frame:
/// Γ^k_{ij} = ½ (c^k_{ij} − c^i_{jk} + c^j_{ki}).
fn koszul<R: Real>(c: &[[[R; 4]; 4]; 4]) -> [[[R; 4]; 4]; 4] {
    let half = R::of(0.5);
    let mut gamma = [[[R::zero(); 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                gamma[k][i][j] = half * (c[k][i][j] - c[i][j][k] + c[j][k][i]);
            }
        }
    }
    gamma
}

pub(crate) struct ChartJets<R> {
    pub(crate) g: [[R; 4]; 4],
    pub(crate) g_inv: [[R; 4]; 4],
    /// Metric with exact first derivatives.
    pub(crate) g1: [[Jet1<R>; 4]; 4],
    /// Γ^k_{ij} with exact first derivatives.
    pub(crate) gamma1: [[[Jet1<R>; 4]; 4]; 4],
}

/// Evaluate a chart metric on jets and differentiate the Christoffel
/// symbols once by re-seeding first-order jets from the second-order
/// metric jets: the value of `∂_c g_ab` is `grad[c]` of the metric jet
/// and its gradient is a Hessian row, so plain `Jet1` arithmetic through
/// the inverse-metric and Koszul expressions yields ∂Γ exactly.
pub(crate) fn chart_jets<R: Real>(
    map: &dyn ChartMap<R>,
    domain: &Domain,
    point: &[R; 4],
) -> Result<ChartJets<R>> {
    let pf = std::array::from_fn(|a| point[a].as_f64());
    if !map.contains(point) || !domain.contains(&pf) {
        return Err(Error::OutsideDomain { point: pf });
    }
    let x = Jet2::point(point);
    let gj = map.metric(&x);

    let mut g = [[R::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g[i][j] = gj[i][j].val;
        }
    }
    if !linalg::is_spd(&g) {
        return Err(Error::NonSpdMetric { point: pf });
    }

    // first-order jets of g and ∂g
    let mut g1 = [[Jet1::constant(R::zero()); 4]; 4];
    let mut dg1 = [[[Jet1::constant(R::zero()); 4]; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g1[i][j] = gj[i][j].value_jet1();
            for c in 0..4 {
                dg1[c][i][j] = gj[i][j].partial_jet1(c);
            }
        }
    }
    let ginv1 = linalg::inverse(&g1).ok_or(Error::NonSpdMetric { point: pf })?;
    let mut g_inv = [[R::zero(); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            g_inv[i][j] = ginv1[i][j].val;
        }
    }

    let half = Jet1::constant(R::of(0.5));
    let mut gamma1 = [[[Jet1::constant(R::zero()); 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let mut acc = Jet1::constant(R::zero());
                for l in 0..4 {
                    acc = acc + ginv1[k][l] * (dg1[i][j][l] + dg1[j][i][l] - dg1[l][i][j]);
                }
                gamma1[k][i][j] = half * acc;
            }
        }
    }

    Ok(ChartJets {
        g,
        g_inv,
        g1,
        gamma1,
    })
}

/// Oriented orthonormal frame of a metric value: Gram–Schmidt on the
/// coordinate basis, with the last two legs swapped when needed so that
/// the frame is positively oriented. The boolean records the swap.
pub(crate) fn oriented_frame<R: Real>(g: &[[R; 4]; 4]) -> ([[R; 4]; 4], bool) {
    let mut frame = linalg::gram_schmidt_frame(g);
    let mut flipped = false;
    if linalg::determinant(&frame) < R::zero() {
        for row in frame.iter_mut() {
            row.swap(2, 3);
        }
        flipped = true;
    }
    (frame, flipped)
}

/// Full curvature data at a point.
pub fn riemann<R: Real>(desc: &MetricDescription<R>, point: &[R; 4]) -> Result<PointGeometry<R>> {
    match desc {
        MetricDescription::Chart { map, domain } => {
            let jets = chart_jets(map.as_ref(), domain, point)?;
            let ChartJets {
                g,
                g_inv,
                g1: _,
                gamma1,
            } = jets;

            let mut gamma = [[[R::zero(); 4]; 4]; 4];
            for k in 0..4 {
                for i in 0..4 {
                    for j in 0..4 {
                        gamma[k][i][j] = gamma1[k][i][j].val;
                    }
                }
            }

            // coordinate Riemann: R(∂_i,∂_j)∂_l = rup[m][l][i][j] ∂_m
            let mut rup = [[[[R::zero(); 4]; 4]; 4]; 4];
            for m in 0..4 {
                for l in 0..4 {
                    for i in 0..4 {
                        for j in 0..4 {
                            let mut v =
                                gamma1[m][j][l].grad[i] - gamma1[m][i][l].grad[j];
                            for p in 0..4 {
                                v = v + gamma[m][i][p] * gamma[p][j][l]
                                    - gamma[m][j][p] * gamma[p][i][l];
                            }
                            rup[m][l][i][j] = v;
                        }
                    }
                }
            }
            // lower: Rm[i][j][k][l] = g_km R^m_{lij}
            let mut rm_coord = [[[[R::zero(); 4]; 4]; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    for k in 0..4 {
                        for l in 0..4 {
                            let mut v = R::zero();
                            for m in 0..4 {
                                v = v + g[k][m] * rup[m][l][i][j];
                            }
                            rm_coord[i][j][k][l] = v;
                        }
                    }
                }
            }

            let (frame, frame_flipped) = oriented_frame(&g);
            let rm = transform_rm(&rm_coord, &frame);
            let (ricci, s) = ricci_from_rm(&rm);
            let sqrt_det_g = linalg::determinant(&g).sqrt();

            Ok(PointGeometry {
                point: *point,
                g,
                g_inv,
                sqrt_det_g,
                gamma,
                frame,
                frame_flipped,
                rm,
                ricci,
                s,
            })
        }
        MetricDescription::Frame { c, .. } => {
            let gamma = koszul(c);
            // connection matrices (Γ_i)_{kj} = Γ^k_{ij}
            let mut conn = [[[R::zero(); 4]; 4]; 4];
            for i in 0..4 {
                for k in 0..4 {
                    for j in 0..4 {
                        conn[i][k][j] = gamma[k][i][j];
                    }
                }
            }
            // R(e_i,e_j) = Γ_iΓ_j − Γ_jΓ_i − c^m_{ij} Γ_m
            let mut rm = [[[[R::zero(); 4]; 4]; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    let mut rij =
                        linalg::mat_sub(&linalg::mat_mul(&conn[i], &conn[j]), &linalg::mat_mul(&conn[j], &conn[i]));
                    for m in 0..4 {
                        let cm = c[m][i][j];
                        if cm.as_f64() != 0.0 {
                            rij = linalg::mat_sub(&rij, &linalg::mat_scale(cm, &conn[m]));
                        }
                    }
                    for k in 0..4 {
                        for l in 0..4 {
                            rm[i][j][k][l] = rij[k][l];
                        }
                    }
                }
            }
            let (ricci, s) = ricci_from_rm(&rm);
            Ok(PointGeometry {
                point: *point,
                g: linalg::identity(),
                g_inv: linalg::identity(),
                sqrt_det_g: R::one(),
                gamma,
                frame: linalg::identity(),
                frame_flipped: false,
                rm,
                ricci,
                s,
            })
        }
    }
}

/// Congruence transform of Riemann components by a 4×4 matrix
/// (`f[a][i]` = a-th coordinate of vector i): used both to pass from
/// coordinate to orthonormal-frame components and to rotate a frame.
pub fn transform_rm<R: Real>(
    rm: &[[[[R; 4]; 4]; 4]; 4],
    f: &[[R; 4]; 4],
) -> [[[[R; 4]; 4]; 4]; 4] {
    // contract one index at a time
    let mut t1 = [[[[R::zero(); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut v = R::zero();
                    for i in 0..4 {
                        v = v + rm[i][j][k][l] * f[i][a];
                    }
                    t1[a][j][k][l] = v;
                }
            }
        }
    }
    let mut t2 = [[[[R::zero(); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    let mut v = R::zero();
                    for j in 0..4 {
                        v = v + t1[a][j][k][l] * f[j][b];
                    }
                    t2[a][b][k][l] = v;
                }
            }
        }
    }
    let mut t3 = [[[[R::zero(); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for l in 0..4 {
                    let mut v = R::zero();
                    for k in 0..4 {
                        v = v + t2[a][b][k][l] * f[k][cc];
                    }
                    t3[a][b][cc][l] = v;
                }
            }
        }
    }
    let mut out = [[[[R::zero(); 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for cc in 0..4 {
                for d in 0..4 {
                    let mut v = R::zero();
                    for l in 0..4 {
                        v = v + t3[a][b][cc][l] * f[l][d];
                    }
                    out[a][b][cc][d] = v;
                }
            }
        }
    }
    out
}

fn ricci_from_rm<R: Real>(rm: &[[[[R; 4]; 4]; 4]; 4]) -> ([[R; 4]; 4], R) {
    let mut ricci = [[R::zero(); 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            let mut v = R::zero();
            for c in 0..4 {
                v = v + rm[c][a][c][b];
            }
            ricci[a][b] = v;
        }
    }
    let s = linalg::trace(&ricci);
    (ricci, s)
}

impl<R: Real> PointGeometry<R> {
    /// The curvature operator on Λ² in the orthonormal frame basis
    /// e^i∧e^j: M[A][B] = Rm[i_A][j_A][i_B][j_B].
    pub fn curvature_operator(&self) -> [[R; 6]; 6] {
        let mut m = [[R::zero(); 6]; 6];
        for (pa, &(i, j)) in PAIRS.iter().enumerate() {
            for (pb, &(k, l)) in PAIRS.iter().enumerate() {
                m[pa][pb] = self.rm[i][j][k][l];
            }
        }
        m
    }

    /// |ric₀|²: squared norm of the trace-free Ricci tensor.
    pub fn ric0_norm2(&self) -> R {
        let quarter_s = self.s / R::of(4.0);
        let mut acc = R::zero();
        for a in 0..4 {
            for b in 0..4 {
                let dev = if a == b {
                    self.ricci[a][b] - quarter_s
                } else {
                    self.ricci[a][b]
                };
                acc = acc + dev * dev;
            }
        }
        acc
    }
}

/// Split the curvature operator at a point into its Λ± blocks.
pub fn decompose<R: Real>(pg: &PointGeometry<R>) -> CurvatureBlocks<R> {
    blocks_from_rm(&pg.rm, pg.s)
}

/// Block decomposition after rotating the orthonormal frame by `q`
/// (columns = new frame legs in old frame components). An orthogonal `q`
/// with negative determinant deliberately reverses the orientation,
/// which exchanges the roles of Λ⁺ and Λ⁻.
pub fn decompose_rotated<R: Real>(pg: &PointGeometry<R>, q: &[[R; 4]; 4]) -> CurvatureBlocks<R> {
    let rm = transform_rm(&pg.rm, q);
    let (_, s) = ricci_from_rm(&rm);
    blocks_from_rm(&rm, s)
}

fn blocks_from_rm<R: Real>(rm: &[[[[R; 4]; 4]; 4]; 4], s: R) -> CurvatureBlocks<R> {
    let mut m = [[R::zero(); 6]; 6];
    for (pa, &(i, j)) in PAIRS.iter().enumerate() {
        for (pb, &(k, l)) in PAIRS.iter().enumerate() {
            m[pa][pb] = rm[i][j][k][l];
        }
    }
    let b = lambda_basis::<R>();
    let split = linalg::congruence(&b, &m);
    let twelfth = s / R::of(12.0);
    let mut ul = [[R::zero(); 3]; 3];
    let mut lr = [[R::zero(); 3]; 3];
    let mut ur = [[R::zero(); 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            ul[i][j] = split[i][j];
            lr[i][j] = split[3 + i][3 + j];
            ur[i][j] = split[i][3 + j];
        }
        ul[i][i] = ul[i][i] - twelfth;
        lr[i][i] = lr[i][i] - twelfth;
    }
    CurvatureBlocks {
        wplus: WeylPlusOperator::project(ul),
        wminus: *WeylPlusOperator::project(lr).matrix(),
        ric0block: ur,
        s,
    }
}

/// Haar-ish random rotation of R⁴ (orthonormalized Gaussian matrix,
/// orientation-corrected to det +1).
pub fn random_rotation4<R: Real, G: Rng>(rng: &mut G) -> [[R; 4]; 4] {
    loop {
        let mut m = [[R::zero(); 4]; 4];
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = crate::sd_algebra::gaussian(rng);
            }
        }
        // Gram–Schmidt on columns
        let mut ok = true;
        for j in 0..4 {
            for prev in 0..j {
                let mut proj = R::zero();
                for a in 0..4 {
                    proj = proj + m[a][j] * m[a][prev];
                }
                for a in 0..4 {
                    m[a][j] = m[a][j] - proj * m[a][prev];
                }
            }
            let mut n2 = R::zero();
            for a in 0..4 {
                n2 = n2 + m[a][j] * m[a][j];
            }
            if n2.as_f64() < 1e-12 {
                ok = false;
                break;
            }
            let inv = n2.sqrt().recip();
            for a in 0..4 {
                m[a][j] = m[a][j] * inv;
            }
        }
        if !ok {
            continue;
        }
        if linalg::determinant(&m) < R::zero() {
            for a in 0..4 {
                m[a][3] = -m[a][3];
            }
        }
        return m;
    }
}
