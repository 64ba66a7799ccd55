//! Pointwise algebra of 2-forms at a single oriented tangent space.
//!
//! With respect to an oriented orthonormal coframe e¹..e⁴, the space Λ² is
//! six-dimensional with ordered basis
//!
//! ```text
//! e¹∧e², e¹∧e³, e¹∧e⁴, e²∧e³, e²∧e⁴, e³∧e⁴
//! ```
//!
//! and inner product ⟨α,β⟩ = ½ Σ_{ij} α_ij β_ij, i.e. the plain dot
//! product of the six components. The Hodge star is an involution whose
//! ±1 eigenspaces Λ± are each three-dimensional; Λ⁺ is spanned by
//!
//! ```text
//! ω¹ = e¹∧e² + e³∧e⁴,  ω² = e¹∧e³ + e⁴∧e²,  ω³ = e¹∧e⁴ + e²∧e³,
//! ```
//!
//! each of norm √2, so ωⁱ/√2 is the orthonormal basis in which self-dual
//! vectors and the self-dual Weyl operator are expressed. A compatible
//! symplectic form has |ω|² = 2 — it is √2 times a unit self-dual
//! direction — and that normalization is what makes the curvature
//! identities below come out with their stated coefficients.
//!
//! Besides the star/projection plumbing, this module implements the
//! quadratic-form quantities attached to the self-dual Weyl operator W:
//! W(ω,ω), the norm of the component of W(ω) orthogonal to ω, and the
//! pointwise gap
//!
//! ```text
//! |W|² − |W(ω)^⊥|² − (3/8)·W(ω,ω)²  ≥  0,
//! ```
//!
//! together with a projected-gradient minimization oracle used to probe
//! the equality locus of that inequality.

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg;
use crate::real::Real;

/// A 2-form at a point, in the ordered coframe basis
/// e¹∧e², e¹∧e³, e¹∧e⁴, e²∧e³, e²∧e⁴, e³∧e⁴.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoForm<R> {
    pub c: [R; 6],
}

/// Element of Λ⁺ in the orthonormal basis ω¹/√2, ω²/√2, ω³/√2.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SelfDualVector<R> {
    pub v: [R; 3],
}

/// Element of Λ⁻ in the orthonormal basis built from
/// e¹∧e²−e³∧e⁴, e¹∧e³−e⁴∧e², e¹∧e⁴−e²∧e³ (each scaled by 1/√2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AntiSelfDualVector<R> {
    pub v: [R; 3],
}

impl<R: Real> TwoForm<R> {
    pub fn new(c: [R; 6]) -> Self {
        TwoForm { c }
    }

    pub fn zero() -> Self {
        TwoForm { c: [R::zero(); 6] }
    }

    /// ⟨α,β⟩ = ½ Σ_{ij} α_ij β_ij = Σ_{i<j} α_ij β_ij.
    pub fn inner(&self, other: &Self) -> R {
        linalg::dot(&self.c, &other.c)
    }

    pub fn norm2(&self) -> R {
        self.inner(self)
    }
}

/// Hodge star on Λ² in an oriented orthonormal coframe. Involution;
/// isometry; fixes Λ⁺ and negates Λ⁻.
pub fn hodge_star<R: Real>(alpha: &TwoForm<R>) -> TwoForm<R> {
    let c = &alpha.c;
    TwoForm {
        c: [c[5], -c[4], c[3], c[2], -c[1], c[0]],
    }
}

/// Component of α in Λ⁺, in the orthonormal basis ωⁱ/√2.
pub fn project_plus<R: Real>(alpha: &TwoForm<R>) -> SelfDualVector<R> {
    let c = &alpha.c;
    let inv_rt2 = R::of(0.5).sqrt();
    SelfDualVector {
        v: [
            (c[0] + c[5]) * inv_rt2,
            (c[1] - c[4]) * inv_rt2,
            (c[2] + c[3]) * inv_rt2,
        ],
    }
}

/// Component of α in Λ⁻, in the orthonormal anti-self-dual basis.
pub fn project_minus<R: Real>(alpha: &TwoForm<R>) -> AntiSelfDualVector<R> {
    let c = &alpha.c;
    let inv_rt2 = R::of(0.5).sqrt();
    AntiSelfDualVector {
        v: [
            (c[0] - c[5]) * inv_rt2,
            (c[1] + c[4]) * inv_rt2,
            (c[2] - c[3]) * inv_rt2,
        ],
    }
}

/// The 2-form with the given Λ⁺ component and vanishing Λ⁻ part.
pub fn embed_plus<R: Real>(v: &SelfDualVector<R>) -> TwoForm<R> {
    let inv_rt2 = R::of(0.5).sqrt();
    let [a, b, c] = v.v;
    TwoForm {
        c: [
            a * inv_rt2,
            b * inv_rt2,
            c * inv_rt2,
            c * inv_rt2,
            -(b * inv_rt2),
            a * inv_rt2,
        ],
    }
}

/// The 2-form with the given Λ⁻ component and vanishing Λ⁺ part.
pub fn embed_minus<R: Real>(v: &AntiSelfDualVector<R>) -> TwoForm<R> {
    let inv_rt2 = R::of(0.5).sqrt();
    let [a, b, c] = v.v;
    TwoForm {
        c: [
            a * inv_rt2,
            b * inv_rt2,
            c * inv_rt2,
            -(c * inv_rt2),
            b * inv_rt2,
            -(a * inv_rt2),
        ],
    }
}

impl<R: Real> SelfDualVector<R> {
    pub fn new(v: [R; 3]) -> Self {
        SelfDualVector { v }
    }

    pub fn zero() -> Self {
        SelfDualVector { v: [R::zero(); 3] }
    }

    pub fn inner(&self, other: &Self) -> R {
        linalg::dot(&self.v, &other.v)
    }

    /// Equals the 2-form norm squared of the corresponding element of Λ⁺.
    pub fn norm2(&self) -> R {
        self.inner(self)
    }

    pub fn scale(&self, s: R) -> Self {
        SelfDualVector {
            v: [self.v[0] * s, self.v[1] * s, self.v[2] * s],
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        SelfDualVector {
            v: [
                self.v[0] - other.v[0],
                self.v[1] - other.v[1],
                self.v[2] - other.v[2],
            ],
        }
    }

    /// Coordinates in the orthonormal basis ωⁱ/√2 of Λ⁺.
    pub fn components(&self) -> [R; 3] {
        self.v
    }
}

impl<R: Real> AntiSelfDualVector<R> {
    /// Coordinates in the orthonormal basis ω̄ⁱ/√2 of Λ⁻.
    pub fn components(&self) -> [R; 3] {
        self.v
    }
}

impl<R: Real> AntiSelfDualVector<R> {
    pub fn new(v: [R; 3]) -> Self {
        AntiSelfDualVector { v }
    }

    pub fn norm2(&self) -> R {
        linalg::dot(&self.v, &self.v)
    }
}

/// The self-dual Weyl curvature as a symmetric trace-free operator on Λ⁺,
/// in the orthonormal basis ωⁱ/√2. Its squared Frobenius norm is |W₊|²;
/// for the operator diag(s/6, −s/12, −s/12) of a Kähler surface this is
/// s²/24 exactly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeylPlusOperator<R> {
    m: [[R; 3]; 3],
}

impl<R: Real> WeylPlusOperator<R> {
    /// Wrap a matrix, insisting on symmetry and tracelessness to 1e−12.
    pub fn new(m: [[R; 3]; 3]) -> Result<Self> {
        let tol = 1e-12;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let skew = (m[i][j] - m[j][i]).as_f64().abs();
                if skew > tol {
                    return Err(Error::DegenerateInput(format!(
                        "Weyl operator not symmetric: |m[{i}][{j}] - m[{j}][{i}]| = {skew:.3e}"
                    )));
                }
            }
        }
        let tr = linalg::trace(&m).as_f64().abs();
        if tr > tol {
            return Err(Error::DegenerateInput(format!(
                "Weyl operator not trace-free: |tr| = {tr:.3e}"
            )));
        }
        Ok(WeylPlusOperator { m })
    }

    /// Symmetrize and remove the trace, then wrap. For raw curvature
    /// blocks and random sampling, where the input is only approximately
    /// in the Weyl subspace.
    pub fn project(m: [[R; 3]; 3]) -> Self {
        let mut sym = [[R::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                sym[i][j] = (m[i][j] + m[j][i]) * R::of(0.5);
            }
        }
        let third = linalg::trace(&sym) / R::of(3.0);
        for (i, row) in sym.iter_mut().enumerate() {
            row[i] = row[i] - third;
        }
        WeylPlusOperator { m: sym }
    }

    pub fn zero() -> Self {
        WeylPlusOperator {
            m: [[R::zero(); 3]; 3],
        }
    }

    /// The operator diag(s/6, −s/12, −s/12) of a Kähler surface with
    /// scalar curvature s, in a basis whose first vector is ω/√2.
    pub fn kahler_type(s: R) -> Self {
        let mut m = [[R::zero(); 3]; 3];
        m[0][0] = s / R::of(6.0);
        m[1][1] = -(s / R::of(12.0));
        m[2][2] = -(s / R::of(12.0));
        WeylPlusOperator { m }
    }

    pub fn matrix(&self) -> &[[R; 3]; 3] {
        &self.m
    }

    /// |W₊|²: squared Frobenius norm of the operator matrix.
    pub fn norm2(&self) -> R {
        linalg::frobenius2(&self.m)
    }

    /// Eigenvalues in descending order.
    pub fn eigenvalues(&self) -> [R; 3] {
        linalg::sym3_eigenvalues(&self.m)
    }

    /// Conjugate by a rotation of Λ⁺: Q W Qᵀ.
    pub fn rotate(&self, q: &[[R; 3]; 3]) -> Self {
        let qt = linalg::transpose(q);
        WeylPlusOperator {
            m: linalg::mat_mul(&linalg::mat_mul(q, &self.m), &qt),
        }
    }
}

/// W applied to a self-dual vector.
pub fn w_apply<R: Real>(w: &WeylPlusOperator<R>, omega: &SelfDualVector<R>) -> SelfDualVector<R> {
    SelfDualVector {
        v: linalg::mat_vec(&w.m, &omega.v),
    }
}

/// The quadratic form W(ω,ω) = ⟨W(ω), ω⟩.
pub fn w_quadratic<R: Real>(w: &WeylPlusOperator<R>, omega: &SelfDualVector<R>) -> R {
    w_apply(w, omega).inner(omega)
}

/// |W(ω)^⊥|²: squared norm of the component of W(ω) orthogonal to ω.
/// Component of W(ω) orthogonal to ω.
pub fn w_perp<R: Real>(
    w: &WeylPlusOperator<R>,
    omega: &SelfDualVector<R>,
) -> Result<SelfDualVector<R>> {
    let n2 = omega.norm2();
    if n2.as_f64() == 0.0 {
        return Err(Error::DegenerateInput("w_perp of a zero-norm ω".into()));
    }
    let wo = w_apply(w, omega);
    let q = wo.inner(omega);
    Ok(wo.sub(&omega.scale(q / n2)))
}

pub fn w_perp_norm2<R: Real>(w: &WeylPlusOperator<R>, omega: &SelfDualVector<R>) -> Result<R> {
    Ok(w_perp(w, omega)?.norm2())
}

/// The pointwise gap |W|² − |W(ω)^⊥|² − (3/8)·W(ω,ω)², which is
/// nonnegative for every trace-free symmetric W and |ω|² = 2.
///
/// In a basis adapted to ω (first vector ω/√2, W = [[a,b,c],[b,d,e],[c,e,f]]
/// with a+d+f = 0) the gap evaluates to (d−f)²/2 + 2e²: it measures how far
/// the restriction of W to ω^⊥ is from a multiple of the identity, and does
/// not involve the mixed components b, c at all. Equality therefore holds
/// exactly on the configurations with a degenerate eigenvalue pair on ω^⊥,
/// whether or not W(ω)^⊥ vanishes.
pub fn lemma1_gap<R: Real>(w: &WeylPlusOperator<R>, omega: &SelfDualVector<R>) -> Result<R> {
    let n2 = omega.norm2().as_f64();
    if (n2 - 2.0).abs() > 1e-12 {
        return Err(Error::NormConstraint {
            expected: 2.0,
            got: n2,
        });
    }
    let q = w_quadratic(w, omega);
    let perp2 = w_perp_norm2(w, omega)?;
    Ok(w.norm2() - perp2 - R::of(3.0 / 8.0) * q * q)
}

/// Standard normal via Box–Muller.
pub fn gaussian<R: Real, G: Rng>(rng: &mut G) -> R {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    R::of((-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos())
}

/// Gaussian sample from the 5-dimensional space of trace-free symmetric
/// operators on Λ⁺ (independent standard normals on the six matrix slots,
/// then projected; the projection preserves rotation invariance).
pub fn sample_weyl<R: Real, G: Rng>(rng: &mut G) -> WeylPlusOperator<R> {
    let mut m = [[R::zero(); 3]; 3];
    for i in 0..3 {
        for j in i..3 {
            let x = gaussian(rng);
            m[i][j] = x;
            m[j][i] = x;
        }
    }
    WeylPlusOperator::project(m)
}

/// Uniform sample from the sphere |ω|² = 2 in Λ⁺.
pub fn sample_omega<R: Real, G: Rng>(rng: &mut G) -> SelfDualVector<R> {
    loop {
        let v: [R; 3] = [gaussian(rng), gaussian(rng), gaussian(rng)];
        let n2 = linalg::dot(&v, &v);
        if n2.as_f64() > 1e-12 {
            let s = (R::of(2.0) / n2).sqrt();
            return SelfDualVector::new([v[0] * s, v[1] * s, v[2] * s]);
        }
    }
}

/// Rotation of Λ⁺ from three Euler angles (product of Givens rotations).
pub fn rotation<R: Real>(a: R, b: R, c: R) -> [[R; 3]; 3] {
    fn givens<R: Real>(i: usize, j: usize, t: R) -> [[R; 3]; 3] {
        let mut q = linalg::identity::<R, 3>();
        q[i][i] = t.cos();
        q[j][j] = t.cos();
        q[i][j] = -t.sin();
        q[j][i] = t.sin();
        q
    }
    linalg::mat_mul(
        &linalg::mat_mul(&givens(0, 1, a), &givens(0, 2, b)),
        &givens(1, 2, c),
    )
}

/// Outcome of one projected-gradient run of the gap minimization.
#[derive(Clone, Copy, Debug)]
pub struct GapMinimizer<R> {
    /// Final operator (unit Frobenius norm).
    pub w: WeylPlusOperator<R>,
    /// Gap at the final operator.
    pub gap: R,
    /// |W(ω)^⊥|² at the final operator.
    pub perp_norm2: R,
    /// Residual of the degenerate-pair condition on ω^⊥: the Frobenius
    /// distance from the restriction of W to ω^⊥ to its identity
    /// component. Zero exactly on the equality locus of the gap.
    pub pair_split: R,
    pub iterations: usize,
}

/// Minimize the gap over unit-Frobenius trace-free symmetric W at fixed
/// |ω|² = 2, by projected gradient descent from the given start.
///
/// The gradient of gap(W) = |W|² − |Wω|² + W(ω,ω)²/8 in the symmetric
/// matrices is 2W − (Wω)ωᵀ − ω(Wω)ᵀ + (q/4)ωωᵀ; each step projects it to
/// the trace-free subspace and to the tangent space of the Frobenius
/// sphere, then renormalizes. Descent directions exist only where the gap
/// is positive, so the iteration converges onto the equality locus; the
/// mixed components of W (those pairing ω with ω^⊥) are flat directions
/// of the gap and survive to the minimizer.
pub fn minimize_gap<R: Real>(
    start: &WeylPlusOperator<R>,
    omega: &SelfDualVector<R>,
    max_iter: usize,
) -> Result<GapMinimizer<R>> {
    let n2 = omega.norm2().as_f64();
    if (n2 - 2.0).abs() > 1e-12 {
        return Err(Error::NormConstraint {
            expected: 2.0,
            got: n2,
        });
    }
    let eta = R::of(0.05);
    let mut m = start.m;
    normalize(&mut m);
    let mut iterations = 0;
    for it in 0..max_iter {
        iterations = it + 1;
        let w = WeylPlusOperator { m };
        let gap = lemma1_gap(&w, omega)?;
        if gap.as_f64() < 1e-14 {
            break;
        }
        let wo = linalg::mat_vec(&m, &omega.v);
        let q = linalg::dot(&wo, &omega.v);
        let mut grad = [[R::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                grad[i][j] = R::of(2.0) * m[i][j] - wo[i] * omega.v[j] - omega.v[i] * wo[j]
                    + q * R::of(0.25) * omega.v[i] * omega.v[j];
            }
        }
        // stay trace-free
        let third = linalg::trace(&grad) / R::of(3.0);
        for (i, row) in grad.iter_mut().enumerate() {
            row[i] = row[i] - third;
        }
        // stay on the Frobenius sphere
        let radial = frob_inner(&grad, &m);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = m[i][j] - eta * (grad[i][j] - radial * m[i][j]);
            }
        }
        normalize(&mut m);
    }
    let w = WeylPlusOperator { m };
    let gap = lemma1_gap(&w, omega)?;
    let perp_norm2 = w_perp_norm2(&w, omega)?;
    Ok(GapMinimizer {
        w,
        gap,
        perp_norm2,
        pair_split: pair_split(&w, omega),
        iterations,
    })
}

/// Frobenius distance of W restricted to ω^⊥ ⊂ Λ⁺ from a multiple of the
/// identity on ω^⊥; vanishes exactly where the gap does.
pub fn pair_split<R: Real>(w: &WeylPlusOperator<R>, omega: &SelfDualVector<R>) -> R {
    let half = R::of(0.5);
    let u = omega.scale(omega.norm2().sqrt().recip());
    // P = I − uuᵀ, B = P W P, split² = |B|² − tr(B)²/2
    let mut p = linalg::identity::<R, 3>();
    for i in 0..3 {
        for j in 0..3 {
            p[i][j] = p[i][j] - u.v[i] * u.v[j];
        }
    }
    let b = linalg::mat_mul(&p, &linalg::mat_mul(&w.m, &p));
    let s2 = linalg::frobenius2(&b) - linalg::trace(&b) * linalg::trace(&b) * half;
    s2.max(R::zero()).sqrt()
}

fn frob_inner<R: Real>(a: &[[R; 3]; 3], b: &[[R; 3]; 3]) -> R {
    let mut acc = R::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc = acc + a[i][j] * b[i][j];
        }
    }
    acc
}

fn normalize<R: Real>(m: &mut [[R; 3]; 3]) {
    let n = linalg::frobenius2(m).sqrt();
    if n.as_f64() > 0.0 {
        let inv = n.recip();
        for row in m.iter_mut() {
            for x in row.iter_mut() {
                *x = *x * inv;
            }
        }
    }
}
