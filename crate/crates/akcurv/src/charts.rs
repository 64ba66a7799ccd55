//! Concrete metric descriptions: coordinate charts and left-invariant
//! frames for the built-in manifolds.
//!
//! Chart metrics are functions of jet-valued coordinates, so one
//! evaluation delivers the metric together with its first and second
//! derivatives. Conventions pinned here:
//!
//! * Round spheres enter through stereographic coordinates,
//!   g = 4r⁴/(r²+|x|²)² δ.
//! * S²(a)×S²(b) uses polar angles (θ₁, φ₁, θ₂, φ₂) with the product
//!   orientation; the orthonormal coframe built from this coordinate
//!   order makes the product Kähler form e¹∧e² + e³∧e⁴ self-dual.
//! * The complex-space-form charts scale the Hermitian metric
//!   h_{jk̄} = [(1±|z|²)δ_jk ∓ z̄_j z_k]/(1±|z|²)² so that holomorphic
//!   sectional curvature is ±4, giving s = ±24 and, for the compact
//!   case, volume π²/2.
//! * The nilmanifold frame is ordered so its compatible symplectic form
//!   is e¹∧e² + e³∧e⁴, i.e. self-dual for the frame orientation: the
//!   only nonvanishing bracket is [e₁, e₃] = −e₄ (equivalently, the
//!   coframe satisfies de⁴ = e¹∧e³ with e¹, e², e³ closed).

use crate::geometry::{ChartMap, Domain};
use crate::jet::Jet2;
use crate::real::Real;

const TWO_PI: f64 = 2.0 * std::f64::consts::PI;

/// Flat torus [0,2π]⁴ with the identity metric.
pub struct FlatTorus;

impl<R: Real> ChartMap<R> for FlatTorus {
    fn metric(&self, _x: &[Jet2<R>; 4]) -> [[Jet2<R>; 4]; 4] {
        let mut g = [[Jet2::constant(R::zero()); 4]; 4];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = Jet2::constant(R::one());
        }
        g
    }
}

impl FlatTorus {
    pub fn domain() -> Domain {
        Domain {
            ranges: [[0.0, TWO_PI]; 4],
            periodic: [true; 4],
            unbounded: false,
        }
    }
}

/// Round 4-sphere of radius r in stereographic coordinates:
/// g = 4r⁴/(r² + |x|²)² δ.
pub struct RoundSphere {
    pub radius: f64,
}

impl<R: Real> ChartMap<R> for RoundSphere {
    fn metric(&self, x: &[Jet2<R>; 4]) -> [[Jet2<R>; 4]; 4] {
        let r2 = Jet2::constant(R::of(self.radius * self.radius));
        let mut q = r2;
        for xi in x {
            q = q + *xi * *xi;
        }
        let conf = (r2 * r2 * Jet2::constant(R::of(4.0))) / (q * q);
        let mut g = [[Jet2::constant(R::zero()); 4]; 4];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = conf;
        }
        g
    }
}

impl RoundSphere {
    /// The stereographic chart covers the sphere minus one point, so the
    /// domain is unbounded; the sampling box keeps random points at
    /// curvature-O(1) scale.
    pub fn domain(&self) -> Domain {
        let l = 1.5 * self.radius;
        Domain {
            ranges: [[-l, l]; 4],
            periodic: [false; 4],
            unbounded: true,
        }
    }
}

/// Product of round 2-spheres of radii a and b in polar angles
/// (θ₁, φ₁, θ₂, φ₂): g = diag(a², a²sin²θ₁, b², b²sin²θ₂).
pub struct ProductSpheres {
    pub a: f64,
    pub b: f64,
}

impl<R: Real> ChartMap<R> for ProductSpheres {
    fn metric(&self, x: &[Jet2<R>; 4]) -> [[Jet2<R>; 4]; 4] {
        let a2 = R::of(self.a * self.a);
        let b2 = R::of(self.b * self.b);
        let s1 = x[0].sin();
        let s2 = x[2].sin();
        let mut g = [[Jet2::constant(R::zero()); 4]; 4];
        g[0][0] = Jet2::constant(a2);
        g[1][1] = s1 * s1 * a2;
        g[2][2] = Jet2::constant(b2);
        g[3][3] = s2 * s2 * b2;
        g
    }
}

impl ProductSpheres {
    pub fn domain() -> Domain {
        Domain {
            ranges: [
                [0.0, std::f64::consts::PI],
                [0.0, TWO_PI],
                [0.0, std::f64::consts::PI],
                [0.0, TWO_PI],
            ],
            // polar angles are not periodic; azimuthal angles are
            periodic: [false, true, false, true],
            unbounded: false,
        }
    }
}

/// Complex space form in one affine chart of ℂ², real coordinates
/// (x₁, y₁, x₂, y₂) with z_j = x_j + i y_j.
///
/// `sign = +1`: Fubini–Study metric with holomorphic sectional
/// curvature 4 (s = 24), h_{jk̄} = [(1+|z|²)δ_jk − z̄_j z_k]/(1+|z|²)².
/// `sign = −1`: its hyperbolic dual on the unit ball |z| < 1 with
/// holomorphic sectional curvature −4 (s = −24).
///
/// The real metric is g = Re Σ h_{jk̄} dz^j ⊗ dz̄^k; writing h = A + iB
/// with A symmetric and B antisymmetric, the 4×4 matrix has blocks
/// A at (x_j,x_k) and (y_j,y_k), and ±B at (x_j,y_k)/(y_j,x_k).
pub struct ComplexSpaceForm {
    pub sign: f64,
}

impl<R: Real> ChartMap<R> for ComplexSpaceForm {
    fn metric(&self, x: &[Jet2<R>; 4]) -> [[Jet2<R>; 4]; 4] {
        let sign = Jet2::constant(R::of(self.sign));
        let one = Jet2::constant(R::one());
        let rho = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3];
        let w = one + sign * rho;
        let denom = (w * w).recip();
        let xs = [x[0], x[2]];
        let ys = [x[1], x[3]];
        let mut a = [[Jet2::constant(R::zero()); 2]; 2];
        let mut b = [[Jet2::constant(R::zero()); 2]; 2];
        for j in 0..2 {
            for k in 0..2 {
                // z̄_j z_k = (x_jx_k + y_jy_k) + i(x_jy_k − y_jx_k)
                let re = xs[j] * xs[k] + ys[j] * ys[k];
                let im = xs[j] * ys[k] - ys[j] * xs[k];
                let delta = if j == k { w } else { Jet2::constant(R::zero()) };
                a[j][k] = (delta - sign * re) * denom;
                b[j][k] = -(sign * im) * denom;
            }
        }
        let mut g = [[Jet2::constant(R::zero()); 4]; 4];
        for j in 0..2 {
            for k in 0..2 {
                g[2 * j][2 * k] = a[j][k];
                g[2 * j + 1][2 * k + 1] = a[j][k];
                g[2 * j][2 * k + 1] = b[j][k];
                g[2 * j + 1][2 * k] = -b[j][k];
            }
        }
        g
    }

    fn contains(&self, x: &[R; 4]) -> bool {
        if self.sign > 0.0 {
            return true;
        }
        let rho: f64 = x.iter().map(|v| v.as_f64() * v.as_f64()).sum();
        rho < 1.0
    }
}

impl ComplexSpaceForm {
    pub fn fubini_study() -> Self {
        ComplexSpaceForm { sign: 1.0 }
    }

    pub fn complex_hyperbolic() -> Self {
        ComplexSpaceForm { sign: -1.0 }
    }

    /// The affine chart covers all of the compact space form but a line
    /// at infinity, so the Fubini–Study domain is unbounded; the
    /// hyperbolic dual lives on the unit ball.
    pub fn domain(&self) -> Domain {
        let l = if self.sign > 0.0 { 2.0 } else { 0.7 };
        Domain {
            ranges: [[-l, l]; 4],
            periodic: [false; 4],
            unbounded: self.sign > 0.0,
        }
    }
}

/// Real hyperbolic 4-space of curvature −1 in the Poincaré ball:
/// g = 4/(1−|x|²)² δ on |x| < 1.
pub struct HyperbolicBall;

impl<R: Real> ChartMap<R> for HyperbolicBall {
    fn metric(&self, x: &[Jet2<R>; 4]) -> [[Jet2<R>; 4]; 4] {
        let one = Jet2::constant(R::one());
        let mut q = one;
        for xi in x {
            q = q - *xi * *xi;
        }
        let conf = Jet2::constant(R::of(4.0)) / (q * q);
        let mut g = [[Jet2::constant(R::zero()); 4]; 4];
        for (i, row) in g.iter_mut().enumerate() {
            row[i] = conf;
        }
        g
    }

    fn contains(&self, x: &[R; 4]) -> bool {
        let rho: f64 = x.iter().map(|v| v.as_f64() * v.as_f64()).sum();
        rho < 1.0
    }
}

impl HyperbolicBall {
    pub fn domain() -> Domain {
        Domain {
            ranges: [[-0.45, 0.45]; 4],
            periodic: [false; 4],
            unbounded: false,
        }
    }
}

/// Structure constants c[k][i][j] of [e_i, e_j] = c^k_{ij} e_k for the
/// nilmanifold frame: only [e₁, e₃] = −e₄ (Heisenberg × circle, ordered
/// so that e¹∧e² + e³∧e⁴ is a closed self-dual form of the frame
/// orientation).
pub fn nilmanifold_structure_constants<R: Real>() -> [[[R; 4]; 4]; 4] {
    let mut c = [[[R::zero(); 4]; 4]; 4];
    c[3][0][2] = -R::one();
    c[3][2][0] = R::one();
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn value_at<C: ChartMap<f64>>(chart: &C, p: [f64; 4]) -> [[f64; 4]; 4] {
        let x = Jet2::point(&p);
        let gj = chart.metric(&x);
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                g[i][j] = gj[i][j].val;
            }
        }
        g
    }

    #[test]
    fn sphere_conformal_factor() {
        let chart = RoundSphere { radius: 1.0 };
        let g = value_at(&chart, [0.0; 4]);
        assert_abs_diff_eq!(g[0][0], 4.0, epsilon = 1e-15);
        let g = value_at(&chart, [1.0, 0.0, 0.0, 0.0]);
        assert_abs_diff_eq!(g[2][2], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn fubini_study_symmetric_positive() {
        let chart = ComplexSpaceForm::fubini_study();
        let p = [0.3, -0.2, 0.5, 0.1];
        let g = value_at(&chart, p);
        for i in 0..4 {
            for j in 0..4 {
                assert_abs_diff_eq!(g[i][j], g[j][i], epsilon = 1e-15);
            }
        }
        assert!(crate::linalg::is_spd(&g));
        // at the origin the chart is isometric to the flat model
        let g0 = value_at(&chart, [0.0; 4]);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(g0[i][j], want, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn complex_hyperbolic_spd_inside_ball() {
        let chart = ComplexSpaceForm::complex_hyperbolic();
        let g = value_at(&chart, [0.4, 0.1, -0.3, 0.2]);
        assert!(crate::linalg::is_spd(&g));
        assert!(<ComplexSpaceForm as ChartMap<f64>>::contains(
            &chart,
            &[0.5, 0.0, 0.0, 0.0]
        ));
        assert!(!<ComplexSpaceForm as ChartMap<f64>>::contains(
            &chart,
            &[0.8, 0.8, 0.0, 0.0]
        ));
    }

    #[test]
    fn nilmanifold_constants_antisymmetric() {
        let c = nilmanifold_structure_constants::<f64>();
        for k in 0..4 {
            for i in 0..4 {
                for j in 0..4 {
                    assert_eq!(c[k][i][j], -c[k][j][i]);
                }
            }
        }
        assert_eq!(c[3][0][2], -1.0);
    }
}
