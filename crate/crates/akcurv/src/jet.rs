//! Forward-mode automatic differentiation in four variables.
//!
//! Chart-mode metrics are evaluated on [`Jet2`] scalars, which carry a
//! value, a gradient and a full Hessian through arithmetic. Christoffel
//! symbols need one further derivative of expressions that already involve
//! first derivatives of the metric; rather than third-order jets, the
//! curvature code re-seeds [`Jet1`] scalars from slices of a `Jet2`
//! ([`Jet2::value_jet1`], [`Jet2::partial_jet1`]) and lets ordinary
//! first-order arithmetic — including the generic matrix inverse —
//! propagate the missing derivative. Everything stays exact to rounding;
//! no finite differences are involved.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::real::{Real, Scalarlike};

pub const DIM: usize = 4;

/// Value plus gradient in four variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1<R> {
    pub val: R,
    pub grad: [R; DIM],
}

/// Value, gradient and Hessian in four variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<R> {
    pub val: R,
    pub grad: [R; DIM],
    pub hess: [[R; DIM]; DIM],
}

impl<R: Real> Jet1<R> {
    pub fn constant(c: R) -> Self {
        Jet1 {
            val: c,
            grad: [R::zero(); DIM],
        }
    }

    /// The coordinate function `x_i`.
    pub fn variable(value: R, i: usize) -> Self {
        let mut grad = [R::zero(); DIM];
        grad[i] = R::one();
        Jet1 { val: value, grad }
    }
}

impl<R: Real> Jet2<R> {
    pub fn constant(c: R) -> Self {
        Jet2 {
            val: c,
            grad: [R::zero(); DIM],
            hess: [[R::zero(); DIM]; DIM],
        }
    }

    /// The coordinate function `x_i`.
    pub fn variable(value: R, i: usize) -> Self {
        let mut grad = [R::zero(); DIM];
        grad[i] = R::one();
        Jet2 {
            val: value,
            grad,
            hess: [[R::zero(); DIM]; DIM],
        }
    }

    /// Seed a full coordinate point.
    pub fn point(x: &[R; DIM]) -> [Self; DIM] {
        [
            Self::variable(x[0], 0),
            Self::variable(x[1], 1),
            Self::variable(x[2], 2),
            Self::variable(x[3], 3),
        ]
    }

    /// This quantity as a first-order jet (drop the Hessian).
    pub fn value_jet1(&self) -> Jet1<R> {
        Jet1 {
            val: self.val,
            grad: self.grad,
        }
    }

    /// The partial derivative `∂_a(self)` as a first-order jet: its value
    /// is `grad[a]` and its gradient is row `a` of the Hessian.
    pub fn partial_jet1(&self, a: usize) -> Jet1<R> {
        Jet1 {
            val: self.grad[a],
            grad: self.hess[a],
        }
    }

    /// Apply a smooth unary function given `(f, f', f'')` at the value.
    fn chain(self, f: R, df: R, d2f: R) -> Self {
        let mut grad = [R::zero(); DIM];
        let mut hess = [[R::zero(); DIM]; DIM];
        for a in 0..DIM {
            grad[a] = df * self.grad[a];
            for b in 0..DIM {
                hess[a][b] = d2f * self.grad[a] * self.grad[b] + df * self.hess[a][b];
            }
        }
        Jet2 { val: f, grad, hess }
    }

    pub fn recip(self) -> Self {
        let v = self.val.recip();
        self.chain(v, -v * v, R::of(2.0) * v * v * v)
    }

    pub fn sqrt(self) -> Self {
        let s = self.val.sqrt();
        let ds = R::of(0.5) / s;
        self.chain(s, ds, -ds / (R::of(2.0) * self.val))
    }

    pub fn sin(self) -> Self {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = (self.val.sin(), self.val.cos());
        self.chain(c, -s, -c)
    }

    pub fn exp(self) -> Self {
        let e = self.val.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let v = self.val;
        self.chain(v.ln(), v.recip(), -(v * v).recip())
    }

    pub fn cosh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(c, s, c)
    }

    pub fn sinh(self) -> Self {
        let (s, c) = (self.val.sinh(), self.val.cosh());
        self.chain(s, c, s)
    }

    pub fn powi(self, n: i32) -> Self {
        match n {
            0 => Self::constant(R::one()),
            1 => self,
            _ if n < 0 => self.recip().powi(-n),
            _ => {
                // square-and-multiply keeps rounding low for the common
                // small exponents
                let half = self.powi(n / 2);
                let sq = half * half;
                if n % 2 == 0 {
                    sq
                } else {
                    sq * self
                }
            }
        }
    }
}

macro_rules! jet_binops {
    ($jet:ident) => {
        impl<R: Real> Add for $jet<R> {
            type Output = Self;
            fn add(self, rhs: Self) -> Self {
                let mut out = self;
                out.add_assign_parts(&rhs);
                out
            }
        }

        impl<R: Real> Sub for $jet<R> {
            type Output = Self;
            fn sub(self, rhs: Self) -> Self {
                self + (-rhs)
            }
        }

        impl<R: Real> Div for $jet<R> {
            type Output = Self;
            fn div(self, rhs: Self) -> Self {
                self * rhs.recip()
            }
        }

        impl<R: Real> Zero for $jet<R> {
            fn zero() -> Self {
                Self::constant(R::zero())
            }
            fn is_zero(&self) -> bool {
                *self == Self::zero()
            }
        }

        impl<R: Real> One for $jet<R> {
            fn one() -> Self {
                Self::constant(R::one())
            }
        }

        impl<R: Real> Scalarlike for $jet<R> {
            fn mag(self) -> f64 {
                self.val.mag()
            }
        }

        /// Scale by a plain scalar.
        impl<R: Real> Mul<R> for $jet<R> {
            type Output = Self;
            fn mul(self, rhs: R) -> Self {
                self * Self::constant(rhs)
            }
        }
    };
}

impl<R: Real> Jet1<R> {
    fn add_assign_parts(&mut self, rhs: &Self) {
        self.val = self.val + rhs.val;
        for a in 0..DIM {
            self.grad[a] = self.grad[a] + rhs.grad[a];
        }
    }

    pub fn recip(self) -> Self {
        let v = self.val.recip();
        let dv = -v * v;
        let mut grad = [R::zero(); DIM];
        for a in 0..DIM {
            grad[a] = dv * self.grad[a];
        }
        Jet1 { val: v, grad }
    }
}

impl<R: Real> Jet2<R> {
    fn add_assign_parts(&mut self, rhs: &Self) {
        self.val = self.val + rhs.val;
        for a in 0..DIM {
            self.grad[a] = self.grad[a] + rhs.grad[a];
            for b in 0..DIM {
                self.hess[a][b] = self.hess[a][b] + rhs.hess[a][b];
            }
        }
    }
}

impl<R: Real> Neg for Jet1<R> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut out = self;
        out.val = -out.val;
        for a in 0..DIM {
            out.grad[a] = -out.grad[a];
        }
        out
    }
}

impl<R: Real> Neg for Jet2<R> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut out = self;
        out.val = -out.val;
        for a in 0..DIM {
            out.grad[a] = -out.grad[a];
            for b in 0..DIM {
                out.hess[a][b] = -out.hess[a][b];
            }
        }
        out
    }
}

impl<R: Real> Mul for Jet1<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut grad = [R::zero(); DIM];
        for a in 0..DIM {
            grad[a] = self.grad[a] * rhs.val + self.val * rhs.grad[a];
        }
        Jet1 {
            val: self.val * rhs.val,
            grad,
        }
    }
}

impl<R: Real> Mul for Jet2<R> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut grad = [R::zero(); DIM];
        let mut hess = [[R::zero(); DIM]; DIM];
        for a in 0..DIM {
            grad[a] = self.grad[a] * rhs.val + self.val * rhs.grad[a];
            for b in 0..DIM {
                hess[a][b] = self.hess[a][b] * rhs.val
                    + self.grad[a] * rhs.grad[b]
                    + self.grad[b] * rhs.grad[a]
                    + self.val * rhs.hess[a][b];
            }
        }
        Jet2 {
            val: self.val * rhs.val,
            grad,
            hess,
        }
    }
}

jet_binops!(Jet1);
jet_binops!(Jet2);
