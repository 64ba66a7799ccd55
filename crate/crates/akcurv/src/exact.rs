//! Exact rational arithmetic for closed-form reference values.
//!
//! Integrals over the homogeneous model spaces evaluate in closed form as
//! rationals times a power of π. Keeping the rational part exact until the
//! final comparison means oracle constants in tests carry no rounding of
//! their own: `Frac::new(256, 3).times_pi_pow(2)` is the number, not an
//! approximation of it.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

/// Reduced fraction of `i64`s with positive denominator.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Frac {
    num: i64,
    den: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl Frac {
    pub const ZERO: Frac = Frac { num: 0, den: 1 };
    pub const ONE: Frac = Frac { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Frac {
        assert!(den != 0, "fraction with zero denominator");
        let g = gcd(num, den).max(1);
        let sign = den.signum();
        Frac {
            num: sign * num / g,
            den: sign * den / g,
        }
    }

    pub fn int(n: i64) -> Frac {
        Frac { num: n, den: 1 }
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// The value of this fraction times `π^k`, as `f64`.
    pub fn times_pi_pow(self, k: u32) -> f64 {
        self.to_f64() * std::f64::consts::PI.powi(k as i32)
    }
}

impl Add for Frac {
    type Output = Frac;
    fn add(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.den + rhs.num * self.den, self.den * rhs.den)
    }
}

impl Sub for Frac {
    type Output = Frac;
    fn sub(self, rhs: Frac) -> Frac {
        self + (-rhs)
    }
}

impl Mul for Frac {
    type Output = Frac;
    fn mul(self, rhs: Frac) -> Frac {
        Frac::new(self.num * rhs.num, self.den * rhs.den)
    }
}

impl Div for Frac {
    type Output = Frac;
    fn div(self, rhs: Frac) -> Frac {
        assert!(rhs.num != 0, "division by zero fraction");
        Frac::new(self.num * rhs.den, self.den * rhs.num)
    }
}

impl Neg for Frac {
    type Output = Frac;
    fn neg(self) -> Frac {
        Frac {
            num: -self.num,
            den: self.den,
        }
    }
}

impl fmt::Display for Frac {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}
