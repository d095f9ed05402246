//! Hyperbolic (split-complex) numbers `x + j y` with `j² = 1`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize)]
pub struct HyperbolicNumber {
    pub x: f64,
    pub y: f64,
}

impl HyperbolicNumber {
    pub const ONE: HyperbolicNumber = HyperbolicNumber { x: 1.0, y: 0.0 };
    pub const J: HyperbolicNumber = HyperbolicNumber { x: 0.0, y: 1.0 };
    pub const ZERO: HyperbolicNumber = HyperbolicNumber { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        HyperbolicNumber { x, y }
    }

    pub const fn real(x: f64) -> Self {
        HyperbolicNumber { x, y: 0.0 }
    }

    pub fn conj(self) -> Self {
        HyperbolicNumber::new(self.x, -self.y)
    }

    /// |z|² = x² − y², which may be negative.
    pub fn norm_sq(self) -> f64 {
        self.x * self.x - self.y * self.y
    }

    pub fn scale(self, s: f64) -> Self {
        HyperbolicNumber::new(self.x * s, self.y * s)
    }

    /// In G₊, i.e. |z|² ≥ 0.
    pub fn is_nonnegative(self) -> bool {
        self.norm_sq() >= 0.0
    }

    /// In G₊*, i.e. |z|² > 0.
    pub fn is_positive(self) -> bool {
        self.norm_sq() > 0.0
    }

    /// 1/z = conj(z)/|z|², defined off the light cone.
    pub fn inverse(self) -> Option<Self> {
        let n = self.norm_sq();
        (n != 0.0).then(|| self.conj().scale(1.0 / n))
    }

    pub fn max_abs_component(self) -> f64 {
        self.x.abs().max(self.y.abs())
    }
}

/// e^{jθ} = cosh θ + j sinh θ; fails beyond the rapidity guard.
pub fn exp_j(theta: f64) -> Result<HyperbolicNumber> {
    if !theta.is_finite() || theta.abs() > tol::MAX_RAPIDITY {
        return Err(Error::RapidityOverflow(theta));
    }
    Ok(HyperbolicNumber::new(theta.cosh(), theta.sinh()))
}

/// z = sign · modulus · e^{jθ} for z ∈ G₊*.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HyperbolicPolar {
    pub sign: i8,
    pub modulus: f64,
    pub theta: f64,
}

impl HyperbolicPolar {
    pub fn to_number(self) -> Result<HyperbolicNumber> {
        Ok(exp_j(self.theta)?.scale(f64::from(self.sign) * self.modulus))
    }

    /// 1/z = (sign / |z|) e^{−jθ}.
    pub fn inverse(self) -> HyperbolicPolar {
        HyperbolicPolar {
            sign: self.sign,
            modulus: 1.0 / self.modulus,
            theta: -self.theta,
        }
    }
}

pub fn polar(z: HyperbolicNumber) -> Result<HyperbolicPolar> {
    let n = z.norm_sq();
    if n.is_nan() || n <= 0.0 {
        return Err(Error::NotInPositiveCone(n));
    }
    Ok(HyperbolicPolar {
        sign: if z.x > 0.0 { 1 } else { -1 },
        modulus: n.sqrt(),
        theta: (z.y / z.x).atanh(),
    })
}

impl Add for HyperbolicNumber {
    type Output = Self;
    fn add(self, r: Self) -> Self {
        HyperbolicNumber::new(self.x + r.x, self.y + r.y)
    }
}

impl Sub for HyperbolicNumber {
    type Output = Self;
    fn sub(self, r: Self) -> Self {
        HyperbolicNumber::new(self.x - r.x, self.y - r.y)
    }
}

impl Mul for HyperbolicNumber {
    type Output = Self;
    fn mul(self, r: Self) -> Self {
        HyperbolicNumber::new(self.x * r.x + self.y * r.y, self.x * r.y + self.y * r.x)
    }
}

impl Neg for HyperbolicNumber {
    type Output = Self;
    fn neg(self) -> Self {
        HyperbolicNumber::new(-self.x, -self.y)
    }
}

impl std::iter::Sum for HyperbolicNumber {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(HyperbolicNumber::ZERO, Add::add)
    }
}

impl fmt::Display for HyperbolicNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + j*{}", self.x, self.y)
    }
}
