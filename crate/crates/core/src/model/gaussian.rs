use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::Vec3;
use crate::{Error, Result};

/// `(2n-1)!!` with the convention `(-1)!! = 1`.
pub fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Normalized Cartesian Gaussian `N (x-X)^l (y-Y)^m (z-Z)^n exp(-a |r-R|^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPrimitive", into = "RawPrimitive")]
pub struct GaussianPrimitive {
    center: Vec3,
    exponent: f64,
    powers: [u32; 3],
    norm: f64,
}

#[derive(Serialize, Deserialize)]
struct RawPrimitive {
    center: [f64; 3],
    exponent: f64,
    powers: [u32; 3],
}

impl TryFrom<RawPrimitive> for GaussianPrimitive {
    type Error = Error;
    fn try_from(raw: RawPrimitive) -> Result<Self> {
        GaussianPrimitive::new(Vec3::from(raw.center), raw.exponent, raw.powers)
    }
}

impl From<GaussianPrimitive> for RawPrimitive {
    fn from(p: GaussianPrimitive) -> Self {
        RawPrimitive { center: p.center.into(), exponent: p.exponent, powers: p.powers }
    }
}

impl GaussianPrimitive {
    pub fn new(center: Vec3, exponent: f64, powers: [u32; 3]) -> Result<Self> {
        if !(exponent > 0.0 && exponent.is_finite()) {
            return Err(Error::InvalidInput(format!("gaussian exponent {exponent} must be positive")));
        }
        if !center.iter().all(|c| c.is_finite()) {
            return Err(Error::InvalidInput("gaussian center must be finite".into()));
        }
        let norm = Self::analytic_norm(exponent, powers);
        Ok(Self { center, exponent, powers, norm })
    }

    pub fn s(center: Vec3, exponent: f64) -> Result<Self> {
        Self::new(center, exponent, [0, 0, 0])
    }

    /// `N = (2a/pi)^{3/4} (4a)^{L/2} / sqrt((2l-1)!! (2m-1)!! (2n-1)!!)`.
    pub fn analytic_norm(exponent: f64, powers: [u32; 3]) -> f64 {
        let total: u32 = powers.iter().sum();
        let dfac: f64 = powers.iter().map(|&l| double_factorial(2 * l as i64 - 1)).product();
        (2.0 * exponent / PI).powf(0.75) * (4.0 * exponent).powf(total as f64 / 2.0) / dfac.sqrt()
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn powers(&self) -> [u32; 3] {
        self.powers
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// Same primitive moved to a new center.
    pub fn translated(&self, shift: Vec3) -> Self {
        Self { center: self.center + shift, ..*self }
    }

    pub fn value(&self, r: &Vec3) -> f64 {
        let d = r - self.center;
        let poly = d.x.powi(self.powers[0] as i32)
            * d.y.powi(self.powers[1] as i32)
            * d.z.powi(self.powers[2] as i32);
        self.norm * poly * (-self.exponent * d.norm_squared()).exp()
    }

    /// Analytic overlap `<self|other>` of the normalized primitives.
    pub fn overlap(&self, other: &Self) -> f64 {
        let p = self.exponent + other.exponent;
        let mut s = self.norm * other.norm;
        for axis in 0..3 {
            s *= overlap_1d(
                self.powers[axis],
                other.powers[axis],
                self.center[axis],
                other.center[axis],
                self.exponent,
                other.exponent,
                p,
            );
        }
        s
    }
}

fn overlap_1d(la: u32, lb: u32, a: f64, b: f64, alpha: f64, beta: f64, p: f64) -> f64 {
    let center = (alpha * a + beta * b) / p;
    let prefactor = (-alpha * beta / p * (a - b).powi(2)).exp();
    let pa = center - a;
    let pb = center - b;
    let mut sum = 0.0;
    for i in 0..=la {
        for j in 0..=lb {
            let k = i + j;
            if k % 2 == 1 {
                continue;
            }
            let moment = double_factorial(k as i64 - 1) / (2.0 * p).powi((k / 2) as i32)
                * (PI / p).sqrt();
            sum += binomial(la, i)
                * binomial(lb, j)
                * pa.powi((la - i) as i32)
                * pb.powi((lb - j) as i32)
                * moment;
        }
    }
    prefactor * sum
}
