//! Working-precision scalars.
//!
//! Everything that must run at both precision tiers is written against the
//! [`Real`] trait, implemented for `f64` and for the double-double type [`Dd`]
//! (about 31 significant digits).

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Rem, Sub, SubAssign};

use qd::Quad;
use serde::{Deserialize, Serialize};

/// Precision tier selectable from configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Tier {
    #[default]
    Double,
    Extended,
}

impl Tier {
    pub fn parse(s: &str) -> Option<Tier> {
        match s.trim().to_ascii_lowercase().as_str() {
            "double" => Some(Tier::Double),
            "extended" => Some(Tier::Extended),
            _ => None,
        }
    }

    /// Tier from `FHLAB_PRECISION` if set and valid, else `default`.
    pub fn from_env_or(default: Tier) -> Tier {
        std::env::var("FHLAB_PRECISION").ok().and_then(|v| Tier::parse(&v)).unwrap_or(default)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Tier::Double => "double",
            Tier::Extended => "extended",
        }
    }
}

/// Pivot selection used by the LU engines.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Pivoting {
    #[default]
    Partial,
    Complete,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub struct PrecisionContext {
    pub tier: Tier,
    pub pivoting: Pivoting,
}

impl PrecisionContext {
    pub fn double() -> Self {
        PrecisionContext { tier: Tier::Double, pivoting: Pivoting::Partial }
    }
    pub fn extended() -> Self {
        PrecisionContext { tier: Tier::Extended, pivoting: Pivoting::Partial }
    }
    pub fn with_tier(tier: Tier) -> Self {
        PrecisionContext { tier, pivoting: Pivoting::Partial }
    }
}

pub trait Real:
    Copy
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + num_traits::Num
    + 'static
{
    fn from_f64(x: f64) -> Self;
    fn to_f64(self) -> f64;
    fn abs(self) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn epsilon() -> Self;
    fn pi() -> Self;

    fn from_i64(k: i64) -> Self {
        Self::from_f64(k as f64)
    }
    fn powf(self, p: Self) -> Self {
        (self.ln() * p).exp()
    }
    fn powi(self, k: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self;
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc *= base;
            }
            base *= base;
            e >>= 1;
        }
        acc
    }
    fn max_of(self, other: Self) -> Self {
        if self >= other {
            self
        } else {
            other
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(self) -> f64 {
        self
    }
    fn abs(self) -> Self {
        f64::abs(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn epsilon() -> Self {
        f64::EPSILON
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn powf(self, p: Self) -> Self {
        f64::powf(self, p)
    }
}

/// Double-double number. Addition uses the accurate two-sum path so that
/// cancellation in elimination keeps the full width.
#[derive(Clone, Copy)]
pub struct Dd(pub Quad);

impl Default for Dd {
    fn default() -> Self {
        Dd::ZERO
    }
}

impl Dd {
    pub const ZERO: Dd = Dd(Quad::ZERO);
    pub const ONE: Dd = Dd(Quad::ONE);

    pub fn hi(self) -> f64 {
        self.0 .0
    }
    pub fn lo(self) -> f64 {
        self.0 .1
    }
    /// Exact sum of two doubles.
    pub fn from_parts(hi: f64, lo: f64) -> Dd {
        Dd(Quad::from_f64(hi).add_accurate(Quad::from_f64(lo)))
    }
}

impl fmt::Debug for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dd({:e} + {:e})", self.hi(), self.lo())
    }
}

impl fmt::Display for Dd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.hi())
    }
}

impl PartialEq for Dd {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}

impl PartialOrd for Dd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.0.partial_cmp(other.0)
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, rhs: Dd) -> Dd {
        Dd(self.0.add_accurate(rhs.0))
    }
}
impl Sub for Dd {
    type Output = Dd;
    fn sub(self, rhs: Dd) -> Dd {
        Dd(self.0.sub_accurate(rhs.0))
    }
}
impl Mul for Dd {
    type Output = Dd;
    fn mul(self, rhs: Dd) -> Dd {
        Dd(self.0 * rhs.0)
    }
}
impl Div for Dd {
    type Output = Dd;
    fn div(self, rhs: Dd) -> Dd {
        Dd(self.0 / rhs.0)
    }
}
impl Rem for Dd {
    type Output = Dd;
    fn rem(self, rhs: Dd) -> Dd {
        Dd(self.0 % rhs.0)
    }
}
impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd(-self.0)
    }
}
impl AddAssign for Dd {
    fn add_assign(&mut self, rhs: Dd) {
        *self = *self + rhs;
    }
}
impl SubAssign for Dd {
    fn sub_assign(&mut self, rhs: Dd) {
        *self = *self - rhs;
    }
}
impl MulAssign for Dd {
    fn mul_assign(&mut self, rhs: Dd) {
        *self = *self * rhs;
    }
}
impl DivAssign for Dd {
    fn div_assign(&mut self, rhs: Dd) {
        *self = *self / rhs;
    }
}

impl num_traits::Zero for Dd {
    fn zero() -> Self {
        Dd::ZERO
    }
    fn is_zero(&self) -> bool {
        self.hi() == 0.0 && self.lo() == 0.0
    }
}
impl num_traits::One for Dd {
    fn one() -> Self {
        Dd::ONE
    }
}
impl num_traits::Num for Dd {
    type FromStrRadixErr = num_traits::ParseFloatError;
    fn from_str_radix(s: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        f64::from_str_radix(s, radix).map(Dd::from_f64)
    }
}

impl Real for Dd {
    fn from_f64(x: f64) -> Self {
        Dd(Quad::from_f64(x))
    }
    fn to_f64(self) -> f64 {
        self.hi() + self.lo()
    }
    fn abs(self) -> Self {
        Dd(self.0.abs())
    }
    fn sqrt(self) -> Self {
        if self.hi() <= 0.0 {
            return if self.hi() == 0.0 { Dd::ZERO } else { Dd::from_f64(f64::NAN) };
        }
        Dd(self.0.sqrt())
    }
    fn exp(self) -> Self {
        if self.hi() < -745.0 {
            return Dd::ZERO;
        }
        Dd(self.0.exp())
    }
    fn ln(self) -> Self {
        if self.hi() <= 0.0 {
            return Dd::from_f64(if self.hi() == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        Dd(self.0.ln())
    }
    fn epsilon() -> Self {
        Dd(Quad::EPSILON)
    }
    fn pi() -> Self {
        Dd(Quad::PI)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dd_exp_ln_roundtrip() {
        let x = Dd::from_f64(2.5);
        let y = x.ln().exp();
        assert!((y - x).abs().to_f64() < 1e-30);
    }

    #[test]
    fn dd_keeps_low_word_under_cancellation() {
        let a = Dd::from_parts(1.0, 1e-20);
        let b = Dd::from_f64(1.0);
        let d = (a - b).to_f64();
        assert!((d - 1e-20).abs() < 1e-35);
    }

    #[test]
    fn dd_pi_and_sqrt() {
        let s = Dd::from_f64(2.0).sqrt();
        assert!((s * s - Dd::from_f64(2.0)).abs().to_f64() < 1e-30);
        assert!((Dd::pi().to_f64() - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn tier_parse() {
        assert_eq!(Tier::parse("Extended"), Some(Tier::Extended));
        assert_eq!(Tier::parse("quad"), None);
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Dd::from_f64(1.1);
        let p = x.powi(7);
        let mut q = Dd::ONE;
        for _ in 0..7 {
            q *= x;
        }
        assert!((p - q).abs().to_f64() < 1e-30);
    }
}
