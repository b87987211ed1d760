use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::expr::GaussRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("angle denominator must be nonzero")]
    ZeroDenominator,
    #[error("cannot parse angle `{0}`; expected `p/q` with integers p, q")]
    Malformed(String),
}

/// An exact rational angle `θ = p/q` (mod 2) with multiplier `e^{iπθ}`.
///
/// Always reduced with `q > 0` and `0 ≤ p/q < 2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RationalAngle {
    p: i64,
    q: i64,
}

impl RationalAngle {
    pub const ZERO: RationalAngle = RationalAngle { p: 0, q: 1 };
    /// `θ = 1`, multiplier `-1`.
    pub const HALF_TURN: RationalAngle = RationalAngle { p: 1, q: 1 };

    pub fn new(p: i64, q: i64) -> Result<Self, AngleError> {
        if q == 0 {
            return Err(AngleError::ZeroDenominator);
        }
        Ok(Self::reduce(i128::from(p), i128::from(q)))
    }

    fn reduce(p: i128, q: i128) -> Self {
        let (mut p, mut q) = if q < 0 { (-p, -q) } else { (p, q) };
        let g = p.gcd(&q);
        p /= g;
        q /= g;
        let p = p.rem_euclid(2 * q);
        Self {
            p: p as i64,
            q: q as i64,
        }
    }

    /// `θ = 2k/n`, the angle of `e^{2πik/n}`.
    pub fn root_of_unity(k: i64, n: i64) -> Result<Self, AngleError> {
        Self::new(2 * k, n)
    }

    pub fn numer(&self) -> i64 {
        self.p
    }

    pub fn denom(&self) -> i64 {
        self.q
    }

    pub fn is_zero(&self) -> bool {
        self.p == 0
    }

    pub fn add(&self, other: &Self) -> Self {
        let p = i128::from(self.p) * i128::from(other.q) + i128::from(other.p) * i128::from(self.q);
        Self::reduce(p, i128::from(self.q) * i128::from(other.q))
    }

    pub fn neg(&self) -> Self {
        Self::reduce(-i128::from(self.p), i128::from(self.q))
    }

    /// `max(|p|, q)` of the reduced, normalized fraction.
    pub fn height(&self) -> u64 {
        self.p.unsigned_abs().max(self.q.unsigned_abs())
    }

    /// Smallest `m ≥ 1` with `e^{iπθ m} = 1`, i.e. `m·p ≡ 0 (mod 2q)`.
    pub fn multiplier_order(&self) -> u64 {
        let two_q = 2 * self.q;
        (two_q / self.p.gcd(&two_q)) as u64
    }

    /// True when `multiplier^n = 1` by exact rational arithmetic.
    pub fn is_nth_root_of_unity(&self, n: u64) -> bool {
        n % self.multiplier_order() == 0
    }

    /// The multiplier when it is a Gaussian rational, i.e. one of `±1, ±i`.
    pub fn exact_multiplier(&self) -> Option<GaussRational> {
        match (self.p, self.q) {
            (0, 1) => Some(GaussRational::one()),
            (1, 1) => Some(GaussRational::from_integer(-1)),
            (1, 2) => Some(GaussRational::i()),
            (3, 2) => Some(-GaussRational::i()),
            _ => None,
        }
    }

    pub fn multiplier(&self) -> Complex64 {
        match self.exact_multiplier() {
            Some(g) => g.to_complex(),
            None => Complex64::from_polar(1.0, std::f64::consts::PI * self.p as f64 / self.q as f64),
        }
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

impl FromStr for RationalAngle {
    type Err = AngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let malformed = || AngleError::Malformed(s.to_string());
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: i64 = p.parse().map_err(|_| malformed())?;
        let q: i64 = q.parse().map_err(|_| malformed())?;
        Self::new(p, q)
    }
}

impl Serialize for RationalAngle {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for RationalAngle {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization() {
        assert_eq!(RationalAngle::new(4, 6).unwrap().to_string(), "2/3");
        assert_eq!(RationalAngle::new(-1, 2).unwrap().to_string(), "3/2");
        assert_eq!(RationalAngle::new(5, 2).unwrap().to_string(), "1/2");
        assert_eq!(RationalAngle::new(2, -3).unwrap().to_string(), "4/3");
        assert_eq!(RationalAngle::new(6, 3).unwrap(), RationalAngle::ZERO);
        assert_eq!(RationalAngle::new(1, 0), Err(AngleError::ZeroDenominator));
    }

    #[test]
    fn heights() {
        assert_eq!(RationalAngle::HALF_TURN.height(), 1);
        assert_eq!(RationalAngle::new(2, 3).unwrap().height(), 3);
        assert_eq!(RationalAngle::ZERO.height(), 1);
        assert_eq!(RationalAngle::new(4, 3).unwrap().height(), 4);
    }

    #[test]
    fn multiplier_orders() {
        assert_eq!(RationalAngle::ZERO.multiplier_order(), 1);
        assert_eq!(RationalAngle::HALF_TURN.multiplier_order(), 2);
        assert_eq!(RationalAngle::root_of_unity(1, 3).unwrap().multiplier_order(), 3);
        assert_eq!(RationalAngle::root_of_unity(2, 8).unwrap().multiplier_order(), 4);
        assert!(RationalAngle::root_of_unity(3, 12).unwrap().is_nth_root_of_unity(12));
    }

    #[test]
    fn exact_multipliers() {
        assert_eq!(RationalAngle::HALF_TURN.multiplier(), Complex64::new(-1.0, 0.0));
        assert_eq!(RationalAngle::new(3, 2).unwrap().multiplier(), Complex64::new(0.0, -1.0));
        assert!(RationalAngle::new(2, 3).unwrap().exact_multiplier().is_none());
        let w = RationalAngle::new(2, 3).unwrap().multiplier();
        assert!((w.norm() - 1.0).abs() <= 1e-15);
        assert!((w.powu(3) - 1.0).norm() <= 1e-15);
    }

    #[test]
    fn parsing() {
        assert_eq!("1/1".parse::<RationalAngle>().unwrap(), RationalAngle::HALF_TURN);
        assert_eq!(" 2 / 3 ".parse::<RationalAngle>().unwrap().to_string(), "2/3");
        assert_eq!("0".parse::<RationalAngle>().unwrap(), RationalAngle::ZERO);
        assert!("x/2".parse::<RationalAngle>().is_err());
        assert!("1/0".parse::<RationalAngle>().is_err());
    }
}
