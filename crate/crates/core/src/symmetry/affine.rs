use num_complex::Complex64;
use serde::Serialize;

use super::{RationalAngle, SymmetryError};
use crate::serde_complex;

/// `Φ(z) = e^{iπθ} z + b` with an exact rational angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AffineMap {
    pub angle: RationalAngle,
    #[serde(with = "serde_complex")]
    pub b: Complex64,
    /// The critical point this map was derived from, if any.
    #[serde(with = "serde_complex::option", skip_serializing_if = "Option::is_none")]
    pub provenance: Option<Complex64>,
}

impl AffineMap {
    pub fn new(angle: RationalAngle, b: Complex64) -> Self {
        Self {
            angle,
            b,
            provenance: None,
        }
    }

    pub fn identity() -> Self {
        Self::new(RationalAngle::ZERO, Complex64::new(0.0, 0.0))
    }

    pub fn translation(b: Complex64) -> Self {
        Self::new(RationalAngle::ZERO, b)
    }

    pub fn with_provenance(mut self, at: Complex64) -> Self {
        self.provenance = Some(at);
        self
    }

    pub fn multiplier(&self) -> Complex64 {
        self.angle.multiplier()
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        self.multiplier() * z + self.b
    }

    pub fn is_translation(&self) -> bool {
        self.angle.is_zero()
    }

    pub fn is_identity(&self) -> bool {
        self.angle.is_zero() && self.b == Complex64::new(0.0, 0.0)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.angle.add(&other.angle),
            self.multiplier() * other.b + self.b,
        )
    }

    pub fn invert(&self) -> Self {
        let inv = self.angle.neg();
        Self::new(inv, -(inv.multiplier() * self.b))
    }

    /// `b / (1 − e^{iπθ})`.
    pub fn fixed_point(&self) -> Result<Complex64, SymmetryError> {
        if self.angle.is_zero() {
            return Err(if self.b == Complex64::new(0.0, 0.0) {
                SymmetryError::EveryPointFixed
            } else {
                SymmetryError::TranslationHasNoFixedPoint { b: self.b }
            });
        }
        Ok(self.b / (Complex64::new(1.0, 0.0) - self.multiplier()))
    }

    /// Same angle and translation parts within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.angle == other.angle && (self.b - other.b).norm() <= tol
    }
}
