//! Affine automorphic functions `Φ(z) = e^{iπθ}z + b` with `f ∘ Φ = f`.
//!
//! A non-translation `Φ` fixes a critical point `z₀` of `f`, and its
//! multiplier is an `n`-th root of unity where `n` is the order of the zero
//! of `f − f(z₀)` at `z₀`. So at each critical point there are at most
//! `n − 1` nontrivial candidates `e^{2πik/n} z + z₀(1 − e^{2πik/n})`, each of
//! which is checked by [`verify`]. Translations have no fixed point and are
//! only verified, never searched for.

mod affine;
mod angle;
mod group;
mod verify;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

pub use affine::AffineMap;
pub use angle::{AngleError, RationalAngle};
pub use group::{group_closure, min_pairwise_distance, orbit, Closure, OrbitReport};
pub use verify::{
    relative_residual, verify, Tier, VerificationPolicy, VerificationReport, VerificationStatus,
    DEFAULT_SEED,
};

use crate::expr::{differentiate, evaluate, EvalError, Expr};
use crate::serde_complex;
use crate::series::{expand, SeriesError, TaylorSeries};

/// Outcome text when no candidate at an anchor survives verification.
pub const NO_SYMMETRY_MESSAGE: &str = "no entire automorphic function related to this point";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymmetryError {
    #[error("{z} is not a critical point: |f'(z)| = {residual:e}")]
    NotCriticalPoint { z: Complex64, residual: f64 },
    #[error("f - f(z0) has a simple zero at {z}, so z0 is not a critical point")]
    OrderOne { z: Complex64 },
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("the translation by {b} has no fixed point")]
    TranslationHasNoFixedPoint { b: Complex64 },
    #[error("the identity fixes every point")]
    EveryPointFixed,
    #[error("multiplier {multiplier} is not an {n}-th root of unity")]
    NoMatchingRoot { multiplier: Complex64, n: usize },
    #[error("map with angle {angle} preserves both f and f' but is not a translation")]
    PropositionViolation { angle: RationalAngle },
}

fn recentred(f: &Expr, z0: Complex64, order: usize) -> Result<TaylorSeries, SeriesError> {
    let s = expand(f, z0, order)?;
    let mut coeffs = s.coeffs().to_vec();
    coeffs[0] = Complex64::new(0.0, 0.0);
    Ok(TaylorSeries::new(z0, coeffs))
}

/// Order of the zero of `f − f(z₀)` at `z₀`.
pub fn zero_order_at(f: &Expr, z0: Complex64, order: usize, tol: f64) -> Result<usize, SymmetryError> {
    let n = recentred(f, z0, order)?.zero_order(tol)?;
    if n == 1 {
        return Err(SymmetryError::OrderOne { z: z0 });
    }
    Ok(n)
}

/// The `n − 1` nontrivial rotations about `z₀` by `n`-th roots of unity.
pub fn candidates(z0: Complex64, n: usize) -> Vec<AffineMap> {
    let n = n as i64;
    (1..n)
        .map(|k| {
            let angle = RationalAngle::root_of_unity(k, n).expect("n >= 2");
            let b = z0 * (Complex64::new(1.0, 0.0) - angle.multiplier());
            AffineMap::new(angle, b).with_provenance(z0)
        })
        .collect()
}

/// Everything learned at one anchor point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnchorSearch {
    #[serde(with = "serde_complex")]
    pub anchor: Complex64,
    /// Order of the zero of `f − f(z₀)` at the anchor.
    pub order: usize,
    pub reports: Vec<VerificationReport>,
}

impl AnchorSearch {
    pub fn symmetries(&self) -> Vec<AffineMap> {
        self.reports
            .iter()
            .filter(|r| r.is_verified())
            .map(|r| r.map)
            .collect()
    }

    /// `None` when at least one candidate verified.
    pub fn message(&self) -> Option<&'static str> {
        self.reports
            .iter()
            .all(|r| !r.is_verified())
            .then_some(NO_SYMMETRY_MESSAGE)
    }
}

/// Runs the anchor algorithm at `z₀`: zero order, candidate enumeration,
/// verification. All candidates are checked, not just the first to pass.
pub fn find_symmetries_at(
    f: &Expr,
    z0: Complex64,
    policy: &VerificationPolicy,
) -> Result<AnchorSearch, SymmetryError> {
    let series = recentred(f, z0, policy.series_order)?;
    let slope = evaluate(&differentiate(f), z0)?.norm();
    let scale = series.coeffs().iter().map(|a| a.norm()).fold(0.0, f64::max);
    if slope > policy.critical_tol * scale.max(1.0) {
        return Err(SymmetryError::NotCriticalPoint {
            z: z0,
            residual: slope,
        });
    }
    let n = zero_order_at(f, z0, policy.series_order, policy.zero_tol)?;
    let reports = candidates(z0, n)
        .iter()
        .map(|map| verify(f, map, policy))
        .collect();
    Ok(AnchorSearch {
        anchor: z0,
        order: n,
        reports,
    })
}

/// `b / (1 − e^{iπθ})`.
pub fn fixed_point(map: &AffineMap) -> Result<Complex64, SymmetryError> {
    map.fixed_point()
}

/// Returns `(n, k)` with `Φ′ = e^{2πik/n}` where `n` is the zero order of
/// `f − f(z₀)` at the fixed point `z₀` of `Φ`.
pub fn fixed_point_derivative_check(
    f: &Expr,
    map: &AffineMap,
    order: usize,
    tol: f64,
) -> Result<(usize, usize), SymmetryError> {
    let z0 = map.fixed_point()?;
    let n = zero_order_at(f, z0, order, tol)?;
    let multiplier = map.multiplier();
    let k = (0..n).find(|&k| {
        let root = RationalAngle::root_of_unity(k as i64, n as i64).expect("n >= 2");
        (root.multiplier() - multiplier).norm() <= 1e-10
    });
    k.map(|k| (n, k))
        .ok_or(SymmetryError::NoMatchingRoot { multiplier, n })
}

pub fn theta_height(angle: &RationalAngle) -> u64 {
    angle.height()
}

/// Largest `|Φ′ f′(Φ(z)) − f′(z)| / (1 + |f′(z)|)` over seeded samples on
/// the disk of the policy radius about the map's anchor.
pub fn derivative_identity_residual(
    f: &Expr,
    map: &AffineMap,
    samples: usize,
    policy: &VerificationPolicy,
) -> Result<f64, SymmetryError> {
    let d = differentiate(f);
    let anchor = verify::anchor_of(map);
    let radius = policy.radius_about(anchor);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let lambda = map.multiplier();
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let z = verify::disk_point(&mut rng, anchor, radius);
        let lhs = lambda * evaluate(&d, map.apply(z))?;
        let rhs = evaluate(&d, z)?;
        worst = worst.max((lhs - rhs).norm() / (1.0 + rhs.norm()));
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntersectionReport {
    pub map: AffineMap,
    pub function: VerificationReport,
    pub derivative: VerificationReport,
    /// Whether `Φ` preserves both `f` and `f′`.
    pub in_both: bool,
}

/// Verifies `Φ` against `f` and `f′`. A map preserving both must be a
/// translation; anything else is reported as a violation.
pub fn check_intersection_translation(
    f: &Expr,
    map: &AffineMap,
    policy: &VerificationPolicy,
) -> Result<IntersectionReport, SymmetryError> {
    let function = verify(f, map, policy);
    let derivative = verify(&differentiate(f), map, policy);
    let in_both = function.is_verified() && derivative.is_verified();
    if in_both && !map.angle.is_zero() {
        return Err(SymmetryError::PropositionViolation { angle: map.angle });
    }
    Ok(IntersectionReport {
        map: *map,
        function,
        derivative,
        in_both,
    })
}

pub fn check_translation(f: &Expr, b: Complex64, policy: &VerificationPolicy) -> VerificationReport {
    verify(f, &AffineMap::translation(b), policy)
}
