//! Checking `f(Φ(z)) = f(z)` for a candidate map.
//!
//! Two tiers. The exact tier applies to polynomials with Gaussian-rational
//! coefficients and multipliers in `{±1, ±i}`: it expands `f(λz + b)` over
//! exact arithmetic and compares coefficients. Everything else goes through
//! the numeric tier, which compares Taylor expansions of `f ∘ Φ` and `f` at
//! a few centers and samples the residual on a disk around the anchor.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::AffineMap;
use crate::expr::{evaluate, poly, to_polynomial, Expr, GaussRational};
use crate::serde_complex;
use crate::series::expand;

pub const DEFAULT_SEED: u64 = 7;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerificationPolicy {
    /// Truncation order for zero-order computations.
    pub series_order: usize,
    /// Truncation order for the series comparison in the numeric tier.
    pub comparison_order: usize,
    pub samples: usize,
    pub seed: u64,
    pub accept_tol: f64,
    pub reject_tol: f64,
    /// Relative threshold for the order of a zero.
    pub zero_tol: f64,
    /// Bound on `|f′(z₀)|` for an anchor to count as a critical point.
    pub critical_tol: f64,
    /// Sampling radius; `2(1 + |z₀|)` when unset.
    pub radius: Option<f64>,
}

impl Default for VerificationPolicy {
    fn default() -> Self {
        Self {
            series_order: 64,
            comparison_order: 32,
            samples: 32,
            seed: DEFAULT_SEED,
            accept_tol: 1e-10,
            reject_tol: 1e-6,
            zero_tol: 1e-9,
            critical_tol: 1e-9,
            radius: None,
        }
    }
}

impl VerificationPolicy {
    pub fn radius_about(&self, anchor: Complex64) -> f64 {
        self.radius.unwrap_or(2.0 * (1.0 + anchor.norm()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Exact,
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum VerificationStatus {
    VerifiedExact,
    VerifiedNumeric {
        order: usize,
        samples: usize,
        seed: u64,
        radius: f64,
        max_residual: f64,
    },
    Refuted {
        #[serde(with = "serde_complex")]
        witness: Complex64,
        residual: f64,
    },
    Indeterminate {
        max_residual: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub function: String,
    pub map: AffineMap,
    pub tier: Tier,
    #[serde(flatten)]
    pub status: VerificationStatus,
}

impl VerificationReport {
    pub fn is_verified(&self) -> bool {
        matches!(
            self.status,
            VerificationStatus::VerifiedExact | VerificationStatus::VerifiedNumeric { .. }
        )
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self.status, VerificationStatus::Refuted { .. })
    }

    /// Short status label as serialized.
    pub fn label(&self) -> &'static str {
        match self.status {
            VerificationStatus::VerifiedExact => "verified_exact",
            VerificationStatus::VerifiedNumeric { .. } => "verified_numeric",
            VerificationStatus::Refuted { .. } => "refuted",
            VerificationStatus::Indeterminate { .. } => "indeterminate",
        }
    }
}

/// `|f(Φ(z)) − f(z)| / (1 + |f(z)|)`, or `None` on overflow.
pub fn relative_residual(f: &Expr, map: &AffineMap, z: Complex64) -> Option<f64> {
    let fz = evaluate(f, z).ok()?;
    let fw = evaluate(f, map.apply(z)).ok()?;
    Some((fw - fz).norm() / (1.0 + fz.norm()))
}

/// Point uniformly distributed on the disk `|z − center| ≤ radius`.
pub(crate) fn disk_point(rng: &mut ChaCha8Rng, center: Complex64, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    let t = 2.0 * PI * rng.gen::<f64>();
    center + Complex64::from_polar(r, t)
}

/// Point about which a map is checked: its source critical point, else its
/// fixed point, else the origin.
pub(crate) fn anchor_of(map: &AffineMap) -> Complex64 {
    map.provenance
        .or_else(|| map.fixed_point().ok())
        .unwrap_or(Complex64::new(0.0, 0.0))
}

pub fn verify(f: &Expr, map: &AffineMap, policy: &VerificationPolicy) -> VerificationReport {
    let anchor = anchor_of(map);
    let radius = policy.radius_about(anchor);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let centers = [anchor, disk_point(&mut rng, anchor, radius), disk_point(&mut rng, anchor, radius)];
    let samples: Vec<Complex64> = (0..policy.samples)
        .map(|_| disk_point(&mut rng, anchor, radius))
        .collect();

    let report = |tier, status| VerificationReport {
        function: f.to_string(),
        map: *map,
        tier,
        status,
    };

    let probes: Vec<Complex64> = centers.iter().chain(&samples).copied().collect();
    if let Some(status) = exact_tier(f, map, &probes, policy) {
        return report(Tier::Exact, status);
    }
    report(Tier::Numeric, numeric_tier(f, map, &centers, &samples, radius, policy))
}

/// Best rational approximation with denominator at most `1e6` that agrees
/// with `x` to a few ulps; otherwise the exact binary value of `x`.
fn rationalize(x: f64) -> Option<BigRational> {
    if x.fract() == 0.0 {
        return BigRational::from_float(x);
    }
    let tol = 4.0 * f64::EPSILON * x.abs().max(1.0);
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i128;
        (h0, h1) = (h1, a * h1 + h0);
        (k0, k1) = (k1, a * k1 + k0);
        if k1 > 1_000_000 {
            break;
        }
        if ((h1 as f64) / (k1 as f64) - x).abs() <= tol {
            return Some(BigRational::new(BigInt::from(h1), BigInt::from(k1)));
        }
        let frac = r - r.floor();
        if frac == 0.0 {
            break;
        }
        r = 1.0 / frac;
    }
    BigRational::from_float(x)
}

fn exact_translation(b: Complex64) -> Option<GaussRational> {
    Some(GaussRational::new(rationalize(b.re)?, rationalize(b.im)?))
}

fn exact_tier(
    f: &Expr,
    map: &AffineMap,
    probes: &[Complex64],
    policy: &VerificationPolicy,
) -> Option<VerificationStatus> {
    let lambda = map.angle.exact_multiplier()?;
    let p = to_polynomial(f)?;
    let coeffs = p.exact_coefficients()?;
    let b = exact_translation(map.b)?;
    let image = poly::exact_compose_affine(coeffs, &lambda, &b);
    if image.as_slice() == coeffs {
        return Some(VerificationStatus::VerifiedExact);
    }
    // The expansions differ; a refutation still needs a concrete witness,
    // since a rounded translation can leave a negligible difference.
    let (witness, residual) = probes
        .iter()
        .filter_map(|&z| Some((z, relative_residual(f, map, z)?)))
        .max_by(|a, b| a.1.total_cmp(&b.1))?;
    (residual > policy.reject_tol).then_some(VerificationStatus::Refuted { witness, residual })
}

fn numeric_tier(
    f: &Expr,
    map: &AffineMap,
    centers: &[Complex64],
    samples: &[Complex64],
    radius: f64,
    policy: &VerificationPolicy,
) -> VerificationStatus {
    let lambda = map.multiplier();
    let mut complete = true;
    let mut max_residual = 0.0f64;

    for &c in centers {
        let image = map.apply(c);
        let composed = expand(f, image, policy.comparison_order)
            .ok()
            .and_then(|s| s.compose_affine(lambda, map.b, c).ok());
        let direct = expand(f, c, policy.comparison_order).ok();
        match (composed, direct) {
            (Some(lhs), Some(rhs)) => {
                let scale = rhs.coeffs().iter().map(|a| a.norm()).fold(0.0, f64::max);
                let diff = lhs
                    .coeffs()
                    .iter()
                    .zip(rhs.coeffs())
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max);
                max_residual = max_residual.max(diff / (1.0 + scale));
            }
            _ => complete = false,
        }
    }

    let mut worst: Option<(Complex64, f64)> = None;
    for &z in centers.iter().chain(samples) {
        match relative_residual(f, map, z) {
            Some(r) => {
                max_residual = max_residual.max(r);
                if worst.is_none_or(|(_, w)| r > w) {
                    worst = Some((z, r));
                }
            }
            None => complete = false,
        }
    }

    if let Some((witness, residual)) = worst {
        if residual > policy.reject_tol {
            return VerificationStatus::Refuted { witness, residual };
        }
    }
    if complete && max_residual <= policy.accept_tol {
        VerificationStatus::VerifiedNumeric {
            order: policy.comparison_order,
            samples: policy.samples,
            seed: policy.seed,
            radius,
            max_residual,
        }
    } else {
        VerificationStatus::Indeterminate {
            max_residual: if complete { max_residual } else { f64::INFINITY },
        }
    }
}
