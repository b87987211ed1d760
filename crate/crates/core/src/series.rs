//! Truncated Taylor series about an arbitrary center.
//!
//! A [`TaylorSeries`] of order `N` stores `a_0..=a_N` with
//! `a_j = f^{(j)}(center) / j!`. Series produced by [`expand`] come from
//! structural recursion over the expression tree: sums and products are
//! combined coefficient-wise, and each primitive is evaluated by
//! substituting the recentred argument into its Maclaurin series.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::expr::{Expr, Primitive};

pub const DEFAULT_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series centers differ: {left} vs {right}")]
    CenterMismatch { left: Complex64, right: Complex64 },
    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("truncation order must be at least 1")]
    OrderTooSmall,
    #[error("series coefficients overflowed at node `{node}`")]
    Overflow { node: String },
    #[error("all {count} coefficients vanish; raise the truncation order or the function is locally constant")]
    AllCoefficientsVanish { count: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct TaylorSeries {
    center: Complex64,
    coeffs: Vec<Complex64>,
}

impl TaylorSeries {
    pub fn new(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        Self { center, coeffs }
    }

    pub fn constant(center: Complex64, value: Complex64, order: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); order + 1];
        coeffs[0] = value;
        Self { center, coeffs }
    }

    /// The identity function `z` about `center`.
    pub fn variable(center: Complex64, order: usize) -> Self {
        let mut s = Self::constant(center, center, order);
        if order >= 1 {
            s.coeffs[1] = Complex64::new(1.0, 0.0);
        }
        s
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    fn check_compatible(&self, other: &Self) -> Result<(), SeriesError> {
        if self.center != other.center {
            return Err(SeriesError::CenterMismatch {
                left: self.center,
                right: other.center,
            });
        }
        if self.order() != other.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: other.order(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    /// Cauchy product truncated at the common order.
    pub fn mul(&self, other: &Self) -> Result<Self, SeriesError> {
        self.check_compatible(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|a| a * s)
    }

    pub fn neg(&self) -> Self {
        self.map(|a| -a)
    }

    fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        Self {
            center: self.center,
            coeffs: self.coeffs.iter().map(|&a| f(a)).collect(),
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(Complex64, Complex64) -> Complex64) -> Self {
        Self {
            center: self.center,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let n = self.coeffs.len();
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, b) in other.coeffs[..n - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self {
            center: self.center,
            coeffs: out,
        }
    }

    fn powu(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::constant(self.center, Complex64::new(1.0, 0.0), self.order());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        acc
    }

    /// Series of `z ↦ s(λz + b)` about `out_center`, where this series is
    /// centred at `λ·out_center + b`. Coefficient `j` becomes `a_j λ^j`.
    pub fn compose_affine(
        &self,
        lambda: Complex64,
        b: Complex64,
        out_center: Complex64,
    ) -> Result<Self, SeriesError> {
        let image = lambda * out_center + b;
        if (image - self.center).norm() > 1e-12 * self.center.norm().max(1.0) {
            return Err(SeriesError::CenterMismatch {
                left: self.center,
                right: image,
            });
        }
        let mut pow = Complex64::new(1.0, 0.0);
        let coeffs = self
            .coeffs
            .iter()
            .map(|&a| {
                let c = a * pow;
                pow *= lambda;
                c
            })
            .collect();
        Ok(Self {
            center: out_center,
            coeffs,
        })
    }

    /// Series of `self ∘ inner` about `inner.center()`. The inner series'
    /// value at its center must coincide with this series' center, so the
    /// recentred inner series has no constant term.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        let offset = inner.coeffs[0];
        if (offset - self.center).norm() > 1e-12 * self.center.norm().max(1.0) {
            return Err(SeriesError::CenterMismatch {
                left: self.center,
                right: offset,
            });
        }
        if self.order() != inner.order() {
            return Err(SeriesError::OrderMismatch {
                left: self.order(),
                right: inner.order(),
            });
        }
        let mut h = inner.clone();
        h.coeffs[0] = Complex64::new(0.0, 0.0);
        Ok(substitute(&self.coeffs, &h))
    }

    /// Term-by-term derivative; the order drops by one.
    pub fn derivative(&self) -> Self {
        let coeffs: Vec<_> = if self.coeffs.len() == 1 {
            vec![Complex64::new(0.0, 0.0)]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, &a)| a * j as f64)
                .collect()
        };
        Self {
            center: self.center,
            coeffs,
        }
    }

    /// Smallest `m` with `|a_m| > tol · max_j |a_j|`.
    pub fn zero_order(&self, tol: f64) -> Result<usize, SeriesError> {
        let max = self.coeffs.iter().map(|a| a.norm()).fold(0.0, f64::max);
        if max == 0.0 || !max.is_finite() {
            return Err(SeriesError::AllCoefficientsVanish {
                count: self.coeffs.len(),
            });
        }
        Ok(self
            .coeffs
            .iter()
            .position(|a| a.norm() > tol * max)
            .expect("max coefficient exceeds the threshold"))
    }

    /// Horner evaluation of the truncated series at `z`.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        let h = z - self.center;
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * h + a)
    }

    fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|a| a.re.is_finite() && a.im.is_finite())
    }
}

/// `Σ g_k h^k` by Horner's rule, for `h` with zero constant term.
fn substitute(g: &[Complex64], h: &TaylorSeries) -> TaylorSeries {
    let order = h.order();
    let mut acc = TaylorSeries::constant(h.center, g[order.min(g.len() - 1)], order);
    for &gk in g[..order.min(g.len() - 1)].iter().rev() {
        acc = acc.mul_unchecked(h);
        acc.coeffs[0] += gk;
    }
    acc
}

/// Maclaurin coefficients of a primitive, from the exact rationals
/// `±1/k!` rounded once.
fn maclaurin(kind: Primitive, order: usize) -> Vec<Complex64> {
    let mut factorial = BigInt::one();
    (0..=order)
        .map(|k| {
            if k > 0 {
                factorial *= k;
            }
            let inv = BigRational::new(BigInt::one(), factorial.clone())
                .to_f64()
                .unwrap_or(0.0);
            let v = match kind {
                Primitive::Exp => inv,
                Primitive::Sinh => if k % 2 == 1 { inv } else { 0.0 },
                Primitive::Cosh => if k % 2 == 0 { inv } else { 0.0 },
                Primitive::Sin => match k % 4 {
                    1 => inv,
                    3 => -inv,
                    _ => 0.0,
                },
                Primitive::Cos => match k % 4 {
                    0 => inv,
                    2 => -inv,
                    _ => 0.0,
                },
            };
            Complex64::new(v, 0.0)
        })
        .collect()
}

fn primitive_series(kind: Primitive, arg: &TaylorSeries) -> TaylorSeries {
    let order = arg.order();
    let w = arg.coeffs[0];
    let mut h = arg.clone();
    h.coeffs[0] = Complex64::new(0.0, 0.0);
    let sub = |k: Primitive| substitute(&maclaurin(k, order), &h);
    match kind {
        Primitive::Exp => sub(Primitive::Exp).scale(w.exp()),
        Primitive::Sin => sub(Primitive::Cos)
            .scale(w.sin())
            .zip_with(&sub(Primitive::Sin).scale(w.cos()), |a, b| a + b),
        Primitive::Cos => sub(Primitive::Cos)
            .scale(w.cos())
            .zip_with(&sub(Primitive::Sin).scale(w.sin()), |a, b| a - b),
        Primitive::Sinh => sub(Primitive::Cosh)
            .scale(w.sinh())
            .zip_with(&sub(Primitive::Sinh).scale(w.cosh()), |a, b| a + b),
        Primitive::Cosh => sub(Primitive::Cosh)
            .scale(w.cosh())
            .zip_with(&sub(Primitive::Sinh).scale(w.sinh()), |a, b| a + b),
    }
}

/// Taylor expansion of `f` about `center`, truncated at `order`.
pub fn expand(f: &Expr, center: Complex64, order: usize) -> Result<TaylorSeries, SeriesError> {
    if order < 1 {
        return Err(SeriesError::OrderTooSmall);
    }
    expand_node(f, center, order)
}

fn expand_node(f: &Expr, center: Complex64, order: usize) -> Result<TaylorSeries, SeriesError> {
    let s = match f {
        Expr::Const(c) => TaylorSeries::constant(center, c.value(), order),
        Expr::Var => TaylorSeries::variable(center, order),
        Expr::Sum(terms) => {
            let mut acc = TaylorSeries::constant(center, Complex64::new(0.0, 0.0), order);
            for t in terms {
                acc = acc.zip_with(&expand_node(t, center, order)?, |a, b| a + b);
            }
            acc
        }
        Expr::Product(factors) => {
            let mut acc = TaylorSeries::constant(center, Complex64::new(1.0, 0.0), order);
            for x in factors {
                acc = acc.mul_unchecked(&expand_node(x, center, order)?);
            }
            acc
        }
        Expr::Pow(base, n) => expand_node(base, center, order)?.powu(*n),
        Expr::Neg(inner) => expand_node(inner, center, order)?.neg(),
        Expr::Prim(kind, arg) => primitive_series(*kind, &expand_node(arg, center, order)?),
    };
    if s.is_finite() {
        Ok(s)
    } else {
        Err(SeriesError::Overflow {
            node: f.to_string(),
        })
    }
}
