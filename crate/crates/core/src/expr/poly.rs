use num_complex::Complex64;

use super::{Constant, Expr, GaussRational};

/// Expanded polynomial `Σ a_k z^k`, coefficients indexed by degree.
///
/// `exact` holds the same coefficients as Gaussian rationals when every
/// literal in the source expression was one.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyForm {
    coefficients: Vec<Complex64>,
    exact: Option<Vec<GaussRational>>,
}

impl PolyForm {
    pub fn from_complex(mut coefficients: Vec<Complex64>) -> Self {
        while coefficients.len() > 1 && *coefficients.last().unwrap() == Complex64::new(0.0, 0.0) {
            coefficients.pop();
        }
        if coefficients.is_empty() {
            coefficients.push(Complex64::new(0.0, 0.0));
        }
        Self {
            coefficients,
            exact: None,
        }
    }

    pub fn from_exact(mut coefficients: Vec<GaussRational>) -> Self {
        trim_exact(&mut coefficients);
        Self {
            coefficients: coefficients.iter().map(GaussRational::to_complex).collect(),
            exact: Some(coefficients),
        }
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    pub fn exact_coefficients(&self) -> Option<&[GaussRational]> {
        self.exact.as_deref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.len() == 1 && self.coefficients[0] == Complex64::new(0.0, 0.0)
    }

    /// Horner evaluation.
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
    }

    /// Derivative value alongside the value, in one Horner pass.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in self.coefficients.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    }

    /// `Σ |a_k| max(1, |z|)^k`, the magnitude scale used for residual tests.
    pub fn scale_at(&self, z: Complex64) -> f64 {
        let r = z.norm().max(1.0);
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, a| acc * r + a.norm())
    }
}

pub(crate) fn trim_exact(p: &mut Vec<GaussRational>) {
    while p.len() > 1 && p.last().unwrap().is_zero() {
        p.pop();
    }
    if p.is_empty() {
        p.push(GaussRational::zero());
    }
}

// Exact polynomial arithmetic on coefficient vectors (index = degree).

pub(crate) fn exact_add(a: &[GaussRational], b: &[GaussRational]) -> Vec<GaussRational> {
    let n = a.len().max(b.len());
    let zero = GaussRational::zero();
    let mut out: Vec<_> = (0..n)
        .map(|k| a.get(k).unwrap_or(&zero) + b.get(k).unwrap_or(&zero))
        .collect();
    trim_exact(&mut out);
    out
}

pub(crate) fn exact_mul(a: &[GaussRational], b: &[GaussRational]) -> Vec<GaussRational> {
    let mut out = vec![GaussRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] = &out[i + j] + &(x * y);
        }
    }
    trim_exact(&mut out);
    out
}

pub(crate) fn exact_pow(a: &[GaussRational], mut n: u32) -> Vec<GaussRational> {
    let mut base = a.to_vec();
    let mut acc = vec![GaussRational::one()];
    while n > 0 {
        if n & 1 == 1 {
            acc = exact_mul(&acc, &base);
        }
        n >>= 1;
        if n > 0 {
            base = exact_mul(&base, &base);
        }
    }
    acc
}

/// Coefficients of `p(λz + b)`.
pub(crate) fn exact_compose_affine(
    p: &[GaussRational],
    lambda: &GaussRational,
    b: &GaussRational,
) -> Vec<GaussRational> {
    let inner = [b.clone(), lambda.clone()];
    let mut acc = vec![p.last().cloned().unwrap_or_else(GaussRational::zero)];
    for a in p.iter().rev().skip(1) {
        acc = exact_mul(&acc, &inner);
        acc[0] = &acc[0] + a;
    }
    trim_exact(&mut acc);
    acc
}

/// Polynomial long division `a = q·b + r` with `deg r < deg b`.
pub(crate) fn exact_divrem(
    a: &[GaussRational],
    b: &[GaussRational],
) -> (Vec<GaussRational>, Vec<GaussRational>) {
    let lead_inv = b.last().and_then(GaussRational::inv).expect("nonzero divisor");
    let db = b.len() - 1;
    let mut r = a.to_vec();
    trim_exact(&mut r);
    if r.len() < b.len() {
        return (vec![GaussRational::zero()], r);
    }
    let mut q = vec![GaussRational::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = &r[k + db] * &lead_inv;
        if !c.is_zero() {
            for (j, bj) in b.iter().enumerate() {
                r[k + j] = &r[k + j] - &(&c * bj);
            }
        }
        q[k] = c;
    }
    r.truncate(db.max(1));
    trim_exact(&mut r);
    trim_exact(&mut q);
    (q, r)
}

fn is_zero_poly(p: &[GaussRational]) -> bool {
    p.iter().all(GaussRational::is_zero)
}

fn monic(p: &[GaussRational]) -> Vec<GaussRational> {
    match p.last().and_then(GaussRational::inv) {
        Some(inv) => p.iter().map(|c| c * &inv).collect(),
        None => p.to_vec(),
    }
}

/// Monic greatest common divisor.
pub(crate) fn exact_gcd(a: &[GaussRational], b: &[GaussRational]) -> Vec<GaussRational> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    trim_exact(&mut x);
    trim_exact(&mut y);
    while !is_zero_poly(&y) {
        let (_, r) = exact_divrem(&x, &y);
        x = y;
        y = monic(&r);
    }
    monic(&x)
}

pub(crate) fn exact_derivative(p: &[GaussRational]) -> Vec<GaussRational> {
    if p.len() <= 1 {
        return vec![GaussRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * &GaussRational::from_integer(k as i64))
        .collect()
}

/// Yun's square-free decomposition: factors `g_m` with `p = c·Π g_m^m`,
/// returned as `(g_m, m)` for the factors of positive degree.
pub(crate) fn square_free_factors(p: &[GaussRational]) -> Vec<(Vec<GaussRational>, u32)> {
    let mut out = Vec::new();
    let dp = exact_derivative(p);
    let a0 = exact_gcd(p, &dp);
    let mut b = exact_divrem(p, &a0).0;
    let c = exact_divrem(&dp, &a0).0;
    let mut d = exact_add(&c, &exact_derivative(&b).iter().map(|g| -g).collect::<Vec<_>>());
    let mut m = 1;
    while b.len() > 1 {
        let a = exact_gcd(&b, &d);
        b = exact_divrem(&b, &a).0;
        let c = exact_divrem(&d, &a).0;
        d = exact_add(&c, &exact_derivative(&b).iter().map(|g| -g).collect::<Vec<_>>());
        if a.len() > 1 {
            out.push((a, m));
        }
        m += 1;
    }
    out
}

fn exact_poly(e: &Expr) -> Option<Vec<GaussRational>> {
    Some(match e {
        Expr::Const(Constant::Exact(g)) => vec![g.clone()],
        Expr::Const(_) | Expr::Prim(..) => return None,
        Expr::Var => vec![GaussRational::zero(), GaussRational::one()],
        Expr::Sum(terms) => terms
            .iter()
            .try_fold(vec![GaussRational::zero()], |acc, t| Some(exact_add(&acc, &exact_poly(t)?)))?,
        Expr::Product(factors) => factors
            .iter()
            .try_fold(vec![GaussRational::one()], |acc, x| Some(exact_mul(&acc, &exact_poly(x)?)))?,
        Expr::Pow(base, n) => exact_pow(&exact_poly(base)?, *n),
        Expr::Neg(inner) => exact_poly(inner)?.iter().map(|g| -g).collect(),
    })
}

fn float_poly(e: &Expr) -> Option<Vec<Complex64>> {
    fn add(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let n = a.len().max(b.len());
        let zero = Complex64::new(0.0, 0.0);
        (0..n)
            .map(|k| a.get(k).unwrap_or(&zero) + b.get(k).unwrap_or(&zero))
            .collect()
    }
    fn mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        out
    }
    Some(match e {
        Expr::Const(c) => vec![c.value()],
        Expr::Prim(..) => return None,
        Expr::Var => vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
        Expr::Sum(terms) => terms
            .iter()
            .try_fold(vec![Complex64::new(0.0, 0.0)], |acc, t| Some(add(&acc, &float_poly(t)?)))?,
        Expr::Product(factors) => factors
            .iter()
            .try_fold(vec![Complex64::new(1.0, 0.0)], |acc, x| Some(mul(&acc, &float_poly(x)?)))?,
        Expr::Pow(base, n) => {
            let b = float_poly(base)?;
            (0..*n).fold(vec![Complex64::new(1.0, 0.0)], |acc, _| mul(&acc, &b))
        }
        Expr::Neg(inner) => float_poly(inner)?.iter().map(|c| -c).collect(),
    })
}

/// Expanded coefficients when `e` has no primitive node.
pub fn to_polynomial(e: &Expr) -> Option<PolyForm> {
    if e.contains_primitive() {
        return None;
    }
    if let Some(exact) = exact_poly(e) {
        return Some(PolyForm::from_exact(exact));
    }
    float_poly(e).map(PolyForm::from_complex)
}
