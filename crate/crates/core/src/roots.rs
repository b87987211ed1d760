//! Critical points of `f`: the zeros of `f′`.
//!
//! Polynomial inputs are handled by simultaneous (Aberth–Ehrlich) iteration;
//! exact inputs are first split into square-free factors so repeated roots
//! come out with exact multiplicities. Transcendental inputs are searched
//! with Newton's method seeded on a grid over a user-supplied box. That
//! search is not exhaustive: zeros can be missed when no seed lies in their
//! basin of attraction.

use std::cmp::Ordering;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::expr::{differentiate, evaluate, poly, to_polynomial, Expr, PolyForm};
use crate::series::{expand, SeriesError, DEFAULT_ORDER};
use crate::serde_complex;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RootError {
    #[error("root iteration did not converge within {iterations} iterations")]
    NoConvergence {
        iterations: usize,
        best: Vec<Complex64>,
    },
    #[error("a search box is required to locate critical points of a transcendental function")]
    BoxRequired,
    #[error("invalid search box: {0}")]
    InvalidBox(String),
    #[error("the polynomial has no roots: it is constant")]
    ConstantPolynomial,
    #[error("the function is constant, so every point is critical")]
    ConstantFunction,
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Axis-aligned rectangle with a square seeding grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchBox {
    #[serde(with = "serde_complex")]
    lower_left: Complex64,
    #[serde(with = "serde_complex")]
    upper_right: Complex64,
    grid: usize,
}

impl SearchBox {
    pub fn new(lower_left: Complex64, upper_right: Complex64, grid: usize) -> Result<Self, RootError> {
        if !(lower_left.re < upper_right.re && lower_left.im < upper_right.im) {
            return Err(RootError::InvalidBox(format!(
                "corners {lower_left} and {upper_right} do not span a nonempty rectangle"
            )));
        }
        if grid < 2 {
            return Err(RootError::InvalidBox(format!("grid resolution {grid} is below 2")));
        }
        Ok(Self {
            lower_left,
            upper_right,
            grid,
        })
    }

    pub fn lower_left(&self) -> Complex64 {
        self.lower_left
    }

    pub fn upper_right(&self) -> Complex64 {
        self.upper_right
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn contains(&self, z: Complex64) -> bool {
        let slack = 1e-12 * (self.upper_right - self.lower_left).norm();
        z.re >= self.lower_left.re - slack
            && z.re <= self.upper_right.re + slack
            && z.im >= self.lower_left.im - slack
            && z.im <= self.upper_right.im + slack
    }

    /// Grid nodes in row-major order, corners included.
    pub fn nodes(&self) -> impl Iterator<Item = Complex64> + '_ {
        let n = self.grid;
        let step = (self.upper_right - self.lower_left) / (n - 1) as f64;
        (0..n).flat_map(move |row| {
            (0..n).map(move |col| {
                Complex64::new(
                    self.lower_left.re + step.re * col as f64,
                    self.lower_left.im + step.im * row as f64,
                )
            })
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalPoint {
    #[serde(with = "serde_complex")]
    pub location: Complex64,
    /// `|f′(location)|`.
    pub residual: f64,
    /// Order of the zero of `f′` at `location`.
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootOptions {
    pub tol: f64,
    pub max_iterations: usize,
}

impl Default for RootOptions {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iterations: 1000,
        }
    }
}

// Newton search for transcendental f′.
const NEWTON_MAX_STEPS: usize = 100;
const NEWTON_DEDUP: f64 = 1e-8;
const CRITICAL_RESIDUAL: f64 = 1e-9;
const ZERO_ORDER_TOL: f64 = 1e-9;

/// Orders by real part, then imaginary part.
pub fn cmp_complex(a: &Complex64, b: &Complex64) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Rounds components that are indistinguishable from zero relative to the
/// modulus, so that sorting is not driven by rounding noise.
pub(crate) fn snap(z: Complex64) -> Complex64 {
    let eps = 4.0 * f64::EPSILON * z.norm().max(1.0);
    let clean = |x: f64| if x.abs() <= eps { 0.0 } else { x };
    Complex64::new(clean(z.re), clean(z.im))
}

/// All roots of `p`, repeated according to multiplicity and sorted.
///
/// Each returned root satisfies `|p(r)| ≤ tol · Σ|a_k| max(1,|r|)^k`.
/// Roots closer than `1e3 · tol` are merged into their centroid.
pub fn polynomial_roots(p: &PolyForm, tol: f64, max_iterations: usize) -> Result<Vec<Complex64>, RootError> {
    if p.degree() == 0 {
        return Err(RootError::ConstantPolynomial);
    }
    let mut roots = Vec::with_capacity(p.degree());
    match p.exact_coefficients() {
        Some(exact) => {
            for (factor, mult) in poly::square_free_factors(exact) {
                let coeffs: Vec<Complex64> = factor.iter().map(|g| g.to_complex()).collect();
                for r in aberth(&coeffs, max_iterations)? {
                    roots.extend(std::iter::repeat(r).take(mult as usize));
                }
            }
        }
        None => roots = aberth(p.coefficients(), max_iterations)?,
    }
    let mut roots = merge_clusters(roots, 1e3 * tol);
    for r in roots.iter_mut() {
        *r = snap(*r);
    }
    roots.sort_by(cmp_complex);
    if roots.iter().any(|&r| p.eval(r).norm() > tol * p.scale_at(r)) {
        return Err(RootError::NoConvergence {
            iterations: max_iterations,
            best: roots,
        });
    }
    Ok(roots)
}

/// Aberth–Ehrlich iteration from perturbed-circle starting points.
fn aberth(coeffs: &[Complex64], max_iterations: usize) -> Result<Vec<Complex64>, RootError> {
    let zero = Complex64::new(0.0, 0.0);
    let zeros_at_origin = coeffs.iter().take_while(|&&a| a == zero).count();
    let trimmed = PolyForm::from_complex(coeffs[zeros_at_origin..].to_vec());
    let mut roots = vec![zero; zeros_at_origin];
    let n = trimmed.degree();
    let a = trimmed.coefficients();
    match n {
        0 => return Ok(roots),
        1 => {
            roots.push(-a[0] / a[1]);
            return Ok(roots);
        }
        _ => {}
    }

    // start on a circle of the geometric-mean root modulus
    let radius = (a[0] / a[n]).norm().powf(1.0 / n as f64);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4 + 0.01 * k as f64))
        .collect();
    let mut done = vec![false; n];

    for _ in 0..max_iterations {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (p, dp) = trimmed.eval_with_derivative(z[i]);
            if p == zero {
                done[i] = true;
                continue;
            }
            let noise = 8.0 * f64::EPSILON * trimmed.scale_at(z[i]);
            let ratio = if dp == zero {
                Complex64::new(radius.max(1.0) * 1e-3, 0.0)
            } else {
                p / dp
            };
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !(step.re.is_finite() && step.im.is_finite()) {
                done[i] = true;
                continue;
            }
            z[i] -= step;
            let absolute = f64::EPSILON * radius.max(1.0);
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm() || step.norm() <= absolute || p.norm() <= noise {
                done[i] = true;
            }
        }
        if done.iter().all(|&d| d) {
            roots.extend(z);
            return Ok(roots);
        }
    }
    roots.extend(z);
    Err(RootError::NoConvergence {
        iterations: max_iterations,
        best: roots,
    })
}

/// Single-linkage clusters below `radius` collapse to their centroid,
/// repeated once per member.
fn merge_clusters(roots: Vec<Complex64>, radius: f64) -> Vec<Complex64> {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    fn find(label: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while label[r] != r {
            r = label[r];
        }
        label[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (roots[i] - roots[j]).norm() < radius {
                let (a, b) = (find(&mut label, i), find(&mut label, j));
                label[a.max(b)] = a.min(b);
            }
        }
    }
    let mut out = roots.clone();
    for i in 0..n {
        let root = find(&mut label, i);
        let members: Vec<Complex64> = (0..n)
            .filter(|&j| find(&mut label, j) == root)
            .map(|j| roots[j])
            .collect();
        out[i] = members.iter().sum::<Complex64>() / members.len() as f64;
    }
    out
}

fn multiplicity(derivative: &Expr, at: Complex64) -> Result<usize, RootError> {
    let s = expand(derivative, at, DEFAULT_ORDER)?;
    Ok(s.zero_order(ZERO_ORDER_TOL)?.max(1))
}

/// Zeros of `f′`, sorted by real then imaginary part.
///
/// Polynomial `f` needs no box. Transcendental `f` is searched only inside
/// `search`, and completeness inside the box is not guaranteed.
pub fn critical_points(f: &Expr, search: Option<&SearchBox>) -> Result<Vec<CriticalPoint>, RootError> {
    critical_points_with(f, search, &RootOptions::default())
}

pub fn critical_points_with(
    f: &Expr,
    search: Option<&SearchBox>,
    options: &RootOptions,
) -> Result<Vec<CriticalPoint>, RootError> {
    let d = differentiate(f);
    if let Some(p) = to_polynomial(&d) {
        if p.is_zero() {
            return Err(RootError::ConstantFunction);
        }
        if p.degree() == 0 {
            return Ok(Vec::new());
        }
        let roots = polynomial_roots(&p, options.tol, options.max_iterations)?;
        let mut out: Vec<CriticalPoint> = Vec::new();
        for r in roots {
            if out.last().is_some_and(|c| c.location == r) {
                continue;
            }
            let residual = p.eval(r).norm();
            if residual > CRITICAL_RESIDUAL * (1.0 + p.scale_at(r)) {
                continue;
            }
            out.push(CriticalPoint {
                location: r,
                residual,
                multiplicity: multiplicity(&d, r)?,
            });
        }
        return Ok(out);
    }

    let search = search.ok_or(RootError::BoxRequired)?;
    let d2 = differentiate(&d);
    let mut found: Vec<CriticalPoint> = Vec::new();
    for seed in search.nodes() {
        let Some(z) = newton(&d, &d2, seed) else {
            continue;
        };
        if !search.contains(z) {
            continue;
        }
        let Ok(v) = evaluate(&d, z) else { continue };
        let residual = v.norm();
        if residual > CRITICAL_RESIDUAL {
            continue;
        }
        match found
            .iter_mut()
            .find(|c| (c.location - z).norm() < NEWTON_DEDUP)
        {
            Some(existing) if residual < existing.residual => {
                existing.location = z;
                existing.residual = residual;
            }
            Some(_) => {}
            None => found.push(CriticalPoint {
                location: z,
                residual,
                multiplicity: 0,
            }),
        }
    }
    for c in found.iter_mut() {
        c.location = snap(c.location);
        c.multiplicity = multiplicity(&d, c.location)?;
    }
    found.sort_by(|a, b| cmp_complex(&a.location, &b.location));
    Ok(found)
}

fn newton(d: &Expr, d2: &Expr, seed: Complex64) -> Option<Complex64> {
    let mut z = seed;
    for _ in 0..NEWTON_MAX_STEPS {
        let v = evaluate(d, z).ok()?;
        if v.norm() == 0.0 {
            return Some(z);
        }
        let dv = evaluate(d2, z).ok()?;
        if dv.norm() == 0.0 {
            return None;
        }
        let step = v / dv;
        z -= step;
        if !(z.re.is_finite() && z.im.is_finite()) {
            return None;
        }
        if step.norm() <= 1e-14 * (1.0 + z.norm()) {
            return Some(z);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(text: &str) -> PolyForm {
        to_polynomial(&parse(text).unwrap()).unwrap()
    }

    fn assert_roots(got: &[Complex64], want: &[Complex64], tol: f64) {
        assert_eq!(got.len(), want.len(), "{got:?}");
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).norm() <= tol, "{got:?} vs {want:?}");
        }
    }

    #[test]
    fn cubic_derivative_of_quartic() {
        // 4z^3 + 2z = 2z(2z^2 + 1)
        let r = polynomial_roots(&poly("4*z^3 + 2*z"), 1e-12, 500).unwrap();
        assert_roots(&r, &[c(0.0, -FRAC_1_SQRT_2), c(0.0, 0.0), c(0.0, FRAC_1_SQRT_2)], 1e-10);
    }

    #[test]
    fn double_root_and_linear() {
        assert_eq!(polynomial_roots(&poly("z^2"), 1e-12, 500).unwrap(), vec![c(0.0, 0.0); 2]);
        assert_roots(&polynomial_roots(&poly("z - 1"), 1e-12, 500).unwrap(), &[c(1.0, 0.0)], 0.0);
        assert!(matches!(
            polynomial_roots(&poly("3"), 1e-12, 500),
            Err(RootError::ConstantPolynomial)
        ));
    }

    #[test]
    fn exact_multiplicities() {
        let r = polynomial_roots(&poly("(z - 1)^3 * (z^2 + 1)"), 1e-12, 500).unwrap();
        assert_roots(
            &r,
            &[c(0.0, -1.0), c(0.0, 1.0), c(1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)],
            1e-12,
        );
    }

    #[test]
    fn inexact_coefficients() {
        let r = polynomial_roots(&poly("0.5*z^2 - 2.0"), 1e-12, 500).unwrap();
        assert_roots(&r, &[c(-2.0, 0.0), c(2.0, 0.0)], 1e-12);
        let r = polynomial_roots(&poly("pi*z^3"), 1e-12, 500).unwrap();
        assert_eq!(r, vec![c(0.0, 0.0); 3]);
    }

    #[test]
    fn iteration_budget_exhaustion() {
        let err = polynomial_roots(&poly("0.3*z^5 - 1.7*z + 0.1*i"), 1e-12, 1).unwrap_err();
        match err {
            RootError::NoConvergence { best, .. } => assert_eq!(best.len(), 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn critical_points_of_quartic() {
        let pts = critical_points(&parse("z^4 + z^2").unwrap(), None).unwrap();
        let locs: Vec<_> = pts.iter().map(|p| p.location).collect();
        assert_roots(&locs, &[c(0.0, -FRAC_1_SQRT_2), c(0.0, 0.0), c(0.0, FRAC_1_SQRT_2)], 1e-10);
        assert!(pts.iter().all(|p| p.multiplicity == 1));
    }

    #[test]
    fn critical_points_of_monomial() {
        let pts = critical_points(&parse("z^5").unwrap(), None).unwrap();
        assert_eq!(pts.len(), 1);
        assert_eq!(pts[0].location, c(0.0, 0.0));
        assert_eq!(pts[0].multiplicity, 4);
    }

    #[test]
    fn critical_points_of_cosine() {
        let b = SearchBox::new(c(-7.0, -1.0), c(7.0, 1.0), 40).unwrap();
        let pts = critical_points(&parse("cos(z)").unwrap(), Some(&b)).unwrap();
        let locs: Vec<_> = pts.iter().map(|p| p.location).collect();
        let want: Vec<_> = (-2..=2).map(|k| c(k as f64 * PI, 0.0)).collect();
        assert_roots(&locs, &want, 1e-9);
    }

    #[test]
    fn exponential_has_no_critical_points() {
        let b = SearchBox::new(c(-3.0, -3.0), c(3.0, 3.0), 10).unwrap();
        assert!(critical_points(&parse("exp(z)").unwrap(), Some(&b)).unwrap().is_empty());
        assert!(matches!(
            critical_points(&parse("exp(z)").unwrap(), None),
            Err(RootError::BoxRequired)
        ));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(critical_points(&parse("3*z + 1").unwrap(), None).unwrap().is_empty());
        assert!(matches!(
            critical_points(&parse("7").unwrap(), None),
            Err(RootError::ConstantFunction)
        ));
        assert!(SearchBox::new(c(1.0, 0.0), c(0.0, 1.0), 4).is_err());
        assert!(SearchBox::new(c(0.0, 0.0), c(1.0, 1.0), 1).is_err());
    }
}
