//! Closed-form entire functions of one complex variable `z`.
//!
//! Expressions are built only from constants, `z`, sums, products,
//! non-negative integer powers, negation and the entire primitives
//! `exp`, `sin`, `cos`, `sinh`, `cosh`. Anything else is rejected by
//! [`parse`], so every [`Expr`] denotes an entire function.

mod diff;
mod eval;
pub mod gauss;
mod parse;
pub(crate) mod poly;

use std::fmt;

use num_complex::Complex64;

pub use diff::differentiate;
pub use eval::{evaluate, EvalError};
pub use gauss::GaussRational;
pub use parse::{parse, ParseError};
pub use poly::{to_polynomial, PolyForm};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Primitive {
    Exp,
    Sin,
    Cos,
    Sinh,
    Cosh,
}

impl Primitive {
    pub fn name(self) -> &'static str {
        match self {
            Primitive::Exp => "exp",
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::Sinh => "sinh",
            Primitive::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Primitive::Exp,
            "sin" => Primitive::Sin,
            "cos" => Primitive::Cos,
            "sinh" => Primitive::Sinh,
            "cosh" => Primitive::Cosh,
            _ => return None,
        })
    }

    pub fn apply(self, w: Complex64) -> Complex64 {
        match self {
            Primitive::Exp => w.exp(),
            Primitive::Sin => w.sin(),
            Primitive::Cos => w.cos(),
            Primitive::Sinh => w.sinh(),
            Primitive::Cosh => w.cosh(),
        }
    }
}

/// A literal constant. `Pi` is kept symbolic; `Float` holds values that
/// were written as decimals or obtained by dividing by a non-exact constant.
#[derive(Clone, Debug, PartialEq)]
pub enum Constant {
    Exact(GaussRational),
    Pi,
    Float(Complex64),
}

impl Constant {
    pub fn value(&self) -> Complex64 {
        match self {
            Constant::Exact(g) => g.to_complex(),
            Constant::Pi => Complex64::new(std::f64::consts::PI, 0.0),
            Constant::Float(z) => *z,
        }
    }

    pub fn integer(n: i64) -> Self {
        Constant::Exact(GaussRational::from_integer(n))
    }

    fn is_exact_value(&self, g: &GaussRational) -> bool {
        matches!(self, Constant::Exact(h) if h == g)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Constant),
    Var,
    Sum(Vec<Expr>),
    Product(Vec<Expr>),
    Pow(Box<Expr>, u32),
    Neg(Box<Expr>),
    Prim(Primitive, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Self {
        Expr::Const(Constant::integer(n))
    }

    pub fn prim(kind: Primitive, arg: Expr) -> Self {
        Expr::Prim(kind, Box::new(arg))
    }

    /// True when `z` does not occur.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().all(Expr::is_constant),
            Expr::Pow(b, _) | Expr::Neg(b) | Expr::Prim(_, b) => b.is_constant(),
        }
    }

    pub fn contains_primitive(&self) -> bool {
        match self {
            Expr::Const(_) | Expr::Var => false,
            Expr::Prim(..) => true,
            Expr::Sum(xs) | Expr::Product(xs) => xs.iter().any(Expr::contains_primitive),
            Expr::Pow(b, _) | Expr::Neg(b) => b.contains_primitive(),
        }
    }

    /// Exact value of a constant subtree built from Gaussian rationals only.
    pub fn exact_value(&self) -> Option<GaussRational> {
        match self {
            Expr::Const(Constant::Exact(g)) => Some(g.clone()),
            Expr::Const(_) | Expr::Var | Expr::Prim(..) => None,
            Expr::Sum(xs) => xs
                .iter()
                .try_fold(GaussRational::zero(), |acc, x| Some(&acc + &x.exact_value()?)),
            Expr::Product(xs) => xs
                .iter()
                .try_fold(GaussRational::one(), |acc, x| Some(&acc * &x.exact_value()?)),
            Expr::Pow(b, n) => Some(b.exact_value()?.pow(*n)),
            Expr::Neg(b) => Some(-b.exact_value()?),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Sum(_) => 1,
            Expr::Product(_) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(_) | Expr::Var | Expr::Prim(..) => 5,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "(")?;
            self.fmt_prec(f, 0)?;
            return write!(f, ")");
        }
        match self {
            Expr::Const(c) => fmt_constant(c, f),
            Expr::Var => write!(f, "z"),
            Expr::Sum(terms) => {
                for (idx, t) in terms.iter().enumerate() {
                    match (idx, t) {
                        (0, t) => t.fmt_prec(f, 2)?,
                        (_, Expr::Neg(inner)) => {
                            write!(f, " - ")?;
                            inner.fmt_prec(f, 2)?;
                        }
                        (_, t) => {
                            write!(f, " + ")?;
                            t.fmt_prec(f, 2)?;
                        }
                    }
                }
                Ok(())
            }
            Expr::Product(factors) => {
                for (idx, x) in factors.iter().enumerate() {
                    if idx > 0 {
                        write!(f, " * ")?;
                    }
                    x.fmt_prec(f, 3)?;
                }
                Ok(())
            }
            Expr::Neg(inner) => {
                write!(f, "-")?;
                inner.fmt_prec(f, 3)
            }
            Expr::Pow(base, n) => {
                base.fmt_prec(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Prim(kind, arg) => {
                write!(f, "{}(", kind.name())?;
                arg.fmt_prec(f, 0)?;
                write!(f, ")")
            }
        }
    }
}

fn fmt_constant(c: &Constant, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    match c {
        Constant::Exact(g) => write!(f, "{g}"),
        Constant::Pi => write!(f, "pi"),
        Constant::Float(z) if z.im == 0.0 => write!(f, "({:?})", z.re),
        Constant::Float(z) if z.re == 0.0 => write!(f, "({:?}*i)", z.im),
        Constant::Float(z) => write!(f, "({:?} + {:?}*i)", z.re, z.im),
    }
}

/// Prints text that [`parse`] maps back to a structurally equal tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 0)
    }
}

// Lightly simplifying constructors used when building derived trees.

pub(crate) fn sum(terms: Vec<Expr>) -> Expr {
    let zero = GaussRational::zero();
    let mut kept: Vec<Expr> = terms
        .into_iter()
        .filter(|t| !matches!(t, Expr::Const(c) if c.is_exact_value(&zero)))
        .collect();
    match kept.len() {
        0 => Expr::int(0),
        1 => kept.pop().unwrap(),
        _ => Expr::Sum(kept),
    }
}

pub(crate) fn product(factors: Vec<Expr>) -> Expr {
    let zero = GaussRational::zero();
    let one = GaussRational::one();
    if factors
        .iter()
        .any(|x| matches!(x, Expr::Const(c) if c.is_exact_value(&zero)))
    {
        return Expr::int(0);
    }
    let mut kept: Vec<Expr> = factors
        .into_iter()
        .filter(|x| !matches!(x, Expr::Const(c) if c.is_exact_value(&one)))
        .collect();
    match kept.len() {
        0 => Expr::int(1),
        1 => kept.pop().unwrap(),
        _ => Expr::Product(kept),
    }
}

pub(crate) fn power(base: Expr, n: u32) -> Expr {
    match n {
        0 => Expr::int(1),
        1 => base,
        _ => Expr::Pow(Box::new(base), n),
    }
}

pub(crate) fn negate(x: Expr) -> Expr {
    match x {
        Expr::Const(Constant::Exact(g)) => Expr::Const(Constant::Exact(-g)),
        Expr::Neg(inner) => *inner,
        other => Expr::Neg(Box::new(other)),
    }
}
