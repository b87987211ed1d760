use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use thiserror::Error;

use super::{evaluate, Constant, Expr, GaussRational, Primitive};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: String,
        found: String,
    },
    #[error("not an entire function at position {position}: {reason}")]
    NotEntire { position: usize, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Decimal(f64),
    Ident(String),
    Op(char),
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(n) => format!("number `{n}`"),
            Tok::Decimal(x) => format!("number `{x}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        }
    }
}

// Functions with poles or branch points.
const NON_ENTIRE: &[&str] = &[
    "log", "ln", "sqrt", "tan", "tanh", "cot", "coth", "sec", "csc", "sech", "csch", "asin",
    "acos", "atan", "gamma",
];

fn lex(text: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let c = bytes[pos] as char;
        if c.is_ascii_whitespace() {
            pos += 1;
            continue;
        }
        let start = pos;
        if c.is_ascii_digit() || (c == '.' && pos + 1 < bytes.len() && bytes[pos + 1].is_ascii_digit())
        {
            let mut decimal = false;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'.' {
                decimal = true;
                pos += 1;
                while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                    pos += 1;
                }
            }
            if pos < bytes.len() && (bytes[pos] == b'e' || bytes[pos] == b'E') {
                let mut look = pos + 1;
                if look < bytes.len() && (bytes[look] == b'+' || bytes[look] == b'-') {
                    look += 1;
                }
                if look < bytes.len() && bytes[look].is_ascii_digit() {
                    decimal = true;
                    pos = look;
                    while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                        pos += 1;
                    }
                }
            }
            let lit = &text[start..pos];
            let tok = if decimal {
                Tok::Decimal(lit.parse().map_err(|_| ParseError::Syntax {
                    position: start,
                    expected: "number".into(),
                    found: format!("`{lit}`"),
                })?)
            } else {
                Tok::Int(lit.parse().expect("digit run"))
            };
            out.push((start, tok));
        } else if c.is_ascii_alphabetic() || c == '_' {
            while pos < bytes.len() && (bytes[pos].is_ascii_alphanumeric() || bytes[pos] == b'_') {
                pos += 1;
            }
            out.push((start, Tok::Ident(text[start..pos].to_string())));
        } else if "+-*/^()".contains(c) {
            pos += 1;
            out.push((start, Tok::Op(c)));
        } else {
            return Err(ParseError::Syntax {
                position: start,
                expected: "expression".into(),
                found: format!("`{c}`"),
            });
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    idx: usize,
}

/// Parses an expression in `z`.
///
/// ```text
/// expr   := term (('+'|'-') term)*
/// term   := factor (('*'|'/') factor)*
/// factor := '-' factor | atom ('^' nonneg_int)?
/// atom   := number | 'i' | 'pi' | 'z' | func '(' expr ')' | '(' expr ')'
/// func   := 'exp' | 'sin' | 'cos' | 'sinh' | 'cosh'
/// ```
///
/// Division is accepted only by a nonzero constant. Constant subtrees made
/// of Gaussian rationals and decimals are folded into a single literal.
pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(text)?,
        idx: 0,
    };
    let e = p.expr()?;
    match p.peek() {
        Tok::End => Ok(e),
        _ => Err(p.unexpected("operator or end of input")),
    }
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.idx].1
    }

    fn pos(&self) -> usize {
        self.toks[self.idx].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.idx].1.clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> ParseError {
        ParseError::Syntax {
            position: self.pos(),
            expected: expected.to_string(),
            found: self.peek().describe(),
        }
    }

    fn expect_op(&mut self, op: char) -> Result<(), ParseError> {
        if *self.peek() == Tok::Op(op) {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&format!("`{op}`")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Op('-') => {
                    self.bump();
                    let t = self.term()?;
                    terms.push(fold_neg(t));
                }
                _ => break,
            }
        }
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            fold_sum(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    factors.push(self.factor()?);
                }
                Tok::Op('/') => {
                    self.bump();
                    let at = self.pos();
                    let divisor = self.factor()?;
                    factors.push(reciprocal(&divisor, at)?);
                }
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            fold_product(factors)
        })
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Op('-') {
            self.bump();
            let inner = self.factor()?;
            return Ok(fold_neg(inner));
        }
        let base = self.atom()?;
        if *self.peek() != Tok::Op('^') {
            return Ok(base);
        }
        self.bump();
        let at = self.pos();
        let n = match self.bump() {
            Tok::Int(n) => u32::try_from(&n).map_err(|_| ParseError::Syntax {
                position: at,
                expected: "exponent below 2^32".into(),
                found: format!("`{n}`"),
            })?,
            Tok::Decimal(x) => {
                return Err(ParseError::NotEntire {
                    position: at,
                    reason: format!("non-integer power {x}"),
                })
            }
            Tok::Op('-') => {
                return Err(ParseError::NotEntire {
                    position: at,
                    reason: "negative power".into(),
                })
            }
            Tok::Op('(') => {
                return Err(ParseError::NotEntire {
                    position: at,
                    reason: "only literal non-negative integer powers are entire".into(),
                })
            }
            other => {
                return Err(ParseError::Syntax {
                    position: at,
                    expected: "non-negative integer exponent".into(),
                    found: other.describe(),
                })
            }
        };
        Ok(fold_pow(base, n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos();
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(Expr::Const(Constant::Exact(GaussRational::new(
                    BigRational::from_integer(n),
                    BigRational::from_integer(0.into()),
                ))))
            }
            Tok::Decimal(x) => {
                self.bump();
                Ok(Expr::Const(Constant::Float(Complex64::new(x, 0.0))))
            }
            Tok::Op('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect_op(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "z" => Ok(Expr::Var),
                    "i" => Ok(Expr::Const(Constant::Exact(GaussRational::i()))),
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    _ => {
                        if let Some(kind) = Primitive::from_name(&name) {
                            self.expect_op('(')?;
                            let arg = self.expr()?;
                            self.expect_op(')')?;
                            Ok(Expr::prim(kind, arg))
                        } else if NON_ENTIRE.contains(&name.as_str()) {
                            Err(ParseError::NotEntire {
                                position: at,
                                reason: format!("`{name}` is not entire"),
                            })
                        } else {
                            Err(ParseError::Syntax {
                                position: at,
                                expected: "`z`, `i`, `pi`, a number or one of exp/sin/cos/sinh/cosh"
                                    .into(),
                                found: format!("`{name}`"),
                            })
                        }
                    }
                }
            }
            _ => Err(self.unexpected("operand")),
        }
    }
}

/// Folded value of a constant subtree that contains only literals
/// (no `pi`, no primitives).
fn literal_value(e: &Expr) -> Option<Constant> {
    if let Some(g) = e.exact_value() {
        return Some(Constant::Exact(g));
    }
    fn numeric(e: &Expr) -> Option<Complex64> {
        match e {
            Expr::Const(Constant::Pi) | Expr::Var | Expr::Prim(..) => None,
            Expr::Const(c) => Some(c.value()),
            Expr::Sum(xs) => xs.iter().try_fold(Complex64::new(0.0, 0.0), |a, x| Some(a + numeric(x)?)),
            Expr::Product(xs) => xs.iter().try_fold(Complex64::new(1.0, 0.0), |a, x| Some(a * numeric(x)?)),
            Expr::Pow(b, n) => Some(numeric(b)?.powu(*n)),
            Expr::Neg(b) => Some(-numeric(b)?),
        }
    }
    numeric(e).map(Constant::Float)
}

fn fold(e: Expr) -> Expr {
    match literal_value(&e) {
        Some(c) => Expr::Const(c),
        None => e,
    }
}

fn fold_neg(e: Expr) -> Expr {
    fold(Expr::Neg(Box::new(e)))
}

fn fold_sum(terms: Vec<Expr>) -> Expr {
    fold(Expr::Sum(terms))
}

fn fold_product(factors: Vec<Expr>) -> Expr {
    fold(Expr::Product(factors))
}

fn fold_pow(base: Expr, n: u32) -> Expr {
    fold(Expr::Pow(Box::new(base), n))
}

fn reciprocal(divisor: &Expr, at: usize) -> Result<Expr, ParseError> {
    if !divisor.is_constant() {
        return Err(ParseError::NotEntire {
            position: at,
            reason: "division by a non-constant expression".into(),
        });
    }
    let zero_div = || ParseError::NotEntire {
        position: at,
        reason: "division by zero".into(),
    };
    if let Some(g) = divisor.exact_value() {
        return g
            .inv()
            .map(|inv| Expr::Const(Constant::Exact(inv)))
            .ok_or_else(zero_div);
    }
    let v = evaluate(divisor, Complex64::new(0.0, 0.0)).map_err(|e| ParseError::NotEntire {
        position: at,
        reason: format!("divisor cannot be evaluated: {e}"),
    })?;
    if v.norm() == 0.0 {
        return Err(zero_div());
    }
    Ok(Expr::Const(Constant::Float(v.inv())))
}
