use num_complex::Complex64;
use thiserror::Error;

use super::Expr;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("overflow while evaluating `{node}` at z = {z}")]
    Overflow { node: String, z: Complex64 },
}

fn checked(v: Complex64, node: &Expr, z: Complex64) -> Result<Complex64, EvalError> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::Overflow {
            node: node.to_string(),
            z,
        })
    }
}

/// Evaluates `e` at `z`. Non-finite intermediates are reported as
/// [`EvalError::Overflow`].
pub fn evaluate(e: &Expr, z: Complex64) -> Result<Complex64, EvalError> {
    let v = match e {
        Expr::Const(c) => c.value(),
        Expr::Var => z,
        Expr::Sum(terms) => {
            let mut acc = Complex64::new(0.0, 0.0);
            for t in terms {
                acc += evaluate(t, z)?;
            }
            acc
        }
        Expr::Product(factors) => {
            let mut acc = Complex64::new(1.0, 0.0);
            for x in factors {
                acc *= evaluate(x, z)?;
            }
            acc
        }
        Expr::Pow(base, n) => evaluate(base, z)?.powu(*n),
        Expr::Neg(inner) => -evaluate(inner, z)?,
        Expr::Prim(kind, arg) => kind.apply(evaluate(arg, z)?),
    };
    checked(v, e, z)
}
