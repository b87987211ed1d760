use super::{negate, power, product, sum, Expr, Primitive};

/// Structural derivative with respect to `z`.
///
/// Only trivial simplifications are applied (dropping `0` terms and `1`
/// factors), so the result is generally not in any canonical form.
pub fn differentiate(e: &Expr) -> Expr {
    match e {
        Expr::Const(_) => Expr::int(0),
        Expr::Var => Expr::int(1),
        Expr::Sum(terms) => sum(terms.iter().map(differentiate).collect()),
        Expr::Product(factors) => {
            let terms = (0..factors.len())
                .map(|k| {
                    product(
                        factors
                            .iter()
                            .enumerate()
                            .map(|(j, x)| if j == k { differentiate(x) } else { x.clone() })
                            .collect(),
                    )
                })
                .collect();
            sum(terms)
        }
        Expr::Pow(base, n) => match n {
            0 => Expr::int(0),
            _ => product(vec![
                Expr::int(i64::from(*n)),
                power((**base).clone(), n - 1),
                differentiate(base),
            ]),
        },
        Expr::Neg(inner) => negate(differentiate(inner)),
        Expr::Prim(kind, arg) => {
            let inner = differentiate(arg);
            let a = (**arg).clone();
            let outer = match kind {
                Primitive::Exp => Expr::prim(Primitive::Exp, a),
                Primitive::Sin => Expr::prim(Primitive::Cos, a),
                Primitive::Cos => negate(Expr::prim(Primitive::Sin, a)),
                Primitive::Sinh => Expr::prim(Primitive::Cosh, a),
                Primitive::Cosh => Expr::prim(Primitive::Sinh, a),
            };
            match outer {
                Expr::Neg(s) => negate(product(vec![*s, inner])),
                other => product(vec![other, inner]),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{evaluate, parse};
    use num_complex::Complex64;

    #[test]
    fn power_rule() {
        assert_eq!(
            differentiate(&parse("z^2").unwrap()),
            Expr::Product(vec![Expr::int(2), Expr::Var])
        );
        assert_eq!(
            differentiate(&parse("z^4 + z^2").unwrap()),
            Expr::Sum(vec![
                Expr::Product(vec![Expr::int(4), Expr::Pow(Box::new(Expr::Var), 3)]),
                Expr::Product(vec![Expr::int(2), Expr::Var]),
            ])
        );
    }

    #[test]
    fn cosine_derivative_is_negative_sine() {
        assert_eq!(
            differentiate(&parse("cos(z)").unwrap()),
            Expr::Neg(Box::new(Expr::prim(Primitive::Sin, Expr::Var)))
        );
    }

    #[test]
    fn constants_and_chain_rule() {
        assert_eq!(differentiate(&parse("pi").unwrap()), Expr::int(0));
        let d = differentiate(&parse("exp(3*z)").unwrap());
        let z = Complex64::new(0.2, -0.1);
        let want = 3.0 * (3.0 * z).exp();
        assert!((evaluate(&d, z).unwrap() - want).norm() < 1e-12);
    }
}
