use super::{Expr, ExprKind, UnaryOp, PREC_TERNARY, PREC_UNARY};

/// Canonical source text: decimal literals, no whitespace, and only the
/// parentheses the precedence rules require.
pub fn format(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(e, &mut out);
    out
}

fn push(out: &mut String, s: &str) {
    // "- -t" must not collapse into a C decrement token
    if out.ends_with('-') && s.starts_with('-') {
        out.push(' ');
    }
    out.push_str(s);
}

fn write_child(e: &Expr, parens: bool, out: &mut String) {
    if parens {
        push(out, "(");
        write_expr(e, out);
        push(out, ")");
    } else {
        write_expr(e, out);
    }
}

fn write_float(v: f64, out: &mut String) {
    if v.is_infinite() {
        push(out, "1e999");
    } else {
        // Debug output is the shortest round-tripping form and always
        // carries a '.' or an exponent.
        push(out, &format!("{v:?}"));
    }
}

fn write_expr(e: &Expr, out: &mut String) {
    match &e.kind {
        ExprKind::Int(v) => push(out, &v.to_string()),
        ExprKind::Float(v) => write_float(*v, out),
        ExprKind::T => push(out, "t"),
        ExprKind::Unary { op, child } => {
            push(
                out,
                match op {
                    UnaryOp::Not => "~",
                    UnaryOp::Neg => "-",
                    UnaryOp::CastInt => "(int)",
                },
            );
            write_child(child, child.precedence() < PREC_UNARY, out);
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let prec = op.precedence();
            write_child(lhs, lhs.precedence() < prec, out);
            push(out, op.symbol());
            write_child(rhs, rhs.precedence() <= prec, out);
        }
        ExprKind::Ternary {
            cond,
            then,
            otherwise,
        } => {
            write_child(cond, cond.precedence() <= PREC_TERNARY, out);
            push(out, "?");
            write_expr(then, out);
            push(out, ":");
            write_expr(otherwise, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::strategy::any_expr;
    use crate::expr::{parse, tokenize, BinaryOp::*, TokenKind};
    use proptest::prelude::*;

    #[test]
    fn examples() {
        let lullaby = Expr::binary(
            Or,
            Expr::binary(And, Expr::binary(Mul, Expr::t(), Expr::int(5)), Expr::binary(Shr, Expr::t(), Expr::int(7))),
            Expr::binary(And, Expr::binary(Mul, Expr::t(), Expr::int(3)), Expr::binary(Shr, Expr::t(), Expr::int(8))),
        );
        assert_eq!(format(&lullaby), "t*5&t>>7|t*3&t>>8");
        assert_eq!(format(&Expr::int(42)), "42");
        let e = Expr::binary(Mul, Expr::t(), Expr::binary(Add, Expr::t(), Expr::int(1)));
        assert_eq!(format(&e), "t*(t+1)");
    }

    #[test]
    fn canonical_forms() {
        for (src, canonical) in [
            ("t*(0xCA98>>(t>>9&14)&15)|t>>8", "t*(51864>>(t>>9&14)&15)|t>>8"),
            ("(int)(t/1e7*t*t+t)", "(int)(t/10000000.0*t*t+t)"),
            ("t - - t", "t- -t"),
            ("(t?1:2)?3:4", "(t?1:2)?3:4"),
            ("t?(t?1:2):(3)", "t?t?1:2:3"),
            ("t-(t-1)", "t-(t-1)"),
            ("(t-t)-1", "t-t-1"),
            ("-(t+1)", "-(t+1)"),
            ("1e999", "1e999"),
        ] {
            assert_eq!(format(&parse(src).unwrap()), canonical, "{src}");
        }
    }

    /// Every way to drop one matching pair of grouping parentheses.
    fn without_one_pair(src: &str) -> Vec<String> {
        let toks = tokenize(src).unwrap();
        let mut opens = Vec::new();
        let mut pairs = Vec::new();
        for (i, tok) in toks.iter().enumerate() {
            if tok.kind == TokenKind::Punct {
                if tok.text == "(" {
                    opens.push(i);
                } else {
                    pairs.push((opens.pop().unwrap(), i));
                }
            }
        }
        pairs
            .into_iter()
            .map(|(open, close)| {
                toks.iter()
                    .enumerate()
                    .filter(|(i, _)| *i != open && *i != close)
                    .map(|(_, t)| t.text)
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect()
    }

    proptest! {
        #[test]
        fn round_trip(e in any_expr()) {
            let text = format(&e);
            prop_assert_eq!(parse(&text).unwrap(), e);
        }

        #[test]
        fn parentheses_are_minimal(e in any_expr()) {
            let text = format(&e);
            for candidate in without_one_pair(&text) {
                if let Ok(reparsed) = parse(&candidate) {
                    prop_assert_ne!(reparsed, e.clone(), "removable parens in {}", text);
                }
            }
        }
    }
}
