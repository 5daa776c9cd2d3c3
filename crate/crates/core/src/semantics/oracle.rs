//! Reference interpreter. It walks the untyped syntax tree with
//! dynamically tagged values and evaluates only the taken branch of a
//! conditional, so it shares no code path with the compiler beyond the
//! scalar kernels themselves.

use super::kernels::{scalar_kernels, scalar_unary, truthy, wrap, wrap_t};
use super::{SemanticsMode, Value};
use crate::expr::{BinaryOp, Expr, ExprKind, UnaryOp};

/// Evaluates `e` at time `t` without quantizing the result.
///
/// `e` is expected to have passed [`typecheck`](super::typecheck) for
/// `mode`; for other inputs the result is still defined but unspecified.
pub fn eval_ast(e: &Expr, t: u64, mode: SemanticsMode) -> Value {
    match &e.kind {
        ExprKind::Int(v) => match mode.c_width() {
            Some(bits) => Value::Int(wrap(*v as u64 as i64, bits)),
            None => Value::Dbl(*v as f64),
        },
        ExprKind::Float(v) => Value::Dbl(*v),
        ExprKind::T => match mode.c_width() {
            Some(bits) => Value::Int(wrap_t(t, bits)),
            None => Value::Dbl(t as f64),
        },
        ExprKind::Unary { op, child } => scalar_unary(*op, eval_ast(child, t, mode), mode),
        ExprKind::Binary { op, lhs, rhs } => {
            scalar_kernels(*op, eval_ast(lhs, t, mode), eval_ast(rhs, t, mode), mode)
        }
        ExprKind::Ternary {
            cond,
            then,
            otherwise,
        } => {
            let taken = if truthy(eval_ast(cond, t, mode)) { then } else { otherwise };
            let value = eval_ast(taken, t, mode);
            // C's conditional has one static type: double if either arm is
            let promote = mode.c_width().is_some() && (yields_double(then) || yields_double(otherwise));
            match value {
                Value::Int(i) if promote => Value::Dbl(i as f64),
                v => v,
            }
        }
    }
}

/// Whether a C-mode expression has static type `double`.
fn yields_double(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Float(_) => true,
        ExprKind::Int(_) | ExprKind::T => false,
        ExprKind::Unary { op, child } => match op {
            UnaryOp::Neg => yields_double(child),
            UnaryOp::Not | UnaryOp::CastInt => false,
        },
        ExprKind::Binary { op, lhs, rhs } => match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => {
                yields_double(lhs) || yields_double(rhs)
            }
            _ => false,
        },
        ExprKind::Ternary { then, otherwise, .. } => yields_double(then) || yields_double(otherwise),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use SemanticsMode::*;

    fn eval(src: &str, t: u64, mode: SemanticsMode) -> Value {
        eval_ast(&parse(src).unwrap(), t, mode)
    }

    #[test]
    fn sierpinski_at_511() {
        assert_eq!(eval("t&t>>8", 511, C32), Value::Int(1));
    }

    #[test]
    fn negated_arithmetic_shift() {
        assert_eq!(eval("t>>6&1?t>>5:-t>>4", 16, C32), Value::Int(-1));
    }

    #[test]
    fn float_cast_in_js() {
        // independent route: plain f64 arithmetic in source order
        let t = 1000.0f64;
        let expected = (t / 1e7 * t * t + t).trunc();
        assert_eq!(expected, 1100.0);
        assert_eq!(eval("(int)(t/1e7*t*t+t)", 1000, Js), Value::Dbl(expected));
        assert_eq!(eval("(int)(t/1e7*t*t+t)", 1000, C32), Value::Int(1100));
    }

    #[test]
    fn counter_wraps_at_mode_width() {
        let e = parse("t*9").unwrap();
        for t in [0u64, 1, 12345, 0x7fff_ffff, 0xdead_beef] {
            assert_eq!(eval_ast(&e, t, C32), eval_ast(&e, t + (1 << 32), C32));
        }
        assert_eq!(eval("t", 1 << 31, C32), Value::Int(i32::MIN as i64));
        assert_eq!(eval("t", 1 << 31, C64), Value::Int(1 << 31));
        assert_eq!(eval("t", 1 << 31, Js), Value::Dbl(2147483648.0));
    }

    #[test]
    fn conditional_promotes_in_c() {
        assert_eq!(eval("t?1:2.5", 1, C32), Value::Dbl(1.0));
        assert_eq!(eval("t?1:2", 1, C32), Value::Int(1));
        assert_eq!(eval("t/0.0?1:2", 0, C32), Value::Int(2)); // NaN is false
    }
}
