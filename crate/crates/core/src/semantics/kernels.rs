//! Scalar operations shared by the interpreter and the bytecode VM. Every
//! function here is total: no input traps, panics or produces UB.

use super::{SemanticsMode, Value};
use crate::expr::{BinaryOp, UnaryOp};

const TWO_POW_32: f64 = 4_294_967_296.0;
const TWO_POW_64: f64 = 18_446_744_073_709_551_616.0;

/// The JavaScript `ToInt32` coercion: NaN and infinities map to 0,
/// everything else truncates toward zero and wraps modulo 2^32.
pub fn to_int32(x: f64) -> i32 {
    if !x.is_finite() {
        return 0;
    }
    // fmod is exact, so the remainder is an integer strictly inside ±2^32
    let r = x.trunc() % TWO_POW_32;
    r as i64 as i32
}

/// [`to_int32`] generalized to 64 bits.
pub fn to_int64(x: f64) -> i64 {
    if !x.is_finite() {
        return 0;
    }
    let r = x.trunc() % TWO_POW_64;
    r as i128 as i64
}

/// Double-to-integer conversion at the given width, sign-extended to i64.
pub fn to_int_width(x: f64, bits: u32) -> i64 {
    if bits == 32 {
        to_int32(x) as i64
    } else {
        to_int64(x)
    }
}

/// Reduces a value modulo 2^bits into the signed range, sign-extended.
#[inline(always)]
pub fn wrap(v: i64, bits: u32) -> i64 {
    if bits == 32 {
        v as i32 as i64
    } else {
        v
    }
}

/// Loads the time counter: reduced mod 2^bits, then read as two's complement.
#[inline(always)]
pub fn wrap_t(t: u64, bits: u32) -> i64 {
    wrap(t as i64, bits)
}

#[inline(always)]
pub fn int_unary(op: UnaryOp, a: i64, bits: u32) -> i64 {
    match op {
        UnaryOp::Not => !a,
        UnaryOp::Neg => wrap(a.wrapping_neg(), bits),
        UnaryOp::CastInt => a,
    }
}

/// Integer binary kernel at the given width. Operands must already be
/// sign-extended values of that width.
#[inline(always)]
pub fn int_binary(op: BinaryOp, a: i64, b: i64, bits: u32) -> i64 {
    let narrow = bits == 32;
    match op {
        BinaryOp::Add => wrap(a.wrapping_add(b), bits),
        BinaryOp::Sub => wrap(a.wrapping_sub(b), bits),
        BinaryOp::Mul => wrap(a.wrapping_mul(b), bits),
        BinaryOp::Div if b == 0 => 0,
        BinaryOp::Div if narrow => (a as i32).wrapping_div(b as i32) as i64,
        BinaryOp::Div => a.wrapping_div(b),
        BinaryOp::Rem if b == 0 => 0,
        BinaryOp::Rem if narrow => (a as i32).wrapping_rem(b as i32) as i64,
        BinaryOp::Rem => a.wrapping_rem(b),
        BinaryOp::Shl if narrow => (a as i32).wrapping_shl(b as u32 & 31) as i64,
        BinaryOp::Shl => a.wrapping_shl(b as u32 & 63),
        BinaryOp::Shr if narrow => (a as i32).wrapping_shr(b as u32 & 31) as i64,
        BinaryOp::Shr => a.wrapping_shr(b as u32 & 63),
        BinaryOp::Lt => (a < b) as i64,
        BinaryOp::Le => (a <= b) as i64,
        BinaryOp::Gt => (a > b) as i64,
        BinaryOp::Ge => (a >= b) as i64,
        BinaryOp::Eq => (a == b) as i64,
        BinaryOp::Ne => (a != b) as i64,
        BinaryOp::And => a & b,
        BinaryOp::Xor => a ^ b,
        BinaryOp::Or => a | b,
    }
}

/// IEEE double kernel for arithmetic and comparisons. Comparisons return
/// 1.0 or 0.0 and are false whenever an operand is NaN. `%` is fmod
/// (sign of the dividend, NaN for a zero divisor) as in JavaScript.
/// Bitwise operators are not defined on doubles; callers coerce first.
#[inline(always)]
pub fn dbl_binary(op: BinaryOp, a: f64, b: f64) -> f64 {
    let flag = |c: bool| if c { 1.0 } else { 0.0 };
    match op {
        BinaryOp::Add => a + b,
        BinaryOp::Sub => a - b,
        BinaryOp::Mul => a * b,
        BinaryOp::Div => a / b,
        BinaryOp::Rem => a % b,
        BinaryOp::Lt => flag(a < b),
        BinaryOp::Le => flag(a <= b),
        BinaryOp::Gt => flag(a > b),
        BinaryOp::Ge => flag(a >= b),
        BinaryOp::Eq => flag(a == b),
        BinaryOp::Ne => flag(a != b),
        BinaryOp::Shl | BinaryOp::Shr | BinaryOp::And | BinaryOp::Xor | BinaryOp::Or => {
            int_binary(op, to_int32(a) as i64, to_int32(b) as i64, 32) as f64
        }
    }
}

pub fn truthy(v: Value) -> bool {
    match v {
        Value::Int(i) => i != 0,
        Value::Dbl(d) => d != 0.0 && !d.is_nan(),
    }
}

/// Evaluates one binary operator on dynamically typed values.
///
/// C modes apply the usual arithmetic conversions: two integers use the
/// wrapping integer kernel, otherwise both sides become doubles and
/// comparisons still produce an integer. JavaScript mode works on doubles
/// throughout and routes bitwise operators and shifts through `ToInt32`.
pub fn scalar_kernels(op: BinaryOp, a: Value, b: Value, mode: SemanticsMode) -> Value {
    let Some(bits) = mode.c_width() else {
        return Value::Dbl(dbl_binary(op, a.as_f64(), b.as_f64()));
    };
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Value::Int(int_binary(op, x, y, bits)),
        _ => match op {
            BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => {
                Value::Dbl(dbl_binary(op, a.as_f64(), b.as_f64()))
            }
            _ if op.is_comparison() => Value::Int(dbl_binary(op, a.as_f64(), b.as_f64()) as i64),
            // % and bitwise operators reject doubles at typecheck time;
            // coercing keeps the kernel total regardless
            _ => Value::Int(int_binary(op, a.to_int(bits), b.to_int(bits), bits)),
        },
    }
}

/// Unary counterpart of [`scalar_kernels`].
pub fn scalar_unary(op: UnaryOp, a: Value, mode: SemanticsMode) -> Value {
    let Some(bits) = mode.c_width() else {
        let x = a.as_f64();
        return Value::Dbl(match op {
            UnaryOp::Neg => -x,
            UnaryOp::Not => !to_int32(x) as f64,
            UnaryOp::CastInt => to_int32(x) as f64,
        });
    };
    match (op, a) {
        (UnaryOp::Neg, Value::Dbl(x)) => Value::Dbl(-x),
        (_, Value::Int(x)) => Value::Int(int_unary(op, x, bits)),
        (_, Value::Dbl(x)) => Value::Int(int_unary(op, to_int_width(x, bits), bits)),
    }
}
