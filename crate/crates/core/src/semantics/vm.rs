//! The bytecode interpreter. Stack slots are untyped 64-bit words holding
//! either a sign-extended integer or the bits of a double; the compiler
//! guarantees every instruction sees the slot types it expects.

use super::compile::{Instr, Program};
use super::kernels::{dbl_binary, int_binary, int_unary, to_int_width, wrap_t};
use super::typecheck::Type;
use super::{to_int32, SemanticsMode};
use crate::audio::SampleChunk;
use crate::expr::{BinaryOp, UnaryOp};

const INLINE_STACK: usize = 32;

#[inline(always)]
fn dbl(slot: u64) -> f64 {
    f64::from_bits(slot)
}

#[inline(always)]
fn int_op<const BITS: u32>(op: BinaryOp, stack: &mut [u64], sp: &mut usize) {
    *sp -= 1;
    let b = stack[*sp] as i64;
    let a = stack[*sp - 1] as i64;
    stack[*sp - 1] = int_binary(op, a, b, BITS) as u64;
}

#[inline(always)]
fn dbl_arith(op: BinaryOp, stack: &mut [u64], sp: &mut usize) {
    *sp -= 1;
    stack[*sp - 1] = dbl_binary(op, dbl(stack[*sp - 1]), dbl(stack[*sp])).to_bits();
}

/// Double comparison leaving an integer 1 or 0.
#[inline(always)]
fn dbl_cmp(op: BinaryOp, stack: &mut [u64], sp: &mut usize) {
    *sp -= 1;
    stack[*sp - 1] = dbl_binary(op, dbl(stack[*sp - 1]), dbl(stack[*sp])) as u64;
}

fn exec<const BITS: u32>(code: &[Instr], t: u64, stack: &mut [u64]) -> u64 {
    let mut sp = 0usize;
    let t_int = wrap_t(t, BITS) as u64;
    for &instr in code {
        match instr {
            Instr::PushInt(v) => {
                stack[sp] = v as u64;
                sp += 1;
            }
            Instr::PushDbl(v) => {
                stack[sp] = v.to_bits();
                sp += 1;
            }
            Instr::LoadT => {
                stack[sp] = t_int;
                sp += 1;
            }
            Instr::LoadTDbl => {
                stack[sp] = (t as f64).to_bits();
                sp += 1;
            }
            Instr::Not => stack[sp - 1] = int_unary(UnaryOp::Not, stack[sp - 1] as i64, BITS) as u64,
            Instr::Neg => stack[sp - 1] = int_unary(UnaryOp::Neg, stack[sp - 1] as i64, BITS) as u64,
            Instr::Add => int_op::<BITS>(BinaryOp::Add, stack, &mut sp),
            Instr::Sub => int_op::<BITS>(BinaryOp::Sub, stack, &mut sp),
            Instr::Mul => int_op::<BITS>(BinaryOp::Mul, stack, &mut sp),
            Instr::Div => int_op::<BITS>(BinaryOp::Div, stack, &mut sp),
            Instr::Rem => int_op::<BITS>(BinaryOp::Rem, stack, &mut sp),
            Instr::Shl => int_op::<BITS>(BinaryOp::Shl, stack, &mut sp),
            Instr::Shr => int_op::<BITS>(BinaryOp::Shr, stack, &mut sp),
            Instr::Lt => int_op::<BITS>(BinaryOp::Lt, stack, &mut sp),
            Instr::Le => int_op::<BITS>(BinaryOp::Le, stack, &mut sp),
            Instr::Gt => int_op::<BITS>(BinaryOp::Gt, stack, &mut sp),
            Instr::Ge => int_op::<BITS>(BinaryOp::Ge, stack, &mut sp),
            Instr::Eq => int_op::<BITS>(BinaryOp::Eq, stack, &mut sp),
            Instr::Ne => int_op::<BITS>(BinaryOp::Ne, stack, &mut sp),
            Instr::And => int_op::<BITS>(BinaryOp::And, stack, &mut sp),
            Instr::Xor => int_op::<BITS>(BinaryOp::Xor, stack, &mut sp),
            Instr::Or => int_op::<BITS>(BinaryOp::Or, stack, &mut sp),
            Instr::FNeg => stack[sp - 1] = (-dbl(stack[sp - 1])).to_bits(),
            Instr::FAdd => dbl_arith(BinaryOp::Add, stack, &mut sp),
            Instr::FSub => dbl_arith(BinaryOp::Sub, stack, &mut sp),
            Instr::FMul => dbl_arith(BinaryOp::Mul, stack, &mut sp),
            Instr::FDiv => dbl_arith(BinaryOp::Div, stack, &mut sp),
            Instr::FRem => dbl_arith(BinaryOp::Rem, stack, &mut sp),
            Instr::FLt => dbl_cmp(BinaryOp::Lt, stack, &mut sp),
            Instr::FLe => dbl_cmp(BinaryOp::Le, stack, &mut sp),
            Instr::FGt => dbl_cmp(BinaryOp::Gt, stack, &mut sp),
            Instr::FGe => dbl_cmp(BinaryOp::Ge, stack, &mut sp),
            Instr::FEq => dbl_cmp(BinaryOp::Eq, stack, &mut sp),
            Instr::FNe => dbl_cmp(BinaryOp::Ne, stack, &mut sp),
            Instr::IntToDbl => stack[sp - 1] = (stack[sp - 1] as i64 as f64).to_bits(),
            Instr::DblToInt => stack[sp - 1] = to_int_width(dbl(stack[sp - 1]), BITS) as u64,
            Instr::Truthy => {
                let x = dbl(stack[sp - 1]);
                stack[sp - 1] = (x != 0.0 && !x.is_nan()) as u64;
            }
            Instr::Select => {
                sp -= 2;
                let pick = if stack[sp - 1] != 0 { stack[sp] } else { stack[sp + 1] };
                stack[sp - 1] = pick;
            }
        }
    }
    stack[0]
}

/// Lanes evaluated together by the block interpreter.
const LANES: usize = 256;

type Lanes = [u64; LANES];

#[inline(always)]
fn map1(x: &mut Lanes, f: impl Fn(u64) -> u64) {
    for v in x.iter_mut() {
        *v = f(*v);
    }
}

/// Pops the top lane vector and combines it into the one below.
#[inline(always)]
fn map2(stack: &mut [Lanes], sp: &mut usize, f: impl Fn(u64, u64) -> u64) {
    *sp -= 1;
    let (lower, upper) = stack.split_at_mut(*sp);
    let (a, b) = (&mut lower[*sp - 1], &upper[0]);
    for (x, &y) in a.iter_mut().zip(b.iter()) {
        *x = f(*x, y);
    }
}

/// Runs `code` for `t0 .. t0 + LANES` at once, one instruction across all
/// lanes before the next, and returns the result lanes. Both arms of a
/// conditional are evaluated; every operation is total, so that only
/// costs time.
fn exec_block<const BITS: u32>(code: &[Instr], t0: u64, stack: &mut [Lanes]) -> Lanes {
    let mut sp = 0usize;
    macro_rules! int2 {
        ($op:expr) => {
            map2(stack, &mut sp, |a, b| int_binary($op, a as i64, b as i64, BITS) as u64)
        };
    }
    macro_rules! dbl2 {
        ($op:expr) => {
            map2(stack, &mut sp, |a, b| dbl_binary($op, dbl(a), dbl(b)).to_bits())
        };
    }
    macro_rules! cmp2 {
        ($op:expr) => {
            map2(stack, &mut sp, |a, b| dbl_binary($op, dbl(a), dbl(b)) as u64)
        };
    }
    for &instr in code {
        match instr {
            Instr::PushInt(v) => {
                stack[sp] = [v as u64; LANES];
                sp += 1;
            }
            Instr::PushDbl(v) => {
                stack[sp] = [v.to_bits(); LANES];
                sp += 1;
            }
            Instr::LoadT => {
                for (i, v) in stack[sp].iter_mut().enumerate() {
                    *v = wrap_t(t0.wrapping_add(i as u64), BITS) as u64;
                }
                sp += 1;
            }
            Instr::LoadTDbl => {
                for (i, v) in stack[sp].iter_mut().enumerate() {
                    *v = (t0.wrapping_add(i as u64) as f64).to_bits();
                }
                sp += 1;
            }
            Instr::Not => map1(&mut stack[sp - 1], |a| !a),
            Instr::Neg => map1(&mut stack[sp - 1], |a| int_unary(UnaryOp::Neg, a as i64, BITS) as u64),
            Instr::Add => int2!(BinaryOp::Add),
            Instr::Sub => int2!(BinaryOp::Sub),
            Instr::Mul => int2!(BinaryOp::Mul),
            Instr::Div => int2!(BinaryOp::Div),
            Instr::Rem => int2!(BinaryOp::Rem),
            Instr::Shl => int2!(BinaryOp::Shl),
            Instr::Shr => int2!(BinaryOp::Shr),
            Instr::Lt => int2!(BinaryOp::Lt),
            Instr::Le => int2!(BinaryOp::Le),
            Instr::Gt => int2!(BinaryOp::Gt),
            Instr::Ge => int2!(BinaryOp::Ge),
            Instr::Eq => int2!(BinaryOp::Eq),
            Instr::Ne => int2!(BinaryOp::Ne),
            Instr::And => int2!(BinaryOp::And),
            Instr::Xor => int2!(BinaryOp::Xor),
            Instr::Or => int2!(BinaryOp::Or),
            Instr::FNeg => map1(&mut stack[sp - 1], |a| (-dbl(a)).to_bits()),
            Instr::FAdd => dbl2!(BinaryOp::Add),
            Instr::FSub => dbl2!(BinaryOp::Sub),
            Instr::FMul => dbl2!(BinaryOp::Mul),
            Instr::FDiv => dbl2!(BinaryOp::Div),
            Instr::FRem => dbl2!(BinaryOp::Rem),
            Instr::FLt => cmp2!(BinaryOp::Lt),
            Instr::FLe => cmp2!(BinaryOp::Le),
            Instr::FGt => cmp2!(BinaryOp::Gt),
            Instr::FGe => cmp2!(BinaryOp::Ge),
            Instr::FEq => cmp2!(BinaryOp::Eq),
            Instr::FNe => cmp2!(BinaryOp::Ne),
            Instr::IntToDbl => map1(&mut stack[sp - 1], |a| (a as i64 as f64).to_bits()),
            Instr::DblToInt => map1(&mut stack[sp - 1], |a| to_int_width(dbl(a), BITS) as u64),
            Instr::Truthy => map1(&mut stack[sp - 1], |a| {
                let x = dbl(a);
                (x != 0.0 && !x.is_nan()) as u64
            }),
            Instr::Select => {
                sp -= 2;
                let (lower, upper) = stack.split_at_mut(sp);
                let cond = &mut lower[sp - 1];
                for (i, c) in cond.iter_mut().enumerate() {
                    *c = if *c != 0 { upper[0][i] } else { upper[1][i] };
                }
            }
        }
    }
    stack[0]
}

#[inline]
fn run(p: &Program, t: u64, stack: &mut [u64]) -> u64 {
    match p.mode {
        SemanticsMode::C64 => exec::<64>(&p.code, t, stack),
        SemanticsMode::C32 | SemanticsMode::Js => exec::<32>(&p.code, t, stack),
    }
}

#[inline]
fn quantize(p: &Program, slot: u64) -> u8 {
    match p.result {
        Type::Int => slot as u8,
        Type::Dbl => to_int32(dbl(slot)) as u8,
    }
}

fn with_stack<R>(p: &Program, f: impl FnOnce(&mut [u64]) -> R) -> R {
    if p.max_stack <= INLINE_STACK {
        f(&mut [0u64; INLINE_STACK])
    } else {
        f(&mut vec![0u64; p.max_stack])
    }
}

/// Raw result slot; used by constant folding.
pub(crate) fn eval_raw(p: &Program, t: u64) -> u64 {
    with_stack(p, |stack| run(p, t, stack))
}

impl Program {
    /// The unquantized result at time `t`.
    pub fn eval(&self, t: u64) -> super::Value {
        let slot = eval_raw(self, t);
        match self.result {
            Type::Int => super::Value::Int(slot as i64),
            Type::Dbl => super::Value::Dbl(dbl(slot)),
        }
    }

    /// Fills `out[i]` with the sample at `t0 + i`.
    pub fn render_into(&self, t0: u64, out: &mut [u8]) {
        let mut stack = vec![[0u64; LANES]; self.max_stack.max(1)];
        for (k, block) in out.chunks_mut(LANES).enumerate() {
            let start = t0.wrapping_add((k * LANES) as u64);
            let lanes = match self.mode {
                SemanticsMode::C64 => exec_block::<64>(&self.code, start, &mut stack),
                SemanticsMode::C32 | SemanticsMode::Js => exec_block::<32>(&self.code, start, &mut stack),
            };
            for (byte, &slot) in block.iter_mut().zip(lanes.iter()) {
                *byte = quantize(self, slot);
            }
        }
    }
}

/// One output byte: the low eight bits of the result at `t`.
pub fn eval_sample(p: &Program, t: u64) -> u8 {
    quantize(p, eval_raw(p, t))
}

/// Samples `t0 .. t0 + n` at the default rate.
pub fn render_range(p: &Program, t0: u64, n: usize) -> SampleChunk {
    let mut data = vec![0u8; n];
    p.render_into(t0, &mut data);
    SampleChunk::new(t0, data)
}
