//! Numeric semantics for expressions: typechecking, a reference
//! tree-walking interpreter, and compilation to stack bytecode.
//!
//! Three modes are supported:
//!
//! * [`SemanticsMode::C32`]: two's-complement 32-bit `int`, as in the
//!   original C programs.
//! * [`SemanticsMode::C64`]: the same rules with 64-bit integers.
//! * [`SemanticsMode::Js`]: double-precision arithmetic with `ToInt32`
//!   coercion for bitwise operators and shifts, as in the browser tools.
//!
//! Undefined and implementation-defined C behaviour is pinned down so
//! that every operator is total: arithmetic wraps, `x/0` and `x%0` are 0,
//! shift counts are masked to the width, and `>>` is arithmetic.

mod compile;
pub mod kernels;
mod oracle;
mod typecheck;
mod vm;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

pub use compile::{compile, compile_with, CompileOptions, Instr, Program};
pub use kernels::{scalar_kernels, to_int32};
pub use oracle::eval_ast;
pub use typecheck::{typecheck, Type, TypeError, Typed, TypedExpr, TypedNode};
pub use vm::{eval_sample, render_range};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemanticsMode {
    #[default]
    C32,
    C64,
    Js,
}

impl SemanticsMode {
    pub const ALL: [SemanticsMode; 3] = [SemanticsMode::C32, SemanticsMode::C64, SemanticsMode::Js];

    /// Integer width of the C modes; `None` for JavaScript.
    pub fn c_width(self) -> Option<u32> {
        match self {
            SemanticsMode::C32 => Some(32),
            SemanticsMode::C64 => Some(64),
            SemanticsMode::Js => None,
        }
    }

    /// Width of the integer kernels a compiled program uses.
    pub fn int_width(self) -> u32 {
        self.c_width().unwrap_or(32)
    }

    pub fn name(self) -> &'static str {
        match self {
            SemanticsMode::C32 => "c32",
            SemanticsMode::C64 => "c64",
            SemanticsMode::Js => "js",
        }
    }
}

impl fmt::Display for SemanticsMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for SemanticsMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c32" => Ok(SemanticsMode::C32),
            "c64" => Ok(SemanticsMode::C64),
            "js" => Ok(SemanticsMode::Js),
            other => Err(format!("unknown semantics mode '{other}' (expected c32, c64 or js)")),
        }
    }
}

/// Result of evaluating an expression before quantization to a byte.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    /// Two's-complement integer of the mode's width, sign-extended.
    Int(i64),
    Dbl(f64),
}

impl Value {
    pub fn as_f64(self) -> f64 {
        match self {
            Value::Int(i) => i as f64,
            Value::Dbl(d) => d,
        }
    }

    pub(crate) fn to_int(self, bits: u32) -> i64 {
        match self {
            Value::Int(i) => i,
            Value::Dbl(d) => kernels::to_int_width(d, bits),
        }
    }

    /// The output byte: the low eight bits, with doubles passed through
    /// `ToInt32` first.
    pub fn quantize(self) -> u8 {
        match self {
            Value::Int(i) => i as u8,
            Value::Dbl(d) => to_int32(d) as u8,
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "{i}"),
            Value::Dbl(d) => write!(f, "{d}"),
        }
    }
}

/// Integers serialize as JSON integers, doubles as numbers; NaN and the
/// infinities have no JSON form and become `null`.
impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            Value::Int(i) => s.serialize_i64(i),
            Value::Dbl(d) if d.is_finite() => s.serialize_f64(d),
            Value::Dbl(_) => s.serialize_none(),
        }
    }
}

/// Any failure turning source text into a [`Program`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error(transparent)]
    Parse(#[from] crate::expr::ParseError),
    #[error(transparent)]
    Type(#[from] TypeError),
}

impl CompileError {
    pub fn pos(&self) -> usize {
        match self {
            CompileError::Parse(e) => e.pos,
            CompileError::Type(e) => e.pos,
        }
    }
}

impl Program {
    /// Parses, typechecks and compiles `source` with constant folding.
    pub fn from_source(source: &str, mode: SemanticsMode) -> Result<Program, CompileError> {
        let expr = crate::expr::parse(source)?;
        let typed = typecheck(&expr, mode)?;
        Ok(compile(&typed))
    }
}
