//! The one-liner expression language: a side-effect-free subset of C
//! expressions over a single read-only variable `t`.
//!
//! Operators, from tightest to loosest binding:
//!
//! | level          | operators                 | associativity |
//! |----------------|---------------------------|---------------|
//! | unary          | `~` `-` `(int)` `( )`     | prefix        |
//! | multiplicative | `*` `/` `%`               | left          |
//! | additive       | `+` `-`                   | left          |
//! | shift          | `<<` `>>`                 | left          |
//! | relational     | `<` `<=` `>` `>=`         | left          |
//! | equality       | `==` `!=`                 | left          |
//! | bitwise and    | `&`                       | left          |
//! | bitwise xor    | `^`                       | left          |
//! | bitwise or     | `\|`                      | left          |
//! | conditional    | `? :`                     | right         |

mod format;
mod lexer;
mod parser;

use std::fmt;

pub use format::format;
pub use lexer::{tokenize, Token, TokenKind};
pub use parser::parse;

/// Syntax error with the byte offset it was detected at.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at position {pos}: expected {expected}, found {found}")]
pub struct ParseError {
    pub pos: usize,
    pub expected: String,
    pub found: String,
}

impl ParseError {
    pub(crate) fn new(pos: usize, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError {
            pos,
            expected: expected.into(),
            found: found.into(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UnaryOp {
    /// `~`
    Not,
    /// `-`
    Neg,
    /// `(int)`
    CastInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinaryOp {
    Mul,
    Div,
    Rem,
    Add,
    Sub,
    Shl,
    Shr,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
    And,
    Xor,
    Or,
}

impl BinaryOp {
    pub const ALL: [BinaryOp; 16] = [
        BinaryOp::Mul,
        BinaryOp::Div,
        BinaryOp::Rem,
        BinaryOp::Add,
        BinaryOp::Sub,
        BinaryOp::Shl,
        BinaryOp::Shr,
        BinaryOp::Lt,
        BinaryOp::Le,
        BinaryOp::Gt,
        BinaryOp::Ge,
        BinaryOp::Eq,
        BinaryOp::Ne,
        BinaryOp::And,
        BinaryOp::Xor,
        BinaryOp::Or,
    ];

    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
            BinaryOp::Rem => "%",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Shl => "<<",
            BinaryOp::Shr => ">>",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::And => "&",
            BinaryOp::Xor => "^",
            BinaryOp::Or => "|",
        }
    }

    /// Binding strength; larger binds tighter. Unary operators sit above
    /// every binary level and the conditional below all of them.
    pub fn precedence(self) -> u8 {
        match self {
            BinaryOp::Mul | BinaryOp::Div | BinaryOp::Rem => 10,
            BinaryOp::Add | BinaryOp::Sub => 9,
            BinaryOp::Shl | BinaryOp::Shr => 8,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => 7,
            BinaryOp::Eq | BinaryOp::Ne => 6,
            BinaryOp::And => 5,
            BinaryOp::Xor => 4,
            BinaryOp::Or => 3,
        }
    }

    pub(crate) fn from_symbol(s: &str) -> Option<BinaryOp> {
        BinaryOp::ALL.into_iter().find(|op| op.symbol() == s)
    }

    pub fn is_comparison(self) -> bool {
        matches!(
            self,
            BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne
        )
    }
}

pub(crate) const PREC_TERNARY: u8 = 1;
pub(crate) const PREC_UNARY: u8 = 11;
pub(crate) const PREC_ATOM: u8 = 12;

#[derive(Debug, Clone)]
pub enum ExprKind {
    /// Integer literal as written; range checks happen at typecheck time.
    Int(u128),
    Float(f64),
    T,
    Unary {
        op: UnaryOp,
        child: Box<Expr>,
    },
    Binary {
        op: BinaryOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Ternary {
        cond: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

/// A parsed expression. Equality is structural and ignores source positions.
#[derive(Debug, Clone)]
pub struct Expr {
    pub kind: ExprKind,
    pub pos: usize,
}

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        match (&self.kind, &other.kind) {
            (ExprKind::Int(a), ExprKind::Int(b)) => a == b,
            (ExprKind::Float(a), ExprKind::Float(b)) => a.to_bits() == b.to_bits(),
            (ExprKind::T, ExprKind::T) => true,
            (
                ExprKind::Unary { op: a, child: ca },
                ExprKind::Unary { op: b, child: cb },
            ) => a == b && ca == cb,
            (
                ExprKind::Binary { op: a, lhs: la, rhs: ra },
                ExprKind::Binary { op: b, lhs: lb, rhs: rb },
            ) => a == b && la == lb && ra == rb,
            (
                ExprKind::Ternary { cond: ca, then: ta, otherwise: oa },
                ExprKind::Ternary { cond: cb, then: tb, otherwise: ob },
            ) => ca == cb && ta == tb && oa == ob,
            _ => false,
        }
    }
}

impl Expr {
    pub fn new(kind: ExprKind, pos: usize) -> Self {
        Expr { kind, pos }
    }

    pub fn t() -> Self {
        Expr::new(ExprKind::T, 0)
    }

    pub fn int(value: u128) -> Self {
        Expr::new(ExprKind::Int(value), 0)
    }

    pub fn float(value: f64) -> Self {
        Expr::new(ExprKind::Float(value), 0)
    }

    pub fn unary(op: UnaryOp, child: Expr) -> Self {
        Expr::new(
            ExprKind::Unary {
                op,
                child: Box::new(child),
            },
            0,
        )
    }

    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::new(
            ExprKind::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            },
            0,
        )
    }

    pub fn ternary(cond: Expr, then: Expr, otherwise: Expr) -> Self {
        Expr::new(
            ExprKind::Ternary {
                cond: Box::new(cond),
                then: Box::new(then),
                otherwise: Box::new(otherwise),
            },
            0,
        )
    }

    /// Binding strength of the node's outermost operator.
    pub fn precedence(&self) -> u8 {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::T => PREC_ATOM,
            ExprKind::Unary { .. } => PREC_UNARY,
            ExprKind::Binary { op, .. } => op.precedence(),
            ExprKind::Ternary { .. } => PREC_TERNARY,
        }
    }

    /// Number of nodes in the tree.
    pub fn size(&self) -> usize {
        match &self.kind {
            ExprKind::Int(_) | ExprKind::Float(_) | ExprKind::T => 1,
            ExprKind::Unary { child, .. } => 1 + child.size(),
            ExprKind::Binary { lhs, rhs, .. } => 1 + lhs.size() + rhs.size(),
            ExprKind::Ternary {
                cond,
                then,
                otherwise,
            } => 1 + cond.size() + then.size() + otherwise.size(),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(self))
    }
}

#[cfg(test)]
pub(crate) mod strategy {
    use super::*;
    use proptest::prelude::*;

    fn leaf() -> impl Strategy<Value = Expr> {
        prop_oneof![
            3 => Just(Expr::t()),
            2 => (0u128..300).prop_map(Expr::int),
            1 => prop_oneof![Just(0u128), Just(0xCA98), Just(u32::MAX as u128)].prop_map(Expr::int),
        ]
    }

    /// Random integer-typed expressions (no float literals).
    pub fn int_expr() -> impl Strategy<Value = Expr> {
        leaf().prop_recursive(5, 40, 3, |inner| {
            prop_oneof![
                1 => (
                    prop_oneof![Just(UnaryOp::Not), Just(UnaryOp::Neg), Just(UnaryOp::CastInt)],
                    inner.clone()
                )
                    .prop_map(|(op, c)| Expr::unary(op, c)),
                4 => (proptest::sample::select(BinaryOp::ALL.to_vec()), inner.clone(), inner.clone())
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
                1 => (inner.clone(), inner.clone(), inner).prop_map(|(c, a, b)| Expr::ternary(c, a, b)),
            ]
        })
    }

    /// Random expressions that may contain float literals.
    pub fn any_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![
            4 => leaf(),
            1 => prop_oneof![Just(1e7), Just(2.5), Just(0.0), Just(0.125)].prop_map(Expr::float),
        ];
        leaf.prop_recursive(5, 40, 3, |inner| {
            prop_oneof![
                1 => (
                    prop_oneof![Just(UnaryOp::Not), Just(UnaryOp::Neg), Just(UnaryOp::CastInt)],
                    inner.clone()
                )
                    .prop_map(|(op, c)| Expr::unary(op, c)),
                4 => (proptest::sample::select(BinaryOp::ALL.to_vec()), inner.clone(), inner.clone())
                    .prop_map(|(op, l, r)| Expr::binary(op, l, r)),
                1 => (inner.clone(), inner.clone(), inner).prop_map(|(c, a, b)| Expr::ternary(c, a, b)),
            ]
        })
    }
}
