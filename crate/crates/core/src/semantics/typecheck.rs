use super::kernels::wrap;
use super::SemanticsMode;
use crate::expr::{BinaryOp, Expr, ExprKind, UnaryOp};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("type error at position {pos}: {msg}")]
pub struct TypeError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type {
    Int,
    Dbl,
}

/// An expression annotated with static types. Implicit conversions are
/// explicit [`TypedNode::ToDbl`] nodes, and literals are already reduced
/// to the mode's representation.
#[derive(Debug, Clone, PartialEq)]
pub struct TypedExpr {
    pub node: TypedNode,
    pub ty: Type,
    pub pos: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TypedNode {
    Int(i64),
    Dbl(f64),
    T,
    Unary(UnaryOp, Box<TypedExpr>),
    Binary(BinaryOp, Box<TypedExpr>, Box<TypedExpr>),
    Select(Box<TypedExpr>, Box<TypedExpr>, Box<TypedExpr>),
    ToDbl(Box<TypedExpr>),
}

impl TypedExpr {
    fn new(node: TypedNode, ty: Type, pos: usize) -> Self {
        TypedExpr { node, ty, pos }
    }

    fn promote(self) -> Self {
        if self.ty == Type::Dbl {
            return self;
        }
        let pos = self.pos;
        TypedExpr::new(TypedNode::ToDbl(Box::new(self)), Type::Dbl, pos)
    }

    pub fn depends_on_t(&self) -> bool {
        match &self.node {
            TypedNode::T => true,
            TypedNode::Int(_) | TypedNode::Dbl(_) => false,
            TypedNode::Unary(_, c) | TypedNode::ToDbl(c) => c.depends_on_t(),
            TypedNode::Binary(_, a, b) => a.depends_on_t() || b.depends_on_t(),
            TypedNode::Select(c, a, b) => c.depends_on_t() || a.depends_on_t() || b.depends_on_t(),
        }
    }
}

/// A typechecked expression together with the mode it was checked for.
#[derive(Debug, Clone, PartialEq)]
pub struct Typed {
    pub mode: SemanticsMode,
    pub root: TypedExpr,
}

/// Checks `e` against `mode` and annotates it with types.
///
/// C modes reject `%`, `~`, shifts and bitwise operators on double
/// operands, and integer literals that do not fit in the mode's width
/// (literals up to 2^width − 1 are accepted and read as two's complement).
/// In JavaScript mode every expression is well typed.
pub fn typecheck(e: &Expr, mode: SemanticsMode) -> Result<Typed, TypeError> {
    let root = match mode.c_width() {
        Some(bits) => check_c(e, bits)?,
        None => check_js(e),
    };
    Ok(Typed { mode, root })
}

fn check_js(e: &Expr) -> TypedExpr {
    let node = match &e.kind {
        // integers above 2^53 round to the nearest double, as JS literals do
        ExprKind::Int(v) => TypedNode::Dbl(*v as f64),
        ExprKind::Float(v) => TypedNode::Dbl(*v),
        ExprKind::T => TypedNode::T,
        ExprKind::Unary { op, child } => TypedNode::Unary(*op, Box::new(check_js(child))),
        ExprKind::Binary { op, lhs, rhs } => {
            TypedNode::Binary(*op, Box::new(check_js(lhs)), Box::new(check_js(rhs)))
        }
        ExprKind::Ternary {
            cond,
            then,
            otherwise,
        } => TypedNode::Select(
            Box::new(check_js(cond)),
            Box::new(check_js(then)),
            Box::new(check_js(otherwise)),
        ),
    };
    TypedExpr::new(node, Type::Dbl, e.pos)
}

fn require_int(e: &TypedExpr, pos: usize, what: &str) -> Result<(), TypeError> {
    if e.ty == Type::Dbl {
        return Err(TypeError {
            pos,
            msg: format!("{what} on double"),
        });
    }
    Ok(())
}

fn check_c(e: &Expr, bits: u32) -> Result<TypedExpr, TypeError> {
    let pos = e.pos;
    Ok(match &e.kind {
        ExprKind::Int(v) => {
            if *v > (u64::MAX >> (64 - bits)) as u128 {
                return Err(TypeError {
                    pos,
                    msg: format!("integer literal {v} does not fit in {bits} bits"),
                });
            }
            TypedExpr::new(TypedNode::Int(wrap(*v as u64 as i64, bits)), Type::Int, pos)
        }
        ExprKind::Float(v) => TypedExpr::new(TypedNode::Dbl(*v), Type::Dbl, pos),
        ExprKind::T => TypedExpr::new(TypedNode::T, Type::Int, pos),
        ExprKind::Unary { op, child } => {
            let child = check_c(child, bits)?;
            let ty = match op {
                UnaryOp::Not => {
                    require_int(&child, pos, "~")?;
                    Type::Int
                }
                UnaryOp::Neg => child.ty,
                UnaryOp::CastInt => Type::Int,
            };
            TypedExpr::new(TypedNode::Unary(*op, Box::new(child)), ty, pos)
        }
        ExprKind::Binary { op, lhs, rhs } => {
            let mut lhs = check_c(lhs, bits)?;
            let mut rhs = check_c(rhs, bits)?;
            let mixed = lhs.ty == Type::Dbl || rhs.ty == Type::Dbl;
            let ty = match op {
                BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul | BinaryOp::Div => {
                    if mixed {
                        Type::Dbl
                    } else {
                        Type::Int
                    }
                }
                BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge | BinaryOp::Eq | BinaryOp::Ne => {
                    Type::Int
                }
                BinaryOp::Rem | BinaryOp::Shl | BinaryOp::Shr | BinaryOp::And | BinaryOp::Xor | BinaryOp::Or => {
                    let what = format!("'{}'", op.symbol());
                    require_int(&lhs, pos, &what)?;
                    require_int(&rhs, pos, &what)?;
                    Type::Int
                }
            };
            if mixed {
                lhs = lhs.promote();
                rhs = rhs.promote();
            }
            TypedExpr::new(TypedNode::Binary(*op, Box::new(lhs), Box::new(rhs)), ty, pos)
        }
        ExprKind::Ternary {
            cond,
            then,
            otherwise,
        } => {
            let cond = check_c(cond, bits)?;
            let mut then = check_c(then, bits)?;
            let mut otherwise = check_c(otherwise, bits)?;
            let ty = if then.ty == Type::Dbl || otherwise.ty == Type::Dbl {
                then = then.promote();
                otherwise = otherwise.promote();
                Type::Dbl
            } else {
                Type::Int
            };
            TypedExpr::new(
                TypedNode::Select(Box::new(cond), Box::new(then), Box::new(otherwise)),
                ty,
                pos,
            )
        }
    })
}
