use super::kernels::to_int_width;
use super::typecheck::{Type, Typed, TypedExpr, TypedNode};
use super::SemanticsMode;
use crate::expr::{BinaryOp, UnaryOp};

/// One stack-machine instruction. Integer instructions operate at the
/// program's integer width; `F`-prefixed ones on doubles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Instr {
    PushInt(i64),
    PushDbl(f64),
    /// Push `t` reduced to the integer width.
    LoadT,
    /// Push `t` as an exact double.
    LoadTDbl,
    Not,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Rem,
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
    FNeg,
    FAdd,
    FSub,
    FMul,
    FDiv,
    FRem,
    /// Double comparisons push an integer 1 or 0.
    FLt,
    FLe,
    FGt,
    FGe,
    FEq,
    FNe,
    IntToDbl,
    /// Modular double-to-integer conversion at the integer width.
    DblToInt,
    /// Double to integer truth value (non-zero and not NaN).
    Truthy,
    /// Pops else, then, integer condition; pushes the chosen value.
    Select,
}

impl Instr {
    fn int_binary(op: BinaryOp) -> Instr {
        match op {
            BinaryOp::Mul => Instr::Mul,
            BinaryOp::Div => Instr::Div,
            BinaryOp::Rem => Instr::Rem,
            BinaryOp::Add => Instr::Add,
            BinaryOp::Sub => Instr::Sub,
            BinaryOp::Shl => Instr::Shl,
            BinaryOp::Shr => Instr::Shr,
            BinaryOp::Lt => Instr::Lt,
            BinaryOp::Le => Instr::Le,
            BinaryOp::Gt => Instr::Gt,
            BinaryOp::Ge => Instr::Ge,
            BinaryOp::Eq => Instr::Eq,
            BinaryOp::Ne => Instr::Ne,
            BinaryOp::And => Instr::And,
            BinaryOp::Xor => Instr::Xor,
            BinaryOp::Or => Instr::Or,
        }
    }

    /// Double instruction for `op`, if doubles support it directly.
    fn dbl_binary(op: BinaryOp) -> Option<Instr> {
        Some(match op {
            BinaryOp::Mul => Instr::FMul,
            BinaryOp::Div => Instr::FDiv,
            BinaryOp::Rem => Instr::FRem,
            BinaryOp::Add => Instr::FAdd,
            BinaryOp::Sub => Instr::FSub,
            BinaryOp::Lt => Instr::FLt,
            BinaryOp::Le => Instr::FLe,
            BinaryOp::Gt => Instr::FGt,
            BinaryOp::Ge => Instr::FGe,
            BinaryOp::Eq => Instr::FEq,
            BinaryOp::Ne => Instr::FNe,
            _ => return None,
        })
    }

    /// Net stack effect.
    pub(crate) fn stack_effect(self) -> (usize, usize) {
        use Instr::*;
        match self {
            PushInt(_) | PushDbl(_) | LoadT | LoadTDbl => (0, 1),
            Not | Neg | FNeg | IntToDbl | DblToInt | Truthy => (1, 1),
            Select => (3, 1),
            _ => (2, 1),
        }
    }
}

/// Compiled form of one expression under one semantics mode. Immutable and
/// safe to evaluate from many threads at once.
#[derive(Debug, Clone, PartialEq)]
pub struct Program {
    pub(crate) mode: SemanticsMode,
    pub(crate) code: Vec<Instr>,
    pub(crate) max_stack: usize,
    pub(crate) result: Type,
}

impl Program {
    pub fn mode(&self) -> SemanticsMode {
        self.mode
    }

    pub fn code(&self) -> &[Instr] {
        &self.code
    }

    pub fn max_stack(&self) -> usize {
        self.max_stack
    }

    pub fn result_type(&self) -> Type {
        self.result
    }

    /// Simulates the stack depth of `code`: `Some(max depth)` if the
    /// program never underflows and ends with exactly one value.
    pub fn simulate_depth(code: &[Instr]) -> Option<usize> {
        let (mut depth, mut max) = (0usize, 0usize);
        for instr in code {
            let (pops, pushes) = instr.stack_effect();
            depth = depth.checked_sub(pops)? + pushes;
            max = max.max(depth);
        }
        (depth == 1).then_some(max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CompileOptions {
    /// Replace subtrees without `t` by their value.
    pub fold_constants: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { fold_constants: true }
    }
}

/// Compiles with constant folding.
pub fn compile(typed: &Typed) -> Program {
    compile_with(typed, CompileOptions::default())
}

pub fn compile_with(typed: &Typed, options: CompileOptions) -> Program {
    let mut compiler = Compiler {
        mode: typed.mode,
        options,
        code: Vec::new(),
    };
    compiler.expr(&typed.root);
    let max_stack = Program::simulate_depth(&compiler.code).expect("compiler emits balanced code");
    Program {
        mode: typed.mode,
        code: compiler.code,
        max_stack,
        result: typed.root.ty,
    }
}

struct Compiler {
    mode: SemanticsMode,
    options: CompileOptions,
    code: Vec<Instr>,
}

impl Compiler {
    fn js(&self) -> bool {
        self.mode == SemanticsMode::Js
    }

    fn emit(&mut self, instr: Instr) {
        if instr == Instr::DblToInt {
            let narrow = self.mode.int_width() == 32;
            match self.code.last().copied() {
                Some(Instr::PushDbl(c)) => {
                    self.code.pop();
                    self.code.push(Instr::PushInt(to_int_width(c, self.mode.int_width())));
                    return;
                }
                // int32 → double → int32 is the identity
                Some(Instr::IntToDbl) if narrow => {
                    self.code.pop();
                    return;
                }
                _ => {}
            }
        }
        self.code.push(instr);
    }

    fn expr(&mut self, e: &TypedExpr) {
        let start = self.code.len();
        self.node(e);
        let is_leaf = self.code.len() - start == 1;
        if self.options.fold_constants && !is_leaf && !e.depends_on_t() {
            self.fold(start, e.ty);
        }
    }

    /// Evaluates `code[start..]` with the VM itself and replaces it with a
    /// single push, so folding is exact by construction.
    fn fold(&mut self, start: usize, ty: Type) {
        let code = self.code.split_off(start);
        let max_stack = Program::simulate_depth(&code).expect("subtree code is balanced");
        let sub = Program {
            mode: self.mode,
            code,
            max_stack,
            result: ty,
        };
        let bits = super::vm::eval_raw(&sub, 0);
        self.emit(match ty {
            Type::Int => Instr::PushInt(bits as i64),
            Type::Dbl => Instr::PushDbl(f64::from_bits(bits)),
        });
    }

    fn node(&mut self, e: &TypedExpr) {
        match &e.node {
            TypedNode::Int(v) => self.emit(Instr::PushInt(*v)),
            TypedNode::Dbl(v) => self.emit(Instr::PushDbl(*v)),
            TypedNode::T => self.emit(if self.js() { Instr::LoadTDbl } else { Instr::LoadT }),
            TypedNode::ToDbl(child) => {
                self.expr(child);
                self.emit(Instr::IntToDbl);
            }
            TypedNode::Unary(op, child) => {
                self.expr(child);
                match (op, child.ty) {
                    (UnaryOp::Neg, Type::Int) => self.emit(Instr::Neg),
                    (UnaryOp::Neg, Type::Dbl) => self.emit(Instr::FNeg),
                    (UnaryOp::Not, Type::Int) => self.emit(Instr::Not),
                    (UnaryOp::CastInt, Type::Int) => {}
                    (UnaryOp::CastInt, Type::Dbl) => self.emit(Instr::DblToInt),
                    (UnaryOp::Not, Type::Dbl) => {
                        self.emit(Instr::DblToInt);
                        self.emit(Instr::Not);
                    }
                }
                // JS keeps every intermediate as a double
                if self.js() && matches!(op, UnaryOp::Not | UnaryOp::CastInt) {
                    self.emit(Instr::IntToDbl);
                }
            }
            TypedNode::Binary(op, lhs, rhs) => {
                let doubles = lhs.ty == Type::Dbl;
                match Instr::dbl_binary(*op).filter(|_| doubles) {
                    Some(instr) => {
                        self.expr(lhs);
                        self.expr(rhs);
                        self.emit(instr);
                        if self.js() && op.is_comparison() {
                            self.emit(Instr::IntToDbl);
                        }
                    }
                    None => {
                        // integer operator; JS coerces double operands with ToInt32
                        self.expr(lhs);
                        if doubles {
                            self.emit(Instr::DblToInt);
                        }
                        self.expr(rhs);
                        if rhs.ty == Type::Dbl {
                            self.emit(Instr::DblToInt);
                        }
                        self.emit(Instr::int_binary(*op));
                        if self.js() {
                            self.emit(Instr::IntToDbl);
                        }
                    }
                }
            }
            TypedNode::Select(cond, then, otherwise) => {
                self.expr(cond);
                if cond.ty == Type::Dbl {
                    self.emit(Instr::Truthy);
                }
                self.expr(then);
                self.expr(otherwise);
                self.emit(Instr::Select);
            }
        }
    }
}
