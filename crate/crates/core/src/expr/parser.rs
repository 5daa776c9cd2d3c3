use super::lexer::{int_value, tokenize, Token, TokenKind};
use super::{BinaryOp, Expr, ExprKind, ParseError, UnaryOp, PREC_TERNARY};

/// Deepest tree the parser will build. Every later pass recurses over the
/// tree, so this bounds their stack use too.
pub const MAX_DEPTH: u32 = 400;

pub fn parse(source: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        source,
        tokens,
        next: 0,
        nesting: 0,
    };
    let (expr, _) = parser.ternary()?;
    if let Some(tok) = parser.peek() {
        return Err(ParseError::new(tok.pos, "an operator or end of input", format!("'{}'", tok.text)));
    }
    Ok(expr)
}

struct Parser<'a> {
    source: &'a str,
    tokens: Vec<Token<'a>>,
    next: usize,
    nesting: u32,
}

type Parsed = Result<(Expr, u32), ParseError>;

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<Token<'a>> {
        self.tokens.get(self.next).copied()
    }

    fn bump(&mut self) -> Option<Token<'a>> {
        let tok = self.peek();
        self.next += 1;
        tok
    }

    fn error_here(&self, expected: &str) -> ParseError {
        match self.peek() {
            Some(tok) => ParseError::new(tok.pos, expected, format!("'{}'", tok.text)),
            None => ParseError::new(self.source.len(), expected, "end of input"),
        }
    }

    fn at_operator(&self, sym: &str) -> bool {
        self.peek()
            .is_some_and(|t| t.kind == TokenKind::Operator && t.text == sym)
    }

    fn check_depth(&self, depth: u32, pos: usize) -> Result<u32, ParseError> {
        if depth > MAX_DEPTH {
            Err(ParseError::new(pos, format!("at most {MAX_DEPTH} levels of nesting"), "a deeper expression"))
        } else {
            Ok(depth)
        }
    }

    /// Guards recursion before descending, so pathological input fails
    /// fast instead of exhausting the stack.
    fn nested<F: FnOnce(&mut Self) -> Parsed>(&mut self, pos: usize, f: F) -> Parsed {
        self.nesting += 1;
        let result = match self.check_depth(self.nesting, pos) {
            Ok(_) => f(self),
            Err(e) => Err(e),
        };
        self.nesting -= 1;
        result
    }

    fn ternary(&mut self) -> Parsed {
        let (cond, cond_depth) = self.binary(PREC_TERNARY + 1)?;
        if !self.at_operator("?") {
            return Ok((cond, cond_depth));
        }
        let pos = self.bump().map(|t| t.pos).unwrap_or_default();
        let (then, then_depth) = self.nested(pos, Self::ternary)?;
        if !self.at_operator(":") {
            return Err(self.error_here("':'"));
        }
        self.bump();
        let (otherwise, else_depth) = self.nested(pos, Self::ternary)?;
        let depth = self.check_depth(1 + cond_depth.max(then_depth).max(else_depth), pos)?;
        let kind = ExprKind::Ternary {
            cond: Box::new(cond),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        };
        Ok((Expr::new(kind, pos), depth))
    }

    fn binary_op(&self) -> Option<BinaryOp> {
        self.peek()
            .filter(|t| t.kind == TokenKind::Operator)
            .and_then(|t| BinaryOp::from_symbol(t.text))
    }

    fn binary(&mut self, min_prec: u8) -> Parsed {
        let (mut lhs, mut depth) = self.unary()?;
        while let Some(op) = self.binary_op().filter(|op| op.precedence() >= min_prec) {
            let pos = self.bump().map(|t| t.pos).unwrap_or_default();
            let (rhs, rhs_depth) = self.binary(op.precedence() + 1)?;
            depth = self.check_depth(1 + depth.max(rhs_depth), pos)?;
            lhs = Expr::new(
                ExprKind::Binary {
                    op,
                    lhs: Box::new(lhs),
                    rhs: Box::new(rhs),
                },
                pos,
            );
        }
        Ok((lhs, depth))
    }

    fn unary(&mut self) -> Parsed {
        const OPERAND: &str = "an operand";
        let Some(tok) = self.peek() else {
            return Err(self.error_here(OPERAND));
        };
        let op = match (tok.kind, tok.text) {
            (TokenKind::Operator, "~") => Some(UnaryOp::Not),
            (TokenKind::Operator, "-") => Some(UnaryOp::Neg),
            (TokenKind::CastInt, _) => Some(UnaryOp::CastInt),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let (child, child_depth) = self.nested(tok.pos, Self::unary)?;
            let depth = self.check_depth(child_depth + 1, tok.pos)?;
            let kind = ExprKind::Unary {
                op,
                child: Box::new(child),
            };
            return Ok((Expr::new(kind, tok.pos), depth));
        }
        let kind = match tok.kind {
            TokenKind::T => ExprKind::T,
            TokenKind::IntLiteral => ExprKind::Int(int_value(&tok)?),
            TokenKind::FloatLiteral => {
                let value = tok
                    .text
                    .parse::<f64>()
                    .map_err(|_| ParseError::new(tok.pos, "a floating-point literal", format!("'{}'", tok.text)))?;
                ExprKind::Float(value)
            }
            TokenKind::Punct if tok.text == "(" => {
                self.bump();
                let (inner, depth) = self.nested(tok.pos, Self::ternary)?;
                let depth = self.check_depth(depth + 1, tok.pos)?;
                match self.peek() {
                    Some(t) if t.text == ")" => {
                        self.bump();
                        return Ok((inner, depth));
                    }
                    _ => return Err(self.error_here("')'")),
                }
            }
            _ => return Err(self.error_here(OPERAND)),
        };
        self.bump();
        Ok((Expr::new(kind, tok.pos), 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{BinaryOp::*, UnaryOp::*};

    fn t() -> Expr {
        Expr::t()
    }
    fn n(v: u128) -> Expr {
        Expr::int(v)
    }
    fn b(op: BinaryOp, l: Expr, r: Expr) -> Expr {
        Expr::binary(op, l, r)
    }

    #[test]
    fn lullaby_precedence() {
        let expected = b(
            Or,
            b(And, b(Mul, t(), n(5)), b(Shr, t(), n(7))),
            b(And, b(Mul, t(), n(3)), b(Shr, t(), n(8))),
        );
        assert_eq!(parse("t*5&t>>7|t*3&t>>8").unwrap(), expected);
    }

    #[test]
    fn ternary_with_negation() {
        let expected = Expr::ternary(
            b(And, b(Shr, t(), n(6)), n(1)),
            b(Shr, t(), n(5)),
            b(Shr, Expr::unary(Neg, t()), n(4)),
        );
        assert_eq!(parse("t>>6&1?t>>5:-t>>4").unwrap(), expected);
    }

    #[test]
    fn ternary_is_right_associative() {
        let expected = Expr::ternary(t(), n(1), Expr::ternary(t(), n(2), n(3)));
        assert_eq!(parse("t?1:t?2:3").unwrap(), expected);
    }

    #[test]
    fn binary_levels_are_left_associative() {
        assert_eq!(parse("t-1-2").unwrap(), b(Sub, b(Sub, t(), n(1)), n(2)));
        assert_eq!(parse("t>>1<<2").unwrap(), b(Shl, b(Shr, t(), n(1)), n(2)));
        assert_eq!(parse("t/2*3%4").unwrap(), b(Rem, b(Mul, b(Div, t(), n(2)), n(3)), n(4)));
    }

    #[test]
    fn full_precedence_ladder() {
        // every level binds tighter than the one after it
        let e = parse("~t*t+t<<t<t==t&t^t|t?t:t").unwrap();
        let mul = b(Mul, Expr::unary(Not, t()), t());
        let add = b(Add, mul, t());
        let shl = b(Shl, add, t());
        let lt = b(Lt, shl, t());
        let eq = b(Eq, lt, t());
        let and = b(And, eq, t());
        let xor = b(Xor, and, t());
        let or = b(Or, xor, t());
        assert_eq!(e, Expr::ternary(or, t(), t()));
    }

    #[test]
    fn cast_binds_tightly() {
        let e = parse("(int)(t/1e7*t*t+t)").unwrap();
        let inner = b(Add, b(Mul, b(Mul, b(Div, t(), Expr::float(1e7)), t()), t()), t());
        assert_eq!(e, Expr::unary(CastInt, inner));
        assert_eq!(parse("(int)t*2").unwrap(), b(Mul, Expr::unary(CastInt, t()), n(2)));
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("t&&t").unwrap_err().pos, 2);
        assert_eq!(parse("(t+1").unwrap_err().pos, 4);
        assert_eq!(parse("t+1)").unwrap_err().pos, 3);
        assert_eq!(parse("t+").unwrap_err().pos, 2);
        assert_eq!(parse("t?:1").unwrap_err().pos, 2);
        assert_eq!(parse("t?1").unwrap_err().pos, 3);
        assert_eq!(parse("").unwrap_err().pos, 0);
        assert_eq!(parse("+t").unwrap_err().pos, 0);
        assert_eq!(parse("t t").unwrap_err().pos, 2);
    }

    #[test]
    fn double_negation_ignores_whitespace() {
        assert_eq!(parse("--t").unwrap(), parse("- -t").unwrap());
        assert_eq!(parse("t--1").unwrap(), b(Sub, t(), Expr::unary(Neg, n(1))));
    }

    #[test]
    fn nesting_limit() {
        let deep = format!("{}t{}", "(".repeat(1000), ")".repeat(1000));
        assert!(parse(&deep).is_err());
        let long_chain = vec!["t"; 5000].join("+");
        assert!(parse(&long_chain).is_err());
        let ok = format!("{}t{}", "(".repeat(100), ")".repeat(100));
        assert_eq!(parse(&ok).unwrap(), t());
    }
}
