use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    IntLiteral,
    FloatLiteral,
    /// The time counter `t`.
    T,
    /// Any operator symbol, including `?` and `:`.
    Operator,
    /// `(` or `)`.
    Punct,
    /// The `(int)` cast, possibly with inner whitespace.
    CastInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Token<'a> {
    pub kind: TokenKind,
    pub text: &'a str,
    pub pos: usize,
}

const OPERATORS: [&str; 20] = [
    "<<", ">>", "<=", ">=", "==", "!=", "*", "/", "%", "+", "-", "<", ">", "&", "^", "|", "~", "?",
    ":", "!",
];

fn is_ident_start(c: u8) -> bool {
    c.is_ascii_alphabetic() || c == b'_'
}

fn is_ident_char(c: u8) -> bool {
    c.is_ascii_alphanumeric() || c == b'_'
}

fn describe(source: &str, pos: usize) -> String {
    match source[pos..].chars().next() {
        Some(c) => format!("'{c}'"),
        None => "end of input".to_string(),
    }
}

pub fn tokenize(source: &str) -> Result<Vec<Token<'_>>, ParseError> {
    let bytes = source.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = if c.is_ascii_digit() || (c == b'.' && bytes.get(i + 1).is_some_and(u8::is_ascii_digit)) {
            let (end, kind) = scan_number(source, i)?;
            i = end;
            kind
        } else if is_ident_start(c) {
            while i < bytes.len() && is_ident_char(bytes[i]) {
                i += 1;
            }
            let word = &source[start..i];
            if word != "t" {
                return Err(ParseError::new(start, "'t', a literal or '('", format!("'{word}'")));
            }
            TokenKind::T
        } else if c == b'(' {
            match scan_cast(bytes, i) {
                Some(end) => {
                    i = end;
                    TokenKind::CastInt
                }
                None => {
                    i += 1;
                    TokenKind::Punct
                }
            }
        } else if c == b')' {
            i += 1;
            TokenKind::Punct
        } else if (c == b'&' || c == b'|') && bytes.get(i + 1) == Some(&c) {
            return Err(ParseError::new(
                i + 1,
                "an operand (logical operators are not supported)",
                describe(source, i + 1),
            ));
        } else if let Some(op) = OPERATORS.iter().find(|op| source[i..].starts_with(**op)) {
            if *op == "!" {
                return Err(ParseError::new(i, "an operator from the expression subset", "'!'"));
            }
            i += op.len();
            TokenKind::Operator
        } else {
            return Err(ParseError::new(
                i,
                "an operator, operand or parenthesis",
                describe(source, i),
            ));
        };
        tokens.push(Token {
            kind,
            text: &source[start..i],
            pos: start,
        });
    }
    Ok(tokens)
}

/// Recognizes `(int)` with optional inner whitespace; returns the end offset.
fn scan_cast(bytes: &[u8], open: usize) -> Option<usize> {
    let mut i = open + 1;
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    if !bytes[i..].starts_with(b"int") || bytes.get(i + 3).copied().is_some_and(is_ident_char) {
        return None;
    }
    i += 3;
    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
        i += 1;
    }
    (bytes.get(i) == Some(&b')')).then_some(i + 1)
}

fn scan_number(source: &str, start: usize) -> Result<(usize, TokenKind), ParseError> {
    let bytes = source.as_bytes();
    let mut i = start;
    let digits = |mut i: usize, pred: fn(&u8) -> bool| {
        while i < bytes.len() && pred(&bytes[i]) {
            i += 1;
        }
        i
    };
    let kind = if bytes[i] == b'0' && matches!(bytes.get(i + 1), Some(b'x' | b'X')) {
        let end = digits(i + 2, u8::is_ascii_hexdigit);
        if end == i + 2 {
            return Err(ParseError::new(end, "hexadecimal digits", describe(source, end)));
        }
        i = end;
        TokenKind::IntLiteral
    } else {
        let mut kind = TokenKind::IntLiteral;
        i = digits(i, u8::is_ascii_digit);
        if bytes.get(i) == Some(&b'.') {
            kind = TokenKind::FloatLiteral;
            i = digits(i + 1, u8::is_ascii_digit);
        }
        if matches!(bytes.get(i), Some(b'e' | b'E')) {
            kind = TokenKind::FloatLiteral;
            let mut j = i + 1;
            if matches!(bytes.get(j), Some(b'+' | b'-')) {
                j += 1;
            }
            let end = digits(j, u8::is_ascii_digit);
            if end == j {
                return Err(ParseError::new(end, "exponent digits", describe(source, end)));
            }
            i = end;
        }
        kind
    };
    if bytes.get(i).copied().is_some_and(|c| is_ident_char(c) || c == b'.') {
        return Err(ParseError::new(i, "end of numeric literal", describe(source, i)));
    }
    Ok((i, kind))
}

/// Value of an integer literal token: decimal, `0x` hexadecimal, or
/// leading-zero octal as in C.
pub(crate) fn int_value(token: &Token<'_>) -> Result<u128, ParseError> {
    let text = token.text;
    let (digits, radix) = if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        (hex, 16)
    } else if text.len() > 1 && text.starts_with('0') {
        (&text[1..], 8)
    } else {
        (text, 10)
    };
    u128::from_str_radix(digits, radix).map_err(|e| {
        let expected = match e.kind() {
            std::num::IntErrorKind::PosOverflow => "an integer literal below 2^128",
            _ => "octal digits after a leading zero",
        };
        ParseError::new(token.pos, expected, format!("'{text}'"))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn texts(src: &str) -> Vec<&str> {
        tokenize(src).unwrap().into_iter().map(|t| t.text).collect()
    }

    #[test]
    fn sierpinski_tokens() {
        assert_eq!(texts("t&t>>8"), ["t", "&", "t", ">>", "8"]);
    }

    #[test]
    fn rrrola_tokens() {
        let toks = tokenize("t*(0xCA98>>(t>>9&14)&15)|t>>8").unwrap();
        assert_eq!(toks.len(), 19);
        assert_eq!(toks[3].text, "0xCA98");
        assert_eq!(toks[3].kind, TokenKind::IntLiteral);
        assert_eq!(int_value(&toks[3]).unwrap(), 0xCA98);
    }

    #[test]
    fn unknown_identifier() {
        let err = tokenize("u+1").unwrap_err();
        assert_eq!(err.pos, 0);
        assert_eq!(err.found, "'u'");
    }

    #[test]
    fn logical_operators_rejected() {
        assert_eq!(tokenize("t&&t").unwrap_err().pos, 2);
        assert_eq!(tokenize("t || t").unwrap_err().pos, 3);
        assert_eq!(tokenize("!t").unwrap_err().pos, 0);
        assert_eq!(tokenize("t;").unwrap_err().pos, 1);
        assert_eq!(tokenize("t=1").unwrap_err().pos, 1);
    }

    #[test]
    fn literals() {
        let toks = tokenize("1e7 2.5 .5 3 0x1f 1E-3").unwrap();
        let kinds: Vec<_> = toks.iter().map(|t| t.kind).collect();
        use TokenKind::*;
        assert_eq!(kinds, [FloatLiteral, FloatLiteral, FloatLiteral, IntLiteral, IntLiteral, FloatLiteral]);
        assert!(tokenize("12abc").is_err());
        assert!(tokenize("0x").is_err());
        assert!(tokenize("1e").is_err());
        assert_eq!(int_value(&tokenize("017").unwrap()[0]).unwrap(), 15);
        assert!(int_value(&tokenize("019").unwrap()[0]).is_err());
    }

    #[test]
    fn cast_token() {
        let toks = tokenize("( int )(t/1e7)").unwrap();
        assert_eq!(toks[0].kind, TokenKind::CastInt);
        assert_eq!(toks[0].text, "( int )");
        assert_eq!(tokenize("(t)").unwrap()[0].kind, TokenKind::Punct);
        assert!(tokenize("(integer)t").is_err());
        assert!(tokenize("(char)t").is_err());
    }

    #[test]
    fn positions_increase_and_texts_cover_source() {
        let src = " t * ( 42 & t>>10 ) ";
        let toks = tokenize(src).unwrap();
        assert!(toks.windows(2).all(|w| w[0].pos < w[1].pos));
        let joined: String = toks.iter().map(|t| t.text).collect();
        let stripped: String = src.chars().filter(|c| !c.is_whitespace()).collect();
        assert_eq!(joined, stripped);
    }
}
