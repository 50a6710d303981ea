//! Refractive-index expressions in one variable.
//!
//! Grammar (standard precedence, `^` binds tighter than unary minus and is
//! right-associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := ('+' | '-') unary | power
//! power  := atom ('^' unary)?
//! atom   := number | 'x' | 'pi' | func '(' expr ')' | '(' expr ')'
//! func   := sin | cos | exp | sqrt | abs
//! ```
//!
//! `Display` prints a fully parenthesized form that parses back to the same tree.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Exp => v.exp(),
            Func::Sqrt => v.sqrt(),
            Func::Abs => v.abs(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Pi,
    Neg(Box<Expr>),
    Call(Func, Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Pi => core::f64::consts::PI,
            Expr::Neg(e) => -e.eval(x),
            Expr::Call(f, e) => f.apply(e.eval(x)),
            Expr::Bin(op, l, r) => {
                let (a, b) = (l.eval(x), r.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` keeps a decimal point and round-trips exactly
            Expr::Num(v) => write!(f, "{:?}", v),
            Expr::X => f.write_str("x"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => write!(f, "(-{})", e),
            Expr::Call(func, e) => write!(f, "{}({})", func.name(), e),
            Expr::Bin(op, l, r) => write!(f, "({} {} {})", l, op.symbol(), r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    UnexpectedEnd,
    UnexpectedToken(String),
    UnclosedParen,
    UnknownIdentifier(String),
    BadNumber(String),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at position {position}: {kind}")]
pub struct ParseError {
    /// Byte offset into the source text.
    pub position: usize,
    pub kind: ParseErrorKind,
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character `{}`", c),
            ParseErrorKind::UnexpectedEnd => f.write_str("unexpected end of input"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected `{}`", t),
            ParseErrorKind::UnclosedParen => f.write_str("unclosed parenthesis"),
            ParseErrorKind::UnknownIdentifier(id) => write!(f, "unknown identifier `{}`", id),
            ParseErrorKind::BadNumber(s) => write!(f, "malformed number `{}`", s),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn next(&mut self) -> Result<(usize, Tok), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && (bytes[self.pos] as char).is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&b) = bytes.get(self.pos) else {
            return Ok((start, Tok::End));
        };
        let c = b as char;
        if c.is_ascii_digit() || c == '.' {
            let mut end = self.pos;
            while end < bytes.len() && ((bytes[end] as char).is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            // optional exponent
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut e = end + 1;
                if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                    e += 1;
                }
                if e < bytes.len() && (bytes[e] as char).is_ascii_digit() {
                    while e < bytes.len() && (bytes[e] as char).is_ascii_digit() {
                        e += 1;
                    }
                    end = e;
                }
            }
            let text = &self.src[start..end];
            self.pos = end;
            return text
                .parse::<f64>()
                .map(|v| (start, Tok::Num(v)))
                .map_err(|_| ParseError { position: start, kind: ParseErrorKind::BadNumber(text.to_string()) });
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut end = self.pos;
            while end < bytes.len() && ((bytes[end] as char).is_ascii_alphanumeric() || bytes[end] == b'_') {
                end += 1;
            }
            self.pos = end;
            return Ok((start, Tok::Ident(self.src[start..end].to_string())));
        }
        self.pos += c.len_utf8().max(1);
        match c {
            '+' | '-' | '*' | '/' | '^' => Ok((start, Tok::Op(c))),
            '(' => Ok((start, Tok::LParen)),
            ')' => Ok((start, Tok::RParen)),
            _ => {
                let ch = self.src[start..].chars().next().unwrap_or(c);
                Err(ParseError { position: start, kind: ParseErrorKind::UnexpectedChar(ch) })
            }
        }
    }
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: (usize, Tok),
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer { src, pos: 0 };
        let peeked = lexer.next()?;
        Ok(Self { lexer, peeked })
    }

    fn bump(&mut self) -> Result<(usize, Tok), ParseError> {
        let next = self.lexer.next()?;
        Ok(core::mem::replace(&mut self.peeked, next))
    }

    fn unexpected(&self) -> ParseError {
        let (position, tok) = &self.peeked;
        let kind = match tok {
            Tok::End => ParseErrorKind::UnexpectedEnd,
            Tok::Num(v) => ParseErrorKind::UnexpectedToken(alloc::format!("{}", v)),
            Tok::Ident(s) => ParseErrorKind::UnexpectedToken(s.clone()),
            Tok::Op(c) => ParseErrorKind::UnexpectedToken(alloc::format!("{}", c)),
            Tok::LParen => ParseErrorKind::UnexpectedToken("(".to_string()),
            Tok::RParen => ParseErrorKind::UnexpectedToken(")".to_string()),
        };
        ParseError { position: *position, kind }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peeked.1 {
                Tok::Op('+') => BinOp::Add,
                Tok::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peeked.1 {
                Tok::Op('*') => BinOp::Mul,
                Tok::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump()?;
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peeked.1 {
            Tok::Op('-') => {
                self.bump()?;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Op('+') => {
                self.bump()?;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.peeked.1 == Tok::Op('^') {
            self.bump()?;
            let exponent = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn closing_paren(&mut self, open_at: usize) -> Result<(), ParseError> {
        match self.peeked.1 {
            Tok::RParen => {
                self.bump()?;
                Ok(())
            }
            Tok::End => Err(ParseError { position: open_at, kind: ParseErrorKind::UnclosedParen }),
            _ => Err(self.unexpected()),
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peeked.1.clone() {
            Tok::Num(v) => {
                self.bump()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                let (open_at, _) = self.bump()?;
                let inner = self.expr()?;
                self.closing_paren(open_at)?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let (at, _) = self.bump()?;
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "pi" => Ok(Expr::Pi),
                    _ => {
                        let Some(func) = Func::from_name(&name) else {
                            return Err(ParseError { position: at, kind: ParseErrorKind::UnknownIdentifier(name) });
                        };
                        if self.peeked.1 != Tok::LParen {
                            return Err(self.unexpected());
                        }
                        let (open_at, _) = self.bump()?;
                        let arg = self.expr()?;
                        self.closing_paren(open_at)?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                }
            }
            _ => Err(self.unexpected()),
        }
    }
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    match p.peeked.1 {
        Tok::End => Ok(e),
        Tok::RParen => Err(p.unexpected()),
        _ => Err(p.unexpected()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;
    use proptest::prelude::*;

    #[test]
    fn precedence() {
        let e = parse("1 + 2 * 3 ^ 2").unwrap();
        assert_eq!(e.eval(0.0), 19.0);
        assert_eq!(parse("-2^2").unwrap().eval(0.0), -4.0);
        assert_eq!(parse("2^3^2").unwrap().eval(0.0), 512.0);
        assert_eq!(parse("2^-1").unwrap().eval(0.0), 0.5);
        assert_eq!(parse("8 / 4 / 2").unwrap().eval(0.0), 1.0);
        assert_eq!(parse("1 - 2 - 3").unwrap().eval(0.0), -4.0);
    }

    #[test]
    fn functions_and_constants() {
        let e = parse("2 + cos(2*pi*x)").unwrap();
        assert_eq!(e.eval(0.0), 3.0);
        assert!((e.eval(0.5) - 1.0).abs() < 1e-15);
        assert_eq!(parse("sqrt(abs(-16))").unwrap().eval(0.0), 4.0);
        assert_eq!(parse("exp(0) + sin(0)").unwrap().eval(0.0), 1.0);
        assert_eq!(parse("1.5e1").unwrap().eval(0.0), 15.0);
    }

    #[test]
    fn unclosed_paren_reports_open_position() {
        let err = parse("2 + cos(2*pi*x").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnclosedParen);
        assert_eq!(err.position, 7);
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("2 + tan(x)").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("tan".into()));
        assert_eq!(err.position, 4);
        assert!(matches!(parse("y").unwrap_err().kind, ParseErrorKind::UnknownIdentifier(_)));
    }

    #[test]
    fn stray_tokens() {
        assert_eq!(parse("2 +").unwrap_err().kind, ParseErrorKind::UnexpectedEnd);
        assert_eq!(parse("2 )").unwrap_err().position, 2);
        assert_eq!(parse("2 $ 3").unwrap_err().kind, ParseErrorKind::UnexpectedChar('$'));
        assert!(parse("1.2.3").is_err());
        assert!(parse("cos x").is_err());
        assert!(parse("").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = Expr> {
        let leaf = prop_oneof![(0.0f64..10.0).prop_map(Expr::Num), Just(Expr::X), Just(Expr::Pi),];
        leaf.prop_recursive(4, 32, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
                (prop_oneof![Just(Func::Sin), Just(Func::Cos), Just(Func::Abs)], inner.clone())
                    .prop_map(|(f, e)| Expr::Call(f, Box::new(e))),
                (
                    prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)],
                    inner.clone(),
                    inner
                )
                    .prop_map(|(op, l, r)| Expr::Bin(op, Box::new(l), Box::new(r))),
            ]
        })
    }

    proptest! {
        #[test]
        fn pretty_print_round_trip(e in arb_expr(), xs in proptest::collection::vec(-0.5f64..0.5, 100)) {
            let printed = format!("{}", e);
            let back = parse(&printed).unwrap();
            for x in xs {
                let (a, b) = (e.eval(x), back.eval(x));
                prop_assert!(a == b || (a.is_nan() && b.is_nan()) || (a - b).abs() <= 1e-15 * a.abs().max(1.0));
            }
        }
    }
}
