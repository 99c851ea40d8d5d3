//! Field expressions: `expr := ['-'] term (('+'|'-') term)*`,
//! `term := factor (('*'|'/') factor)*`, `factor := atom ('^' uint)?`,
//! `atom := name | uint | '(' expr ')'`.

use std::fmt;

/// Position of a token, 1-based. Spans never take part in equality so that
/// reparsed expressions compare equal to the originals.
#[derive(Clone, Copy, Debug, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl PartialEq for Span {
    fn eq(&self, _: &Span) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    pub kind: ExprKind,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ExprKind {
    Name(String),
    Int(u64),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntaxError {
    pub message: String,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Name(String),
    Int(u64),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name `{n}`"),
            Tok::Int(n) => format!("integer `{n}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

/// Splits `text` into tokens; `line` and `column` locate its first character.
pub fn tokenize(text: &str, line: usize, column: usize) -> Result<Vec<(Tok, Span)>, SyntaxError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let span = Span {
            line,
            column: column + i,
        };
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' => Some(Tok::Minus),
            '*' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            _ => None,
        };
        if let Some(t) = single {
            out.push((t, span));
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            let n = digits.parse().map_err(|_| SyntaxError {
                message: format!("integer `{digits}` is too large"),
                line,
                column: span.column,
            })?;
            out.push((Tok::Int(n), span));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((Tok::Name(chars[start..i].iter().collect()), span));
        } else {
            return Err(SyntaxError {
                message: format!("unexpected character `{c}`"),
                line,
                column: span.column,
            });
        }
    }
    Ok(out)
}

/// A cursor over tokens, shared with the manifest value parser.
pub struct Parser<'a> {
    toks: &'a [(Tok, Span)],
    pos: usize,
    end: Span,
}

impl<'a> Parser<'a> {
    /// `end` is reported for errors at the end of input.
    pub fn new(toks: &'a [(Tok, Span)], end: Span) -> Self {
        Parser { toks, pos: 0, end }
    }

    pub fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    pub fn span(&self) -> Span {
        self.toks.get(self.pos).map_or(self.end, |t| t.1)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub fn bump(&mut self) -> Option<(Tok, Span)> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    pub fn error(&self, message: impl Into<String>) -> SyntaxError {
        let s = self.span();
        SyntaxError {
            message: message.into(),
            line: s.line,
            column: s.column,
        }
    }

    pub fn unexpected(&self, wanted: &str) -> SyntaxError {
        match self.peek() {
            Some(t) => self.error(format!("expected {wanted}, found {}", t.describe())),
            None => self.error(format!("expected {wanted}, found end of input")),
        }
    }

    pub fn expect(&mut self, tok: Tok) -> Result<Span, SyntaxError> {
        if self.peek() == Some(&tok) {
            Ok(self.bump().unwrap().1)
        } else {
            Err(self.unexpected(&tok.describe()))
        }
    }

    pub fn expr(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = if self.peek() == Some(&Tok::Minus) {
            let span = self.bump().unwrap().1;
            let t = self.term()?;
            Expr {
                kind: ExprKind::Neg(Box::new(t)),
                span,
            }
        } else {
            self.term()?
        };
        loop {
            let make: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Some(Tok::Plus) => ExprKind::Add,
                Some(Tok::Minus) => ExprKind::Sub,
                _ => return Ok(lhs),
            };
            let span = self.bump().unwrap().1;
            let rhs = self.term()?;
            lhs = Expr {
                kind: make(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn term(&mut self) -> Result<Expr, SyntaxError> {
        let mut lhs = self.factor()?;
        loop {
            let make: fn(Box<Expr>, Box<Expr>) -> ExprKind = match self.peek() {
                Some(Tok::Star) => ExprKind::Mul,
                Some(Tok::Slash) => ExprKind::Div,
                _ => return Ok(lhs),
            };
            let span = self.bump().unwrap().1;
            let rhs = self.factor()?;
            lhs = Expr {
                kind: make(Box::new(lhs), Box::new(rhs)),
                span,
            };
        }
    }

    fn factor(&mut self) -> Result<Expr, SyntaxError> {
        let base = self.atom()?;
        if self.peek() != Some(&Tok::Caret) {
            return Ok(base);
        }
        let caret = self.bump().unwrap().1;
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = u32::try_from(*n).map_err(|_| self.error("exponent is too large"))?;
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Pow(Box::new(base), n),
                    span: caret,
                })
            }
            _ => Err(SyntaxError {
                message: "`^` must be followed by an unsigned integer".into(),
                line: caret.line,
                column: caret.column,
            }),
        }
    }

    fn atom(&mut self) -> Result<Expr, SyntaxError> {
        let span = self.span();
        match self.peek().cloned() {
            Some(Tok::Name(n)) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Name(n),
                    span,
                })
            }
            Some(Tok::Int(n)) => {
                self.bump();
                Ok(Expr {
                    kind: ExprKind::Int(n),
                    span,
                })
            }
            Some(Tok::LParen) => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            _ => Err(self.unexpected("a name, an integer or `(`")),
        }
    }
}

/// Parses a complete expression.
pub fn parse(text: &str) -> Result<Expr, SyntaxError> {
    parse_at(text, 1, 1)
}

pub fn parse_at(text: &str, line: usize, column: usize) -> Result<Expr, SyntaxError> {
    let toks = tokenize(text, line, column)?;
    let end = Span {
        line,
        column: column + text.chars().count(),
    };
    let mut p = Parser::new(&toks, end);
    let e = p.expr()?;
    if !p.at_end() {
        return Err(p.unexpected("an operator"));
    }
    Ok(e)
}

fn precedence(e: &Expr) -> u8 {
    match e.kind {
        ExprKind::Neg(_) | ExprKind::Add(..) | ExprKind::Sub(..) => 1,
        ExprKind::Mul(..) | ExprKind::Div(..) => 2,
        ExprKind::Pow(..) => 3,
        ExprKind::Name(_) | ExprKind::Int(_) => 4,
    }
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    /// Prints with the fewest parentheses that reparse to the same tree.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |f: &mut fmt::Formatter<'_>, a: &Expr, b: &Expr, op: &str, level: u8| {
            // a leading negation is only allowed at the very start of an expression
            let wrap_left = precedence(a) < level || (level > 1 && matches!(a.kind, ExprKind::Neg(_)));
            write_wrapped(f, a, wrap_left)?;
            if level == 1 {
                write!(f, " {op} ")?;
            } else {
                write!(f, "{op}")?;
            }
            write_wrapped(f, b, precedence(b) <= level || matches!(b.kind, ExprKind::Neg(_)))
        };
        match &self.kind {
            ExprKind::Name(n) => write!(f, "{n}"),
            ExprKind::Int(n) => write!(f, "{n}"),
            ExprKind::Neg(a) => {
                write!(f, "-")?;
                write_wrapped(f, a, precedence(a) <= 1)
            }
            ExprKind::Add(a, b) => binary(f, a, b, "+", 1),
            ExprKind::Sub(a, b) => binary(f, a, b, "-", 1),
            ExprKind::Mul(a, b) => binary(f, a, b, "*", 2),
            ExprKind::Div(a, b) => binary(f, a, b, "/", 2),
            ExprKind::Pow(a, n) => {
                write_wrapped(f, a, precedence(a) < 4)?;
                write!(f, "^{n}")
            }
        }
    }
}

/// Arithmetic that an expression can be evaluated in.
pub trait Algebra {
    type Value: Clone;
    type Error;
    fn name(&self, name: &str, span: Span) -> Result<Self::Value, Self::Error>;
    fn int(&self, n: u64) -> Self::Value;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn sub(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn neg(&self, a: &Self::Value) -> Self::Value;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn div(&self, a: &Self::Value, b: &Self::Value, span: Span) -> Result<Self::Value, Self::Error>;
    fn one(&self) -> Self::Value {
        self.int(1)
    }
}

pub fn eval<A: Algebra>(alg: &A, e: &Expr) -> Result<A::Value, A::Error> {
    Ok(match &e.kind {
        ExprKind::Name(n) => alg.name(n, e.span)?,
        ExprKind::Int(n) => alg.int(*n),
        ExprKind::Neg(a) => alg.neg(&eval(alg, a)?),
        ExprKind::Add(a, b) => alg.add(&eval(alg, a)?, &eval(alg, b)?),
        ExprKind::Sub(a, b) => alg.sub(&eval(alg, a)?, &eval(alg, b)?),
        ExprKind::Mul(a, b) => alg.mul(&eval(alg, a)?, &eval(alg, b)?),
        ExprKind::Div(a, b) => alg.div(&eval(alg, a)?, &eval(alg, b)?, e.span)?,
        ExprKind::Pow(a, n) => {
            let base = eval(alg, a)?;
            let mut acc = alg.one();
            let mut sq = base;
            let mut k = *n;
            while k > 0 {
                if k & 1 == 1 {
                    acc = alg.mul(&acc, &sq);
                }
                k >>= 1;
                if k > 0 {
                    sq = alg.mul(&sq, &sq);
                }
            }
            acc
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roundtrip(s: &str) -> String {
        let e = parse(s).unwrap();
        let printed = e.to_string();
        assert_eq!(parse(&printed).unwrap(), e, "{s} -> {printed}");
        printed
    }

    #[test]
    fn printing_drops_redundant_parentheses() {
        assert_eq!(roundtrip("(T^2) + ((T))"), "T^2 + T");
        assert_eq!(roundtrip("T - (U - 1)"), "T - (U - 1)");
        assert_eq!(roundtrip("(T - U) - 1"), "T - U - 1");
        assert_eq!(roundtrip("1 / (T^2 + T)"), "1/(T^2 + T)");
        assert_eq!(roundtrip("(T + 1)^3 * U"), "(T + 1)^3*U");
        assert_eq!(roundtrip("-T + 1"), "-T + 1");
        assert_eq!(roundtrip("T * (-U)"), "T*(-U)");
        assert_eq!(roundtrip("-(T + 1)"), "-(T + 1)");
        assert_eq!(roundtrip("(-T)^2"), "(-T)^2");
    }

    #[test]
    fn dangling_caret_points_at_the_caret() {
        let err = parse("T^").unwrap_err();
        assert_eq!((err.line, err.column), (1, 2));
        let err = parse("  T^ + 1").unwrap_err();
        assert_eq!(err.column, 4);
    }

    #[test]
    fn other_syntax_errors() {
        assert_eq!(parse("T +").unwrap_err().column, 4);
        assert_eq!(parse("(T").unwrap_err().column, 3);
        assert_eq!(parse("T U").unwrap_err().column, 3);
        assert_eq!(parse("T $").unwrap_err().column, 3);
        assert!(parse("T ^ -1").is_err());
        assert!(parse("").is_err());
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            Just("T".to_string()),
            Just("U".to_string()),
            (0u64..20).prop_map(|n| n.to_string())
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                (
                    inner.clone(),
                    inner.clone(),
                    prop::sample::select(vec!["+", "-", "*", "/"])
                )
                    .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
                (inner.clone(), 0u32..4).prop_map(|(a, n)| format!("({a})^{n}")),
                inner.prop_map(|a| format!("-({a})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_then_parse_is_identity(s in arb_expr()) {
            let e = parse(&s).unwrap();
            let printed = e.to_string();
            prop_assert_eq!(parse(&printed).unwrap(), e.clone());
            prop_assert_eq!(parse(&printed).unwrap().to_string(), printed);
        }
    }
}
