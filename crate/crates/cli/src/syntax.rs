//! Lexer, LL(1) parser and printer for group-scheme expressions.
//!
//! ```text
//! program := expr EOF
//! expr    := primary [ "@" field ]
//! primary := "Z" "/" "(" INT ")"
//!          | IDENT [ "(" [ arg { "," arg } ] ")" ]
//! arg     := INT [ "^" INT ] | expr
//! field   := "F" "(" INT "," INT ")"
//! ```
//!
//! Argument lists are parsed generically and checked against the signature of the identifier,
//! so arity errors point at the offending token.

use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    UnexpectedChar(char),
    IntegerOverflow,
    Unexpected { expected: String, found: String },
    UnknownIdentifier(String),
    Arity { name: String, expected: usize, found: usize },
    ArgumentKind { name: String, expected: &'static str },
    ConflictingField { first: Field, second: Field },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub pos: Pos,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.pos)?;
        match &self.kind {
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character {c:?}"),
            ParseErrorKind::IntegerOverflow => write!(f, "integer literal too large"),
            ParseErrorKind::Unexpected { expected, found } => write!(f, "expected {expected}, found {found}"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier `{s}`"),
            ParseErrorKind::Arity { name, expected, found } => {
                let plural = if *expected == 1 { "" } else { "s" };
                write!(f, "arity mismatch: `{name}` takes {expected} argument{plural}, found {found}")
            }
            ParseErrorKind::ArgumentKind { name, expected } => write!(f, "`{name}` expects {expected} here"),
            ParseErrorKind::ConflictingField { first, second } => {
                write!(f, "conflicting field annotations {first} and {second}")
            }
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    LParen,
    RParen,
    Comma,
    Slash,
    Caret,
    At,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Int(n) => write!(f, "`{n}`"),
            Tok::LParen => write!(f, "`(`"),
            Tok::RParen => write!(f, "`)`"),
            Tok::Comma => write!(f, "`,`"),
            Tok::Slash => write!(f, "`/`"),
            Tok::Caret => write!(f, "`^`"),
            Tok::At => write!(f, "`@`"),
            Tok::Eof => write!(f, "end of input"),
        }
    }
}

fn lex(input: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    let (mut line, mut col) = (1, 1);
    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        if c == '\n' {
            chars.next();
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            chars.next();
            col += 1;
            continue;
        }
        let single = match c {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            ',' => Some(Tok::Comma),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '@' => Some(Tok::At),
            _ => None,
        };
        if let Some(t) = single {
            chars.next();
            col += 1;
            out.push((t, pos));
        } else if c.is_ascii_digit() {
            let mut v: u64 = 0;
            while let Some(&d) = chars.peek() {
                let Some(x) = d.to_digit(10) else { break };
                v = v
                    .checked_mul(10)
                    .and_then(|v| v.checked_add(x as u64))
                    .ok_or(ParseError { kind: ParseErrorKind::IntegerOverflow, pos })?;
                chars.next();
                col += 1;
            }
            out.push((Tok::Int(v), pos));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let mut s = String::new();
            while let Some(&d) = chars.peek() {
                if !(d.is_ascii_alphanumeric() || d == '_') {
                    break;
                }
                s.push(d);
                chars.next();
                col += 1;
            }
            out.push((Tok::Ident(s), pos));
        } else {
            return Err(ParseError { kind: ParseErrorKind::UnexpectedChar(c), pos });
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

/// Base field `F_{p^d}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Field {
    pub p: u64,
    pub d: usize,
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F({},{})", self.p, self.d)
    }
}

/// Catalog groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    Mu(u64),
    Constant(u64),
    /// `alpha(b)` or `alpha(b^r)`, kept as written.
    Alpha { base: u64, exp: Option<u32> },
    Witt(u32, u32),
    Gm,
    Ga,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Op {
    Dual,
    Matlis,
    SplitUnipotentMultiplicative,
    SplitEtaleConnected,
}

impl Op {
    pub fn keyword(self) -> &'static str {
        match self {
            Op::Dual => "dual",
            Op::Matlis => "matlis",
            Op::SplitUnipotentMultiplicative => "split_u_m",
            Op::SplitEtaleConnected => "split_et_c",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExprKind {
    Term(Term),
    Unary(Op, Box<Expr>),
    Tensor(Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expr {
    pub kind: ExprKind,
    pub field: Option<Field>,
}

impl Expr {
    pub fn new(kind: ExprKind) -> Self {
        Expr { kind, field: None }
    }

    pub fn with_field(mut self, f: Field) -> Self {
        self.field = Some(f);
        self
    }

    /// The base field: the first annotation found, outermost first. The parser has already
    /// rejected conflicting ones.
    pub fn base_field(&self) -> Option<Field> {
        self.field.or_else(|| match &self.kind {
            ExprKind::Term(_) => None,
            ExprKind::Unary(_, e) => e.base_field(),
            ExprKind::Tensor(a, b) => a.base_field().or_else(|| b.base_field()),
        })
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Mu(n) => write!(f, "mu({n})"),
            Term::Constant(n) => write!(f, "Z/({n})"),
            Term::Alpha { base, exp: None } => write!(f, "alpha({base})"),
            Term::Alpha { base, exp: Some(r) } => write!(f, "alpha({base}^{r})"),
            Term::Witt(m, n) => write!(f, "W({m},{n})"),
            Term::Gm => write!(f, "gm"),
            Term::Ga => write!(f, "ga"),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ExprKind::Term(t) => write!(f, "{t}")?,
            ExprKind::Unary(op, e) => write!(f, "{}({e})", op.keyword())?,
            ExprKind::Tensor(a, b) => write!(f, "tensor({a}, {b})")?,
        }
        if let Some(fl) = self.field {
            write!(f, " @ {fl}")?;
        }
        Ok(())
    }
}

enum Arg {
    Int(u64, Option<u32>, Pos),
    Expr(Expr, Pos),
}

impl Arg {
    fn pos(&self) -> Pos {
        match self {
            Arg::Int(_, _, p) | Arg::Expr(_, p) => *p,
        }
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Int,
    Power,
    Expr,
}

fn signature(name: &str) -> Option<&'static [Slot]> {
    Some(match name {
        "mu" => &[Slot::Int],
        "alpha" => &[Slot::Power],
        "W" => &[Slot::Int, Slot::Int],
        "gm" | "ga" => &[],
        "dual" | "matlis" | "split_u_m" | "split_et_c" => &[Slot::Expr],
        "tensor" => &[Slot::Expr, Slot::Expr],
        _ => return None,
    })
}

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    field: Option<(Field, Pos)>,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, ParseError> {
        Err(ParseError {
            kind: ParseErrorKind::Unexpected { expected: expected.into(), found: self.peek().to_string() },
            pos: self.pos(),
        })
    }

    fn expect(&mut self, t: Tok) -> Result<Pos, ParseError> {
        if *self.peek() == t {
            Ok(self.bump().1)
        } else {
            self.unexpected(&t.to_string())
        }
    }

    fn int(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Tok::Int(n) => {
                let n = *n;
                self.bump();
                Ok(n)
            }
            _ => self.unexpected("an integer"),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut e = self.primary()?;
        if *self.peek() == Tok::At {
            let at = self.bump().1;
            let f = self.field()?;
            match self.field {
                Some((first, _)) if first != f => {
                    return Err(ParseError { kind: ParseErrorKind::ConflictingField { first, second: f }, pos: at });
                }
                Some(_) => {}
                None => self.field = Some((f, at)),
            }
            e.field = Some(f);
        }
        Ok(e)
    }

    fn field(&mut self) -> Result<Field, ParseError> {
        match self.peek() {
            Tok::Ident(s) if s == "F" => {
                self.bump();
            }
            _ => return self.unexpected("a field `F(p,d)`"),
        }
        self.expect(Tok::LParen)?;
        let p = self.int()?;
        self.expect(Tok::Comma)?;
        let d = self.int()?;
        self.expect(Tok::RParen)?;
        Ok(Field { p, d: d as usize })
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        let name = match tok {
            Tok::Ident(s) => s,
            _ => {
                self.at -= 1;
                return self.unexpected("an expression");
            }
        };
        if name == "Z" {
            self.expect(Tok::Slash)?;
            self.expect(Tok::LParen)?;
            let n = self.int()?;
            self.expect(Tok::RParen)?;
            return Ok(Expr::new(ExprKind::Term(Term::Constant(n))));
        }
        let sig = signature(&name).ok_or(ParseError { kind: ParseErrorKind::UnknownIdentifier(name.clone()), pos })?;
        let (args, close) = if *self.peek() == Tok::LParen {
            self.bump();
            let args = self.args()?;
            let close = self.expect(Tok::RParen)?;
            (args, close)
        } else if sig.is_empty() {
            (Vec::new(), pos)
        } else {
            return self.unexpected("`(`");
        };
        if args.len() != sig.len() {
            // too few: blame the closing parenthesis; too many: the first extra argument
            let at = args.get(sig.len()).map_or(close, Arg::pos);
            return Err(ParseError {
                kind: ParseErrorKind::Arity { name, expected: sig.len(), found: args.len() },
                pos: at,
            });
        }
        let mut ints = Vec::new();
        let mut exprs = Vec::new();
        let mut power = None;
        for (a, slot) in args.into_iter().zip(sig) {
            let kind_err = |expected, pos| ParseError { kind: ParseErrorKind::ArgumentKind { name: name.clone(), expected }, pos };
            match (a, slot) {
                (Arg::Int(n, None, _), Slot::Int) => ints.push(n),
                (Arg::Int(n, e, _), Slot::Power) => power = Some((n, e)),
                (Arg::Expr(e, _), Slot::Expr) => exprs.push(e),
                (a, Slot::Int) => return Err(kind_err("an integer", a.pos())),
                (a, Slot::Power) => return Err(kind_err("an integer or a power `p^r`", a.pos())),
                (a, Slot::Expr) => return Err(kind_err("a group expression", a.pos())),
            }
        }
        let to_u32 = |n: u64| u32::try_from(n).map_err(|_| ParseError { kind: ParseErrorKind::IntegerOverflow, pos });
        let kind = match name.as_str() {
            "mu" => ExprKind::Term(Term::Mu(ints[0])),
            "alpha" => {
                let (base, exp) = power.expect("signature has a power slot");
                ExprKind::Term(Term::Alpha { base, exp })
            }
            "W" => ExprKind::Term(Term::Witt(to_u32(ints[0])?, to_u32(ints[1])?)),
            "gm" => ExprKind::Term(Term::Gm),
            "ga" => ExprKind::Term(Term::Ga),
            "tensor" => {
                let b = exprs.pop().unwrap();
                let a = exprs.pop().unwrap();
                ExprKind::Tensor(Box::new(a), Box::new(b))
            }
            other => {
                let op = match other {
                    "dual" => Op::Dual,
                    "matlis" => Op::Matlis,
                    "split_u_m" => Op::SplitUnipotentMultiplicative,
                    _ => Op::SplitEtaleConnected,
                };
                ExprKind::Unary(op, Box::new(exprs.pop().unwrap()))
            }
        };
        Ok(Expr::new(kind))
    }

    fn args(&mut self) -> Result<Vec<Arg>, ParseError> {
        let mut out = Vec::new();
        if *self.peek() == Tok::RParen {
            return Ok(out);
        }
        loop {
            let pos = self.pos();
            let a = match self.peek() {
                Tok::Int(_) => {
                    let n = self.int()?;
                    let e = if *self.peek() == Tok::Caret {
                        self.bump();
                        let e = self.int()?;
                        Some(u32::try_from(e).map_err(|_| ParseError { kind: ParseErrorKind::IntegerOverflow, pos })?)
                    } else {
                        None
                    };
                    Arg::Int(n, e, pos)
                }
                Tok::Ident(_) => Arg::Expr(self.expr()?, pos),
                _ => return self.unexpected("an argument"),
            };
            out.push(a);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RParen => return Ok(out),
                _ => return self.unexpected("`,` or `)`"),
            }
        }
    }
}

/// Parse a complete expression.
pub fn parse(input: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { toks: lex(input)?, at: 0, field: None };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return p.unexpected("end of input");
    }
    Ok(e)
}
