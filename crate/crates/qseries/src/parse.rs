//! Recursive-descent parser for the q-series DSL.
//!
//! Grammar (whitespace insignificant, ASCII input):
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := base ('^' signed-int)?
//! base   := INT | 'q' | 'f' INT | call | '(' expr ')' | '-' factor
//! call   := 'phi' '(' qpow ')' | 'psi' '(' qpow ')' | 'R' '(' qpow ')'
//!         | 'theta' '(' qpow ',' qpow ')' | 'lam' '(' qpow ')'
//!         | 'H' '(' INT ';' expr ')' | 'AP' '(' INT ',' INT ';' expr ')'
//!         | 'sub' '(' INT ';' expr ')' | 'negq' '(' expr ')'
//! qpow   := '-'? 'q' ('^' INT)?
//! ```
//!
//! Errors carry the byte offset and the expected-token set; semantic
//! constraints (such as `j < m` in `AP`) are rejected at parse time.

use crate::error::{Error, Result};
use crate::expr::Expr;
use crate::special::ThetaArg;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Eof,
}

impl std::fmt::Display for Tok {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Tok::Int(v) => write!(f, "integer {}", v),
            Tok::Ident(s) => write!(f, "identifier {:?}", s),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::Comma => f.write_str("','"),
            Tok::Semi => f.write_str("';'"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Lexer<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(input: &'a str) -> Self {
        Lexer {
            bytes: input.as_bytes(),
            pos: 0,
        }
    }

    fn next_token(&mut self) -> Result<(Tok, usize)> {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        if self.pos >= self.bytes.len() {
            return Ok((Tok::Eof, start));
        }
        let b = self.bytes[self.pos];
        if !b.is_ascii() {
            return Err(Error::parse(start, "ASCII input", "non-ASCII byte"));
        }
        let tok = match b {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b';' => Tok::Semi,
            b'0'..=b'9' => {
                let mut end = self.pos;
                while end < self.bytes.len() && self.bytes[end].is_ascii_digit() {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.bytes[self.pos..end]).unwrap();
                let value: i64 = text
                    .parse()
                    .map_err(|_| Error::parse(start, "integer within i64 range", text))?;
                self.pos = end;
                return Ok((Tok::Int(value), start));
            }
            c if c.is_ascii_alphabetic() => {
                let mut end = self.pos;
                while end < self.bytes.len() && self.bytes[end].is_ascii_alphabetic() {
                    end += 1;
                }
                let text = std::str::from_utf8(&self.bytes[self.pos..end])
                    .unwrap()
                    .to_string();
                self.pos = end;
                return Ok((Tok::Ident(text), start));
            }
            other => {
                return Err(Error::parse(
                    start,
                    "expression token",
                    format!("byte {:?}", other as char),
                ))
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }
}

/// Upper bound on indices, exponents, and progression parameters; far
/// beyond desk scale, but keeps downstream exponent arithmetic away
/// from overflow.
const MAX_PARAM: i64 = 1_000_000;

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn new(input: &str) -> Result<Self> {
        let mut lexer = Lexer::new(input);
        let mut toks = Vec::new();
        loop {
            let t = lexer.next_token()?;
            let done = t.0 == Tok::Eof;
            toks.push(t);
            if done {
                break;
            }
        }
        Ok(Parser { toks, at: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn offset(&self) -> usize {
        self.toks[self.at].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(Error::parse(
                self.offset(),
                expected,
                self.peek().to_string(),
            ))
        }
    }

    fn expect_int(&mut self, expected: &str) -> Result<(i64, usize)> {
        let off = self.offset();
        match self.peek().clone() {
            Tok::Int(v) if v <= MAX_PARAM => {
                self.bump();
                Ok((v, off))
            }
            Tok::Int(v) => Err(Error::parse(
                off,
                format!("integer at most {}", MAX_PARAM),
                v.to_string(),
            )),
            other => Err(Error::parse(off, expected, other.to_string())),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    acc = acc.add(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    acc = acc.sub(self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    acc = acc.mul(self.factor()?);
                }
                Tok::Slash => {
                    self.bump();
                    acc = acc.div(self.factor()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.base()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let negative = if *self.peek() == Tok::Minus {
                self.bump();
                true
            } else {
                false
            };
            let (v, _) = self.expect_int("exponent after '^'")?;
            let k = if negative { -v } else { v };
            Ok(base.pow(k))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<Expr> {
        let off = self.offset();
        match self.peek().clone() {
            Tok::Int(v) => {
                self.bump();
                Ok(Expr::Int(v))
            }
            Tok::Minus => {
                self.bump();
                Ok(self.factor()?.neg())
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                self.bump();
                self.named(&name, off)
            }
            other => Err(Error::parse(
                off,
                "integer, 'q', 'f k', a call, '(' or '-'",
                other.to_string(),
            )),
        }
    }

    fn named(&mut self, name: &str, off: usize) -> Result<Expr> {
        match name {
            "q" => Ok(Expr::Q),
            "f" => {
                let (k, koff) = self.expect_int("eta index after 'f'")?;
                if k < 1 {
                    return Err(Error::parse(koff, "positive eta index", k.to_string()));
                }
                Ok(Expr::EtaF(k))
            }
            "phi" => {
                let (sign, k) = self.qpow_arg()?;
                Ok(Expr::Phi { sign, k })
            }
            "psi" => {
                let (sign, k) = self.qpow_arg()?;
                if sign < 0 {
                    return Err(Error::parse(
                        off,
                        "psi of a positive power of q",
                        "negated argument",
                    ));
                }
                Ok(Expr::Psi { k })
            }
            "R" => {
                let (sign, k) = self.qpow_arg()?;
                if sign < 0 {
                    return Err(Error::parse(
                        off,
                        "R of a positive power of q",
                        "negated argument",
                    ));
                }
                Ok(Expr::Rrq { k })
            }
            "lam" => {
                let (sign, k) = self.qpow_arg()?;
                if sign < 0 {
                    return Err(Error::parse(
                        off,
                        "lam of a positive power of q",
                        "negated argument",
                    ));
                }
                Ok(Expr::Lam { k })
            }
            "theta" => {
                self.expect(Tok::LParen, "'('")?;
                let a = self.qpow()?;
                self.expect(Tok::Comma, "','")?;
                let b = self.qpow()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Theta {
                    a: ThetaArg::new(a.0, a.1),
                    b: ThetaArg::new(b.0, b.1),
                })
            }
            "H" => {
                self.expect(Tok::LParen, "'('")?;
                let (k, koff) = self.expect_int("huffing index")?;
                if k < 1 {
                    return Err(Error::parse(koff, "positive huffing index", k.to_string()));
                }
                self.expect(Tok::Semi, "';'")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::Huff {
                    k,
                    inner: Box::new(inner),
                })
            }
            "AP" => {
                self.expect(Tok::LParen, "'('")?;
                let (m, moff) = self.expect_int("progression modulus m")?;
                if m < 1 {
                    return Err(Error::parse(
                        moff,
                        "positive progression modulus",
                        m.to_string(),
                    ));
                }
                self.expect(Tok::Comma, "','")?;
                let (j, joff) = self.expect_int("progression offset j")?;
                if !(0..m).contains(&j) {
                    return Err(Error::parse(
                        joff,
                        format!("offset in 0..{}", m),
                        j.to_string(),
                    ));
                }
                self.expect(Tok::Semi, "';'")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::ExtractAp {
                    m,
                    j,
                    inner: Box::new(inner),
                })
            }
            "sub" => {
                self.expect(Tok::LParen, "'('")?;
                let (k, koff) = self.expect_int("substitution power")?;
                if k < 1 {
                    return Err(Error::parse(
                        koff,
                        "positive substitution power",
                        k.to_string(),
                    ));
                }
                self.expect(Tok::Semi, "';'")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::SubstPow {
                    k,
                    inner: Box::new(inner),
                })
            }
            "negq" => {
                self.expect(Tok::LParen, "'('")?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(Expr::NegQ(Box::new(inner)))
            }
            other => Err(Error::parse(
                off,
                "'q', 'f', 'phi', 'psi', 'R', 'theta', 'lam', 'H', 'AP', 'sub' or 'negq'",
                format!("identifier {:?}", other),
            )),
        }
    }

    fn qpow_arg(&mut self) -> Result<(i8, i64)> {
        self.expect(Tok::LParen, "'('")?;
        let v = self.qpow()?;
        self.expect(Tok::RParen, "')'")?;
        Ok(v)
    }

    /// `'-'? 'q' ('^' INT)?`
    fn qpow(&mut self) -> Result<(i8, i64)> {
        let sign = if *self.peek() == Tok::Minus {
            self.bump();
            -1i8
        } else {
            1i8
        };
        let off = self.offset();
        match self.peek().clone() {
            Tok::Ident(s) if s == "q" => {
                self.bump();
            }
            other => return Err(Error::parse(off, "'q'", other.to_string())),
        }
        if *self.peek() == Tok::Caret {
            self.bump();
            let (k, koff) = self.expect_int("positive exponent")?;
            if k < 1 {
                return Err(Error::parse(koff, "positive exponent", k.to_string()));
            }
            Ok((sign, k))
        } else {
            Ok((sign, 1))
        }
    }
}

/// Parse a DSL expression into its AST.
pub fn parse_expr(input: &str) -> Result<Expr> {
    let mut p = Parser::new(input)?;
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(Error::parse(
            p.offset(),
            "end of input",
            p.peek().to_string(),
        ));
    }
    Ok(e)
}
