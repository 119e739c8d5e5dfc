use std::fmt;

use thiserror::Error;

use super::lexer::{Lexer, Token, TokenKind};
use super::{Expr, ExprError, FiniteF64, Ident};

/// Maximum nesting depth accepted by the parser. Keeps recursive passes over
/// untrusted input within native stack limits.
pub const MAX_NESTING: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input where the problem was detected.
    pub offset: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(offset: usize, message: impl Into<String>) -> Self {
        ParseError { offset, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.offset, self.message)
    }
}

/// Parses exactly one expression in the canonical grammar, allowing
/// comments and arbitrary whitespace.
pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Recursive-descent reader shared with the wire message grammar.
pub(crate) struct Parser<'a> {
    lexer: Lexer<'a>,
    peeked: Option<Token>,
    depth: usize,
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str) -> Self {
        Parser { lexer: Lexer::new(src), peeked: None, depth: 0 }
    }

    pub fn peek(&mut self) -> Result<Option<&Token>, ParseError> {
        if self.peeked.is_none() {
            self.peeked = self.lexer.next_token()?;
        }
        Ok(self.peeked.as_ref())
    }

    pub fn next(&mut self) -> Result<Token, ParseError> {
        self.peek()?;
        self.peeked
            .take()
            .ok_or_else(|| ParseError::new(self.lexer.offset(), "unexpected end of input"))
    }

    pub fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek()? {
            None => Ok(()),
            Some(t) => Err(ParseError::new(t.offset, "trailing input after expression")),
        }
    }

    pub fn open(&mut self) -> Result<usize, ParseError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Open => Ok(t.offset),
            _ => Err(ParseError::new(t.offset, "expected '('")),
        }
    }

    pub fn close(&mut self) -> Result<(), ParseError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Close => Ok(()),
            _ => Err(ParseError::new(t.offset, "expected ')'")),
        }
    }

    pub fn at_close(&mut self) -> Result<bool, ParseError> {
        Ok(matches!(self.peek()?, Some(Token { kind: TokenKind::Close, .. })))
    }

    pub fn atom(&mut self, what: &str) -> Result<(String, usize), ParseError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Atom(a) => Ok((a, t.offset)),
            _ => Err(ParseError::new(t.offset, format!("expected {what}"))),
        }
    }

    pub fn string(&mut self) -> Result<String, ParseError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Str(s) => Ok(s),
            _ => Err(ParseError::new(t.offset, "expected string literal")),
        }
    }

    pub fn ident(&mut self) -> Result<Ident, ParseError> {
        let (a, off) = self.atom("identifier")?;
        Ident::new(&a).map_err(|e| match e {
            ExprError::ReservedWord(w) => {
                ParseError::new(off, format!("reserved word {w:?} used as identifier"))
            }
            other => ParseError::new(off, other.to_string()),
        })
    }

    pub fn int(&mut self) -> Result<i64, ParseError> {
        let (a, off) = self.atom("integer")?;
        parse_int(&a).ok_or_else(|| ParseError::new(off, format!("bad integer {a:?}")))
    }

    pub fn uint(&mut self) -> Result<u64, ParseError> {
        let (a, off) = self.atom("unsigned integer")?;
        if a.is_empty() || !a.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ParseError::new(off, format!("bad unsigned integer {a:?}")));
        }
        a.parse().map_err(|_| ParseError::new(off, format!("unsigned integer out of range {a:?}")))
    }

    pub fn expr(&mut self) -> Result<Expr, ParseError> {
        let t = self.next()?;
        match t.kind {
            TokenKind::Atom(a) if a == "unit" => Ok(Expr::LitUnit),
            TokenKind::Atom(a) => Err(ParseError::new(t.offset, format!("unexpected atom {a:?}"))),
            TokenKind::Str(_) => Err(ParseError::new(t.offset, "unexpected string literal")),
            TokenKind::Close => Err(ParseError::new(t.offset, "unbalanced ')'")),
            TokenKind::Open => {
                self.depth += 1;
                if self.depth > MAX_NESTING {
                    return Err(ParseError::new(t.offset, "expression nested too deeply"));
                }
                let e = self.form(t.offset)?;
                self.depth -= 1;
                Ok(e)
            }
        }
    }

    fn form(&mut self, open: usize) -> Result<Expr, ParseError> {
        let (head, off) = self.atom("form keyword")?;
        let e = match head.as_str() {
            "int" => Expr::LitInt(self.int()?),
            "float" => {
                let (a, off) = self.atom("float")?;
                let f = parse_float(&a)
                    .ok_or_else(|| ParseError::new(off, format!("bad float {a:?}")))?;
                Expr::LitFloat(f)
            }
            "bool" => {
                let (a, off) = self.atom("true or false")?;
                match a.as_str() {
                    "true" => Expr::LitBool(true),
                    "false" => Expr::LitBool(false),
                    _ => return Err(ParseError::new(off, "expected true or false")),
                }
            }
            "str" => Expr::LitStr(self.string()?),
            "var" => Expr::Var(self.ident()?),
            "lam" => {
                let p = self.ident()?;
                Expr::Lam(p, Box::new(self.expr()?))
            }
            "app" => {
                let f = self.expr()?;
                Expr::App(Box::new(f), Box::new(self.expr()?))
            }
            "let" => {
                let n = self.ident()?;
                let b = self.expr()?;
                Expr::Let(n, Box::new(b), Box::new(self.expr()?))
            }
            "letrec" => {
                let n = self.ident()?;
                let bound_off = self.peek()?.map(|t| t.offset).unwrap_or(open);
                let b = self.expr()?;
                if !matches!(b, Expr::Lam(..)) {
                    return Err(ParseError::new(bound_off, "letrec must bind a lam form"));
                }
                Expr::LetRec(n, Box::new(b), Box::new(self.expr()?))
            }
            "if" => {
                let c = self.expr()?;
                let t = self.expr()?;
                Expr::If(Box::new(c), Box::new(t), Box::new(self.expr()?))
            }
            "list" => {
                let mut items = Vec::new();
                while !self.at_close()? {
                    if self.peek()?.is_none() {
                        break;
                    }
                    items.push(self.expr()?);
                }
                Expr::ListLit(items)
            }
            "unit" => return Err(ParseError::new(off, "unit is written without parentheses")),
            other => return Err(ParseError::new(off, format!("unknown form {other:?}"))),
        };
        self.close()?;
        Ok(e)
    }
}

fn parse_int(a: &str) -> Option<i64> {
    let digits = a.strip_prefix('-').unwrap_or(a);
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    a.parse().ok()
}

fn parse_float(a: &str) -> Option<FiniteF64> {
    let ok_chars = a.bytes().all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'e' | b'E' | b'+' | b'-'));
    if !ok_chars || !a.bytes().any(|b| b.is_ascii_digit()) {
        return None;
    }
    a.parse::<f64>().ok().and_then(|f| FiniteF64::new(f).ok())
}
