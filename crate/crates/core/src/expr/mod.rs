//! The quotation language: AST, canonical text encoding and structural
//! operations (free variables, capture-avoiding substitution, lifting).

mod lexer;
mod lift;
mod parse;
mod print;
mod subst;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub(crate) use lexer::TokenKind;
pub use lift::{lift, Lift, UnliftableValue};
pub use parse::{parse_expr, ParseError};
pub(crate) use parse::Parser;
pub use print::{print_expr, write_float, write_string};
pub(crate) use print::write_expr;
pub use subst::substitute;

/// Words of the textual grammar that may not be used as identifiers.
pub const RESERVED_WORDS: &[&str] = &[
    "int", "float", "bool", "str", "unit", "var", "lam", "app", "let", "letrec", "if", "list",
    "true", "false",
];

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("invalid identifier {0:?}")]
    InvalidIdent(String),
    #[error("reserved word {0:?} used as identifier")]
    ReservedWord(String),
    #[error("float literal must be finite, got {0}")]
    NonFiniteFloat(f64),
    #[error("letrec must bind a lambda")]
    LetRecNotLambda,
}

/// An identifier: `[A-Za-z_][A-Za-z0-9_']*`, not a reserved word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(name: &str) -> Result<Self, ExprError> {
        let mut chars = name.chars();
        let valid = match chars.next() {
            Some(c) if c.is_ascii_alphabetic() || c == '_' => {
                chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
            }
            _ => false,
        };
        if !valid {
            return Err(ExprError::InvalidIdent(name.to_string()));
        }
        if RESERVED_WORDS.contains(&name) {
            return Err(ExprError::ReservedWord(name.to_string()));
        }
        Ok(Ident(Arc::from(name)))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", &*self.0)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<&str> for Ident {
    type Error = ExprError;
    fn try_from(s: &str) -> Result<Self, Self::Error> {
        Ident::new(s)
    }
}

/// A finite binary64 value. Equality is bitwise, so `-0.0 != 0.0`.
#[derive(Clone, Copy)]
pub struct FiniteF64(f64);

impl FiniteF64 {
    pub fn new(f: f64) -> Result<Self, ExprError> {
        if f.is_finite() {
            Ok(FiniteF64(f))
        } else {
            Err(ExprError::NonFiniteFloat(f))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl PartialEq for FiniteF64 {
    fn eq(&self, other: &Self) -> bool {
        self.0.to_bits() == other.0.to_bits()
    }
}

impl Eq for FiniteF64 {}

impl fmt::Debug for FiniteF64 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// In-memory form of a quotation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    LitInt(i64),
    LitFloat(FiniteF64),
    LitBool(bool),
    LitStr(String),
    LitUnit,
    Var(Ident),
    Lam(Ident, Box<Expr>),
    App(Box<Expr>, Box<Expr>),
    Let(Ident, Box<Expr>, Box<Expr>),
    /// The bound expression is always a `Lam` when built through
    /// [`Expr::letrec`] or the parser.
    LetRec(Ident, Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    ListLit(Vec<Expr>),
}

/// Builds an identifier, panicking on invalid names. Meant for literals in
/// code; use [`Ident::new`] for untrusted input.
fn ident(name: &str) -> Ident {
    Ident::new(name).unwrap_or_else(|e| panic!("{e}"))
}

impl Expr {
    pub fn int(i: i64) -> Expr {
        Expr::LitInt(i)
    }

    pub fn float(f: f64) -> Result<Expr, ExprError> {
        FiniteF64::new(f).map(Expr::LitFloat)
    }

    pub fn bool(b: bool) -> Expr {
        Expr::LitBool(b)
    }

    pub fn str(s: impl Into<String>) -> Expr {
        Expr::LitStr(s.into())
    }

    /// Panics if `name` is not a valid identifier.
    pub fn var(name: &str) -> Expr {
        Expr::Var(ident(name))
    }

    /// Panics if `param` is not a valid identifier.
    pub fn lam(param: &str, body: Expr) -> Expr {
        Expr::Lam(ident(param), Box::new(body))
    }

    pub fn app(f: Expr, arg: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(arg))
    }

    /// Curried application of a named function: `call("add", [a, b])` is
    /// `(app (app (var add) a) b)`. Panics on an invalid name.
    pub fn call(name: &str, args: impl IntoIterator<Item = Expr>) -> Expr {
        args.into_iter().fold(Expr::var(name), Expr::app)
    }

    /// Panics if `name` is not a valid identifier.
    pub fn let_(name: &str, bound: Expr, body: Expr) -> Expr {
        Expr::Let(ident(name), Box::new(bound), Box::new(body))
    }

    pub fn letrec(name: Ident, bound: Expr, body: Expr) -> Result<Expr, ExprError> {
        if !matches!(bound, Expr::Lam(..)) {
            return Err(ExprError::LetRecNotLambda);
        }
        Ok(Expr::LetRec(name, Box::new(bound), Box::new(body)))
    }

    pub fn if_(cond: Expr, then: Expr, els: Expr) -> Expr {
        Expr::If(Box::new(cond), Box::new(then), Box::new(els))
    }

    pub fn list(items: impl IntoIterator<Item = Expr>) -> Expr {
        Expr::ListLit(items.into_iter().collect())
    }

    /// True for literal forms only: int, float, bool, str, unit and lists of
    /// literals.
    pub fn is_literal(&self) -> bool {
        match self {
            Expr::LitInt(_)
            | Expr::LitFloat(_)
            | Expr::LitBool(_)
            | Expr::LitStr(_)
            | Expr::LitUnit => true,
            Expr::ListLit(items) => items.iter().all(Expr::is_literal),
            _ => false,
        }
    }

    /// Free variables. Builtin names are not treated specially.
    pub fn free_vars(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub(crate) fn has_free(&self, name: &Ident) -> bool {
        match self {
            Expr::LitInt(_)
            | Expr::LitFloat(_)
            | Expr::LitBool(_)
            | Expr::LitStr(_)
            | Expr::LitUnit => false,
            Expr::Var(v) => v == name,
            Expr::Lam(p, body) => p != name && body.has_free(name),
            Expr::App(f, a) => f.has_free(name) || a.has_free(name),
            Expr::Let(n, bound, body) => bound.has_free(name) || (n != name && body.has_free(name)),
            Expr::LetRec(n, bound, body) => {
                n != name && (bound.has_free(name) || body.has_free(name))
            }
            Expr::If(c, t, e) => c.has_free(name) || t.has_free(name) || e.has_free(name),
            Expr::ListLit(items) => items.iter().any(|i| i.has_free(name)),
        }
    }
}

/// Free-variable set of `e`; see [`Expr::free_vars`].
pub fn free_vars(e: &Expr) -> BTreeSet<Ident> {
    e.free_vars()
}

fn collect_free(e: &Expr, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
    match e {
        Expr::LitInt(_) | Expr::LitFloat(_) | Expr::LitBool(_) | Expr::LitStr(_) | Expr::LitUnit => {}
        Expr::Var(v) => {
            if !bound.contains(v) {
                out.insert(v.clone());
            }
        }
        Expr::Lam(p, body) => {
            bound.push(p.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Expr::App(f, a) => {
            collect_free(f, bound, out);
            collect_free(a, bound, out);
        }
        Expr::Let(n, b, body) => {
            collect_free(b, bound, out);
            bound.push(n.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Expr::LetRec(n, b, body) => {
            bound.push(n.clone());
            collect_free(b, bound, out);
            collect_free(body, bound, out);
            bound.pop();
        }
        Expr::If(c, t, f) => {
            collect_free(c, bound, out);
            collect_free(t, bound, out);
            collect_free(f, bound, out);
        }
        Expr::ListLit(items) => items.iter().for_each(|i| collect_free(i, bound, out)),
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

impl std::str::FromStr for Expr {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}
