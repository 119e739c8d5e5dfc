//! Translation of quotations to ECMAScript.
//!
//! Every construct maps to a fixed template, so output is a pure function
//! of the input. Builtins resolve to curried functions on the `RT`
//! namespace object emitted by [`PREAMBLE`]; lists become tagged objects
//! `{$: 1, $0: head, $1: tail}` ending in `{$: 0}`.
//!
//! Functions marked for remote execution get stubs that forward their
//! arguments, already in the tagged encoding, to `RT.rpc(name, args)`.
//! The preamble's `rpc` only throws; a host page replaces it with a
//! transport that sends an `eval` over the wire protocol and decodes the
//! reply with the same encoding.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::eval::{builtin_table, Value};
use crate::expr::{write_float, Expr, Ident};

/// Runtime support: the `RT` object holding builtins and the rpc hook.
pub const PREAMBLE: &str = include_str!("runtime.js");

const JS_RESERVED: &[&str] = &[
    "RT", "arguments", "await", "break", "case", "catch", "class", "const", "continue", "debugger",
    "default", "delete", "do", "else", "enum", "eval", "export", "extends", "false", "finally", "for",
    "function", "if", "implements", "import", "in", "instanceof", "interface", "let", "new", "null",
    "package", "private", "protected", "public", "return", "static", "super", "switch", "this",
    "throw", "true", "try", "typeof", "undefined", "var", "void", "while", "with", "yield",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JsError {
    #[error("unbound name {0}")]
    Unbound(Ident),
    #[error("{0} is already defined")]
    Duplicate(Ident),
    #[error("cannot encode {0} as an ECMAScript literal")]
    Unencodable(String),
}

/// The ECMAScript spelling of an identifier: `'` becomes `$q`, and names
/// that collide with reserved words or `RT` get a leading `$`.
pub fn js_ident(name: &Ident) -> String {
    let s = name.as_str().replace('\'', "$q");
    if JS_RESERVED.contains(&s.as_str()) {
        format!("${s}")
    } else {
        s
    }
}

/// Double-quoted string literal.
pub fn js_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 || c == '\u{7f}' || c == '\u{2028}' || c == '\u{2029}' => {
                out.push_str(&format!("\\u{:04X}", c as u32))
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Translates a closed expression; only builtins may occur free.
pub fn translate(e: &Expr) -> Result<String, JsError> {
    translate_with(e, &BTreeSet::new())
}

/// Translates with `known` names (earlier definitions, stubs) in scope
/// as plain identifiers.
pub fn translate_with(e: &Expr, known: &BTreeSet<Ident>) -> Result<String, JsError> {
    let mut t = Translator { known, scope: Vec::new(), out: String::new() };
    t.expr(e)?;
    Ok(t.out)
}

struct Translator<'a> {
    known: &'a BTreeSet<Ident>,
    scope: Vec<Ident>,
    out: String,
}

impl Translator<'_> {
    fn expr(&mut self, e: &Expr) -> Result<(), JsError> {
        match e {
            Expr::LitInt(i) => self.out.push_str(&i.to_string()),
            Expr::LitFloat(f) => write_float(&mut self.out, f.get()),
            Expr::LitBool(b) => self.out.push_str(if *b { "true" } else { "false" }),
            Expr::LitStr(s) => self.out.push_str(&js_string(s)),
            Expr::LitUnit => self.out.push_str("null"),
            Expr::Var(x) => self.var(x)?,
            Expr::Lam(x, body) => {
                self.out.push_str(&format!("function ({}) {{ return ", js_ident(x)));
                self.bound(x, body)?;
                self.out.push_str("; }");
            }
            Expr::App(f, a) => {
                let wrap = !matches!(**f, Expr::Var(_) | Expr::App(..));
                if wrap {
                    self.out.push('(');
                }
                self.expr(f)?;
                if wrap {
                    self.out.push(')');
                }
                self.out.push('(');
                self.expr(a)?;
                self.out.push(')');
            }
            Expr::If(c, t, f) => {
                self.out.push('(');
                self.expr(c)?;
                self.out.push_str(" ? ");
                self.expr(t)?;
                self.out.push_str(" : ");
                self.expr(f)?;
                self.out.push(')');
            }
            Expr::Let(x, bound, body) => {
                self.out.push_str(&format!("(function ({}) {{ return ", js_ident(x)));
                self.bound(x, body)?;
                self.out.push_str("; })(");
                self.expr(bound)?;
                self.out.push(')');
            }
            Expr::LetRec(f, lam, body) => {
                self.out.push_str(&format!("(function () {{ var {} = ", js_ident(f)));
                self.scope.push(f.clone());
                self.expr(lam)?;
                self.out.push_str("; return ");
                self.expr(body)?;
                self.scope.pop();
                self.out.push_str("; })()");
            }
            Expr::ListLit(items) => {
                for item in items {
                    self.out.push_str("{$: 1, $0: ");
                    self.expr(item)?;
                    self.out.push_str(", $1: ");
                }
                self.out.push_str("{$: 0}");
                self.out.push_str(&"}".repeat(items.len()));
            }
        }
        Ok(())
    }

    fn bound(&mut self, x: &Ident, body: &Expr) -> Result<(), JsError> {
        self.scope.push(x.clone());
        let r = self.expr(body);
        self.scope.pop();
        r
    }

    fn var(&mut self, x: &Ident) -> Result<(), JsError> {
        if self.scope.contains(x) || self.known.contains(x) {
            self.out.push_str(&js_ident(x));
        } else if builtin_table().contains_key(x.as_str()) {
            self.out.push_str("RT.");
            self.out.push_str(x.as_str());
        } else {
            return Err(JsError::Unbound(x.clone()));
        }
        Ok(())
    }
}

/// A curried stub forwarding its arguments to `RT.rpc`.
pub fn gen_rpc_stub(name: &Ident, arity: usize) -> String {
    let params: Vec<String> = (0..arity).map(|i| format!("a{i}")).collect();
    let mut body = format!("return RT.rpc({}, [{}]);", js_string(name.as_str()), params.join(", "));
    for p in params.iter().skip(1).rev() {
        body = format!("return function ({p}) {{ {body} }};");
    }
    let first = params.first().map_or("", String::as_str);
    format!("var {} = function ({first}) {{ {body} }};", js_ident(name))
}

/// ECMAScript literal for a first-order value.
pub fn encode_js_value(v: &Value) -> Result<String, JsError> {
    let mut out = String::new();
    encode_into(&mut out, v)?;
    Ok(out)
}

fn encode_into(out: &mut String, v: &Value) -> Result<(), JsError> {
    match v {
        Value::Int(i) => out.push_str(&i.to_string()),
        Value::Float(f) if f.is_finite() => write_float(out, *f),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Str(s) => out.push_str(&js_string(s)),
        Value::Unit => out.push_str("null"),
        Value::List(items) => {
            for item in items.iter() {
                out.push_str("{$: 1, $0: ");
                encode_into(out, item)?;
                out.push_str(", $1: ");
            }
            out.push_str("{$: 0}");
            out.push_str(&"}".repeat(items.len()));
        }
        Value::Float(f) => return Err(JsError::Unencodable(format!("non-finite float {f}"))),
        Value::Closure(_) | Value::Builtin(_) => return Err(JsError::Unencodable(v.kind().into())),
    }
    Ok(())
}

/// Definitions and RPC stubs that render to one script.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct JsModule {
    definitions: Vec<(Ident, String)>,
    stubs: Vec<(Ident, usize)>,
}

impl JsModule {
    pub fn new() -> Self {
        Self::default()
    }

    fn names(&self) -> BTreeSet<Ident> {
        self.definitions.iter().map(|(n, _)| n.clone()).chain(self.stubs.iter().map(|(n, _)| n.clone())).collect()
    }

    fn check_fresh(&self, name: &Ident) -> Result<(), JsError> {
        if self.names().contains(name) {
            return Err(JsError::Duplicate(name.clone()));
        }
        Ok(())
    }

    /// Declares a remote function; later definitions may call it.
    pub fn add_stub(&mut self, name: &Ident, arity: usize) -> Result<(), JsError> {
        self.check_fresh(name)?;
        self.stubs.push((name.clone(), arity));
        Ok(())
    }

    /// Translates `e` as `var name = …;`. It may refer to builtins, earlier
    /// definitions and stubs.
    pub fn define(&mut self, name: &Ident, e: &Expr) -> Result<(), JsError> {
        self.check_fresh(name)?;
        let src = translate_with(e, &self.names())?;
        self.definitions.push((name.clone(), src));
        Ok(())
    }

    pub fn definitions(&self) -> &[(Ident, String)] {
        &self.definitions
    }

    pub fn stubs(&self) -> &[(Ident, usize)] {
        &self.stubs
    }

    /// Preamble, then definitions, then stubs, one per line.
    pub fn render(&self) -> String {
        let mut out = String::from(PREAMBLE);
        for (name, src) in &self.definitions {
            out.push_str(&format!("var {} = {src};\n", js_ident(name)));
        }
        for (name, arity) in &self.stubs {
            out.push_str(&gen_rpc_stub(name, *arity));
            out.push('\n');
        }
        out
    }
}
