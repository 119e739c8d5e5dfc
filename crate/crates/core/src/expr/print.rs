use std::fmt::Write;

use super::Expr;

/// Canonical text: single spaces between tokens, no comments.
pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e);
    out
}

pub(crate) fn write_expr(out: &mut String, e: &Expr) {
    match e {
        Expr::LitInt(i) => {
            let _ = write!(out, "(int {i})");
        }
        Expr::LitFloat(f) => {
            out.push_str("(float ");
            write_float(out, f.get());
            out.push(')');
        }
        Expr::LitBool(b) => {
            let _ = write!(out, "(bool {b})");
        }
        Expr::LitStr(s) => {
            out.push_str("(str ");
            write_string(out, s);
            out.push(')');
        }
        Expr::LitUnit => out.push_str("unit"),
        Expr::Var(v) => {
            let _ = write!(out, "(var {v})");
        }
        Expr::Lam(p, body) => {
            let _ = write!(out, "(lam {p} ");
            write_expr(out, body);
            out.push(')');
        }
        Expr::App(f, a) => {
            out.push_str("(app ");
            write_expr(out, f);
            out.push(' ');
            write_expr(out, a);
            out.push(')');
        }
        Expr::Let(n, b, body) | Expr::LetRec(n, b, body) => {
            let kw = if matches!(e, Expr::Let(..)) { "let" } else { "letrec" };
            let _ = write!(out, "({kw} {n} ");
            write_expr(out, b);
            out.push(' ');
            write_expr(out, body);
            out.push(')');
        }
        Expr::If(c, t, f) => {
            out.push_str("(if ");
            write_expr(out, c);
            out.push(' ');
            write_expr(out, t);
            out.push(' ');
            write_expr(out, f);
            out.push(')');
        }
        Expr::ListLit(items) => {
            out.push_str("(list");
            for item in items {
                out.push(' ');
                write_expr(out, item);
            }
            out.push(')');
        }
    }
}

/// Shortest decimal that reads back to the same bits; always has a `.` or
/// an exponent.
pub fn write_float(out: &mut String, f: f64) {
    // Debug formatting of f64 is the shortest round-trip representation and
    // keeps a trailing `.0` on integral values.
    let _ = write!(out, "{f:?}");
}

/// Double-quoted string with `\" \\ \n \t \r` escapes; other control
/// characters use `\uXXXX`.
pub fn write_string(out: &mut String, s: &str) {
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\r' => out.push_str("\\r"),
            c if (c as u32) < 0x20 || c as u32 == 0x7f => {
                let _ = write!(out, "\\u{:04X}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}
