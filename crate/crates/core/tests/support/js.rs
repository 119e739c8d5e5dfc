//! A small ECMAScript parser covering the subset the translator and its
//! runtime emit, with a scope checker and a decoder for tagged values.
//!
//! Shared by several test targets; not every target uses every item.
#![allow(dead_code)]

use std::collections::BTreeSet;

use qx_core::Value;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(String),
    Str(String),
    Punct(&'static str),
}

const PUNCTS: &[&str] = &[
    "===", "!==", "==", "!=", "<=", ">=", "&&", "||", "{", "}", "(", ")", "[", "]", ";", ",", ".", "?", ":",
    "=", "<", ">", "+", "-", "*", "/", "%", "!",
];

const KEYWORDS: &[&str] =
    &["var", "function", "return", "if", "else", "while", "throw", "new", "typeof", "true", "false", "null"];

fn lex(src: &str) -> Result<Vec<Tok>, String> {
    let b = src.as_bytes();
    let mut i = 0;
    let mut out = Vec::new();
    while i < b.len() {
        let c = b[i];
        if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic() || c == b'_' || c == b'$' {
            let s = i;
            while i < b.len() && (b[i].is_ascii_alphanumeric() || b[i] == b'_' || b[i] == b'$') {
                i += 1;
            }
            out.push(Tok::Ident(src[s..i].to_string()));
        } else if c.is_ascii_digit() {
            let s = i;
            while i < b.len() && b[i].is_ascii_digit() {
                i += 1;
            }
            if i < b.len() && b[i] == b'.' {
                i += 1;
                let d = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if d == i {
                    return Err(format!("digit expected after '.' at byte {i}"));
                }
            }
            if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
                i += 1;
                if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
                    i += 1;
                }
                let d = i;
                while i < b.len() && b[i].is_ascii_digit() {
                    i += 1;
                }
                if d == i {
                    return Err(format!("exponent digits expected at byte {i}"));
                }
            }
            if i < b.len() && (b[i].is_ascii_alphabetic() || b[i] == b'_' || b[i] == b'$') {
                return Err(format!("identifier directly after number at byte {i}"));
            }
            out.push(Tok::Num(src[s..i].to_string()));
        } else if c == b'"' {
            i += 1;
            let mut s = String::new();
            loop {
                let Some(ch) = src[i..].chars().next() else { return Err("unterminated string".into()) };
                i += ch.len_utf8();
                match ch {
                    '"' => break,
                    '\n' | '\r' | '\u{2028}' | '\u{2029}' => return Err("line break in string".into()),
                    '\\' => {
                        let e = src[i..].chars().next().ok_or("dangling escape")?;
                        i += e.len_utf8();
                        match e {
                            '"' => s.push('"'),
                            '\\' => s.push('\\'),
                            'n' => s.push('\n'),
                            'r' => s.push('\r'),
                            't' => s.push('\t'),
                            'u' => {
                                let hex = src.get(i..i + 4).ok_or("short \\u escape")?;
                                let code = u32::from_str_radix(hex, 16).map_err(|_| "bad \\u escape")?;
                                s.push(char::from_u32(code).ok_or("surrogate in \\u escape")?);
                                i += 4;
                            }
                            other => return Err(format!("unsupported escape \\{other}")),
                        }
                    }
                    c if (c as u32) < 0x20 => return Err("raw control character in string".into()),
                    c => s.push(c),
                }
            }
            out.push(Tok::Str(s));
        } else {
            let p = PUNCTS
                .iter()
                .find(|p| src[i..].starts_with(**p))
                .ok_or_else(|| format!("unexpected character {:?} at byte {i}", &src[i..].chars().next().unwrap()))?;
            i += p.len();
            out.push(Tok::Punct(p));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Ident(String),
    Num(String),
    Str(String),
    Bool(bool),
    Null,
    Func { params: Vec<String>, body: Vec<Stmt> },
    Call(Box<Node>, Vec<Node>),
    Member(Box<Node>, String),
    Index(Box<Node>, Box<Node>),
    Unary(&'static str, Box<Node>),
    Binary(&'static str, Box<Node>, Box<Node>),
    Cond(Box<Node>, Box<Node>, Box<Node>),
    Assign(Box<Node>, Box<Node>),
    Object(Vec<(String, Node)>),
    Array(Vec<Node>),
    New(Box<Node>),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Stmt {
    Var(String, Option<Node>),
    FuncDecl(String, Vec<String>, Vec<Stmt>),
    Return(Option<Node>),
    If(Node, Box<Stmt>, Option<Box<Stmt>>),
    While(Node, Box<Stmt>),
    Throw(Node),
    Block(Vec<Stmt>),
    Expr(Node),
}

struct Parser {
    toks: Vec<Tok>,
    pos: usize,
    depth: usize,
}

const BINARY_LEVELS: &[&[&str]] =
    &[&["||"], &["&&"], &["===", "!==", "==", "!="], &["<", "<=", ">", ">="], &["+", "-"], &["*", "/", "%"]];

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn is(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(q)) if q == k)
    }

    fn eat(&mut self, p: &str) -> bool {
        if self.is(p) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, p: &str) -> Result<(), String> {
        if self.eat(p) {
            Ok(())
        } else {
            Err(format!("expected {p:?} at token {} but found {:?}", self.pos, self.peek()))
        }
    }

    fn binding(&mut self) -> Result<String, String> {
        match self.peek().cloned() {
            Some(Tok::Ident(n)) if !KEYWORDS.contains(&n.as_str()) => {
                self.pos += 1;
                Ok(n)
            }
            other => Err(format!("expected a binding name at token {}, found {other:?}", self.pos)),
        }
    }

    fn statement(&mut self) -> Result<Stmt, String> {
        self.depth += 1;
        if self.depth > 2000 {
            return Err("nesting too deep".into());
        }
        let s = self.statement_inner();
        self.depth -= 1;
        s
    }

    fn statement_inner(&mut self) -> Result<Stmt, String> {
        if self.eat_kw("var") {
            let name = self.binding()?;
            let init = if self.eat("=") { Some(self.expr()?) } else { None };
            self.expect(";")?;
            Ok(Stmt::Var(name, init))
        } else if self.eat_kw("function") {
            let name = self.binding()?;
            let (params, body) = self.function_rest()?;
            Ok(Stmt::FuncDecl(name, params, body))
        } else if self.eat_kw("return") {
            if self.eat(";") {
                return Ok(Stmt::Return(None));
            }
            let e = self.expr()?;
            self.expect(";")?;
            Ok(Stmt::Return(Some(e)))
        } else if self.eat_kw("if") {
            self.expect("(")?;
            let c = self.expr()?;
            self.expect(")")?;
            let t = self.statement()?;
            let e = if self.eat_kw("else") { Some(Box::new(self.statement()?)) } else { None };
            Ok(Stmt::If(c, Box::new(t), e))
        } else if self.eat_kw("while") {
            self.expect("(")?;
            let c = self.expr()?;
            self.expect(")")?;
            Ok(Stmt::While(c, Box::new(self.statement()?)))
        } else if self.eat_kw("throw") {
            let e = self.expr()?;
            self.expect(";")?;
            Ok(Stmt::Throw(e))
        } else if self.is("{") {
            Ok(Stmt::Block(self.block()?))
        } else {
            let e = self.expr()?;
            self.expect(";")?;
            Ok(Stmt::Expr(e))
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn block(&mut self) -> Result<Vec<Stmt>, String> {
        self.expect("{")?;
        let mut out = Vec::new();
        while !self.eat("}") {
            if self.peek().is_none() {
                return Err("unclosed block".into());
            }
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn function_rest(&mut self) -> Result<(Vec<String>, Vec<Stmt>), String> {
        self.expect("(")?;
        let mut params = Vec::new();
        if !self.eat(")") {
            loop {
                params.push(self.binding()?);
                if self.eat(")") {
                    break;
                }
                self.expect(",")?;
            }
        }
        let unique: BTreeSet<_> = params.iter().collect();
        if unique.len() != params.len() {
            return Err("duplicate parameter".into());
        }
        Ok((params, self.block()?))
    }

    fn expr(&mut self) -> Result<Node, String> {
        self.depth += 1;
        if self.depth > 2000 {
            return Err("nesting too deep".into());
        }
        let lhs = self.conditional()?;
        let r = if self.eat("=") {
            if !matches!(lhs, Node::Ident(_) | Node::Member(..) | Node::Index(..)) {
                return Err("invalid assignment target".into());
            }
            Ok(Node::Assign(Box::new(lhs), Box::new(self.expr()?)))
        } else {
            Ok(lhs)
        };
        self.depth -= 1;
        r
    }

    fn conditional(&mut self) -> Result<Node, String> {
        let c = self.binary(0)?;
        if self.eat("?") {
            let t = self.expr()?;
            self.expect(":")?;
            let e = self.expr()?;
            return Ok(Node::Cond(Box::new(c), Box::new(t), Box::new(e)));
        }
        Ok(c)
    }

    fn binary(&mut self, level: usize) -> Result<Node, String> {
        if level == BINARY_LEVELS.len() {
            return self.unary();
        }
        let mut lhs = self.binary(level + 1)?;
        loop {
            let op = match self.peek() {
                Some(Tok::Punct(p)) => BINARY_LEVELS[level].iter().find(|o| *o == p).copied(),
                _ => None,
            };
            let Some(op) = op else { return Ok(lhs) };
            self.pos += 1;
            let rhs = self.binary(level + 1)?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Node, String> {
        for op in ["!", "-"] {
            if self.eat(op) {
                return Ok(Node::Unary(op, Box::new(self.unary()?)));
            }
        }
        if self.eat_kw("typeof") {
            return Ok(Node::Unary("typeof", Box::new(self.unary()?)));
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Node, String> {
        let mut e = self.primary()?;
        loop {
            if self.eat("(") {
                let mut args = Vec::new();
                if !self.eat(")") {
                    loop {
                        args.push(self.expr()?);
                        if self.eat(")") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                e = Node::Call(Box::new(e), args);
            } else if self.eat(".") {
                match self.peek().cloned() {
                    Some(Tok::Ident(n)) => {
                        self.pos += 1;
                        e = Node::Member(Box::new(e), n);
                    }
                    other => return Err(format!("property name expected, found {other:?}")),
                }
            } else if self.eat("[") {
                let i = self.expr()?;
                self.expect("]")?;
                e = Node::Index(Box::new(e), Box::new(i));
            } else {
                return Ok(e);
            }
        }
    }

    fn primary(&mut self) -> Result<Node, String> {
        let tok = self.peek().cloned().ok_or("unexpected end of input")?;
        self.pos += 1;
        Ok(match tok {
            Tok::Num(n) => Node::Num(n),
            Tok::Str(s) => Node::Str(s),
            Tok::Ident(k) if k == "true" => Node::Bool(true),
            Tok::Ident(k) if k == "false" => Node::Bool(false),
            Tok::Ident(k) if k == "null" => Node::Null,
            Tok::Ident(k) if k == "function" => {
                let (params, body) = self.function_rest()?;
                Node::Func { params, body }
            }
            Tok::Ident(k) if k == "new" => Node::New(Box::new(self.postfix()?)),
            Tok::Ident(k) if KEYWORDS.contains(&k.as_str()) => return Err(format!("unexpected keyword {k}")),
            Tok::Ident(n) => Node::Ident(n),
            Tok::Punct("(") => {
                let e = self.expr()?;
                self.expect(")")?;
                e
            }
            Tok::Punct("{") => {
                let mut props = Vec::new();
                if !self.eat("}") {
                    loop {
                        let key = match self.peek().cloned() {
                            Some(Tok::Ident(n) | Tok::Str(n) | Tok::Num(n)) => n,
                            other => return Err(format!("property key expected, found {other:?}")),
                        };
                        self.pos += 1;
                        self.expect(":")?;
                        if props.iter().any(|(k, _)| *k == key) {
                            return Err(format!("duplicate key {key}"));
                        }
                        props.push((key, self.expr()?));
                        if self.eat("}") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Node::Object(props)
            }
            Tok::Punct("[") => {
                let mut items = Vec::new();
                if !self.eat("]") {
                    loop {
                        items.push(self.expr()?);
                        if self.eat("]") {
                            break;
                        }
                        self.expect(",")?;
                    }
                }
                Node::Array(items)
            }
            other => return Err(format!("unexpected token {other:?}")),
        })
    }
}

fn parser(src: &str) -> Result<Parser, String> {
    Ok(Parser { toks: lex(src)?, pos: 0, depth: 0 })
}

/// Parses a whole script.
pub fn parse_program(src: &str) -> Result<Vec<Stmt>, String> {
    let mut p = parser(src)?;
    let mut out = Vec::new();
    while p.peek().is_some() {
        out.push(p.statement()?);
    }
    Ok(out)
}

/// Parses a single expression with nothing after it.
pub fn parse_expression(src: &str) -> Result<Node, String> {
    let mut p = parser(src)?;
    let e = p.expr()?;
    if p.peek().is_some() {
        return Err(format!("trailing tokens after expression at token {}", p.pos));
    }
    Ok(e)
}

/// Names visible to every script.
pub const GLOBALS: &[&str] = &["Math", "Number", "Error"];

/// Every identifier reference must resolve to a parameter, a `var` or
/// function declaration in an enclosing function (hoisted), or a global.
/// Returns the unresolved names in order of appearance.
pub fn unresolved_names(program: &[Stmt]) -> Vec<String> {
    let mut scopes = vec![GLOBALS.iter().map(|s| s.to_string()).collect::<BTreeSet<_>>()];
    let mut bad = Vec::new();
    check_body(program, &[], &mut scopes, &mut bad);
    bad
}

fn hoisted(body: &[Stmt], into: &mut BTreeSet<String>) {
    for s in body {
        match s {
            Stmt::Var(n, _) | Stmt::FuncDecl(n, _, _) => {
                into.insert(n.clone());
            }
            Stmt::If(_, t, e) => {
                hoisted(std::slice::from_ref(t), into);
                if let Some(e) = e {
                    hoisted(std::slice::from_ref(e), into);
                }
            }
            Stmt::While(_, b) => hoisted(std::slice::from_ref(b), into),
            Stmt::Block(b) => hoisted(b, into),
            _ => {}
        }
    }
}

fn check_body(body: &[Stmt], params: &[String], scopes: &mut Vec<BTreeSet<String>>, bad: &mut Vec<String>) {
    let mut scope: BTreeSet<String> = params.iter().cloned().collect();
    hoisted(body, &mut scope);
    scopes.push(scope);
    for s in body {
        check_stmt(s, scopes, bad);
    }
    scopes.pop();
}

fn check_stmt(s: &Stmt, scopes: &mut Vec<BTreeSet<String>>, bad: &mut Vec<String>) {
    match s {
        Stmt::Var(_, init) => {
            if let Some(e) = init {
                check_node(e, scopes, bad);
            }
        }
        Stmt::FuncDecl(_, params, body) => check_body(body, params, scopes, bad),
        Stmt::Return(e) => {
            if let Some(e) = e {
                check_node(e, scopes, bad);
            }
        }
        Stmt::If(c, t, e) => {
            check_node(c, scopes, bad);
            check_stmt(t, scopes, bad);
            if let Some(e) = e {
                check_stmt(e, scopes, bad);
            }
        }
        Stmt::While(c, b) => {
            check_node(c, scopes, bad);
            check_stmt(b, scopes, bad);
        }
        Stmt::Throw(e) | Stmt::Expr(e) => check_node(e, scopes, bad),
        Stmt::Block(b) => b.iter().for_each(|s| check_stmt(s, scopes, bad)),
    }
}

fn check_node(n: &Node, scopes: &mut Vec<BTreeSet<String>>, bad: &mut Vec<String>) {
    match n {
        Node::Ident(name) => {
            if !scopes.iter().any(|s| s.contains(name)) {
                bad.push(name.clone());
            }
        }
        Node::Num(_) | Node::Str(_) | Node::Bool(_) | Node::Null => {}
        Node::Func { params, body } => check_body(body, params, scopes, bad),
        Node::Call(f, args) => {
            check_node(f, scopes, bad);
            args.iter().for_each(|a| check_node(a, scopes, bad));
        }
        Node::Member(o, _) => check_node(o, scopes, bad),
        Node::Index(a, b) | Node::Binary(_, a, b) | Node::Assign(a, b) => {
            check_node(a, scopes, bad);
            check_node(b, scopes, bad);
        }
        Node::Unary(_, a) | Node::New(a) => check_node(a, scopes, bad),
        Node::Cond(a, b, c) => {
            check_node(a, scopes, bad);
            check_node(b, scopes, bad);
            check_node(c, scopes, bad);
        }
        Node::Object(props) => props.iter().for_each(|(_, v)| check_node(v, scopes, bad)),
        Node::Array(items) => items.iter().for_each(|i| check_node(i, scopes, bad)),
    }
}

/// Decodes a tagged-object literal back to a value.
pub fn decode_value(src: &str) -> Result<Value, String> {
    to_value(&parse_expression(src)?)
}

fn number(text: &str) -> Result<Value, String> {
    if text.trim_start_matches('-').bytes().all(|b| b.is_ascii_digit()) {
        text.parse().map(Value::Int).map_err(|e| format!("{text}: {e}"))
    } else {
        text.parse().map(Value::Float).map_err(|e| format!("{text}: {e}"))
    }
}

fn to_value(n: &Node) -> Result<Value, String> {
    match n {
        Node::Num(t) => number(t),
        Node::Unary("-", inner) => match &**inner {
            Node::Num(t) => number(&format!("-{t}")),
            other => Err(format!("negation of non-literal {other:?}")),
        },
        Node::Str(s) => Ok(Value::str(s)),
        Node::Bool(b) => Ok(Value::Bool(*b)),
        Node::Null => Ok(Value::Unit),
        Node::Object(_) => {
            let mut items = Vec::new();
            let mut cell = n;
            loop {
                let Node::Object(props) = cell else { return Err(format!("list tail is not a cell: {cell:?}")) };
                let get = |k: &str| props.iter().find(|(p, _)| p == k).map(|(_, v)| v);
                match (get("$"), props.len()) {
                    (Some(Node::Num(t)), 1) if t == "0" => break,
                    (Some(Node::Num(t)), 3) if t == "1" => {
                        items.push(to_value(get("$0").ok_or("cell without $0")?)?);
                        cell = get("$1").ok_or("cell without $1")?;
                    }
                    _ => return Err(format!("not a list cell: {props:?}")),
                }
            }
            Ok(Value::list(items))
        }
        other => Err(format!("not a value literal: {other:?}")),
    }
}
