//! Lowers an [`Expr`] into a flat node arena with variables resolved to
//! environment depths. Each node still corresponds to one AST node for fuel
//! accounting; `Call1`/`Call2` stand for the two or three nodes of a
//! saturated builtin application and are charged accordingly.

use std::sync::Arc;

use crate::expr::{Expr, Ident};

use super::builtins::Builtin;

pub(crate) type NodeId = u32;

pub(crate) enum Node {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(Arc<str>),
    Unit,
    /// Environment depth, innermost binding at 0.
    Local(u32),
    Builtin(Builtin),
    Unbound(Ident),
    Lam { param: Ident, body: NodeId },
    App(NodeId, NodeId),
    /// `(app (var b) x)` with a unary builtin `b` in scope.
    Call1(Builtin, NodeId),
    /// `(app (app (var b) x) y)` with a binary builtin `b` in scope.
    Call2(Builtin, NodeId, NodeId),
    Let(NodeId, NodeId),
    /// `lam` is a `Lam` node evaluated in the recursive frame.
    LetRec { lam: NodeId, body: NodeId },
    /// A letrec whose bound expression is not a lambda.
    BadLetRec,
    If(NodeId, NodeId, NodeId),
    List(Box<[NodeId]>),
}

pub(crate) struct Program {
    pub nodes: Vec<Node>,
    pub root: NodeId,
}

impl Program {
    pub fn compile(e: &Expr) -> Program {
        let mut c = Compiler { nodes: Vec::new(), scope: Vec::new() };
        let root = c.expr(e);
        Program { nodes: c.nodes, root }
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id as usize]
    }

    pub fn lam_param(&self, id: NodeId) -> &Ident {
        match self.node(id) {
            Node::Lam { param, .. } => param,
            _ => unreachable!("closure points at a non-lambda node"),
        }
    }
}

struct Compiler {
    nodes: Vec<Node>,
    scope: Vec<Ident>,
}

impl Compiler {
    fn push(&mut self, n: Node) -> NodeId {
        self.nodes.push(n);
        (self.nodes.len() - 1) as NodeId
    }

    fn lookup(&self, name: &Ident) -> Option<u32> {
        self.scope.iter().rev().position(|s| s == name).map(|d| d as u32)
    }

    /// A builtin reference that is not shadowed by a local binding.
    fn builtin(&self, e: &Expr) -> Option<Builtin> {
        match e {
            Expr::Var(v) if self.lookup(v).is_none() => Builtin::from_name(v.as_str()),
            _ => None,
        }
    }

    fn bind<T>(&mut self, name: &Ident, f: impl FnOnce(&mut Self) -> T) -> T {
        self.scope.push(name.clone());
        let out = f(self);
        self.scope.pop();
        out
    }

    fn expr(&mut self, e: &Expr) -> NodeId {
        let node = match e {
            Expr::LitInt(i) => Node::Int(*i),
            Expr::LitFloat(f) => Node::Float(f.get()),
            Expr::LitBool(b) => Node::Bool(*b),
            Expr::LitStr(s) => Node::Str(Arc::from(s.as_str())),
            Expr::LitUnit => Node::Unit,
            Expr::Var(v) => match self.lookup(v) {
                Some(depth) => Node::Local(depth),
                None => match Builtin::from_name(v.as_str()) {
                    Some(b) => Node::Builtin(b),
                    None => Node::Unbound(v.clone()),
                },
            },
            Expr::Lam(p, body) => {
                let body = self.bind(p, |c| c.expr(body));
                Node::Lam { param: p.clone(), body }
            }
            Expr::App(f, a) => {
                if let Expr::App(g, x) = &**f {
                    if let Some(b) = self.builtin(g).filter(|b| b.arity() == 2) {
                        let x = self.expr(x);
                        let y = self.expr(a);
                        return self.push(Node::Call2(b, x, y));
                    }
                }
                if let Some(b) = self.builtin(f).filter(|b| b.arity() == 1) {
                    let x = self.expr(a);
                    return self.push(Node::Call1(b, x));
                }
                let f = self.expr(f);
                let a = self.expr(a);
                Node::App(f, a)
            }
            Expr::Let(n, b, body) => {
                let b = self.expr(b);
                let body = self.bind(n, |c| c.expr(body));
                Node::Let(b, body)
            }
            Expr::LetRec(n, b, body) => {
                if !matches!(**b, Expr::Lam(..)) {
                    Node::BadLetRec
                } else {
                    let (lam, body) = self.bind(n, |c| (c.expr(b), c.expr(body)));
                    Node::LetRec { lam, body }
                }
            }
            Expr::If(c, t, f) => {
                let c = self.expr(c);
                let t = self.expr(t);
                let f = self.expr(f);
                Node::If(c, t, f)
            }
            Expr::ListLit(items) => Node::List(items.iter().map(|i| self.expr(i)).collect()),
        };
        self.push(node)
    }
}
