//! Random generators shared by the property suites.
#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use qx_core::eval::EvalErrorCode;
use qx_core::wire::ErrorCode;
use qx_core::{Expr, Fuel, Ident, Message, Value};

pub fn ident(name: &str) -> Ident {
    Ident::new(name).unwrap()
}

/// Binder names, small enough that shadowing and capture happen often.
pub const NAMES: &[&str] = &["x", "y", "z", "f", "x'", "acc", "n_1", "function", "RT"];

/// Builtins that mix well in random programs.
pub const BUILTINS: &[&str] = &[
    "add", "sub", "mul", "div", "mod", "neg", "lt", "le", "eq", "ne", "and", "not", "toFloat", "toInt", "sqrt",
    "min", "cons", "head", "tail", "isEmpty", "length", "append", "map", "filter", "foldl", "sum", "range",
];

pub fn arb_name() -> impl Strategy<Value = Ident> {
    prop_oneof![
        4 => prop::sample::select(NAMES).prop_map(ident),
        1 => "[A-Za-z_][A-Za-z0-9_']{0,6}".prop_filter_map("reserved word", |s| Ident::new(&s).ok()),
    ]
}

pub fn arb_f64() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |f| f.is_finite()),
        prop::sample::select(vec![0.0, -0.0, 0.5, 1.0, -2.5, 0.1, 1e300, -1e-300, 5e-324, f64::MAX, f64::MIN_POSITIVE]),
        (-1000i32..1000).prop_map(|i| f64::from(i) / 8.0),
    ]
}

pub fn arb_string() -> impl Strategy<Value = String> {
    let special = prop::sample::select(vec!['"', '\\', '\n', '\t', '\r', '\u{0}', '\u{1f}', '\u{7f}', 'é', '☃', '𝄞', ' ', ';', '(', ')']);
    prop::collection::vec(prop_oneof![any::<char>(), special, prop::char::range('a', 'z')], 0..10)
        .prop_map(|cs| cs.into_iter().collect())
}

pub fn arb_int() -> impl Strategy<Value = i64> {
    prop_oneof![any::<i64>(), -20i64..20, prop::sample::select(vec![i64::MIN, i64::MAX, 0, -1])]
}

pub fn arb_scalar_literal() -> impl Strategy<Value = Expr> {
    prop_oneof![
        arb_int().prop_map(Expr::LitInt),
        arb_f64().prop_map(|f| Expr::float(f).unwrap()),
        any::<bool>().prop_map(Expr::LitBool),
        arb_string().prop_map(Expr::LitStr),
        Just(Expr::LitUnit),
    ]
}

/// Literal forms: scalars and nested list literals of literals.
pub fn arb_literal() -> impl Strategy<Value = Expr> {
    arb_scalar_literal().prop_recursive(3, 24, 5, |inner| prop::collection::vec(inner, 0..5).prop_map(Expr::ListLit))
}

/// Any well-formed expression, free variables included.
pub fn arb_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        3 => arb_scalar_literal(),
        2 => arb_name().prop_map(Expr::Var),
        1 => prop::sample::select(BUILTINS).prop_map(Expr::var),
    ];
    leaf.prop_recursive(5, 48, 4, |e| {
        prop_oneof![
            1 => (arb_name(), e.clone()).prop_map(|(x, b)| Expr::Lam(x, Box::new(b))),
            3 => (e.clone(), e.clone()).prop_map(|(f, a)| Expr::App(Box::new(f), Box::new(a))),
            1 => (arb_name(), e.clone(), e.clone()).prop_map(|(x, b, body)| Expr::Let(x, Box::new(b), Box::new(body))),
            1 => (arb_name(), arb_name(), e.clone(), e.clone())
                .prop_map(|(f, x, b, body)| Expr::letrec(f, Expr::Lam(x, Box::new(b)), body).unwrap()),
            1 => (e.clone(), e.clone(), e.clone()).prop_map(|(c, t, f)| Expr::If(Box::new(c), Box::new(t), Box::new(f))),
            1 => prop::collection::vec(e, 0..4).prop_map(Expr::ListLit),
        ]
    })
}

fn call(f: &str, args: Vec<Expr>) -> Expr {
    args.into_iter().fold(Expr::var(f), |acc, a| Expr::App(Box::new(acc), Box::new(a)))
}

/// Programs biased toward saturated builtin calls over small data.
fn arb_program_body() -> impl Strategy<Value = Expr> {
    let small = prop_oneof![
        3 => (-6i64..30).prop_map(Expr::LitInt),
        1 => arb_int().prop_map(Expr::LitInt),
        2 => arb_f64().prop_map(|f| Expr::float(f).unwrap()),
        1 => any::<bool>().prop_map(Expr::LitBool),
        1 => arb_string().prop_map(Expr::LitStr),
        1 => Just(Expr::LitUnit),
        3 => prop::sample::select(&NAMES[..4]).prop_map(Expr::var),
    ];
    small.prop_recursive(5, 40, 3, |e| {
        let unary = prop::sample::select(vec!["neg", "not", "toFloat", "toInt", "sqrt", "head", "tail", "isEmpty", "length", "sum"]);
        let binary = prop::sample::select(vec![
            "add", "sub", "mul", "div", "mod", "lt", "le", "eq", "ne", "and", "min", "cons", "append", "range",
        ]);
        let func = prop::sample::select(vec!["x", "y"]).prop_flat_map({
            let e = e.clone();
            move |p| e.clone().prop_map(move |b| Expr::lam(p, b))
        });
        prop_oneof![
            2 => (unary, e.clone()).prop_map(|(f, a)| call(f, vec![a])),
            4 => (binary, e.clone(), e.clone()).prop_map(|(f, a, b)| call(f, vec![a, b])),
            1 => (func.clone(), e.clone()).prop_map(|(f, l)| call("map", vec![f, l])),
            1 => (func.clone(), e.clone()).prop_map(|(f, l)| call("filter", vec![f, l])),
            1 => (func.clone(), e.clone(), e.clone()).prop_map(|(f, z, l)| {
                let Expr::Lam(p, b) = f else { unreachable!() };
                call("foldl", vec![Expr::Lam(ident("acc"), Box::new(Expr::Lam(p, b))), z, l])
            }),
            1 => (func.clone(), e.clone()).prop_map(|(f, a)| Expr::App(Box::new(f), Box::new(a))),
            1 => (prop::sample::select(&NAMES[..4]), e.clone(), e.clone())
                .prop_map(|(x, b, body)| Expr::let_(x, b, body)),
            1 => (e.clone(), e.clone()).prop_map(|(b, body)| {
                let step = Expr::if_(call("lt", vec![Expr::var("x"), Expr::int(1)]), b, call("f", vec![call("sub", vec![Expr::var("x"), Expr::int(1)])]));
                Expr::letrec(ident("f"), Expr::lam("x", step), call("f", vec![body])).unwrap()
            }),
            1 => (e.clone(), e.clone(), e.clone()).prop_map(|(c, t, f)| Expr::if_(c, t, f)),
            1 => prop::collection::vec(e, 0..4).prop_map(Expr::ListLit),
        ]
    })
}

/// Closed programs: free variables are bound to random literals by
/// enclosing `let`s.
pub fn arb_untyped_program() -> impl Strategy<Value = Expr> {
    (arb_program_body(), prop::collection::vec(arb_literal(), 4)).prop_map(|(body, lits)| {
        let builtins: BTreeSet<&str> = qx_core::eval::builtin_table().keys().copied().collect();
        let free: Vec<Ident> = body.free_vars().into_iter().filter(|v| !builtins.contains(v.as_str())).collect();
        free.into_iter()
            .enumerate()
            .fold(body, |acc, (i, v)| Expr::Let(v, Box::new(lits[i % lits.len()].clone()), Box::new(acc)))
    })
}

/// Closed programs, mostly well-typed with occasional deliberate
/// mistakes, plus some untyped ones.
pub fn arb_closed_program() -> impl Strategy<Value = Expr> {
    prop_oneof![
        5 => prop::collection::vec(any::<u32>(), 64..400).prop_map(|tape| {
            let mut t = Typed { tape, pos: 0, env: Vec::new(), fresh: 0 };
            let ty = TYPES[t.pick(TYPES.len())];
            t.gen(ty, 4)
        }),
        1 => arb_untyped_program(),
    ]
}

#[derive(Clone, Copy, PartialEq)]
enum Ty {
    Int,
    Float,
    Bool,
    Str,
    Ints,
    Floats,
}

const TYPES: [Ty; 6] = [Ty::Int, Ty::Float, Ty::Bool, Ty::Str, Ty::Ints, Ty::Floats];

/// Reads choices from a tape of random words so proptest can shrink the
/// tape instead of the tree.
struct Typed {
    tape: Vec<u32>,
    pos: usize,
    env: Vec<(Ident, Ty)>,
    fresh: usize,
}

impl Typed {
    fn word(&mut self) -> u32 {
        let w = self.tape.get(self.pos).copied().unwrap_or(0);
        self.pos += 1;
        w
    }

    fn pick(&mut self, n: usize) -> usize {
        self.word() as usize % n
    }

    fn fresh(&mut self) -> Ident {
        self.fresh += 1;
        ident(&format!("v{}", self.fresh % 4))
    }

    fn var_of(&mut self, ty: Ty) -> Option<Expr> {
        let candidates: Vec<Ident> = self.env.iter().rev().filter(|(_, t)| *t == ty).map(|(n, _)| n.clone()).collect();
        if candidates.is_empty() {
            None
        } else {
            let i = self.pick(candidates.len());
            Some(Expr::Var(candidates[i].clone()))
        }
    }

    fn lam(&mut self, param_ty: Ty, body_ty: Ty, depth: u32) -> Expr {
        let x = self.fresh();
        self.env.push((x.clone(), param_ty));
        let body = self.gen(body_ty, depth);
        self.env.pop();
        Expr::Lam(x, Box::new(body))
    }

    fn lam2(&mut self, a: Ty, b: Ty, body_ty: Ty, depth: u32) -> Expr {
        let x = self.fresh();
        self.env.push((x.clone(), a));
        let inner = self.lam(b, body_ty, depth);
        self.env.pop();
        Expr::Lam(x, Box::new(inner))
    }

    fn leaf(&mut self, ty: Ty) -> Expr {
        if self.pick(3) == 0 {
            if let Some(v) = self.var_of(ty) {
                return v;
            }
        }
        let w = self.word();
        match ty {
            Ty::Int if w % 10 == 0 => Expr::int(i64::from(w as i32) * 0x1_0000_0001),
            Ty::Int => Expr::int(i64::from(w % 40) - 8),
            Ty::Float => Expr::float(f64::from(w % 64) / 4.0 - 4.0).unwrap(),
            Ty::Bool => Expr::bool(w % 2 == 0),
            Ty::Str => Expr::str(["", "a", "b", "ab", "\u{e9}"][w as usize % 5]),
            Ty::Ints => Expr::list((0..w % 4).map(|i| Expr::int(i64::from(i * 7 % 5)))),
            Ty::Floats => Expr::list((0..w % 3).map(|i| Expr::float(f64::from(i) * 1.5).unwrap())),
        }
    }

    fn gen(&mut self, ty: Ty, depth: u32) -> Expr {
        if depth == 0 || self.pick(5) == 0 {
            return self.leaf(ty);
        }
        if self.pick(40) == 0 {
            let other = TYPES[self.pick(TYPES.len())];
            return self.gen(other, depth - 1);
        }
        let d = depth - 1;
        let common = self.pick(8);
        if common == 0 {
            let c = self.gen(Ty::Bool, d);
            return Expr::if_(c, self.gen(ty, d), self.gen(ty, d));
        }
        if common == 1 {
            let bty = TYPES[self.pick(TYPES.len())];
            let bound = self.gen(bty, d);
            let x = self.fresh();
            self.env.push((x.clone(), bty));
            let body = self.gen(ty, d);
            self.env.pop();
            return Expr::Let(x, Box::new(bound), Box::new(body));
        }
        if common == 2 {
            let aty = TYPES[self.pick(TYPES.len())];
            let f = self.lam(aty, ty, d);
            return Expr::app(f, self.gen(aty, d));
        }
        match ty {
            Ty::Int => match self.pick(9) {
                0..=2 => {
                    let op = ["add", "sub", "mul", "div", "mod"][self.pick(5)];
                    call(op, vec![self.gen(Ty::Int, d), self.gen(Ty::Int, d)])
                }
                3 => call(["length", "sum", "head"][self.pick(3)], vec![self.gen(Ty::Ints, d)]),
                4 => call("toInt", vec![self.gen(Ty::Float, d)]),
                5 => call("neg", vec![self.gen(Ty::Int, d)]),
                6 => {
                    let f = self.lam2(Ty::Int, Ty::Int, Ty::Int, d);
                    call("foldl", vec![f, self.gen(Ty::Int, d), self.gen(Ty::Ints, d)])
                }
                _ => {
                    let f = ident("loop");
                    let x = self.fresh();
                    self.env.push((x.clone(), Ty::Int));
                    let base = self.gen(Ty::Int, d);
                    self.env.pop();
                    let step = Expr::if_(
                        call("lt", vec![Expr::Var(x.clone()), Expr::int(1)]),
                        base,
                        call("add", vec![Expr::int(1), Expr::app(Expr::Var(f.clone()), call("sub", vec![Expr::Var(x.clone()), Expr::int(1)]))]),
                    );
                    let start = self.gen(Ty::Int, d);
                    Expr::letrec(f.clone(), Expr::Lam(x, Box::new(step)), Expr::app(Expr::Var(f), start)).unwrap()
                }
            },
            Ty::Float => match self.pick(5) {
                0 | 1 => {
                    let op = ["add", "sub", "mul", "div", "mod", "min", "max"][self.pick(7)];
                    call(op, vec![self.gen(Ty::Float, d), self.gen(Ty::Float, d)])
                }
                2 => call(["sqrt", "abs", "neg"][self.pick(3)], vec![self.gen(Ty::Float, d)]),
                3 => call("toFloat", vec![self.gen(Ty::Int, d)]),
                _ => call("sum", vec![self.gen(Ty::Floats, d)]),
            },
            Ty::Bool => match self.pick(5) {
                0 | 1 => {
                    let op = ["lt", "le", "gt", "ge", "eq", "ne"][self.pick(6)];
                    let aty = [Ty::Int, Ty::Float, Ty::Str, Ty::Bool, Ty::Ints][self.pick(5)];
                    call(op, vec![self.gen(aty, d), self.gen(aty, d)])
                }
                2 => call(["and", "or"][self.pick(2)], vec![self.gen(Ty::Bool, d), self.gen(Ty::Bool, d)]),
                3 => call("not", vec![self.gen(Ty::Bool, d)]),
                _ => call("isEmpty", vec![self.gen(Ty::Ints, d)]),
            },
            Ty::Str => self.leaf(Ty::Str),
            Ty::Ints => match self.pick(7) {
                0 => call("range", vec![self.gen(Ty::Int, d), self.gen(Ty::Int, d)]),
                1 => call("cons", vec![self.gen(Ty::Int, d), self.gen(Ty::Ints, d)]),
                2 => call("tail", vec![self.gen(Ty::Ints, d)]),
                3 => call("append", vec![self.gen(Ty::Ints, d), self.gen(Ty::Ints, d)]),
                4 => {
                    let f = self.lam(Ty::Int, Ty::Int, d);
                    call("map", vec![f, self.gen(Ty::Ints, d)])
                }
                5 => {
                    let f = self.lam(Ty::Int, Ty::Bool, d);
                    call("filter", vec![f, self.gen(Ty::Ints, d)])
                }
                _ => {
                    let n = self.pick(4);
                    Expr::list((0..n).map(|_| self.gen(Ty::Int, d)).collect::<Vec<_>>())
                }
            },
            Ty::Floats => match self.pick(3) {
                0 => call("map", vec![Expr::var("toFloat"), self.gen(Ty::Ints, d)]),
                1 => call("cons", vec![self.gen(Ty::Float, d), self.gen(Ty::Floats, d)]),
                _ => {
                    let n = self.pick(4);
                    Expr::list((0..n).map(|_| self.gen(Ty::Float, d)).collect::<Vec<_>>())
                }
            },
        }
    }
}

/// First-order values: scalars and nested lists.
pub fn arb_value() -> impl Strategy<Value = Value> {
    let scalar = prop_oneof![
        arb_int().prop_map(Value::Int),
        arb_f64().prop_map(Value::Float),
        any::<bool>().prop_map(Value::Bool),
        arb_string().prop_map(|s| Value::str(&s)),
        Just(Value::Unit),
    ];
    scalar.prop_recursive(3, 32, 5, |inner| prop::collection::vec(inner, 0..5).prop_map(Value::list))
}

pub fn arb_error_code() -> impl Strategy<Value = ErrorCode> {
    prop_oneof![
        prop::sample::select(EvalErrorCode::ALL.to_vec()).prop_map(ErrorCode::Eval),
        prop::sample::select(vec![
            ErrorCode::ParseError,
            ErrorCode::VersionMismatch,
            ErrorCode::Overloaded,
            ErrorCode::Unavailable
        ]),
    ]
}

pub fn arb_message() -> impl Strategy<Value = Message> {
    let fuel = prop::option::of((1u64..u64::MAX).prop_map(|f| Fuel::new(f).unwrap()));
    prop_oneof![
        1 => any::<u32>().prop_map(|version| Message::Hello { version }),
        1 => any::<u32>().prop_map(|version| Message::HelloOk { version }),
        3 => (any::<u64>(), arb_expr(), fuel).prop_map(|(id, expr, fuel)| Message::Eval { id, expr, fuel }),
        2 => (any::<u64>(), arb_literal()).prop_map(|(id, value)| Message::Result { id, value }),
        2 => (any::<u64>(), arb_error_code(), arb_string())
            .prop_map(|(id, code, detail)| Message::Error { id, code, detail }),
        1 => Just(Message::Ping),
        1 => Just(Message::Pong),
    ]
}
