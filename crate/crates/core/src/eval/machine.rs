//! Explicit-stack evaluator. Continuations live on a heap vector, so object
//! language recursion depth is bounded by fuel and memory, not the native
//! stack. Calls in tail position do not grow the stack.

use std::sync::Arc;

use super::builtins::{self, Builtin};
use super::compile::{Node, NodeId, Program};
use super::value::{Closure, Env, EnvFrame, Partial, Value};
use super::{Budget, EvalError, EvalErrorCode};

enum Control {
    Eval(NodeId, Env),
    Return(Value),
}

enum Kont {
    /// Function evaluated; evaluate the argument next.
    AppArg(NodeId, Env),
    /// Argument evaluated; apply the held function.
    AppCall(Value),
    Call1(Builtin),
    Call2Arg(Builtin, NodeId, Env),
    Call2(Builtin, Value),
    Let(NodeId, Env),
    If(NodeId, NodeId, Env),
    List { node: NodeId, next: usize, acc: Vec<Value>, env: Env },
    /// Apply the returned value to this argument.
    ApplyTo(Value),
    Map { f: Value, items: Arc<[Value]>, next: usize, acc: Vec<Value> },
    Filter { f: Value, items: Arc<[Value]>, next: usize, acc: Vec<Value> },
    Fold { f: Value, items: Arc<[Value]>, next: usize },
}

pub(crate) fn run(program: Arc<Program>, budget: &mut Budget) -> Result<Value, EvalError> {
    let mut m = Machine { program: program.clone(), budget, stack: Vec::new() };
    m.run(&program)
}

struct Machine<'b> {
    program: Arc<Program>,
    budget: &'b mut Budget,
    stack: Vec<Kont>,
}

fn lookup(env: &Env, depth: u32, program: &Arc<Program>) -> Value {
    let mut cur = env;
    for _ in 0..depth {
        cur = match cur.as_deref() {
            Some(EnvFrame::Bind(_, next)) | Some(EnvFrame::Rec(_, next)) => next,
            None => unreachable!("compiler resolved a depth beyond the environment"),
        };
    }
    match cur.as_deref() {
        Some(EnvFrame::Bind(v, _)) => v.clone(),
        Some(EnvFrame::Rec(lam, _)) => Value::Closure(Arc::new(Closure {
            program: program.clone(),
            lam: *lam,
            env: cur.clone(),
        })),
        None => unreachable!("compiler resolved a depth beyond the environment"),
    }
}

fn err(code: EvalErrorCode, detail: impl Into<String>) -> EvalError {
    EvalError::new(code, detail)
}

impl Machine<'_> {
    fn run(&mut self, prog: &Program) -> Result<Value, EvalError> {
        let mut ctl = Control::Eval(prog.root, None);
        loop {
            ctl = match ctl {
                Control::Eval(id, env) => {
                    self.budget.charge(1)?;
                    self.eval(prog, id, env)?
                }
                Control::Return(v) => match self.stack.pop() {
                    None => return Ok(v),
                    Some(k) => self.resume(prog, k, v)?,
                },
            };
        }
    }

    fn eval(&mut self, prog: &Program, id: NodeId, env: Env) -> Result<Control, EvalError> {
        Ok(match prog.node(id) {
            Node::Int(i) => Control::Return(Value::Int(*i)),
            Node::Float(f) => Control::Return(Value::Float(*f)),
            Node::Bool(b) => Control::Return(Value::Bool(*b)),
            Node::Str(s) => Control::Return(Value::Str(s.clone())),
            Node::Unit => Control::Return(Value::Unit),
            Node::Local(depth) => Control::Return(lookup(&env, *depth, &self.program)),
            Node::Builtin(b) => Control::Return(partial(*b, Vec::new())),
            Node::Unbound(name) => {
                return Err(err(EvalErrorCode::UnboundVar, format!("unbound variable {name}")))
            }
            Node::Lam { .. } => Control::Return(Value::Closure(Arc::new(Closure {
                program: self.program.clone(),
                lam: id,
                env,
            }))),
            Node::App(f, a) => {
                self.stack.push(Kont::AppArg(*a, env.clone()));
                Control::Eval(*f, env)
            }
            Node::Call1(b, x) => {
                self.budget.charge(1)?;
                self.stack.push(Kont::Call1(*b));
                Control::Eval(*x, env)
            }
            Node::Call2(b, x, y) => {
                self.budget.charge(2)?;
                self.stack.push(Kont::Call2Arg(*b, *y, env.clone()));
                Control::Eval(*x, env)
            }
            Node::Let(bound, body) => {
                self.stack.push(Kont::Let(*body, env.clone()));
                Control::Eval(*bound, env)
            }
            Node::LetRec { lam, body } => {
                Control::Eval(*body, Some(Arc::new(EnvFrame::Rec(*lam, env))))
            }
            Node::BadLetRec => {
                return Err(err(EvalErrorCode::TypeError, "letrec must bind a lambda"))
            }
            Node::If(c, t, f) => {
                self.stack.push(Kont::If(*t, *f, env.clone()));
                Control::Eval(*c, env)
            }
            Node::List(items) => match items.first() {
                None => Control::Return(Value::List(Arc::from(Vec::new()))),
                Some(first) => {
                    self.stack.push(Kont::List {
                        node: id,
                        next: 1,
                        acc: Vec::with_capacity(items.len()),
                        env: env.clone(),
                    });
                    Control::Eval(*first, env)
                }
            },
        })
    }

    fn resume(&mut self, prog: &Program, k: Kont, v: Value) -> Result<Control, EvalError> {
        Ok(match k {
            Kont::AppArg(a, env) => {
                self.stack.push(Kont::AppCall(v));
                Control::Eval(a, env)
            }
            Kont::AppCall(f) => self.apply(prog, f, v)?,
            Kont::Call1(b) => Control::Return(builtins::apply(b, &[v], self.budget)?),
            Kont::Call2Arg(b, y, env) => {
                self.stack.push(Kont::Call2(b, v));
                Control::Eval(y, env)
            }
            Kont::Call2(b, x) => self.call_builtin(prog, b, vec![x, v])?,
            Kont::Let(body, env) => Control::Eval(body, Some(Arc::new(EnvFrame::Bind(v, env)))),
            Kont::If(t, f, env) => match v {
                Value::Bool(true) => Control::Eval(t, env),
                Value::Bool(false) => Control::Eval(f, env),
                other => {
                    return Err(err(
                        EvalErrorCode::TypeError,
                        format!("if condition must be bool, got {}", other.kind()),
                    ))
                }
            },
            Kont::List { node, next, mut acc, env } => {
                acc.push(v);
                let Node::List(items) = prog.node(node) else { unreachable!() };
                match items.get(next) {
                    None => Control::Return(Value::List(acc.into())),
                    Some(item) => {
                        let item = *item;
                        self.stack.push(Kont::List { node, next: next + 1, acc, env: env.clone() });
                        Control::Eval(item, env)
                    }
                }
            }
            Kont::ApplyTo(arg) => self.apply(prog, v, arg)?,
            Kont::Map { f, items, next, mut acc } => {
                acc.push(v);
                self.map_step(prog, f, items, next, acc)?
            }
            Kont::Filter { f, items, next, mut acc } => {
                match v {
                    Value::Bool(true) => acc.push(items[next - 1].clone()),
                    Value::Bool(false) => {}
                    other => {
                        return Err(err(
                            EvalErrorCode::TypeError,
                            format!("filter predicate must return bool, got {}", other.kind()),
                        ))
                    }
                }
                self.filter_step(prog, f, items, next, acc)?
            }
            Kont::Fold { f, items, next } => self.fold_step(prog, f, items, next, v)?,
        })
    }

    fn apply(&mut self, prog: &Program, f: Value, arg: Value) -> Result<Control, EvalError> {
        match f {
            Value::Closure(c) => {
                let Node::Lam { body, .. } = prog.node(c.lam) else { unreachable!() };
                Ok(Control::Eval(*body, Some(Arc::new(EnvFrame::Bind(arg, c.env.clone())))))
            }
            Value::Builtin(p) => {
                let mut args = Vec::with_capacity(p.applied.len() + 1);
                args.extend(p.applied.iter().cloned());
                args.push(arg);
                if args.len() < p.builtin.arity() {
                    Ok(Control::Return(partial(p.builtin, args)))
                } else {
                    self.call_builtin(prog, p.builtin, args)
                }
            }
            other => Err(err(
                EvalErrorCode::ArityError,
                format!("cannot apply a {} to an argument", other.kind()),
            )),
        }
    }

    fn call_builtin(
        &mut self,
        prog: &Program,
        b: Builtin,
        mut args: Vec<Value>,
    ) -> Result<Control, EvalError> {
        let list_of = |args: &[Value], i: usize| match &args[i] {
            Value::List(items) => Ok(items.clone()),
            other => Err(err(
                EvalErrorCode::TypeError,
                format!("{} expects a list, got {}", b.name(), other.kind()),
            )),
        };
        match b {
            Builtin::Map => {
                let items = list_of(&args, 1)?;
                let f = args.swap_remove(0);
                let acc = Vec::with_capacity(items.len());
                self.map_step(prog, f, items, 0, acc)
            }
            Builtin::Filter => {
                let items = list_of(&args, 1)?;
                let f = args.swap_remove(0);
                self.filter_step(prog, f, items, 0, Vec::new())
            }
            Builtin::Foldl => {
                let items = list_of(&args, 2)?;
                let init = args.swap_remove(1);
                let f = args.swap_remove(0);
                self.fold_step(prog, f, items, 0, init)
            }
            _ => Ok(Control::Return(builtins::apply(b, &args, self.budget)?)),
        }
    }

    fn map_step(
        &mut self,
        prog: &Program,
        f: Value,
        items: Arc<[Value]>,
        next: usize,
        acc: Vec<Value>,
    ) -> Result<Control, EvalError> {
        let Some(item) = items.get(next).cloned() else {
            return Ok(Control::Return(Value::List(acc.into())));
        };
        self.budget.charge(1)?;
        self.stack.push(Kont::Map { f: f.clone(), items, next: next + 1, acc });
        self.apply(prog, f, item)
    }

    fn filter_step(
        &mut self,
        prog: &Program,
        f: Value,
        items: Arc<[Value]>,
        next: usize,
        acc: Vec<Value>,
    ) -> Result<Control, EvalError> {
        let Some(item) = items.get(next).cloned() else {
            return Ok(Control::Return(Value::List(acc.into())));
        };
        self.budget.charge(1)?;
        self.stack.push(Kont::Filter { f: f.clone(), items, next: next + 1, acc });
        self.apply(prog, f, item)
    }

    fn fold_step(
        &mut self,
        prog: &Program,
        f: Value,
        items: Arc<[Value]>,
        next: usize,
        acc: Value,
    ) -> Result<Control, EvalError> {
        let Some(item) = items.get(next).cloned() else {
            return Ok(Control::Return(acc));
        };
        self.budget.charge(1)?;
        self.stack.push(Kont::Fold { f: f.clone(), items, next: next + 1 });
        self.stack.push(Kont::ApplyTo(item));
        self.apply(prog, f, acc)
    }
}

fn partial(builtin: Builtin, applied: Vec<Value>) -> Value {
    Value::Builtin(Arc::new(Partial { builtin, applied }))
}
