use std::fmt;
use std::sync::Arc;

use crate::expr::{Expr, FiniteF64, Ident, Lift, UnliftableValue};

use super::builtins::Builtin;
use super::compile::{NodeId, Program};
use super::{EvalError, EvalErrorCode};

/// Result of evaluation.
#[derive(Clone)]
pub enum Value {
    Int(i64),
    Float(f64),
    Bool(bool),
    Str(Arc<str>),
    Unit,
    List(Arc<[Value]>),
    Closure(Arc<Closure>),
    /// A builtin with fewer arguments than its arity.
    Builtin(Arc<Partial>),
}

pub struct Closure {
    pub(crate) program: Arc<Program>,
    pub(crate) lam: NodeId,
    pub(crate) env: Env,
}

impl Closure {
    pub fn param(&self) -> &Ident {
        self.program.lam_param(self.lam)
    }
}

pub struct Partial {
    pub(crate) builtin: Builtin,
    pub(crate) applied: Vec<Value>,
}

impl Partial {
    pub fn name(&self) -> &'static str {
        self.builtin.name()
    }

    pub fn applied(&self) -> &[Value] {
        &self.applied
    }
}

/// Immutable chain of bindings, innermost first.
pub(crate) type Env = Option<Arc<EnvFrame>>;

pub(crate) enum EnvFrame {
    Bind(Value, Env),
    /// A letrec binding: looking it up yields a closure over this frame.
    Rec(NodeId, Env),
}

impl Value {
    pub fn list(items: impl IntoIterator<Item = Value>) -> Value {
        Value::List(items.into_iter().collect())
    }

    pub fn str(s: &str) -> Value {
        Value::Str(Arc::from(s))
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Value::Int(_) => "int",
            Value::Float(_) => "float",
            Value::Bool(_) => "bool",
            Value::Str(_) => "str",
            Value::Unit => "unit",
            Value::List(_) => "list",
            Value::Closure(_) => "closure",
            Value::Builtin(_) => "builtin",
        }
    }

    /// Reads a literal expression back into a value. `None` for anything
    /// that is not a literal form.
    pub fn from_literal(e: &Expr) -> Option<Value> {
        Some(match e {
            Expr::LitInt(i) => Value::Int(*i),
            Expr::LitFloat(f) => Value::Float(f.get()),
            Expr::LitBool(b) => Value::Bool(*b),
            Expr::LitStr(s) => Value::str(s),
            Expr::LitUnit => Value::Unit,
            Expr::ListLit(items) => {
                Value::List(items.iter().map(Value::from_literal).collect::<Option<_>>()?)
            }
            _ => return None,
        })
    }
}

/// Converts scalar and list values back to literal expressions. Functions
/// and non-finite floats have no literal form.
pub fn value_to_expr(v: &Value) -> Result<Expr, EvalError> {
    Ok(match v {
        Value::Int(i) => Expr::LitInt(*i),
        Value::Float(f) => Expr::LitFloat(FiniteF64::new(*f).map_err(|_| {
            EvalError::new(EvalErrorCode::UnliftableResult, format!("non-finite float {f}"))
        })?),
        Value::Bool(b) => Expr::LitBool(*b),
        Value::Str(s) => Expr::LitStr(s.to_string()),
        Value::Unit => Expr::LitUnit,
        Value::List(items) => {
            Expr::ListLit(items.iter().map(value_to_expr).collect::<Result<_, _>>()?)
        }
        Value::Closure(_) | Value::Builtin(_) => {
            return Err(EvalError::new(
                EvalErrorCode::UnliftableResult,
                format!("a {} has no literal form", v.kind()),
            ))
        }
    })
}

impl Lift for Value {
    fn lift(&self) -> Result<Expr, UnliftableValue> {
        value_to_expr(self).map_err(|e| UnliftableValue(e.detail))
    }
}

/// Bitwise on floats; functions compare by identity.
impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            (Value::Bool(a), Value::Bool(b)) => a == b,
            (Value::Str(a), Value::Str(b)) => a == b,
            (Value::Unit, Value::Unit) => true,
            (Value::List(a), Value::List(b)) => a == b,
            (Value::Closure(a), Value::Closure(b)) => Arc::ptr_eq(a, b),
            (Value::Builtin(a), Value::Builtin(b)) => Arc::ptr_eq(a, b),
            _ => false,
        }
    }
}

impl fmt::Debug for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(i) => write!(f, "Int({i})"),
            Value::Float(x) => write!(f, "Float({x:?})"),
            Value::Bool(b) => write!(f, "Bool({b})"),
            Value::Str(s) => write!(f, "Str({s:?})"),
            Value::Unit => f.write_str("Unit"),
            Value::List(items) => f.debug_list().entries(items.iter()).finish(),
            Value::Closure(c) => write!(f, "Closure(lam {})", c.param()),
            Value::Builtin(p) => write!(f, "Builtin({}/{})", p.name(), p.applied.len()),
        }
    }
}

/// Canonical literal text where one exists, `<closure ...>` otherwise.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match value_to_expr(self) {
            Ok(e) => write!(f, "{e}"),
            Err(_) => write!(f, "<{}>", self.kind()),
        }
    }
}
