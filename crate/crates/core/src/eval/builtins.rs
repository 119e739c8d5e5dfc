use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::sync::Arc;

use super::value::Value;
use super::{Budget, EvalError, EvalErrorCode};

macro_rules! builtins {
    ($($variant:ident = $name:literal / $arity:literal : $doc:literal,)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub(crate) enum Builtin { $($variant,)* }

        impl Builtin {
            pub const ALL: &'static [Builtin] = &[$(Builtin::$variant,)*];

            pub fn name(self) -> &'static str {
                match self { $(Builtin::$variant => $name,)* }
            }

            pub fn arity(self) -> usize {
                match self { $(Builtin::$variant => $arity,)* }
            }

            pub fn summary(self) -> &'static str {
                match self { $(Builtin::$variant => $doc,)* }
            }

            pub fn from_name(name: &str) -> Option<Builtin> {
                match name { $($name => Some(Builtin::$variant),)* _ => None }
            }
        }
    };
}

builtins! {
    Add = "add" / 2 : "int+int or float+float",
    Sub = "sub" / 2 : "int-int or float-float",
    Mul = "mul" / 2 : "int*int or float*float",
    Div = "div" / 2 : "truncating int division (div-zero on 0) or IEEE float division",
    Mod = "mod" / 2 : "int remainder with the dividend's sign (div-zero on 0) or float remainder",
    Neg = "neg" / 1 : "negation of an int or float",
    Lt = "lt" / 2 : "less-than on int, float, bool or str",
    Le = "le" / 2 : "less-or-equal on int, float, bool or str",
    Gt = "gt" / 2 : "greater-than on int, float, bool or str",
    Ge = "ge" / 2 : "greater-or-equal on int, float, bool or str",
    Eq = "eq" / 2 : "equality on scalars of one type, structural on lists",
    Ne = "ne" / 2 : "negated eq",
    And = "and" / 2 : "strict boolean and",
    Or = "or" / 2 : "strict boolean or",
    Not = "not" / 1 : "boolean negation",
    ToFloat = "toFloat" / 1 : "int to float",
    ToInt = "toInt" / 1 : "float to int, truncating toward zero",
    Sqrt = "sqrt" / 1 : "float square root",
    Abs = "abs" / 1 : "float absolute value",
    Min = "min" / 2 : "float minimum",
    Max = "max" / 2 : "float maximum",
    Cons = "cons" / 2 : "prepend an item to a list",
    Head = "head" / 1 : "first item (empty-list on nil)",
    Tail = "tail" / 1 : "all but the first item (empty-list on nil)",
    IsEmpty = "isEmpty" / 1 : "true for the empty list",
    Length = "length" / 1 : "number of items",
    Append = "append" / 2 : "concatenate two lists",
    Map = "map" / 2 : "apply a function to every item",
    Filter = "filter" / 2 : "keep items for which the predicate is true",
    Foldl = "foldl" / 3 : "left fold: foldl f acc list applies (f acc) item",
    Sum = "sum" / 1 : "sum of an int list or float list; empty sums to int 0",
    Range = "range" / 2 : "range lo hi: ints lo..hi inclusive, empty if lo > hi",
}

/// Arity and a one-line description of a builtin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuiltinSpec {
    pub arity: usize,
    pub summary: &'static str,
}

/// The fixed builtin library, keyed by name.
pub fn builtin_table() -> BTreeMap<&'static str, BuiltinSpec> {
    Builtin::ALL
        .iter()
        .map(|b| (b.name(), BuiltinSpec { arity: b.arity(), summary: b.summary() }))
        .collect()
}

fn type_error(b: Builtin, args: &[Value]) -> EvalError {
    let kinds: Vec<_> = args.iter().map(Value::kind).collect();
    EvalError::new(
        EvalErrorCode::TypeError,
        format!("{} does not accept ({})", b.name(), kinds.join(", ")),
    )
}

fn list_arg<'a>(b: Builtin, args: &'a [Value], i: usize) -> Result<&'a Arc<[Value]>, EvalError> {
    match &args[i] {
        Value::List(items) => Ok(items),
        _ => Err(type_error(b, args)),
    }
}

/// Applies a saturated first-order builtin. `map`, `filter` and `foldl`
/// call back into the machine and are handled there.
pub(crate) fn apply(b: Builtin, args: &[Value], budget: &mut Budget) -> Result<Value, EvalError> {
    debug_assert_eq!(args.len(), b.arity());
    use Builtin::*;
    use Value::{Bool, Float, Int, List};
    let v = match b {
        Add | Sub | Mul | Div | Mod => match (&args[0], &args[1]) {
            (Int(x), Int(y)) => Int(int_arith(b, *x, *y)?),
            (Float(x), Float(y)) => Float(match b {
                Add => x + y,
                Sub => x - y,
                Mul => x * y,
                Div => x / y,
                _ => x % y,
            }),
            _ => return Err(type_error(b, args)),
        },
        Neg => match &args[0] {
            Int(x) => Int(x.wrapping_neg()),
            Float(x) => Float(-x),
            _ => return Err(type_error(b, args)),
        },
        Lt | Le | Gt | Ge => {
            let ord = compare(&args[0], &args[1]).ok_or_else(|| type_error(b, args))?;
            Bool(match b {
                Lt => ord == Some(Ordering::Less),
                Le => matches!(ord, Some(Ordering::Less | Ordering::Equal)),
                Gt => ord == Some(Ordering::Greater),
                _ => matches!(ord, Some(Ordering::Greater | Ordering::Equal)),
            })
        }
        Eq | Ne => {
            let eq = structural_eq(&args[0], &args[1], budget)?
                .ok_or_else(|| type_error(b, args))?;
            Bool(if b == Eq { eq } else { !eq })
        }
        And | Or => match (&args[0], &args[1]) {
            (Bool(x), Bool(y)) => Bool(if b == And { *x && *y } else { *x || *y }),
            _ => return Err(type_error(b, args)),
        },
        Not => match &args[0] {
            Bool(x) => Bool(!x),
            _ => return Err(type_error(b, args)),
        },
        ToFloat => match &args[0] {
            Int(x) => Float(*x as f64),
            _ => return Err(type_error(b, args)),
        },
        ToInt => match &args[0] {
            // 2^63 is exactly representable; anything at or above it overflows.
            Float(x) if x.is_finite() && x.trunc() >= -9.223_372_036_854_775_808e18
                && x.trunc() < 9.223_372_036_854_775_808e18 =>
            {
                Int(x.trunc() as i64)
            }
            Float(x) => {
                return Err(EvalError::new(
                    EvalErrorCode::TypeError,
                    format!("toInt: {x} is outside the int range"),
                ))
            }
            _ => return Err(type_error(b, args)),
        },
        Sqrt | Abs => match &args[0] {
            Float(x) => Float(if b == Sqrt { x.sqrt() } else { x.abs() }),
            _ => return Err(type_error(b, args)),
        },
        Min | Max => match (&args[0], &args[1]) {
            (Float(x), Float(y)) => Float(if b == Min { x.min(*y) } else { x.max(*y) }),
            _ => return Err(type_error(b, args)),
        },
        Cons => {
            let tail = list_arg(b, args, 1)?;
            budget.charge(tail.len() as u64 + 1)?;
            let mut items = Vec::with_capacity(tail.len() + 1);
            items.push(args[0].clone());
            items.extend(tail.iter().cloned());
            List(items.into())
        }
        Head | Tail => {
            let items = list_arg(b, args, 0)?;
            if items.is_empty() {
                return Err(EvalError::new(
                    EvalErrorCode::EmptyList,
                    format!("{} of an empty list", b.name()),
                ));
            }
            if b == Head {
                items[0].clone()
            } else {
                budget.charge(items.len() as u64 - 1)?;
                List(items[1..].into())
            }
        }
        IsEmpty => Bool(list_arg(b, args, 0)?.is_empty()),
        Length => Int(list_arg(b, args, 0)?.len() as i64),
        Append => {
            let (x, y) = (list_arg(b, args, 0)?, list_arg(b, args, 1)?);
            budget.charge((x.len() + y.len()) as u64)?;
            List(x.iter().chain(y.iter()).cloned().collect())
        }
        Sum => {
            let items = list_arg(b, args, 0)?;
            budget.charge(items.len() as u64)?;
            match items.first() {
                None => Int(0),
                Some(Int(_)) => {
                    let mut acc = 0i64;
                    for item in items.iter() {
                        match item {
                            Int(x) => acc = acc.wrapping_add(*x),
                            _ => return Err(type_error(b, args)),
                        }
                    }
                    Int(acc)
                }
                Some(Float(_)) => {
                    let mut acc = 0.0f64;
                    for item in items.iter() {
                        match item {
                            Float(x) => acc += x,
                            _ => return Err(type_error(b, args)),
                        }
                    }
                    Float(acc)
                }
                Some(_) => return Err(type_error(b, args)),
            }
        }
        Range => match (&args[0], &args[1]) {
            (Int(lo), Int(hi)) => {
                let count = (i128::from(*hi) - i128::from(*lo) + 1).max(0);
                budget.charge(u64::try_from(count).unwrap_or(u64::MAX))?;
                List((*lo..=*hi).map(Int).collect())
            }
            _ => return Err(type_error(b, args)),
        },
        Map | Filter | Foldl => unreachable!("higher-order builtins run on the machine"),
    };
    Ok(v)
}

fn int_arith(b: Builtin, x: i64, y: i64) -> Result<i64, EvalError> {
    Ok(match b {
        Builtin::Add => x.wrapping_add(y),
        Builtin::Sub => x.wrapping_sub(y),
        Builtin::Mul => x.wrapping_mul(y),
        Builtin::Div | Builtin::Mod if y == 0 => {
            return Err(EvalError::new(EvalErrorCode::DivZero, "integer division by zero"))
        }
        Builtin::Div => x.wrapping_div(y),
        _ => x.wrapping_rem(y),
    })
}

/// `None` when the operands are not comparable; `Some(None)` for unordered
/// floats.
fn compare(a: &Value, b: &Value) -> Option<Option<Ordering>> {
    match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(Some(x.cmp(y))),
        (Value::Float(x), Value::Float(y)) => Some(x.partial_cmp(y)),
        (Value::Bool(x), Value::Bool(y)) => Some(Some(x.cmp(y))),
        (Value::Str(x), Value::Str(y)) => Some(Some(x.cmp(y))),
        _ => None,
    }
}

/// `Ok(None)` signals a type error: mismatched kinds or functions.
fn structural_eq(a: &Value, b: &Value, budget: &mut Budget) -> Result<Option<bool>, EvalError> {
    Ok(match (a, b) {
        (Value::Int(x), Value::Int(y)) => Some(x == y),
        (Value::Float(x), Value::Float(y)) => Some(x == y),
        (Value::Bool(x), Value::Bool(y)) => Some(x == y),
        (Value::Str(x), Value::Str(y)) => Some(x == y),
        (Value::Unit, Value::Unit) => Some(true),
        (Value::List(xs), Value::List(ys)) => {
            if xs.len() != ys.len() {
                return Ok(Some(false));
            }
            for (x, y) in xs.iter().zip(ys.iter()) {
                budget.charge(1)?;
                match structural_eq(x, y, budget)? {
                    Some(true) => {}
                    other => return Ok(other),
                }
            }
            Some(true)
        }
        _ => None,
    })
}
