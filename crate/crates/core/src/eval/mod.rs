//! Deterministic, fuel-limited, call-by-value evaluation.
//!
//! Every AST node visited costs one unit of fuel. List builtins additionally
//! cost one unit per element they allocate or traverse, so no single step
//! can do unbounded work.

mod builtins;
mod compile;
mod machine;
mod value;

use std::fmt;
use std::num::NonZeroU64;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::expr::Expr;

pub use builtins::{builtin_table, BuiltinSpec};
pub use value::{value_to_expr, Closure, Partial, Value};

/// Step budget for one evaluation. Always positive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Fuel(NonZeroU64);

impl Fuel {
    pub const DEFAULT: Fuel = Fuel(NonZeroU64::new(10_000_000).unwrap());

    pub fn new(steps: u64) -> Option<Fuel> {
        NonZeroU64::new(steps).map(Fuel)
    }

    pub fn get(self) -> u64 {
        self.0.get()
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::DEFAULT
    }
}

/// Remaining fuel during one evaluation.
pub(crate) struct Budget {
    remaining: u64,
}

impl Budget {
    pub fn new(steps: u64) -> Budget {
        Budget { remaining: steps }
    }

    #[inline]
    pub fn charge(&mut self, n: u64) -> Result<(), EvalError> {
        match self.remaining.checked_sub(n) {
            Some(left) => {
                self.remaining = left;
                Ok(())
            }
            None => {
                self.remaining = 0;
                Err(EvalError::new(EvalErrorCode::FuelExhausted, "evaluation step budget exhausted"))
            }
        }
    }
}

/// The closed set of evaluation failure codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EvalErrorCode {
    UnboundVar,
    TypeError,
    DivZero,
    FuelExhausted,
    ArityError,
    EmptyList,
    UnliftableResult,
}

impl EvalErrorCode {
    pub const ALL: [EvalErrorCode; 7] = [
        EvalErrorCode::UnboundVar,
        EvalErrorCode::TypeError,
        EvalErrorCode::DivZero,
        EvalErrorCode::FuelExhausted,
        EvalErrorCode::ArityError,
        EvalErrorCode::EmptyList,
        EvalErrorCode::UnliftableResult,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EvalErrorCode::UnboundVar => "unbound-var",
            EvalErrorCode::TypeError => "type-error",
            EvalErrorCode::DivZero => "div-zero",
            EvalErrorCode::FuelExhausted => "fuel-exhausted",
            EvalErrorCode::ArityError => "arity-error",
            EvalErrorCode::EmptyList => "empty-list",
            EvalErrorCode::UnliftableResult => "unliftable-result",
        }
    }
}

impl fmt::Display for EvalErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EvalErrorCode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        EvalErrorCode::ALL.into_iter().find(|c| c.as_str() == s).ok_or(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{code}: {detail}")]
pub struct EvalError {
    pub code: EvalErrorCode,
    /// Human-readable; not part of any contract.
    pub detail: String,
}

impl EvalError {
    pub fn new(code: EvalErrorCode, detail: impl Into<String>) -> Self {
        EvalError { code, detail: detail.into() }
    }
}

/// Evaluates `e` with the builtins as the outermost scope.
pub fn evaluate(e: &Expr, fuel: Fuel) -> Result<Value, EvalError> {
    let program = Arc::new(compile::Program::compile(e));
    let mut budget = Budget::new(fuel.get());
    machine::run(program, &mut budget)
}

/// Evaluates and converts the result to a literal expression, as a worker
/// does before replying.
pub fn evaluate_to_literal(e: &Expr, fuel: Fuel) -> Result<Expr, EvalError> {
    evaluate(e, fuel).and_then(|v| value_to_expr(&v))
}
