//! Distributed evaluation of quotations: programs in a small pure
//! functional language travel as canonical text to worker processes and
//! come back as literal values.
//!
//! * [`expr`]: the AST, its canonical s-expression text, free variables,
//!   substitution and lifting of host values.
//! * [`eval`]: the fuel-limited evaluator and builtin library.
//! * [`wire`]: length-prefixed message frames.
//! * [`cluster`]: the worker server and the round-robin dispatcher.
//!   [`RExecutor`] is the client handle.
//! * [`sweep`]: parametric sweeps over the pool. The Mandelbrot renderer
//!   and the speedup benchmark are built on them.
//! * [`jsgen`]: translation to ECMAScript with RPC stubs.
//! * [`forms`]: HTML combinators and formlets.

pub mod cluster;
pub mod eval;
pub mod expr;
pub mod forms;
pub mod jsgen;
pub mod sweep;
pub mod wire;

pub use cluster::{ExecError, RExecutor, TransportError};
pub use eval::{evaluate, value_to_expr, EvalError, EvalErrorCode, Fuel, Value};
pub use expr::{free_vars, lift, parse_expr, print_expr, substitute, Expr, Ident, Lift, ParseError};
pub use wire::{decode_message, encode_message, Message, WireError};
