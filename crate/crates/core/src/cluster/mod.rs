//! Remote evaluation runtime: worker servers, a dispatcher that owns a
//! worker pool, and the [`RExecutor`] client handle.
//!
//! Every hop speaks the framed protocol from [`crate::wire`]. A client
//! talks either to a dispatcher process or to an in-process dispatcher;
//! both schedule with the same [`PoolState`].

mod conn;
mod dispatcher;
mod executor;
mod pool;
mod server;
mod worker;

use std::time::Duration;

use thiserror::Error;

use crate::eval::EvalError;

pub use conn::{Connection, Reply};
pub use dispatcher::{Dispatcher, DispatcherConfig};
pub use executor::{Backend, RExecutor};
pub use pool::{NoHealthyWorkers, PoolState, WorkerId, WorkerSlot};
pub use worker::{Worker, WorkerConfig, WorkerHandle};

pub const DEFAULT_REQUEST_TIMEOUT: Duration = Duration::from_secs(30);
pub const HANDSHAKE_TIMEOUT: Duration = Duration::from_secs(5);
pub const PROBE_INTERVAL: Duration = Duration::from_secs(2);
pub const DEFAULT_RETRY_LIMIT: u32 = 2;

/// Failures of the transport rather than of the evaluated program.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransportError {
    #[error("cannot connect to {addr}: {reason}")]
    Connect { addr: String, reason: String },
    #[error("i/o error talking to {addr}: {reason}")]
    Io { addr: String, reason: String },
    #[error("request to {0} timed out")]
    Timeout(String),
    #[error("connection to {0} closed")]
    Closed(String),
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("no healthy workers")]
    NoHealthyWorkers,
    #[error("overloaded: {0}")]
    Overloaded(String),
    #[error("unavailable: {0}")]
    Unavailable(String),
}

impl From<NoHealthyWorkers> for TransportError {
    fn from(_: NoHealthyWorkers) -> Self {
        TransportError::NoHealthyWorkers
    }
}

/// Outcome of a failed remote evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExecError {
    /// The program itself failed. Deterministic; never retried.
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

impl ExecError {
    pub fn is_transport(&self) -> bool {
        matches!(self, ExecError::Transport(_))
    }
}
