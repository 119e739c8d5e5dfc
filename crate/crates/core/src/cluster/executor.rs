use std::sync::Arc;
use std::time::Duration;

use futures::stream::{self, StreamExt};
use tokio::sync::Mutex;

use crate::eval::{evaluate, EvalError, Fuel, Value};
use crate::expr::Expr;
use crate::wire::ErrorCode;

use super::conn::{Connection, Reply};
use super::dispatcher::{Dispatcher, DispatcherConfig};
use super::{ExecError, TransportError, DEFAULT_REQUEST_TIMEOUT, DEFAULT_RETRY_LIMIT, HANDSHAKE_TIMEOUT};

/// Where an [`RExecutor`] sends its work.
pub enum Backend {
    /// Evaluate in this process on the blocking thread pool.
    Local,
    /// An in-process dispatcher talking to workers directly.
    Embedded(Arc<Dispatcher>),
    /// A dispatcher process reached over one multiplexed connection.
    Remote { addr: String, conn: Mutex<Option<Arc<Connection>>> },
}

/// Client handle for remote evaluation. Safe to share between tasks.
pub struct RExecutor {
    backend: Backend,
    fuel: Option<Fuel>,
    retry_limit: u32,
    timeout: Duration,
    window: Option<usize>,
}

impl RExecutor {
    pub const DEFAULT_REMOTE_WINDOW: usize = 16;

    fn with_backend(backend: Backend) -> Self {
        RExecutor {
            backend,
            fuel: None,
            retry_limit: DEFAULT_RETRY_LIMIT,
            timeout: DEFAULT_REQUEST_TIMEOUT,
            window: None,
        }
    }

    pub fn local() -> Self {
        Self::with_backend(Backend::Local)
    }

    /// Talks to a dispatcher process at `addr`. Connects lazily.
    pub fn remote(addr: impl Into<String>) -> Self {
        Self::with_backend(Backend::Remote { addr: addr.into(), conn: Mutex::new(None) })
    }

    /// Runs a dispatcher in this process. Must be called inside a tokio
    /// runtime.
    pub fn embedded(cfg: DispatcherConfig) -> Self {
        let retry_limit = cfg.retry_limit;
        let timeout = cfg.request_timeout;
        RExecutor { retry_limit, timeout, ..Self::with_backend(Backend::Embedded(Dispatcher::new(cfg))) }
    }

    /// Budget sent with every request instead of the worker default.
    pub fn with_fuel(mut self, fuel: Fuel) -> Self {
        self.fuel = Some(fuel);
        self
    }

    /// Only meaningful for the remote backend; an embedded dispatcher
    /// retries according to its own configuration.
    pub fn with_retry_limit(mut self, retries: u32) -> Self {
        self.retry_limit = retries;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.timeout = timeout;
        self
    }

    /// Overrides how many batch requests are kept in flight.
    pub fn with_window(mut self, window: usize) -> Self {
        self.window = Some(window.max(1));
        self
    }

    pub fn backend(&self) -> &Backend {
        &self.backend
    }

    pub fn fuel(&self) -> Option<Fuel> {
        self.fuel
    }

    /// Requests kept in flight by [`RExecutor::eval_batch`].
    pub fn window(&self) -> usize {
        if let Some(w) = self.window {
            return w;
        }
        match &self.backend {
            Backend::Local => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Backend::Embedded(d) => (d.healthy_count() * d.config().worker_concurrency).max(1),
            Backend::Remote { .. } => Self::DEFAULT_REMOTE_WINDOW,
        }
    }

    /// Evaluates one expression.
    pub async fn eval(&self, expr: &Expr) -> Result<Value, ExecError> {
        self.eval_with(expr, self.fuel).await
    }

    /// Evaluates with an explicit budget for this request only.
    pub async fn eval_with(&self, expr: &Expr, fuel: Option<Fuel>) -> Result<Value, ExecError> {
        match &self.backend {
            Backend::Local => {
                let e = expr.clone();
                let fuel = fuel.unwrap_or_default();
                tokio::task::spawn_blocking(move || evaluate(&e, fuel))
                    .await
                    .map_err(|j| TransportError::Unavailable(format!("local evaluator failed: {j}")))?
                    .map_err(ExecError::Eval)
            }
            Backend::Embedded(d) => decode_reply(d.eval(expr, fuel).await?),
            Backend::Remote { addr, conn } => self.eval_remote(addr, conn, expr, fuel).await,
        }
    }

    async fn eval_remote(
        &self,
        addr: &str,
        slot: &Mutex<Option<Arc<Connection>>>,
        expr: &Expr,
        fuel: Option<Fuel>,
    ) -> Result<Value, ExecError> {
        let mut last = TransportError::Unavailable(addr.to_string());
        for _ in 0..=self.retry_limit {
            let conn = {
                let mut slot = slot.lock().await;
                match slot.as_ref().filter(|c| !c.is_closed()) {
                    Some(c) => c.clone(),
                    None => match Connection::connect(addr, HANDSHAKE_TIMEOUT).await {
                        Ok(c) => slot.insert(Arc::new(c)).clone(),
                        Err(e) => {
                            last = e;
                            continue;
                        }
                    },
                }
            };
            match conn.eval(expr, fuel, self.timeout).await {
                Ok(reply) => return decode_reply(reply),
                Err(e) => {
                    slot.lock().await.take_if(|c| Arc::ptr_eq(c, &conn));
                    last = e;
                }
            }
        }
        Err(last.into())
    }

    /// Evaluates every expression with at most [`RExecutor::window`]
    /// requests in flight. Result `i` belongs to `exprs[i]`; a failed item
    /// does not stop the others.
    pub async fn eval_batch(&self, exprs: &[Expr]) -> Vec<Result<Value, ExecError>> {
        stream::iter(0..exprs.len())
            .map(|i| self.eval(&exprs[i]))
            .buffered(self.window())
            .collect()
            .await
    }
}

fn decode_reply(reply: Reply) -> Result<Value, ExecError> {
    match reply {
        Reply::Value(e) => Value::from_literal(&e)
            .ok_or_else(|| TransportError::Protocol(format!("result is not a literal: {e}")).into()),
        Reply::Failed { code: ErrorCode::Eval(code), detail } => Err(EvalError { code, detail }.into()),
        Reply::Failed { code: ErrorCode::Overloaded, detail } => Err(TransportError::Overloaded(detail).into()),
        Reply::Failed { code: ErrorCode::Unavailable, detail } => Err(TransportError::Unavailable(detail).into()),
        Reply::Failed { code, detail } => Err(TransportError::Protocol(format!("{code}: {detail}")).into()),
    }
}
