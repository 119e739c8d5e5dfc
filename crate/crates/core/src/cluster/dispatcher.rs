use std::io;
use std::sync::{Arc, Mutex as StdMutex, Weak};
use std::time::Duration;

use tokio::net::TcpListener;
use tokio::sync::{mpsc, watch, Mutex};

use crate::eval::Fuel;
use crate::expr::Expr;
use crate::wire::{ErrorCode, Message};

use super::conn::{Connection, Reply};
use super::pool::{PoolState, WorkerId};
use super::server::{error, serve_connection, EvalHandler};
use super::worker::WorkerConfig;
use super::{TransportError, DEFAULT_REQUEST_TIMEOUT, DEFAULT_RETRY_LIMIT, HANDSHAKE_TIMEOUT, PROBE_INTERVAL};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DispatcherConfig {
    pub workers: Vec<String>,
    /// Extra attempts after a transport failure.
    pub retry_limit: u32,
    pub request_timeout: Duration,
    pub handshake_timeout: Duration,
    pub probe_interval: Duration,
    /// Evaluations each worker runs at once; sizes client batch windows.
    pub worker_concurrency: usize,
}

impl DispatcherConfig {
    pub fn new<S: Into<String>>(workers: impl IntoIterator<Item = S>) -> Self {
        DispatcherConfig {
            workers: workers.into_iter().map(Into::into).collect(),
            retry_limit: DEFAULT_RETRY_LIMIT,
            request_timeout: DEFAULT_REQUEST_TIMEOUT,
            handshake_timeout: HANDSHAKE_TIMEOUT,
            probe_interval: PROBE_INTERVAL,
            worker_concurrency: WorkerConfig::DEFAULT_CONCURRENCY,
        }
    }
}

/// Owns the worker pool: schedules each request round-robin over healthy
/// workers, retries transport failures elsewhere, and probes unhealthy
/// workers in the background.
pub struct Dispatcher {
    cfg: DispatcherConfig,
    pool: StdMutex<PoolState>,
    conns: Vec<Mutex<Option<Arc<Connection>>>>,
}

impl Dispatcher {
    /// Must be called inside a tokio runtime; starts the health probe.
    pub fn new(cfg: DispatcherConfig) -> Arc<Dispatcher> {
        let pool = PoolState::new(cfg.workers.iter().cloned());
        let conns = cfg.workers.iter().map(|_| Mutex::new(None)).collect();
        let d = Arc::new(Dispatcher { cfg, pool: StdMutex::new(pool), conns });
        tokio::spawn(probe_loop(Arc::downgrade(&d), d.cfg.probe_interval));
        d
    }

    pub fn config(&self) -> &DispatcherConfig {
        &self.cfg
    }

    /// A copy of the current pool state.
    pub fn pool(&self) -> PoolState {
        self.pool.lock().unwrap().clone()
    }

    pub fn healthy_count(&self) -> usize {
        self.pool.lock().unwrap().healthy_count()
    }

    /// Evaluates on some worker. Replies, including evaluation failures,
    /// are returned as-is; only transport failures are retried.
    pub async fn eval(&self, expr: &Expr, fuel: Option<Fuel>) -> Result<Reply, TransportError> {
        let mut last = TransportError::NoHealthyWorkers;
        for attempt in 0..=self.cfg.retry_limit {
            let w = self.pool.lock().unwrap().schedule()?;
            self.pool.lock().unwrap().begin(w);
            let outcome = self.try_worker(w, expr, fuel).await;
            self.pool.lock().unwrap().end(w);
            match outcome {
                Ok(Reply::Failed { code: ErrorCode::Overloaded, detail }) => {
                    tracing::debug!(worker = w, attempt, "worker overloaded");
                    last = TransportError::Overloaded(detail);
                }
                Ok(reply) => return Ok(reply),
                Err(e) => {
                    tracing::warn!(worker = w, attempt, %e, "marking worker unhealthy");
                    self.mark_unhealthy(w).await;
                    last = e;
                }
            }
        }
        Err(last)
    }

    async fn try_worker(&self, w: WorkerId, expr: &Expr, fuel: Option<Fuel>) -> Result<Reply, TransportError> {
        let conn = self.connection(w).await?;
        conn.eval(expr, fuel, self.cfg.request_timeout).await
    }

    async fn connection(&self, w: WorkerId) -> Result<Arc<Connection>, TransportError> {
        let mut slot = self.conns[w].lock().await;
        if let Some(c) = slot.as_ref().filter(|c| !c.is_closed()) {
            return Ok(c.clone());
        }
        let c = Arc::new(Connection::connect(&self.cfg.workers[w], self.cfg.handshake_timeout).await?);
        *slot = Some(c.clone());
        Ok(c)
    }

    async fn mark_unhealthy(&self, w: WorkerId) {
        self.pool.lock().unwrap().set_healthy(w, false);
        self.conns[w].lock().await.take();
    }

    /// Reconnects to and pings every unhealthy worker once.
    pub async fn probe(&self) {
        let down = self.pool.lock().unwrap().unhealthy();
        for w in down {
            let addr = &self.cfg.workers[w];
            let alive = match Connection::connect(addr, self.cfg.handshake_timeout).await {
                Ok(c) => match c.ping(self.cfg.handshake_timeout).await {
                    Ok(()) => Some(c),
                    Err(_) => None,
                },
                Err(_) => None,
            };
            if let Some(c) = alive {
                tracing::info!(worker = w, %addr, "worker healthy again");
                *self.conns[w].lock().await = Some(Arc::new(c));
                self.pool.lock().unwrap().set_healthy(w, true);
            }
        }
    }

    /// Serves clients on `listener` forever.
    pub async fn serve(self: Arc<Self>, listener: TcpListener) -> io::Result<()> {
        let (_keep, rx) = watch::channel(false);
        let handler = Arc::new(ClientHandler(self));
        loop {
            let (stream, _) = listener.accept().await?;
            tokio::spawn(serve_connection(stream, handler.clone(), rx.clone()));
        }
    }
}

async fn probe_loop(d: Weak<Dispatcher>, every: Duration) {
    let mut tick = tokio::time::interval(every);
    tick.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
    tick.tick().await;
    loop {
        tick.tick().await;
        match d.upgrade() {
            Some(d) => d.probe().await,
            None => return,
        }
    }
}

struct ClientHandler(Arc<Dispatcher>);

impl EvalHandler for ClientHandler {
    fn on_eval(self: &Arc<Self>, id: u64, expr: Expr, fuel: Option<Fuel>, reply: mpsc::Sender<Message>) {
        let d = self.0.clone();
        tokio::spawn(async move {
            let answer = match d.eval(&expr, fuel).await {
                Ok(Reply::Value(value)) => Message::Result { id, value },
                Ok(Reply::Failed { code, detail }) => error(id, code, detail),
                Err(TransportError::Overloaded(detail)) => error(id, ErrorCode::Overloaded, detail),
                Err(e) => error(id, ErrorCode::Unavailable, e.to_string()),
            };
            let _ = reply.send(answer).await;
        });
    }
}
