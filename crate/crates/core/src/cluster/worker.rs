use std::io;
use std::net::SocketAddr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use tokio::net::TcpListener;
use tokio::sync::{mpsc, watch, Semaphore};
use tokio::task::JoinHandle;

use crate::eval::{evaluate_to_literal, Fuel};
use crate::expr::Expr;
use crate::wire::{ErrorCode, Message};

use super::server::{error, serve_connection, EvalHandler};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkerConfig {
    pub listen: String,
    /// Budget for requests that do not name their own.
    pub fuel: Fuel,
    pub max_concurrent: usize,
    /// Evaluations accepted but not yet answered, across all connections.
    pub max_queued: usize,
}

impl WorkerConfig {
    pub const DEFAULT_CONCURRENCY: usize = 4;
    pub const DEFAULT_MAX_QUEUED: usize = 128;

    pub fn new(listen: impl Into<String>) -> Self {
        WorkerConfig {
            listen: listen.into(),
            fuel: Fuel::DEFAULT,
            max_concurrent: Self::DEFAULT_CONCURRENCY,
            max_queued: Self::DEFAULT_MAX_QUEUED,
        }
    }
}

struct Evaluator {
    fuel: Fuel,
    max_queued: usize,
    outstanding: AtomicUsize,
    slots: Arc<Semaphore>,
}

impl EvalHandler for Evaluator {
    fn on_eval(self: &Arc<Self>, id: u64, expr: Expr, fuel: Option<Fuel>, reply: mpsc::Sender<Message>) {
        let admitted = self
            .outstanding
            .fetch_update(Ordering::AcqRel, Ordering::Acquire, |n| (n < self.max_queued).then_some(n + 1))
            .is_ok();
        if !admitted {
            let detail = format!("more than {} evaluations queued", self.max_queued);
            tokio::spawn(async move {
                let _ = reply.send(error(id, ErrorCode::Overloaded, detail)).await;
            });
            return;
        }
        let this = Arc::clone(self);
        tokio::spawn(async move {
            let fuel = fuel.unwrap_or(this.fuel);
            let answer = match this.slots.clone().acquire_owned().await {
                Ok(permit) => {
                    let done = tokio::task::spawn_blocking(move || {
                        let _permit = permit;
                        evaluate_to_literal(&expr, fuel)
                    })
                    .await;
                    match done {
                        Ok(Ok(value)) => Message::Result { id, value },
                        Ok(Err(e)) => error(id, ErrorCode::Eval(e.code), e.detail),
                        Err(join) => error(id, ErrorCode::Unavailable, format!("evaluator failed: {join}")),
                    }
                }
                Err(_) => error(id, ErrorCode::Unavailable, "worker shutting down"),
            };
            this.outstanding.fetch_sub(1, Ordering::AcqRel);
            let _ = reply.send(answer).await;
        });
    }
}

/// A bound worker server.
pub struct Worker {
    listener: TcpListener,
    handler: Arc<Evaluator>,
}

impl Worker {
    /// Panics if `max_concurrent` is zero.
    pub async fn bind(cfg: &WorkerConfig) -> io::Result<Worker> {
        assert!(cfg.max_concurrent >= 1, "max_concurrent must be at least 1");
        let listener = TcpListener::bind(&cfg.listen).await?;
        let handler = Arc::new(Evaluator {
            fuel: cfg.fuel,
            max_queued: cfg.max_queued,
            outstanding: AtomicUsize::new(0),
            slots: Arc::new(Semaphore::new(cfg.max_concurrent)),
        });
        Ok(Worker { listener, handler })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.listener.local_addr()
    }

    /// Accepts connections forever.
    pub async fn serve(self) -> io::Result<()> {
        let (_keep, rx) = watch::channel(false);
        self.serve_until(rx).await
    }

    async fn serve_until(self, mut shutdown: watch::Receiver<bool>) -> io::Result<()> {
        loop {
            let (stream, _) = tokio::select! {
                accepted = self.listener.accept() => accepted?,
                _ = shutdown.wait_for(|stop| *stop) => return Ok(()),
            };
            tokio::spawn(serve_connection(stream, self.handler.clone(), shutdown.clone()));
        }
    }

    /// Binds and serves on the current runtime. The returned handle stops
    /// the server and drops every connection when killed or dropped.
    pub async fn spawn(cfg: &WorkerConfig) -> io::Result<WorkerHandle> {
        let worker = Worker::bind(cfg).await?;
        let addr = worker.local_addr()?;
        let (stop, rx) = watch::channel(false);
        let task = tokio::spawn(worker.serve_until(rx));
        Ok(WorkerHandle { addr, stop, task })
    }
}

pub struct WorkerHandle {
    addr: SocketAddr,
    stop: watch::Sender<bool>,
    task: JoinHandle<io::Result<()>>,
}

impl WorkerHandle {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    /// Stops accepting and closes every open connection, like a crashed
    /// process would.
    pub fn kill(&self) {
        let _ = self.stop.send(true);
        self.task.abort();
    }
}

impl Drop for WorkerHandle {
    fn drop(&mut self) {
        self.kill();
    }
}
