use std::collections::{HashMap, VecDeque};
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::{Arc, Mutex as StdMutex};
use std::time::Duration;

use tokio::net::tcp::OwnedWriteHalf;
use tokio::net::TcpStream;
use tokio::sync::{oneshot, Mutex};
use tokio::task::JoinHandle;
use tokio::time::timeout;

use crate::eval::Fuel;
use crate::expr::Expr;
use crate::wire::{read_message, write_message, ErrorCode, Message, ReadError, PROTOCOL_VERSION};

use super::TransportError;

/// What a server answered for one `eval`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reply {
    Value(Expr),
    Failed { code: ErrorCode, detail: String },
}

#[derive(Default)]
struct Pending {
    evals: HashMap<u64, oneshot::Sender<Reply>>,
    pings: VecDeque<oneshot::Sender<()>>,
}

/// A client connection to a worker or dispatcher. Requests are multiplexed
/// by id; many may be outstanding at once.
pub struct Connection {
    peer: String,
    writer: Mutex<OwnedWriteHalf>,
    pending: Arc<StdMutex<Pending>>,
    closed: Arc<AtomicBool>,
    next_id: AtomicU64,
    reader: JoinHandle<()>,
}

impl Connection {
    /// Connects and performs the hello handshake within `handshake`.
    pub async fn connect(addr: &str, handshake: Duration) -> Result<Connection, TransportError> {
        let fail = |e: String| TransportError::Connect { addr: addr.to_string(), reason: e };
        let (read, write) = timeout(handshake, async {
            let stream = TcpStream::connect(addr).await.map_err(|e| fail(e.to_string()))?;
            stream.set_nodelay(true).ok();
            let (mut read, mut write) = stream.into_split();
            write_message(&mut write, &Message::Hello { version: PROTOCOL_VERSION })
                .await
                .map_err(|e| fail(e.to_string()))?;
            match read_message(&mut read).await {
                Ok(Message::HelloOk { version }) if version == PROTOCOL_VERSION => Ok((read, write)),
                Ok(Message::Error { code, detail, .. }) => {
                    Err(TransportError::Protocol(format!("{addr}: handshake refused: {code} {detail}")))
                }
                Ok(other) => Err(TransportError::Protocol(format!(
                    "{addr}: unexpected handshake reply {}",
                    other.to_payload()
                ))),
                Err(e) => Err(fail(e.to_string())),
            }
        })
        .await
        .map_err(|_| fail("handshake timed out".into()))??;

        let pending = Arc::new(StdMutex::new(Pending::default()));
        let closed = Arc::new(AtomicBool::new(false));
        let reader = tokio::spawn(read_loop(read, pending.clone(), closed.clone()));
        Ok(Connection {
            peer: addr.to_string(),
            writer: Mutex::new(write),
            pending,
            closed,
            next_id: AtomicU64::new(1),
            reader,
        })
    }

    pub fn peer(&self) -> &str {
        &self.peer
    }

    pub fn is_closed(&self) -> bool {
        self.closed.load(Ordering::Acquire)
    }

    /// Sends one `eval` and waits for its reply.
    pub async fn eval(
        &self,
        expr: &Expr,
        fuel: Option<Fuel>,
        limit: Duration,
    ) -> Result<Reply, TransportError> {
        if self.is_closed() {
            return Err(TransportError::Closed(self.peer.clone()));
        }
        let id = self.next_id.fetch_add(1, Ordering::Relaxed);
        let (tx, rx) = oneshot::channel();
        self.pending.lock().unwrap().evals.insert(id, tx);
        let msg = Message::Eval { id, expr: expr.clone(), fuel };
        let outcome = timeout(limit, async {
            self.send(&msg).await?;
            rx.await.map_err(|_| TransportError::Closed(self.peer.clone()))
        })
        .await;
        match outcome {
            Ok(r) => {
                if r.is_err() {
                    self.pending.lock().unwrap().evals.remove(&id);
                }
                r
            }
            Err(_) => {
                self.pending.lock().unwrap().evals.remove(&id);
                Err(TransportError::Timeout(self.peer.clone()))
            }
        }
    }

    /// Round-trips a ping.
    pub async fn ping(&self, limit: Duration) -> Result<(), TransportError> {
        let (tx, rx) = oneshot::channel();
        self.pending.lock().unwrap().pings.push_back(tx);
        timeout(limit, async {
            self.send(&Message::Ping).await?;
            rx.await.map_err(|_| TransportError::Closed(self.peer.clone()))
        })
        .await
        .map_err(|_| TransportError::Timeout(self.peer.clone()))?
    }

    async fn send(&self, msg: &Message) -> Result<(), TransportError> {
        let mut w = self.writer.lock().await;
        write_message(&mut *w, msg).await.map_err(|e| {
            self.closed.store(true, Ordering::Release);
            TransportError::Io { addr: self.peer.clone(), reason: e.to_string() }
        })
    }
}

impl Drop for Connection {
    fn drop(&mut self) {
        self.reader.abort();
    }
}

async fn read_loop(
    mut read: tokio::net::tcp::OwnedReadHalf,
    pending: Arc<StdMutex<Pending>>,
    closed: Arc<AtomicBool>,
) {
    loop {
        match read_message(&mut read).await {
            Ok(Message::Result { id, value }) => deliver(&pending, id, Reply::Value(value)),
            Ok(Message::Error { id, code, detail }) => {
                deliver(&pending, id, Reply::Failed { code, detail })
            }
            Ok(Message::Pong) => {
                if let Some(tx) = pending.lock().unwrap().pings.pop_front() {
                    let _ = tx.send(());
                }
            }
            Ok(other) => {
                tracing::debug!(payload = %other.to_payload(), "ignoring unexpected message");
            }
            Err(ReadError::Payload { error, .. }) => {
                tracing::warn!(%error, "undecodable reply; dropping connection");
                break;
            }
            Err(_) => break,
        }
    }
    closed.store(true, Ordering::Release);
    // Dropping the senders wakes every waiter with a closed-channel error.
    let mut p = pending.lock().unwrap();
    p.evals.clear();
    p.pings.clear();
}

fn deliver(pending: &StdMutex<Pending>, id: u64, reply: Reply) {
    if let Some(tx) = pending.lock().unwrap().evals.remove(&id) {
        let _ = tx.send(reply);
    }
}
