use std::sync::Arc;

use tokio::net::TcpStream;
use tokio::sync::{mpsc, watch};
use tokio::time::timeout;

use crate::eval::Fuel;
use crate::expr::Expr;
use crate::wire::{read_message, write_message, ErrorCode, Message, ReadError, PROTOCOL_VERSION};

use super::HANDSHAKE_TIMEOUT;

/// Server-side behavior shared by workers and the dispatcher.
pub(crate) trait EvalHandler: Send + Sync + 'static {
    /// Must eventually send exactly one reply for `id` on `reply` unless
    /// the connection has gone away.
    fn on_eval(self: &Arc<Self>, id: u64, expr: Expr, fuel: Option<Fuel>, reply: mpsc::Sender<Message>);
}

pub(crate) fn error(id: u64, code: ErrorCode, detail: impl Into<String>) -> Message {
    Message::Error { id, code, detail: detail.into() }
}

/// Handles one accepted connection until the peer leaves, a framing error
/// makes the stream unusable, or `shutdown` flips to true.
pub(crate) async fn serve_connection<H: EvalHandler>(
    stream: TcpStream,
    handler: Arc<H>,
    mut shutdown: watch::Receiver<bool>,
) {
    stream.set_nodelay(true).ok();
    let peer = stream.peer_addr().map(|a| a.to_string()).unwrap_or_default();
    let (mut read, mut write) = stream.into_split();

    let first = match timeout(HANDSHAKE_TIMEOUT, read_message(&mut read)).await {
        Ok(Ok(m)) => m,
        Ok(Err(e)) => {
            tracing::debug!(%peer, %e, "handshake read failed");
            if let ReadError::Payload { .. } = e {
                let _ = write_message(&mut write, &error(0, ErrorCode::ParseError, e.to_string())).await;
            }
            return;
        }
        Err(_) => return,
    };
    match first {
        Message::Hello { version } if version == PROTOCOL_VERSION => {
            if write_message(&mut write, &Message::HelloOk { version }).await.is_err() {
                return;
            }
        }
        Message::Hello { version } => {
            let detail = format!("unsupported protocol version {version}; expected {PROTOCOL_VERSION}");
            let _ = write_message(&mut write, &error(0, ErrorCode::VersionMismatch, detail)).await;
            return;
        }
        _ => {
            let _ = write_message(&mut write, &error(0, ErrorCode::ParseError, "expected hello")).await;
            return;
        }
    }

    let (tx, mut rx) = mpsc::channel::<Message>(256);
    let writer = tokio::spawn(async move {
        while let Some(m) = rx.recv().await {
            if let Err(e) = write_message(&mut write, &m).await {
                tracing::debug!(%e, "reply write failed");
                break;
            }
        }
    });

    loop {
        let msg = tokio::select! {
            m = read_message(&mut read) => m,
            _ = shutdown.wait_for(|stop| *stop) => break,
        };
        match msg {
            Ok(Message::Eval { id, expr, fuel }) => handler.on_eval(id, expr, fuel, tx.clone()),
            Ok(Message::Ping) => {
                if tx.send(Message::Pong).await.is_err() {
                    break;
                }
            }
            Ok(other) => {
                let detail = format!("unexpected message {}", other.to_payload());
                let _ = tx.send(error(0, ErrorCode::ParseError, detail)).await;
            }
            Err(ReadError::Payload { error: e, request_id: Some(id) }) => {
                let _ = tx.send(error(id, ErrorCode::ParseError, e.to_string())).await;
            }
            Err(ReadError::Closed) => break,
            Err(e) => {
                tracing::debug!(%peer, %e, "dropping connection");
                break;
            }
        }
    }
    drop(tx);
    if *shutdown.borrow() {
        writer.abort();
    } else {
        let _ = writer.await;
    }
}
