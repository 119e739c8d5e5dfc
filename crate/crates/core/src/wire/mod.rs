//! Message encoding and framing.
//!
//! A frame is a 4-byte big-endian payload length followed by the payload:
//! one UTF-8 message s-expression whose embedded expressions use the
//! canonical quotation grammar. See `PROTOCOL.md` at the repository root.

mod frame;
mod io;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::eval::{EvalErrorCode, Fuel};
use crate::expr::{write_expr, write_string, Expr, ParseError, Parser, TokenKind};

pub use frame::{decode_message, encode_message, FrameDecoder, HEADER_LEN, MAX_PAYLOAD};
pub use io::{read_message, write_message, ReadError};

pub const PROTOCOL_VERSION: u32 = 1;

/// Error codes carried by [`Message::Error`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ErrorCode {
    Eval(EvalErrorCode),
    /// The payload or embedded expression did not parse.
    ParseError,
    VersionMismatch,
    /// The worker's evaluation queue is full.
    Overloaded,
    /// The dispatcher could not reach any worker.
    Unavailable,
}

impl ErrorCode {
    pub fn as_str(self) -> &'static str {
        match self {
            ErrorCode::Eval(c) => c.as_str(),
            ErrorCode::ParseError => "parse-error",
            ErrorCode::VersionMismatch => "version-mismatch",
            ErrorCode::Overloaded => "overloaded",
            ErrorCode::Unavailable => "unavailable",
        }
    }
}

impl fmt::Display for ErrorCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ErrorCode {
    type Err = ();
    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "parse-error" => ErrorCode::ParseError,
            "version-mismatch" => ErrorCode::VersionMismatch,
            "overloaded" => ErrorCode::Overloaded,
            "unavailable" => ErrorCode::Unavailable,
            other => ErrorCode::Eval(other.parse()?),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Message {
    Hello { version: u32 },
    HelloOk { version: u32 },
    /// `fuel: None` uses the worker's default budget.
    Eval { id: u64, expr: Expr, fuel: Option<Fuel> },
    /// `value` is always a literal form.
    Result { id: u64, value: Expr },
    Error { id: u64, code: ErrorCode, detail: String },
    Ping,
    Pong,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WireError {
    #[error("truncated frame: header declares {declared} bytes, {available} available")]
    Truncated { declared: usize, available: usize },
    #[error("payload of {0} bytes exceeds the 16 MiB limit")]
    Oversize(usize),
    #[error("bad payload at byte {offset}: {message}")]
    BadPayload { offset: usize, message: String },
}

impl From<ParseError> for WireError {
    fn from(e: ParseError) -> Self {
        WireError::BadPayload { offset: e.offset, message: e.message }
    }
}

impl Message {
    /// Canonical payload text.
    pub fn to_payload(&self) -> String {
        let mut out = String::new();
        match self {
            Message::Hello { version } => out.push_str(&format!("(hello {version})")),
            Message::HelloOk { version } => out.push_str(&format!("(hello-ok {version})")),
            Message::Eval { id, expr, fuel } => {
                out.push_str(&format!("(eval {id} "));
                write_expr(&mut out, expr);
                if let Some(f) = fuel {
                    out.push_str(&format!(" {}", f.get()));
                }
                out.push(')');
            }
            Message::Result { id, value } => {
                out.push_str(&format!("(result {id} "));
                write_expr(&mut out, value);
                out.push(')');
            }
            Message::Error { id, code, detail } => {
                out.push_str(&format!("(error {id} {code} "));
                write_string(&mut out, detail);
                out.push(')');
            }
            Message::Ping => out.push_str("(ping)"),
            Message::Pong => out.push_str("(pong)"),
        }
        out
    }

    /// Parses one message from payload text.
    pub fn from_payload(text: &str) -> Result<Message, WireError> {
        let mut p = Parser::new(text);
        p.open()?;
        let (tag, tag_off) = p.atom("message tag")?;
        let msg = match tag.as_str() {
            "hello" | "hello-ok" => {
                let (a, off) = p.atom("version")?;
                let version = a.parse::<u32>().ok().filter(|_| a.bytes().all(|b| b.is_ascii_digit()));
                let version = version.ok_or_else(|| bad(off, format!("bad version {a:?}")))?;
                if tag == "hello" {
                    Message::Hello { version }
                } else {
                    Message::HelloOk { version }
                }
            }
            "eval" => {
                let id = p.uint()?;
                let expr = p.expr()?;
                let fuel = if p.at_close()? {
                    None
                } else {
                    let (a, off) = p.atom("fuel")?;
                    let steps = a
                        .parse::<u64>()
                        .ok()
                        .filter(|_| a.bytes().all(|b| b.is_ascii_digit()))
                        .and_then(Fuel::new)
                        .ok_or_else(|| bad(off, format!("bad fuel {a:?}")))?;
                    Some(steps)
                };
                Message::Eval { id, expr, fuel }
            }
            "result" => {
                let id = p.uint()?;
                let off = p.peek()?.map(|t| t.offset).unwrap_or(text.len());
                let value = p.expr()?;
                if !value.is_literal() {
                    return Err(bad(off, "result value must be a literal"));
                }
                Message::Result { id, value }
            }
            "error" => {
                let id = p.uint()?;
                let (c, off) = p.atom("error code")?;
                let code = c.parse().map_err(|_| bad(off, format!("unknown error code {c:?}")))?;
                let detail = p.string()?;
                Message::Error { id, code, detail }
            }
            "ping" => Message::Ping,
            "pong" => Message::Pong,
            other => return Err(bad(tag_off, format!("unknown message {other:?}"))),
        };
        p.close()?;
        p.finish()?;
        Ok(msg)
    }
}

fn bad(offset: usize, message: impl Into<String>) -> WireError {
    WireError::BadPayload { offset, message: message.into() }
}

/// Best-effort recovery of the request id from a payload that failed to
/// decode, so the peer can be told which request was rejected.
pub fn recover_request_id(payload: &[u8]) -> Option<u64> {
    let text = std::str::from_utf8(payload).ok()?;
    let mut p = Parser::new(text);
    p.open().ok()?;
    let (tag, _) = p.atom("tag").ok()?;
    if tag != "eval" {
        return None;
    }
    match p.next().ok()?.kind {
        TokenKind::Atom(a) if a.bytes().all(|b| b.is_ascii_digit()) => a.parse().ok(),
        _ => None,
    }
}
