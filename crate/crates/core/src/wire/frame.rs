use super::{Message, WireError};

pub const HEADER_LEN: usize = 4;
/// Largest accepted payload: 16 MiB.
pub const MAX_PAYLOAD: usize = 16 * 1024 * 1024;

/// Frames a message: big-endian `u32` length, then the canonical payload.
pub fn encode_message(m: &Message) -> Result<Vec<u8>, WireError> {
    let payload = m.to_payload();
    if payload.len() > MAX_PAYLOAD {
        return Err(WireError::Oversize(payload.len()));
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
    out.extend_from_slice(payload.as_bytes());
    Ok(out)
}

/// Decodes exactly one complete frame.
pub fn decode_message(bytes: &[u8]) -> Result<Message, WireError> {
    let declared = declared_len(bytes)?;
    let available = bytes.len() - HEADER_LEN;
    if available < declared {
        return Err(WireError::Truncated { declared, available });
    }
    if available > declared {
        return Err(WireError::BadPayload {
            offset: declared,
            message: "bytes after the end of the frame".into(),
        });
    }
    decode_payload(&bytes[HEADER_LEN..])
}

fn declared_len(bytes: &[u8]) -> Result<usize, WireError> {
    let Some(header) = bytes.get(..HEADER_LEN) else {
        return Err(WireError::Truncated { declared: HEADER_LEN, available: bytes.len() });
    };
    let declared = u32::from_be_bytes(header.try_into().expect("4-byte header")) as usize;
    if declared > MAX_PAYLOAD {
        return Err(WireError::Oversize(declared));
    }
    Ok(declared)
}

pub(crate) fn decode_payload(payload: &[u8]) -> Result<Message, WireError> {
    let text = std::str::from_utf8(payload).map_err(|e| WireError::BadPayload {
        offset: e.valid_up_to(),
        message: "payload is not valid UTF-8".into(),
    })?;
    Message::from_payload(text)
}

/// Incremental decoder for a byte stream carrying back-to-back frames.
#[derive(Debug, Default)]
pub struct FrameDecoder {
    buf: Vec<u8>,
}

impl FrameDecoder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, bytes: &[u8]) {
        self.buf.extend_from_slice(bytes);
    }

    /// Bytes received but not yet consumed.
    pub fn buffered(&self) -> usize {
        self.buf.len()
    }

    /// Next complete message, `Ok(None)` if more bytes are needed. An
    /// oversize header is reported as soon as it is seen.
    pub fn next_message(&mut self) -> Result<Option<Message>, WireError> {
        if self.buf.len() < HEADER_LEN {
            return Ok(None);
        }
        let declared = declared_len(&self.buf)?;
        if self.buf.len() < HEADER_LEN + declared {
            return Ok(None);
        }
        let frame: Vec<u8> = self.buf.drain(..HEADER_LEN + declared).collect();
        decode_payload(&frame[HEADER_LEN..]).map(Some)
    }
}
