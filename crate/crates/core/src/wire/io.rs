use std::io;

use thiserror::Error;
use tokio::io::{AsyncRead, AsyncReadExt, AsyncWrite, AsyncWriteExt};

use super::frame::{decode_payload, encode_message, HEADER_LEN, MAX_PAYLOAD};
use super::{recover_request_id, Message, WireError};

#[derive(Debug, Error)]
pub enum ReadError {
    /// The peer closed the stream between frames.
    #[error("connection closed")]
    Closed,
    #[error(transparent)]
    Io(#[from] io::Error),
    /// A whole frame arrived but did not decode. The stream is still in
    /// sync; `request_id` is set when the payload still names one.
    #[error("{error}")]
    Payload { error: WireError, request_id: Option<u64> },
    /// The header announced more than the frame limit; the stream cannot be
    /// resynchronized.
    #[error("{0}")]
    Oversize(WireError),
}

/// Reads one frame. EOF before the first header byte is [`ReadError::Closed`].
pub async fn read_message<R: AsyncRead + Unpin>(r: &mut R) -> Result<Message, ReadError> {
    let mut header = [0u8; HEADER_LEN];
    let mut got = 0;
    while got < HEADER_LEN {
        let n = r.read(&mut header[got..]).await?;
        if n == 0 {
            return Err(if got == 0 {
                ReadError::Closed
            } else {
                ReadError::Io(io::ErrorKind::UnexpectedEof.into())
            });
        }
        got += n;
    }
    let len = u32::from_be_bytes(header) as usize;
    if len > MAX_PAYLOAD {
        return Err(ReadError::Oversize(WireError::Oversize(len)));
    }
    let mut payload = vec![0u8; len];
    r.read_exact(&mut payload).await?;
    decode_payload(&payload).map_err(|error| ReadError::Payload {
        error,
        request_id: recover_request_id(&payload),
    })
}

pub async fn write_message<W: AsyncWrite + Unpin>(w: &mut W, m: &Message) -> io::Result<()> {
    let bytes = encode_message(m).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    w.write_all(&bytes).await?;
    w.flush().await
}
