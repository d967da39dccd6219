//! Length-prefixed framing: `ISLR`, version, type, big-endian u32 length,
//! payload.

use std::io::{ErrorKind, Read, Write};

use crate::error::{Error, Result};
use crate::imaging::Frame;

pub const MAGIC: [u8; 4] = *b"ISLR";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;
/// Largest accepted payload; bigger than any 16-bit frame we expect.
pub const MAX_PAYLOAD: usize = 64 << 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MessageType {
    Frame = 0x01,
    Result = 0x02,
    EndStream = 0x03,
    Error = 0x04,
}

impl MessageType {
    pub fn from_byte(b: u8) -> Option<Self> {
        Some(match b {
            0x01 => MessageType::Frame,
            0x02 => MessageType::Result,
            0x03 => MessageType::EndStream,
            0x04 => MessageType::Error,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireMessage {
    pub kind: MessageType,
    pub payload: Vec<u8>,
}

impl WireMessage {
    pub fn new(kind: MessageType, payload: Vec<u8>) -> Self {
        WireMessage { kind, payload }
    }

    pub fn text(kind: MessageType, s: &str) -> Self {
        Self::new(kind, s.as_bytes().to_vec())
    }

    pub fn end_stream() -> Self {
        Self::new(MessageType::EndStream, Vec::new())
    }

    pub fn payload_text(&self) -> Result<&str> {
        std::str::from_utf8(&self.payload).map_err(|_| Error::Protocol("payload is not UTF-8".into()))
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + self.payload.len());
        out.extend_from_slice(&MAGIC);
        out.push(VERSION);
        out.push(self.kind as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_be_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    pub fn write_to(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(&self.encode())?;
        w.flush()?;
        Ok(())
    }

    /// Reads one message; `None` on a clean end of stream before a header.
    pub fn read_from(r: &mut impl Read) -> Result<Option<WireMessage>> {
        let mut header = [0u8; HEADER_LEN];
        let mut got = 0;
        while got < HEADER_LEN {
            match r.read(&mut header[got..]) {
                Ok(0) if got == 0 => return Ok(None),
                Ok(0) => return Err(Error::Protocol("truncated header".into())),
                Ok(n) => got += n,
                Err(e) if e.kind() == ErrorKind::Interrupted => {}
                Err(e) => return Err(e.into()),
            }
        }
        let len = parse_header(&header)?.1;
        let mut payload = vec![0u8; len];
        r.read_exact(&mut payload).map_err(|e| match e.kind() {
            ErrorKind::UnexpectedEof => Error::Protocol("truncated payload".into()),
            _ => e.into(),
        })?;
        let kind = MessageType::from_byte(header[5]).expect("checked by parse_header");
        Ok(Some(WireMessage { kind, payload }))
    }

    /// Decodes one message from the front of `bytes`, returning it and the
    /// number of bytes used.
    pub fn decode(bytes: &[u8]) -> Result<(WireMessage, usize)> {
        let header: &[u8; HEADER_LEN] = bytes
            .get(..HEADER_LEN)
            .and_then(|h| h.try_into().ok())
            .ok_or_else(|| Error::Protocol("truncated header".into()))?;
        let (kind, len) = parse_header(header)?;
        let payload = bytes
            .get(HEADER_LEN..HEADER_LEN + len)
            .ok_or_else(|| Error::Protocol("truncated payload".into()))?;
        Ok((WireMessage::new(kind, payload.to_vec()), HEADER_LEN + len))
    }
}

fn parse_header(h: &[u8; HEADER_LEN]) -> Result<(MessageType, usize)> {
    if h[..4] != MAGIC {
        return Err(Error::Protocol("bad magic".into()));
    }
    if h[4] != VERSION {
        return Err(Error::Version(h[4].to_string()));
    }
    let kind = MessageType::from_byte(h[5]).ok_or_else(|| Error::Protocol(format!("unknown type 0x{:02x}", h[5])))?;
    let len = u32::from_be_bytes([h[6], h[7], h[8], h[9]]) as usize;
    if len > MAX_PAYLOAD {
        return Err(Error::Protocol(format!("payload of {len} bytes too large")));
    }
    Ok((kind, len))
}

/// FRAME payload: big-endian u16 width and height, then RGB rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FramePayload {
    pub width: u16,
    pub height: u16,
    pub rgb: Vec<u8>,
}

impl FramePayload {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(4 + self.rgb.len());
        out.extend_from_slice(&self.width.to_be_bytes());
        out.extend_from_slice(&self.height.to_be_bytes());
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        if bytes.len() < 4 {
            return Err(Error::Protocol("frame payload shorter than 4 bytes".into()));
        }
        let width = u16::from_be_bytes([bytes[0], bytes[1]]);
        let height = u16::from_be_bytes([bytes[2], bytes[3]]);
        let want = 4 + 3 * width as usize * height as usize;
        if bytes.len() != want {
            return Err(Error::Protocol(format!(
                "frame payload is {} bytes, expected {want}",
                bytes.len()
            )));
        }
        Ok(FramePayload {
            width,
            height,
            rgb: bytes[4..].to_vec(),
        })
    }

    pub fn from_frame(f: &Frame) -> Result<Self> {
        let dim = |v: usize| u16::try_from(v).map_err(|_| Error::InvalidArgument(format!("dimension {v} exceeds 65535")));
        Ok(FramePayload {
            width: dim(f.width())?,
            height: dim(f.height())?,
            rgb: f.to_rgb_bytes(),
        })
    }

    pub fn to_frame(&self) -> Result<Frame> {
        Frame::from_rgb_bytes(self.width as usize, self.height as usize, &self.rgb)
            .map_err(|e| Error::Protocol(format!("bad frame: {e}")))
    }
}
