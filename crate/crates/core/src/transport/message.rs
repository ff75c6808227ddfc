use std::fmt;

use serde::{Deserialize, Serialize};

use super::TransportError;

/// Frame header: one type byte plus a little-endian `u32` payload length.
pub const HEADER_LEN: usize = 5;

/// Default cap on a single frame's payload.
pub const DEFAULT_MAX_FRAME: usize = 64 * 1024 * 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[repr(u8)]
pub enum MsgType {
    KeyExchange = 0x01,
    AndRound = 0x02,
    InputShares = 0x03,
    OutputReveal = 0x04,
    Control = 0x05,
}

impl MsgType {
    pub const ALL: [MsgType; 5] = [
        MsgType::KeyExchange,
        MsgType::AndRound,
        MsgType::InputShares,
        MsgType::OutputReveal,
        MsgType::Control,
    ];

    pub fn from_byte(b: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|t| *t as u8 == b)
    }

    pub fn name(self) -> &'static str {
        match self {
            MsgType::KeyExchange => "KEY_EXCHANGE",
            MsgType::AndRound => "AND_ROUND",
            MsgType::InputShares => "INPUT_SHARES",
            MsgType::OutputReveal => "OUTPUT_REVEAL",
            MsgType::Control => "CONTROL",
        }
    }
}

impl fmt::Display for MsgType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    pub msg_type: MsgType,
    pub payload: Vec<u8>,
}

impl Message {
    pub fn new(msg_type: MsgType, payload: Vec<u8>) -> Self {
        Self { msg_type, payload }
    }

    pub fn framed_len(&self) -> usize {
        HEADER_LEN + self.payload.len()
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.framed_len());
        out.push(self.msg_type as u8);
        out.extend_from_slice(&(self.payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.payload);
        out
    }

    /// Decodes exactly one frame occupying all of `frame`.
    pub fn decode(frame: &[u8], max_frame: usize) -> Result<Self, TransportError> {
        let (msg_type, len) = decode_header(frame, max_frame)?;
        if frame.len() != HEADER_LEN + len {
            return Err(TransportError::Malformed(format!(
                "frame declares {len} payload bytes but carries {}",
                frame.len().saturating_sub(HEADER_LEN)
            )));
        }
        Ok(Self {
            msg_type,
            payload: frame[HEADER_LEN..].to_vec(),
        })
    }
}

/// Parses the 5-byte header, enforcing the frame cap.
pub fn decode_header(bytes: &[u8], max_frame: usize) -> Result<(MsgType, usize), TransportError> {
    if bytes.len() < HEADER_LEN {
        return Err(TransportError::Malformed(format!("short header ({} bytes)", bytes.len())));
    }
    let msg_type = MsgType::from_byte(bytes[0]).ok_or(TransportError::UnknownType(bytes[0]))?;
    let len = u32::from_le_bytes(bytes[1..5].try_into().expect("4 bytes")) as usize;
    if len > max_frame {
        return Err(TransportError::Oversized { len, cap: max_frame });
    }
    Ok((msg_type, len))
}
