//! Ring-topology message layer.
//!
//! Each party sends only to its successor and receives only from its
//! predecessor. Frames are `type (1 byte) | length (u32 LE) | payload`.
//! Two implementations share the [`RingTransport`] trait: an in-memory ring
//! for single-process runs and a TCP ring for separate processes.

mod counters;
mod memory;
mod message;
mod tcp;

use std::io;
use std::time::Duration;

use thiserror::Error;

use crate::sharing::PartyId;

pub use counters::{DirectionStats, TrafficCounters, TypeStats};
pub use memory::{memory_ring, MemoryEndpoint, MemoryRingOptions, TranscriptEntry};
pub use message::{decode_header, Message, MsgType, DEFAULT_MAX_FRAME, HEADER_LEN};
pub use tcp::{Hello, PendingTcp, TcpConfig, TcpEndpoint};

pub const PROTOCOL_VERSION: u16 = 1;
pub const DEFAULT_TIMEOUT: Duration = Duration::from_secs(30);

#[derive(Debug, Error)]
pub enum TransportError {
    #[error("timed out waiting for the ring peer")]
    Timeout,
    #[error("ring link closed")]
    Closed,
    #[error("frame of {len} bytes exceeds the {cap}-byte cap")]
    Oversized { len: usize, cap: usize },
    #[error("unknown message type 0x{0:02x}")]
    UnknownType(u8),
    #[error("malformed frame: {0}")]
    Malformed(String),
    #[error("handshake failed: {0}")]
    Handshake(#[from] HandshakeError),
    #[error("could not reach successor at {addr} within {timeout:?}")]
    ConnectTimeout { addr: String, timeout: Duration },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HandshakeError {
    #[error("protocol version mismatch: ours {ours}, peer {theirs}")]
    VersionMismatch { ours: u16, theirs: u16 },
    #[error("peer claims our own party id {0}")]
    PartyCollision(PartyId),
    #[error("expected {expected} on this link, peer says it is party {got}")]
    UnexpectedParty { expected: PartyId, got: u8 },
    #[error("session id mismatch: ours {ours}, peer {theirs}")]
    SessionMismatch { ours: u64, theirs: u64 },
    #[error("bad hello message: {0}")]
    BadHello(String),
}

/// One party's view of the ring.
pub trait RingTransport {
    fn party(&self) -> PartyId;

    /// Hands a frame to the successor link. Must not wait for the
    /// successor to read it, so a send can never be starved by a later
    /// receive on the same party.
    fn send_to_next(&mut self, msg: Message) -> Result<(), TransportError>;

    /// Blocks until a whole frame arrives from the predecessor or the
    /// timeout expires.
    fn recv_from_prev(&mut self) -> Result<Message, TransportError>;

    /// Snapshot of the traffic counters.
    fn counters(&self) -> TrafficCounters;
}

impl<T: RingTransport + ?Sized> RingTransport for Box<T> {
    fn party(&self) -> PartyId {
        (**self).party()
    }

    fn send_to_next(&mut self, msg: Message) -> Result<(), TransportError> {
        (**self).send_to_next(msg)
    }

    fn recv_from_prev(&mut self) -> Result<Message, TransportError> {
        (**self).recv_from_prev()
    }

    fn counters(&self) -> TrafficCounters {
        (**self).counters()
    }
}
