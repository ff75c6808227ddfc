use std::io::{self, Read, Write};
use std::net::{SocketAddr, TcpListener, TcpStream, ToSocketAddrs};
use std::sync::mpsc::{channel, Sender};
use std::sync::{Arc, Mutex};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use log::debug;

use crate::sharing::PartyId;

use super::message::decode_header;
use super::{
    HandshakeError, Message, MsgType, RingTransport, TrafficCounters, TransportError, DEFAULT_MAX_FRAME,
    DEFAULT_TIMEOUT, HEADER_LEN, PROTOCOL_VERSION,
};

const HELLO_LEN: usize = 11;
const ACCEPT_POLL: Duration = Duration::from_millis(5);
const DIAL_RETRY: Duration = Duration::from_millis(20);

#[derive(Debug, Clone)]
pub struct TcpConfig {
    pub party_id: PartyId,
    pub listen_address: String,
    pub successor_address: String,
    pub session_id: u64,
    pub protocol_version: u16,
    pub timeout: Duration,
    pub max_frame: usize,
}

impl TcpConfig {
    pub fn new(party_id: PartyId, listen_address: impl Into<String>, successor_address: impl Into<String>, session_id: u64) -> Self {
        Self {
            party_id,
            listen_address: listen_address.into(),
            successor_address: successor_address.into(),
            session_id,
            protocol_version: PROTOCOL_VERSION,
            timeout: DEFAULT_TIMEOUT,
            max_frame: DEFAULT_MAX_FRAME,
        }
    }

    fn hello(&self) -> Hello {
        Hello {
            protocol_version: self.protocol_version,
            party_id: self.party_id.get(),
            session_id: self.session_id,
        }
    }
}

/// CONTROL payload exchanged on every link at connect time:
/// `version (u16 LE) | party id (u8) | session id (u64 LE)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Hello {
    pub protocol_version: u16,
    pub party_id: u8,
    pub session_id: u64,
}

impl Hello {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HELLO_LEN);
        out.extend_from_slice(&self.protocol_version.to_le_bytes());
        out.push(self.party_id);
        out.extend_from_slice(&self.session_id.to_le_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, HandshakeError> {
        if bytes.len() != HELLO_LEN {
            return Err(HandshakeError::BadHello(format!("expected {HELLO_LEN} bytes, got {}", bytes.len())));
        }
        Ok(Self {
            protocol_version: u16::from_le_bytes([bytes[0], bytes[1]]),
            party_id: bytes[2],
            session_id: u64::from_le_bytes(bytes[3..11].try_into().expect("8 bytes")),
        })
    }

    /// Checks a peer's hello against our config; `expected` is the party
    /// that should sit at the other end of this link.
    pub fn check(&self, ours: &TcpConfig, expected: PartyId) -> Result<(), HandshakeError> {
        if self.protocol_version != ours.protocol_version {
            return Err(HandshakeError::VersionMismatch {
                ours: ours.protocol_version,
                theirs: self.protocol_version,
            });
        }
        if self.session_id != ours.session_id {
            return Err(HandshakeError::SessionMismatch {
                ours: ours.session_id,
                theirs: self.session_id,
            });
        }
        if self.party_id == ours.party_id.get() {
            return Err(HandshakeError::PartyCollision(ours.party_id));
        }
        if self.party_id != expected.get() {
            return Err(HandshakeError::UnexpectedParty {
                expected,
                got: self.party_id,
            });
        }
        Ok(())
    }
}

fn map_read_err(e: io::Error) -> TransportError {
    match e.kind() {
        io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut => TransportError::Timeout,
        io::ErrorKind::UnexpectedEof | io::ErrorKind::ConnectionReset | io::ErrorKind::ConnectionAborted => {
            TransportError::Closed
        }
        _ => TransportError::Io(e),
    }
}

fn read_frame(stream: &mut TcpStream, max_frame: usize) -> Result<Message, TransportError> {
    let mut header = [0u8; HEADER_LEN];
    stream.read_exact(&mut header).map_err(map_read_err)?;
    let (msg_type, len) = decode_header(&header, max_frame)?;
    let mut payload = vec![0u8; len];
    stream.read_exact(&mut payload).map_err(map_read_err)?;
    Ok(Message { msg_type, payload })
}

fn read_hello(stream: &mut TcpStream, cfg: &TcpConfig) -> Result<Hello, TransportError> {
    let msg = read_frame(stream, cfg.max_frame)?;
    if msg.msg_type != MsgType::Control {
        return Err(HandshakeError::BadHello(format!("expected CONTROL, got {}", msg.msg_type)).into());
    }
    Ok(Hello::decode(&msg.payload)?)
}

/// A bound listener that has not joined the ring yet. Binding first lets
/// callers learn ephemeral ports before wiring successors.
#[derive(Debug)]
pub struct PendingTcp {
    listener: TcpListener,
}

impl PendingTcp {
    pub fn bind(addr: &str) -> Result<Self, TransportError> {
        Ok(Self {
            listener: TcpListener::bind(addr)?,
        })
    }

    pub fn local_addr(&self) -> SocketAddr {
        self.listener.local_addr().expect("bound listener has an address")
    }

    /// Accepts the predecessor, dials the successor, and runs the hello
    /// exchange on both links.
    pub fn establish(self, cfg: &TcpConfig) -> Result<TcpEndpoint, TransportError> {
        let deadline = Instant::now() + cfg.timeout;
        let accept_cfg = cfg.clone();
        let listener = self.listener;
        let acceptor = thread::spawn(move || accept_predecessor(listener, &accept_cfg, deadline));

        let dialed = dial_successor(cfg, deadline);
        let accepted = acceptor.join().map_err(|_| {
            TransportError::Io(io::Error::new(io::ErrorKind::Other, "accept thread panicked"))
        })?;

        // Report a handshake problem in preference to the secondary
        // failure it causes on the other link.
        let ((succ, mut counters), (pred, pred_counters)) = match (dialed, accepted) {
            (Ok(d), Ok(a)) => (d, a),
            (Err(e @ TransportError::Handshake(_)), _) | (_, Err(e @ TransportError::Handshake(_))) => return Err(e),
            (Err(e), _) | (_, Err(e)) => return Err(e),
        };
        counters.merge(&pred_counters);

        pred.set_read_timeout(Some(cfg.timeout))?;
        let (tx, rx) = channel::<Vec<u8>>();
        let write_error = Arc::new(Mutex::new(None));
        let writer_error = Arc::clone(&write_error);
        let mut out = succ;
        let writer = thread::spawn(move || {
            for frame in rx {
                if let Err(e) = out.write_all(&frame) {
                    *writer_error.lock().expect("writer error lock") = Some(e);
                    break;
                }
            }
            let _ = out.flush();
        });
        debug!("{} joined ring", cfg.party_id);
        Ok(TcpEndpoint {
            party: cfg.party_id,
            writer_tx: Some(tx),
            writer: Some(writer),
            write_error,
            from_prev: pred,
            counters,
            max_frame: cfg.max_frame,
        })
    }
}

fn accept_predecessor(
    listener: TcpListener,
    cfg: &TcpConfig,
    deadline: Instant,
) -> Result<(TcpStream, TrafficCounters), TransportError> {
    listener.set_nonblocking(true)?;
    let mut stream = loop {
        match listener.accept() {
            Ok((s, _)) => break s,
            Err(e) if e.kind() == io::ErrorKind::WouldBlock => {
                if Instant::now() >= deadline {
                    return Err(TransportError::Timeout);
                }
                thread::sleep(ACCEPT_POLL);
            }
            Err(e) => return Err(e.into()),
        }
    };
    stream.set_nonblocking(false)?;
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(remaining(deadline)))?;
    let mut counters = TrafficCounters::new();
    let hello = read_hello(&mut stream, cfg)?;
    counters.record_received(MsgType::Control, HELLO_LEN);
    // Answer even on mismatch so the dialing side sees the conflict too.
    let reply = Message::new(MsgType::Control, cfg.hello().encode());
    stream.write_all(&reply.encode())?;
    counters.record_sent(MsgType::Control, HELLO_LEN);
    hello.check(cfg, cfg.party_id.prev())?;
    Ok((stream, counters))
}

fn dial_successor(cfg: &TcpConfig, deadline: Instant) -> Result<(TcpStream, TrafficCounters), TransportError> {
    let addrs: Vec<SocketAddr> = cfg.successor_address.to_socket_addrs()?.collect();
    let mut stream = loop {
        let attempt = addrs
            .iter()
            .find_map(|a| TcpStream::connect_timeout(a, remaining(deadline).max(DIAL_RETRY)).ok());
        match attempt {
            Some(s) => break s,
            None if Instant::now() >= deadline => {
                return Err(TransportError::ConnectTimeout {
                    addr: cfg.successor_address.clone(),
                    timeout: cfg.timeout,
                })
            }
            None => thread::sleep(DIAL_RETRY),
        }
    };
    stream.set_nodelay(true)?;
    stream.set_read_timeout(Some(remaining(deadline)))?;
    let mut counters = TrafficCounters::new();
    stream.write_all(&Message::new(MsgType::Control, cfg.hello().encode()).encode())?;
    counters.record_sent(MsgType::Control, HELLO_LEN);
    let reply = read_hello(&mut stream, cfg)?;
    counters.record_received(MsgType::Control, HELLO_LEN);
    reply.check(cfg, cfg.party_id.next())?;
    Ok((stream, counters))
}

fn remaining(deadline: Instant) -> Duration {
    deadline
        .saturating_duration_since(Instant::now())
        .max(Duration::from_millis(1))
}

/// A ring endpoint over two TCP connections. Outgoing frames are written
/// by a dedicated thread so a blocked successor can never deadlock the ring.
#[derive(Debug)]
pub struct TcpEndpoint {
    party: PartyId,
    writer_tx: Option<Sender<Vec<u8>>>,
    writer: Option<JoinHandle<()>>,
    write_error: Arc<Mutex<Option<io::Error>>>,
    from_prev: TcpStream,
    counters: TrafficCounters,
    max_frame: usize,
}

impl TcpEndpoint {
    pub fn connect_ring(cfg: &TcpConfig) -> Result<Self, TransportError> {
        PendingTcp::bind(&cfg.listen_address)?.establish(cfg)
    }

    fn check_writer(&self) -> Result<(), TransportError> {
        match self.write_error.lock().expect("writer error lock").take() {
            Some(e) => Err(TransportError::Io(e)),
            None => Ok(()),
        }
    }

    /// Waits for queued frames to reach the socket.
    pub fn close(mut self) -> Result<(), TransportError> {
        self.shutdown_writer();
        self.check_writer()
    }

    fn shutdown_writer(&mut self) {
        self.writer_tx.take();
        if let Some(h) = self.writer.take() {
            let _ = h.join();
        }
    }
}

impl Drop for TcpEndpoint {
    fn drop(&mut self) {
        self.shutdown_writer();
    }
}

impl RingTransport for TcpEndpoint {
    fn party(&self) -> PartyId {
        self.party
    }

    fn send_to_next(&mut self, msg: Message) -> Result<(), TransportError> {
        self.check_writer()?;
        if msg.payload.len() > self.max_frame {
            return Err(TransportError::Oversized {
                len: msg.payload.len(),
                cap: self.max_frame,
            });
        }
        let tx = self.writer_tx.as_ref().ok_or(TransportError::Closed)?;
        tx.send(msg.encode()).map_err(|_| TransportError::Closed)?;
        self.counters.record_sent(msg.msg_type, msg.payload.len());
        Ok(())
    }

    fn recv_from_prev(&mut self) -> Result<Message, TransportError> {
        let msg = read_frame(&mut self.from_prev, self.max_frame)?;
        self.counters.record_received(msg.msg_type, msg.payload.len());
        Ok(msg)
    }

    fn counters(&self) -> TrafficCounters {
        self.counters.clone()
    }
}
