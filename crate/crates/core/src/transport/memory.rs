use std::sync::mpsc::{channel, Receiver, RecvTimeoutError, Sender};
use std::time::Duration;

use crate::sharing::PartyId;

use super::{Message, MsgType, RingTransport, TrafficCounters, TransportError, DEFAULT_MAX_FRAME, DEFAULT_TIMEOUT};

#[derive(Debug, Clone, Copy)]
pub struct MemoryRingOptions {
    pub timeout: Duration,
    pub max_frame: usize,
    /// Keep a copy of every frame sent and received.
    pub record_transcript: bool,
}

impl Default for MemoryRingOptions {
    fn default() -> Self {
        Self {
            timeout: DEFAULT_TIMEOUT,
            max_frame: DEFAULT_MAX_FRAME,
            record_transcript: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TranscriptEntry {
    Sent(Vec<u8>),
    Received(Vec<u8>),
}

/// In-process endpoint. Frames travel as encoded bytes over an unbounded
/// queue, so sends never block.
#[derive(Debug)]
pub struct MemoryEndpoint {
    party: PartyId,
    to_next: Sender<Vec<u8>>,
    from_prev: Receiver<Vec<u8>>,
    counters: TrafficCounters,
    options: MemoryRingOptions,
    transcript: Vec<TranscriptEntry>,
}

/// Three endpoints wired `1 -> 2 -> 3 -> 1`.
pub fn memory_ring(options: MemoryRingOptions) -> [MemoryEndpoint; 3] {
    // link[i] carries frames from party i+1 to its successor.
    let (tx1, rx2) = channel();
    let (tx2, rx3) = channel();
    let (tx3, rx1) = channel();
    let make = |id: u8, to_next, from_prev| MemoryEndpoint {
        party: PartyId::new(id).expect("valid id"),
        to_next,
        from_prev,
        counters: TrafficCounters::new(),
        options,
        transcript: Vec::new(),
    };
    [make(1, tx1, rx1), make(2, tx2, rx2), make(3, tx3, rx3)]
}

impl MemoryEndpoint {
    pub fn transcript(&self) -> &[TranscriptEntry] {
        &self.transcript
    }

    pub fn take_transcript(&mut self) -> Vec<TranscriptEntry> {
        std::mem::take(&mut self.transcript)
    }

    /// Payloads received of one type, in arrival order.
    pub fn received_payloads(&self, ty: MsgType) -> impl Iterator<Item = &[u8]> + '_ {
        self.transcript.iter().filter_map(move |e| match e {
            TranscriptEntry::Received(f) if f[0] == ty as u8 => Some(&f[super::HEADER_LEN..]),
            _ => None,
        })
    }
}

impl RingTransport for MemoryEndpoint {
    fn party(&self) -> PartyId {
        self.party
    }

    fn send_to_next(&mut self, msg: Message) -> Result<(), TransportError> {
        if msg.payload.len() > self.options.max_frame {
            return Err(TransportError::Oversized {
                len: msg.payload.len(),
                cap: self.options.max_frame,
            });
        }
        let frame = msg.encode();
        if self.options.record_transcript {
            self.transcript.push(TranscriptEntry::Sent(frame.clone()));
        }
        self.to_next.send(frame).map_err(|_| TransportError::Closed)?;
        self.counters.record_sent(msg.msg_type, msg.payload.len());
        Ok(())
    }

    fn recv_from_prev(&mut self) -> Result<Message, TransportError> {
        let frame = self
            .from_prev
            .recv_timeout(self.options.timeout)
            .map_err(|e| match e {
                RecvTimeoutError::Timeout => TransportError::Timeout,
                RecvTimeoutError::Disconnected => TransportError::Closed,
            })?;
        let msg = Message::decode(&frame, self.options.max_frame)?;
        self.counters.record_received(msg.msg_type, msg.payload.len());
        if self.options.record_transcript {
            self.transcript.push(TranscriptEntry::Received(frame));
        }
        Ok(msg)
    }

    fn counters(&self) -> TrafficCounters {
        self.counters.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_wiring_follows_successor_order() {
        let [mut p1, mut p2, mut p3] = memory_ring(MemoryRingOptions::default());
        p1.send_to_next(Message::new(MsgType::Control, vec![1])).unwrap();
        p2.send_to_next(Message::new(MsgType::Control, vec![2])).unwrap();
        p3.send_to_next(Message::new(MsgType::Control, vec![3])).unwrap();
        assert_eq!(p2.recv_from_prev().unwrap().payload, vec![1]);
        assert_eq!(p3.recv_from_prev().unwrap().payload, vec![2]);
        assert_eq!(p1.recv_from_prev().unwrap().payload, vec![3]);
    }

    #[test]
    fn fifo_order_and_conservation() {
        let [mut p1, mut p2, _p3] = memory_ring(MemoryRingOptions::default());
        for i in 0..100u8 {
            p1.send_to_next(Message::new(MsgType::AndRound, vec![i; i as usize])).unwrap();
        }
        for i in 0..100u8 {
            assert_eq!(p2.recv_from_prev().unwrap().payload, vec![i; i as usize]);
        }
        assert_eq!(p1.counters().sent(MsgType::AndRound), p2.counters().received(MsgType::AndRound));
        assert!(p1.counters().framing_consistent());
    }

    #[test]
    fn send_completes_before_receiver_asks() {
        // Single-stepped: P1 sends and only afterwards anyone receives.
        let [mut p1, mut p2, _p3] = memory_ring(MemoryRingOptions::default());
        p1.send_to_next(Message::new(MsgType::AndRound, vec![7; 1 << 20])).unwrap();
        assert_eq!(p2.recv_from_prev().unwrap().payload.len(), 1 << 20);
    }

    #[test]
    fn timeout_and_cap() {
        let opts = MemoryRingOptions {
            timeout: Duration::from_millis(20),
            max_frame: 8,
            record_transcript: false,
        };
        let [mut p1, mut p2, _p3] = memory_ring(opts);
        assert!(matches!(p2.recv_from_prev(), Err(TransportError::Timeout)));
        assert!(matches!(
            p1.send_to_next(Message::new(MsgType::AndRound, vec![0; 9])),
            Err(TransportError::Oversized { len: 9, cap: 8 })
        ));
    }

    #[test]
    fn closed_link_is_reported() {
        let [p1, mut p2, _p3] = memory_ring(MemoryRingOptions::default());
        drop(p1);
        assert!(matches!(p2.recv_from_prev(), Err(TransportError::Closed)));
    }
}
