use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::message::{MsgType, HEADER_LEN};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectionStats {
    pub messages: u64,
    pub payload_bytes: u64,
    pub framed_bytes: u64,
}

impl DirectionStats {
    fn record(&mut self, payload_len: usize) {
        self.messages += 1;
        self.payload_bytes += payload_len as u64;
        self.framed_bytes += (payload_len + HEADER_LEN) as u64;
    }

    fn add(&mut self, other: &Self) {
        self.messages += other.messages;
        self.payload_bytes += other.payload_bytes;
        self.framed_bytes += other.framed_bytes;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TypeStats {
    pub sent: DirectionStats,
    pub received: DirectionStats,
}

/// Exact per-type traffic of one endpoint. TCP/IP overhead is not counted.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrafficCounters {
    by_type: BTreeMap<MsgType, TypeStats>,
}

impl TrafficCounters {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record_sent(&mut self, ty: MsgType, payload_len: usize) {
        self.by_type.entry(ty).or_default().sent.record(payload_len);
    }

    pub fn record_received(&mut self, ty: MsgType, payload_len: usize) {
        self.by_type.entry(ty).or_default().received.record(payload_len);
    }

    pub fn get(&self, ty: MsgType) -> TypeStats {
        self.by_type.get(&ty).copied().unwrap_or_default()
    }

    pub fn sent(&self, ty: MsgType) -> DirectionStats {
        self.get(ty).sent
    }

    pub fn received(&self, ty: MsgType) -> DirectionStats {
        self.get(ty).received
    }

    pub fn total_sent(&self) -> DirectionStats {
        let mut total = DirectionStats::default();
        for s in self.by_type.values() {
            total.add(&s.sent);
        }
        total
    }

    pub fn total_received(&self) -> DirectionStats {
        let mut total = DirectionStats::default();
        for s in self.by_type.values() {
            total.add(&s.received);
        }
        total
    }

    pub fn is_zero(&self) -> bool {
        self.by_type
            .values()
            .all(|s| *s == TypeStats::default())
    }

    /// `framed == payload + 5 * messages` for every type and direction.
    pub fn framing_consistent(&self) -> bool {
        self.by_type.values().all(|s| {
            [s.sent, s.received]
                .iter()
                .all(|d| d.framed_bytes == d.payload_bytes + HEADER_LEN as u64 * d.messages)
        })
    }

    pub fn merge(&mut self, other: &Self) {
        for (ty, s) in &other.by_type {
            let e = self.by_type.entry(*ty).or_default();
            e.sent.add(&s.sent);
            e.received.add(&s.received);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (MsgType, TypeStats)> + '_ {
        self.by_type.iter().map(|(t, s)| (*t, *s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_counters_are_zero() {
        let c = TrafficCounters::new();
        assert!(c.is_zero());
        assert_eq!(c.sent(MsgType::AndRound), DirectionStats::default());
    }

    #[test]
    fn framed_bytes_include_header() {
        let mut c = TrafficCounters::new();
        c.record_sent(MsgType::AndRound, 680);
        c.record_sent(MsgType::AndRound, 1);
        c.record_received(MsgType::KeyExchange, 16);
        let s = c.sent(MsgType::AndRound);
        assert_eq!((s.messages, s.payload_bytes, s.framed_bytes), (2, 681, 691));
        assert_eq!(c.total_received().framed_bytes, 21);
        assert!(c.framing_consistent());
    }
}
