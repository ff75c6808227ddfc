//! Per-party protocol state machine.
//!
//! A session runs through five phases, in order:
//!
//! 1. **setup**: PRF keys travel once around the ring.
//! 2. **input**: every party ends up holding `(x_i, a_i)` for each input wire.
//! 3. **compute**: layer by layer, local gates are free and all AND gates of
//!    a layer share one `AND_ROUND` message to the successor.
//! 4. **reveal**: the `a` parts of the output wires travel to the output party.
//! 5. **done**.
//!
//! [`PartyState`] drives one party. [`run_local_simulation`] drives all three
//! over the in-memory ring, and is the reference harness for tests.

mod inputs;
mod sim;

use std::fmt;

use rand::{CryptoRng, RngCore};
use serde::Serialize;
use thiserror::Error;

use crate::bitvec::{BitVector, LengthMismatch};
use crate::circuit::{Circuit, GateKind, Layer, Layering};
use crate::corr_rand::{self, AesPrf, AlphaStream, BlockPrf, CorrRandError, PrfKey, SharedStream};
use crate::sharing::{not_local, xor_local, PartyId, ReplicatedShare};
use crate::transport::{Message, MsgType, RingTransport, TransportError};

pub use inputs::{distribute_inputs, GroupInput, InputAssignment};
pub use sim::{drive_party, run_local_simulation, simulate, simulate_tcp_loopback, PartyOutcome, SessionReport, SimulationOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Setup,
    Input,
    Compute,
    Reveal,
    Done,
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Setup => "setup",
            Self::Input => "input",
            Self::Compute => "compute",
            Self::Reveal => "reveal",
            Self::Done => "done",
        })
    }
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error("{phase} phase: {source}")]
    Transport {
        phase: Phase,
        #[source]
        source: TransportError,
    },
    #[error("{phase} phase: {source}")]
    CorrRand {
        phase: Phase,
        #[source]
        source: CorrRandError,
    },
    /// The peers disagree about where the session is. Always fatal.
    #[error("protocol desync in {phase} phase: {detail}")]
    Desync { phase: Phase, detail: String },
    #[error("operation needs phase {expected}, party is in {actual}")]
    WrongPhase { expected: Phase, actual: Phase },
    #[error("bad input: {0}")]
    Input(String),
    #[error(transparent)]
    Length(#[from] LengthMismatch),
    #[error("party thread panicked")]
    Panicked,
}

/// `r = (x ∧ y) ⊕ (a ∧ b) ⊕ α`, the message a party sends for one AND gate.
pub fn and_round_local(
    x: &BitVector,
    a: &BitVector,
    y: &BitVector,
    b: &BitVector,
    alpha: &BitVector,
) -> Result<BitVector, LengthMismatch> {
    let mut r = x.and(y)?;
    r.xor_assign(&a.and(b)?)?;
    r.xor_assign(alpha)?;
    Ok(r)
}

/// The new share after the exchange: `(r ⊕ r_prev, r)`.
pub fn and_round_finalize(r_self: &BitVector, r_prev: &BitVector) -> Result<ReplicatedShare, LengthMismatch> {
    ReplicatedShare::new(r_self.xor(r_prev)?, r_self.clone())
}

/// The `r` values of one AND layer at one party, gate-major then lane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundValues {
    pub r_self: BitVector,
    pub r_prev: BitVector,
}

/// What a party did on the wire, counted in bits rather than bytes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct EngineStats {
    pub and_rounds: usize,
    pub and_payload_bits: u64,
    pub alpha_bits: u64,
    pub input_share_bits: u64,
}

pub struct PartyState<T: RingTransport, P: BlockPrf = AesPrf> {
    id: PartyId,
    lanes: usize,
    transport: T,
    phase: Phase,
    alpha: Option<AlphaStream<P>>,
    // Shared with the successor (our key) and with the predecessor (theirs).
    shared_next: Option<SharedStream<P>>,
    shared_prev: Option<SharedStream<P>>,
    wires: Vec<Option<ReplicatedShare>>,
    pending_r: Option<BitVector>,
    stats: EngineStats,
    rounds: Option<Vec<RoundValues>>,
}

impl<T: RingTransport, P: BlockPrf> PartyState<T, P> {
    pub fn new(transport: T, lanes: usize) -> Self {
        Self {
            id: transport.party(),
            lanes,
            transport,
            phase: Phase::Setup,
            alpha: None,
            shared_next: None,
            shared_prev: None,
            wires: Vec::new(),
            pending_r: None,
            stats: EngineStats::default(),
            rounds: None,
        }
    }

    /// Keep every layer's [`RoundValues`] for inspection.
    pub fn record_rounds(&mut self) {
        self.rounds.get_or_insert_with(Vec::new);
    }

    pub fn party(&self) -> PartyId {
        self.id
    }

    pub fn lanes(&self) -> usize {
        self.lanes
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn stats(&self) -> EngineStats {
        self.stats
    }

    pub fn transport(&self) -> &T {
        &self.transport
    }

    pub fn into_transport(self) -> T {
        self.transport
    }

    pub fn rounds(&self) -> Option<&[RoundValues]> {
        self.rounds.as_deref()
    }

    /// This party's share of wire `w`, if assigned yet.
    pub fn wire(&self, w: usize) -> Option<&ReplicatedShare> {
        self.wires.get(w).and_then(Option::as_ref)
    }

    fn expect_phase(&self, expected: Phase) -> Result<(), EngineError> {
        if self.phase == expected {
            Ok(())
        } else {
            Err(EngineError::WrongPhase {
                expected,
                actual: self.phase,
            })
        }
    }

    fn transport_err(&self, source: TransportError) -> EngineError {
        EngineError::Transport {
            phase: self.phase,
            source,
        }
    }

    fn corr_err(&self, source: CorrRandError) -> EngineError {
        match source {
            CorrRandError::Transport(source) => self.transport_err(source),
            source => EngineError::CorrRand {
                phase: self.phase,
                source,
            },
        }
    }

    fn send(&mut self, ty: MsgType, payload: Vec<u8>) -> Result<(), EngineError> {
        self.transport
            .send_to_next(Message::new(ty, payload))
            .map_err(|e| self.transport_err(e))
    }

    /// Receives one message of type `ty` carrying exactly `bits` bits.
    fn recv_bits(&mut self, ty: MsgType, bits: usize) -> Result<BitVector, EngineError> {
        let msg = self.transport.recv_from_prev().map_err(|e| self.transport_err(e))?;
        if msg.msg_type != ty {
            return Err(EngineError::Desync {
                phase: self.phase,
                detail: format!("expected {ty} from predecessor, got {}", msg.msg_type),
            });
        }
        BitVector::from_bytes(&msg.payload, bits).ok_or_else(|| EngineError::Desync {
            phase: self.phase,
            detail: format!(
                "{ty} payload is {} bytes, expected {} for {bits} bits",
                msg.payload.len(),
                bits.div_ceil(8)
            ),
        })
    }

    /// Runs the key exchange and moves to the input phase.
    pub fn setup<R: RngCore + CryptoRng>(&mut self, rng: &mut R) -> Result<(), EngineError> {
        self.expect_phase(Phase::Setup)?;
        let (own, peer) = corr_rand::exchange_keys(&mut self.transport, rng).map_err(|e| self.corr_err(e))?;
        if own == peer {
            return Err(EngineError::Desync {
                phase: Phase::Setup,
                detail: "predecessor sent back our own key".into(),
            });
        }
        self.setup_with_keys(&own, &peer)
    }

    /// Installs already-agreed keys: `own` is shared with the successor,
    /// `peer` is the predecessor's.
    pub fn setup_with_keys(&mut self, own: &PrfKey, peer: &PrfKey) -> Result<(), EngineError> {
        self.expect_phase(Phase::Setup)?;
        self.alpha = Some(AlphaStream::new(own, peer));
        self.shared_next = Some(SharedStream::new(own));
        self.shared_prev = Some(SharedStream::new(peer));
        self.phase = Phase::Input;
        Ok(())
    }

    /// Fills the input wires, one entry per input group, and moves to the
    /// compute phase. All parties must agree on who provides each group.
    ///
    /// A group provided by party `j` costs one shared draw of `2·width·lanes`
    /// bits between `j - 1` and `j`, and `j` sends `j + 1` its share in a
    /// single `INPUT_SHARES` message; `j - 1` needs no message at all.
    pub fn load_inputs(&mut self, c: &Circuit, groups: Vec<GroupInput>) -> Result<(), EngineError> {
        self.expect_phase(Phase::Input)?;
        if groups.len() != c.input_groups().len() {
            return Err(EngineError::Input(format!(
                "circuit has {} input groups, got {}",
                c.input_groups().len(),
                groups.len()
            )));
        }
        self.wires = vec![None; c.wire_count()];
        let lanes = self.lanes;
        let mut outgoing_x = Vec::new();
        let mut outgoing_a = Vec::new();
        let mut incoming = Vec::new();
        for (g, input) in groups.into_iter().enumerate() {
            let width = c.input_groups()[g];
            let base = c.input_group_offset(g);
            match input {
                GroupInput::Dealt(shares) => {
                    if shares.len() != width || shares.iter().any(|s| s.len() != lanes) {
                        return Err(EngineError::Input(format!("dealt shares for group {g} have the wrong shape")));
                    }
                    for (k, s) in shares.into_iter().enumerate() {
                        self.wires[base + k] = Some(s);
                    }
                }
                GroupInput::Own(values) => {
                    if values.len() != width || values.iter().any(|v| v.len() != lanes) {
                        return Err(EngineError::Input(format!(
                            "group {g} needs {width} wires of {lanes} lanes"
                        )));
                    }
                    let v = BitVector::concat(&values);
                    let (s, t) = self.shared_draw(false, width * lanes)?;
                    let s_v = s.xor(&v)?;
                    let own = ReplicatedShare::new(t.xor(&s_v)?, t.xor(&v)?)?;
                    self.store_group(base, width, own);
                    outgoing_x.push(s_v);
                    outgoing_a.push(t.xor(&s)?);
                }
                GroupInput::Remote(owner) if owner == self.id => {
                    return Err(EngineError::Input(format!("group {g} is ours but no value was given")));
                }
                GroupInput::Remote(owner) if owner == self.id.next() => {
                    let (s, t) = self.shared_draw(true, width * lanes)?;
                    self.store_group(base, width, ReplicatedShare::new(t, s)?);
                }
                GroupInput::Remote(_) => incoming.push((base, width)),
            }
        }
        if !outgoing_x.is_empty() {
            let payload = BitVector::concat(outgoing_x.iter().chain(&outgoing_a));
            self.stats.input_share_bits += payload.len() as u64;
            self.send(MsgType::InputShares, payload.to_bytes())?;
        }
        if !incoming.is_empty() {
            let total: usize = incoming.iter().map(|&(_, w)| w * lanes).sum();
            let bits = self.recv_bits(MsgType::InputShares, 2 * total)?;
            let mut pos = 0;
            for (base, width) in incoming {
                let n = width * lanes;
                let share = ReplicatedShare::new(bits.slice(pos, n), bits.slice(total + pos, n))?;
                self.store_group(base, width, share);
                pos += n;
            }
        }
        self.phase = Phase::Compute;
        Ok(())
    }

    /// `(s, t)` from the stream shared with the successor (`next = true`)
    /// or the predecessor.
    fn shared_draw(&mut self, next: bool, n: usize) -> Result<(BitVector, BitVector), EngineError> {
        let phase = self.phase;
        let stream = if next { &mut self.shared_next } else { &mut self.shared_prev };
        let stream = stream.as_mut().expect("keys are installed in the input phase");
        let err = |source| EngineError::CorrRand { phase, source };
        let s = stream.next_bits(n).map_err(err)?;
        let t = stream.next_bits(n).map_err(err)?;
        Ok((s, t))
    }

    fn store_group(&mut self, base: usize, width: usize, share: ReplicatedShare) {
        let lanes = self.lanes;
        let (x, a) = share.into_parts();
        for k in 0..width {
            let s = ReplicatedShare::new(x.slice(k * lanes, lanes), a.slice(k * lanes, lanes)).expect("same length");
            self.wires[base + k] = Some(s);
        }
    }

    fn get(&self, w: usize) -> Result<&ReplicatedShare, EngineError> {
        self.wire(w).ok_or_else(|| EngineError::Desync {
            phase: self.phase,
            detail: format!("wire {w} used before it was assigned"),
        })
    }

    /// Evaluates the layer's XOR/INV/EQW gates. No communication.
    pub fn eval_local(&mut self, c: &Circuit, layer: &Layer) -> Result<(), EngineError> {
        self.expect_phase(Phase::Compute)?;
        for &i in &layer.local {
            let g = &c.gates()[i];
            let a = self.get(g.inputs()[0])?;
            let out = match g.kind {
                GateKind::Xor => xor_local(a, self.get(g.inputs()[1])?)?,
                GateKind::Inv => not_local(a),
                GateKind::Eqw => a.clone(),
                GateKind::And => unreachable!("AND gates are never local"),
            };
            self.wires[g.output] = Some(out);
        }
        Ok(())
    }

    /// First half of an AND round: draws `gates × lanes` alpha bits, computes
    /// `r` for every AND gate of the layer and sends it to the successor.
    pub fn and_layer_send(&mut self, c: &Circuit, layer: &Layer) -> Result<(), EngineError> {
        self.expect_phase(Phase::Compute)?;
        if layer.and.is_empty() {
            return Ok(());
        }
        let n = layer.and.len() * self.lanes;
        let phase = self.phase;
        let alpha = self
            .alpha
            .as_mut()
            .expect("keys are installed before compute")
            .next_alphas(n)
            .map_err(|source| EngineError::CorrRand { phase, source })?;
        let mut r = BitVector::with_capacity(n);
        for (k, &i) in layer.and.iter().enumerate() {
            let g = &c.gates()[i];
            let (s, t) = (self.get(g.inputs()[0])?, self.get(g.inputs()[1])?);
            let alpha_g = alpha.slice(k * self.lanes, self.lanes);
            r.append(&and_round_local(s.x(), s.a(), t.x(), t.a(), &alpha_g)?);
        }
        self.stats.alpha_bits += n as u64;
        self.stats.and_payload_bits += n as u64;
        self.stats.and_rounds += 1;
        self.send(MsgType::AndRound, r.to_bytes())?;
        self.pending_r = Some(r);
        Ok(())
    }

    /// Second half: receives the predecessor's `r` and finalizes the shares.
    pub fn and_layer_finish(&mut self, c: &Circuit, layer: &Layer) -> Result<(), EngineError> {
        self.expect_phase(Phase::Compute)?;
        if layer.and.is_empty() {
            return Ok(());
        }
        let r_self = self.pending_r.take().ok_or_else(|| EngineError::Desync {
            phase: self.phase,
            detail: "AND round finished before it was started".into(),
        })?;
        let r_prev = self.recv_bits(MsgType::AndRound, r_self.len())?;
        for (k, &i) in layer.and.iter().enumerate() {
            let (lo, n) = (k * self.lanes, self.lanes);
            let share = and_round_finalize(&r_self.slice(lo, n), &r_prev.slice(lo, n))?;
            self.wires[c.gates()[i].output] = Some(share);
        }
        if let Some(rounds) = &mut self.rounds {
            rounds.push(RoundValues { r_self, r_prev });
        }
        Ok(())
    }

    /// Evaluates the whole circuit and moves to the reveal phase. Sends
    /// exactly `layering.and_depth()` `AND_ROUND` messages.
    pub fn run_circuit(&mut self, c: &Circuit, layering: &Layering) -> Result<(), EngineError> {
        self.expect_phase(Phase::Compute)?;
        for layer in layering.layers() {
            self.eval_local(c, layer)?;
            self.and_layer_send(c, layer)?;
            self.and_layer_finish(c, layer)?;
        }
        self.phase = Phase::Reveal;
        Ok(())
    }

    /// This party's shares of the output wires.
    pub fn output_shares(&self, c: &Circuit) -> Result<Vec<ReplicatedShare>, EngineError> {
        c.output_wires().map(|w| self.get(w).cloned()).collect()
    }

    /// Opens the output wires to `output_party`. With `p` its predecessor and
    /// `q` its successor, `q` sends `a_q` to `p`, which sends `a_p` and then
    /// forwards `a_q`. Only the output party gets `Some`.
    pub fn reveal_outputs(&mut self, c: &Circuit, output_party: PartyId) -> Result<Option<Vec<BitVector>>, EngineError> {
        self.expect_phase(Phase::Reveal)?;
        let outs = self.output_shares(c)?;
        let lanes = self.lanes;
        let n = outs.len() * lanes;
        let own_a = BitVector::concat(outs.iter().map(ReplicatedShare::a));
        let result = if self.id == output_party.next() {
            self.send(MsgType::OutputReveal, own_a.to_bytes())?;
            None
        } else if self.id == output_party.prev() {
            let a_q = self.recv_bits(MsgType::OutputReveal, n)?;
            self.send(MsgType::OutputReveal, own_a.to_bytes())?;
            self.send(MsgType::OutputReveal, a_q.to_bytes())?;
            None
        } else {
            let a_p = self.recv_bits(MsgType::OutputReveal, n)?;
            let a_q = self.recv_bits(MsgType::OutputReveal, n)?;
            // a_o ⊕ a_p = x_p ⊕ x_q = x_o when everyone is in step.
            let own_x = BitVector::concat(outs.iter().map(ReplicatedShare::x));
            if own_a.xor(&a_p)? != own_x {
                return Err(EngineError::Desync {
                    phase: self.phase,
                    detail: "predecessor's output shares are inconsistent with ours".into(),
                });
            }
            let v = crate::sharing::reconstruct(&own_a, &a_p, &a_q)?;
            Some((0..outs.len()).map(|k| v.slice(k * lanes, lanes)).collect())
        };
        self.phase = Phase::Done;
        Ok(result)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sharing::{split_secret, validate_bundle_with_secret, ShareBundle};
    use crate::transport::{memory_ring, MemoryRingOptions};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn bit(b: bool) -> BitVector {
        BitVector::from_bools(&[b])
    }

    #[test]
    fn degenerate_sharing_gives_the_and_everywhere() {
        for (v, w) in [(false, false), (false, true), (true, false), (true, true)] {
            let zero = bit(false);
            let r = and_round_local(&zero, &bit(v), &zero, &bit(w), &zero).unwrap();
            assert_eq!(r, bit(v && w));
            let s = and_round_finalize(&r, &r).unwrap();
            assert_eq!((s.x(), s.a()), (&zero, &bit(v && w)));
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let a = BitVector::zeros(3);
        let b = BitVector::zeros(4);
        assert!(and_round_local(&a, &a, &a, &a, &b).is_err());
        assert!(and_round_finalize(&a, &b).is_err());
    }

    #[test]
    fn random_and_evaluations_open_correctly() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let lanes = rng.gen_range(1..70);
            let v = BitVector::random(&mut rng, lanes);
            let w = BitVector::random(&mut rng, lanes);
            let (sv, sw) = (split_secret(&v, &mut rng), split_secret(&w, &mut rng));
            let a1 = BitVector::random(&mut rng, lanes);
            let a2 = BitVector::random(&mut rng, lanes);
            let alphas = [a1.clone(), a2.clone(), a1.xor(&a2).unwrap()];
            let r: Vec<BitVector> = PartyId::ALL
                .iter()
                .map(|&p| {
                    let (s, t) = (sv.share(p), sw.share(p));
                    and_round_local(s.x(), s.a(), t.x(), t.a(), &alphas[p.index()]).unwrap()
                })
                .collect();
            let shares = PartyId::ALL.map(|p| and_round_finalize(&r[p.index()], &r[p.prev().index()]).unwrap());
            let bundle = ShareBundle::from_shares(shares);
            assert!(validate_bundle_with_secret(&bundle, &v.and(&w).unwrap()).is_valid());
        }
    }

    #[test]
    fn phases_only_move_forward() {
        let [e1, _, _] = memory_ring(MemoryRingOptions::default());
        let mut p: PartyState<_> = PartyState::new(e1, 1);
        let c = crate::circuit::bundled::MINIMAL_AND.circuit();
        let l = crate::circuit::layerize(&c);
        assert!(matches!(p.run_circuit(&c, &l), Err(EngineError::WrongPhase { expected: Phase::Compute, .. })));
        p.setup_with_keys(&PrfKey::from_bytes([1; 16]), &PrfKey::from_bytes([2; 16])).unwrap();
        assert_eq!(p.phase(), Phase::Input);
        assert!(p.setup_with_keys(&PrfKey::from_bytes([1; 16]), &PrfKey::from_bytes([2; 16])).is_err());
        assert!(p.reveal_outputs(&c, PartyId::ALL[0]).is_err());
        assert!(Phase::Setup < Phase::Input && Phase::Reveal < Phase::Done);
    }
}
