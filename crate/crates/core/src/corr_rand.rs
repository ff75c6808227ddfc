//! Correlated randomness for AND gates.
//!
//! Party `i` holds its own PRF key `k_i` and its predecessor's `k_{i-1}`.
//! Its stream is `prf(k_i, id) ^ prf(k_{i-1}, id)` for `id = 0, 1, 2, ...`;
//! since every key is held by exactly two adjacent parties, the three
//! streams XOR to zero at every bit position.

use aes::cipher::{BlockEncrypt, KeyInit};
use aes::Aes128;
use rand::{CryptoRng, RngCore};
use thiserror::Error;

use crate::bitvec::BitVector;
use crate::transport::{Message, MsgType, RingTransport, TransportError};

pub const KEY_LEN: usize = 16;
pub const BLOCK_BITS: usize = 128;

/// Correlated-randomness counters live below this value. The upper half of
/// the counter space is reserved for [`SharedStream`].
const ALPHA_COUNTER_END: u128 = 1 << 127;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrfKey([u8; KEY_LEN]);

impl PrfKey {
    pub fn from_bytes(bytes: [u8; KEY_LEN]) -> Self {
        Self(bytes)
    }

    pub fn from_slice(bytes: &[u8]) -> Option<Self> {
        Some(Self(bytes.try_into().ok()?))
    }

    pub fn random<R: RngCore + CryptoRng>(rng: &mut R) -> Self {
        let mut k = [0u8; KEY_LEN];
        rng.fill_bytes(&mut k);
        Self(k)
    }

    pub fn as_bytes(&self) -> &[u8; KEY_LEN] {
        &self.0
    }
}

impl std::fmt::Debug for PrfKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        // Keys stay out of logs.
        f.write_str("PrfKey(..)")
    }
}

/// A keyed 128-bit block function evaluated on counters.
pub trait BlockPrf: Send {
    fn with_key(key: &PrfKey) -> Self
    where
        Self: Sized;

    fn eval(&self, counter: u128) -> [u8; 16];
}

/// AES-128 on the counter encoded as a 16-byte big-endian block.
#[derive(Clone)]
pub struct AesPrf {
    cipher: Aes128,
}

impl BlockPrf for AesPrf {
    fn with_key(key: &PrfKey) -> Self {
        Self {
            cipher: Aes128::new(key.as_bytes().into()),
        }
    }

    fn eval(&self, counter: u128) -> [u8; 16] {
        let mut block = counter.to_be_bytes().into();
        self.cipher.encrypt_block(&mut block);
        block.into()
    }
}

/// NOT SECURE. A fast keyed mixer for deterministic unit tests only; it is
/// a bijection of the counter but offers no pseudorandomness guarantee.
#[derive(Clone)]
pub struct InsecureTestPrf {
    key: u128,
}

impl BlockPrf for InsecureTestPrf {
    fn with_key(key: &PrfKey) -> Self {
        Self {
            key: u128::from_le_bytes(*key.as_bytes()),
        }
    }

    fn eval(&self, counter: u128) -> [u8; 16] {
        let mut z = counter ^ self.key;
        z = (z ^ (z >> 67)).wrapping_mul(0x9e37_79b9_7f4a_7c15_f39c_c060_5ced_c835);
        z ^= z >> 59;
        z.to_le_bytes()
    }
}

/// The reference PRF: AES-128 of the big-endian counter.
pub fn prf_block(key: &PrfKey, counter: u128) -> [u8; 16] {
    AesPrf::with_key(key).eval(counter)
}

#[derive(Debug, Error)]
pub enum CorrRandError {
    #[error("PRF counter exhausted")]
    CounterOverflow,
    #[error("key exchange failed: {0}")]
    Transport(#[from] TransportError),
    #[error("expected KEY_EXCHANGE message, got {0}")]
    UnexpectedMessage(MsgType),
    #[error("key exchange payload must be 16 bytes, got {0}")]
    BadKeyLength(usize),
}

/// Lazily generated correlated bits for one party.
pub struct AlphaStream<P: BlockPrf = AesPrf> {
    own: P,
    peer: P,
    counter: u128,
    buffer: BitVector,
}

impl<P: BlockPrf> AlphaStream<P> {
    /// `key_self` is this party's key, `key_peer` the predecessor's.
    pub fn new(key_self: &PrfKey, key_peer: &PrfKey) -> Self {
        Self {
            own: P::with_key(key_self),
            peer: P::with_key(key_peer),
            counter: 0,
            buffer: BitVector::new(),
        }
    }

    /// Next unused counter value.
    pub fn counter(&self) -> u128 {
        self.counter
    }

    pub fn buffered_bits(&self) -> usize {
        self.buffer.len()
    }

    fn next_block(&mut self) -> Result<BitVector, CorrRandError> {
        if self.counter >= ALPHA_COUNTER_END {
            return Err(CorrRandError::CounterOverflow);
        }
        let a = self.own.eval(self.counter);
        let b = self.peer.eval(self.counter);
        self.counter += 1;
        let mut x = [0u8; 16];
        for i in 0..16 {
            x[i] = a[i] ^ b[i];
        }
        Ok(BitVector::from_byte_slice(&x))
    }

    /// The next `n` correlated bits. Leftover bits of the last block are
    /// kept for the following call.
    pub fn next_alphas(&mut self, n: usize) -> Result<BitVector, CorrRandError> {
        let mut out = BitVector::with_capacity(n);
        let from_buffer = n.min(self.buffer.len());
        out.append_range(&self.buffer, 0, from_buffer);
        self.buffer = self.buffer.slice(from_buffer, self.buffer.len() - from_buffer);
        while out.len() < n {
            let block = self.next_block()?;
            let need = n - out.len();
            if need >= BLOCK_BITS {
                out.append(&block);
            } else {
                out.append_range(&block, 0, need);
                self.buffer = block.slice(need, BLOCK_BITS - need);
            }
        }
        Ok(out)
    }
}

/// Randomness shared by the two holders of one key, drawn from the upper
/// half of the counter space so it never collides with alpha blocks.
pub struct SharedStream<P: BlockPrf = AesPrf> {
    prf: P,
    counter: u128,
    buffer: BitVector,
}

impl<P: BlockPrf> SharedStream<P> {
    pub fn new(key: &PrfKey) -> Self {
        Self {
            prf: P::with_key(key),
            counter: ALPHA_COUNTER_END,
            buffer: BitVector::new(),
        }
    }

    pub fn next_bits(&mut self, n: usize) -> Result<BitVector, CorrRandError> {
        let mut out = BitVector::with_capacity(n);
        let from_buffer = n.min(self.buffer.len());
        out.append_range(&self.buffer, 0, from_buffer);
        self.buffer = self.buffer.slice(from_buffer, self.buffer.len() - from_buffer);
        while out.len() < n {
            let block = BitVector::from_byte_slice(&self.prf.eval(self.counter));
            self.counter = self.counter.checked_add(1).ok_or(CorrRandError::CounterOverflow)?;
            let need = n - out.len();
            if need >= BLOCK_BITS {
                out.append(&block);
            } else {
                out.append_range(&block, 0, need);
                self.buffer = block.slice(need, BLOCK_BITS - need);
            }
        }
        Ok(out)
    }
}

/// Session-start key setup: send a fresh key to the successor, receive the
/// predecessor's. Returns `(key_self, key_peer)`.
pub fn exchange_keys<T, R>(transport: &mut T, rng: &mut R) -> Result<(PrfKey, PrfKey), CorrRandError>
where
    T: RingTransport + ?Sized,
    R: RngCore + CryptoRng,
{
    let own = PrfKey::random(rng);
    transport.send_to_next(Message::new(MsgType::KeyExchange, own.as_bytes().to_vec()))?;
    let msg = transport.recv_from_prev()?;
    if msg.msg_type != MsgType::KeyExchange {
        return Err(CorrRandError::UnexpectedMessage(msg.msg_type));
    }
    let peer = PrfKey::from_slice(&msg.payload).ok_or(CorrRandError::BadKeyLength(msg.payload.len()))?;
    Ok((own, peer))
}
