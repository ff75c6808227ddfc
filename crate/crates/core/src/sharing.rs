//! Replicated boolean shares and the local (communication-free) operations
//! on them.
//!
//! Party `i` holds `(x_i, a_i)` where the three `x` parts XOR to zero and
//! `a_i = x_{i-1} ^ v`. XOR and NOT are local; AND lives in
//! [`crate::engine`] because it needs one ring message.

use std::fmt;

use rand::{CryptoRng, RngCore};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitvec::{BitVector, LengthMismatch};

pub const PARTY_COUNT: usize = 3;
pub const CORRUPTION_THRESHOLD: usize = 1;
pub const DEFAULT_LANE_COUNT: usize = 128;

/// A party index in `1..=3`. Arithmetic wraps, so `prev(1) == 3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct PartyId(u8);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("party id {0} is not in 1..=3")]
pub struct InvalidPartyId(pub u64);

impl PartyId {
    pub const ALL: [PartyId; 3] = [PartyId(1), PartyId(2), PartyId(3)];

    pub fn new(id: u8) -> Result<Self, InvalidPartyId> {
        match id {
            1..=3 => Ok(Self(id)),
            _ => Err(InvalidPartyId(id as u64)),
        }
    }

    /// Canonical modular index: any integer maps to `1..=3`, with 0 ≡ 3.
    pub fn wrap(i: i64) -> Self {
        Self((i - 1).rem_euclid(PARTY_COUNT as i64) as u8 + 1)
    }

    pub fn get(self) -> u8 {
        self.0
    }

    /// Zero-based position, for indexing `[T; 3]`.
    pub fn index(self) -> usize {
        self.0 as usize - 1
    }

    pub fn next(self) -> Self {
        Self::wrap(self.0 as i64 + 1)
    }

    pub fn prev(self) -> Self {
        Self::wrap(self.0 as i64 - 1)
    }
}

impl TryFrom<u8> for PartyId {
    type Error = InvalidPartyId;

    fn try_from(value: u8) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<PartyId> for u8 {
    fn from(p: PartyId) -> u8 {
        p.0
    }
}

impl fmt::Display for PartyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

/// Fixed protocol parameters plus the batch width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolConfig {
    lane_count: usize,
}

impl ProtocolConfig {
    pub fn new(lane_count: usize) -> Option<Self> {
        (lane_count > 0).then_some(Self { lane_count })
    }

    pub fn party_count(&self) -> usize {
        PARTY_COUNT
    }

    pub fn corruption_threshold(&self) -> usize {
        CORRUPTION_THRESHOLD
    }

    pub fn lane_count(&self) -> usize {
        self.lane_count
    }
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            lane_count: DEFAULT_LANE_COUNT,
        }
    }
}

/// One party's share of a lane-vectorized secret.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReplicatedShare {
    x: BitVector,
    a: BitVector,
}

impl ReplicatedShare {
    pub fn new(x: BitVector, a: BitVector) -> Result<Self, LengthMismatch> {
        LengthMismatch::check(x.len(), a.len())?;
        Ok(Self { x, a })
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            x: BitVector::zeros(len),
            a: BitVector::zeros(len),
        }
    }

    /// The additive component, `x_i`.
    pub fn x(&self) -> &BitVector {
        &self.x
    }

    /// The masked component, `a_i = x_{i-1} ^ v`.
    pub fn a(&self) -> &BitVector {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn into_parts(self) -> (BitVector, BitVector) {
        (self.x, self.a)
    }
}

/// All three shares of one secret; the dealer's (or a test harness's) view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareBundle {
    shares: [ReplicatedShare; 3],
}

impl ShareBundle {
    pub fn from_shares(shares: [ReplicatedShare; 3]) -> Self {
        Self { shares }
    }

    pub fn share(&self, party: PartyId) -> &ReplicatedShare {
        &self.shares[party.index()]
    }

    pub fn share_mut(&mut self, party: PartyId) -> &mut ReplicatedShare {
        &mut self.shares[party.index()]
    }

    pub fn shares(&self) -> &[ReplicatedShare; 3] {
        &self.shares
    }

    pub fn into_shares(self) -> [ReplicatedShare; 3] {
        self.shares
    }

    pub fn a_parts(&self) -> [&BitVector; 3] {
        [&self.shares[0].a, &self.shares[1].a, &self.shares[2].a]
    }

    /// XOR of the three `a` parts.
    pub fn reveal(&self) -> Result<BitVector, LengthMismatch> {
        let [a1, a2, a3] = self.a_parts();
        reconstruct(a1, a2, a3)
    }

    /// Applies a per-party local operation to every share.
    pub fn map(&self, f: impl Fn(&ReplicatedShare) -> ReplicatedShare) -> Self {
        Self {
            shares: [f(&self.shares[0]), f(&self.shares[1]), f(&self.shares[2])],
        }
    }

    pub fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&ReplicatedShare, &ReplicatedShare) -> Result<ReplicatedShare, LengthMismatch>,
    ) -> Result<Self, LengthMismatch> {
        Ok(Self {
            shares: [
                f(&self.shares[0], &other.shares[0])?,
                f(&self.shares[1], &other.shares[1])?,
                f(&self.shares[2], &other.shares[2])?,
            ],
        })
    }
}

/// Assembles a bundle from the dealer's `x` parts and the secret.
fn bundle_from_x_parts(x: [BitVector; 3], v: &BitVector) -> ShareBundle {
    let shares = PartyId::ALL.map(|p| {
        let a = x[p.prev().index()].xor(v).expect("x parts match the secret length");
        ReplicatedShare {
            x: x[p.index()].clone(),
            a,
        }
    });
    ShareBundle { shares }
}

/// Dealer-side sharing: `x_1, x_2` uniform, `x_3 = x_1 ^ x_2`,
/// `a_i = x_{i-1} ^ v`.
pub fn split_secret<R: RngCore + CryptoRng>(v: &BitVector, rng: &mut R) -> ShareBundle {
    let x1 = BitVector::random(rng, v.len());
    let x2 = BitVector::random(rng, v.len());
    split_secret_with(v, x1, x2)
}

/// [`split_secret`] with the two free `x` parts supplied by the caller.
pub fn split_secret_with(v: &BitVector, x1: BitVector, x2: BitVector) -> ShareBundle {
    assert_eq!(x1.len(), v.len(), "x_1 length");
    assert_eq!(x2.len(), v.len(), "x_2 length");
    let x3 = x1.xor(&x2).expect("checked above");
    bundle_from_x_parts([x1, x2, x3], v)
}

/// Deterministic sharing of a public constant: all `x` parts zero, every
/// `a` part equal to `v`.
pub fn share_constant(v: &BitVector) -> ShareBundle {
    let zero = BitVector::zeros(v.len());
    bundle_from_x_parts([zero.clone(), zero.clone(), zero], v)
}

pub fn reconstruct(a1: &BitVector, a2: &BitVector, a3: &BitVector) -> Result<BitVector, LengthMismatch> {
    let mut out = a1.xor(a2)?;
    out.xor_assign(a3)?;
    Ok(out)
}

/// Recovers the secret from party `i`'s share and `x_{i-1}`, which any
/// second party can supply.
pub fn reconstruct_pairwise(share: &ReplicatedShare, x_prev: &BitVector) -> Result<BitVector, LengthMismatch> {
    share.a.xor(x_prev)
}

pub fn xor_local(s: &ReplicatedShare, t: &ReplicatedShare) -> Result<ReplicatedShare, LengthMismatch> {
    Ok(ReplicatedShare {
        x: s.x.xor(&t.x)?,
        a: s.a.xor(&t.a)?,
    })
}

/// Flips `a`, keeps `x`. Equivalent to XOR with `share_constant(1…1)`.
pub fn not_local(s: &ReplicatedShare) -> ReplicatedShare {
    ReplicatedShare {
        x: s.x.clone(),
        a: s.a.not(),
    }
}

/// Which bundle invariants hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BundleReport {
    pub lengths_equal: bool,
    pub x_sum_zero: bool,
    pub pairwise_consistent: bool,
    /// Whether the bundle opens to the expected secret; `None` when no
    /// secret was supplied.
    pub opens_to_secret: Option<bool>,
}

impl BundleReport {
    pub fn is_valid(&self) -> bool {
        self.lengths_equal && self.x_sum_zero && self.pairwise_consistent && self.opens_to_secret != Some(false)
    }
}

pub fn validate_bundle(b: &ShareBundle) -> BundleReport {
    let len = b.shares[0].len();
    let lengths_equal = b
        .shares
        .iter()
        .all(|s| s.x.len() == len && s.a.len() == len);
    if !lengths_equal {
        return BundleReport {
            lengths_equal,
            x_sum_zero: false,
            pairwise_consistent: false,
            opens_to_secret: None,
        };
    }
    let x = |p: PartyId| &b.shares[p.index()].x;
    let a = |p: PartyId| &b.shares[p.index()].a;
    let x_sum_zero = reconstruct(x(PartyId(1)), x(PartyId(2)), x(PartyId(3)))
        .map(|s| s.is_zero())
        .unwrap_or(false);
    // a_i ^ a_j == x_{i-1} ^ x_{j-1} for each unordered pair.
    let pairwise_consistent = [(1u8, 2u8), (2, 3), (3, 1)].iter().all(|&(i, j)| {
        let (i, j) = (PartyId(i), PartyId(j));
        let lhs = a(i).xor(a(j)).expect("lengths checked");
        let rhs = x(i.prev()).xor(x(j.prev())).expect("lengths checked");
        lhs == rhs
    });
    BundleReport {
        lengths_equal,
        x_sum_zero,
        pairwise_consistent,
        opens_to_secret: None,
    }
}

/// [`validate_bundle`] plus a check that the bundle opens to `v`.
pub fn validate_bundle_with_secret(b: &ShareBundle, v: &BitVector) -> BundleReport {
    let mut report = validate_bundle(b);
    if report.lengths_equal {
        report.opens_to_secret = Some(b.reveal().map(|r| &r == v).unwrap_or(false));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn bit(b: bool) -> BitVector {
        BitVector::from_bools(&[b])
    }

    fn p(i: u8) -> PartyId {
        PartyId::new(i).unwrap()
    }

    #[test]
    fn party_index_wraps() {
        assert_eq!(p(1).prev(), p(3));
        assert_eq!(p(3).next(), p(1));
        assert_eq!(PartyId::wrap(0), p(3));
        assert_eq!(PartyId::wrap(4), p(1));
        assert_eq!(PartyId::wrap(-1), p(2));
        assert!(PartyId::new(0).is_err());
        assert!(PartyId::new(4).is_err());
    }

    #[test]
    fn protocol_constants() {
        let cfg = ProtocolConfig::default();
        assert_eq!(cfg.party_count(), 3);
        assert_eq!(cfg.corruption_threshold(), 1);
        assert_eq!(cfg.lane_count(), 128);
        assert!(ProtocolConfig::new(0).is_none());
    }

    #[test]
    fn split_zero_with_zero_randomness() {
        let b = split_secret_with(&bit(false), bit(false), bit(false));
        for s in b.shares() {
            assert_eq!(s.x(), &bit(false));
            assert_eq!(s.a(), &bit(false));
        }
    }

    #[test]
    fn split_one_with_forced_randomness() {
        // x = (1, 0, 1)
        let b = split_secret_with(&bit(true), bit(true), bit(false));
        assert_eq!(b.share(p(3)).x(), &bit(true));
        assert_eq!(b.share(p(1)).a(), &bit(false));
        assert_eq!(b.share(p(2)).a(), &bit(false));
        assert_eq!(b.share(p(3)).a(), &bit(true));
        assert_eq!(b.reveal().unwrap(), bit(true));
        // pairwise from P1's share and x_3
        assert_eq!(reconstruct_pairwise(b.share(p(1)), b.share(p(3)).x()).unwrap(), bit(true));
    }

    #[test]
    fn reconstruct_examples() {
        assert_eq!(reconstruct(&bit(false), &bit(false), &bit(false)).unwrap(), bit(false));
        assert_eq!(reconstruct(&bit(false), &bit(false), &bit(true)).unwrap(), bit(true));
        assert!(reconstruct(&bit(false), &BitVector::zeros(2), &bit(true)).is_err());
        let zero = ReplicatedShare::zeros(1);
        assert_eq!(reconstruct_pairwise(&zero, &bit(false)).unwrap(), bit(false));
        assert!(reconstruct_pairwise(&zero, &BitVector::zeros(2)).is_err());
    }

    #[test]
    fn constant_sharing() {
        let one = share_constant(&bit(true));
        for s in one.shares() {
            assert_eq!(s.x(), &bit(false));
            assert_eq!(s.a(), &bit(true));
        }
        assert_eq!(one.reveal().unwrap(), bit(true));
        assert!(validate_bundle(&one).is_valid());
        let zero = share_constant(&bit(false));
        assert!(zero.shares().iter().all(|s| s.x().is_zero() && s.a().is_zero()));
    }

    #[test]
    fn constant_plus_secret() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        for _ in 0..100 {
            let v = BitVector::random(&mut rng, 16);
            let w = BitVector::random(&mut rng, 16);
            let sum = share_constant(&v)
                .zip_with(&split_secret(&w, &mut rng), xor_local)
                .unwrap();
            assert_eq!(sum.reveal().unwrap(), v.xor(&w).unwrap());
            assert!(validate_bundle(&sum).is_valid());
        }
    }

    #[test]
    fn xor_self_is_zero() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let b = split_secret(&BitVector::random(&mut rng, 40), &mut rng);
        let z = b.zip_with(&b, xor_local).unwrap();
        assert!(z.shares().iter().all(|s| s.x().is_zero() && s.a().is_zero()));
        let ones = split_secret(&bit(true), &mut rng);
        let ones2 = split_secret(&bit(true), &mut rng);
        assert_eq!(ones.zip_with(&ones2, xor_local).unwrap().reveal().unwrap(), bit(false));
        assert!(xor_local(&ReplicatedShare::zeros(1), &ReplicatedShare::zeros(2)).is_err());
    }

    #[test]
    fn xor_homomorphism() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let len = rng.gen_range(1..70);
            let v = BitVector::random(&mut rng, len);
            let w = BitVector::random(&mut rng, len);
            let sum = split_secret(&v, &mut rng)
                .zip_with(&split_secret(&w, &mut rng), xor_local)
                .unwrap();
            assert_eq!(sum.reveal().unwrap(), v.xor(&w).unwrap());
        }
    }

    #[test]
    fn not_flips_and_is_an_involution() {
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        let b = split_secret(&bit(false), &mut rng);
        let n = b.map(not_local);
        assert_eq!(n.reveal().unwrap(), bit(true));
        assert!(validate_bundle(&n).is_valid());
        assert_eq!(n.map(not_local), b);
    }

    #[test]
    fn split_round_trip_and_pairwise_agreement() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        for _ in 0..10_000 {
            let v = BitVector::random(&mut rng, 128);
            let b = split_secret(&v, &mut rng);
            assert_eq!(b.reveal().unwrap(), v);
        }
        for _ in 0..1000 {
            let v = BitVector::random(&mut rng, 33);
            let b = split_secret(&v, &mut rng);
            for party in PartyId::ALL {
                let got = reconstruct_pairwise(b.share(party), b.share(party.prev()).x()).unwrap();
                assert_eq!(got, b.reveal().unwrap());
            }
        }
    }

    #[test]
    fn repeated_sharing_of_one_always_opens() {
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        for _ in 0..10_000 {
            let b = split_secret(&bit(true), &mut rng);
            assert_eq!(b.reveal().unwrap(), bit(true));
        }
    }

    #[test]
    fn single_bit_corruptions_are_detected() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let v = BitVector::random(&mut rng, 24);
            let b = split_secret(&v, &mut rng);
            assert!(validate_bundle_with_secret(&b, &v).is_valid());

            let party = PartyId::ALL[rng.gen_range(0..3)];
            let pos = rng.gen_range(0..24);
            let flip_x = rng.gen_bool(0.5);
            let mut bad = b.clone();
            let s = bad.share_mut(party);
            let (mut x, mut a) = s.clone().into_parts();
            if flip_x {
                x.set(pos, !x.get(pos));
            } else {
                a.set(pos, !a.get(pos));
            }
            *s = ReplicatedShare::new(x, a).unwrap();
            let report = validate_bundle(&bad);
            assert!(!report.is_valid(), "corruption not detected: {report:?}");
            if flip_x {
                assert!(!report.x_sum_zero);
            }
        }
    }

    #[test]
    fn ragged_bundle_reports_length_failure() {
        let b = ShareBundle::from_shares([
            ReplicatedShare::zeros(2),
            ReplicatedShare::zeros(2),
            ReplicatedShare::zeros(3),
        ]);
        let r = validate_bundle(&b);
        assert!(!r.lengths_equal && !r.is_valid());
    }

    #[test]
    fn single_party_views_look_uniform() {
        let mut rng = ChaCha20Rng::seed_from_u64(8);
        let trials = 10_000;
        let mut freq = [[[0usize; 2]; 3]; 2]; // [secret][party][x or a]
        for (vi, v) in [false, true].into_iter().enumerate() {
            for _ in 0..trials {
                let b = split_secret(&bit(v), &mut rng);
                for party in PartyId::ALL {
                    let s = b.share(party);
                    freq[vi][party.index()][0] += s.x().get(0) as usize;
                    freq[vi][party.index()][1] += s.a().get(0) as usize;
                }
            }
        }
        for party in 0..3 {
            for part in 0..2 {
                let f0 = freq[0][party][part] as f64 / trials as f64;
                let f1 = freq[1][party][part] as f64 / trials as f64;
                assert!((0.48..=0.52).contains(&f0), "{f0}");
                assert!((0.48..=0.52).contains(&f1), "{f1}");
                assert!((f0 - f1).abs() <= 0.03);
            }
        }
    }
}
