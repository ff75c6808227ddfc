//! Three-party replicated boolean secret sharing over a ring.
//!
//! Each party `i` holds a pair `(x_i, a_i)` of bit vectors with
//! `x_1 ^ x_2 ^ x_3 = 0` and `a_i = x_{i-1} ^ v`. XOR and NOT are local;
//! every AND costs one bit per lane sent to the ring successor, masked by
//! correlated randomness drawn from pairwise AES-128 keys. Circuits come in
//! Bristol Fashion and are evaluated layer by layer, one communication
//! round per AND depth, on many independent instances ("lanes") at once.
//!
//! - [`sharing`]: share, reconstruct and check bundles.
//! - [`corr_rand`]: the AES PRF, alpha streams and key exchange.
//! - [`circuit`]: parsing, validation, layering, clear evaluation, and
//!   the built-in circuits including a generated key-expanded AES-128.
//! - [`engine`]: per-party protocol state machine plus in-process and
//!   loopback drivers.
//! - [`transport`]: framed messages over an in-memory ring or TCP.
//! - [`perf`]: analytic throughput models and measured rates.
//! - [`sharefile`]: the on-disk share format.
//! - [`cli`]: the `ringshare` command line.
//!
//! ```
//! use ringshare::bitvec::BitVector;
//! use ringshare::circuit::bundled;
//! use ringshare::engine::run_local_simulation;
//!
//! let c = bundled::MINIMAL_AND.circuit();
//! let one = BitVector::ones(4);
//! let report = run_local_simulation(&c, &[one.clone(), one.clone()], 4, 1).unwrap();
//! assert_eq!(report.outputs, vec![one]);
//! ```

pub mod bitvec;
pub mod circuit;
pub mod cli;
pub mod corr_rand;
pub mod engine;
pub mod perf;
pub mod sharefile;
pub mod sharing;
pub mod transport;
