//! Circuits shipped with the crate, each with its sidecar metadata.

use std::sync::OnceLock;

use super::metadata::{BitOrder, CircuitMetadata, KnownAnswer};
use super::{aes, parse_bristol, Circuit};

#[derive(Debug, Clone, Copy)]
pub struct BundledCircuit {
    pub name: &'static str,
    pub bristol: &'static str,
    pub metadata: &'static str,
}

impl BundledCircuit {
    pub fn circuit(&self) -> Circuit {
        parse_bristol(self.bristol).expect("bundled circuits parse")
    }

    pub fn metadata(&self) -> CircuitMetadata {
        CircuitMetadata::parse(self.metadata).expect("bundled metadata parses")
    }
}

macro_rules! bundled {
    ($name:literal) => {
        BundledCircuit {
            name: $name,
            bristol: include_str!(concat!("../../circuits/", $name, ".txt")),
            metadata: include_str!(concat!("../../circuits/", $name, ".meta")),
        }
    };
}

pub const MINIMAL_AND: BundledCircuit = bundled!("minimal_and");
pub const XOR_CHAIN: BundledCircuit = bundled!("xor_chain");
pub const FULL_ADDER: BundledCircuit = bundled!("full_adder");
pub const COMPARATOR8: BundledCircuit = bundled!("comparator8");

pub const ALL: [BundledCircuit; 4] = [MINIMAL_AND, XOR_CHAIN, FULL_ADDER, COMPARATOR8];

/// Name under which the generated AES circuit is addressed.
pub const AES_NAME: &str = "aes128_expanded";

/// The generated key-expanded AES-128 circuit (built once, then cached).
pub fn aes128_expanded() -> &'static Circuit {
    static AES: OnceLock<Circuit> = OnceLock::new();
    AES.get_or_init(aes::key_expanded_aes128)
}

/// Sidecar for [`aes128_expanded`], with the FIPS-197 example vector.
pub fn aes128_expanded_metadata() -> CircuitMetadata {
    let key: [u8; 16] = std::array::from_fn(|i| i as u8);
    CircuitMetadata {
        input_group_roles: vec!["plaintext".into(), "expanded_key".into()],
        output_group_roles: vec!["ciphertext".into()],
        bit_order: BitOrder::MsbFirst,
        known_answer_vectors: vec![KnownAnswer {
            inputs: vec!["00112233445566778899aabbccddeeff".into(), hex::encode(aes::expand_key(&key))],
            outputs: vec!["69c4e0d86a7b0430d8cdb78070b4c55a".into()],
        }],
    }
}

/// Looks a circuit up by name, including the generated AES circuit.
pub fn by_name(name: &str) -> Option<(Circuit, CircuitMetadata)> {
    if name == AES_NAME {
        return Some((aes128_expanded().clone(), aes128_expanded_metadata()));
    }
    ALL.iter().find(|b| b.name == name).map(|b| (b.circuit(), b.metadata()))
}
