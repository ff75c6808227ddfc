//! Split a message into three replicated shares, check the share
//! invariants, and open it again two ways.
//!
//!     cargo run --example share_and_reconstruct -- "attack at dawn"

use rand::rngs::OsRng;
use ringshare::bitvec::BitVector;
use ringshare::sharing::{reconstruct, reconstruct_pairwise, split_secret, validate_bundle, xor_local, PartyId};

fn main() {
    let msg = std::env::args().nth(1).unwrap_or_else(|| "attack at dawn".to_string());
    let secret = BitVector::from_byte_slice(msg.as_bytes());
    let bundle = split_secret(&secret, &mut OsRng);

    for p in PartyId::ALL {
        let s = bundle.share(p);
        println!("{p}: x = {}  a = {}", hex::encode(s.x().to_bytes()), hex::encode(s.a().to_bytes()));
    }
    println!("bundle valid: {}", validate_bundle(&bundle).is_valid());

    let [a1, a2, a3] = bundle.a_parts();
    let opened = reconstruct(a1, a2, a3).unwrap();
    println!("a1 ^ a2 ^ a3      -> {:?}", String::from_utf8_lossy(&opened.to_bytes()));

    // Any two parties suffice: P2's a part with P1's x part.
    let p2 = PartyId::new(2).unwrap();
    let pair = reconstruct_pairwise(bundle.share(p2), bundle.share(p2.prev()).x()).unwrap();
    println!("a2 ^ x1           -> {:?}", String::from_utf8_lossy(&pair.to_bytes()));

    // XOR is local: sharing the message twice and XOR-ing cancels it.
    let again = split_secret(&secret, &mut OsRng);
    let zero = bundle.zip_with(&again, xor_local).unwrap();
    println!("share(m) ^ share(m) opens to zero: {}", zero.reveal().unwrap().is_zero());
}
