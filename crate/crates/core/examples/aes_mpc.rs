//! AES-128 under MPC: encrypt the FIPS-197 example block with the
//! key-expanded circuit, one input per party, and compare against the
//! known answer.

use std::time::Instant;

use ringshare::circuit::{aes::expand_key, bundled};
use ringshare::engine::{simulate, SimulationOptions};
use ringshare::perf::measure_throughput;
use ringshare::sharing::PartyId;

fn main() {
    let c = bundled::aes128_expanded();
    let meta = bundled::aes128_expanded_metadata();
    let key: [u8; 16] = std::array::from_fn(|i| i as u8);
    let plaintext = "00112233445566778899aabbccddeeff";
    let bits = meta.encode_inputs(c, &[plaintext.to_string(), hex::encode(expand_key(&key))]).unwrap();

    let lanes = 128;
    let inputs: Vec<_> = bits.iter().map(|b| if b { ringshare::bitvec::BitVector::ones(lanes) } else { ringshare::bitvec::BitVector::zeros(lanes) }).collect();

    // P1 owns the plaintext, P2 the key schedule, P3 learns the result.
    let opts = SimulationOptions {
        lanes,
        seed: 7,
        output_party: PartyId::new(3).unwrap(),
        providers: Some(vec![PartyId::new(1).ok(), PartyId::new(2).ok()]),
        ..Default::default()
    };
    let t = Instant::now();
    let report = simulate(c, &inputs, &opts).unwrap();
    let wall = t.elapsed();

    let lane0: ringshare::bitvec::BitVector = report.outputs.iter().map(|w| w.get(0)).collect();
    let ct = &meta.decode_outputs(c, &lane0)[0];
    println!("ciphertext {ct}");
    println!("expected   69c4e0d86a7b0430d8cdb78070b4c55a");
    assert_eq!(ct, "69c4e0d86a7b0430d8cdb78070b4c55a");

    let tp = measure_throughput(&report).unwrap();
    println!(
        "{} blocks in {:.1} ms ({:.1} ms compute): {:.0} AES/s, {:.0} ANDs/s, {} rounds",
        lanes,
        wall.as_secs_f64() * 1e3,
        tp.seconds * 1e3,
        tp.equivalent_aes_per_sec,
        tp.ands_per_sec,
        report.and_depth
    );
}
