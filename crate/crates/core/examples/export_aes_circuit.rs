//! Write the generated AES-128 circuit in Bristol Fashion, with its
//! metadata sidecar, so other tools can consume it.
//!
//!     cargo run --example export_aes_circuit -- /tmp/aes_128.txt

use std::path::PathBuf;

use ringshare::circuit::metadata::sidecar_path;
use ringshare::circuit::{bundled, eval_single, parse_bristol};

fn main() -> std::io::Result<()> {
    let path = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "aes_128.txt".into()));
    let c = bundled::aes128_expanded();
    let meta = bundled::aes128_expanded_metadata();
    std::fs::write(&path, c.to_bristol())?;
    std::fs::write(sidecar_path(&path), meta.to_text())?;

    // Read it back and run the known-answer vector in the clear.
    let back = parse_bristol(&std::fs::read_to_string(&path)?).expect("round trip");
    let kat = &meta.known_answer_vectors[0];
    let out = eval_single(&back, &meta.encode_inputs(&back, &kat.inputs).unwrap()).unwrap();
    println!("wrote {} ({} gates, {} ANDs)", path.display(), back.gate_count(), back.and_count());
    println!("KAT {}", if meta.decode_outputs(&back, &out) == kat.outputs { "ok" } else { "FAILED" });
    Ok(())
}
