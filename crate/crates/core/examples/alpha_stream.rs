//! Correlated randomness from pairwise AES keys: each party's alpha
//! stream is AES(k_i, ctr) ^ AES(k_{i-1}, ctr), so the three streams
//! XOR to zero without any communication after key setup.

use rand::rngs::OsRng;
use ringshare::corr_rand::{prf_block, AlphaStream, PrfKey};

fn main() {
    let keys: Vec<PrfKey> = (0..3).map(|_| PrfKey::random(&mut OsRng)).collect();
    let mut streams: Vec<AlphaStream> = (0..3).map(|i| AlphaStream::new(&keys[i], &keys[(i + 2) % 3])).collect();

    let n = 1 << 20;
    let alphas: Vec<_> = streams.iter_mut().map(|s| s.next_alphas(n).unwrap()).collect();
    let sum = alphas[0].xor(&alphas[1]).unwrap().xor(&alphas[2]).unwrap();
    for (i, a) in alphas.iter().enumerate() {
        println!("P{}: {} of {n} alpha bits set ({:.4})", i + 1, a.count_ones(), a.count_ones() as f64 / n as f64);
    }
    println!("alpha1 ^ alpha2 ^ alpha3 is zero: {}", sum.is_zero());
    println!("blocks consumed per party: {}", streams[0].counter());

    // FIPS-197 appendix C.1: the PRF is plain AES-128 on the counter block.
    let key = PrfKey::from_bytes(std::array::from_fn(|i| i as u8));
    let ct = prf_block(&key, u128::from_be_bytes(hex_block("00112233445566778899aabbccddeeff")));
    println!("AES-128 KAT: {}", hex::encode(ct));
}

fn hex_block(s: &str) -> [u8; 16] {
    hex::decode(s).unwrap().try_into().unwrap()
}
