//! A key-expanded AES-128 circuit.
//!
//! Inputs are the 128-bit plaintext followed by the 1408-bit expanded key
//! (eleven round keys); the output is the 128-bit ciphertext. Each group is
//! a byte string in FIPS-197 order, most significant bit of each byte first.
//! SubBytes uses a 34-AND S-box, so the whole cipher costs 160 × 34 = 5440
//! AND gates.

use super::{Circuit, CircuitBuilder, Wire};

pub const AES_AND_GATES: usize = 5440;
pub const PLAINTEXT_BITS: usize = 128;
pub const EXPANDED_KEY_BITS: usize = 11 * 128;

/// One byte as 8 wires, most significant bit first.
type Byte = [Wire; 8];

/// AES S-box on `u[0..8]` (u[0] = MSB). 34 AND gates.
pub fn sbox(b: &mut CircuitBuilder, u: &Byte) -> Byte {
    let x = |b: &mut CircuitBuilder, p: Wire, q: Wire| b.xor(p, q);

    // Top linear layer.
    let t1 = x(b, u[0], u[3]);
    let t2 = x(b, u[0], u[5]);
    let t3 = x(b, u[0], u[6]);
    let t4 = x(b, u[3], u[5]);
    let t5 = x(b, u[4], u[6]);
    let t6 = x(b, t1, t5);
    let t7 = x(b, u[1], u[2]);
    let t8 = x(b, u[7], t6);
    let t9 = x(b, u[7], t7);
    let t10 = x(b, t6, t7);
    let t11 = x(b, u[1], u[5]);
    let t12 = x(b, u[2], u[5]);
    let t13 = x(b, t3, t4);
    let t14 = x(b, t6, t11);
    let t15 = x(b, t5, t11);
    let t16 = x(b, t5, t12);
    let t17 = x(b, t9, t16);
    let t18 = x(b, u[3], u[7]);
    let t19 = x(b, t7, t18);
    let t20 = x(b, t1, t19);
    let t21 = x(b, u[6], u[7]);
    let t22 = x(b, t7, t21);
    let t23 = x(b, t2, t22);
    let t24 = x(b, t2, t10);
    let t25 = x(b, t20, t17);
    let t26 = x(b, t3, t16);
    let t27 = x(b, t1, t12);

    // Shared nonlinear core (GF(2^4) inversion).
    let m1 = b.and(t13, t6);
    let m2 = b.and(t23, t8);
    let m3 = x(b, t14, m1);
    let m4 = b.and(t19, u[7]);
    let m5 = x(b, m4, m1);
    let m6 = b.and(t3, t16);
    let m7 = b.and(t22, t9);
    let m8 = x(b, t26, m6);
    let m9 = b.and(t20, t17);
    let m10 = x(b, m9, m6);
    let m11 = b.and(t1, t15);
    let m12 = b.and(t4, t27);
    let m13 = x(b, m12, m11);
    let m14 = b.and(t2, t10);
    let m15 = x(b, m14, m11);
    let m16 = x(b, m3, m2);
    let m17 = x(b, m5, t24);
    let m18 = x(b, m8, m7);
    let m19 = x(b, m10, m15);
    let m20 = x(b, m16, m13);
    let m21 = x(b, m17, m15);
    let m22 = x(b, m18, m13);
    let m23 = x(b, m19, t25);
    let m24 = x(b, m22, m23);
    let m25 = b.and(m22, m20);
    let m26 = x(b, m21, m25);
    let m27 = x(b, m20, m21);
    let m28 = x(b, m23, m25);
    let m29 = b.and(m28, m27);
    let m30 = b.and(m26, m24);
    let m31 = b.and(m20, m23);
    let m32 = b.and(m27, m31);
    let m33 = x(b, m27, m25);
    let m34 = b.and(m21, m22);
    let m35 = b.and(m24, m34);
    let m36 = x(b, m24, m25);
    let m37 = x(b, m21, m29);
    let m38 = x(b, m32, m33);
    let m39 = x(b, m23, m30);
    let m40 = x(b, m35, m36);
    let m41 = x(b, m38, m40);
    let m42 = x(b, m37, m39);
    let m43 = x(b, m37, m38);
    let m44 = x(b, m39, m40);
    let m45 = x(b, m42, m41);
    let m46 = b.and(m44, t6);
    let m47 = b.and(m40, t8);
    let m48 = b.and(m39, u[7]);
    let m49 = b.and(m43, t16);
    let m50 = b.and(m38, t9);
    let m51 = b.and(m37, t17);
    let m52 = b.and(m42, t15);
    let m53 = b.and(m45, t27);
    let m54 = b.and(m41, t10);
    let m55 = b.and(m44, t13);
    let m56 = b.and(m40, t23);
    let m57 = b.and(m39, t19);
    let m58 = b.and(m43, t3);
    let m59 = b.and(m38, t22);
    let m60 = b.and(m37, t20);
    let m61 = b.and(m42, t1);
    let m62 = b.and(m45, t4);
    let m63 = b.and(m41, t2);

    // Bottom linear layer.
    let l0 = x(b, m61, m62);
    let l1 = x(b, m50, m56);
    let l2 = x(b, m46, m48);
    let l3 = x(b, m47, m55);
    let l4 = x(b, m54, m58);
    let l5 = x(b, m49, m61);
    let l6 = x(b, m62, l5);
    let l7 = x(b, m46, l3);
    let l8 = x(b, m51, m59);
    let l9 = x(b, m52, m53);
    let l10 = x(b, m53, l4);
    let l11 = x(b, m60, l2);
    let l12 = x(b, m48, m51);
    let l13 = x(b, m50, l0);
    let l14 = x(b, m52, m61);
    let l15 = x(b, m55, l1);
    let l16 = x(b, m56, l0);
    let l17 = x(b, m57, l1);
    let l18 = x(b, m58, l8);
    let l19 = x(b, m63, l4);
    let l20 = x(b, l0, l1);
    let l21 = x(b, l1, l7);
    let l22 = x(b, l3, l12);
    let l23 = x(b, l18, l2);
    let l24 = x(b, l15, l9);
    let l25 = x(b, l6, l10);
    let l26 = x(b, l7, l9);
    let l27 = x(b, l8, l10);
    let l28 = x(b, l11, l14);
    let l29 = x(b, l11, l17);

    [
        x(b, l6, l24),
        b.xnor(l16, l26),
        b.xnor(l19, l28),
        x(b, l6, l21),
        x(b, l20, l22),
        x(b, l25, l29),
        b.xnor(l13, l27),
        b.xnor(l6, l23),
    ]
}

fn xor_byte(b: &mut CircuitBuilder, p: &Byte, q: &Byte) -> Byte {
    std::array::from_fn(|i| b.xor(p[i], q[i]))
}

/// Multiplication by x in GF(2^8); the reduction polynomial is 0x1b.
fn xtime(b: &mut CircuitBuilder, s: &Byte) -> Byte {
    let hi = s[0];
    [
        s[1],
        s[2],
        s[3],
        b.xor(s[4], hi),
        b.xor(s[5], hi),
        s[6],
        b.xor(s[7], hi),
        hi,
    ]
}

fn mix_column(b: &mut CircuitBuilder, col: [Byte; 4]) -> [Byte; 4] {
    // r_i = s_i ^ t ^ xtime(s_i ^ s_{i+1}), t = s_0 ^ s_1 ^ s_2 ^ s_3
    let t01 = xor_byte(b, &col[0], &col[1]);
    let t23 = xor_byte(b, &col[2], &col[3]);
    let t = xor_byte(b, &t01, &t23);
    std::array::from_fn(|i| {
        let pair = xor_byte(b, &col[i], &col[(i + 1) % 4]);
        let xt = xtime(b, &pair);
        let st = xor_byte(b, &col[i], &t);
        xor_byte(b, &st, &xt)
    })
}

fn bytes_of(wires: &[Wire]) -> Vec<Byte> {
    wires.chunks(8).map(|c| c.try_into().expect("8 wires")).collect()
}

/// Builds the key-expanded AES-128 circuit.
pub fn key_expanded_aes128() -> Circuit {
    let mut b = CircuitBuilder::new();
    let pt = b.input_group(PLAINTEXT_BITS);
    let key = b.input_group(EXPANDED_KEY_BITS);
    let round_keys: Vec<Vec<Byte>> = key.chunks(128).map(bytes_of).collect();

    // State byte r + 4c sits at row r, column c.
    let mut state: Vec<Byte> = bytes_of(&pt)
        .iter()
        .zip(&round_keys[0])
        .map(|(s, k)| xor_byte(&mut b, s, k))
        .collect();

    for round in 1..=10 {
        let sub: Vec<Byte> = state.iter().map(|s| sbox(&mut b, s)).collect();
        let shifted: Vec<Byte> = (0..16)
            .map(|i| {
                let (r, c) = (i % 4, i / 4);
                sub[r + 4 * ((c + r) % 4)]
            })
            .collect();
        let mixed = if round < 10 {
            (0..4)
                .flat_map(|c| mix_column(&mut b, std::array::from_fn(|r| shifted[4 * c + r])))
                .collect()
        } else {
            shifted
        };
        state = mixed
            .iter()
            .zip(&round_keys[round])
            .map(|(s, k)| xor_byte(&mut b, s, k))
            .collect();
    }
    let out: Vec<Wire> = state.iter().flatten().copied().collect();
    b.build(&[out])
}

const RCON: [u8; 10] = [0x01, 0x02, 0x04, 0x08, 0x10, 0x20, 0x40, 0x80, 0x1b, 0x36];

/// The AES S-box value of `x`, computed as inversion in GF(2^8) followed by
/// the affine map.
pub fn sbox_value(x: u8) -> u8 {
    fn mul(mut a: u8, mut b: u8) -> u8 {
        let mut p = 0;
        while b != 0 {
            if b & 1 != 0 {
                p ^= a;
            }
            let hi = a & 0x80;
            a <<= 1;
            if hi != 0 {
                a ^= 0x1b;
            }
            b >>= 1;
        }
        p
    }
    // x^254 = x^-1 (and 0 -> 0)
    let mut inv = 1u8;
    for _ in 0..254 {
        inv = mul(inv, x);
    }
    let inv = if x == 0 { 0 } else { inv };
    inv ^ inv.rotate_left(1) ^ inv.rotate_left(2) ^ inv.rotate_left(3) ^ inv.rotate_left(4) ^ 0x63
}

/// AES-128 key schedule: eleven 16-byte round keys, concatenated.
pub fn expand_key(key: &[u8; 16]) -> [u8; 176] {
    let mut w = [0u8; 176];
    w[..16].copy_from_slice(key);
    for i in 4..44 {
        let mut t: [u8; 4] = w[4 * (i - 1)..4 * i].try_into().expect("4 bytes");
        if i % 4 == 0 {
            t.rotate_left(1);
            for v in t.iter_mut() {
                *v = sbox_value(*v);
            }
            t[0] ^= RCON[i / 4 - 1];
        }
        for j in 0..4 {
            w[4 * i + j] = w[4 * (i - 4) + j] ^ t[j];
        }
    }
    w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitvec::BitVector;
    use crate::circuit::{eval_clear, validate, GateKind};

    fn msb_bits(bytes: &[u8]) -> Vec<bool> {
        bytes.iter().flat_map(|&b| (0..8).map(move |i| b >> (7 - i) & 1 == 1)).collect()
    }

    #[test]
    fn sbox_value_spot_checks() {
        assert_eq!(sbox_value(0x00), 0x63);
        assert_eq!(sbox_value(0x01), 0x7c);
        assert_eq!(sbox_value(0x53), 0xed);
        assert_eq!(sbox_value(0xff), 0x16);
    }

    #[test]
    fn sbox_circuit_matches_table_exhaustively() {
        let mut b = CircuitBuilder::new();
        let u: Byte = b.input_group(8).try_into().unwrap();
        let s = sbox(&mut b, &u);
        assert_eq!(b.and_count(), 34);
        let c = b.build(&[s.to_vec()]);
        assert!(validate(&c).is_valid());
        // Lane k evaluates input byte k.
        let inputs: Vec<BitVector> = (0..8)
            .map(|bit| (0..=255u8).map(|x| x >> (7 - bit) & 1 == 1).collect())
            .collect();
        let out = eval_clear(&c, &inputs).unwrap();
        for x in 0..=255u8 {
            let got = (0..8).fold(0u8, |acc, bit| acc << 1 | out[bit].get(x as usize) as u8);
            assert_eq!(got, sbox_value(x), "S({x:#04x})");
        }
    }

    #[test]
    fn key_schedule_last_round_key() {
        // FIPS-197 appendix A.1
        let key: [u8; 16] = hex::decode("2b7e151628aed2a6abf7158809cf4f3c").unwrap().try_into().unwrap();
        let w = expand_key(&key);
        assert_eq!(hex::encode(&w[160..]), "d014f9a8c9ee2589e13f0cc8b6630ca6");
    }

    #[test]
    fn circuit_shape() {
        let c = key_expanded_aes128();
        assert!(validate(&c).is_valid());
        assert_eq!(c.input_groups(), &[128, 1408]);
        assert_eq!(c.output_groups(), &[128]);
        assert_eq!(c.gates().iter().filter(|g| g.kind == GateKind::And).count(), AES_AND_GATES);
    }

    #[test]
    fn fips_197_known_answer() {
        let key: [u8; 16] = hex::decode("000102030405060708090a0b0c0d0e0f").unwrap().try_into().unwrap();
        let pt = hex::decode("00112233445566778899aabbccddeeff").unwrap();
        let c = key_expanded_aes128();
        let bits: Vec<BitVector> = msb_bits(&pt)
            .into_iter()
            .chain(msb_bits(&expand_key(&key)))
            .map(|b| BitVector::from_bools(&[b]))
            .collect();
        let out: Vec<bool> = eval_clear(&c, &bits).unwrap().iter().map(|v| v.get(0)).collect();
        let ct: Vec<u8> = out.chunks(8).map(|c| c.iter().fold(0, |a, &b| a << 1 | b as u8)).collect();
        assert_eq!(hex::encode(ct), "69c4e0d86a7b0430d8cdb78070b4c55a");
    }
}
