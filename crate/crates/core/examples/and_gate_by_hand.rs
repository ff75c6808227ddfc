// One AND gate done by hand, without the engine: every party computes its
// local r_i, passes it to its successor, and finishes with what it got
// from its predecessor. The result is a fresh sharing of x AND y.

use rand::rngs::OsRng;
use ringshare::bitvec::BitVector;
use ringshare::corr_rand::{AlphaStream, PrfKey};
use ringshare::engine::{and_round_finalize, and_round_local};
use ringshare::sharing::{split_secret, validate_bundle_with_secret, PartyId, ShareBundle};

fn main() {
    let lanes = 16;
    let x = BitVector::random(&mut OsRng, lanes);
    let y = BitVector::random(&mut OsRng, lanes);
    let (sx, sy) = (split_secret(&x, &mut OsRng), split_secret(&y, &mut OsRng));

    let keys: Vec<PrfKey> = (0..3).map(|_| PrfKey::random(&mut OsRng)).collect();
    let r: Vec<BitVector> = PartyId::ALL
        .iter()
        .map(|&p| {
            let i = p.index();
            let alpha = AlphaStream::<ringshare::corr_rand::AesPrf>::new(&keys[i], &keys[p.prev().index()])
                .next_alphas(lanes)
                .unwrap();
            let (a, b) = (sx.share(p), sy.share(p));
            and_round_local(a.x(), a.a(), b.x(), b.a(), &alpha).unwrap()
        })
        .collect();

    // Party i receives r_{i-1}.
    let z = ShareBundle::from_shares(PartyId::ALL.map(|p| and_round_finalize(&r[p.index()], &r[p.prev().index()]).unwrap()));
    let expected = x.and(&y).unwrap();
    println!("x       {}", bits(&x));
    println!("y       {}", bits(&y));
    println!("x & y   {}", bits(&z.reveal().unwrap()));
    println!("sharing of x & y valid: {}", validate_bundle_with_secret(&z, &expected).is_valid());
}

fn bits(v: &BitVector) -> String {
    v.iter().map(|b| if b { '1' } else { '0' }).collect()
}
