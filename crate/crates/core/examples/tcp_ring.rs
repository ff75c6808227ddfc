//! The same protocol over real sockets: three parties on loopback, each
//! in its own thread, connected in a ring with a session handshake.

use std::thread;

use rand::rngs::OsRng;
use ringshare::bitvec::BitVector;
use ringshare::circuit::{bundled, layerize};
use ringshare::engine::{distribute_inputs, drive_party, InputAssignment};
use ringshare::sharing::PartyId;
use ringshare::transport::{PendingTcp, RingTransport, TcpConfig};

fn main() {
    let (c, meta) = bundled::by_name("comparator8").unwrap();
    let layering = layerize(&c);
    let (x, y) = ("2a", "1f");
    let wires = |hex: &str| -> Vec<BitVector> {
        meta.group_from_hex(hex, 8).unwrap().iter().map(|b| BitVector::from_bools(&[b])).collect()
    };
    let [p1, p2, _] = PartyId::ALL;
    let groups = distribute_inputs(
        &c,
        &[InputAssignment::Party(p1, wires(x)), InputAssignment::Party(p2, wires(y))],
        1,
        &mut OsRng,
    )
    .unwrap();

    let listeners: Vec<PendingTcp> = (0..3).map(|_| PendingTcp::bind("127.0.0.1:0").unwrap()).collect();
    let addrs: Vec<String> = listeners.iter().map(|l| l.local_addr().to_string()).collect();
    println!("ring: {} -> {} -> {} -> back", addrs[0], addrs[1], addrs[2]);

    let results: Vec<_> = thread::scope(|s| {
        let handles: Vec<_> = listeners
            .into_iter()
            .zip(groups)
            .enumerate()
            .map(|(i, (listener, groups))| {
                let cfg = TcpConfig::new(PartyId::ALL[i], addrs[i].clone(), addrs[(i + 1) % 3].clone(), 2024);
                let (c, layering) = (&c, &layering);
                s.spawn(move || {
                    let endpoint = listener.establish(&cfg).unwrap();
                    let (outcome, endpoint) = drive_party(endpoint, c, layering, groups, 1, p1, false, &mut OsRng).unwrap();
                    let counters = endpoint.counters();
                    endpoint.close().unwrap();
                    (outcome, counters)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    });

    let revealed = results[0].0.revealed.as_ref().expect("P1 is the output party");
    let out: BitVector = revealed.iter().map(|w| w.get(0)).collect();
    println!("0x{x} > 0x{y}: {}", meta.decode_outputs(&c, &out)[0]);
    for (i, (_, counters)) in results.iter().enumerate() {
        println!("P{}: {} B sent, {} B received", i + 1, counters.total_sent().framed_bytes, counters.total_received().framed_bytes);
    }
}
