//! Three parties in one process over the in-memory ring: evaluate the
//! full adder on all eight inputs at once (one input per lane) and show
//! what each party sent.

use ringshare::bitvec::BitVector;
use ringshare::circuit::{bundled, eval_clear};
use ringshare::engine::{simulate, SimulationOptions};
use ringshare::sharing::PartyId;
use ringshare::transport::MsgType;

fn main() {
    let c = bundled::FULL_ADDER.circuit();
    let lanes = 8;
    let inputs: Vec<BitVector> = (0..3).map(|w| (0..lanes).map(|k| k >> w & 1 == 1).collect()).collect();

    // Inputs a and b come from P1 and P2; carry-in is dealt.
    let opts = SimulationOptions {
        lanes,
        seed: 42,
        output_party: PartyId::new(3).unwrap(),
        providers: Some(vec![Some(PartyId::new(1).unwrap()), Some(PartyId::new(2).unwrap()), None]),
        ..Default::default()
    };
    let report = simulate(&c, &inputs, &opts).expect("session");

    println!(" a b cin | sum cout");
    for k in 0..lanes {
        println!(
            " {} {}  {}  |  {}   {}",
            inputs[0].get(k) as u8,
            inputs[1].get(k) as u8,
            inputs[2].get(k) as u8,
            report.outputs[0].get(k) as u8,
            report.outputs[1].get(k) as u8
        );
    }
    assert_eq!(report.outputs, eval_clear(&c, &inputs).unwrap());

    for p in PartyId::ALL {
        let counters = &report.counters[p.index()];
        let sent: Vec<String> = counters
            .iter()
            .filter(|(_, s)| s.sent.messages > 0)
            .map(|(ty, s)| format!("{} x{} ({} B)", ty.name(), s.sent.messages, s.sent.payload_bytes))
            .collect();
        println!("{p} sent {}", sent.join(", "));
    }
    let and_bits = report.counters[0].sent(MsgType::AndRound).payload_bytes * 8;
    println!("AND_ROUND bits per party: {and_bits} ({} ANDs x {lanes} lanes, byte-padded)", c.and_count());
}
