//! Random well-formed circuits for differential testing.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Circuit, CircuitBuilder, Wire};

#[derive(Debug, Clone)]
pub struct RandomCircuitParams {
    pub input_groups: Vec<usize>,
    pub gates: usize,
    pub outputs: usize,
}

/// A random DAG over AND/XOR/INV/EQW. Half the time an operand is drawn
/// from the 8 most recent wires, which produces deeper AND chains than
/// uniform picks.
pub fn random_circuit<R: Rng + ?Sized>(rng: &mut R, params: &RandomCircuitParams) -> Circuit {
    assert!(params.input_groups.iter().sum::<usize>() > 0, "need at least one input");
    let mut b = CircuitBuilder::new();
    let mut wires: Vec<Wire> = Vec::new();
    for &n in &params.input_groups {
        wires.extend(b.input_group(n));
    }
    let pick = |rng: &mut R, wires: &[Wire]| -> Wire {
        if rng.gen_bool(0.5) {
            let lo = wires.len().saturating_sub(8);
            wires[rng.gen_range(lo..wires.len())]
        } else {
            *wires.choose(rng).expect("non-empty")
        }
    };
    let mut produced = Vec::new();
    for _ in 0..params.gates {
        let a = pick(rng, &wires);
        let w = match rng.gen_range(0..20) {
            0..=6 => {
                let c = pick(rng, &wires);
                b.and(a, c)
            }
            7..=13 => {
                let c = pick(rng, &wires);
                b.xor(a, c)
            }
            14..=17 => b.inv(a),
            _ => b.eqw(a),
        };
        wires.push(w);
        produced.push(w);
    }
    let pool = if produced.is_empty() { &wires } else { &produced };
    let outs: Vec<Wire> = (0..params.outputs)
        .map(|i| {
            // Bias toward the tail so most of the circuit is live.
            if i == 0 {
                *pool.last().expect("non-empty")
            } else {
                *pool.choose(rng).expect("non-empty")
            }
        })
        .collect();
    b.build(&[outs])
}
