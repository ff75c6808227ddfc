use thiserror::Error;

use crate::bitvec::BitVector;

use super::{Circuit, Gate, GateKind, Layering};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("circuit has {expected} input wires, got {got} values")]
    InputCount { expected: usize, got: usize },
    #[error("input wire {wire} carries {got} lanes, expected {expected}")]
    LaneMismatch { wire: usize, expected: usize, got: usize },
}

fn check_inputs(c: &Circuit, inputs: &[BitVector]) -> Result<usize, EvalError> {
    if inputs.len() != c.input_wire_count() {
        return Err(EvalError::InputCount {
            expected: c.input_wire_count(),
            got: inputs.len(),
        });
    }
    let lanes = inputs.first().map_or(0, BitVector::len);
    if let Some((wire, v)) = inputs.iter().enumerate().find(|(_, v)| v.len() != lanes) {
        return Err(EvalError::LaneMismatch {
            wire,
            expected: lanes,
            got: v.len(),
        });
    }
    Ok(lanes)
}

fn apply(values: &mut [BitVector], g: &Gate) {
    let a = &values[g.inputs()[0]];
    let out = match g.kind {
        GateKind::And => a.and(&values[g.inputs()[1]]),
        GateKind::Xor => a.xor(&values[g.inputs()[1]]),
        GateKind::Inv => Ok(a.not()),
        GateKind::Eqw => Ok(a.clone()),
    }
    .expect("all wires carry the same lane count");
    values[g.output] = out;
}

fn outputs(c: &Circuit, values: Vec<BitVector>) -> Vec<BitVector> {
    let range = c.output_wires();
    values.into_iter().skip(range.start).take(range.len()).collect()
}

/// Plaintext evaluation in file order. `inputs[w]` holds the lanes of input
/// wire `w`; the result holds the lanes of each output wire.
pub fn eval_clear(c: &Circuit, inputs: &[BitVector]) -> Result<Vec<BitVector>, EvalError> {
    check_inputs(c, inputs)?;
    let mut values = vec![BitVector::new(); c.wire_count()];
    values[..inputs.len()].clone_from_slice(inputs);
    for g in c.gates() {
        apply(&mut values, g);
    }
    Ok(outputs(c, values))
}

/// Plaintext evaluation following a layering's schedule.
pub fn eval_clear_layered(c: &Circuit, layering: &Layering, inputs: &[BitVector]) -> Result<Vec<BitVector>, EvalError> {
    check_inputs(c, inputs)?;
    let mut values = vec![BitVector::new(); c.wire_count()];
    values[..inputs.len()].clone_from_slice(inputs);
    for layer in layering.layers() {
        for &i in layer.local.iter().chain(&layer.and) {
            apply(&mut values, &c.gates()[i]);
        }
    }
    Ok(outputs(c, values))
}

/// One assignment: bit `w` of `input` is input wire `w`; bit `k` of the
/// result is output wire `k`.
pub fn eval_single(c: &Circuit, input: &BitVector) -> Result<BitVector, EvalError> {
    let wires: Vec<BitVector> = input.iter().map(|b| BitVector::from_bools(&[b])).collect();
    let out = eval_clear(c, &wires)?;
    Ok(out.iter().map(|v| v.get(0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{layerize, parse_bristol};

    fn bits(b: &[u8]) -> BitVector {
        b.iter().map(|&x| x == 1).collect()
    }

    #[test]
    fn and_truth_table() {
        let c = parse_bristol("1 3\n2 1 1\n1 1\n2 1 0 1 2 AND\n").unwrap();
        assert_eq!(eval_single(&c, &bits(&[1, 1])).unwrap(), bits(&[1]));
        assert_eq!(eval_single(&c, &bits(&[1, 0])).unwrap(), bits(&[0]));
        assert_eq!(eval_single(&c, &bits(&[0, 1])).unwrap(), bits(&[0]));
        assert_eq!(eval_single(&c, &bits(&[0, 0])).unwrap(), bits(&[0]));
    }

    #[test]
    fn every_gate_kind_matches_its_truth_table() {
        // outputs: a&b, a^b, ~a, a
        let text = "4 6\n2 1 1\n1 4\n2 1 0 1 2 AND\n2 1 0 1 3 XOR\n1 1 0 4 INV\n1 1 0 5 EQW\n";
        let c = parse_bristol(text).unwrap();
        for a in [false, true] {
            for b in [false, true] {
                let out = eval_single(&c, &BitVector::from_bools(&[a, b])).unwrap();
                assert_eq!(out, BitVector::from_bools(&[a & b, a ^ b, !a, a]));
            }
        }
    }

    #[test]
    fn lanes_evaluate_independently() {
        let c = parse_bristol("1 3\n2 1 1\n1 1\n2 1 0 1 2 AND\n").unwrap();
        let out = eval_clear(&c, &[bits(&[0, 0, 1, 1]), bits(&[0, 1, 0, 1])]).unwrap();
        assert_eq!(out, vec![bits(&[0, 0, 0, 1])]);
        let l = layerize(&c);
        assert_eq!(eval_clear_layered(&c, &l, &[bits(&[0, 0, 1, 1]), bits(&[0, 1, 0, 1])]).unwrap(), out);
    }

    #[test]
    fn input_errors() {
        let c = parse_bristol("1 3\n2 1 1\n1 1\n2 1 0 1 2 AND\n").unwrap();
        assert_eq!(
            eval_clear(&c, &[bits(&[1])]),
            Err(EvalError::InputCount { expected: 2, got: 1 })
        );
        assert_eq!(
            eval_clear(&c, &[bits(&[1]), bits(&[1, 0])]),
            Err(EvalError::LaneMismatch { wire: 1, expected: 1, got: 2 })
        );
    }
}
