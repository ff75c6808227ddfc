use serde::Serialize;

use super::Circuit;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Violation {
    /// Inputs plus gate outputs need more wires than declared.
    TooFewWires { needed: usize, wire_count: usize },
    WireOutOfRange { gate: usize, wire: usize },
    DoubleAssignment { gate: usize, wire: usize },
    UseBeforeDefine { gate: usize, wire: usize },
    OutputUnassigned { wire: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct CircuitReport {
    pub violations: Vec<Violation>,
}

impl CircuitReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Re-checks every structural invariant, independently of the parser.
pub fn validate(c: &Circuit) -> CircuitReport {
    let mut violations = Vec::new();
    let n_in = c.input_wire_count();
    let n_out = c.output_wire_count();
    let wires = c.wire_count();
    if n_in + c.gate_count() > wires || n_out > wires {
        violations.push(Violation::TooFewWires {
            needed: (n_in + c.gate_count()).max(n_out),
            wire_count: wires,
        });
    }
    let mut defined = vec![false; wires];
    for d in defined.iter_mut().take(n_in) {
        *d = true;
    }
    for (i, g) in c.gates().iter().enumerate() {
        for &w in g.inputs() {
            if w >= wires {
                violations.push(Violation::WireOutOfRange { gate: i, wire: w });
            } else if !defined[w] {
                violations.push(Violation::UseBeforeDefine { gate: i, wire: w });
            }
        }
        if g.output >= wires {
            violations.push(Violation::WireOutOfRange { gate: i, wire: g.output });
        } else if defined[g.output] {
            violations.push(Violation::DoubleAssignment { gate: i, wire: g.output });
        } else {
            defined[g.output] = true;
        }
    }
    if n_out <= wires {
        for w in wires - n_out..wires {
            if !defined[w] {
                violations.push(Violation::OutputUnassigned { wire: w });
            }
        }
    }
    CircuitReport { violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{parse_bristol, Gate, GateKind};

    #[test]
    fn parsed_circuit_passes() {
        let c = parse_bristol("2 4\n2 1 1\n1 1\n2 1 0 1 2 AND\n1 1 2 3 INV\n").unwrap();
        assert!(validate(&c).is_valid());
    }

    #[test]
    fn hand_built_double_assignment_fails() {
        let c = Circuit::from_parts(
            4,
            vec![1, 1],
            vec![1],
            vec![
                Gate::binary(GateKind::And, 0, 1, 3),
                Gate::binary(GateKind::Xor, 0, 1, 3),
            ],
        );
        let r = validate(&c);
        assert!(r.violations.contains(&Violation::DoubleAssignment { gate: 1, wire: 3 }));
    }

    #[test]
    fn hand_built_use_before_define_and_range() {
        let c = Circuit::from_parts(
            3,
            vec![1, 1],
            vec![1],
            vec![Gate::binary(GateKind::And, 0, 2, 2), Gate::unary(GateKind::Inv, 9, 2)],
        );
        let r = validate(&c);
        assert!(r.violations.contains(&Violation::UseBeforeDefine { gate: 0, wire: 2 }));
        assert!(r.violations.contains(&Violation::WireOutOfRange { gate: 1, wire: 9 }));
        assert!(r.violations.iter().any(|v| matches!(v, Violation::TooFewWires { .. })));
    }
}
