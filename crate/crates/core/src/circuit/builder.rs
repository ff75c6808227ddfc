use std::collections::HashSet;

use super::{Circuit, Gate, GateKind};

/// A wire handle inside a [`CircuitBuilder`]. Indices are renumbered by
/// [`CircuitBuilder::build`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Wire(usize);

/// Programmatic circuit construction. Produces Bristol-conformant circuits:
/// inputs first, outputs on the last wires.
#[derive(Debug, Default)]
pub struct CircuitBuilder {
    input_groups: Vec<usize>,
    next: usize,
    gates: Vec<Gate>,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares the next input group. All inputs must be declared before
    /// the first gate.
    pub fn input_group(&mut self, width: usize) -> Vec<Wire> {
        assert!(self.gates.is_empty(), "declare inputs before adding gates");
        self.input_groups.push(width);
        let start = self.next;
        self.next += width;
        (start..self.next).map(Wire).collect()
    }

    fn fresh(&mut self) -> usize {
        self.next += 1;
        self.next - 1
    }

    pub fn and(&mut self, a: Wire, b: Wire) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::binary(GateKind::And, a.0, b.0, out));
        Wire(out)
    }

    pub fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::binary(GateKind::Xor, a.0, b.0, out));
        Wire(out)
    }

    pub fn inv(&mut self, a: Wire) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::unary(GateKind::Inv, a.0, out));
        Wire(out)
    }

    pub fn eqw(&mut self, a: Wire) -> Wire {
        let out = self.fresh();
        self.gates.push(Gate::unary(GateKind::Eqw, a.0, out));
        Wire(out)
    }

    pub fn xnor(&mut self, a: Wire, b: Wire) -> Wire {
        let t = self.xor(a, b);
        self.inv(t)
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::And).count()
    }

    /// Finishes the circuit with the given output groups.
    pub fn build(mut self, outputs: &[Vec<Wire>]) -> Circuit {
        let n_in: usize = self.input_groups.iter().sum();
        let mut seen = HashSet::new();
        let mut flat = Vec::new();
        for w in outputs.iter().flatten().copied() {
            // Inputs and repeated outputs need their own wire at the end.
            let w = if w.0 < n_in || !seen.insert(w) { self.eqw(w) } else { w };
            flat.push(w);
        }
        let wire_count = n_in + self.gates.len();
        let out_start = wire_count - flat.len();
        let mut map: Vec<usize> = (0..self.next).collect();
        let out_pos: std::collections::HashMap<usize, usize> =
            flat.iter().enumerate().map(|(k, w)| (w.0, out_start + k)).collect();
        let mut next = n_in;
        for g in &self.gates {
            map[g.output] = match out_pos.get(&g.output) {
                Some(&p) => p,
                None => {
                    next += 1;
                    next - 1
                }
            };
        }
        let gates = self
            .gates
            .iter()
            .map(|g| {
                if g.kind.arity() == 2 {
                    Gate::binary(g.kind, map[g.inputs()[0]], map[g.inputs()[1]], map[g.output])
                } else {
                    Gate::unary(g.kind, map[g.inputs()[0]], map[g.output])
                }
            })
            .collect();
        Circuit::from_parts(
            wire_count,
            self.input_groups,
            outputs.iter().map(Vec::len).collect(),
            gates,
        )
    }
}
