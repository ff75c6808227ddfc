//! Bristol-fashion boolean circuits: parsing, validation, AND-depth
//! layering and plaintext evaluation.
//!
//! Supported gate kinds are `AND`, `XOR`, `INV` and `EQW`. Input wires come
//! first (`0..total_inputs`), outputs are the last `total_outputs` wires.

pub mod aes;
pub mod bundled;
mod builder;
mod eval;
mod layers;
pub mod metadata;
mod parser;
pub mod random;
mod validate;

use std::fmt;

use serde::Serialize;

pub use builder::{CircuitBuilder, Wire};
pub use eval::{eval_clear, eval_clear_layered, eval_single, EvalError};
pub use layers::{layerize, Layer, Layering};
pub use parser::{parse_bristol, ParseError, ParseErrorKind};
pub use validate::{validate, CircuitReport, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum GateKind {
    And,
    Xor,
    Inv,
    Eqw,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::And | GateKind::Xor => 2,
            GateKind::Inv | GateKind::Eqw => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And => "AND",
            GateKind::Xor => "XOR",
            GateKind::Inv => "INV",
            GateKind::Eqw => "EQW",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "AND" => Some(GateKind::And),
            "XOR" => Some(GateKind::Xor),
            "INV" => Some(GateKind::Inv),
            "EQW" => Some(GateKind::Eqw),
            _ => None,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One gate. For unary kinds only `inputs[0]` is meaningful.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Gate {
    pub kind: GateKind,
    inputs: [usize; 2],
    pub output: usize,
}

impl Gate {
    pub fn binary(kind: GateKind, a: usize, b: usize, output: usize) -> Self {
        assert_eq!(kind.arity(), 2, "{kind} is not binary");
        Self {
            kind,
            inputs: [a, b],
            output,
        }
    }

    pub fn unary(kind: GateKind, a: usize, output: usize) -> Self {
        assert_eq!(kind.arity(), 1, "{kind} is not unary");
        Self {
            kind,
            inputs: [a, a],
            output,
        }
    }

    pub fn inputs(&self) -> &[usize] {
        &self.inputs[..self.kind.arity()]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    wire_count: usize,
    input_groups: Vec<usize>,
    output_groups: Vec<usize>,
    gates: Vec<Gate>,
}

impl Circuit {
    /// Assembles a circuit without checking it; see [`validate`].
    pub fn from_parts(wire_count: usize, input_groups: Vec<usize>, output_groups: Vec<usize>, gates: Vec<Gate>) -> Self {
        Self {
            wire_count,
            input_groups,
            output_groups,
            gates,
        }
    }

    pub fn gate_count(&self) -> usize {
        self.gates.len()
    }

    pub fn wire_count(&self) -> usize {
        self.wire_count
    }

    pub fn input_groups(&self) -> &[usize] {
        &self.input_groups
    }

    pub fn output_groups(&self) -> &[usize] {
        &self.output_groups
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn input_wire_count(&self) -> usize {
        self.input_groups.iter().sum()
    }

    pub fn output_wire_count(&self) -> usize {
        self.output_groups.iter().sum()
    }

    /// Wire indices of the outputs, in order.
    pub fn output_wires(&self) -> std::ops::Range<usize> {
        self.wire_count - self.output_wire_count()..self.wire_count
    }

    /// First wire of input group `g`.
    pub fn input_group_offset(&self, g: usize) -> usize {
        self.input_groups[..g].iter().sum()
    }

    pub fn and_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind == GateKind::And).count()
    }

    /// Bristol-fashion text.
    pub fn to_bristol(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let list = |v: &[usize]| {
            std::iter::once(v.len())
                .chain(v.iter().copied())
                .map(|n| n.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        writeln!(out, "{} {}", self.gates.len(), self.wire_count).unwrap();
        writeln!(out, "{}", list(&self.input_groups)).unwrap();
        writeln!(out, "{}", list(&self.output_groups)).unwrap();
        out.push('\n');
        for g in &self.gates {
            let ins: Vec<String> = g.inputs().iter().map(|w| w.to_string()).collect();
            writeln!(out, "{} 1 {} {} {}", g.kind.arity(), ins.join(" "), g.output, g.kind).unwrap();
        }
        out
    }

    pub fn stats(&self) -> CircuitStats {
        let count = |k| self.gates.iter().filter(|g| g.kind == k).count();
        CircuitStats {
            gates: self.gates.len(),
            wires: self.wire_count,
            and: count(GateKind::And),
            xor: count(GateKind::Xor),
            inv: count(GateKind::Inv),
            eqw: count(GateKind::Eqw),
            and_depth: layerize(self).and_depth(),
            input_wires: self.input_wire_count(),
            output_wires: self.output_wire_count(),
            input_groups: self.input_groups.clone(),
            output_groups: self.output_groups.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CircuitStats {
    pub gates: usize,
    pub wires: usize,
    pub and: usize,
    pub xor: usize,
    pub inv: usize,
    pub eqw: usize,
    pub and_depth: usize,
    pub input_wires: usize,
    pub output_wires: usize,
    pub input_groups: Vec<usize>,
    pub output_groups: Vec<usize>,
}

impl fmt::Display for CircuitStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "gates      {}", self.gates)?;
        writeln!(f, "wires      {}", self.wires)?;
        writeln!(f, "AND        {}", self.and)?;
        writeln!(f, "XOR        {}", self.xor)?;
        writeln!(f, "INV        {}", self.inv)?;
        writeln!(f, "EQW        {}", self.eqw)?;
        writeln!(f, "and_depth  {}", self.and_depth)?;
        writeln!(f, "inputs     {} {:?}", self.input_wires, self.input_groups)?;
        write!(f, "outputs    {} {:?}", self.output_wires, self.output_groups)
    }
}
