use serde::Serialize;

use super::{Circuit, GateKind};

/// One communication round. `local` gates (XOR/INV/EQW) run first, in
/// file order, then every gate in `and` is evaluated in a single exchange.
/// AND gates of a layer never depend on each other.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub local: Vec<usize>,
    pub and: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Layering {
    layers: Vec<Layer>,
}

impl Layering {
    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    /// Number of layers that contain AND gates, i.e. communication rounds.
    pub fn and_depth(&self) -> usize {
        self.layers.iter().filter(|l| !l.and.is_empty()).count()
    }

    pub fn and_gate_count(&self) -> usize {
        self.layers.iter().map(|l| l.and.len()).sum()
    }
}

/// Groups gates by AND depth. A wire's level is the number of AND gates on
/// the longest path from any input; AND gates at level `k` form round `k`,
/// and local gates at level `k - 1` run just before it.
pub fn layerize(c: &Circuit) -> Layering {
    let mut level = vec![0usize; c.wire_count()];
    let mut gate_level = Vec::with_capacity(c.gate_count());
    let mut depth = 0;
    for g in c.gates() {
        let inp = g.inputs().iter().map(|&w| level[w]).max().unwrap_or(0);
        let l = if g.kind == GateKind::And { inp + 1 } else { inp };
        level[g.output] = l;
        gate_level.push(l);
        depth = depth.max(l);
    }

    // Layer k (0-based) holds ANDs of level k+1 and local gates of level k;
    // one extra trailing layer collects local gates after the last round.
    let mut layers = vec![Layer::default(); depth + 1];
    for (i, g) in c.gates().iter().enumerate() {
        let l = gate_level[i];
        if g.kind == GateKind::And {
            layers[l - 1].and.push(i);
        } else {
            layers[l].local.push(i);
        }
    }
    if layers.last().is_some_and(|l| l.local.is_empty() && l.and.is_empty()) && layers.len() > 1 {
        layers.pop();
    }
    Layering { layers }
}
