use rand::{CryptoRng, RngCore};

use crate::bitvec::BitVector;
use crate::circuit::Circuit;
use crate::sharing::{split_secret, PartyId, ReplicatedShare};

use super::EngineError;

/// How one party obtains one input group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupInput {
    /// Shares handed over in-process by a dealer, one per wire.
    Dealt(Vec<ReplicatedShare>),
    /// This party provides the group: lanes of each wire in clear.
    Own(Vec<BitVector>),
    /// Another party provides the group.
    Remote(PartyId),
}

/// Who supplies an input group, with the clear lanes of each wire.
#[derive(Debug, Clone)]
pub enum InputAssignment {
    Dealer(Vec<BitVector>),
    Party(PartyId, Vec<BitVector>),
}

/// Turns a global view of the inputs into what each party passes to
/// [`super::PartyState::load_inputs`]. Dealer groups are split here;
/// party-provided groups are shared by the parties themselves.
pub fn distribute_inputs<R: RngCore + CryptoRng>(
    c: &Circuit,
    assignments: &[InputAssignment],
    lanes: usize,
    rng: &mut R,
) -> Result<[Vec<GroupInput>; 3], EngineError> {
    if assignments.len() != c.input_groups().len() {
        return Err(EngineError::Input(format!(
            "circuit has {} input groups, {} assigned",
            c.input_groups().len(),
            assignments.len()
        )));
    }
    let mut out: [Vec<GroupInput>; 3] = Default::default();
    for (g, (assignment, &width)) in assignments.iter().zip(c.input_groups()).enumerate() {
        let values = match assignment {
            InputAssignment::Dealer(v) | InputAssignment::Party(_, v) => v,
        };
        if values.len() != width || values.iter().any(|v| v.len() != lanes) {
            return Err(EngineError::Input(format!("group {g} needs {width} wires of {lanes} lanes")));
        }
        match assignment {
            InputAssignment::Dealer(values) => {
                let mut per_party: [Vec<ReplicatedShare>; 3] = Default::default();
                for v in values {
                    let bundle = split_secret(v, rng);
                    for p in PartyId::ALL {
                        per_party[p.index()].push(bundle.share(p).clone());
                    }
                }
                for (slot, shares) in out.iter_mut().zip(per_party) {
                    slot.push(GroupInput::Dealt(shares));
                }
            }
            InputAssignment::Party(owner, values) => {
                for p in PartyId::ALL {
                    out[p.index()].push(if p == *owner {
                        GroupInput::Own(values.clone())
                    } else {
                        GroupInput::Remote(*owner)
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Splits the per-wire inputs `wires` into per-group vectors.
pub(crate) fn group_wires(c: &Circuit, wires: &[BitVector]) -> Vec<Vec<BitVector>> {
    let mut pos = 0;
    c.input_groups()
        .iter()
        .map(|&w| {
            let g = wires[pos..pos + w].to_vec();
            pos += w;
            g
        })
        .collect()
}
