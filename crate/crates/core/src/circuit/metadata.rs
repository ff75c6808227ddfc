//! Sidecar metadata for circuit files.
//!
//! Bristol files do not say how a numeric value maps onto an input group,
//! so every bundled circuit ships a `.meta` file next to it:
//!
//! ```text
//! input_group_roles = plaintext, expanded_key
//! output_group_roles = ciphertext
//! bit_order = msb_first
//! known_answer_vectors = <in_0>,<in_1>-><out_0>; ...
//! ```
//!
//! Values are hex. With `lsb_first`, wire `k` of a group is bit `k` of the
//! number; with `msb_first`, wire `k` is bit `width - 1 - k`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::bitvec::BitVector;

use super::Circuit;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BitOrder {
    #[default]
    LsbFirst,
    MsbFirst,
}

impl FromStr for BitOrder {
    type Err = MetadataError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "lsb_first" => Ok(Self::LsbFirst),
            "msb_first" => Ok(Self::MsbFirst),
            other => Err(MetadataError::BadValue {
                key: "bit_order".into(),
                value: other.into(),
            }),
        }
    }
}

impl fmt::Display for BitOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::LsbFirst => "lsb_first",
            Self::MsbFirst => "msb_first",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnownAnswer {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CircuitMetadata {
    pub input_group_roles: Vec<String>,
    pub output_group_roles: Vec<String>,
    pub bit_order: BitOrder,
    pub known_answer_vectors: Vec<KnownAnswer>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetadataError {
    #[error("line {0}: expected key = value")]
    Syntax(usize),
    #[error("unknown metadata key {0:?}")]
    UnknownKey(String),
    #[error("bad value for {key}: {value:?}")]
    BadValue { key: String, value: String },
    #[error("bad hex value {0:?}")]
    BadHex(String),
    #[error("value {value} does not fit in {width} bits")]
    TooWide { value: String, width: usize },
    #[error("expected {expected} group values, got {got}")]
    GroupCount { expected: usize, got: usize },
}

fn list(v: &str) -> Vec<String> {
    v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

impl CircuitMetadata {
    pub fn parse(text: &str) -> Result<Self, MetadataError> {
        let mut meta = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or(MetadataError::Syntax(i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "input_group_roles" => meta.input_group_roles = list(value),
                "output_group_roles" => meta.output_group_roles = list(value),
                "bit_order" => meta.bit_order = value.parse()?,
                "known_answer_vectors" => {
                    for v in value.split(';').map(str::trim).filter(|v| !v.is_empty()) {
                        let (ins, outs) = v.split_once("->").ok_or_else(|| MetadataError::BadValue {
                            key: key.into(),
                            value: v.into(),
                        })?;
                        meta.known_answer_vectors.push(KnownAnswer {
                            inputs: list(ins),
                            outputs: list(outs),
                        });
                    }
                }
                other => return Err(MetadataError::UnknownKey(other.into())),
            }
        }
        Ok(meta)
    }

    pub fn to_text(&self) -> String {
        let kats: Vec<String> = self
            .known_answer_vectors
            .iter()
            .map(|k| format!("{}->{}", k.inputs.join(","), k.outputs.join(",")))
            .collect();
        format!(
            "input_group_roles = {}\noutput_group_roles = {}\nbit_order = {}\nknown_answer_vectors = {}\n",
            self.input_group_roles.join(", "),
            self.output_group_roles.join(", "),
            self.bit_order,
            kats.join("; ")
        )
    }

    /// Loads `<circuit path with .meta extension>` if it exists.
    pub fn load_sidecar(circuit_path: &Path) -> Result<Option<Self>, Box<dyn std::error::Error + Send + Sync>> {
        let path = sidecar_path(circuit_path);
        if !path.exists() {
            return Ok(None);
        }
        Ok(Some(Self::parse(&std::fs::read_to_string(path)?)?))
    }

    /// The `width` wire values of one group, in wire order.
    pub fn group_from_hex(&self, hex_value: &str, width: usize) -> Result<BitVector, MetadataError> {
        let digits = hex_value.trim().trim_start_matches("0x");
        let padded = if digits.len() % 2 == 1 { format!("0{digits}") } else { digits.to_string() };
        let bytes = hex::decode(&padded).map_err(|_| MetadataError::BadHex(hex_value.into()))?;
        let number_bit = |b: usize| -> bool {
            b / 8 < bytes.len() && bytes[bytes.len() - 1 - b / 8] >> (b % 8) & 1 == 1
        };
        if (width..bytes.len() * 8).any(number_bit) {
            return Err(MetadataError::TooWide {
                value: hex_value.into(),
                width,
            });
        }
        Ok((0..width)
            .map(|k| match self.bit_order {
                BitOrder::LsbFirst => number_bit(k),
                BitOrder::MsbFirst => number_bit(width - 1 - k),
            })
            .collect())
    }

    /// Inverse of [`Self::group_from_hex`]; `ceil(width / 4)` hex digits.
    pub fn group_to_hex(&self, wires: &BitVector) -> String {
        let width = wires.len();
        let number_bit = |b: usize| match self.bit_order {
            BitOrder::LsbFirst => wires.get(b),
            BitOrder::MsbFirst => wires.get(width - 1 - b),
        };
        let digits = width.div_ceil(4).max(1);
        (0..digits)
            .rev()
            .map(|d| {
                let nibble = (0..4)
                    .filter(|i| 4 * d + i < width && number_bit(4 * d + i))
                    .fold(0u32, |acc, i| acc | 1 << i);
                char::from_digit(nibble, 16).expect("nibble")
            })
            .collect()
    }

    /// All input wires of `c` from one hex value per input group.
    pub fn encode_inputs<S: AsRef<str>>(&self, c: &Circuit, groups: &[S]) -> Result<BitVector, MetadataError> {
        if groups.len() != c.input_groups().len() {
            return Err(MetadataError::GroupCount {
                expected: c.input_groups().len(),
                got: groups.len(),
            });
        }
        let mut out = BitVector::new();
        for (v, &w) in groups.iter().zip(c.input_groups()) {
            out.append(&self.group_from_hex(v.as_ref(), w)?);
        }
        Ok(out)
    }

    /// One hex value per output group.
    pub fn decode_outputs(&self, c: &Circuit, outputs: &BitVector) -> Vec<String> {
        let mut pos = 0;
        c.output_groups()
            .iter()
            .map(|&w| {
                let s = self.group_to_hex(&outputs.slice(pos, w));
                pos += w;
                s
            })
            .collect()
    }
}

pub fn sidecar_path(circuit_path: &Path) -> PathBuf {
    circuit_path.with_extension("meta")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_all_fields() {
        let m = CircuitMetadata::parse(
            "# c\ninput_group_roles = a, b\noutput_group_roles = s\nbit_order = msb_first\nknown_answer_vectors = 1,0->1; 0,0->0\n",
        )
        .unwrap();
        assert_eq!(m.input_group_roles, vec!["a", "b"]);
        assert_eq!(m.bit_order, BitOrder::MsbFirst);
        assert_eq!(m.known_answer_vectors.len(), 2);
        assert_eq!(m.known_answer_vectors[0].outputs, vec!["1"]);
        assert_eq!(CircuitMetadata::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn rejects_unknown_keys_and_orders() {
        assert!(matches!(CircuitMetadata::parse("colour = red"), Err(MetadataError::UnknownKey(_))));
        assert!(matches!(CircuitMetadata::parse("bit_order = sideways"), Err(MetadataError::BadValue { .. })));
        assert!(matches!(CircuitMetadata::parse("nonsense"), Err(MetadataError::Syntax(1))));
    }

    #[test]
    fn bit_orders() {
        let lsb = CircuitMetadata::default();
        let msb = CircuitMetadata {
            bit_order: BitOrder::MsbFirst,
            ..Default::default()
        };
        // 0x6 = 0b0110 over 4 wires
        assert_eq!(lsb.group_from_hex("6", 4).unwrap(), BitVector::from_bools(&[false, true, true, false]));
        assert_eq!(msb.group_from_hex("1", 4).unwrap(), BitVector::from_bools(&[false, false, false, true]));
        assert_eq!(msb.group_from_hex("80", 8).unwrap().get(0), true);
        assert!(matches!(lsb.group_from_hex("10", 4), Err(MetadataError::TooWide { .. })));
        assert!(matches!(lsb.group_from_hex("zz", 4), Err(MetadataError::BadHex(_))));
        assert_eq!(lsb.group_to_hex(&BitVector::from_bools(&[true])), "1");
    }

    proptest! {
        #[test]
        fn hex_round_trip(bits in proptest::collection::vec(any::<bool>(), 1..200), msb in any::<bool>()) {
            let m = CircuitMetadata {
                bit_order: if msb { BitOrder::MsbFirst } else { BitOrder::LsbFirst },
                ..Default::default()
            };
            let v = BitVector::from_bools(&bits);
            let hex = m.group_to_hex(&v);
            prop_assert_eq!(m.group_from_hex(&hex, bits.len()).unwrap(), v);
        }
    }
}
