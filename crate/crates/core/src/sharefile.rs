//! Binary share files.
//!
//! ```text
//! offset  size  field
//! 0       1     version (currently 1)
//! 1       8     length in bits, u64 little-endian
//! 9       1     party id (1..=3)
//! 10      n     x part, LSB-first, n = ceil(length / 8)
//! 10+n    n     a part
//! ```

use std::path::Path;

use thiserror::Error;

use crate::bitvec::BitVector;
use crate::sharing::{reconstruct, reconstruct_pairwise, validate_bundle, PartyId, ReplicatedShare, ShareBundle};

pub const SHARE_FILE_VERSION: u8 = 1;
pub const HEADER_LEN: usize = 10;

#[derive(Debug, Error)]
pub enum ShareFileError {
    #[error("unsupported share file version {0} (expected {SHARE_FILE_VERSION})")]
    Version(u8),
    #[error("malformed share file: {0}")]
    Malformed(String),
    #[error("insufficient shares: need {needed}, got {got}")]
    InsufficientShares { needed: usize, got: usize },
    #[error("share files are inconsistent: {0}")]
    Inconsistent(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareFile {
    pub party: PartyId,
    pub share: ReplicatedShare,
}

impl ShareFile {
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 2 * self.share.len().div_ceil(8));
        out.push(SHARE_FILE_VERSION);
        out.extend_from_slice(&(self.share.len() as u64).to_le_bytes());
        out.push(self.party.get());
        out.extend_from_slice(&self.share.x().to_bytes());
        out.extend_from_slice(&self.share.a().to_bytes());
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self, ShareFileError> {
        if bytes.len() < HEADER_LEN {
            return Err(ShareFileError::Malformed(format!("{} bytes is shorter than the header", bytes.len())));
        }
        if bytes[0] != SHARE_FILE_VERSION {
            return Err(ShareFileError::Version(bytes[0]));
        }
        let len = u64::from_le_bytes(bytes[1..9].try_into().expect("8 bytes"));
        let party = PartyId::new(bytes[9]).map_err(|e| ShareFileError::Malformed(e.to_string()))?;
        let n = usize::try_from(len.div_ceil(8)).map_err(|_| ShareFileError::Malformed("length overflows".into()))?;
        let body = &bytes[HEADER_LEN..];
        if body.len() != 2 * n {
            return Err(ShareFileError::Malformed(format!(
                "{len} bits need {} body bytes, found {}",
                2 * n,
                body.len()
            )));
        }
        let bits = len as usize;
        let x = BitVector::from_bytes(&body[..n], bits).expect("length checked");
        let a = BitVector::from_bytes(&body[n..], bits).expect("length checked");
        Ok(Self {
            party,
            share: ReplicatedShare::new(x, a).expect("equal lengths"),
        })
    }

    pub fn read(path: &Path) -> Result<Self, ShareFileError> {
        Self::decode(&std::fs::read(path)?)
    }

    pub fn write(&self, path: &Path) -> Result<(), ShareFileError> {
        Ok(std::fs::write(path, self.encode())?)
    }
}

/// The three files of a bundle, in party order.
pub fn bundle_files(bundle: &ShareBundle) -> [ShareFile; 3] {
    PartyId::ALL.map(|p| ShareFile {
        party: p,
        share: bundle.share(p).clone(),
    })
}

fn check_lengths(files: &[ShareFile]) -> Result<usize, ShareFileError> {
    let len = files[0].share.len();
    if files.iter().any(|f| f.share.len() != len) {
        return Err(ShareFileError::Inconsistent("share lengths differ".into()));
    }
    let mut parties: Vec<u8> = files.iter().map(|f| f.party.get()).collect();
    parties.sort_unstable();
    parties.dedup();
    if parties.len() != files.len() {
        return Err(ShareFileError::Inconsistent("two files claim the same party".into()));
    }
    Ok(len)
}

/// Opens the secret from all three `a` parts, after checking that the
/// bundle is well formed.
pub fn reconstruct_files(files: &[ShareFile]) -> Result<BitVector, ShareFileError> {
    if files.len() < 3 {
        return Err(ShareFileError::InsufficientShares {
            needed: 3,
            got: files.len(),
        });
    }
    if files.len() > 3 {
        return Err(ShareFileError::Inconsistent(format!("{} files for three parties", files.len())));
    }
    check_lengths(files)?;
    let mut shares: Vec<&ShareFile> = files.iter().collect();
    shares.sort_by_key(|f| f.party);
    let bundle = ShareBundle::from_shares([0, 1, 2].map(|i| shares[i].share.clone()));
    let report = validate_bundle(&bundle);
    if !report.is_valid() {
        return Err(ShareFileError::Inconsistent(format!("{report:?}")));
    }
    let [a1, a2, a3] = bundle.a_parts();
    Ok(reconstruct(a1, a2, a3).expect("lengths checked"))
}

/// Opens the secret from any two shares: party `i`'s `a` part and the `x`
/// part of its predecessor.
pub fn reconstruct_two(files: &[ShareFile]) -> Result<BitVector, ShareFileError> {
    if files.len() < 2 {
        return Err(ShareFileError::InsufficientShares {
            needed: 2,
            got: files.len(),
        });
    }
    check_lengths(files)?;
    let (f, g) = (&files[0], &files[1]);
    let (own, prev) = if g.party == f.party.prev() { (f, g) } else { (g, f) };
    Ok(reconstruct_pairwise(&own.share, prev.share.x()).expect("lengths checked"))
}
