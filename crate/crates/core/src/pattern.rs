//! Fixed-length prediction patterns as packed bit vectors.
//!
//! A pattern holds one predicted class per training sample and is the unit
//! the pattern Rashomon set is built from. Patterns are immutable after
//! construction; Hamming distances run on 64-bit blocks via popcount.

use crate::{Error, Result};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;

/// Immutable bit vector with one prediction bit per sample.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pattern {
    len: usize,
    blocks: Vec<u64>,
}

impl Pattern {
    /// Build from per-sample class bits.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut blocks = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            debug_assert!(b <= 1);
            if b != 0 {
                blocks[i / 64] |= 1u64 << (i % 64);
            }
        }
        Pattern {
            len: bits.len(),
            blocks,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let v: Vec<u8> = bits.iter().map(|&b| b as u8).collect();
        Self::from_bits(&v)
    }

    /// Number of samples covered by the pattern.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Predicted class for sample `i`.
    pub fn get(&self, i: usize) -> u8 {
        assert!(i < self.len);
        ((self.blocks[i / 64] >> (i % 64)) & 1) as u8
    }

    pub fn bits(&self) -> Vec<u8> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Hamming distance: number of samples where predictions differ.
    pub fn hamming(&self, other: &Pattern) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                got: other.len,
            });
        }
        Ok(self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    /// Number of set bits.
    pub fn count_ones(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    /// Bitwise complement of every prediction.
    pub fn complement(&self) -> Pattern {
        let mut blocks: Vec<u64> = self.blocks.iter().map(|b| !b).collect();
        if let Some(last) = blocks.last_mut() {
            let used = self.len % 64;
            if used != 0 {
                *last &= (1u64 << used) - 1;
            }
        }
        Pattern {
            len: self.len,
            blocks,
        }
    }

    /// Mistakes against a label vector.
    pub fn mistakes(&self, labels: &Pattern) -> Result<usize> {
        self.hamming(labels)
    }
}

impl fmt::Debug for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i))?;
        }
        Ok(())
    }
}

/// Write patterns to a bit-packed binary file: each pattern occupies
/// `ceil(n/8)` bytes, bit `i` stored at byte `i/8`, bit position `i%8`
/// (LSB first), records concatenated row-major with no header.
pub fn write_patterns<'a>(
    path: &Path,
    patterns: impl IntoIterator<Item = &'a Pattern>,
    n: usize,
) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    let record = n.div_ceil(8);
    for p in patterns {
        if p.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: p.len(),
            });
        }
        let mut bytes = vec![0u8; record];
        for i in 0..n {
            if p.get(i) == 1 {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        file.write_all(&bytes)?;
    }
    file.flush()?;
    Ok(())
}

/// Read a bit-packed pattern file written by [`write_patterns`].
pub fn read_patterns(path: &Path, n: usize) -> Result<Vec<Pattern>> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    let record = n.div_ceil(8);
    if record == 0 || bytes.len() % record != 0 {
        return Err(Error::LengthMismatch {
            expected: record,
            got: bytes.len(),
        });
    }
    let mut out = Vec::with_capacity(bytes.len() / record);
    for chunk in bytes.chunks(record) {
        let bits: Vec<u8> = (0..n).map(|i| (chunk[i / 8] >> (i % 8)) & 1).collect();
        out.push(Pattern::from_bits(&bits));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn hamming_basics() {
        let a = Pattern::from_bits(&[0, 1, 1, 1]);
        let b = Pattern::from_bits(&[0, 0, 1, 1]);
        assert_eq!(a.hamming(&b).unwrap(), 1);
        assert_eq!(a.hamming(&a).unwrap(), 0);
        assert_eq!(a.complement().bits(), vec![1, 0, 0, 0]);
    }

    #[test]
    fn length_mismatch_rejected() {
        let a = Pattern::from_bits(&[0, 1]);
        let b = Pattern::from_bits(&[0, 1, 0]);
        assert!(a.hamming(&b).is_err());
    }

    #[test]
    fn packed_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.bin");
        let pats = vec![
            Pattern::from_bits(&[1, 0, 1, 0, 0, 1, 1, 1, 0]),
            Pattern::from_bits(&[0, 0, 0, 0, 0, 0, 0, 0, 1]),
        ];
        write_patterns(&path, &pats, 9).unwrap();
        // 9 bits -> 2 bytes per record, little-endian bit order
        let raw = std::fs::read(&path).unwrap();
        assert_eq!(
            raw,
            vec![0b1110_0101, 0b0000_0000, 0b0000_0000, 0b0000_0001]
        );
        assert_eq!(read_patterns(&path, 9).unwrap(), pats);
    }

    proptest! {
        #[test]
        fn hamming_matches_naive(a in prop::collection::vec(0u8..2, 1..200)) {
            let mut b = a.clone();
            for x in b.iter_mut().step_by(3) { *x ^= 1; }
            let pa = Pattern::from_bits(&a);
            let pb = Pattern::from_bits(&b);
            let naive = a.iter().zip(&b).filter(|(x, y)| x != y).count();
            prop_assert_eq!(pa.hamming(&pb).unwrap(), naive);
            // complement of both sides preserves distance
            prop_assert_eq!(pa.complement().hamming(&pb.complement()).unwrap(), naive);
        }

        #[test]
        fn file_round_trip(rows in prop::collection::vec(prop::collection::vec(0u8..2, 13), 0..8)) {
            let dir = tempfile::tempdir().unwrap();
            let path = dir.path().join("p.bin");
            let pats: Vec<Pattern> = rows.iter().map(|r| Pattern::from_bits(r)).collect();
            write_patterns(&path, &pats, 13).unwrap();
            prop_assert_eq!(read_patterns(&path, 13).unwrap(), pats);
        }
    }
}
