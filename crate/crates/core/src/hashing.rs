//! Universal hash family `h: {0,1}^k -> {0,1}^(k/2)` used for message
//! verification.
//!
//! The family is the affine GF(2) map `h(x) = A x xor c` with a uniformly
//! random binary `(k/2) x k` matrix `A` and offset `c`. For any fixed pair
//! `x != y`, a collision requires `A (x xor y) = 0`, which happens with
//! probability exactly `2^(-k/2)` over the choice of `A`, so the family is
//! universal with range size `b = 2^(k/2)`.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Error;
use crate::rng::SplitMix64;
use crate::Result;

/// A sampled member of the affine GF(2) hash family.
///
/// Rows are stored as packed 64-bit words (bit `i` of a row at word `i/64`,
/// bit `i%64`) so evaluation is a handful of AND/XOR/popcount steps per
/// output bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashFunctionGF2 {
    k: usize,
    rows: Vec<Vec<u64>>,
    offset: BitString,
}

/// Serialized form: rows and offset as most-significant-bit-first hex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashFunctionRecord {
    pub k: usize,
    pub matrix_hex: Vec<String>,
    pub offset_hex: String,
}

impl HashFunctionGF2 {
    /// Input length in bits.
    pub fn input_len(&self) -> usize {
        self.k
    }

    /// Digest length in bits.
    pub fn output_len(&self) -> usize {
        self.k / 2
    }

    /// Build from explicit rows and offset. Dimensions must be exactly
    /// `(k/2) x k` with `k` even.
    pub fn from_rows(rows: Vec<BitString>, offset: BitString) -> Result<Self> {
        let k = rows.first().map_or(0, |r| r.len());
        if k == 0 || !k.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "hash input length {k} must be a positive even number"
            )));
        }
        if rows.len() != k / 2 {
            return Err(Error::LengthMismatch {
                context: "hash matrix rows",
                expected: k / 2,
                actual: rows.len(),
            });
        }
        if rows.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidParameter(
                "hash matrix rows have unequal lengths".into(),
            ));
        }
        if offset.len() != k / 2 {
            return Err(Error::LengthMismatch {
                context: "hash offset",
                expected: k / 2,
                actual: offset.len(),
            });
        }
        Ok(Self {
            k,
            rows: rows.iter().map(BitString::to_words).collect(),
            offset,
        })
    }

    /// Row `i` as a bit string (for serialization and inspection).
    pub fn row_bits(&self, i: usize) -> BitString {
        let mut bits = BitString::new();
        for j in 0..self.k {
            bits.push(((self.rows[i][j / 64] >> (j % 64)) & 1) as u8);
        }
        bits
    }

    pub fn offset_bits(&self) -> &BitString {
        &self.offset
    }

    /// Rank of the matrix over GF(2), by Gaussian elimination on the packed
    /// rows. The digest image has size `2^rank`.
    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.k {
            let (word, bit) = (col / 64, col % 64);
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r][word] >> bit & 1 == 1) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row[word] >> bit & 1 == 1 {
                    for (w, p) in row.iter_mut().zip(&pivot_row) {
                        *w ^= p;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    /// Serialized record with hex-encoded rows.
    pub fn to_record(&self) -> HashFunctionRecord {
        HashFunctionRecord {
            k: self.k,
            matrix_hex: (0..self.output_len())
                .map(|i| self.row_bits(i).to_hex())
                .collect(),
            offset_hex: self.offset.to_hex(),
        }
    }

    /// Parse a serialized record.
    pub fn from_record(record: &HashFunctionRecord) -> Result<Self> {
        let rows = record
            .matrix_hex
            .iter()
            .map(|hex| BitString::from_hex(hex, record.k))
            .collect::<Result<Vec<_>>>()?;
        let offset = BitString::from_hex(&record.offset_hex, record.k / 2)?;
        Self::from_rows(rows, offset)
    }
}

/// Sample a hash function uniformly: every matrix entry and offset bit is an
/// independent fair coin. Rejects odd or nonpositive `k`. Draw order: matrix
/// rows first (row-major, one draw per bit), then the offset.
pub fn sample_hash(k: usize, rng: &mut SplitMix64) -> Result<HashFunctionGF2> {
    if k < 2 || !k.is_multiple_of(2) {
        return Err(Error::InvalidParameter(format!(
            "hash input length {k} must be even and at least 2"
        )));
    }
    let rows: Vec<BitString> = (0..k / 2).map(|_| BitString::random(k, rng)).collect();
    let offset = BitString::random(k / 2, rng);
    HashFunctionGF2::from_rows(rows, offset)
}

/// Evaluate `h(m) = A m xor c`. Rejects input of the wrong length.
/// Cost is `O(k^2)` bit operations, word-packed.
pub fn eval_hash(h: &HashFunctionGF2, message: &BitString) -> Result<BitString> {
    if message.len() != h.k {
        return Err(Error::LengthMismatch {
            context: "hash input",
            expected: h.k,
            actual: message.len(),
        });
    }
    let words = message.to_words();
    let mut digest = BitString::new();
    for (i, row) in h.rows.iter().enumerate() {
        let dot: u32 = row
            .iter()
            .zip(&words)
            .map(|(r, w)| (r & w).count_ones())
            .sum();
        digest.push((dot as u8 & 1) ^ h.offset.get(i));
    }
    Ok(digest)
}
