//! Bit-string values used for messages, digests, and key encodings.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;
use crate::rng::SplitMix64;

/// An ordered sequence of bits. Bit 0 is the leftmost bit of the textual
/// form, matching the protocol's `m = m_1 ... m_k` indexing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct BitString {
    bits: Vec<u8>,
}

impl BitString {
    /// Empty bit string.
    pub fn new() -> Self {
        Self { bits: Vec::new() }
    }

    /// Build from raw 0/1 bytes.
    pub fn from_bits(bits: Vec<u8>) -> Result<Self, Error> {
        if bits.iter().any(|&b| b > 1) {
            return Err(Error::Parse("bit values must be 0 or 1".into()));
        }
        Ok(Self { bits })
    }

    /// All-zero string of the given length.
    pub fn zeros(len: usize) -> Self {
        Self { bits: vec![0; len] }
    }

    /// Uniformly random string; consumes one generator draw per bit.
    pub fn random(len: usize, rng: &mut SplitMix64) -> Self {
        Self {
            bits: (0..len).map(|_| rng.next_bool() as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize) -> u8 {
        self.bits[i]
    }

    pub fn push(&mut self, bit: u8) {
        debug_assert!(bit <= 1);
        self.bits.push(bit);
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        self.bits.iter().copied()
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.bits
    }

    /// XOR of all bits.
    pub fn parity(&self) -> u8 {
        self.bits.iter().fold(0, |acc, b| acc ^ b)
    }

    /// Sub-range as a new string.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            bits: self.bits[range].to_vec(),
        }
    }

    /// Concatenation.
    pub fn concat(&self, other: &Self) -> Self {
        let mut bits = self.bits.clone();
        bits.extend_from_slice(&other.bits);
        Self { bits }
    }

    /// Pack into 64-bit words, bit `i` stored at word `i / 64`, position
    /// `i % 64` (least significant first). Used for fast GF(2) dot products.
    pub fn to_words(&self) -> Vec<u64> {
        let mut words = vec![0u64; self.bits.len().div_ceil(64)];
        for (i, &b) in self.bits.iter().enumerate() {
            words[i / 64] |= (b as u64) << (i % 64);
        }
        words
    }

    /// Hex encoding, most significant bit first: bit 0 is the high bit of the
    /// first nibble; the final nibble is zero-padded on the right.
    pub fn to_hex(&self) -> String {
        let mut out = String::with_capacity(self.bits.len().div_ceil(4));
        for chunk in self.bits.chunks(4) {
            let mut nibble = 0u8;
            for (j, &b) in chunk.iter().enumerate() {
                nibble |= b << (3 - j);
            }
            out.push(char::from_digit(nibble as u32, 16).unwrap());
        }
        out
    }

    /// Inverse of [`to_hex`](Self::to_hex); `len` recovers the exact bit
    /// count dropped by nibble padding.
    pub fn from_hex(hex: &str, len: usize) -> Result<Self, Error> {
        if hex.len() != len.div_ceil(4) {
            return Err(Error::Parse(format!(
                "hex string of {} nibbles cannot hold {} bits",
                hex.len(),
                len
            )));
        }
        let mut bits = Vec::with_capacity(len);
        for c in hex.chars() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit '{c}'")))?
                as u8;
            for j in 0..4 {
                if bits.len() < len {
                    bits.push((nibble >> (3 - j)) & 1);
                }
            }
        }
        Ok(Self { bits })
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl FromStr for BitString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("invalid bit character '{c}'"))),
            })
            .collect::<Result<Vec<u8>, Error>>()
            .map(|bits| Self { bits })
    }
}

impl Serialize for BitString {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for BitString {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(D::Error::custom)
    }
}
