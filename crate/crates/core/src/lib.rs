//! Simulator and verification harness for an oblivious-transfer protocol that
//! encodes message bits in single-qubit rotations.
//!
//! Alice encodes each bit of a message (and of its hash digest) into a qubit
//! rotated by a secret multiple of the angle grid `pi / 2^(n-1)`, with the
//! rotation direction hidden behind a single secret bit. Revealing the key but
//! not the direction lets Bob decode with probability 1/2; the hash digest
//! tells him whether he succeeded. The crate provides:
//!
//! - [`qubit`]: real-amplitude single-qubit states, rotations, Born-rule
//!   measurement, and small density-matrix helpers;
//! - [`hashing`]: the affine-over-GF(2) universal hash family used for
//!   message verification;
//! - [`randomness`]: the statistical battery Bob applies to the revealed key;
//! - [`protocol`]: honest-party state machines for bit-string and single-bit
//!   oblivious transfer;
//! - [`pubkey`]: the underlying rotation-based public-key encryption scheme;
//! - [`adversary`]: cheating strategies for either party and their analytic
//!   bounds;
//! - [`harness`]: deterministic Monte-Carlo experiments that check every
//!   security bound against its analytic value;
//! - [`transcript`]: the JSON session-transcript format used for audit and
//!   replay.
//!
//! All randomness flows through [`rng::SplitMix64`], so every simulation is
//! reproducible from a single 64-bit seed.

pub mod adversary;
pub mod bits;
pub mod error;
pub mod harness;
pub mod hashing;
pub mod protocol;
pub mod pubkey;
pub mod qubit;
pub mod randomness;
pub mod rng;
pub mod stats;
pub mod transcript;

pub use bits::BitString;
pub use error::Error;
pub use rng::SplitMix64;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
