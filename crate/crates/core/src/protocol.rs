//! Honest-party state machines for bit-string and single-bit oblivious
//! transfer.
//!
//! Transferring phase: Alice draws a direction bit and a key of `3k/2`
//! rotation counts, then sends one qubit per bit of `message || digest`,
//! each rotated by `bit * pi + (-1)^direction * s_i * theta_n`. Opening
//! phase: she reveals the key (never the direction); Bob checks the key
//! looks random, guesses a direction, un-rotates, measures, and accepts the
//! decoded message only if its digest matches. Guessing the opposite
//! direction recovers the message with certainty; guessing the same
//! direction leaves each qubit correct only with probability
//! `cos^2(s_i * theta_n)`, and the digest check then fails essentially
//! always.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Error;
use crate::hashing::{eval_hash, sample_hash, HashFunctionGF2};
use crate::qubit::{encode_bit, measure_computational, rotate, theta, Angle, QubitState};
use crate::randomness::{verify_key_randomness, BATTERY_ALPHA};
use crate::rng::SplitMix64;
use crate::Result;

/// Smallest supported message length; below this the digest has under four
/// bits and verification is meaningless.
pub const MIN_MESSAGE_LEN: usize = 8;

/// Shared session parameters agreed out of band before the transferring
/// phase: message length `k`, security parameter `n`, and the (public)
/// verification hash.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionParams {
    k: usize,
    n: u32,
    hash: HashFunctionGF2,
}

impl SessionParams {
    pub fn new(k: usize, n: u32, hash: HashFunctionGF2) -> Result<Self> {
        if k < MIN_MESSAGE_LEN || !k.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "message length {k} must be even and at least {MIN_MESSAGE_LEN}"
            )));
        }
        if !(1..=crate::qubit::MAX_SECURITY_PARAMETER).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "security parameter {n} outside 1..={}",
                crate::qubit::MAX_SECURITY_PARAMETER
            )));
        }
        if hash.input_len() != k {
            return Err(Error::LengthMismatch {
                context: "session hash input length",
                expected: k,
                actual: hash.input_len(),
            });
        }
        Ok(Self { k, n, hash })
    }

    /// Agree on parameters with a freshly sampled hash function.
    pub fn sample(k: usize, n: u32, rng: &mut SplitMix64) -> Result<Self> {
        if k < MIN_MESSAGE_LEN || !k.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "message length {k} must be even and at least {MIN_MESSAGE_LEN}"
            )));
        }
        let hash = sample_hash(k, rng)?;
        Self::new(k, n, hash)
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn hash(&self) -> &HashFunctionGF2 {
        &self.hash
    }

    /// Grid angle `pi / 2^(n-1)`.
    pub fn theta_n(&self) -> f64 {
        theta(self.n)
    }

    /// Number of qubits on the wire: `3k/2`.
    pub fn register_len(&self) -> usize {
        3 * self.k / 2
    }
}

/// A vector of rotation counts, each in `{0, ..., 2^n - 1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SecretKey {
    values: Vec<u32>,
    n: u32,
}

impl SecretKey {
    pub fn new(values: Vec<u32>, n: u32) -> Result<Self> {
        if !(1..=crate::qubit::MAX_SECURITY_PARAMETER).contains(&n) {
            return Err(Error::InvalidParameter(format!(
                "security parameter {n} outside 1..={}",
                crate::qubit::MAX_SECURITY_PARAMETER
            )));
        }
        if let Some(&bad) = values.iter().find(|&&v| u64::from(v) >= 1u64 << n) {
            return Err(Error::KeyOutOfRange {
                value: u64::from(bad),
                n,
            });
        }
        Ok(Self { values, n })
    }

    /// Uniform key: one generator draw per entry, in index order.
    pub fn sample(len: usize, n: u32, rng: &mut SplitMix64) -> Self {
        let values = (0..len).map(|_| rng.next_bits(n)).collect();
        Self { values, n }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn value(&self, i: usize) -> u32 {
        self.values[i]
    }

    pub fn security_parameter(&self) -> u32 {
        self.n
    }
}

/// Uniform key conditioned on passing the opening-phase randomness battery.
///
/// Rejection-samples honest keys until the battery accepts (about 98% of
/// uniform keys do). Experiments that verify the quantum branch of the
/// protocol use this so the classical key check, which rejects a fixed
/// `~2 alpha` fraction of honest keys by design, does not dilute their
/// statistics.
pub fn sample_accepted_key(len: usize, n: u32, rng: &mut SplitMix64) -> SecretKey {
    loop {
        let key = SecretKey::sample(len, n, rng);
        if verify_key_randomness(&key, BATTERY_ALPHA).overall_pass {
            return key;
        }
    }
}

/// Alice's private session record. Deliberately not serializable: the
/// direction bit must never leave her side, so no wire artifact can be
/// built from this type.
#[derive(Debug, Clone)]
pub struct AliceRecord {
    direction: bool,
    key: SecretKey,
    message: BitString,
    digest: BitString,
}

impl AliceRecord {
    pub fn direction(&self) -> bool {
        self.direction
    }

    pub fn key(&self) -> &SecretKey {
        &self.key
    }

    pub fn message(&self) -> &BitString {
        &self.message
    }

    pub fn digest(&self) -> &BitString {
        &self.digest
    }
}

/// The `3k/2` qubits on the wire: message qubits first, digest qubits last.
#[derive(Debug, Clone, PartialEq)]
pub struct CipherState {
    qubits: Vec<QubitState>,
}

impl CipherState {
    pub fn from_qubits(qubits: Vec<QubitState>) -> Self {
        Self { qubits }
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn qubits(&self) -> &[QubitState] {
        &self.qubits
    }
}

/// The opening-phase message: the key and its security parameter, nothing
/// else. Serializes as `{"key": [...], "n": ...}`.
#[derive(Debug, Clone, PartialEq)]
pub struct OpeningMessage {
    key: SecretKey,
}

impl OpeningMessage {
    /// Wrap a key for the opening phase. Honest Alice goes through
    /// [`alice_open`]; a cheating Alice announces whatever key she built her
    /// state around.
    pub fn new(key: SecretKey) -> Self {
        Self { key }
    }

    pub fn key(&self) -> &SecretKey {
        &self.key
    }

    pub fn n(&self) -> u32 {
        self.key.security_parameter()
    }
}

#[derive(Serialize, Deserialize)]
struct OpeningRecord {
    key: Vec<u32>,
    n: u32,
}

impl Serialize for OpeningMessage {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        OpeningRecord {
            key: self.key.values().to_vec(),
            n: self.key.security_parameter(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for OpeningMessage {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let record = OpeningRecord::deserialize(deserializer)?;
        let key = SecretKey::new(record.key, record.n).map_err(serde::de::Error::custom)?;
        Ok(OpeningMessage { key })
    }
}

/// Why Bob rejected a session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RejectReason {
    KeyNotRandom,
    DigestMismatch,
}

/// Bob's final output for a session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "lowercase")]
pub enum BobOutcome {
    Received { message: BitString },
    Rejected { reason: RejectReason },
}

impl BobOutcome {
    pub fn received_message(&self) -> Option<&BitString> {
        match self {
            BobOutcome::Received { message } => Some(message),
            BobOutcome::Rejected { .. } => None,
        }
    }
}

/// Transferring phase with explicit direction and key; the sampling wrapper
/// [`alice_transfer`] delegates here. Qubit `i` of the register encodes bit
/// `i` of `message || hash(message)` under rotation count `key[i]`.
pub fn alice_transfer_with(
    message: &BitString,
    params: &SessionParams,
    direction: bool,
    key: SecretKey,
) -> Result<(CipherState, AliceRecord)> {
    if message.len() != params.k() {
        return Err(Error::LengthMismatch {
            context: "message",
            expected: params.k(),
            actual: message.len(),
        });
    }
    if key.len() != params.register_len() {
        return Err(Error::LengthMismatch {
            context: "secret key",
            expected: params.register_len(),
            actual: key.len(),
        });
    }
    if key.security_parameter() != params.n() {
        return Err(Error::InvalidParameter(format!(
            "key security parameter {} does not match session {}",
            key.security_parameter(),
            params.n()
        )));
    }
    let digest = eval_hash(params.hash(), message)?;
    let content = message.concat(&digest);
    let qubits = content
        .iter()
        .enumerate()
        .map(|(i, bit)| encode_bit(bit, key.value(i), direction, params.n()))
        .collect::<Result<Vec<_>>>()?;
    Ok((
        CipherState::from_qubits(qubits),
        AliceRecord {
            direction,
            key,
            message: message.clone(),
            digest,
        },
    ))
}

/// Transferring phase, steps 1 and 2: draw the direction bit, draw a uniform
/// key (one draw per entry, after the direction draw), encode, and hand the
/// cipher to the wire.
pub fn alice_transfer(
    message: &BitString,
    params: &SessionParams,
    rng: &mut SplitMix64,
) -> Result<(CipherState, AliceRecord)> {
    let direction = rng.next_bool();
    let key = SecretKey::sample(params.register_len(), params.n(), rng);
    alice_transfer_with(message, params, direction, key)
}

/// Opening phase, step 3: reveal the key and `n`. The direction bit is not
/// part of the type and cannot leak here.
pub fn alice_open(record: &AliceRecord) -> OpeningMessage {
    OpeningMessage {
        key: record.key().clone(),
    }
}

fn check_open_lengths(
    cipher: &CipherState,
    opening: &OpeningMessage,
    params: &SessionParams,
) -> Result<()> {
    if cipher.len() != params.register_len() {
        return Err(Error::LengthMismatch {
            context: "cipher register",
            expected: params.register_len(),
            actual: cipher.len(),
        });
    }
    if opening.key().len() != cipher.len() {
        return Err(Error::LengthMismatch {
            context: "opened key",
            expected: cipher.len(),
            actual: opening.key().len(),
        });
    }
    if opening.n() != params.n() {
        return Err(Error::InvalidParameter(format!(
            "opened security parameter {} does not match session {}",
            opening.n(),
            params.n()
        )));
    }
    Ok(())
}

/// Opening phase for Bob with his direction guess fixed, additionally
/// returning the raw measured register (None when the key battery already
/// rejected the session). The raw bits are instrumentation for experiment
/// reports; the protocol outcome alone is in [`bob_open_with_direction`].
pub fn bob_open_traced(
    cipher: &CipherState,
    opening: &OpeningMessage,
    params: &SessionParams,
    direction: bool,
    rng: &mut SplitMix64,
) -> Result<(BobOutcome, Option<BitString>)> {
    check_open_lengths(cipher, opening, params)?;
    if !verify_key_randomness(opening.key(), BATTERY_ALPHA).overall_pass {
        return Ok((
            BobOutcome::Rejected {
                reason: RejectReason::KeyNotRandom,
            },
            None,
        ));
    }
    let mut register = BitString::new();
    for (i, qubit) in cipher.qubits().iter().enumerate() {
        let angle = Angle::key_rotation(opening.key().value(i), params.n(), direction)?;
        let rotated = rotate(*qubit, angle);
        register.push(measure_computational(&rotated, rng));
    }
    let message = register.slice(0..params.k());
    let digest = register.slice(params.k()..params.register_len());
    let outcome = if eval_hash(params.hash(), &message)? == digest {
        BobOutcome::Received { message }
    } else {
        BobOutcome::Rejected {
            reason: RejectReason::DigestMismatch,
        }
    };
    Ok((outcome, Some(register)))
}

/// Opening phase, steps 4-7, with Bob's direction guess supplied by the
/// caller: run the key battery, un-rotate each qubit by
/// `(-1)^direction * s_i * theta_n`, measure, split into message and digest,
/// and accept only on digest match.
pub fn bob_open_with_direction(
    cipher: &CipherState,
    opening: &OpeningMessage,
    params: &SessionParams,
    direction: bool,
    rng: &mut SplitMix64,
) -> Result<BobOutcome> {
    bob_open_traced(cipher, opening, params, direction, rng).map(|(outcome, _)| outcome)
}

/// Opening phase, steps 4-7: the battery runs first (consuming no random
/// draws), then Bob draws his direction uniformly and decodes.
pub fn bob_open(
    cipher: &CipherState,
    opening: &OpeningMessage,
    params: &SessionParams,
    rng: &mut SplitMix64,
) -> Result<BobOutcome> {
    check_open_lengths(cipher, opening, params)?;
    if !verify_key_randomness(opening.key(), BATTERY_ALPHA).overall_pass {
        return Ok(BobOutcome::Rejected {
            reason: RejectReason::KeyNotRandom,
        });
    }
    let direction = rng.next_bool();
    bob_open_with_direction(cipher, opening, params, direction, rng)
}

/// Single-bit transfer, Alice's side: draw a uniform message with parity
/// `bit` (the first `k-1` bits free, the last fixing the parity), then run
/// the bit-string transferring phase on it.
pub fn single_bit_ot_alice(
    bit: u8,
    params: &SessionParams,
    rng: &mut SplitMix64,
) -> Result<(BitString, CipherState, AliceRecord)> {
    debug_assert!(bit <= 1);
    let mut message = BitString::random(params.k() - 1, rng);
    message.push(message.parity() ^ bit);
    let (cipher, record) = alice_transfer(&message, params, rng)?;
    Ok((message, cipher, record))
}

/// Single-bit transfer, Bob's side: the parity of a received message, or
/// nothing when the session was rejected.
pub fn single_bit_ot_bob(outcome: &BobOutcome) -> Option<u8> {
    outcome.received_message().map(BitString::parity)
}
