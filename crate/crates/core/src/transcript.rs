//! Per-session JSON transcripts for audit and replay.
//!
//! One JSON document per simulated session: the agreed parameters, the wire
//! cipher (amplitude pairs printed with 17 significant digits, which
//! round-trip `f64` exactly), the opening message, Bob's outcome, and the
//! trial seed that reproduces the whole session. Alice's direction bit and
//! plaintext never appear; the transcript holds only what crossed the wire.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::hashing::{HashFunctionGF2, HashFunctionRecord};
use crate::protocol::{BobOutcome, CipherState, OpeningMessage, SessionParams};
use crate::qubit::QubitState;
use crate::Result;

pub const TRANSCRIPT_SCHEMA_VERSION: u32 = 1;

/// A complete session record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionTranscript {
    pub schema_version: u32,
    pub trial_seed: u64,
    pub k: usize,
    pub n: u32,
    pub hash: HashFunctionRecord,
    /// Amplitude pairs `[amp0, amp1]` in register order, 17 significant
    /// digits each.
    pub cipher: Vec<[String; 2]>,
    pub opening: OpeningMessage,
    pub outcome: BobOutcome,
}

fn format_amplitude(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse_amplitude(s: &str) -> Result<f64> {
    s.parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad amplitude '{s}': {e}")))
}

impl SessionTranscript {
    pub fn new(
        params: &SessionParams,
        trial_seed: u64,
        cipher: &CipherState,
        opening: &OpeningMessage,
        outcome: &BobOutcome,
    ) -> Self {
        Self {
            schema_version: TRANSCRIPT_SCHEMA_VERSION,
            trial_seed,
            k: params.k(),
            n: params.n(),
            hash: params.hash().to_record(),
            cipher: cipher
                .qubits()
                .iter()
                .map(|q| [format_amplitude(q.amp0()), format_amplitude(q.amp1())])
                .collect(),
            opening: opening.clone(),
            outcome: outcome.clone(),
        }
    }

    /// Compact JSON document; field order is fixed, so identical sessions
    /// serialize byte-identically.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("transcript serialization cannot fail")
    }

    pub fn from_json(json: &str) -> Result<Self> {
        serde_json::from_str(json).map_err(|e| Error::Parse(format!("transcript: {e}")))
    }

    /// Rebuild the wire cipher, validating unit norms.
    pub fn cipher_state(&self) -> Result<CipherState> {
        let qubits = self
            .cipher
            .iter()
            .map(|[a, b]| QubitState::new(parse_amplitude(a)?, parse_amplitude(b)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(CipherState::from_qubits(qubits))
    }

    /// Rebuild the session parameters.
    pub fn session_params(&self) -> Result<SessionParams> {
        let hash = HashFunctionGF2::from_record(&self.hash)?;
        SessionParams::new(self.k, self.n, hash)
    }

    /// Structural audit: schema version, register length, key length and
    /// range, digest length of a received message.
    pub fn audit(&self) -> Result<()> {
        if self.schema_version != TRANSCRIPT_SCHEMA_VERSION {
            return Err(Error::Parse(format!(
                "unsupported transcript schema {}",
                self.schema_version
            )));
        }
        let params = self.session_params()?;
        let cipher = self.cipher_state()?;
        if cipher.len() != params.register_len() {
            return Err(Error::LengthMismatch {
                context: "transcript cipher",
                expected: params.register_len(),
                actual: cipher.len(),
            });
        }
        if self.opening.key().len() != params.register_len() {
            return Err(Error::LengthMismatch {
                context: "transcript opening",
                expected: params.register_len(),
                actual: self.opening.key().len(),
            });
        }
        if let Some(message) = self.outcome.received_message() {
            if message.len() != params.k() {
                return Err(Error::LengthMismatch {
                    context: "transcript received message",
                    expected: params.k(),
                    actual: message.len(),
                });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::BitString;
    use crate::protocol::{alice_open, alice_transfer, bob_open};
    use crate::rng::SplitMix64;

    fn build_transcript(seed: u64) -> SessionTranscript {
        let params = SessionParams::sample(8, 3, &mut SplitMix64::new(900)).unwrap();
        let mut rng = SplitMix64::new(seed);
        let message = BitString::random(8, &mut rng);
        let (cipher, record) = alice_transfer(&message, &params, &mut rng).unwrap();
        let opening = alice_open(&record);
        let outcome = bob_open(&cipher, &opening, &params, &mut rng).unwrap();
        SessionTranscript::new(&params, seed, &cipher, &opening, &outcome)
    }

    #[test]
    fn json_round_trip_is_byte_exact() {
        let t = build_transcript(7001);
        let json = t.to_json();
        let back = SessionTranscript::from_json(&json).unwrap();
        assert_eq!(back, t);
        assert_eq!(back.to_json(), json);
    }

    #[test]
    fn amplitudes_survive_serialization_exactly() {
        let t = build_transcript(7002);
        let original = t.cipher_state().unwrap();
        let json = t.to_json();
        let reparsed = SessionTranscript::from_json(&json)
            .unwrap()
            .cipher_state()
            .unwrap();
        for (a, b) in original.qubits().iter().zip(reparsed.qubits()) {
            assert_eq!(a.amp0().to_bits(), b.amp0().to_bits());
            assert_eq!(a.amp1().to_bits(), b.amp1().to_bits());
        }
    }

    #[test]
    fn audit_accepts_honest_sessions() {
        for seed in 7003..7010 {
            build_transcript(seed).audit().unwrap();
        }
    }

    #[test]
    fn audit_rejects_truncated_cipher() {
        let mut t = build_transcript(7011);
        t.cipher.pop();
        assert!(t.audit().is_err());
    }

    #[test]
    fn audit_rejects_foreign_schema() {
        let mut t = build_transcript(7012);
        t.schema_version = 99;
        assert!(t.audit().is_err());
    }

    #[test]
    fn parse_rejects_garbage_amplitudes() {
        let mut t = build_transcript(7013);
        t.cipher[0][0] = "not-a-number".into();
        assert!(t.cipher_state().is_err());
    }
}
