//! The rotation-based public-key encryption scheme underlying the transfer
//! protocol.
//!
//! Key generation publishes `k` qubits `R(s_i * theta_n)|0>` for a secret
//! key of rotation counts. Encryption flips qubit `i` by a half-turn when
//! message bit `i` is set; decryption un-rotates with the secret key and
//! measures, recovering the message with certainty. Without the key every
//! qubit is a complete mixture and carries nothing about the plaintext.
//! Keys are single-use: encrypting twice against one public key leaks the
//! XOR of the plaintexts, so [`encrypt`] consumes nothing but callers must
//! treat a `(SecretKey, PublicKey)` pair as one encryption budget.

use crate::bits::BitString;
use crate::error::Error;
use crate::protocol::{CipherState, SecretKey};
use crate::qubit::{measure_computational, rotate, Angle, QubitState};
use crate::rng::SplitMix64;
use crate::Result;

/// The published qubits `R(s_i * theta_n)|0>`.
#[derive(Debug, Clone, PartialEq)]
pub struct PublicKey {
    qubits: Vec<QubitState>,
    n: u32,
}

impl PublicKey {
    pub fn qubits(&self) -> &[QubitState] {
        &self.qubits
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn security_parameter(&self) -> u32 {
        self.n
    }
}

/// Deterministic half of key generation: the public key a given secret key
/// publishes.
pub fn public_key_for(secret: &SecretKey) -> Result<PublicKey> {
    let n = secret.security_parameter();
    let qubits = secret
        .values()
        .iter()
        .map(|&s| {
            Ok(rotate(
                QubitState::zero(),
                Angle::key_rotation(s, n, false)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(PublicKey { qubits, n })
}

/// Draw a uniform secret key of `k` rotation counts and publish its public
/// key.
pub fn keygen(k: usize, n: u32, rng: &mut SplitMix64) -> Result<(SecretKey, PublicKey)> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "key length must be positive".into(),
        ));
    }
    if !(1..=crate::qubit::MAX_SECURITY_PARAMETER).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "security parameter {n} outside 1..={}",
            crate::qubit::MAX_SECURITY_PARAMETER
        )));
    }
    let secret = SecretKey::sample(k, n, rng);
    let public = public_key_for(&secret)?;
    Ok((secret, public))
}

/// Encrypt a message of at most `k` bits: zero-pad on the right to `k`, then
/// rotate qubit `i` by `m_i * pi`.
pub fn encrypt(message: &BitString, public: &PublicKey) -> Result<CipherState> {
    if message.len() > public.len() {
        return Err(Error::LengthMismatch {
            context: "plaintext",
            expected: public.len(),
            actual: message.len(),
        });
    }
    let qubits = public
        .qubits()
        .iter()
        .enumerate()
        .map(|(i, q)| {
            let bit = if i < message.len() { message.get(i) } else { 0 };
            if bit == 1 {
                rotate_half_turn(*q)
            } else {
                *q
            }
        })
        .collect();
    Ok(CipherState::from_qubits(qubits))
}

fn rotate_half_turn(q: QubitState) -> QubitState {
    crate::qubit::rotate_radians(q, std::f64::consts::PI)
}

/// Decrypt with the secret key: apply `R(-s_i * theta_n)` to each qubit and
/// measure. Returns all `k` plaintext bits including any zero padding.
pub fn decrypt(
    cipher: &CipherState,
    secret: &SecretKey,
    rng: &mut SplitMix64,
) -> Result<BitString> {
    if cipher.len() != secret.len() {
        return Err(Error::LengthMismatch {
            context: "ciphertext",
            expected: secret.len(),
            actual: cipher.len(),
        });
    }
    let n = secret.security_parameter();
    let mut out = BitString::new();
    for (i, qubit) in cipher.qubits().iter().enumerate() {
        let angle = Angle::key_rotation(secret.value(i), n, true)?;
        let rotated = rotate(*qubit, angle);
        out.push(measure_computational(&rotated, rng));
    }
    Ok(out)
}

/// Decrypt and strip the zero padding back to the original message length.
pub fn decrypt_message(
    cipher: &CipherState,
    secret: &SecretKey,
    message_len: usize,
    rng: &mut SplitMix64,
) -> Result<BitString> {
    if message_len > cipher.len() {
        return Err(Error::LengthMismatch {
            context: "plaintext length",
            expected: cipher.len(),
            actual: message_len,
        });
    }
    Ok(decrypt(cipher, secret, rng)?.slice(0..message_len))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_key_publishes_zero_states() {
        let secret = SecretKey::new(vec![0; 6], 3).unwrap();
        let public = public_key_for(&secret).unwrap();
        for q in public.qubits() {
            assert!((q.amp0() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn half_range_key_publishes_one_states() {
        // s = 2^(n-1) rotates by exactly pi.
        let secret = SecretKey::new(vec![4], 3).unwrap();
        let public = public_key_for(&secret).unwrap();
        assert!(public.qubits()[0].amp0().abs() < 1e-12);
        assert!((public.qubits()[0].amp1().abs() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn keygen_is_reproducible() {
        let (s1, p1) = keygen(8, 4, &mut SplitMix64::new(555)).unwrap();
        let (s2, p2) = keygen(8, 4, &mut SplitMix64::new(555)).unwrap();
        assert_eq!(s1, s2);
        assert_eq!(p1, p2);
    }

    #[test]
    fn keygen_snapshot() {
        let (secret, _) = keygen(8, 4, &mut SplitMix64::new(314159)).unwrap();
        let values: Vec<u32> = secret.values().to_vec();
        assert_eq!(values, SNAPSHOT_KEY);
    }

    const SNAPSHOT_KEY: [u32; 8] = [9, 13, 0, 1, 6, 13, 12, 14];

    #[test]
    fn zero_message_leaves_public_key_untouched() {
        let (secret, public) = keygen(8, 3, &mut SplitMix64::new(1)).unwrap();
        let cipher = encrypt(&BitString::zeros(8), &public).unwrap();
        assert_eq!(cipher.qubits(), public.qubits());
        let _ = secret;
    }

    #[test]
    fn single_set_bit_flips_the_matching_qubit() {
        let secret = SecretKey::new(vec![0; 4], 3).unwrap();
        let public = public_key_for(&secret).unwrap();
        let cipher = encrypt(&"1000".parse().unwrap(), &public).unwrap();
        assert!(cipher.qubits()[0].amp1().abs() > 1.0 - 1e-12);
        for q in &cipher.qubits()[1..] {
            assert!((q.amp0() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn over_length_message_rejected() {
        let (_, public) = keygen(4, 3, &mut SplitMix64::new(2)).unwrap();
        assert!(encrypt(&BitString::zeros(5), &public).is_err());
    }

    #[test]
    fn roundtrip_is_exact() {
        let mut rng = SplitMix64::new(0x0DD5);
        for _ in 0..100 {
            let (secret, public) = keygen(16, 4, &mut rng).unwrap();
            let message = BitString::random(16, &mut rng);
            let cipher = encrypt(&message, &public).unwrap();
            let decoded = decrypt(&cipher, &secret, &mut rng).unwrap();
            assert_eq!(decoded, message);
        }
    }

    #[test]
    fn short_message_roundtrip_strips_padding() {
        let mut rng = SplitMix64::new(0x0DD6);
        let (secret, public) = keygen(8, 3, &mut rng).unwrap();
        let message: BitString = "101".parse().unwrap();
        let cipher = encrypt(&message, &public).unwrap();
        assert_eq!(cipher.len(), 8);
        let decoded = decrypt_message(&cipher, &secret, 3, &mut rng).unwrap();
        assert_eq!(decoded, message);
        // Zero-length message decodes to the empty string.
        let empty = encrypt(&BitString::new(), &public).unwrap();
        let decoded = decrypt_message(&empty, &secret, 0, &mut rng).unwrap();
        assert!(decoded.is_empty());
    }

    #[test]
    fn off_by_one_key_decodes_at_the_closed_form_rate() {
        // Decrypting with s+1 leaves a residual rotation of one grid step;
        // each bit survives with probability cos^2(theta_n / 2).
        let n = 3u32;
        let expected = (crate::qubit::theta(n) / 2.0).cos().powi(2);
        let mut rng = SplitMix64::new(0xBADC0DE);
        let trials = 20_000usize;
        let mut correct = 0usize;
        for _ in 0..trials {
            // Keep s+1 in range by sampling below the maximum count.
            let s = rng.next_bits(n) % ((1 << n) - 1);
            let secret = SecretKey::new(vec![s], n).unwrap();
            let public = public_key_for(&secret).unwrap();
            let bit = rng.next_bool() as u8;
            let message = BitString::from_bits(vec![bit]).unwrap();
            let cipher = encrypt(&message, &public).unwrap();
            let wrong = SecretKey::new(vec![s + 1], n).unwrap();
            let decoded = decrypt(&cipher, &wrong, &mut rng).unwrap();
            if decoded.get(0) == bit {
                correct += 1;
            }
        }
        let rate = correct as f64 / trials as f64;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!(
            (rate - expected).abs() < 3.0 * sigma,
            "rate {rate} vs {expected}"
        );
    }

    #[test]
    fn fixed_basis_measurement_carries_no_plaintext_information() {
        // Plug-in mutual information between the plaintext bit and a
        // computational-basis measurement, over fresh random keys, stays
        // under 0.01 bits at 10^5 samples.
        let mut rng = SplitMix64::new(0x1F0);
        let samples = 100_000usize;
        let mut counts = [[0usize; 2]; 2];
        for _ in 0..samples {
            let s = rng.next_bits(4);
            let secret = SecretKey::new(vec![s], 4).unwrap();
            let public = public_key_for(&secret).unwrap();
            let bit = rng.next_bool() as u8;
            let message = BitString::from_bits(vec![bit]).unwrap();
            let cipher = encrypt(&message, &public).unwrap();
            let outcome = measure_computational(&cipher.qubits()[0], &mut rng);
            counts[bit as usize][outcome as usize] += 1;
        }
        let total = samples as f64;
        let mut mi = 0.0;
        for m in 0..2 {
            for y in 0..2 {
                let p_joint = counts[m][y] as f64 / total;
                if p_joint == 0.0 {
                    continue;
                }
                let p_m = (counts[m][0] + counts[m][1]) as f64 / total;
                let p_y = (counts[0][y] + counts[1][y]) as f64 / total;
                mi += p_joint * (p_joint / (p_m * p_y)).log2();
            }
        }
        assert!(mi <= 0.01, "mutual information {mi} bits");
    }
}
