//! Cheating strategies and their analytic bounds.
//!
//! Bob before the opening sees only complete mixtures and can do no better
//! than coin flips. After the opening he knows each rotation count but not
//! the direction; the optimal single-qubit attack is the two-outcome
//! measurement onto the eigenspaces of `rho_0(s) - rho_1(s)`, which succeeds
//! with probability `(1 + |cos(s * theta_n)|) / 2` per bit. A cheating Alice
//! who wants Bob to decode regardless of his direction guess sends, per
//! qubit, the top eigenvector of the sum of the two target projectors; her
//! whole-register success is capped by `(1 + cos^(2l)(pi/8)) / 2` where `l`
//! counts the key angles inside `[pi/8, 3pi/8]`.

use crate::bits::BitString;
use crate::error::Error;
use crate::hashing::eval_hash;
use crate::protocol::{CipherState, OpeningMessage, SecretKey, SessionParams};
use crate::qubit::{encode_bit, measure_computational, QubitState, SymMatrix2};
use crate::rng::SplitMix64;
use crate::Result;

/// Bob's best guess with no key and no direction: measure every qubit in
/// the computational basis (one draw per qubit, register order) and read the
/// message positions. Every encoding averages to the complete mixture, so
/// each guessed bit is right with probability exactly 1/2.
pub fn bob_guess_before_opening(cipher: &CipherState, rng: &mut SplitMix64) -> BitString {
    let message_len = cipher.len() * 2 / 3;
    let mut guess = BitString::new();
    for (i, qubit) in cipher.qubits().iter().enumerate() {
        let outcome = measure_computational(qubit, rng);
        if i < message_len {
            guess.push(outcome);
        }
    }
    guess
}

/// The discrimination measurement for one opened rotation count: the
/// projector onto the strictly positive eigenspace of
/// `rho_0(s) - rho_1(s)`, built by closed-form eigendecomposition of the
/// direction-averaged bit densities. Outcome "inside the projector" is read
/// as bit 0.
pub fn helstrom_projector(steps: u32, n: u32) -> Result<SymMatrix2> {
    let mix = |bit: u8| -> Result<SymMatrix2> {
        let plus = encode_bit(bit, steps, false, n)?;
        let minus = encode_bit(bit, steps, true, n)?;
        Ok(plus.outer().add(&minus.outer()).scale(0.5))
    };
    let delta = mix(0)?.sub(&mix(1)?);
    Ok(delta.positive_projector(1e-12))
}

fn measure_projector(state: &QubitState, projector: &SymMatrix2, rng: &mut SplitMix64) -> bool {
    rng.next_f64() < projector.quad_form(state)
}

/// Bob's optimal per-qubit attack after the opening: apply the
/// discrimination measurement for each revealed rotation count to the
/// corresponding message qubit. Succeeds per bit with probability
/// `(1 + |cos(s_i * theta_n)|) / 2`; consumes one draw per message qubit.
pub fn bob_helstrom_after_opening(
    cipher: &CipherState,
    opening: &OpeningMessage,
    rng: &mut SplitMix64,
) -> Result<BitString> {
    if opening.key().len() != cipher.len() {
        return Err(Error::LengthMismatch {
            context: "opened key",
            expected: cipher.len(),
            actual: opening.key().len(),
        });
    }
    let message_len = cipher.len() * 2 / 3;
    let n = opening.n();
    let mut guess = BitString::new();
    for i in 0..message_len {
        let projector = helstrom_projector(opening.key().value(i), n)?;
        let zero_outcome = measure_projector(&cipher.qubits()[i], &projector, rng);
        guess.push(if zero_outcome { 0 } else { 1 });
    }
    Ok(guess)
}

/// A cheating Alice's product state: per-qubit factors chosen so Bob decodes
/// her target content for either direction guess as well as physics allows.
#[derive(Debug, Clone)]
pub struct CheatingAliceState {
    factors: Vec<QubitState>,
    message: BitString,
    key: SecretKey,
}

impl CheatingAliceState {
    pub fn factors(&self) -> &[QubitState] {
        &self.factors
    }

    /// The register as a cipher Bob cannot tell from an honest one.
    pub fn as_cipher(&self) -> CipherState {
        CipherState::from_qubits(self.factors.clone())
    }

    pub fn message(&self) -> &BitString {
        &self.message
    }

    pub fn key(&self) -> &SecretKey {
        &self.key
    }
}

/// Build the optimal product cheating state for a target message and a key
/// Alice intends to reveal. Each factor is the top eigenvector of
/// `P_+ + P_-`, the sum of the projectors onto the two direction-dependent
/// encodings of the target bit; it overlaps both encodings equally and
/// achieves per-qubit success `(1 + |cos(s_i * theta_n)|) / 2` whatever
/// direction Bob guesses.
pub fn build_cheating_state(
    message: &BitString,
    key: &SecretKey,
    params: &SessionParams,
) -> Result<CheatingAliceState> {
    if message.len() != params.k() {
        return Err(Error::LengthMismatch {
            context: "cheating target message",
            expected: params.k(),
            actual: message.len(),
        });
    }
    if key.len() != params.register_len() {
        return Err(Error::LengthMismatch {
            context: "cheating key",
            expected: params.register_len(),
            actual: key.len(),
        });
    }
    let digest = eval_hash(params.hash(), message)?;
    let content = message.concat(&digest);
    let factors = content
        .iter()
        .enumerate()
        .map(|(i, bit)| {
            let plus = encode_bit(bit, key.value(i), false, params.n())?;
            let minus = encode_bit(bit, key.value(i), true, params.n())?;
            let sum = plus.outer().add(&minus.outer());
            let [(_, top), _] = sum.eigen();
            QubitState::new(top[0], top[1])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CheatingAliceState {
        factors,
        message: message.clone(),
        key: key.clone(),
    })
}

/// How many key angles fall in the critical band `[pi/8, 3pi/8]` where both
/// direction-dependent encodings stay far from the cheating state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CriticalAngleCount {
    /// Count of indices with `s_i * theta_n` inside the closed band.
    pub critical: usize,
    /// Register length the count ranges over.
    pub total: usize,
}

/// Exact count of key entries with `s_i * theta_n` in `[pi/8, 3pi/8]`,
/// decided by rational comparison of `8 * s_i` against `2^(n-1)` and
/// `3 * 2^(n-1)` (endpoints inclusive, no floats).
pub fn count_critical_angles(key: &SecretKey) -> CriticalAngleCount {
    let n = key.security_parameter();
    let lower = 1u64 << (n - 1);
    let upper = 3 * lower;
    let critical = key
        .values()
        .iter()
        .filter(|&&s| {
            let scaled = 8 * u64::from(s);
            scaled >= lower && scaled <= upper
        })
        .count();
    CriticalAngleCount {
        critical,
        total: key.len(),
    }
}

/// Analytic per-entry probability of the critical band for a uniform
/// rotation count at security parameter `n`.
pub fn exact_critical_probability(n: u32) -> f64 {
    let lower = 1u64 << (n - 1);
    let upper = 3 * lower;
    // Integer count of s in [ceil(lower/8), floor(upper/8)] intersected
    // with [0, 2^n - 1].
    let lo = lower.div_ceil(8);
    let hi = (upper / 8).min((1u64 << n) - 1);
    let count = if hi >= lo { hi - lo + 1 } else { 0 };
    count as f64 / (1u64 << n) as f64
}

/// Ceiling on a cheating Alice's whole-register success:
/// `(1 + cos^(2l)(pi/8)) / 2`, strictly decreasing in `l` toward 1/2.
pub fn obliviousness_bound(critical_count: usize) -> f64 {
    let c = (std::f64::consts::PI / 8.0).cos();
    0.5 * (1.0 + c.powi(2 * critical_count as i32))
}

/// Empirical distribution of the critical count over uniform keys.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LDistributionStats {
    pub key_len: usize,
    pub samples: usize,
    pub mean: f64,
    /// Sample variance (n-1 denominator).
    pub variance: f64,
    /// Fraction of samples with count inside
    /// `[(k - 3 sqrt(k)) / 4, (k + 3 sqrt(k)) / 4]`.
    pub in_interval_fraction: f64,
}

/// Sample `samples` uniform keys of `key_len` entries at security parameter
/// `n` and summarize the critical-count distribution.
pub fn l_distribution_check(
    key_len: usize,
    n: u32,
    samples: usize,
    rng: &mut SplitMix64,
) -> LDistributionStats {
    assert!(samples >= 1000, "need at least 10^3 samples");
    let k = key_len as f64;
    let low = (k - 3.0 * k.sqrt()) / 4.0;
    let high = (k + 3.0 * k.sqrt()) / 4.0;
    let mut sum = 0.0f64;
    let mut sum_sq = 0.0f64;
    let mut inside = 0usize;
    for _ in 0..samples {
        let key = SecretKey::sample(key_len, n, rng);
        let l = count_critical_angles(&key).critical as f64;
        sum += l;
        sum_sq += l * l;
        if l >= low && l <= high {
            inside += 1;
        }
    }
    let mean = sum / samples as f64;
    let variance = (sum_sq - samples as f64 * mean * mean) / (samples as f64 - 1.0);
    LDistributionStats {
        key_len,
        samples,
        mean,
        variance,
        in_interval_fraction: inside as f64 / samples as f64,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{
        alice_open, alice_transfer_with, bob_open, sample_accepted_key, BobOutcome,
    };
    use crate::qubit::{helstrom_probability, rotate_radians, theta};

    fn test_params(k: usize, n: u32, seed: u64) -> SessionParams {
        SessionParams::sample(k, n, &mut SplitMix64::new(seed)).unwrap()
    }

    #[test]
    fn blind_guess_hits_half_per_bit() {
        let params = test_params(16, 4, 11);
        let mut rng = SplitMix64::new(12);
        let trials = 10_000usize;
        let mut hits = 0usize;
        for _ in 0..trials {
            let message = BitString::random(16, &mut rng);
            let direction = rng.next_bool();
            let key = SecretKey::sample(24, 4, &mut rng);
            let (cipher, _) = alice_transfer_with(&message, &params, direction, key).unwrap();
            let guess = bob_guess_before_opening(&cipher, &mut rng);
            hits += guess
                .iter()
                .zip(message.iter())
                .filter(|(g, m)| g == m)
                .count();
        }
        let rate = hits as f64 / (trials * 16) as f64;
        let sigma = (0.25 / (trials * 16) as f64).sqrt();
        assert!((rate - 0.5).abs() < 3.0 * sigma, "rate {rate}");
    }

    #[test]
    fn blind_guess_whole_message_rate() {
        // k = 8: independent halves give 2^-8 for the whole message.
        let params = test_params(8, 4, 13);
        let mut rng = SplitMix64::new(14);
        let trials = 20_000usize;
        let mut exact = 0usize;
        for _ in 0..trials {
            let message = BitString::random(8, &mut rng);
            let direction = rng.next_bool();
            let key = SecretKey::sample(12, 4, &mut rng);
            let (cipher, _) = alice_transfer_with(&message, &params, direction, key).unwrap();
            if bob_guess_before_opening(&cipher, &mut rng) == message {
                exact += 1;
            }
        }
        let rate = exact as f64 / trials as f64;
        let p = 2f64.powi(-8);
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() < 3.0 * sigma, "rate {rate}");
    }

    #[test]
    fn blind_guess_distribution_independent_of_direction() {
        // Outcome frequencies conditioned on the hidden direction agree
        // under a chi-square independence test on the 2x2 table.
        let params = test_params(16, 4, 15);
        let mut rng = SplitMix64::new(16);
        let mut counts = [[0usize; 2]; 2];
        for _ in 0..5000 {
            let message = BitString::random(16, &mut rng);
            let direction = rng.next_bool();
            let key = SecretKey::sample(24, 4, &mut rng);
            let (cipher, _) = alice_transfer_with(&message, &params, direction, key).unwrap();
            let guess = bob_guess_before_opening(&cipher, &mut rng);
            for bit in guess.iter() {
                counts[direction as usize][bit as usize] += 1;
            }
        }
        let total: usize = counts.iter().flatten().sum();
        let mut statistic = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                let row: usize = counts[a].iter().sum();
                let col: usize = counts[0][b] + counts[1][b];
                let expected = row as f64 * col as f64 / total as f64;
                let d = counts[a][b] as f64 - expected;
                statistic += d * d / expected;
            }
        }
        let critical = crate::stats::chi_square_critical(0.01, 1);
        assert!(statistic <= critical, "chi-square {statistic}");
    }

    #[test]
    fn helstrom_projector_reduces_to_computational_basis() {
        // At s = 0 the encodings are |0> and |1>; the projector is |0><0|.
        let p = helstrom_projector(0, 4).unwrap();
        assert!((p.m00 - 1.0).abs() < 1e-12);
        assert!(p.m01.abs() < 1e-12);
        assert!(p.m11.abs() < 1e-12);
    }

    #[test]
    fn helstrom_empirical_matches_closed_form() {
        // Every rotation count at n = 3, 10^4 trials each.
        let n = 3u32;
        let mut rng = SplitMix64::new(0x4E15);
        for s in 0..(1u32 << n) {
            let projector = helstrom_projector(s, n).unwrap();
            let trials = 10_000usize;
            let mut correct = 0usize;
            for _ in 0..trials {
                let bit = rng.next_bool() as u8;
                let direction = rng.next_bool();
                let state = encode_bit(bit, s, direction, n).unwrap();
                let guess = if measure_projector(&state, &projector, &mut rng) {
                    0
                } else {
                    1
                };
                if guess == bit {
                    correct += 1;
                }
            }
            let rate = correct as f64 / trials as f64;
            let expected = helstrom_probability(s, n);
            let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
            assert!(
                (rate - expected).abs() <= 3.0 * sigma.max(1e-9),
                "s={s}: rate {rate} vs {expected}"
            );
        }
    }

    #[test]
    fn helstrom_attack_on_full_sessions() {
        // Drive bob_helstrom_after_opening itself: sessions whose key
        // repeats one rotation count, so every message bit is attacked at
        // the same known success rate.
        let n = 4u32;
        let params = test_params(8, n, 17);
        let mut rng = SplitMix64::new(18);
        for s in [0u32, 2, 4, 7] {
            let key = SecretKey::new(vec![s; 12], n).unwrap();
            let trials = 2000usize;
            let mut hits = 0usize;
            for _ in 0..trials {
                let message = BitString::random(8, &mut rng);
                let direction = rng.next_bool();
                let (cipher, record) =
                    alice_transfer_with(&message, &params, direction, key.clone()).unwrap();
                let opening = alice_open(&record);
                let guess = bob_helstrom_after_opening(&cipher, &opening, &mut rng).unwrap();
                assert_eq!(guess.len(), 8);
                hits += guess
                    .iter()
                    .zip(message.iter())
                    .filter(|(g, m)| g == m)
                    .count();
            }
            let rate = hits as f64 / (trials * 8) as f64;
            let expected = helstrom_probability(s, n);
            let sigma = (expected * (1.0 - expected) / (trials * 8) as f64).sqrt();
            assert!(
                (rate - expected).abs() <= 3.0 * sigma.max(1e-9),
                "s={s}: rate {rate} vs {expected}"
            );
        }
    }

    #[test]
    fn helstrom_attack_rejects_length_mismatch() {
        let params = test_params(8, 4, 19);
        let mut rng = SplitMix64::new(20);
        let message = BitString::random(8, &mut rng);
        let key = SecretKey::sample(12, 4, &mut rng);
        let (cipher, record) = alice_transfer_with(&message, &params, false, key).unwrap();
        let opening = alice_open(&record);
        let short = CipherState::from_qubits(cipher.qubits()[..9].to_vec());
        assert!(bob_helstrom_after_opening(&short, &opening, &mut rng).is_err());
    }

    #[test]
    fn no_projective_measurement_beats_helstrom() {
        // Brute-force oracle: sweep measurement axes in 1-degree steps and
        // evaluate the best-assignment success 1/2 + |v' delta v| / 2
        // analytically; the closed form must match the sweep maximum up to
        // grid resolution.
        for n in [3u32, 4] {
            for s in 0..(1u32 << n) {
                let mix = |bit: u8| {
                    encode_bit(bit, s, false, n)
                        .unwrap()
                        .outer()
                        .add(&encode_bit(bit, s, true, n).unwrap().outer())
                        .scale(0.5)
                };
                let delta = mix(0).sub(&mix(1));
                let mut best = 0.0f64;
                for deg in 0..180 {
                    let beta = (deg as f64).to_radians();
                    let v = QubitState::new(beta.cos(), beta.sin()).unwrap();
                    let success = 0.5 + 0.5 * delta.quad_form(&v).abs();
                    best = best.max(success);
                }
                let closed = helstrom_probability(s, n);
                assert!(
                    closed >= best - 2e-4 && best >= closed - 2e-4,
                    "s={s} n={n}: sweep {best} vs closed {closed}"
                );
            }
        }
    }

    #[test]
    fn cheating_factor_matches_encoding_when_projectors_coincide() {
        let params = test_params(8, 4, 21);
        let key = SecretKey::new(vec![0; 12], 4).unwrap();
        let message = BitString::random(8, &mut SplitMix64::new(22));
        let state = build_cheating_state(&message, &key, &params).unwrap();
        for (i, factor) in state.factors().iter().enumerate().take(8) {
            let target = encode_bit(message.get(i), 0, false, 4).unwrap();
            assert!(factor.inner(&target).abs() > 1.0 - 1e-12, "factor {i}");
        }
    }

    #[test]
    fn cheating_factor_is_grid_search_optimal() {
        // Sweep unit vectors at 1e-3 rad resolution and compare the
        // achieved average projection probability.
        let params = test_params(8, 4, 23);
        for s in 0..16u32 {
            for bit in [0u8, 1] {
                let plus = encode_bit(bit, s, false, 4).unwrap();
                let minus = encode_bit(bit, s, true, 4).unwrap();
                let value = |v: &QubitState| 0.5 * (plus.inner(v).powi(2) + minus.inner(v).powi(2));
                let mut best = 0.0f64;
                let steps = 6284;
                for i in 0..steps {
                    let beta = i as f64 * 1e-3;
                    let v = rotate_radians(QubitState::zero(), 2.0 * beta);
                    best = best.max(value(&v));
                }
                let key_vals: Vec<u32> = (0..12).map(|_| s).collect();
                let key = SecretKey::new(key_vals, 4).unwrap();
                let message = BitString::from_bits(vec![bit; 8]).unwrap();
                let state = build_cheating_state(&message, &key, &params).unwrap();
                let achieved = value(&state.factors()[0]);
                assert!(
                    achieved >= best - 1e-6,
                    "s={s} bit={bit}: achieved {achieved} vs sweep {best}"
                );
                // And the achieved value is the analytic per-qubit maximum.
                let analytic = 0.5 * (1.0 + (s as f64 * theta(4)).cos().abs());
                assert!((achieved - analytic).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cheating_success_per_qubit_at_quarter_turn() {
        // s * theta_n = pi/4 (s = 2, n = 4): success (1 + cos(pi/4)) / 2.
        let params = test_params(8, 4, 24);
        let key = SecretKey::new(vec![2; 12], 4).unwrap();
        let mut rng = SplitMix64::new(25);
        let trials = 10_000usize;
        let mut correct = 0usize;
        for _ in 0..trials {
            let bit = rng.next_bool() as u8;
            let message = BitString::from_bits(vec![bit; 8]).unwrap();
            let state = build_cheating_state(&message, &key, &params).unwrap();
            // Bob decodes the first qubit honestly with a random direction.
            let direction = rng.next_bool();
            let angle = crate::qubit::Angle::key_rotation(2, 4, direction).unwrap();
            let rotated = crate::qubit::rotate(state.factors()[0], angle);
            if measure_computational(&rotated, &mut rng) == bit {
                correct += 1;
            }
        }
        let expected = 0.5 * (1.0 + (std::f64::consts::PI / 4.0).cos());
        let rate = correct as f64 / trials as f64;
        let sigma = (expected * (1.0 - expected) / trials as f64).sqrt();
        assert!((rate - expected).abs() < 3.0 * sigma, "rate {rate}");
    }

    #[test]
    fn critical_count_hand_cases() {
        // n = 1: the only angles are 0 and pi, never in the band.
        let key = SecretKey::new(vec![0, 1, 1, 0], 1).unwrap();
        assert_eq!(count_critical_angles(&key).critical, 0);
        // n = 4: angles s * pi/8; s in {1, 2, 3} give pi/8, pi/4, 3pi/8.
        let key = SecretKey::new(vec![1, 2, 3, 4, 5, 6], 4).unwrap();
        let count = count_critical_angles(&key);
        assert_eq!(count.critical, 3);
        assert_eq!(count.total, 6);
    }

    #[test]
    fn critical_probability_formula_matches_enumeration() {
        for n in 1..=10u32 {
            let brute = (0..(1u32 << n))
                .filter(|&s| {
                    let key = SecretKey::new(vec![s], n).unwrap();
                    count_critical_angles(&key).critical == 1
                })
                .count() as f64
                / (1u64 << n) as f64;
            assert_eq!(brute, exact_critical_probability(n), "n={n}");
        }
    }

    #[test]
    fn critical_fraction_concentrates_at_the_exact_rate() {
        // At n = 4 the band holds s in {1, 2, 3}: probability 3/16.
        let mut rng = SplitMix64::new(0x11AB);
        let samples = 10_000usize;
        let len = 24usize;
        let mut total = 0usize;
        for _ in 0..samples {
            let key = SecretKey::sample(len, 4, &mut rng);
            total += count_critical_angles(&key).critical;
        }
        let rate = total as f64 / (samples * len) as f64;
        let p = exact_critical_probability(4);
        assert_eq!(p, 3.0 / 16.0);
        let sigma = (p * (1.0 - p) / (samples * len) as f64).sqrt();
        assert!((rate - p).abs() < 3.0 * sigma, "rate {rate} vs {p}");
    }

    #[test]
    fn bound_values_and_monotonicity() {
        assert_eq!(obliviousness_bound(0), 1.0);
        let l1 = obliviousness_bound(1);
        assert!((l1 - 0.9267766952966369).abs() < 1e-12);
        let mut prev = 1.0;
        for l in 1..200 {
            let b = obliviousness_bound(l);
            assert!(b < prev);
            assert!(b >= 0.5);
            prev = b;
        }
        assert!((obliviousness_bound(5000) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn cheating_sessions_respect_the_bound() {
        // Full cheating sessions against an honest Bob: the empirical
        // whole-register success must stay under the analytic ceiling for
        // the revealed key.
        let params = test_params(16, 4, 31);
        let mut rng = SplitMix64::new(32);
        for _ in 0..5 {
            let key = sample_accepted_key(24, 4, &mut rng);
            let l = count_critical_angles(&key).critical;
            let bound = obliviousness_bound(l);
            let trials = 2000usize;
            let mut successes = 0usize;
            for _ in 0..trials {
                let message = BitString::random(16, &mut rng);
                let state = build_cheating_state(&message, &key, &params).unwrap();
                let digest = eval_hash(params.hash(), &message).unwrap();
                let target = message.concat(&digest);
                let direction = rng.next_bool();
                let mut all = true;
                for (i, factor) in state.factors().iter().enumerate() {
                    let angle =
                        crate::qubit::Angle::key_rotation(key.value(i), 4, direction).unwrap();
                    let rotated = crate::qubit::rotate(*factor, angle);
                    if measure_computational(&rotated, &mut rng) != target.get(i) {
                        all = false;
                    }
                }
                if all {
                    successes += 1;
                }
            }
            let rate = successes as f64 / trials as f64;
            let sigma = (bound * (1.0 - bound) / trials as f64).sqrt();
            assert!(
                rate <= bound + 3.0 * sigma,
                "rate {rate} exceeds bound {bound} (l = {l})"
            );
        }
    }

    #[test]
    fn half_cheating_strategy_is_detectable() {
        // Sending the cheating state in half the sessions and a random
        // state otherwise drives Bob's acceptance rate far below the honest
        // 1/2, so the strategy cannot stay unnoticed.
        let params = test_params(16, 4, 41);
        let mut rng = SplitMix64::new(42);
        let key = sample_accepted_key(24, 4, &mut rng);
        let trials = 4000usize;
        let mut received = 0usize;
        for t in 0..trials {
            let message = BitString::random(16, &mut rng);
            let cipher = if t % 2 == 0 {
                build_cheating_state(&message, &key, &params)
                    .unwrap()
                    .as_cipher()
            } else {
                // A register of uniformly random pure states.
                CipherState::from_qubits(
                    (0..24)
                        .map(|_| {
                            rotate_radians(
                                QubitState::zero(),
                                rng.next_f64() * 2.0 * std::f64::consts::PI,
                            )
                        })
                        .collect(),
                )
            };
            let opening = {
                let (_, record) =
                    alice_transfer_with(&message, &params, false, key.clone()).unwrap();
                alice_open(&record)
            };
            if let BobOutcome::Received { .. } =
                bob_open(&cipher, &opening, &params, &mut rng).unwrap()
            {
                received += 1;
            }
        }
        let rate = received as f64 / trials as f64;
        let sigma = (0.25f64 / trials as f64).sqrt();
        assert!(
            rate < 0.5 - 3.0 * sigma,
            "acceptance rate {rate} is not distinguishable from 1/2"
        );
    }

    #[test]
    fn l_distribution_summary_is_consistent() {
        let mut rng = SplitMix64::new(0x1D15);
        let stats = l_distribution_check(60, 4, 2000, &mut rng);
        let p = exact_critical_probability(4);
        let expected_mean = 60.0 * p;
        let expected_var = 60.0 * p * (1.0 - p);
        let se_mean = (expected_var / stats.samples as f64).sqrt();
        assert!((stats.mean - expected_mean).abs() < 3.0 * se_mean);
        assert!((stats.variance - expected_var).abs() / expected_var < 0.15);
        assert!(stats.in_interval_fraction <= 1.0);
    }
}
