//! Statistical tests Bob applies to the revealed key before decoding.
//!
//! A cheating Alice who wants Bob to decode in the wrong direction
//! benefits from keys whose angles cluster near zero (an all-zero key makes
//! every qubit decode correctly for either direction), so the opening phase
//! checks that the revealed key looks like fair coin flips. The battery is a
//! chi-square frequency test over 4-bit symbols plus a lag-1 serial
//! correlation test, both at significance `alpha = 0.01`; a failed battery
//! aborts the session.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Error;
use crate::protocol::SecretKey;
use crate::stats::{chi_square_critical, normal_quantile};
use crate::Result;

/// Significance level of each battery test.
pub const BATTERY_ALPHA: f64 = 0.01;

/// Preferred chi-square symbol width; reduced automatically when the key is
/// too short to keep every expected bin count at 5 or more.
pub const CHI_SQUARE_WIDTH: u32 = 4;

/// Outcome of the key-randomness battery.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomnessVerdict {
    pub chi_square_statistic: f64,
    pub chi_square_pass: bool,
    /// Lag-1 serial correlation; 1.0 is reported for degenerate
    /// (zero-variance) inputs, which always fail.
    pub serial_correlation: f64,
    pub serial_pass: bool,
    pub overall_pass: bool,
    pub alpha: f64,
}

/// Concatenate each key entry as an `n`-bit big-endian number; the result
/// has exactly `n * len(key)` bits.
pub fn key_to_bits(key: &SecretKey) -> BitString {
    let n = key.security_parameter();
    let mut bits = BitString::new();
    for value in key.values() {
        for j in (0..n).rev() {
            bits.push(((value >> j) & 1) as u8);
        }
    }
    bits
}

/// Inverse of [`key_to_bits`]; used by round-trip checks and transcript
/// auditing.
pub fn bits_to_key(bits: &BitString, n: u32) -> Result<SecretKey> {
    if n == 0 || !bits.len().is_multiple_of(n as usize) {
        return Err(Error::InvalidParameter(format!(
            "bit length {} is not a multiple of the entry width {n}",
            bits.len()
        )));
    }
    let values = bits
        .as_slice()
        .chunks(n as usize)
        .map(|chunk| chunk.iter().fold(0u32, |acc, &b| acc << 1 | b as u32))
        .collect();
    SecretKey::new(values, n)
}

/// Chi-square frequency test over non-overlapping `symbol_width`-bit
/// symbols. Requires at least `5 * 2^symbol_width` complete symbols so every
/// expected bin count is at least 5; trailing bits that do not fill a symbol
/// are ignored. Passes when the statistic stays below the upper critical
/// value at significance `alpha` with `2^symbol_width - 1` degrees of
/// freedom.
pub fn chi_square_test(bits: &BitString, symbol_width: u32, alpha: f64) -> Result<(f64, bool)> {
    if !(1..=16).contains(&symbol_width) {
        return Err(Error::InvalidParameter(format!(
            "symbol width {symbol_width} outside 1..=16"
        )));
    }
    let bins = 1usize << symbol_width;
    let symbols = bits.len() / symbol_width as usize;
    if symbols < 5 * bins {
        return Err(Error::InsufficientSample {
            test: "chi-square",
            required: 5 * bins * symbol_width as usize,
            actual: bits.len(),
        });
    }
    let mut counts = vec![0usize; bins];
    for chunk in bits.as_slice().chunks_exact(symbol_width as usize) {
        let symbol = chunk.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
        counts[symbol] += 1;
    }
    let expected = symbols as f64 / bins as f64;
    let statistic: f64 = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let critical = chi_square_critical(alpha, (bins - 1) as u32);
    Ok((statistic, statistic <= critical))
}

/// Lag-1 Pearson correlation of the bit sequence. Requires at least 100
/// bits. Passes when `|r| < z_(alpha/2) / sqrt(N)` (normal approximation for
/// the null distribution of the sample correlation). A constant input has no
/// variance; it is reported as correlation 1.0 and fails.
pub fn serial_correlation_test(bits: &BitString, alpha: f64) -> Result<(f64, bool)> {
    let n = bits.len();
    if n < 100 {
        return Err(Error::InsufficientSample {
            test: "serial-correlation",
            required: 100,
            actual: n,
        });
    }
    let pairs = n - 1;
    let (mut sum_x, mut sum_y, mut sum_xx, mut sum_yy, mut sum_xy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for i in 0..pairs {
        let x = bits.get(i) as f64;
        let y = bits.get(i + 1) as f64;
        sum_x += x;
        sum_y += y;
        sum_xx += x * x;
        sum_yy += y * y;
        sum_xy += x * y;
    }
    let m = pairs as f64;
    let var_x = sum_xx - sum_x * sum_x / m;
    let var_y = sum_yy - sum_y * sum_y / m;
    if var_x <= 0.0 || var_y <= 0.0 {
        return Ok((1.0, false));
    }
    let cov = sum_xy - sum_x * sum_y / m;
    let r = cov / (var_x * var_y).sqrt();
    let threshold = normal_quantile(1.0 - alpha / 2.0) / (n as f64).sqrt();
    Ok((r, r.abs() < threshold))
}

/// Widest symbol width in `1..=CHI_SQUARE_WIDTH` whose expected bin counts
/// stay at 5 or more for the given bit count.
fn usable_chi_width(bit_len: usize) -> Option<u32> {
    (1..=CHI_SQUARE_WIDTH)
        .rev()
        .find(|&w| bit_len / w as usize >= 5 << w)
}

/// Run the full battery on a revealed key.
///
/// Width-4 chi-square plus lag-1 serial correlation, each at `alpha`. For
/// short keys the chi-square width shrinks to keep the test applicable, and
/// the serial test is skipped (treated as passing) below its 100-bit
/// minimum, so a session with legitimate small parameters is never rejected
/// for being small.
pub fn verify_key_randomness(key: &SecretKey, alpha: f64) -> RandomnessVerdict {
    let bits = key_to_bits(key);
    let (chi_square_statistic, chi_square_pass) = match usable_chi_width(bits.len()) {
        Some(width) => chi_square_test(&bits, width, alpha).expect("width fits the sample"),
        None => (0.0, true),
    };
    let (serial_correlation, serial_pass) = if bits.len() >= 100 {
        serial_correlation_test(&bits, alpha).expect("length checked")
    } else {
        (0.0, true)
    };
    RandomnessVerdict {
        chi_square_statistic,
        chi_square_pass,
        serial_correlation,
        serial_pass,
        overall_pass: chi_square_pass && serial_pass,
        alpha,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    #[test]
    fn key_to_bits_hand_cases() {
        let key = SecretKey::new(vec![0, 0], 2).unwrap();
        assert_eq!(key_to_bits(&key).to_string(), "0000");
        let key = SecretKey::new(vec![3, 1], 2).unwrap();
        assert_eq!(key_to_bits(&key).to_string(), "1101");
        let key = SecretKey::new(vec![5, 2, 7], 3).unwrap();
        assert_eq!(key_to_bits(&key).to_string(), "101010111");
    }

    #[test]
    fn key_bits_round_trip() {
        let mut rng = SplitMix64::new(404);
        for n in [1u32, 3, 4, 8] {
            let key = SecretKey::sample(24, n, &mut rng);
            let bits = key_to_bits(&key);
            assert_eq!(bits.len(), 24 * n as usize);
            assert_eq!(bits_to_key(&bits, n).unwrap(), key);
        }
    }

    #[test]
    fn chi_square_zero_for_balanced_counts() {
        // 20 copies of 00 01 10 11: every bin holds 20 symbols.
        let mut bits = BitString::new();
        for _ in 0..20 {
            for b in [0, 0, 0, 1, 1, 0, 1, 1] {
                bits.push(b);
            }
        }
        let (stat, pass) = chi_square_test(&bits, 2, 0.01).unwrap();
        assert_eq!(stat, 0.0);
        assert!(pass);
    }

    #[test]
    fn chi_square_all_zero_input() {
        // 400 zero bits, width 2: 200 symbols all in bin 0, expected 50 per
        // bin, statistic (200-50)^2/50 + 3 * 50 = 600.
        let bits = BitString::zeros(400);
        let (stat, pass) = chi_square_test(&bits, 2, 0.01).unwrap();
        assert!((stat - 600.0).abs() < 1e-9, "stat = {stat}");
        assert!(!pass);
    }

    #[test]
    fn chi_square_rejects_insufficient_sample() {
        let bits = BitString::zeros(300);
        assert!(matches!(
            chi_square_test(&bits, 4, 0.01),
            Err(Error::InsufficientSample { .. })
        ));
    }

    #[test]
    fn chi_square_calibration_on_uniform_bits() {
        // 1000 runs of 10^4 uniform bits at width 4 should pass at least
        // 98% of the time at alpha = 0.01.
        let mut rng = SplitMix64::new(0xCA11B8);
        let mut passes = 0;
        for _ in 0..1000 {
            let bits = BitString::random(10_000, &mut rng);
            let (_, pass) = chi_square_test(&bits, 4, 0.01).unwrap();
            if pass {
                passes += 1;
            }
        }
        assert!(passes >= 980, "chi-square passed only {passes}/1000 runs");
    }

    #[test]
    fn serial_correlation_alternating_fails() {
        let bits = BitString::from_bits((0..1000).map(|i| (i % 2) as u8).collect()).unwrap();
        let (r, pass) = serial_correlation_test(&bits, 0.01).unwrap();
        assert!(r < -0.99, "r = {r}");
        assert!(!pass);
    }

    #[test]
    fn serial_correlation_constant_fails_as_degenerate() {
        let bits = BitString::from_bits(vec![1; 1000]).unwrap();
        let (r, pass) = serial_correlation_test(&bits, 0.01).unwrap();
        assert_eq!(r, 1.0);
        assert!(!pass);
    }

    #[test]
    fn serial_correlation_rejects_short_input() {
        let bits = BitString::zeros(99);
        assert!(matches!(
            serial_correlation_test(&bits, 0.01),
            Err(Error::InsufficientSample { .. })
        ));
    }

    #[test]
    fn serial_correlation_calibration_on_uniform_bits() {
        let mut rng = SplitMix64::new(0x5E41A1);
        let mut passes = 0;
        for _ in 0..1000 {
            let bits = BitString::random(10_000, &mut rng);
            let (_, pass) = serial_correlation_test(&bits, 0.01).unwrap();
            if pass {
                passes += 1;
            }
        }
        assert!(passes >= 980, "serial test passed only {passes}/1000 runs");
    }

    #[test]
    fn battery_accepts_honest_keys() {
        // 10^3 honest sessions at k = 20, n = 4 (120 key bits); the battery
        // false-reject rate is at most 2 alpha plus sampling error.
        let mut rng = SplitMix64::new(0xBA77E21);
        let sessions = 1000;
        let passes = (0..sessions)
            .filter(|_| {
                let key = SecretKey::sample(30, 4, &mut rng);
                verify_key_randomness(&key, BATTERY_ALPHA).overall_pass
            })
            .count();
        let sigma = (0.02f64 * 0.98 / sessions as f64).sqrt();
        let floor = 1.0 - 2.0 * BATTERY_ALPHA - 3.0 * sigma;
        assert!(
            passes as f64 / sessions as f64 >= floor,
            "pass rate {} below {floor}",
            passes as f64 / sessions as f64
        );
    }

    #[test]
    fn battery_rejects_all_zero_key() {
        // The all-zero key maximizes a cheater's wrong-direction success
        // (cos^2(0) = 1 on every qubit); the battery must stop it.
        let key = SecretKey::new(vec![0; 30], 4).unwrap();
        let verdict = verify_key_randomness(&key, BATTERY_ALPHA);
        assert!(!verdict.overall_pass);
        assert!(!verdict.chi_square_pass);
    }

    #[test]
    fn verdict_combines_with_and() {
        let mut rng = SplitMix64::new(0xAB5);
        for _ in 0..50 {
            let key = SecretKey::sample(30, 4, &mut rng);
            let v = verify_key_randomness(&key, BATTERY_ALPHA);
            assert_eq!(v.overall_pass, v.chi_square_pass && v.serial_pass);
        }
    }

    #[test]
    fn battery_handles_minimum_session_sizes() {
        // k = 8, n = 1 gives only 12 key bits; the battery must still run
        // (width-1 chi-square, serial skipped) and accept honest keys at a
        // sane rate.
        let mut rng = SplitMix64::new(0x51A11);
        let passes = (0..1000)
            .filter(|_| {
                let key = SecretKey::sample(12, 1, &mut rng);
                verify_key_randomness(&key, BATTERY_ALPHA).overall_pass
            })
            .count();
        assert!(passes >= 950, "passes = {passes}");
    }
}
