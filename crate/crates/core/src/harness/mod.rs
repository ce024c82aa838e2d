//! Monte-Carlo experiment driver.
//!
//! Each experiment replays one security claim over many independent
//! sessions and reports every measured rate next to its analytic value or
//! bound. Trial `i` of an experiment with master seed `m` runs on its own
//! generator seeded with [`derive_trial_seed`]`(m, i)`, so trials are
//! independent streams, any subset can be recomputed in isolation, and a
//! report is reproducible byte-for-byte from its configuration.
//!
//! Experiments that measure the quantum branch of the protocol
//! (`soundness`, `obliviousness`, and the honest-session recipe behind
//! them) draw Alice's key conditioned on the opening-phase randomness
//! battery accepting it. The battery rejects a fixed ~2% of honest uniform
//! keys by design; conditioning keeps the quantum statistics clean while
//! the unconditioned rejection rate is verified separately by the
//! randomness module's own calibration tests.

mod experiments;
mod report;

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::error::Error;
use crate::protocol::{
    alice_open, alice_transfer_with, bob_open_traced, sample_accepted_key, BobOutcome, CipherState,
    OpeningMessage, SessionParams,
};
use crate::rng::{mix64, SplitMix64, GOLDEN_GAMMA};
use crate::transcript::SessionTranscript;
use crate::Result;

pub use report::{
    ConfigEcho, Criterion, ExperimentReport, Metric, ReportBody, REPORT_SCHEMA_VERSION,
};

/// The named experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    /// Honest-session success rate against the soundness bound.
    Soundness,
    /// Cheating Bob before the opening: blind guessing only.
    ConcealingBefore,
    /// Cheating Bob after the opening: the optimal per-qubit attack.
    ConcealingAfter,
    /// Cheating Alice's best product state against its analytic ceiling.
    Obliviousness,
    /// Exact public-key encrypt/decrypt round trip.
    PubkeyRoundtrip,
    /// Exhaustive pairwise collision rate of the hash family.
    HashUniversality,
    /// Distribution of the critical-angle count over uniform keys.
    LDistribution,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 7] = [
        ExperimentKind::Soundness,
        ExperimentKind::ConcealingBefore,
        ExperimentKind::ConcealingAfter,
        ExperimentKind::Obliviousness,
        ExperimentKind::PubkeyRoundtrip,
        ExperimentKind::HashUniversality,
        ExperimentKind::LDistribution,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::Soundness => "soundness",
            ExperimentKind::ConcealingBefore => "concealing-before",
            ExperimentKind::ConcealingAfter => "concealing-after",
            ExperimentKind::Obliviousness => "obliviousness",
            ExperimentKind::PubkeyRoundtrip => "pubkey-roundtrip",
            ExperimentKind::HashUniversality => "hash-universality",
            ExperimentKind::LDistribution => "l-distribution",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentKind::ALL
            .iter()
            .copied()
            .find(|kind| kind.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown experiment '{s}'; expected one of: {}",
                    ExperimentKind::ALL.map(|k| k.name()).join(", ")
                ))
            })
    }
}

/// Report output encoding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ReportFormat {
    #[default]
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(Error::InvalidParameter(format!(
                "unknown format '{other}'; expected json or csv"
            ))),
        }
    }
}

/// Full experiment configuration. `k` is the message length for protocol
/// experiments, the hash input length for `hash-universality`, and the key
/// length for `l-distribution`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub k: usize,
    pub n: u32,
    pub trials: usize,
    pub master_seed: u64,
    pub alpha: f64,
    pub output_path: Option<PathBuf>,
    pub format: ReportFormat,
    pub transcripts_dir: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(experiment: ExperimentKind, k: usize, n: u32, trials: usize) -> Self {
        Self {
            experiment,
            k,
            n,
            trials,
            master_seed: 1,
            alpha: 0.01,
            output_path: None,
            format: ReportFormat::Json,
            transcripts_dir: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.k < 8 || !self.k.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "k = {} must be even and at least 8",
                self.k
            )));
        }
        if !(1..=crate::qubit::MAX_SECURITY_PARAMETER).contains(&self.n) {
            return Err(Error::InvalidParameter(format!(
                "security parameter {} outside 1..={}",
                self.n,
                crate::qubit::MAX_SECURITY_PARAMETER
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} outside (0, 1)",
                self.alpha
            )));
        }
        if self.experiment == ExperimentKind::HashUniversality && self.k > 16 {
            return Err(Error::InvalidParameter(format!(
                "hash-universality enumerates all 2^k inputs; k = {} is too large (max 16)",
                self.k
            )));
        }
        if self.experiment == ExperimentKind::LDistribution && self.trials < 1000 {
            return Err(Error::InvalidParameter(
                "l-distribution needs at least 1000 samples".into(),
            ));
        }
        Ok(())
    }
}

/// Seed for trial `index` of an experiment with the given master seed:
/// `mix64(master_seed + (index + 1) * GOLDEN_GAMMA)`. The inner map is a
/// bijection of the index for any fixed master seed, so distinct trials
/// always get distinct seeds; `mix64` decorrelates neighboring indices.
pub fn derive_trial_seed(master_seed: u64, trial_index: u64) -> u64 {
    mix64(master_seed.wrapping_add(GOLDEN_GAMMA.wrapping_mul(trial_index.wrapping_add(1))))
}

/// One honest session generated from a single trial seed.
///
/// Draw order (all from the trial generator, in this order): session hash,
/// message bits, Alice's direction, key entries (resampled as a block until
/// the randomness battery accepts), Bob's direction, Bob's measurements.
#[derive(Debug, Clone)]
pub struct HonestSession {
    pub params: SessionParams,
    pub message: BitString,
    pub direction: bool,
    pub cipher: CipherState,
    pub opening: OpeningMessage,
    pub bob_direction: bool,
    pub outcome: BobOutcome,
    /// The raw measured register (message then digest bits).
    pub register: BitString,
}

impl HonestSession {
    pub fn transcript(&self, trial_seed: u64) -> SessionTranscript {
        SessionTranscript::new(
            &self.params,
            trial_seed,
            &self.cipher,
            &self.opening,
            &self.outcome,
        )
    }
}

/// Run the canonical honest session for a trial seed; both the soundness
/// experiment and transcript replay go through here.
pub fn run_honest_session(k: usize, n: u32, trial_seed: u64) -> Result<HonestSession> {
    let mut rng = SplitMix64::new(trial_seed);
    let params = SessionParams::sample(k, n, &mut rng)?;
    let message = BitString::random(k, &mut rng);
    let direction = rng.next_bool();
    let key = sample_accepted_key(params.register_len(), n, &mut rng);
    let (cipher, record) = alice_transfer_with(&message, &params, direction, key)?;
    let opening = alice_open(&record);
    let bob_direction = rng.next_bool();
    let (outcome, register) = bob_open_traced(&cipher, &opening, &params, bob_direction, &mut rng)?;
    Ok(HonestSession {
        params,
        message,
        direction,
        cipher,
        opening,
        bob_direction,
        outcome,
        register: register.expect("accepted key passes the battery"),
    })
}

/// Re-run the session a transcript came from and check the regenerated
/// transcript matches byte for byte.
pub fn replay_matches(transcript: &SessionTranscript) -> Result<bool> {
    let session = run_honest_session(transcript.k, transcript.n, transcript.trial_seed)?;
    Ok(session.transcript(transcript.trial_seed) == *transcript)
}

fn write_transcripts(dir: &PathBuf, sessions: &[(u64, SessionTranscript)]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    for (index, transcript) in sessions {
        let path = dir.join(format!("session-{index:06}.json"));
        std::fs::write(&path, transcript.to_json()).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(())
}

/// Execute an experiment and assemble its report; writes the report file
/// and transcript dump when the configuration asks for them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let started = Instant::now();
    let outcome = match config.experiment {
        ExperimentKind::Soundness => experiments::soundness(config)?,
        ExperimentKind::ConcealingBefore => experiments::concealing_before(config)?,
        ExperimentKind::ConcealingAfter => experiments::concealing_after(config)?,
        ExperimentKind::Obliviousness => experiments::obliviousness(config)?,
        ExperimentKind::PubkeyRoundtrip => experiments::pubkey_roundtrip(config)?,
        ExperimentKind::HashUniversality => experiments::hash_universality(config)?,
        ExperimentKind::LDistribution => experiments::l_distribution(config)?,
    };
    let experiments::ExperimentOutcome {
        metrics,
        transcripts,
    } = outcome;
    if let (Some(dir), false) = (&config.transcripts_dir, transcripts.is_empty()) {
        write_transcripts(dir, &transcripts)?;
    }
    let pass = metrics.iter().all(|m| m.pass);
    let report = ExperimentReport {
        body: ReportBody {
            schema_version: REPORT_SCHEMA_VERSION,
            experiment: config.experiment,
            config: ConfigEcho::from(config),
            metrics,
            pass,
        },
        wall_time_ms: started.elapsed().as_secs_f64() * 1e3,
    };
    if let Some(path) = &config.output_path {
        let rendered = match config.format {
            ReportFormat::Json => report.to_json(),
            ReportFormat::Csv => report.to_csv(),
        };
        std::fs::write(path, rendered).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
    }
    Ok(report)
}
