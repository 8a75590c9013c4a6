//! Seeded verification suites.
//!
//! Every suite is a pure function of its [`SampleConfig`]: per-instance random
//! streams are derived from the seed and the instance index, so reports are
//! byte-identical across runs.

use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::Word;

pub mod pi;
pub mod search;
pub mod suites;

pub const SCHEMA_VERSION: u32 = 1;

/// Bounds and seed for a suite run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub rank: usize,
    pub max_image_length: usize,
    pub sample_count: usize,
    pub seed: u64,
    /// A suite checking fewer instances than this fails.
    pub min_instances: usize,
}

impl SampleConfig {
    pub fn new(rank: usize, max_image_length: usize, sample_count: usize, seed: u64) -> Result<Self> {
        let cfg = Self { rank, max_image_length, sample_count, seed, min_instances: 1 };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rank < 2 {
            return Err(Error::RankTooSmall(self.rank));
        }
        if self.max_image_length == 0 || self.sample_count == 0 || self.min_instances == 0 {
            return Err(Error::Precondition("lengths, sample counts and the instance floor must be positive".into()));
        }
        Ok(())
    }

    /// The random stream of instance `i`.
    pub fn rng(&self, instance: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(instance as u64);
        rng
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub instance: usize,
    pub message: String,
    pub words: Vec<Word>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub schema_version: u32,
    pub suite: String,
    pub config: SampleConfig,
    pub instances: usize,
    pub passed: bool,
    pub counterexamples: Vec<Counterexample>,
    /// Deterministic summary lines (counts per case, certificates used).
    pub notes: Vec<String>,
    /// Not serialized, so reports stay reproducible.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl SuiteReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports serialize")
    }

    pub fn summary_line(&self) -> String {
        format!(
            "{} {}: {} instances, {} counterexamples",
            if self.passed { "PASS" } else { "FAIL" },
            self.suite,
            self.instances,
            self.counterexamples.len()
        )
    }
}

/// Suite names accepted by [`run_suite`], with their default configurations
/// `(rank, max_image_length, sample_count, min_instances)`.
const REGISTRY: &[(&str, [usize; 4])] = &[
    ("canonical-forms", [6, 8, 1000, 1000]),
    ("conjugacy-criterion", [6, 4, 500, 1000]),
    ("decomposition", [4, 8, 300, 300]),
    ("squares", [6, 3, 100, 101]),
    ("centralizer-form", [2, 3, 1, 1]),
    ("anti-commutativity", [4, 8, 500, 1000]),
    ("cen-pi", [3, 3, 200, 200]),
    ("intersection", [6, 1, 1, 210]),
    ("primitive-conjugations", [4, 8, 200, 200]),
    ("product-class", [4, 6, 100, 100]),
    ("basis-extraction", [8, 6, 10, 54]),
    ("encode-decode", [8, 1, 500, 532]),
    ("oracles", [3, 4, 100, 1100]),
];

pub fn suite_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|(n, _)| *n).collect()
}

pub fn default_config(name: &str, seed: u64) -> Result<SampleConfig> {
    let (_, [rank, max_image_length, sample_count, min_instances]) =
        REGISTRY.iter().find(|(n, _)| *n == name).ok_or_else(|| Error::UnknownSuite(name.to_string()))?;
    Ok(SampleConfig {
        rank: *rank,
        max_image_length: *max_image_length,
        sample_count: *sample_count,
        seed,
        min_instances: *min_instances,
    })
}

pub fn run_suite(name: &str, cfg: &SampleConfig) -> Result<SuiteReport> {
    cfg.validate()?;
    let run = match name {
        "canonical-forms" => suites::canonical_forms,
        "conjugacy-criterion" => suites::conjugacy_criterion,
        "decomposition" => suites::decomposition,
        "squares" => suites::squares,
        "centralizer-form" => suites::centralizer_form_suite,
        "anti-commutativity" => suites::anti_commutativity,
        "cen-pi" => suites::cen_pi,
        "intersection" => suites::intersection,
        "primitive-conjugations" => suites::primitive_conjugations,
        "product-class" => suites::product_class,
        "basis-extraction" => suites::basis_extraction,
        "encode-decode" => suites::encode_decode,
        "oracles" => suites::oracles,
        _ => return Err(Error::UnknownSuite(name.to_string())),
    };
    Ok(run(cfg))
}

/// Accumulates checks for one suite run.
pub struct Recorder {
    suite: String,
    config: SampleConfig,
    instances: usize,
    counterexamples: Vec<Counterexample>,
    notes: Vec<String>,
    started: Instant,
}

/// Counterexamples beyond this many are counted but not stored.
const MAX_STORED: usize = 50;

impl Recorder {
    pub fn new(suite: &str, config: SampleConfig) -> Self {
        Self {
            suite: suite.to_string(),
            config,
            instances: 0,
            counterexamples: Vec::new(),
            notes: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Counts one instance and records a counterexample unless `ok`.
    pub fn check(&mut self, instance: usize, ok: bool, message: impl FnOnce() -> String, words: &[Word]) {
        self.instances += 1;
        if !ok {
            self.fail(instance, message(), words);
        }
    }

    pub fn fail(&mut self, instance: usize, message: String, words: &[Word]) {
        if self.counterexamples.len() < MAX_STORED {
            self.counterexamples.push(Counterexample { instance, message, words: words.to_vec() });
        } else if self.counterexamples.len() == MAX_STORED {
            self.notes.push(format!("more than {MAX_STORED} counterexamples; later ones omitted"));
            self.counterexamples.push(Counterexample { instance, message: "truncated".into(), words: vec![] });
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn finish(self) -> SuiteReport {
        let mut notes = self.notes;
        if self.instances < self.config.min_instances {
            notes.push(format!("only {} instances, floor is {}", self.instances, self.config.min_instances));
        }
        SuiteReport {
            schema_version: SCHEMA_VERSION,
            passed: self.counterexamples.is_empty() && self.instances >= self.config.min_instances,
            suite: self.suite,
            config: self.config,
            instances: self.instances,
            counterexamples: self.counterexamples,
            notes,
            wall_time: self.started.elapsed(),
        }
    }
}
