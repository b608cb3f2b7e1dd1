//! Seeded Monte Carlo over a q-ary symmetric channel.
//!
//! Trial `i` draws everything from ChaCha8 seeded with `seed` on stream `i`,
//! so results do not depend on scheduling or the number of workers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::code_model::Codec;
use crate::error::{CodeError, Result};
use crate::oracles::{apply_pattern, random_message, random_pattern, SweepRates, SweepStats};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelConfig {
    /// Per-symbol probability of replacement by a different symbol.
    pub epsilon: f64,
    pub trials: u64,
    pub seed: u64,
    /// Flip exactly this many symbols per trial instead of sampling.
    pub forced_weight: Option<usize>,
    /// Worker threads; `None` uses the global pool.
    #[serde(skip)]
    pub workers: Option<usize>,
}

impl ChannelConfig {
    pub fn new(epsilon: f64, trials: u64, seed: u64) -> Self {
        ChannelConfig { epsilon, trials, seed, forced_weight: None, workers: None }
    }

    pub fn forced(weight: usize, trials: u64, seed: u64) -> Self {
        ChannelConfig { epsilon: 0.0, trials, seed, forced_weight: Some(weight), workers: None }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    fn validate(&self, block_len: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(CodeError::InvalidParameter(format!(
                "epsilon {} outside [0, 1]",
                self.epsilon
            )));
        }
        if self.trials == 0 {
            return Err(CodeError::InvalidParameter("trials must be >= 1".into()));
        }
        if let Some(w) = self.forced_weight {
            if w == 0 || w > block_len {
                return Err(CodeError::InvalidParameter(format!(
                    "forced weight must lie in 1..={block_len}"
                )));
            }
        }
        if self.workers == Some(0) {
            return Err(CodeError::InvalidParameter("workers must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChannelReport {
    pub spec: String,
    pub config: ChannelConfig,
    pub stats: SweepStats,
    pub rates: SweepRates,
}

fn trial<C: Codec + ?Sized>(codec: &C, config: &ChannelConfig, i: u64) -> SweepStats {
    let spec = codec.spec();
    let p = spec.base();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(i);
    let message = random_message(&mut rng, spec);
    let sent = codec.encode(&message).expect("message drawn at the code's length");
    let received = match config.forced_weight {
        Some(w) => apply_pattern(&sent, &random_pattern(&mut rng, sent.len(), p, w)),
        None => {
            let mut word = sent.clone();
            for slot in 0..word.len() {
                if rng.gen_bool(config.epsilon) {
                    word.add_at(slot, rng.gen_range(1..p));
                }
            }
            word
        }
    };
    let decoded = codec.decode(&received);
    let mut stats = SweepStats::default();
    stats.record(&sent, &received, &decoded.outcome, &decoded.word);
    stats
}

pub fn run<C: Codec + ?Sized>(codec: &C, config: &ChannelConfig) -> Result<ChannelReport> {
    config.validate(codec.spec().block_len())?;
    let simulate = || {
        (0..config.trials)
            .into_par_iter()
            .map(|i| trial(codec, config, i))
            .reduce(SweepStats::default, SweepStats::merge)
    };
    let stats = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CodeError::InvalidParameter(format!("thread pool: {e}")))?
            .install(simulate),
        None => simulate(),
    };
    debug_assert!(stats.is_partition());
    Ok(ChannelReport {
        spec: format!("{}:{}", codec.spec().family(), codec.spec().params()),
        config: *config,
        rates: stats.rates(),
        stats,
    })
}
