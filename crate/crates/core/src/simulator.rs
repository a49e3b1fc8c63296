//! Monte-Carlo AWGN channel with minimum-distance and product-of-disks decoders.
//!
//! Every trial draws from its own ChaCha8 stream keyed by `(seed, trial index)`,
//! and per-message error counts are merged as integers, so results do not
//! depend on how trials are scheduled across threads.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codebook::Codebook;
use crate::constellation::validate_regions;
use crate::error::{Error, Result};

/// Minimum number of trials accepted by [`estimate_dep`].
pub const MIN_TRIALS: u64 = 100;
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// Total complex noise variance; each real component has variance `σ²/2`.
    pub sigma2: f64,
    pub seed: u64,
    pub trials: u64,
}

impl ChannelConfig {
    pub fn new(sigma2: f64, seed: u64, trials: u64) -> Result<Self> {
        if !(sigma2 > 0.0) || !sigma2.is_finite() {
            return Err(Error::NonPositiveInput);
        }
        Ok(Self {
            sigma2,
            seed,
            trials,
        })
    }

    fn component_std(&self) -> f64 {
        (self.sigma2 / 2.0).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecoderKind {
    MinDistance,
    Regions,
}

impl std::str::FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min-distance" | "min_distance" => Ok(Self::MinDistance),
            "regions" => Ok(Self::Regions),
            other => Err(Error::InvalidConfig(format!("unknown decoder `{other}`"))),
        }
    }
}

impl std::fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::MinDistance => "min-distance",
            Self::Regions => "regions",
        })
    }
}

/// Random stream for one trial.
pub fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

fn fill_noisy<R: Rng>(rng: &mut R, clean: &[Complex64], std: f64, out: &mut [Complex64]) {
    for (y, x) in out.iter_mut().zip(clean) {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        *y = x + Complex64::new(std * re, std * im);
    }
}

/// `y = x + N` with circularly symmetric Gaussian noise drawn from the stream of `trial_index`.
pub fn add_noise(symbols: &[Complex64], cfg: &ChannelConfig, trial_index: u64) -> Vec<Complex64> {
    let mut rng = trial_rng(cfg.seed, trial_index);
    let mut out = vec![Complex64::default(); symbols.len()];
    fill_noisy(&mut rng, symbols, cfg.component_std(), &mut out);
    out
}

/// Complex symbols of every codeword, materialized once.
fn modulate(cb: &Codebook) -> Vec<Vec<Complex64>> {
    let symbols = cb.constellation().symbols();
    cb.codewords()
        .iter()
        .map(|w| w.iter().map(|&x| symbols[x as usize]).collect())
        .collect()
}

fn nearest(y: &[Complex64], words: &[Vec<Complex64>]) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (i, w) in words.iter().enumerate() {
        let mut d = 0.0;
        for (a, b) in y.iter().zip(w) {
            d += (a - b).norm_sqr();
            if d >= best_dist {
                break;
            }
        }
        if d < best_dist {
            best_dist = d;
            best = i;
        }
    }
    best
}

/// `argmin_i |y − u(i)|²`, smallest index on ties.
pub fn decode_min_distance(y: &[Complex64], cb: &Codebook) -> usize {
    nearest(y, &modulate(cb))
}

/// Decoder whose region for message `i` is the product of the disks around
/// the symbols of `u(i)`.
#[derive(Debug)]
pub struct RegionDecoder<'a> {
    cb: &'a Codebook,
    index: HashMap<&'a [u32], usize>,
}

impl<'a> RegionDecoder<'a> {
    /// Fails with `OverlappingRegions` unless all disks are pairwise disjoint.
    pub fn new(cb: &'a Codebook) -> Result<Self> {
        validate_regions(cb.constellation())?;
        let index = cb
            .codewords()
            .iter()
            .enumerate()
            .map(|(i, w)| (w.as_slice(), i))
            .collect();
        Ok(Self { cb, index })
    }

    /// The message whose region contains `y`, or `None` for an erasure.
    pub fn decode(&self, y: &[Complex64]) -> Option<usize> {
        let mut word = Vec::with_capacity(y.len());
        self.decode_into(y, &mut word)
    }

    fn decode_into(&self, y: &[Complex64], word: &mut Vec<u32>) -> Option<usize> {
        word.clear();
        let cst = self.cb.constellation();
        for &sample in y {
            word.push(cst.disk_containing(sample)? as u32);
        }
        self.index.get(word.as_slice()).copied()
    }
}

/// One-shot region decoding; see [`RegionDecoder`].
pub fn decode_by_regions(y: &[Complex64], cb: &Codebook) -> Result<Option<usize>> {
    Ok(RegionDecoder::new(cb)?.decode(y))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimResult {
    pub dep_estimate: f64,
    pub std_error: f64,
    pub per_message_errors: Vec<u64>,
    pub per_message_trials: Vec<u64>,
    pub trials_used: u64,
    pub decoder: DecoderKind,
}

/// Serialized form written by the `simulate` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub dep: f64,
    pub se: f64,
    pub trials: u64,
    pub decoder: DecoderKind,
}

impl SimResult {
    pub fn summary(&self) -> SimSummary {
        SimSummary {
            dep: self.dep_estimate,
            se: self.std_error,
            trials: self.trials_used,
            decoder: self.decoder,
        }
    }

    pub fn errors(&self) -> u64 {
        self.per_message_errors.iter().sum()
    }
}

#[derive(Clone)]
struct Tally {
    errors: Vec<u64>,
    sent: Vec<u64>,
}

impl Tally {
    fn new(m: usize) -> Self {
        Self {
            errors: vec![0; m],
            sent: vec![0; m],
        }
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.errors.iter_mut().zip(other.errors) {
            *a += b;
        }
        for (a, b) in self.sent.iter_mut().zip(other.sent) {
            *a += b;
        }
        self
    }
}

/// Empirical decoding error probability under uniformly drawn messages.
/// Erasures of the region decoder count as errors.
pub fn estimate_dep(cb: &Codebook, decoder: DecoderKind, cfg: &ChannelConfig) -> Result<SimResult> {
    if cfg.trials < MIN_TRIALS {
        return Err(Error::InvalidConfig(format!(
            "trials = {} below the minimum of {MIN_TRIALS}",
            cfg.trials
        )));
    }
    if !(cfg.sigma2 > 0.0) {
        return Err(Error::NonPositiveInput);
    }
    let regions = match decoder {
        DecoderKind::Regions => Some(RegionDecoder::new(cb)?),
        DecoderKind::MinDistance => None,
    };
    let words = modulate(cb);
    let m = cb.m();
    let n = cb.n();
    let std = cfg.component_std();
    let chunks = cfg.trials.div_ceil(CHUNK);

    let tally = (0..chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut tally = Tally::new(m);
            let mut y = vec![Complex64::default(); n];
            let mut scratch = Vec::with_capacity(n);
            let end = ((chunk + 1) * CHUNK).min(cfg.trials);
            for trial in chunk * CHUNK..end {
                let mut rng = trial_rng(cfg.seed, trial);
                let sent = rng.random_range(0..m);
                fill_noisy(&mut rng, &words[sent], std, &mut y);
                let decoded = match &regions {
                    Some(dec) => dec.decode_into(&y, &mut scratch),
                    None => Some(nearest(&y, &words)),
                };
                tally.sent[sent] += 1;
                if decoded != Some(sent) {
                    tally.errors[sent] += 1;
                }
            }
            tally
        })
        .reduce(|| Tally::new(m), Tally::merge);

    let errors: u64 = tally.errors.iter().sum();
    let p = errors as f64 / cfg.trials as f64;
    Ok(SimResult {
        dep_estimate: p,
        std_error: (p * (1.0 - p) / cfg.trials as f64).sqrt(),
        per_message_errors: tally.errors,
        per_message_trials: tally.sent,
        trials_used: cfg.trials,
        decoder,
    })
}
