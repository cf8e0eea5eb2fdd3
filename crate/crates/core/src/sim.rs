//! Seeded Monte-Carlo runs of the eigenstate and entangled-pair experiments.
//!
//! Shots are split into fixed chunks of [`CHUNK_SHOTS`]. Chunk `k` draws from
//! its own ChaCha8 substream: `ChaCha8Rng::seed_from_u64(seed)` with
//! `set_stream(k)`. Chunks run in parallel on the current rayon pool and their
//! counts are summed, so the result does not depend on the worker count.
//! Categories are sampled by inverse CDF in cell order, one `f64` draw per
//! category pick.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::povm::{build_povm, outcome_probs, pair_outcome_probs, ProbTable16, ProbTable4, VisibilityTriple};
use crate::qubit::{density, eigenstate, pauli, singlet, Axis, OperatorMatrix, Sign};

/// Shots per RNG substream.
pub const CHUNK_SHOTS: u64 = 1 << 16;

/// Identifier of the random stream layout, recorded in manifests.
pub const RNG_ID: &str = "chacha8-seed_from_u64-stream_per_chunk-65536";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExperimentConfig {
    pub visibilities: VisibilityTriple,
    pub shots: u64,
    pub seed: u64,
    pub randomize_flips: bool,
    /// Singlet weight of the Werner source; pair runs only.
    pub werner_p: f64,
}

impl ExperimentConfig {
    pub fn new(visibilities: VisibilityTriple, shots: u64, seed: u64) -> Self {
        Self {
            visibilities,
            shots,
            seed,
            randomize_flips: false,
            werner_p: 1.0,
        }
    }

    pub fn with_flips(mut self, randomize: bool) -> Self {
        self.randomize_flips = randomize;
        self
    }

    pub fn with_werner(mut self, p: f64) -> Self {
        self.werner_p = p;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::InvalidConfig("shots must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.werner_p) {
            return Err(Error::InvalidConfig(format!(
                "werner_p = {} is outside [0, 1]",
                self.werner_p
            )));
        }
        Ok(())
    }
}

/// Counts of single-qubit outcomes for a known eigenstate input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OutcomeCounts4 {
    pub counts: [u64; 4],
    pub total: u64,
    pub input_axis: Axis,
    pub input_value: Sign,
}

impl OutcomeCounts4 {
    pub fn new(counts: [u64; 4], input_axis: Axis, input_value: Sign) -> Self {
        Self {
            counts,
            total: counts.iter().sum(),
            input_axis,
            input_value,
        }
    }
}

/// Counts of the sixteen pair outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts16 {
    pub counts: [u64; 16],
    pub total: u64,
}

impl PairCounts16 {
    pub fn new(counts: [u64; 16]) -> Self {
        Self {
            counts,
            total: counts.iter().sum(),
        }
    }
}

/// Inverse-CDF sampler over a fixed category order.
#[derive(Debug, Clone)]
pub struct CategoricalSampler {
    cdf: Vec<f64>,
}

impl CategoricalSampler {
    pub fn new(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidProbabilities("no categories".into()));
        }
        let mut total = 0.0;
        for &p in probs {
            if !p.is_finite() {
                return Err(Error::NonFinite(p));
            }
            if p < -1e-12 {
                return Err(Error::InvalidProbabilities(format!("negative probability {p}")));
            }
            total += p.max(0.0);
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidProbabilities(format!("probabilities sum to {total}")));
        }
        let mut acc = 0.0;
        let mut cdf: Vec<f64> = probs
            .iter()
            .map(|p| {
                acc += p.max(0.0) / total;
                acc
            })
            .collect();
        // the last nonzero bin absorbs accumulated rounding
        if let Some(last) = probs.iter().rposition(|&p| p > 0.0) {
            cdf[last..].iter_mut().for_each(|c| *c = f64::INFINITY);
        }
        Ok(Self { cdf })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        // zero-probability categories have a flat CDF step and are never chosen
        self.cdf.iter().position(|&c| u < c).unwrap_or(self.cdf.len() - 1)
    }

    pub fn len(&self) -> usize {
        self.cdf.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cdf.is_empty()
    }
}

/// Draws one index from `probs`.
pub fn sample_categorical<R: Rng + ?Sized>(probs: &[f64], rng: &mut R) -> Result<usize> {
    Ok(CategoricalSampler::new(probs)?.sample(rng))
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn run_chunked<const N: usize>(
    shots: u64,
    seed: u64,
    shot: impl Fn(&mut ChaCha8Rng) -> usize + Sync,
) -> [u64; N] {
    let chunks = shots.div_ceil(CHUNK_SHOTS);
    (0..chunks)
        .into_par_iter()
        .map(|k| {
            let mut rng = chunk_rng(seed, k);
            let n = CHUNK_SHOTS.min(shots - k * CHUNK_SHOTS);
            let mut counts = [0u64; N];
            for _ in 0..n {
                counts[shot(&mut rng)] += 1;
            }
            counts
        })
        .reduce(
            || [0u64; N],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

/// Samples `shots` outcomes from a four-cell table.
pub fn sample_counts4(probs: &ProbTable4, shots: u64, seed: u64) -> Result<[u64; 4]> {
    let sampler = CategoricalSampler::new(probs.as_array())?;
    Ok(run_chunked::<4>(shots, seed, |rng| sampler.sample(rng)))
}

/// Samples `shots` outcomes from a sixteen-cell table.
pub fn sample_counts16(probs: &ProbTable16, shots: u64, seed: u64) -> Result<[u64; 16]> {
    let sampler = CategoricalSampler::new(probs.as_array())?;
    Ok(run_chunked::<16>(shots, seed, |rng| sampler.sample(rng)))
}

/// Joint measurements on an X or Y eigenstate.
///
/// With `randomize_flips`, each shot applies a Z rotation by π to the input
/// with probability 1/2, which negates both its X and Y values. The recorded
/// outcome is negated in both bits so counts stay in the frame of the
/// requested input; the error pattern of every shot is unchanged.
pub fn run_eigenstate_experiment(
    config: &ExperimentConfig,
    axis: Axis,
    value: Sign,
) -> Result<OutcomeCounts4> {
    config.validate()?;
    if axis == Axis::Z {
        return Err(Error::AxisNotAllowed(axis));
    }
    let povm = build_povm(config.visibilities);
    let rho = density(&eigenstate(axis, value));
    let straight = CategoricalSampler::new(outcome_probs(&povm, &rho)?.as_array())?;
    let counts = if config.randomize_flips {
        let z = pauli(Axis::Z);
        let flipped_rho = z * rho * z;
        let flipped = CategoricalSampler::new(outcome_probs(&povm, &flipped_rho)?.as_array())?;
        run_chunked::<4>(config.shots, config.seed, |rng| {
            if rng.gen::<bool>() {
                // both outcome bits negated: index ^ 0b11
                flipped.sample(rng) ^ 3
            } else {
                straight.sample(rng)
            }
        })
    } else {
        run_chunked::<4>(config.shots, config.seed, |rng| straight.sample(rng))
    };
    Ok(OutcomeCounts4::new(counts, axis, value))
}

/// `p·|E⟩⟨E| + (1 - p)·I/4` for the singlet `|E⟩`.
pub fn werner_state(p: f64) -> Result<OperatorMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!("werner_p = {p} is outside [0, 1]")));
    }
    Ok(p * density(&singlet()) + (0.25 * (1.0 - p)) * OperatorMatrix::identity4())
}

/// Exact pair distribution sampled by [`run_pair_experiment`].
pub fn pair_probs_for(config: &ExperimentConfig) -> Result<ProbTable16> {
    config.validate()?;
    let povm = build_povm(config.visibilities);
    pair_outcome_probs(&povm, &povm, &werner_state(config.werner_p)?)
}

/// The same joint measurement applied to both halves of a Werner pair.
pub fn run_pair_experiment(config: &ExperimentConfig) -> Result<PairCounts16> {
    let probs = pair_probs_for(config)?;
    Ok(PairCounts16::new(sample_counts16(&probs, config.shots, config.seed)?))
}

/// Runs `f` on a dedicated pool with `threads` workers.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
