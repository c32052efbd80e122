//! Exact samplers for the citation model.
//!
//! A citation count is drawn by composition: pick a regime with probability
//! `c`, draw a processing time `τ` from that regime's Wald law, set
//! `β = 1/τ`, then draw a geometric count by inversion.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Open01, StandardNormal};

use crate::histogram::Histogram;
use crate::model::{ComponentParams, ModelParams, ProcessingTime, Rate};
use crate::{Error, Result};

/// Seeded, splittable random stream.
///
/// Streams with the same seed and different stream ids are independent
/// ChaCha keystreams, so corpora can be generated in any order and still be
/// reproducible.
#[derive(Debug, Clone)]
pub struct RngState {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngState {
    pub fn new(seed: u64) -> Self {
        Self::substream(seed, 0)
    }

    pub fn substream(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }
}

impl RngCore for RngState {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Draw a Wald processing time (Michael, Schucany and Haas transform with
/// one uniform to choose between the two roots).
pub fn sample_wald<R: Rng + ?Sized>(p: &ComponentParams, rng: &mut R) -> ProcessingTime {
    let (mu, lam) = (p.mu(), p.lambda());
    let v: f64 = StandardNormal.sample(rng);
    let y = mu * v * v;
    // Smaller root of the quadratic, written without cancellation.
    let x = mu - 2.0 * mu * y / (y + (y * y + 4.0 * lam * y).sqrt());
    let u: f64 = rng.random();
    let tau = if u * (mu + x) <= mu { x } else { mu * mu / x };
    // The smaller root can round to zero when λ is tiny relative to μ·v².
    ProcessingTime::new(tau.max(f64::MIN_POSITIVE)).expect("positive finite")
}

/// Draw a citation rate `β = 1/τ`.
pub fn sample_rate<R: Rng + ?Sized>(p: &ComponentParams, rng: &mut R) -> Rate {
    let tau = sample_wald(p, rng).get();
    Rate::new((1.0 / tau).min(f64::MAX)).expect("positive finite")
}

/// Geometric draw on `{1, 2, ...}` by inversion: `ceil(-ln U / β)`.
pub fn sample_geometric<R: Rng + ?Sized>(beta: Rate, rng: &mut R) -> u64 {
    let u: f64 = Open01.sample(rng);
    // `as` saturates, which only matters for rates below ~1e-19.
    ((-u.ln() / beta.get()).ceil() as u64).max(1)
}

/// Draw one citation count from the full model.
pub fn sample_count<R: Rng + ?Sized>(m: &ModelParams, rng: &mut R) -> u64 {
    let u: f64 = rng.random();
    let comp = if u < m.c() { m.comp1() } else { m.comp2() };
    let beta = sample_rate(comp, rng);
    sample_geometric(beta, rng)
}

/// A reproducible synthetic corpus: one count per paper.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub counts: Vec<u64>,
    pub generating_params: ModelParams,
    pub seed: u64,
}

impl SyntheticCorpus {
    pub fn to_histogram(&self) -> Histogram {
        Histogram::from_counts(self.counts.iter().copied())
    }
}

/// `n` independent draws from stream 0 of `seed`.
pub fn generate_corpus(m: &ModelParams, n: usize, seed: u64) -> Result<SyntheticCorpus> {
    generate_corpus_stream(m, n, seed, 0)
}

/// As [`generate_corpus`] on an explicit sub-stream.
pub fn generate_corpus_stream(m: &ModelParams, n: usize, seed: u64, stream: u64) -> Result<SyntheticCorpus> {
    if n == 0 {
        return Err(Error::domain("corpus size must be at least 1"));
    }
    let mut rng = RngState::substream(seed, stream);
    let counts = (0..n).map(|_| sample_count(m, &mut rng)).collect();
    Ok(SyntheticCorpus {
        counts,
        generating_params: *m,
        seed,
    })
}
