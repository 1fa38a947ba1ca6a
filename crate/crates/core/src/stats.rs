//! Seeded Monte Carlo plumbing shared by the mechanism and auction simulators.
//!
//! Samples are drawn in fixed-size chunks, each with its own ChaCha stream
//! derived from the seed, and chunk summaries are merged in chunk order. The
//! result is therefore identical whether chunks run sequentially or on a
//! thread pool.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Samples per independently seeded chunk.
pub const CHUNK_SIZE: u64 = 1 << 14;

/// Streaming mean and variance (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let n_a = self.count as f64;
        let n_b = other.count as f64;
        let n = n_a + n_b;
        let delta = other.mean - self.mean;
        self.mean += delta * n_b / n;
        self.m2 += other.m2 + delta * delta * n_a * n_b / n;
        self.count += other.count;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance (zero for fewer than two samples).
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            self.m2 / (self.count - 1) as f64
        }
    }

    /// Sample standard deviation over `sqrt(n)`.
    pub fn std_error(&self) -> f64 {
        if self.count == 0 {
            return 0.0;
        }
        (self.variance() / self.count as f64).sqrt()
    }
}

/// RNG for chunk `chunk` of a run seeded with `seed`.
pub fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

fn run_chunk<const N: usize, F>(n: u64, seed: u64, chunk: u64, sample: &F) -> [RunningStats; N]
where
    F: Fn(&mut ChaCha8Rng) -> [f64; N],
{
    let start = chunk * CHUNK_SIZE;
    let len = CHUNK_SIZE.min(n - start);
    let mut rng = chunk_rng(seed, chunk);
    let mut stats = [RunningStats::default(); N];
    for _ in 0..len {
        let xs = sample(&mut rng);
        for (s, x) in stats.iter_mut().zip(xs) {
            s.push(x);
        }
    }
    stats
}

/// Draws `n` samples of an `N`-vector observable and summarizes each coordinate.
pub fn monte_carlo<const N: usize, F>(n: u64, seed: u64, sample: F) -> [RunningStats; N]
where
    F: Fn(&mut ChaCha8Rng) -> [f64; N] + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);

    #[cfg(feature = "parallel")]
    let partials: Vec<[RunningStats; N]> = {
        use rayon::prelude::*;
        (0..chunks)
            .into_par_iter()
            .map(|c| run_chunk(n, seed, c, &sample))
            .collect()
    };
    #[cfg(not(feature = "parallel"))]
    let partials: Vec<[RunningStats; N]> = (0..chunks)
        .map(|c| run_chunk(n, seed, c, &sample))
        .collect();

    let mut total = [RunningStats::default(); N];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    total
}

/// Maps `f` over `items`, in parallel when enabled, preserving order.
pub(crate) fn ordered_map<T, U, F>(items: &[T], f: F) -> Vec<U>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> U + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}
