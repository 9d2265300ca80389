//! Seeded Monte-Carlo estimation with Hoeffding confidence intervals.
//!
//! Samples are drawn in fixed-size chunks; chunk `c` reads ChaCha stream `c`
//! of the seed, so the estimate does not depend on how chunks are scheduled
//! across workers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Samples per independent substream.
pub const CHUNK: u64 = 1 << 12;

/// Confidence level of every reported interval.
pub const CONFIDENCE: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub samples: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
}

impl Estimate {
    pub fn contains(&self, v: f64) -> bool {
        self.ci_low <= v && v <= self.ci_high
    }

    pub fn half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

/// Two-sided Hoeffding half-width for the mean of `samples` draws with
/// values in an interval of length `range`.
pub fn hoeffding_half_width(samples: u64, range: f64, confidence: f64) -> f64 {
    let alpha = 1.0 - confidence;
    range * ((2.0 / alpha).ln() / (2.0 * samples as f64)).sqrt()
}

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Averages an integer-valued sampler whose outcomes lie in `[lo, hi]`.
pub fn estimate_mean<F>(seed: u64, samples: u64, lo: i64, hi: i64, sample: F) -> Estimate
where
    F: Fn(&mut ChaCha8Rng) -> i64 + Sync,
{
    assert!(samples > 0, "Monte-Carlo needs at least one sample");
    let chunks = samples.div_ceil(CHUNK);
    let total: i64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = substream(seed, c);
            let here = CHUNK.min(samples - c * CHUNK);
            (0..here).map(|_| sample(&mut rng)).sum::<i64>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .sum();
    let mean = total as f64 / samples as f64;
    let h = hoeffding_half_width(samples, (hi - lo) as f64, CONFIDENCE);
    Estimate {
        mean,
        samples,
        ci_low: (mean - h).max(lo as f64),
        ci_high: (mean + h).min(hi as f64),
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn fair_coin_estimate() {
        let e = estimate_mean(7, 100_000, 0, 1, |rng| rng.gen_bool(0.5) as i64);
        assert!(e.contains(0.5));
        assert!((e.half_width() - hoeffding_half_width(100_000, 1.0, 0.99)).abs() < 1e-12);
    }

    #[test]
    fn independent_of_thread_count() {
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| estimate_mean(42, 50_001, 0, 1, |rng| rng.gen_bool(0.3) as i64))
        };
        assert_eq!(run(1), run(4));
    }
}
