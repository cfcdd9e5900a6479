//! Distribution-level comparison of externally supplied sentiment scores.
//! Scores live in [-1, 1]; the tool never computes sentiment itself.

use super::{ks_two_sample, KsResult, StatsError};

/// Fixed-width histogram over [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub n: usize,
}

impl Histogram {
    fn build(scores: &[f64], bin_width: f64) -> Histogram {
        let n_bins = (2.0 / bin_width).ceil() as usize;
        let mut counts = vec![0u64; n_bins];
        for &x in scores {
            let idx = (((x + 1.0) / bin_width) as usize).min(n_bins - 1);
            counts[idx] += 1;
        }
        Histogram { bin_width, counts, n: scores.len() }
    }

    /// Lower edge of bin `i`.
    pub fn bin_low(&self, i: usize) -> f64 {
        -1.0 + i as f64 * self.bin_width
    }

    /// Probability density within bin `i`.
    pub fn density(&self, i: usize) -> f64 {
        self.counts[i] as f64 / (self.n as f64 * self.bin_width)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentimentComparison {
    pub histogram_a: Histogram,
    pub histogram_b: Histogram,
    pub ks: KsResult,
    /// Fraction of exactly-zero scores on each side.
    pub zero_fraction_a: f64,
    pub zero_fraction_b: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

/// Aligned histograms over [-1, 1] plus a KS comparison of the raw samples.
pub fn sentiment_distribution_compare(
    scores_a: &[f64],
    scores_b: &[f64],
    bin_width: f64,
) -> Result<SentimentComparison, StatsError> {
    if !(bin_width > 0.0 && bin_width <= 2.0) {
        return Err(StatsError::BadBinWidth);
    }
    if scores_a.is_empty() || scores_b.is_empty() {
        return Err(StatsError::EmptySample);
    }
    for &x in scores_a.iter().chain(scores_b) {
        if !(-1.0..=1.0).contains(&x) || x.is_nan() {
            return Err(StatsError::ScoreOutOfRange { value: x });
        }
    }
    let zero = |xs: &[f64]| xs.iter().filter(|x| **x == 0.0).count() as f64 / xs.len() as f64;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(SentimentComparison {
        histogram_a: Histogram::build(scores_a, bin_width),
        histogram_b: Histogram::build(scores_b, bin_width),
        ks: ks_two_sample(scores_a, scores_b)?,
        zero_fraction_a: zero(scores_a),
        zero_fraction_b: zero(scores_b),
        mean_a: mean(scores_a),
        mean_b: mean(scores_b),
    })
}
