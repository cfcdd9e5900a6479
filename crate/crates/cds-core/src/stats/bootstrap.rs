//! Bootstrap resampling of prevalence statistics, over users or over the
//! schema set, with percentile intervals.
//!
//! Every replicate draws from its own stream seeded by (seed, replicate
//! index), so results are bit-identical for any worker count or partition.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{cohort_prevalence, CohortMatches, StatsError};
use crate::matcher::SchemaSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Resample both cohorts' user sets independently, with replacement;
    /// a resampled user contributes their entire timeline.
    Users,
    /// Resample the schema subset with replacement; duplicates collapse for
    /// binary matching. The same resampled set is applied to both cohorts.
    Schemata,
}

impl Axis {
    pub fn label(self) -> &'static str {
        match self {
            Axis::Users => "users",
            Axis::Schemata => "schemata",
        }
    }
}

#[derive(Debug, Clone)]
pub struct BootstrapConfig {
    pub replicates: u32,
    pub axis: Axis,
    pub seed: u64,
    pub workers: usize,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig { replicates: 10_000, axis: Axis::Users, seed: 0, workers: 1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairStatistic {
    /// P(D) / P(R); undefined when the denominator prevalence is zero.
    PrevalenceRatio,
    /// (P(D) - P(R)) * 100, in percentage points.
    PrevalenceDifferencePct,
}

impl PairStatistic {
    fn eval(self, p_d: f64, p_r: f64) -> Option<f64> {
        match self {
            PairStatistic::PrevalenceRatio => (p_r > 0.0).then(|| p_d / p_r),
            PairStatistic::PrevalenceDifferencePct => Some((p_d - p_r) * 100.0),
        }
    }
}

/// Point value plus bootstrap distribution summary. Percentiles use linear
/// interpolation between order statistics; replicates whose statistic is
/// undefined (zero resampled denominator) are skipped and accounted for in
/// `effective_replicates`.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateSummary {
    pub point: Option<f64>,
    pub median: Option<f64>,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub replicates: u32,
    pub effective_replicates: u32,
    pub seed: u64,
}

impl EstimateSummary {
    /// Fewer than half the replicates produced a defined value.
    pub fn unreliable(&self) -> bool {
        (self.effective_replicates as f64) < 0.5 * self.replicates as f64
    }

    /// Whether the 95% interval excludes `null` (the significance convention).
    pub fn excludes(&self, null: f64) -> Option<bool> {
        match (self.ci_low, self.ci_high) {
            (Some(lo), Some(hi)) => Some(lo > null || hi < null),
            _ => None,
        }
    }
}

/// Empirical quantile with linear interpolation between order statistics.
/// `sorted` must be non-empty and ascending.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    let stream = seed.wrapping_add((replicate + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    ChaCha8Rng::seed_from_u64(stream)
}

enum ReplicateInput<'a> {
    Users {
        depressed: &'a [(u64, u64)],
        random: &'a [(u64, u64)],
    },
    Schemata {
        ids: &'a [u16],
        depressed_sigs: &'a [(SchemaSet, u64)],
        depressed_total: u64,
        random_sigs: &'a [(SchemaSet, u64)],
        random_total: u64,
    },
}

fn resample_counts(rng: &mut ChaCha8Rng, counts: &[(u64, u64)]) -> (u64, u64) {
    let n = counts.len();
    let mut matched = 0u64;
    let mut total = 0u64;
    for _ in 0..n {
        let (m, t) = counts[rng.random_range(0..n)];
        matched += m;
        total += t;
    }
    (matched, total)
}

fn subset_prevalence(sigs: &[(SchemaSet, u64)], total: u64, subset: &SchemaSet) -> f64 {
    let matched: u64 = sigs
        .iter()
        .filter(|(sig, _)| sig.intersects(subset))
        .map(|(_, n)| *n)
        .sum();
    matched as f64 / total as f64
}

fn one_replicate(rng: &mut ChaCha8Rng, input: &ReplicateInput, stat: PairStatistic) -> Option<f64> {
    match input {
        ReplicateInput::Users { depressed, random } => {
            // Fixed draw order: depressed cohort first.
            let (md, td) = resample_counts(rng, depressed);
            let (mr, tr) = resample_counts(rng, random);
            if td == 0 || tr == 0 {
                return None;
            }
            stat.eval(md as f64 / td as f64, mr as f64 / tr as f64)
        }
        ReplicateInput::Schemata {
            ids,
            depressed_sigs,
            depressed_total,
            random_sigs,
            random_total,
        } => {
            if ids.is_empty() {
                return None;
            }
            let mut resampled = SchemaSet::EMPTY;
            for _ in 0..ids.len() {
                resampled.insert(ids[rng.random_range(0..ids.len())]);
            }
            let p_d = subset_prevalence(depressed_sigs, *depressed_total, &resampled);
            let p_r = subset_prevalence(random_sigs, *random_total, &resampled);
            stat.eval(p_d, p_r)
        }
    }
}

/// Bootstrap a two-cohort statistic for a schema subset.
pub fn bootstrap_pair(
    depressed: &CohortMatches,
    random: &CohortMatches,
    subset: &SchemaSet,
    stat: PairStatistic,
    cfg: &BootstrapConfig,
) -> Result<EstimateSummary, StatsError> {
    bootstrap_pair_with_values(depressed, random, subset, stat, cfg).map(|(summary, _)| summary)
}

/// Like [`bootstrap_pair`], also returning the defined replicate values in
/// replicate order (for histogram emission).
pub fn bootstrap_pair_with_values(
    depressed: &CohortMatches,
    random: &CohortMatches,
    subset: &SchemaSet,
    stat: PairStatistic,
    cfg: &BootstrapConfig,
) -> Result<(EstimateSummary, Vec<f64>), StatsError> {
    if cfg.replicates < 1 {
        return Err(StatsError::ZeroReplicates);
    }
    let p_d = cohort_prevalence(depressed, subset)?;
    let p_r = cohort_prevalence(random, subset)?;
    let point = stat.eval(p_d, p_r);

    let user_counts_d;
    let user_counts_r;
    let ids: Vec<u16>;
    let sigs_d;
    let sigs_r;
    let input = match cfg.axis {
        Axis::Users => {
            user_counts_d = depressed.user_counts(subset);
            user_counts_r = random.user_counts(subset);
            ReplicateInput::Users { depressed: &user_counts_d, random: &user_counts_r }
        }
        Axis::Schemata => {
            ids = subset.iter().collect();
            sigs_d = depressed.signature_counts();
            sigs_r = random.signature_counts();
            ReplicateInput::Schemata {
                ids: &ids,
                depressed_sigs: &sigs_d,
                depressed_total: depressed.total_posts(),
                random_sigs: &sigs_r,
                random_total: random.total_posts(),
            }
        }
    };

    let replicates = cfg.replicates as usize;
    let mut values: Vec<Option<f64>> = vec![None; replicates];
    let workers = cfg.workers.max(1).min(replicates);
    let chunk = replicates.div_ceil(workers);
    std::thread::scope(|scope| {
        let input = &input;
        for (w, slot) in values.chunks_mut(chunk).enumerate() {
            let start = w * chunk;
            scope.spawn(move || {
                for (off, v) in slot.iter_mut().enumerate() {
                    let mut rng = replicate_rng(cfg.seed, (start + off) as u64);
                    *v = one_replicate(&mut rng, input, stat);
                }
            });
        }
    });

    let defined: Vec<f64> = values.into_iter().flatten().collect();
    let mut ordered = defined.clone();
    ordered.sort_unstable_by(f64::total_cmp);
    let effective = ordered.len() as u32;
    let (median, ci_low, ci_high) = if ordered.is_empty() {
        (None, None, None)
    } else {
        (
            Some(quantile(&ordered, 0.5)),
            Some(quantile(&ordered, 0.025)),
            Some(quantile(&ordered, 0.975)),
        )
    };
    let summary = EstimateSummary {
        point,
        median,
        ci_low,
        ci_high,
        replicates: cfg.replicates,
        effective_replicates: effective,
        seed: cfg.seed,
    };
    Ok((summary, defined))
}
