//! Estimators and tests over match records: within-subject and cohort
//! prevalence, prevalence ratios and differences, bootstrap intervals,
//! Kolmogorov–Smirnov comparisons, per-schema ratios and threshold sweeps.

mod bootstrap;
mod ks;
mod sentiment;

pub use bootstrap::{
    bootstrap_pair, bootstrap_pair_with_values, quantile, Axis, BootstrapConfig, EstimateSummary,
    PairStatistic,
};
pub use ks::{kolmogorov_survival, ks_exact_permutation_p, ks_two_sample, KsResult};
pub use sentiment::{sentiment_distribution_compare, Histogram, SentimentComparison};

use thiserror::Error;

use crate::matcher::SchemaSet;

#[derive(Debug, Error)]
pub enum StatsError {
    #[error("cohort contains no posts")]
    EmptyCohort,
    #[error("sample is empty")]
    EmptySample,
    #[error("min_posts must be at least 1")]
    BadMinPosts,
    #[error("thresholds must be positive and strictly ascending")]
    BadThresholds,
    #[error("no user in {cohort} cohort reaches the {threshold}-post threshold")]
    EmptyDistribution { cohort: &'static str, threshold: u64 },
    #[error("replicate count must be at least 1")]
    ZeroReplicates,
    #[error("sentiment score {value} outside [-1, 1]")]
    ScoreOutOfRange { value: f64 },
    #[error("bin width must be in (0, 2]")]
    BadBinWidth,
    #[error("exact permutation limited to {limit} pooled observations, got {got}")]
    ExactTooLarge { limit: usize, got: usize },
}

/// Per-user post and match counts for one cohort, the unit all estimators
/// work from. Users are kept sorted by id; per-user match signatures are
/// stored as (schema set, post count) pairs so any schema subset can be
/// re-evaluated without rescanning text.
#[derive(Debug, Clone)]
pub struct CohortMatches {
    users: Vec<UserMatches>,
    total_posts: u64,
}

#[derive(Debug, Clone)]
pub struct UserMatches {
    pub user_id: String,
    /// All retained posts, matching or not.
    pub n_posts: u64,
    /// Distinct non-empty match signatures with their post counts, sorted.
    pub sigs: Vec<(SchemaSet, u64)>,
}

impl UserMatches {
    fn from_sets(user_id: String, sets: &[SchemaSet]) -> UserMatches {
        let mut sigs: std::collections::BTreeMap<SchemaSet, u64> = Default::default();
        for set in sets {
            if !set.is_empty() {
                *sigs.entry(*set).or_insert(0) += 1;
            }
        }
        UserMatches {
            user_id,
            n_posts: sets.len() as u64,
            sigs: sigs.into_iter().collect(),
        }
    }

    /// Posts whose signature intersects the subset.
    pub fn matched(&self, subset: &SchemaSet) -> u64 {
        self.sigs
            .iter()
            .filter(|(sig, _)| sig.intersects(subset))
            .map(|(_, n)| *n)
            .sum()
    }
}

impl CohortMatches {
    /// Build from per-user match sets (one set per retained post).
    pub fn from_user_sets(per_user: impl IntoIterator<Item = (String, Vec<SchemaSet>)>) -> Self {
        let mut users: Vec<UserMatches> = per_user
            .into_iter()
            .map(|(id, sets)| UserMatches::from_sets(id, &sets))
            .collect();
        users.sort_by(|a, b| a.user_id.cmp(&b.user_id));
        let total_posts = users.iter().map(|u| u.n_posts).sum();
        CohortMatches { users, total_posts }
    }

    pub fn users(&self) -> &[UserMatches] {
        &self.users
    }

    pub fn total_posts(&self) -> u64 {
        self.total_posts
    }

    pub fn matched_posts(&self, subset: &SchemaSet) -> u64 {
        self.users.iter().map(|u| u.matched(subset)).sum()
    }

    /// Per-user (matched, total) pairs for a fixed subset, user order.
    pub fn user_counts(&self, subset: &SchemaSet) -> Vec<(u64, u64)> {
        self.users.iter().map(|u| (u.matched(subset), u.n_posts)).collect()
    }

    /// Cohort-wide signature table: distinct signatures with post counts.
    pub fn signature_counts(&self) -> Vec<(SchemaSet, u64)> {
        let mut table: std::collections::BTreeMap<SchemaSet, u64> = Default::default();
        for u in &self.users {
            for (sig, n) in &u.sigs {
                *table.entry(*sig).or_insert(0) += n;
            }
        }
        table.into_iter().collect()
    }

    /// Posts containing each schema id in `0..n_schemata`.
    pub fn per_schema_counts(&self, n_schemata: usize) -> Vec<u64> {
        let mut counts = vec![0u64; n_schemata];
        for u in &self.users {
            for (sig, n) in &u.sigs {
                for id in sig.iter() {
                    counts[id as usize] += n;
                }
            }
        }
        counts
    }

    /// Dense per-user per-schema post counts; row order matches `users()`.
    pub fn per_user_schema_counts(&self, n_schemata: usize) -> Vec<Vec<u32>> {
        self.users
            .iter()
            .map(|u| {
                let mut row = vec![0u32; n_schemata];
                for (sig, n) in &u.sigs {
                    for id in sig.iter() {
                        row[id as usize] += *n as u32;
                    }
                }
                row
            })
            .collect()
    }
}

/// Within-subject prevalence for one user.
#[derive(Debug, Clone, PartialEq)]
pub struct UserPrevalence {
    pub user_id: String,
    pub n_posts: u64,
    pub n_matched: u64,
}

impl UserPrevalence {
    pub fn prevalence(&self) -> f64 {
        self.n_matched as f64 / self.n_posts as f64
    }
}

/// One row per user with at least `min_posts` retained posts.
pub fn within_subject_prevalences(
    cohort: &CohortMatches,
    subset: &SchemaSet,
    min_posts: u64,
) -> Result<Vec<UserPrevalence>, StatsError> {
    if min_posts < 1 {
        return Err(StatsError::BadMinPosts);
    }
    Ok(cohort
        .users
        .iter()
        .filter(|u| u.n_posts >= min_posts)
        .map(|u| UserPrevalence {
            user_id: u.user_id.clone(),
            n_posts: u.n_posts,
            n_matched: u.matched(subset),
        })
        .collect())
}

/// Fraction of all cohort posts matching any schema in the subset.
pub fn cohort_prevalence(cohort: &CohortMatches, subset: &SchemaSet) -> Result<f64, StatsError> {
    if cohort.total_posts == 0 {
        return Err(StatsError::EmptyCohort);
    }
    Ok(cohort.matched_posts(subset) as f64 / cohort.total_posts as f64)
}

/// Ratio of cohort prevalences; `None` when the denominator prevalence is 0.
pub fn prevalence_ratio(
    depressed: &CohortMatches,
    random: &CohortMatches,
    subset: &SchemaSet,
) -> Result<Option<f64>, StatsError> {
    let p_d = cohort_prevalence(depressed, subset)?;
    let p_r = cohort_prevalence(random, subset)?;
    Ok((p_r > 0.0).then(|| p_d / p_r))
}

/// Percentage-point difference of cohort prevalences.
pub fn prevalence_difference(
    depressed: &CohortMatches,
    random: &CohortMatches,
    subset: &SchemaSet,
) -> Result<f64, StatsError> {
    let p_d = cohort_prevalence(depressed, subset)?;
    let p_r = cohort_prevalence(random, subset)?;
    Ok((p_d - p_r) * 100.0)
}

/// Outcome of a single-schema prevalence-ratio estimate.
#[derive(Debug, Clone)]
pub enum SchemaRatio {
    Estimated(EstimateSummary),
    /// Schema occurs only in the depressed cohort: zero denominator.
    UndefinedDenominator { prevalence_depressed: f64 },
    /// Schema absent from both corpora.
    NotObserved,
}

#[derive(Debug, Clone)]
pub struct SchemaPrevalenceRatio {
    pub schema_id: u16,
    pub count_depressed: u64,
    pub count_random: u64,
    pub result: SchemaRatio,
}

/// Per-schema prevalence ratios with bootstrap intervals (resampling users),
/// sorted by median ratio descending. Unobserved schemata are flagged rather
/// than estimated.
pub fn per_schema_prevalence_ratios(
    depressed: &CohortMatches,
    random: &CohortMatches,
    ids: &[u16],
    n_schemata: usize,
    cfg: &BootstrapConfig,
) -> Result<Vec<SchemaPrevalenceRatio>, StatsError> {
    let counts_d = depressed.per_schema_counts(n_schemata);
    let counts_r = random.per_schema_counts(n_schemata);
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        let (cd, cr) = (counts_d[id as usize], counts_r[id as usize]);
        let result = if cd == 0 && cr == 0 {
            SchemaRatio::NotObserved
        } else if cr == 0 {
            SchemaRatio::UndefinedDenominator {
                prevalence_depressed: cd as f64 / depressed.total_posts as f64,
            }
        } else {
            let subset: SchemaSet = [id].into_iter().collect();
            let single = BootstrapConfig {
                axis: Axis::Users,
                ..cfg.clone()
            };
            SchemaRatio::Estimated(bootstrap_pair(
                depressed,
                random,
                &subset,
                PairStatistic::PrevalenceRatio,
                &single,
            )?)
        };
        out.push(SchemaPrevalenceRatio {
            schema_id: id,
            count_depressed: cd,
            count_random: cr,
            result,
        });
    }
    out.sort_by(|a, b| rank_key(a).partial_cmp(&rank_key(b)).unwrap().then(a.schema_id.cmp(&b.schema_id)));
    Ok(out)
}

// Estimated rows first (median descending), then undefined denominators,
// then unobserved schemata.
fn rank_key(row: &SchemaPrevalenceRatio) -> (u8, f64) {
    match &row.result {
        SchemaRatio::Estimated(e) => (0, -e.median.unwrap_or(f64::NEG_INFINITY)),
        SchemaRatio::UndefinedDenominator { .. } => (1, 0.0),
        SchemaRatio::NotObserved => (2, 0.0),
    }
}

/// KS comparison of within-subject prevalence distributions at each minimum
/// post-count threshold.
pub fn threshold_sweep(
    depressed: &CohortMatches,
    random: &CohortMatches,
    subset: &SchemaSet,
    thresholds: &[u64],
) -> Result<Vec<(u64, KsResult)>, StatsError> {
    if thresholds.is_empty() || thresholds[0] < 1 || thresholds.windows(2).any(|w| w[0] >= w[1]) {
        return Err(StatsError::BadThresholds);
    }
    let mut out = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let d: Vec<f64> = within_subject_prevalences(depressed, subset, t)?
            .iter()
            .map(UserPrevalence::prevalence)
            .collect();
        let r: Vec<f64> = within_subject_prevalences(random, subset, t)?
            .iter()
            .map(UserPrevalence::prevalence)
            .collect();
        if d.is_empty() {
            return Err(StatsError::EmptyDistribution { cohort: "depressed", threshold: t });
        }
        if r.is_empty() {
            return Err(StatsError::EmptyDistribution { cohort: "random", threshold: t });
        }
        out.push((t, ks_two_sample(&d, &r)?));
    }
    Ok(out)
}
