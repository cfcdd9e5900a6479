//! Lexicon-driven detection of cognitive-distortion schemata (CDS) in
//! short-text corpora, plus the statistical battery built on top of it:
//! within-subject and cohort prevalence, bootstrap prevalence ratios and
//! differences, Kolmogorov–Smirnov comparisons, pronoun- and
//! sentiment-sensitivity analyses, and cohort assembly.
//!
//! The pipeline, end to end:
//!
//! 1. [`textnorm`] normalizes raw post text (contraction expansion,
//!    tokenization, exclusion filters) into one shared token space.
//! 2. [`lexicon`] embeds the 241-schema CDS lexicon across 12 distortion
//!    categories, tokenized through the same pipeline.
//! 3. [`matcher`] scans posts against all schemata in one pass.
//! 4. [`stats`] turns match records into prevalence estimates, bootstrap
//!    intervals and tests.
//! 5. [`cohort`] handles corpus ingestion, diagnosis-based user selection,
//!    creation-date-matched sampling and manifests.
//! 6. [`report`] renders the delimited report and plot-data files.

pub mod cohort;
pub mod lexicon;
pub mod matcher;
pub mod report;
pub mod stats;
pub mod synth;
pub mod textnorm;
pub mod util;

pub use lexicon::{load_lexicon, Category, Lexicon, Schema};
pub use matcher::{build_index, build_lexicon_index, MatchRecord, PatternIndex, SchemaSet};
pub use stats::CohortMatches;

use cohort::IngestResult;

/// Match every retained post of an ingested corpus, grouped per user: the
/// bridge from ingestion to the statistics layer.
pub fn cohort_matches(index: &PatternIndex, ingest: &IngestResult) -> CohortMatches {
    CohortMatches::from_user_sets(ingest.users.iter().map(|u| {
        let sets: Vec<SchemaSet> = u
            .retained()
            .map(|p| index.match_post(p).matched)
            .collect();
        (u.user_id.clone(), sets)
    }))
}
