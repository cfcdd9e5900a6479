//! Delimited-text report emission: per-category condition tables, raw
//! prevalence tables, per-schema rankings, and plot-ready histogram data.
//!
//! Reports are deterministic: identical inputs and config yield byte-identical
//! files regardless of worker count, so files embed the resolved analysis
//! config (seed, replicates, thresholds) but never execution details or
//! wall-clock times.

use std::fmt::Write as _;
use std::path::Path;

use crate::cohort::IngestStats;
use crate::lexicon::{lexicon_stats, Category, Lexicon, FIRST_PERSON_PRONOUNS};
use crate::matcher::SchemaSet;
use crate::stats::{
    bootstrap_pair_with_values, cohort_prevalence, per_schema_prevalence_ratios,
    within_subject_prevalences, Axis, BootstrapConfig, CohortMatches, EstimateSummary, KsResult,
    PairStatistic, SchemaRatio, StatsError, UserPrevalence,
};
use crate::textnorm::ExclusionReason;
use crate::util::write_atomic;

/// Resolved analysis configuration; embedded in every report header.
#[derive(Debug, Clone)]
pub struct ReportConfig {
    pub seed: u64,
    pub replicates: u32,
    pub min_posts: u64,
    pub workers: usize,
    /// Bin width for within-subject prevalence histograms.
    pub prevalence_bin_width: f64,
    /// Bin width for bootstrap-ratio histograms.
    pub ratio_bin_width: f64,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig {
            seed: 0,
            replicates: 10_000,
            min_posts: 150,
            workers: 1,
            prevalence_bin_width: 0.01,
            ratio_bin_width: 0.01,
        }
    }
}

impl ReportConfig {
    fn bootstrap(&self, axis: Axis) -> BootstrapConfig {
        BootstrapConfig {
            replicates: self.replicates,
            axis,
            seed: self.seed,
            workers: self.workers,
        }
    }

    fn header(&self, subject: &str) -> String {
        format!(
            "# report\t{subject}\n# seed\t{}\n# replicates\t{}\n# min_posts\t{}\n",
            self.seed, self.replicates, self.min_posts
        )
    }
}

const SLASH: &str = "/";

fn fmt_opt(v: Option<f64>, decimals: usize) -> String {
    match v {
        Some(x) => format!("{x:.decimals$}"),
        None => SLASH.to_string(),
    }
}

fn sig_marker(summary: &EstimateSummary, null: f64) -> &'static str {
    match summary.excludes(null) {
        Some(true) => "*",
        Some(false) => "",
        None => SLASH,
    }
}

fn direction_marker(summary: &EstimateSummary, null: f64) -> &'static str {
    match (summary.median, summary.excludes(null)) {
        (Some(m), Some(true)) if m > null => "\u{226b}", // ≫
        (Some(m), Some(true)) if m < null => "\u{226a}", // ≪
        (Some(_), _) => "\u{2248}",                      // ≈
        _ => SLASH,
    }
}

/// Descriptive lexicon statistics; pronoun ratio printed as "/" for rows
/// without any pronoun-bearing schema, mirroring the published convention.
/// With per-schema corpus counts supplied, an observed-schemata column is
/// included.
pub fn render_lexicon_stats(lexicon: &Lexicon, observed: Option<&[u64]>) -> String {
    let stats = lexicon_stats(lexicon.schemata());
    let mut out = String::new();
    let obs_col = if observed.is_some() { "\tn_observed" } else { "" };
    writeln!(
        out,
        "category\tn_schemata{obs_col}\tmean_length\tpronoun_pct\tpronoun_count\tfirst_person_count"
    )
    .unwrap();
    let observed_in = |cat: Option<Category>| -> usize {
        let counts = observed.unwrap();
        lexicon
            .schemata()
            .iter()
            .filter(|s| cat.is_none_or(|c| s.category == c))
            .filter(|s| counts[s.id as usize] > 0)
            .count()
    };
    for row in stats.per_category.iter().chain([&stats.total]) {
        let name = row.category.map_or("Total", |c| c.name());
        let pct = match row.pronoun_count {
            0 => SLASH.to_string(),
            _ => format!("{:.1}", row.pronoun_pct().unwrap()),
        };
        let obs = match observed {
            Some(_) => format!("\t{}", observed_in(row.category)),
            None => String::new(),
        };
        writeln!(
            out,
            "{name}\t{}{obs}\t{:.3}\t{pct}\t{}\t{}",
            row.count, row.mean_len, row.pronoun_count, row.first_person_count
        )
        .unwrap();
    }
    out
}

/// Full lexicon dump for audit.
pub fn render_lexicon_export(lexicon: &Lexicon) -> String {
    let mut out = String::new();
    writeln!(out, "id\tcategory\ttext\tn_tokens\thas_personal_pronoun\thas_first_person").unwrap();
    for s in lexicon.schemata() {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            s.id,
            s.category.name(),
            s.text,
            s.len(),
            s.has_personal_pronoun as u8,
            s.has_first_person as u8
        )
        .unwrap();
    }
    out
}

/// Raw cohort prevalence per category (percent), descending by the depressed
/// cohort's value, with the all-schemata row first.
pub fn render_prevalence_table(
    lexicon: &Lexicon,
    depressed: &CohortMatches,
    random: &CohortMatches,
) -> Result<String, StatsError> {
    let mut rows: Vec<(String, f64, f64)> = Vec::new();
    for category in Category::ALL {
        let subset: SchemaSet = lexicon.ids_for_category(category).into_iter().collect();
        rows.push((
            category.name().to_string(),
            cohort_prevalence(depressed, &subset)? * 100.0,
            cohort_prevalence(random, &subset)? * 100.0,
        ));
    }
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let all: SchemaSet = lexicon.all_ids().into_iter().collect();
    let mut out = String::new();
    writeln!(out, "category\tprevalence_depressed_pct\tprevalence_random_pct").unwrap();
    writeln!(
        out,
        "All\t{:.3}\t{:.3}",
        cohort_prevalence(depressed, &all)? * 100.0,
        cohort_prevalence(random, &all)? * 100.0
    )
    .unwrap();
    for (name, d, r) in rows {
        writeln!(out, "{name}\t{d:.3}\t{r:.3}").unwrap();
    }
    Ok(out)
}

/// The three estimation conditions of the category table.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Condition {
    /// Full subset, resampling users.
    All,
    /// Subset stripped of first-person-pronoun schemata, resampling users.
    NoFirstPerson,
    /// Full subset, resampling the schema set itself.
    SchemaResampled,
}

struct ConditionCells {
    median: Option<f64>,
    ci_low: Option<f64>,
    ci_high: Option<f64>,
    sig: String,
    /// Set on the `All` condition only.
    direction: Option<&'static str>,
    point: Option<f64>,
}

fn empty_cells() -> ConditionCells {
    ConditionCells {
        median: None,
        ci_low: None,
        ci_high: None,
        sig: SLASH.to_string(),
        direction: Some(SLASH),
        point: None,
    }
}

fn condition_cells(
    depressed: &CohortMatches,
    random: &CohortMatches,
    lexicon: &Lexicon,
    ids: &[u16],
    stat: PairStatistic,
    condition: Condition,
    cfg: &ReportConfig,
) -> Result<ConditionCells, StatsError> {
    let null = match stat {
        PairStatistic::PrevalenceRatio => 1.0,
        PairStatistic::PrevalenceDifferencePct => 0.0,
    };
    let (ids, axis): (Vec<u16>, Axis) = match condition {
        Condition::All => (ids.to_vec(), Axis::Users),
        Condition::NoFirstPerson => (
            lexicon.ids_without_pronouns(ids, &FIRST_PERSON_PRONOUNS),
            Axis::Users,
        ),
        Condition::SchemaResampled => (ids.to_vec(), Axis::Schemata),
    };
    if ids.is_empty() {
        // the condition removed every schema: inapplicable, rendered "/"
        return Ok(empty_cells());
    }
    let subset: SchemaSet = ids.iter().copied().collect();
    let (summary, _) =
        bootstrap_pair_with_values(depressed, random, &subset, stat, &cfg.bootstrap(axis))?;
    Ok(ConditionCells {
        median: summary.median,
        ci_low: summary.ci_low,
        ci_high: summary.ci_high,
        sig: sig_marker(&summary, null).to_string(),
        direction: (condition == Condition::All).then(|| direction_marker(&summary, null)),
        point: summary.point,
    })
}

/// Per-category table of a two-cohort statistic under the three conditions
/// (full set with user resampling, first-person-free subset, schema
/// resampling), with medians, 95% intervals and significance markers.
pub fn render_condition_table(
    lexicon: &Lexicon,
    depressed: &CohortMatches,
    random: &CohortMatches,
    stat: PairStatistic,
    cfg: &ReportConfig,
) -> Result<String, StatsError> {
    let stat_name = match stat {
        PairStatistic::PrevalenceRatio => "ratio",
        PairStatistic::PrevalenceDifferencePct => "difference_pct",
    };

    struct Row {
        name: String,
        direction: &'static str,
        point: Option<f64>,
        cells: [ConditionCells; 3],
    }

    let build = |name: String, ids: Vec<u16>| -> Result<Row, StatsError> {
        let all = condition_cells(depressed, random, lexicon, &ids, stat, Condition::All, cfg)?;
        let nofpp =
            condition_cells(depressed, random, lexicon, &ids, stat, Condition::NoFirstPerson, cfg)?;
        let resampled =
            condition_cells(depressed, random, lexicon, &ids, stat, Condition::SchemaResampled, cfg)?;
        Ok(Row {
            name,
            direction: all.direction.unwrap_or(SLASH),
            point: all.point,
            cells: [all, nofpp, resampled],
        })
    };

    let all_row = build("All".to_string(), lexicon.all_ids())?;
    let mut rows: Vec<Row> = Category::ALL
        .into_iter()
        .map(|c| build(c.name().to_string(), lexicon.ids_for_category(c)))
        .collect::<Result<_, _>>()?;
    rows.sort_by(|a, b| {
        let key = |r: &Row| r.cells[0].median.unwrap_or(f64::NEG_INFINITY);
        key(b).partial_cmp(&key(a)).unwrap().then(a.name.cmp(&b.name))
    });

    let mut out = String::new();
    writeln!(
        out,
        "category\tdirection\t{stat_name}_point\tall_median\tall_ci_low\tall_ci_high\tall_sig\t\
         nofpp_median\tnofpp_ci_low\tnofpp_ci_high\tnofpp_sig\t\
         resampled_median\tresampled_ci_low\tresampled_ci_high\tresampled_sig"
    )
    .unwrap();
    for row in std::iter::once(all_row).chain(rows) {
        write!(out, "{}\t{}\t{}", row.name, row.direction, fmt_opt(row.point, 3)).unwrap();
        for c in &row.cells {
            write!(
                out,
                "\t{}\t{}\t{}\t{}",
                fmt_opt(c.median, 3),
                fmt_opt(c.ci_low, 3),
                fmt_opt(c.ci_high, 3),
                c.sig
            )
            .unwrap();
        }
        out.push('\n');
    }
    Ok(out)
}

/// Ranked per-schema ratio table; unobserved schemata and zero-denominator
/// cases are flagged instead of estimated.
pub fn render_schema_ratios(
    lexicon: &Lexicon,
    depressed: &CohortMatches,
    random: &CohortMatches,
    cfg: &ReportConfig,
) -> Result<String, StatsError> {
    let rows = per_schema_prevalence_ratios(
        depressed,
        random,
        &lexicon.all_ids(),
        lexicon.len(),
        &cfg.bootstrap(Axis::Users),
    )?;
    let mut out = String::new();
    writeln!(
        out,
        "rank\tschema_id\tcategory\ttext\tn_depressed\tn_random\tstatus\tpoint\tmedian\tci_low\tci_high\tsig"
    )
    .unwrap();
    for (rank, row) in rows.iter().enumerate() {
        let schema = lexicon.schema(row.schema_id);
        let (status, point, median, lo, hi, sig) = match &row.result {
            SchemaRatio::Estimated(e) => (
                "estimated",
                e.point,
                e.median,
                e.ci_low,
                e.ci_high,
                sig_marker(e, 1.0).to_string(),
            ),
            SchemaRatio::UndefinedDenominator { prevalence_depressed } => (
                "undefined-denominator",
                Some(*prevalence_depressed),
                None,
                None,
                None,
                SLASH.to_string(),
            ),
            SchemaRatio::NotObserved => ("not-observed", None, None, None, None, SLASH.to_string()),
        };
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{status}\t{}\t{}\t{}\t{}\t{sig}",
            rank + 1,
            row.schema_id,
            schema.category.name(),
            schema.text,
            row.count_depressed,
            row.count_random,
            fmt_opt(point, 6),
            fmt_opt(median, 3),
            fmt_opt(lo, 3),
            fmt_opt(hi, 3),
        )
        .unwrap();
    }
    Ok(out)
}

fn prevalence_histogram(prevs: &[UserPrevalence], bin_width: f64) -> Vec<u64> {
    let n_bins = (1.0 / bin_width).ceil() as usize + 1;
    let mut bins = vec![0u64; n_bins];
    for p in prevs {
        let idx = ((p.prevalence() / bin_width) as usize).min(n_bins - 1);
        bins[idx] += 1;
    }
    bins
}

/// Plot data for the within-subject prevalence densities of both cohorts.
pub fn render_user_prevalence_hist(
    depressed: &[UserPrevalence],
    random: &[UserPrevalence],
    bin_width: f64,
) -> String {
    let (hd, hr) = (
        prevalence_histogram(depressed, bin_width),
        prevalence_histogram(random, bin_width),
    );
    let (nd, nr) = (depressed.len() as f64, random.len() as f64);
    let mut out = String::new();
    writeln!(
        out,
        "bin_low\tbin_high\tdepressed_count\tdepressed_density\trandom_count\trandom_density"
    )
    .unwrap();
    for i in 0..hd.len() {
        let lo = i as f64 * bin_width;
        writeln!(
            out,
            "{:.4}\t{:.4}\t{}\t{:.6}\t{}\t{:.6}",
            lo,
            lo + bin_width,
            hd[i],
            if nd > 0.0 { hd[i] as f64 / (nd * bin_width) } else { 0.0 },
            hr[i],
            if nr > 0.0 { hr[i] as f64 / (nr * bin_width) } else { 0.0 },
        )
        .unwrap();
    }
    out
}

/// One-line KS summary for the within-subject comparison.
pub fn render_ks_summary(ks: &KsResult, min_posts: u64) -> String {
    format!(
        "n_depressed\tn_random\tmin_posts\tstatistic\tp_value\n{}\t{}\t{}\t{:.6}\t{:.6e}\n",
        ks.n_a, ks.n_b, min_posts, ks.statistic, ks.p_value
    )
}

/// Histogram of bootstrap ratio replicates (density of the resampled
/// statistic for the full schema set).
pub fn render_ratio_bootstrap_hist(values: &[f64], bin_width: f64) -> String {
    let mut out = String::new();
    writeln!(out, "bin_low\tbin_high\tcount\tdensity").unwrap();
    if values.is_empty() {
        return out;
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first_bin = (min / bin_width).floor();
    let n_bins = ((max / bin_width).floor() - first_bin) as usize + 1;
    let mut bins = vec![0u64; n_bins];
    for &v in values {
        let idx = (((v / bin_width).floor() - first_bin) as usize).min(n_bins - 1);
        bins[idx] += 1;
    }
    let n = values.len() as f64;
    for (i, count) in bins.iter().enumerate() {
        let lo = (first_bin + i as f64) * bin_width;
        writeln!(
            out,
            "{:.4}\t{:.4}\t{}\t{:.6}",
            lo,
            lo + bin_width,
            count,
            *count as f64 / (n * bin_width)
        )
        .unwrap();
    }
    out
}

/// Threshold-sweep table: KS outcome per minimum-post threshold.
pub fn render_sweep(rows: &[(u64, KsResult)]) -> String {
    let mut out = String::new();
    writeln!(out, "min_posts\tn_depressed\tn_random\tstatistic\tp_value").unwrap();
    for (t, ks) in rows {
        writeln!(out, "{t}\t{}\t{}\t{:.6}\t{:.6e}", ks.n_a, ks.n_b, ks.statistic, ks.p_value)
            .unwrap();
    }
    out
}

/// Ingest accounting table.
pub fn render_ingest_stats(stats: &IngestStats) -> String {
    let mut out = String::new();
    writeln!(out, "metric\tcount").unwrap();
    writeln!(out, "files\t{}", stats.files).unwrap();
    writeln!(out, "lines\t{}", stats.lines).unwrap();
    writeln!(out, "malformed\t{}", stats.malformed).unwrap();
    writeln!(out, "duplicates\t{}", stats.duplicates).unwrap();
    writeln!(out, "truncated\t{}", stats.truncated).unwrap();
    writeln!(out, "posts\t{}", stats.posts).unwrap();
    for (reason, n) in ExclusionReason::ALL.iter().zip(stats.excluded) {
        writeln!(out, "excluded_{}\t{}", reason.label(), n).unwrap();
    }
    writeln!(out, "retained\t{}", stats.retained).unwrap();
    out
}

/// Emit the full report battery into `out_dir`.
pub fn write_full_report(
    out_dir: &Path,
    lexicon: &Lexicon,
    depressed: &CohortMatches,
    random: &CohortMatches,
    cfg: &ReportConfig,
) -> Result<Vec<String>, ReportError> {
    let all: SchemaSet = lexicon.all_ids().into_iter().collect();
    let mut written = Vec::new();
    let mut emit = |name: &str, body: String| -> Result<(), ReportError> {
        let content = format!("{}{body}", cfg.header(name));
        write_atomic(&out_dir.join(name), &content)
            .map_err(|e| ReportError::Io { file: name.to_string(), source: e })?;
        written.push(name.to_string());
        Ok(())
    };

    let counts_d = depressed.per_schema_counts(lexicon.len());
    let counts_r = random.per_schema_counts(lexicon.len());
    let observed: Vec<u64> = counts_d.iter().zip(&counts_r).map(|(a, b)| a + b).collect();

    emit("lexicon_stats.tsv", render_lexicon_stats(lexicon, Some(&observed)))?;
    emit("prevalence_by_category.tsv", render_prevalence_table(lexicon, depressed, random)?)?;
    emit(
        "ratio_by_category.tsv",
        render_condition_table(lexicon, depressed, random, PairStatistic::PrevalenceRatio, cfg)?,
    )?;
    emit(
        "difference_by_category.tsv",
        render_condition_table(
            lexicon,
            depressed,
            random,
            PairStatistic::PrevalenceDifferencePct,
            cfg,
        )?,
    )?;
    emit("schema_ratios.tsv", render_schema_ratios(lexicon, depressed, random, cfg)?)?;

    let prevs_d = within_subject_prevalences(depressed, &all, cfg.min_posts)?;
    let prevs_r = within_subject_prevalences(random, &all, cfg.min_posts)?;
    emit(
        "user_prevalence_hist.tsv",
        render_user_prevalence_hist(&prevs_d, &prevs_r, cfg.prevalence_bin_width),
    )?;
    if !prevs_d.is_empty() && !prevs_r.is_empty() {
        let dd: Vec<f64> = prevs_d.iter().map(UserPrevalence::prevalence).collect();
        let rr: Vec<f64> = prevs_r.iter().map(UserPrevalence::prevalence).collect();
        let ks = crate::stats::ks_two_sample(&dd, &rr)?;
        emit("within_subject_ks.tsv", render_ks_summary(&ks, cfg.min_posts))?;
    }

    let (_, values) = bootstrap_pair_with_values(
        depressed,
        random,
        &all,
        PairStatistic::PrevalenceRatio,
        &cfg.bootstrap(Axis::Users),
    )?;
    emit("ratio_bootstrap_hist.tsv", render_ratio_bootstrap_hist(&values, cfg.ratio_bin_width))?;

    Ok(written)
}

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("cannot write {file}: {source}")]
    Io { file: String, source: std::io::Error },
    #[error(transparent)]
    Stats(#[from] StatsError),
}
