//! Batch command-line front end: corpus ingestion, cohort assembly, schema
//! matching and the statistical report battery.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 on data errors.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use cds_core::cohort::{
    date_matched_sample, ingest_corpus, select_depressed_users, user_records,
    CohortManifest, CohortName, CorpusFormat, IngestOptions, IngestResult, UserRecord,
};
use cds_core::lexicon::{load_lexicon, Category, Lexicon, FIRST_PERSON_PRONOUNS};
use cds_core::matcher::{build_lexicon_index, match_corpus, SchemaSet};
use cds_core::report::{
    render_ingest_stats, render_ks_summary, render_lexicon_export,
    render_lexicon_stats, render_prevalence_table, render_ratio_bootstrap_hist,
    render_schema_ratios, render_sweep, render_user_prevalence_hist, write_full_report,
    ReportConfig,
};
use cds_core::stats::{
    bootstrap_pair_with_values, cohort_prevalence, ks_two_sample, prevalence_difference,
    prevalence_ratio, sentiment_distribution_compare, threshold_sweep, within_subject_prevalences,
    Axis, BootstrapConfig, PairStatistic, UserPrevalence,
};
use cds_core::util::write_atomic;
use cds_core::{cohort_matches, CohortMatches};

#[derive(Parser)]
#[command(
    name = "cds",
    version,
    about = "Cognitive-distortion schema analytics for short-text corpora",
    after_help = "Exit codes: 0 success, 1 usage error, 2 data error."
)]
struct Cli {
    /// Output directory for generated files
    #[arg(long, global = true, env = "CDS_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,

    /// Worker threads for matching and bootstrap; outputs are byte-identical
    /// for any value
    #[arg(long, global = true, default_value_t = 1)]
    workers: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    /// One JSON object per line (post_id, user_id, created_at, text, lang, is_retweet)
    #[default]
    Jsonl,
    /// One raw post text per line (testing mode)
    Text,
}

impl From<Format> for CorpusFormat {
    fn from(f: Format) -> CorpusFormat {
        match f {
            Format::Jsonl => CorpusFormat::JsonLines,
            Format::Text => CorpusFormat::PlainText,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AxisArg {
    Users,
    Schemata,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum StatArg {
    Ratio,
    Difference,
}

/// Options shared by every subcommand that compares the two cohorts.
#[derive(Args, Debug)]
struct CohortArgs {
    /// Depressed-cohort corpus files
    #[arg(long = "depressed", num_args = 1.., required = true)]
    depressed: Vec<PathBuf>,

    /// Random-sample corpus files
    #[arg(long = "random", num_args = 1.., required = true)]
    random: Vec<PathBuf>,

    /// Corpus file format
    #[arg(long, value_enum, default_value_t)]
    format: Format,

    /// Keep only the most recent N posts per user (0 = no cap)
    #[arg(long, default_value_t = 3200)]
    max_posts_per_user: u64,
}

/// Schema-subset selection shared by the estimator subcommands.
#[derive(Args, Debug)]
struct SubsetArgs {
    /// Restrict to one distortion category (default: all schemata)
    #[arg(long)]
    category: Option<String>,

    /// Drop schemata containing a first-person pronoun
    #[arg(long)]
    exclude_fpp: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect or export the embedded schema lexicon
    Lexicon {
        /// Write the per-category statistics table (lexicon_stats.tsv)
        #[arg(long)]
        stats: bool,
        /// Write the full lexicon as a delimited file (lexicon.tsv)
        #[arg(long)]
        export: bool,
    },

    /// Ingest corpus files; write per-user records and exclusion accounting
    Ingest {
        /// Corpus files
        #[arg(num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Keep only the most recent N posts per user (0 = no cap)
        #[arg(long, default_value_t = 3200)]
        max_posts_per_user: u64,
    },

    /// Select candidate users by diagnosis statement; write a review file
    Select {
        #[arg(num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },

    /// Draw a creation-date-matched user sample and write its manifest
    Sample {
        /// Candidate user table (user_id, account_created_at, post_count)
        #[arg(long)]
        candidates: PathBuf,
        /// Reference user table whose creation-date histogram is matched
        #[arg(long)]
        reference: PathBuf,
        /// Number of users to draw
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Manifest cohort name
        #[arg(long, default_value = "random")]
        name: String,
    },

    /// Match posts against all schemata; one line per retained post
    Match {
        #[arg(num_args = 1.., required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        /// Keep only the most recent N posts per user (0 = no cap)
        #[arg(long, default_value_t = 3200)]
        max_posts_per_user: u64,
    },

    /// Point prevalence, ratio and difference per category
    Prevalence {
        #[command(flatten)]
        cohorts: CohortArgs,
        #[command(flatten)]
        subset: SubsetArgs,
    },

    /// Bootstrap interval for the prevalence ratio or difference
    Bootstrap {
        #[command(flatten)]
        cohorts: CohortArgs,
        #[command(flatten)]
        subset: SubsetArgs,
        /// Resampling axis
        #[arg(long, value_enum, default_value_t = AxisArg::Users)]
        axis: AxisArg,
        /// Statistic to bootstrap
        #[arg(long, value_enum, default_value_t = StatArg::Ratio)]
        statistic: StatArg,
        #[arg(long, default_value_t = 10_000)]
        replicates: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// Within-subject prevalence distributions and their KS comparison
    Ks {
        #[command(flatten)]
        cohorts: CohortArgs,
        /// Minimum retained posts for a user to enter the distribution
        #[arg(long, default_value_t = 150)]
        min_posts: u64,
        /// Histogram bin width for the prevalence densities
        #[arg(long, default_value_t = 0.01)]
        bin_width: f64,
    },

    /// Ranked per-schema prevalence ratios with bootstrap intervals
    PerSchema {
        #[command(flatten)]
        cohorts: CohortArgs,
        #[arg(long, default_value_t = 10_000)]
        replicates: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },

    /// KS statistic across minimum-post thresholds
    Sweep {
        #[command(flatten)]
        cohorts: CohortArgs,
        /// Comma-separated ascending thresholds
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "25,50,75,100,150,200,250,300")]
        thresholds: Vec<u64>,
    },

    /// Compare externally computed sentiment score distributions
    Sentiment {
        /// Score file for side A (one score per line, or id<TAB>score)
        #[arg(long)]
        scores_a: Option<PathBuf>,
        /// Score file for side B
        #[arg(long)]
        scores_b: Option<PathBuf>,
        /// Per-schema score file; reports lexicon-level sentiment summary
        #[arg(long)]
        lexicon_scores: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        bin_width: f64,
    },

    /// Run the full report battery
    Report {
        /// Emit every report file
        #[arg(long, required = true)]
        all: bool,
        #[command(flatten)]
        cohorts: CohortArgs,
        #[arg(long, default_value_t = 10_000)]
        replicates: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 150)]
        min_posts: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

fn cap(max_posts_per_user: u64) -> Option<usize> {
    (max_posts_per_user > 0).then_some(max_posts_per_user as usize)
}

fn ingest(paths: &[PathBuf], format: Format, max_posts: u64) -> Result<IngestResult> {
    let opts = IngestOptions { format: format.into(), max_posts_per_user: cap(max_posts) };
    Ok(ingest_corpus(paths, &opts)?)
}

struct LoadedCohorts {
    lexicon: Lexicon,
    depressed: CohortMatches,
    random: CohortMatches,
}

fn load_cohorts(args: &CohortArgs) -> Result<LoadedCohorts> {
    let lexicon = load_lexicon()?;
    let index = build_lexicon_index(&lexicon)?;
    let depressed = cohort_matches(&index, &ingest(&args.depressed, args.format, args.max_posts_per_user)?);
    let random = cohort_matches(&index, &ingest(&args.random, args.format, args.max_posts_per_user)?);
    Ok(LoadedCohorts { lexicon, depressed, random })
}

/// Resolve the analysis subset: optional category filter, optional removal of
/// first-person-pronoun schemata.
fn resolve_subset(lexicon: &Lexicon, subset: &SubsetArgs) -> Result<(String, Vec<u16>)> {
    let (label, ids) = match &subset.category {
        Some(raw) => {
            let category = Category::parse(raw)
                .ok_or_else(|| anyhow!("unknown category {raw:?}; see `cds lexicon --stats`"))?;
            (category.name().to_string(), lexicon.ids_for_category(category))
        }
        None => ("All".to_string(), lexicon.all_ids()),
    };
    if subset.exclude_fpp {
        let ids = lexicon.ids_without_pronouns(&ids, &FIRST_PERSON_PRONOUNS);
        Ok((format!("{label} (no first-person)"), ids))
    } else {
        Ok((label, ids))
    }
}

fn write_report(out_dir: &Path, name: &str, header: &str, body: &str) -> Result<()> {
    std::fs::create_dir_all(out_dir)
        .with_context(|| format!("cannot create {}", out_dir.display()))?;
    let path = out_dir.join(name);
    write_atomic(&path, &format!("{header}{body}"))
        .with_context(|| format!("cannot write {}", path.display()))?;
    println!("wrote {}", path.display());
    Ok(())
}

fn header_for(subject: &str, fields: &[(&str, String)]) -> String {
    let mut out = format!("# report\t{subject}\n");
    for (k, v) in fields {
        writeln!(out, "# {k}\t{v}").unwrap();
    }
    out
}

fn parse_user_table(path: &Path) -> Result<Vec<UserRecord>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        if line.starts_with('#') || line.trim().is_empty() || line.starts_with("user_id\t") {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() < 2 {
            bail!("{}:{}: expected user_id<TAB>created_at[<TAB>post_count]", path.display(), no + 1);
        }
        let created = chrono::DateTime::parse_from_rfc3339(fields[1])
            .with_context(|| format!("{}:{}: bad timestamp {:?}", path.display(), no + 1, fields[1]))?;
        out.push(UserRecord {
            user_id: fields[0].to_string(),
            account_created_at: created.with_timezone(&chrono::Utc),
            post_count: fields.get(2).and_then(|f| f.parse().ok()).unwrap_or(0),
        });
    }
    Ok(out)
}

fn parse_scores(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let field = line.rsplit('\t').next().unwrap();
        let score: f64 = field
            .parse()
            .with_context(|| format!("{}:{}: bad score {field:?}", path.display(), no + 1))?;
        out.push(score);
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<()> {
    let out_dir = cli.out_dir.clone();
    let workers = cli.workers.max(1);
    match cli.command {
        Command::Lexicon { stats, export } => {
            let lexicon = load_lexicon()?;
            if !stats && !export {
                let s = cds_core::lexicon::lexicon_stats(lexicon.schemata());
                println!("{} schemata in {} categories", s.total.count, Category::COUNT);
                for row in &s.per_category {
                    println!("{:32} {:3}", row.category.unwrap().name(), row.count);
                }
                return Ok(());
            }
            let header = header_for("lexicon", &[]);
            if stats {
                write_report(&out_dir, "lexicon_stats.tsv", &header, &render_lexicon_stats(&lexicon, None))?;
            }
            if export {
                write_report(&out_dir, "lexicon.tsv", &header, &render_lexicon_export(&lexicon))?;
            }
        }

        Command::Ingest { inputs, format, max_posts_per_user } => {
            let result = ingest(&inputs, format, max_posts_per_user)?;
            let header = header_for(
                "ingest",
                &[("max_posts_per_user", max_posts_per_user.to_string())],
            );
            write_report(&out_dir, "ingest_stats.tsv", &header, &render_ingest_stats(&result.stats))?;
            let mut table = String::from("user_id\taccount_created_at\tpost_count\n");
            for u in user_records(&result) {
                writeln!(table, "{}\t{}\t{}", u.user_id, u.account_created_at.to_rfc3339(), u.post_count)
                    .unwrap();
            }
            write_report(&out_dir, "users.tsv", &header, &table)?;
        }

        Command::Select { inputs, format } => {
            let result = ingest(&inputs, format, 0)?;
            let candidates = select_depressed_users(&result);
            let header = header_for("select", &[]);
            let mut users = String::from("user_id\tn_statements\n");
            let mut review = String::from("user_id\tpost_id\ttext\n");
            for c in &candidates {
                writeln!(users, "{}\t{}", c.user_id, c.statements.len()).unwrap();
                for (post_id, text) in &c.statements {
                    writeln!(review, "{}\t{}\t{}", c.user_id, post_id, text.replace('\t', " ")).unwrap();
                }
            }
            write_report(&out_dir, "candidates.tsv", &header, &users)?;
            write_report(&out_dir, "diagnosis_statements.tsv", &header, &review)?;
        }

        Command::Sample { candidates, reference, size, seed, name } => {
            let name = CohortName::parse(&name)
                .ok_or_else(|| anyhow!("cohort name must be 'depressed' or 'random', got {name:?}"))?;
            let cand = parse_user_table(&candidates)?;
            let refr = parse_user_table(&reference)?;
            let sample = date_matched_sample(&cand, &refr, size, seed)?;
            for b in sample.deficits() {
                eprintln!(
                    "deficit: {:04}-{:02} wanted {} candidates, only {} available",
                    b.month.0, b.month.1, b.wanted, b.taken
                );
            }
            let manifest = CohortManifest::new(name, sample.selected.clone(), Vec::new(), Some(seed));
            std::fs::create_dir_all(&out_dir)?;
            let path = out_dir.join(format!("cohort_{}.manifest", name.label()));
            write_atomic(&path, &manifest.render())?;
            println!("wrote {} ({} users, digest {:016x})", path.display(), manifest.users.len(), manifest.digest());
        }

        Command::Match { inputs, format, max_posts_per_user } => {
            let lexicon = load_lexicon()?;
            let index = build_lexicon_index(&lexicon)?;
            let result = ingest(&inputs, format, max_posts_per_user)?;
            let mut out = String::from("post_id\tf_c\tmatched_schema_ids\n");
            for user in &result.users {
                let records = match_corpus(&index, &user.posts, workers);
                for r in records {
                    let ids: Vec<String> = r.matched.iter().map(|id| id.to_string()).collect();
                    writeln!(out, "{}\t{}\t{}", r.post_id, r.f_c() as u8, ids.join(",")).unwrap();
                }
            }
            write_report(&out_dir, "matches.tsv", &header_for("match", &[]), &out)?;
        }

        Command::Prevalence { cohorts, subset } => {
            let loaded = load_cohorts(&cohorts)?;
            let (label, ids) = resolve_subset(&loaded.lexicon, &subset)?;
            let sel: SchemaSet = ids.iter().copied().collect();
            let header = header_for("prevalence", &[("subset", label.clone())]);
            let mut out = String::from(
                "subset\tn_schemata\tprevalence_depressed_pct\tprevalence_random_pct\tratio\tdifference_pct\n",
            );
            let p_d = cohort_prevalence(&loaded.depressed, &sel)? * 100.0;
            let p_r = cohort_prevalence(&loaded.random, &sel)? * 100.0;
            let ratio = prevalence_ratio(&loaded.depressed, &loaded.random, &sel)?
                .map_or("/".to_string(), |v| format!("{v:.3}"));
            let diff = prevalence_difference(&loaded.depressed, &loaded.random, &sel)?;
            writeln!(out, "{label}\t{}\t{p_d:.3}\t{p_r:.3}\t{ratio}\t{diff:.3}", ids.len()).unwrap();
            write_report(&out_dir, "prevalence_summary.tsv", &header, &out)?;
            if subset.category.is_none() && !subset.exclude_fpp {
                write_report(
                    &out_dir,
                    "prevalence_by_category.tsv",
                    &header,
                    &render_prevalence_table(&loaded.lexicon, &loaded.depressed, &loaded.random)?,
                )?;
            }
        }

        Command::Bootstrap { cohorts, subset, axis, statistic, replicates, seed } => {
            let loaded = load_cohorts(&cohorts)?;
            let (label, ids) = resolve_subset(&loaded.lexicon, &subset)?;
            let sel: SchemaSet = ids.iter().copied().collect();
            let axis = match axis {
                AxisArg::Users => Axis::Users,
                AxisArg::Schemata => Axis::Schemata,
            };
            let stat = match statistic {
                StatArg::Ratio => PairStatistic::PrevalenceRatio,
                StatArg::Difference => PairStatistic::PrevalenceDifferencePct,
            };
            let cfg = BootstrapConfig { replicates, axis, seed, workers };
            let (summary, values) =
                bootstrap_pair_with_values(&loaded.depressed, &loaded.random, &sel, stat, &cfg)?;
            let null = match stat {
                PairStatistic::PrevalenceRatio => 1.0,
                PairStatistic::PrevalenceDifferencePct => 0.0,
            };
            let fmt = |v: Option<f64>| v.map_or("/".to_string(), |x| format!("{x:.6}"));
            let header = header_for(
                "bootstrap",
                &[
                    ("subset", label.clone()),
                    ("axis", axis.label().to_string()),
                    ("replicates", replicates.to_string()),
                    ("seed", seed.to_string()),
                ],
            );
            let mut out = String::from(
                "subset\tstatistic\taxis\tpoint\tmedian\tci_low\tci_high\treplicates\teffective_replicates\tseed\tunreliable\tsignificant\n",
            );
            writeln!(
                out,
                "{label}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                match stat {
                    PairStatistic::PrevalenceRatio => "ratio",
                    PairStatistic::PrevalenceDifferencePct => "difference_pct",
                },
                axis.label(),
                fmt(summary.point),
                fmt(summary.median),
                fmt(summary.ci_low),
                fmt(summary.ci_high),
                summary.replicates,
                summary.effective_replicates,
                summary.seed,
                summary.unreliable() as u8,
                summary.excludes(null).map_or("/".to_string(), |b| (b as u8).to_string()),
            )
            .unwrap();
            write_report(&out_dir, "bootstrap.tsv", &header, &out)?;
            write_report(
                &out_dir,
                "bootstrap_hist.tsv",
                &header,
                &render_ratio_bootstrap_hist(&values, 0.01),
            )?;
        }

        Command::Ks { cohorts, min_posts, bin_width } => {
            let loaded = load_cohorts(&cohorts)?;
            let all: SchemaSet = loaded.lexicon.all_ids().into_iter().collect();
            let prevs_d = within_subject_prevalences(&loaded.depressed, &all, min_posts)?;
            let prevs_r = within_subject_prevalences(&loaded.random, &all, min_posts)?;
            if prevs_d.is_empty() || prevs_r.is_empty() {
                bail!("no users reach the {min_posts}-post threshold in at least one cohort");
            }
            let dd: Vec<f64> = prevs_d.iter().map(UserPrevalence::prevalence).collect();
            let rr: Vec<f64> = prevs_r.iter().map(UserPrevalence::prevalence).collect();
            let ks = ks_two_sample(&dd, &rr)?;
            let header = header_for("ks", &[("min_posts", min_posts.to_string())]);
            write_report(&out_dir, "within_subject_ks.tsv", &header, &render_ks_summary(&ks, min_posts))?;
            write_report(
                &out_dir,
                "user_prevalence_hist.tsv",
                &header,
                &render_user_prevalence_hist(&prevs_d, &prevs_r, bin_width),
            )?;
        }

        Command::PerSchema { cohorts, replicates, seed } => {
            let loaded = load_cohorts(&cohorts)?;
            let cfg = ReportConfig {
                seed,
                replicates,
                workers,
                ..Default::default()
            };
            let header = header_for(
                "per-schema",
                &[("replicates", replicates.to_string()), ("seed", seed.to_string())],
            );
            write_report(
                &out_dir,
                "schema_ratios.tsv",
                &header,
                &render_schema_ratios(&loaded.lexicon, &loaded.depressed, &loaded.random, &cfg)?,
            )?;
        }

        Command::Sweep { cohorts, thresholds } => {
            let loaded = load_cohorts(&cohorts)?;
            let all: SchemaSet = loaded.lexicon.all_ids().into_iter().collect();
            let rows = threshold_sweep(&loaded.depressed, &loaded.random, &all, &thresholds)?;
            let header = header_for(
                "sweep",
                &[(
                    "thresholds",
                    thresholds.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(","),
                )],
            );
            write_report(&out_dir, "sweep.tsv", &header, &render_sweep(&rows))?;
        }

        Command::Sentiment { scores_a, scores_b, lexicon_scores, bin_width } => {
            let mut wrote = false;
            if let Some(path) = &lexicon_scores {
                let scores = parse_scores(path)?;
                let n = scores.len();
                let mean = scores.iter().sum::<f64>() / n.max(1) as f64;
                let zero = scores.iter().filter(|s| **s == 0.0).count() as f64 / n.max(1) as f64;
                let header = header_for("sentiment-lexicon", &[("bin_width", bin_width.to_string())]);
                let out = format!(
                    "n\tmean\tzero_fraction\n{n}\t{mean:.6}\t{zero:.6}\n"
                );
                write_report(&out_dir, "sentiment_lexicon.tsv", &header, &out)?;
                wrote = true;
            }
            if let (Some(a), Some(b)) = (&scores_a, &scores_b) {
                let sa = parse_scores(a)?;
                let sb = parse_scores(b)?;
                let cmp = sentiment_distribution_compare(&sa, &sb, bin_width)?;
                let header = header_for("sentiment", &[("bin_width", bin_width.to_string())]);
                let mut hist = String::from(
                    "bin_low\tbin_high\tcount_a\tdensity_a\tcount_b\tdensity_b\n",
                );
                for i in 0..cmp.histogram_a.counts.len() {
                    writeln!(
                        hist,
                        "{:.4}\t{:.4}\t{}\t{:.6}\t{}\t{:.6}",
                        cmp.histogram_a.bin_low(i),
                        cmp.histogram_a.bin_low(i) + bin_width,
                        cmp.histogram_a.counts[i],
                        cmp.histogram_a.density(i),
                        cmp.histogram_b.counts[i],
                        cmp.histogram_b.density(i),
                    )
                    .unwrap();
                }
                let summary = format!(
                    "n_a\tn_b\tmean_a\tmean_b\tzero_fraction_a\tzero_fraction_b\tstatistic\tp_value\n\
                     {}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6e}\n",
                    cmp.ks.n_a,
                    cmp.ks.n_b,
                    cmp.mean_a,
                    cmp.mean_b,
                    cmp.zero_fraction_a,
                    cmp.zero_fraction_b,
                    cmp.ks.statistic,
                    cmp.ks.p_value,
                );
                write_report(&out_dir, "sentiment_hist.tsv", &header, &hist)?;
                write_report(&out_dir, "sentiment_summary.tsv", &header, &summary)?;
                wrote = true;
            }
            if !wrote {
                bail!("pass --scores-a with --scores-b, and/or --lexicon-scores");
            }
        }

        Command::Report { all: _, cohorts, replicates, seed, min_posts } => {
            let loaded = load_cohorts(&cohorts)?;
            std::fs::create_dir_all(&out_dir)
                .with_context(|| format!("cannot create {}", out_dir.display()))?;
            let cfg = ReportConfig {
                seed,
                replicates,
                min_posts,
                workers,
                ..Default::default()
            };
            let written = write_full_report(
                &out_dir,
                &loaded.lexicon,
                &loaded.depressed,
                &loaded.random,
                &cfg,
            )?;
            for name in written {
                println!("wrote {}", out_dir.join(name).display());
            }
        }
    }
    Ok(())
}
