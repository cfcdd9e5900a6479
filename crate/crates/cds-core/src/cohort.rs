//! Corpus ingestion, cohort assembly and manifest persistence.
//!
//! The corpus line format is one JSON object per line with keys `post_id`,
//! `user_id`, `created_at` (ISO-8601 UTC), `text`, `lang`, `is_retweet`.
//! A plain-text mode (one post per line) exists for testing.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::PathBuf;

use chrono::{DateTime, Utc};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use thiserror::Error;

use crate::textnorm::{
    apply_exclusions, detect_diagnosis_statement, normalize, ExclusionReason, Post,
};
use crate::util::fnv1a64;

#[derive(Debug, Error)]
pub enum CohortError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {malformed} of {lines} lines malformed (over the 10% limit)")]
    TooManyMalformed { path: PathBuf, malformed: u64, lines: u64 },
    #[error("candidate and reference user sets overlap ({example} appears in both)")]
    Overlap { example: String },
    #[error("reference user set is empty")]
    EmptyReference,
    #[error("manifest is malformed: {reason}")]
    BadManifest { reason: String },
}

#[derive(Debug, Deserialize)]
struct RawPostRecord {
    post_id: String,
    user_id: String,
    created_at: String,
    text: String,
    lang: String,
    is_retweet: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusFormat {
    JsonLines,
    PlainText,
}

#[derive(Debug, Clone)]
pub struct IngestOptions {
    pub format: CorpusFormat,
    /// Keep only the most recent k posts per user (the harvest cap).
    pub max_posts_per_user: Option<usize>,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions { format: CorpusFormat::JsonLines, max_posts_per_user: Some(3200) }
    }
}

/// Ingest accounting; per-reason exclusion counts plus retained posts always
/// sum to the posts kept after dedup/truncation.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestStats {
    pub files: usize,
    pub lines: u64,
    pub malformed: u64,
    pub duplicates: u64,
    pub truncated: u64,
    pub posts: u64,
    pub excluded: [u64; ExclusionReason::ALL.len()],
    pub retained: u64,
}

#[derive(Debug, Clone)]
pub struct UserPosts {
    pub user_id: String,
    /// Time-ordered (newest first), exclusion-marked; retained posts carry tokens.
    pub posts: Vec<Post>,
}

impl UserPosts {
    pub fn retained(&self) -> impl Iterator<Item = &Post> {
        self.posts.iter().filter(|p| p.is_retained())
    }
}

#[derive(Debug, Clone)]
pub struct IngestResult {
    /// Sorted by user id.
    pub users: Vec<UserPosts>,
    pub stats: IngestStats,
}

/// A user with account-level fields used for date-matched sampling. The
/// account creation date is approximated by the earliest observed post when
/// no explicit user table is supplied.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserRecord {
    pub user_id: String,
    pub account_created_at: DateTime<Utc>,
    pub post_count: u64,
}

fn parse_line(raw: &str) -> Option<Post> {
    let rec: RawPostRecord = serde_json::from_str(raw).ok()?;
    let created = DateTime::parse_from_rfc3339(&rec.created_at).ok()?.with_timezone(&Utc);
    Some(Post {
        post_id: rec.post_id,
        user_id: rec.user_id,
        created_at: created,
        raw_text: rec.text,
        lang: rec.lang,
        is_retweet: rec.is_retweet,
        tokens: None,
        excluded: None,
    })
}

/// Read, deduplicate, truncate, exclusion-mark and normalize a corpus,
/// grouped by user. Malformed lines are counted and skipped; a file that is
/// mostly malformed aborts the run.
pub fn ingest_corpus(paths: &[PathBuf], opts: &IngestOptions) -> Result<IngestResult, CohortError> {
    let mut stats = IngestStats { files: paths.len(), ..Default::default() };
    let mut by_user: BTreeMap<String, Vec<Post>> = BTreeMap::new();

    for path in paths {
        let file = File::open(path).map_err(|e| CohortError::Io { path: path.clone(), source: e })?;
        let reader = BufReader::new(file);
        let mut file_lines = 0u64;
        let mut file_malformed = 0u64;
        for (lineno, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| CohortError::Io {
                path: path.clone(),
                source: std::io::Error::new(e.kind(), format!("line {}: {e}", lineno + 1)),
            })?;
            if line.trim().is_empty() {
                continue;
            }
            file_lines += 1;
            let post = match opts.format {
                CorpusFormat::JsonLines => match parse_line(&line) {
                    Some(p) => p,
                    None => {
                        file_malformed += 1;
                        continue;
                    }
                },
                CorpusFormat::PlainText => {
                    let stem =
                        path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
                    Post {
                        post_id: format!("{stem}:{}", lineno + 1),
                        user_id: stem,
                        created_at: DateTime::<Utc>::UNIX_EPOCH,
                        raw_text: line,
                        lang: "en".into(),
                        is_retweet: false,
                        tokens: None,
                        excluded: None,
                    }
                }
            };
            by_user.entry(post.user_id.clone()).or_default().push(post);
        }
        stats.lines += file_lines;
        stats.malformed += file_malformed;
        if file_lines > 0 && file_malformed * 10 > file_lines {
            return Err(CohortError::TooManyMalformed {
                path: path.clone(),
                malformed: file_malformed,
                lines: file_lines,
            });
        }
    }

    let mut users = Vec::with_capacity(by_user.len());
    for (user_id, mut posts) in by_user {
        // newest first; id is the tie-breaker so ingestion is order-free
        posts.sort_by(|a, b| b.created_at.cmp(&a.created_at).then(b.post_id.cmp(&a.post_id)));
        let before = posts.len();
        let mut seen = std::collections::HashSet::new();
        posts.retain(|p| seen.insert(p.post_id.clone()));
        stats.duplicates += (before - posts.len()) as u64;
        if let Some(cap) = opts.max_posts_per_user {
            if posts.len() > cap {
                stats.truncated += (posts.len() - cap) as u64;
                posts.truncate(cap);
            }
        }
        apply_exclusions(&mut posts);
        for p in posts.iter_mut() {
            stats.posts += 1;
            match p.excluded {
                Some(reason) => {
                    stats.excluded[ExclusionReason::ALL.iter().position(|r| *r == reason).unwrap()] +=
                        1;
                }
                None => {
                    p.tokens = Some(normalize(&p.raw_text));
                    stats.retained += 1;
                }
            }
        }
        users.push(UserPosts { user_id, posts });
    }
    Ok(IngestResult { users, stats })
}

/// Account-level records derived from ingested posts.
pub fn user_records(result: &IngestResult) -> Vec<UserRecord> {
    result
        .users
        .iter()
        .map(|u| UserRecord {
            user_id: u.user_id.clone(),
            account_created_at: u
                .posts
                .iter()
                .map(|p| p.created_at)
                .min()
                .unwrap_or(DateTime::<Utc>::UNIX_EPOCH),
            post_count: u.retained().count() as u64,
        })
        .collect()
}

/// A user qualifying for the diagnosis-statement cohort, with the statements
/// that matched (for the human review file).
#[derive(Debug, Clone)]
pub struct DiagnosisCandidate {
    pub user_id: String,
    pub statements: Vec<(String, String)>,
}

/// Users with at least one English, non-retweet post containing a diagnosis
/// statement. The keyword exclusion is ignored here: it exists to drop these
/// very statements from analysis, not from selection.
pub fn select_depressed_users(result: &IngestResult) -> Vec<DiagnosisCandidate> {
    let mut out = Vec::new();
    for user in &result.users {
        let statements: Vec<(String, String)> = user
            .posts
            .iter()
            .filter(|p| {
                !matches!(p.excluded, Some(ExclusionReason::Retweet | ExclusionReason::NonEnglish))
            })
            .filter(|p| detect_diagnosis_statement(&p.raw_text))
            .map(|p| (p.post_id.clone(), p.raw_text.clone()))
            .collect();
        if !statements.is_empty() {
            out.push(DiagnosisCandidate { user_id: user.user_id.clone(), statements });
        }
    }
    out
}

type MonthKey = (i32, u32);

fn month_of(dt: DateTime<Utc>) -> MonthKey {
    use chrono::Datelike;
    (dt.year(), dt.month())
}

#[derive(Debug, Clone)]
pub struct BinOutcome {
    pub month: MonthKey,
    pub wanted: usize,
    pub taken: usize,
}

#[derive(Debug, Clone)]
pub struct DateMatchedSample {
    /// Selected user ids, sorted.
    pub selected: Vec<String>,
    pub bins: Vec<BinOutcome>,
    pub seed: u64,
}

impl DateMatchedSample {
    pub fn deficits(&self) -> impl Iterator<Item = &BinOutcome> {
        self.bins.iter().filter(|b| b.taken < b.wanted)
    }
}

/// Stratified sample of `target` candidates whose account-creation month
/// histogram is proportional to the reference cohort's. Bins short of
/// candidates contribute everything they have; the deficit is reported.
pub fn date_matched_sample(
    candidates: &[UserRecord],
    reference: &[UserRecord],
    target: usize,
    seed: u64,
) -> Result<DateMatchedSample, CohortError> {
    if reference.is_empty() {
        return Err(CohortError::EmptyReference);
    }
    let cand_ids: std::collections::HashSet<&str> =
        candidates.iter().map(|u| u.user_id.as_str()).collect();
    if let Some(shared) = reference.iter().find(|u| cand_ids.contains(u.user_id.as_str())) {
        return Err(CohortError::Overlap { example: shared.user_id.clone() });
    }

    let mut ref_counts: BTreeMap<MonthKey, usize> = BTreeMap::new();
    for u in reference {
        *ref_counts.entry(month_of(u.account_created_at)).or_insert(0) += 1;
    }
    let mut pools: BTreeMap<MonthKey, Vec<&UserRecord>> = BTreeMap::new();
    for u in candidates {
        pools.entry(month_of(u.account_created_at)).or_default().push(u);
    }

    // Largest-remainder apportionment of `target` across reference months.
    let ref_total: usize = ref_counts.values().sum();
    let mut quotas: Vec<(MonthKey, usize, f64)> = ref_counts
        .iter()
        .map(|(&m, &n)| {
            let exact = target as f64 * n as f64 / ref_total as f64;
            (m, exact.floor() as usize, exact - exact.floor())
        })
        .collect();
    let assigned: usize = quotas.iter().map(|q| q.1).sum();
    let mut order: Vec<usize> = (0..quotas.len()).collect();
    order.sort_by(|&a, &b| {
        quotas[b]
            .2
            .partial_cmp(&quotas[a].2)
            .unwrap()
            .then(quotas[a].0.cmp(&quotas[b].0))
    });
    for &i in order.iter().take(target.saturating_sub(assigned)) {
        quotas[i].1 += 1;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut selected = Vec::new();
    let mut bins = Vec::new();
    for (month, wanted, _) in quotas {
        let mut pool: Vec<&UserRecord> = pools.remove(&month).unwrap_or_default();
        pool.sort_by(|a, b| a.user_id.cmp(&b.user_id));
        pool.shuffle(&mut rng);
        let taken = wanted.min(pool.len());
        selected.extend(pool.iter().take(taken).map(|u| u.user_id.clone()));
        bins.push(BinOutcome { month, wanted, taken });
    }
    selected.sort();
    Ok(DateMatchedSample { selected, bins, seed })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CohortName {
    Depressed,
    Random,
}

impl CohortName {
    pub fn label(self) -> &'static str {
        match self {
            CohortName::Depressed => "depressed",
            CohortName::Random => "random",
        }
    }

    pub fn parse(s: &str) -> Option<CohortName> {
        match s.to_ascii_lowercase().as_str() {
            "depressed" => Some(CohortName::Depressed),
            "random" => Some(CohortName::Random),
            _ => None,
        }
    }
}

/// A named user set with filter provenance. The digest covers name, users,
/// counts and seed (not the wall-clock timestamp), so identical inputs and
/// seed reproduce identical user lists and digests.
#[derive(Debug, Clone)]
pub struct CohortManifest {
    pub name: CohortName,
    pub users: Vec<String>,
    pub exclusion_counts: Vec<(String, u64)>,
    pub created_at: String,
    pub seed: Option<u64>,
}

impl CohortManifest {
    pub fn new(
        name: CohortName,
        mut users: Vec<String>,
        exclusion_counts: Vec<(String, u64)>,
        seed: Option<u64>,
    ) -> CohortManifest {
        users.sort();
        users.dedup();
        CohortManifest {
            name,
            users,
            exclusion_counts,
            created_at: Utc::now().to_rfc3339(),
            seed,
        }
    }

    pub fn digest(&self) -> u64 {
        let mut content = String::new();
        content.push_str(self.name.label());
        if let Some(seed) = self.seed {
            content.push_str(&format!("|seed={seed}"));
        }
        for (reason, n) in &self.exclusion_counts {
            content.push_str(&format!("|{reason}={n}"));
        }
        for u in &self.users {
            content.push('\n');
            content.push_str(u);
        }
        fnv1a64(content.as_bytes())
    }

    /// Header lines plus one user per line.
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("#name\t{}\n", self.name.label()));
        out.push_str(&format!("#created\t{}\n", self.created_at));
        if let Some(seed) = self.seed {
            out.push_str(&format!("#seed\t{seed}\n"));
        }
        for (reason, n) in &self.exclusion_counts {
            out.push_str(&format!("#excluded\t{reason}\t{n}\n"));
        }
        out.push_str(&format!("#digest\t{:016x}\n", self.digest()));
        for u in &self.users {
            out.push_str(u);
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<CohortManifest, CohortError> {
        let mut name = None;
        let mut created_at = String::new();
        let mut seed = None;
        let mut exclusion_counts = Vec::new();
        let mut users = Vec::new();
        for line in text.lines() {
            if let Some(rest) = line.strip_prefix('#') {
                let fields: Vec<&str> = rest.split('\t').collect();
                match fields.as_slice() {
                    ["name", n] => {
                        name = Some(CohortName::parse(n).ok_or_else(|| CohortError::BadManifest {
                            reason: format!("unknown cohort name {n:?}"),
                        })?)
                    }
                    ["created", ts] => created_at = ts.to_string(),
                    ["seed", s] => {
                        seed = Some(s.parse().map_err(|_| CohortError::BadManifest {
                            reason: format!("bad seed {s:?}"),
                        })?)
                    }
                    ["excluded", reason, n] => exclusion_counts.push((
                        reason.to_string(),
                        n.parse().map_err(|_| CohortError::BadManifest {
                            reason: format!("bad count {n:?}"),
                        })?,
                    )),
                    ["digest", _] => {}
                    other => {
                        return Err(CohortError::BadManifest {
                            reason: format!("unknown header {other:?}"),
                        })
                    }
                }
            } else if !line.trim().is_empty() {
                users.push(line.to_string());
            }
        }
        let name = name.ok_or_else(|| CohortError::BadManifest { reason: "missing #name".into() })?;
        Ok(CohortManifest { name, users, exclusion_counts, created_at, seed })
    }
}

/// The two cohorts must never share a user.
pub fn check_disjoint(a: &CohortManifest, b: &CohortManifest) -> Result<(), CohortError> {
    let set: std::collections::HashSet<&str> = a.users.iter().map(String::as_str).collect();
    match b.users.iter().find(|u| set.contains(u.as_str())) {
        Some(shared) => Err(CohortError::Overlap { example: shared.clone() }),
        None => Ok(()),
    }
}
