//! Synthetic corpus generation for tests, benchmarks and demos.
//!
//! Filler tokens are drawn from a vocabulary guaranteed to be disjoint from
//! the pattern-token alphabet, and planted schemata are always separated by
//! at least one filler token, so a generated post matches a category if and
//! only if a schema of that category was planted into it.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::lexicon::{Category, Lexicon};
use crate::matcher::PatternIndex;

/// Filler tokens outside the pattern alphabet.
pub fn filler_vocab(n: usize, index: &PatternIndex) -> Vec<String> {
    let mut out = Vec::with_capacity(n);
    let mut k = 0usize;
    while out.len() < n {
        let tok = format!("w{k:03}");
        if !index.contains_token(&tok) {
            out.push(tok);
        }
        k += 1;
    }
    out
}

/// Schemata safe to plant: they contain no *other* schema as a contiguous
/// subsequence, so planting one cannot raise another category's count.
/// Grouped by category; every category has at least one.
pub fn plant_safe_ids(lexicon: &Lexicon) -> Vec<Vec<u16>> {
    let mut by_category = vec![Vec::new(); Category::COUNT];
    for s in lexicon.schemata() {
        let nested = lexicon.schemata().iter().any(|other| {
            other.id != s.id
                && other.len() <= s.len()
                && s.tokens.windows(other.len()).any(|w| w == other.tokens.as_slice())
        });
        if !nested {
            by_category[s.category.index()].push(s.id);
        }
    }
    by_category
}

/// Per-category planting quotas for one cohort.
#[derive(Debug, Clone)]
pub struct QuotaPlan {
    pub users: usize,
    pub posts_per_user: usize,
    /// Posts planted with (hence matching) each category.
    pub planted: [u64; Category::COUNT],
}

impl QuotaPlan {
    pub fn total_posts(&self) -> u64 {
        (self.users * self.posts_per_user) as u64
    }

    /// Realized planted rate for a category.
    pub fn rate(&self, category: Category) -> f64 {
        self.planted[category.index()] as f64 / self.total_posts() as f64
    }
}

/// Generate a cohort as corpus lines (JSON per line) with exact per-category
/// match quotas: `round(rate * total_posts)` distinct posts carry a schema of
/// each category. Returns the lines and the realized plan.
pub fn quota_corpus_lines(
    lexicon: &Lexicon,
    index: &PatternIndex,
    cohort: &str,
    users: usize,
    posts_per_user: usize,
    rates: &[f64; Category::COUNT],
    seed: u64,
) -> (Vec<String>, QuotaPlan) {
    let total = users * posts_per_user;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filler = filler_vocab(400, index);
    let safe = plant_safe_ids(lexicon);

    // plants[post] = schema ids planted into that post
    let mut plants: Vec<Vec<u16>> = vec![Vec::new(); total];
    let mut planted = [0u64; Category::COUNT];
    let mut slots: Vec<u32> = (0..total as u32).collect();
    for (ci, &rate) in rates.iter().enumerate() {
        let quota = ((rate * total as f64).round() as usize).min(total);
        planted[ci] = quota as u64;
        slots.shuffle(&mut rng);
        for &slot in slots.iter().take(quota) {
            let pool = &safe[ci];
            plants[slot as usize].push(pool[rng.random_range(0..pool.len())]);
        }
    }

    let mut lines = Vec::with_capacity(total);
    for (post_idx, planted_ids) in plants.iter().enumerate() {
        let user = post_idx / posts_per_user;
        let mut words: Vec<&str> = Vec::new();
        let n_filler = rng.random_range(12..=24usize).max(planted_ids.len() + 1);
        for _ in 0..n_filler {
            words.push(&filler[rng.random_range(0..filler.len())]);
        }
        // Insert plants at distinct filler boundaries so no two are adjacent.
        let mut boundaries: Vec<usize> = (0..n_filler).collect();
        boundaries.shuffle(&mut rng);
        let mut insertions: Vec<(usize, u16)> = boundaries
            .into_iter()
            .take(planted_ids.len())
            .zip(planted_ids.iter().copied())
            .collect();
        insertions.sort_by_key(|(b, _)| std::cmp::Reverse(*b));
        let mut text_words: Vec<String> = words.iter().map(|w| w.to_string()).collect();
        for (boundary, id) in insertions {
            text_words.insert(boundary, lexicon.schema(id).text.to_string());
        }
        let minute = post_idx % 60;
        let hour = (post_idx / 60) % 24;
        let day = (post_idx / (60 * 24)) % 27 + 1;
        lines.push(
            serde_json::json!({
                "post_id": format!("{cohort}-p{post_idx:07}"),
                "user_id": format!("{cohort}-u{user:05}"),
                "created_at": format!("2017-{:02}-{day:02}T{hour:02}:{minute:02}:00Z", post_idx % 12 + 1),
                "text": text_words.join(" "),
                "lang": "en",
                "is_retweet": false,
            })
            .to_string(),
        );
    }
    (
        lines,
        QuotaPlan { users, posts_per_user, planted },
    )
}

/// Pre-normalized post texts for throughput runs: `n_posts` space-joined
/// token strings averaging `mean_tokens` tokens, a `match_rate` share of
/// which carry one schema.
pub fn throughput_texts(
    lexicon: &Lexicon,
    index: &PatternIndex,
    n_posts: usize,
    mean_tokens: usize,
    match_rate: f64,
    seed: u64,
) -> Vec<String> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let filler = filler_vocab(500, index);
    let spread = mean_tokens / 3;
    let mut out = Vec::with_capacity(n_posts);
    for _ in 0..n_posts {
        let n = rng.random_range(mean_tokens - spread..=mean_tokens + spread);
        let mut words: Vec<&str> = (0..n).map(|_| filler[rng.random_range(0..filler.len())].as_str()).collect();
        if rng.random_bool(match_rate) {
            let schema = &lexicon.schemata()[rng.random_range(0..lexicon.len())];
            let at = rng.random_range(0..=words.len());
            for (k, tok) in schema.tokens.iter().enumerate() {
                words.insert(at + k, tok);
            }
        }
        out.push(words.join(" "));
    }
    out
}

/// Random token sequences over a vocabulary seeded with schema fragments:
/// single schema tokens, filler, and occasional whole-schema splices. Used to
/// drive matcher-vs-oracle equivalence checks.
pub fn fragment_tokens(lexicon: &Lexicon, index: &PatternIndex, rng: &mut ChaCha8Rng) -> Vec<String> {
    let filler = filler_vocab(50, index);
    let n = rng.random_range(0..40usize);
    let mut tokens: Vec<String> = Vec::with_capacity(n + 5);
    for _ in 0..n {
        match rng.random_range(0..10u8) {
            // whole schema spliced in
            0 => {
                let s = &lexicon.schemata()[rng.random_range(0..lexicon.len())];
                tokens.extend(s.tokens.iter().cloned());
            }
            // single token drawn from a random schema
            1..=6 => {
                let s = &lexicon.schemata()[rng.random_range(0..lexicon.len())];
                tokens.push(s.tokens[rng.random_range(0..s.tokens.len())].clone());
            }
            _ => tokens.push(filler[rng.random_range(0..filler.len())].clone()),
        }
    }
    tokens
}
