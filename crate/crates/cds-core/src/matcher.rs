//! Simultaneous matching of all schema token sequences against post token
//! sequences: one pass per post, all overlapping occurrences reported, each
//! schema at most once per post.
//!
//! Patterns are contiguous token subsequences, never character substrings:
//! token boundaries are authoritative, and 1-gram schemata match standalone
//! tokens only. The automaton is a token-level Aho–Corasick with a dense
//! goto table over the pattern-token alphabet; tokens outside that alphabet
//! reset the scan to the root.

use std::collections::HashMap;

use thiserror::Error;

use crate::lexicon::{Category, Lexicon, Schema};
use crate::textnorm::Post;

/// Fixed-width bitset over schema ids (up to 256).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SchemaSet([u64; 4]);

impl SchemaSet {
    pub const EMPTY: SchemaSet = SchemaSet([0; 4]);

    pub fn insert(&mut self, id: u16) {
        self.0[(id / 64) as usize] |= 1u64 << (id % 64);
    }

    pub fn contains(&self, id: u16) -> bool {
        self.0[(id / 64) as usize] & (1u64 << (id % 64)) != 0
    }

    pub fn intersects(&self, other: &SchemaSet) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| a & b != 0)
    }

    pub fn union(&self, other: &SchemaSet) -> SchemaSet {
        let mut out = [0u64; 4];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *o = a | b;
        }
        SchemaSet(out)
    }

    pub fn intersection(&self, other: &SchemaSet) -> SchemaSet {
        let mut out = [0u64; 4];
        for (o, (a, b)) in out.iter_mut().zip(self.0.iter().zip(&other.0)) {
            *o = a & b;
        }
        SchemaSet(out)
    }

    pub fn is_empty(&self) -> bool {
        self.0.iter().all(|w| *w == 0)
    }

    pub fn len(&self) -> usize {
        self.0.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_subset_of(&self, other: &SchemaSet) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }

    /// Ids in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = u16> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &bits)| {
            (0..64u16)
                .filter(move |b| bits & (1u64 << b) != 0)
                .map(move |b| w as u16 * 64 + b)
        })
    }
}

impl FromIterator<u16> for SchemaSet {
    fn from_iter<I: IntoIterator<Item = u16>>(iter: I) -> Self {
        let mut set = SchemaSet::EMPTY;
        for id in iter {
            set.insert(id);
        }
        set
    }
}

/// Per-post match outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchRecord {
    pub post_id: String,
    pub matched: SchemaSet,
}

impl MatchRecord {
    /// The binary indicator: 1 iff any schema matched.
    pub fn f_c(&self) -> bool {
        !self.matched.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum MatcherError {
    #[error("identical pattern {tokens:?} appears twice in category {category}")]
    DuplicatePattern { category: &'static str, tokens: String },
}

const ROOT: u32 = 0;

/// Immutable multi-pattern index over schema token sequences.
#[derive(Debug, Clone)]
pub struct PatternIndex {
    /// Pattern-token alphabet: token -> dense symbol.
    vocab: HashMap<String, u16>,
    /// Dense goto-with-failure table, `states x alphabet`.
    next: Vec<u32>,
    alphabet: usize,
    /// Patterns recognized when a state is reached (failure chain flattened).
    outputs: Vec<Vec<u16>>,
    /// Patterns ending exactly at a state; used for reconstruction.
    terminal: Vec<Vec<u16>>,
    /// Build-time trie edges, kept for round-trip checks.
    children: Vec<Vec<(u16, u32)>>,
    /// (schema id, category) per pattern, in schema-id order.
    patterns: Vec<(u16, Category)>,
    category_sets: [SchemaSet; Category::COUNT],
}

impl PatternIndex {
    pub fn pattern_count(&self) -> usize {
        self.patterns.len()
    }

    /// Whether a token belongs to the pattern alphabet.
    pub fn contains_token(&self, token: &str) -> bool {
        self.vocab.contains_key(token)
    }

    /// All schema ids in the index as a set.
    pub fn id_set(&self) -> SchemaSet {
        self.patterns.iter().map(|(id, _)| *id).collect()
    }

    /// Ids of all schemata of one category.
    pub fn category_set(&self, category: Category) -> SchemaSet {
        self.category_sets[category.index()]
    }

    /// Category flags for a match set, in canonical category order.
    pub fn category_flags(&self, matched: &SchemaSet) -> [bool; Category::COUNT] {
        let mut flags = [false; Category::COUNT];
        for (i, set) in self.category_sets.iter().enumerate() {
            flags[i] = set.intersects(matched);
        }
        flags
    }

    /// Reconstruct the stored token sequences by walking the trie.
    /// Returns (tokens, schema id) pairs sorted by id.
    pub fn reconstruct_patterns(&self) -> Vec<(Vec<String>, u16)> {
        let mut sym_to_tok: Vec<&str> = vec![""; self.vocab.len()];
        for (tok, &sym) in &self.vocab {
            sym_to_tok[sym as usize] = tok;
        }
        let mut out = Vec::with_capacity(self.patterns.len());
        let mut stack: Vec<(u32, Vec<String>)> = vec![(ROOT, Vec::new())];
        while let Some((state, prefix)) = stack.pop() {
            for &id in &self.terminal[state as usize] {
                out.push((prefix.clone(), id));
            }
            for &(sym, child) in &self.children[state as usize] {
                let mut next_prefix = prefix.clone();
                next_prefix.push(sym_to_tok[sym as usize].to_string());
                stack.push((child, next_prefix));
            }
        }
        out.sort_by_key(|(_, id)| *id);
        out
    }

    /// Scan one token sequence; every matching schema is reported once.
    pub fn match_tokens<'a, I>(&self, tokens: I) -> SchemaSet
    where
        I: IntoIterator<Item = &'a str>,
    {
        let mut matched = SchemaSet::EMPTY;
        let mut state = ROOT;
        for token in tokens {
            state = match self.vocab.get(token) {
                Some(&sym) => self.next[state as usize * self.alphabet + sym as usize],
                None => ROOT,
            };
            for &pat in &self.outputs[state as usize] {
                matched.insert(self.patterns[pat as usize].0);
            }
        }
        matched
    }

    /// Match a normalized post. Posts without tokens match nothing.
    pub fn match_post(&self, post: &Post) -> MatchRecord {
        let matched = match &post.tokens {
            Some(tokens) => self.match_tokens(tokens.iter().map(String::as_str)),
            None => SchemaSet::EMPTY,
        };
        MatchRecord {
            post_id: post.post_id.clone(),
            matched,
        }
    }
}

/// Build the index over the given schemata.
///
/// Near-duplicate patterns across categories are fine; an identical
/// (tokens, category) pair is lexicon corruption and is rejected.
pub fn build_index(schemata: &[Schema]) -> Result<PatternIndex, MatcherError> {
    let mut seen: HashMap<(&[String], Category), ()> = HashMap::new();
    for s in schemata {
        if seen.insert((s.tokens.as_slice(), s.category), ()).is_some() {
            return Err(MatcherError::DuplicatePattern {
                category: s.category.name(),
                tokens: s.tokens.join(" "),
            });
        }
    }

    let mut vocab: HashMap<String, u16> = HashMap::new();
    for s in schemata {
        for t in &s.tokens {
            let next_sym = vocab.len() as u16;
            vocab.entry(t.clone()).or_insert(next_sym);
        }
    }
    let alphabet = vocab.len();

    // Trie construction.
    let mut children: Vec<Vec<(u16, u32)>> = vec![Vec::new()];
    let mut terminal: Vec<Vec<u16>> = vec![Vec::new()];
    let mut patterns = Vec::with_capacity(schemata.len());
    let mut category_sets = [SchemaSet::EMPTY; Category::COUNT];
    for (pat_idx, s) in schemata.iter().enumerate() {
        let mut state = ROOT;
        for tok in &s.tokens {
            let sym = vocab[tok];
            state = match children[state as usize].iter().find(|(sy, _)| *sy == sym) {
                Some(&(_, child)) => child,
                None => {
                    let child = children.len() as u32;
                    children.push(Vec::new());
                    terminal.push(Vec::new());
                    children[state as usize].push((sym, child));
                    child
                }
            };
        }
        terminal[state as usize].push(pat_idx as u16);
        patterns.push((s.id, s.category));
        category_sets[s.category.index()].insert(s.id);
    }

    // Breadth-first failure links, with outputs flattened along them and the
    // goto function collapsed into a dense table.
    let n_states = children.len();
    let mut fail = vec![ROOT; n_states];
    let mut outputs: Vec<Vec<u16>> = terminal.clone();
    let mut next = vec![ROOT; n_states * alphabet];

    let mut queue = std::collections::VecDeque::new();
    for &(sym, child) in &children[ROOT as usize] {
        next[ROOT as usize * alphabet + sym as usize] = child;
        queue.push_back(child);
    }
    while let Some(state) = queue.pop_front() {
        let f = fail[state as usize];
        let inherited: Vec<u16> = outputs[f as usize].clone();
        outputs[state as usize].extend(inherited);
        for &(sym, child) in &children[state as usize].clone() {
            fail[child as usize] = next[f as usize * alphabet + sym as usize];
            queue.push_back(child);
        }
        for sym in 0..alphabet {
            let slot = state as usize * alphabet + sym;
            next[slot] = match children[state as usize].iter().find(|(sy, _)| *sy as usize == sym)
            {
                Some(&(_, child)) => child,
                None => next[f as usize * alphabet + sym],
            };
        }
    }

    Ok(PatternIndex {
        vocab,
        next,
        alphabet,
        outputs,
        terminal,
        children,
        patterns,
        category_sets,
    })
}

/// Convenience: index over the full lexicon.
pub fn build_lexicon_index(lexicon: &Lexicon) -> Result<PatternIndex, MatcherError> {
    build_index(lexicon.schemata())
}

/// Match every retained post, order-preserving. `workers` only partitions the
/// scan; output is identical for any worker count.
pub fn match_corpus(index: &PatternIndex, posts: &[Post], workers: usize) -> Vec<MatchRecord> {
    let retained: Vec<&Post> = posts.iter().filter(|p| p.is_retained()).collect();
    let workers = workers.max(1).min(retained.len().max(1));
    if workers == 1 {
        return retained.iter().map(|p| index.match_post(p)).collect();
    }
    let chunk = retained.len().div_ceil(workers);
    let mut out = Vec::with_capacity(retained.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = retained
            .chunks(chunk)
            .map(|part| scope.spawn(move || part.iter().map(|p| index.match_post(p)).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            out.extend(h.join().expect("matcher worker panicked"));
        }
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lexicon::load_lexicon;
    use crate::textnorm::normalize;

    fn match_text(index: &PatternIndex, text: &str) -> Vec<&'static str> {
        let lex = load_lexicon().unwrap();
        let tokens = normalize(text);
        index
            .match_tokens(tokens.iter().map(String::as_str))
            .iter()
            .map(|id| lex.schema(id).text)
            .collect()
    }

    #[test]
    fn builds_full_lexicon_index() {
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();
        assert_eq!(index.pattern_count(), 241);
        assert_eq!(index.id_set().len(), 241);
    }

    #[test]
    fn empty_and_tiny_indexes() {
        let index = build_index(&[]).unwrap();
        assert_eq!(index.pattern_count(), 0);
        assert!(index.match_tokens(["anything", "at", "all"]).is_empty());

        let lex = load_lexicon().unwrap();
        let two: Vec<_> = lex
            .schemata()
            .iter()
            .filter(|s| s.text == "no one" || s.text == "nobody")
            .cloned()
            .collect();
        let index = build_index(&two).unwrap();
        assert_eq!(index.pattern_count(), 2);
    }

    #[test]
    fn duplicate_tokens_same_category_rejected() {
        let lex = load_lexicon().unwrap();
        let schema = lex.schemata()[0].clone();
        let mut dup = schema.clone();
        dup.id = 999;
        assert!(build_index(&[schema, dup]).is_err());
    }

    #[test]
    fn example_sentences() {
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();

        let hits = match_text(&index, "No one will ever like me.");
        assert!(hits.contains(&"no one"));
        assert!(hits.contains(&"ever"));

        let hits = match_text(&index, "I am a total loser.");
        assert!(hits.contains(&"I am a"));
        assert!(hits.contains(&"a total"));
        // token boundaries are authoritative: "a loser" is not contiguous here
        assert!(!hits.contains(&"a loser"));
        let hits = match_text(&index, "what a loser");
        assert!(hits.contains(&"a loser"));

        assert!(index.match_tokens(std::iter::empty::<&str>()).is_empty());
    }

    #[test]
    fn one_grams_match_standalone_tokens_only() {
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();
        // "forever" must not trigger the 1-gram "ever"
        assert!(index.match_tokens(["like", "forever", "and"]).is_empty());
        assert!(!index.match_tokens(["like", "ever", "and"]).is_empty());
    }

    #[test]
    fn overlapping_patterns_all_reported() {
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();
        // "no one ever" contains "no one" and "ever" and itself
        let hits = match_text(&index, "no one ever");
        assert!(hits.contains(&"no one ever"));
        assert!(hits.contains(&"no one"));
        assert!(hits.contains(&"ever"));
    }

    #[test]
    fn straddles_expanded_contractions() {
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();
        // "won't" expands to "will not", completing "I will not"
        let hits = match_text(&index, "I won't give up");
        assert!(hits.contains(&"I will not"));
    }

    #[test]
    fn round_trips_patterns() {
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();
        let rebuilt = index.reconstruct_patterns();
        assert_eq!(rebuilt.len(), 241);
        for (tokens, id) in rebuilt {
            assert_eq!(tokens, lex.schema(id).tokens, "schema {id}");
        }
    }

    #[test]
    fn category_flags_follow_matches() {
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();
        let tokens = normalize("everyone thinks I am a failure");
        let matched = index.match_tokens(tokens.iter().map(String::as_str));
        let flags = index.category_flags(&matched);
        assert!(flags[Category::Mindreading.index()]);
        assert!(flags[Category::LabelingAndMislabeling.index()]);
        assert!(!flags[Category::FortuneTelling.index()]);
    }

    #[test]
    fn corpus_scan_is_order_preserving_and_worker_independent() {
        use chrono::TimeZone;
        let lex = load_lexicon().unwrap();
        let index = build_lexicon_index(&lex).unwrap();
        let texts = ["fine weather today", "I am a total loser", "nothing matches here either"];
        let mut posts: Vec<Post> = texts
            .iter()
            .enumerate()
            .map(|(i, t)| Post {
                post_id: format!("p{i}"),
                user_id: "u".into(),
                created_at: chrono::Utc.with_ymd_and_hms(2018, 1, 1, 0, 0, 0).unwrap(),
                raw_text: (*t).to_string(),
                lang: "en".into(),
                is_retweet: false,
                tokens: None,
                excluded: None,
            })
            .collect();
        for p in posts.iter_mut() {
            p.tokens = Some(normalize(&p.raw_text));
        }
        let seq = match_corpus(&index, &posts, 1);
        let par = match_corpus(&index, &posts, 4);
        assert_eq!(seq, par);
        let fc: Vec<bool> = seq.iter().map(|r| r.f_c()).collect();
        // "nothing" is itself a schema, so the third post matches too
        assert_eq!(fc, vec![false, true, true]);
        assert_eq!(seq[1].post_id, "p1");
    }
}
