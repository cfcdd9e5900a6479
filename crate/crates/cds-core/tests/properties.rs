//! Property tests for the normalization / matching / statistics invariants.

use std::sync::OnceLock;

use proptest::prelude::*;

use cds_core::lexicon::{load_lexicon, Lexicon};
use cds_core::matcher::{build_lexicon_index, PatternIndex, SchemaSet};
use cds_core::stats::{cohort_prevalence, ks_two_sample, CohortMatches};
use cds_core::textnorm::{detect_diagnosis_statement, expand_contractions, normalize};

fn lexicon() -> &'static Lexicon {
    static LEX: OnceLock<Lexicon> = OnceLock::new();
    LEX.get_or_init(|| load_lexicon().unwrap())
}

fn index() -> &'static PatternIndex {
    static IDX: OnceLock<PatternIndex> = OnceLock::new();
    IDX.get_or_init(|| build_lexicon_index(lexicon()).unwrap())
}

/// Independent oracle: per-schema sliding-window scan.
fn brute_force_match(tokens: &[String]) -> SchemaSet {
    let mut out = SchemaSet::EMPTY;
    for schema in lexicon().schemata() {
        let k = schema.tokens.len();
        if k <= tokens.len() && tokens.windows(k).any(|w| w == schema.tokens.as_slice()) {
            out.insert(schema.id);
        }
    }
    out
}

/// Tokens drawn from schema fragments plus out-of-vocabulary filler.
fn token_strategy() -> impl Strategy<Value = String> {
    let lex = lexicon();
    let mut pool: Vec<String> = Vec::new();
    for s in lex.schemata().iter().step_by(3) {
        pool.extend(s.tokens.iter().cloned());
    }
    pool.extend((0..30).map(|i| format!("f{i:02}")));
    prop::sample::select(pool)
}

fn token_seq() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(token_strategy(), 0..60)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn normalization_is_idempotent_at_token_level(text in "\\PC{0,200}") {
        let once = normalize(&text);
        let twice = normalize(&once.join(" "));
        prop_assert_eq!(&once, &twice);
    }

    #[test]
    fn tokens_are_clean(text in "\\PC{0,200}") {
        for tok in normalize(&text) {
            prop_assert!(!tok.is_empty());
            prop_assert!(tok.chars().all(|c| c.is_alphanumeric()));
            // case-folding is a fixpoint (symbols like 🅐 carry the Uppercase
            // property but have no lowercase mapping at all)
            prop_assert!(!tok.chars().any(|c| c.is_ascii_uppercase()));
            prop_assert_eq!(tok.to_lowercase(), tok);
        }
    }

    #[test]
    fn expansion_is_idempotent(text in "\\PC{0,120}") {
        let once = expand_contractions(&text).into_owned();
        let twice = expand_contractions(&once).into_owned();
        prop_assert_eq!(once, twice);
    }

    #[test]
    fn automaton_equals_brute_force(tokens in token_seq()) {
        let fast = index().match_tokens(tokens.iter().map(String::as_str));
        let slow = brute_force_match(&tokens);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn appending_tokens_never_removes_matches(
        tokens in token_seq(),
        extra in token_seq(),
    ) {
        let before = index().match_tokens(tokens.iter().map(String::as_str));
        let mut longer = tokens.clone();
        longer.extend(extra);
        let after = index().match_tokens(longer.iter().map(String::as_str));
        prop_assert!(before.is_subset_of(&after));
    }

    #[test]
    fn diagnosis_detection_monotone_under_insertion(
        mid in "\\PC{0,40}",
        tail in "\\PC{0,40}",
    ) {
        // splice arbitrary text between the anchor tokens; never flips to false
        let text = format!("i {mid} was diagnosed {tail} with depression");
        prop_assert!(detect_diagnosis_statement(&text));
    }

    #[test]
    fn prevalence_monotone_in_subset(posts in prop::collection::vec(
        prop::collection::vec(0u16..16, 0..3), 1..80,
    )) {
        let sets: Vec<SchemaSet> = posts
            .iter()
            .map(|ids| ids.iter().copied().collect())
            .collect();
        let cohort = CohortMatches::from_user_sets([("u".to_string(), sets)]);
        let small: SchemaSet = (0u16..8).collect();
        let large: SchemaSet = (0u16..16).collect();
        let p_small = cohort_prevalence(&cohort, &small).unwrap();
        let p_large = cohort_prevalence(&cohort, &large).unwrap();
        prop_assert!(p_small <= p_large);
    }

    #[test]
    fn ks_statistic_matches_brute_force(
        a in prop::collection::vec(-1000i32..1000, 1..40),
        b in prop::collection::vec(-1000i32..1000, 1..40),
    ) {
        let a: Vec<f64> = a.into_iter().map(|v| v as f64 / 64.0).collect();
        let b: Vec<f64> = b.into_iter().map(|v| v as f64 / 64.0).collect();
        let d = ks_two_sample(&a, &b).unwrap().statistic;
        // oracle: evaluate the ECDF difference at every pooled point
        let mut brute: f64 = 0.0;
        for v in a.iter().chain(b.iter()) {
            let fa = a.iter().filter(|x| *x <= v).count() as f64 / a.len() as f64;
            let fb = b.iter().filter(|x| *x <= v).count() as f64 / b.len() as f64;
            brute = brute.max((fa - fb).abs());
        }
        prop_assert!((d - brute).abs() < 1e-12, "d={d} brute={brute}");
    }
}
