//! Acceptance suite: one test per release criterion, each printing a
//! PASS line with the measured outcome. Run with
//! `cargo test -p cds-cli --test acceptance -- --nocapture`.

use std::path::Path;
use std::time::Instant;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use cds_core::cohort::{ingest_corpus, IngestOptions};
use cds_core::lexicon::{
    filter_schemata_by_pronouns, lexicon_stats, load_lexicon, Category, FIRST_PERSON_PRONOUNS,
};
use cds_core::matcher::{build_lexicon_index, SchemaSet};
use cds_core::report::{render_condition_table, ReportConfig};
use cds_core::stats::{
    bootstrap_pair, cohort_prevalence, ks_two_sample, prevalence_difference, prevalence_ratio,
    Axis, BootstrapConfig, CohortMatches, PairStatistic,
};
use cds_core::synth::{fragment_tokens, quota_corpus_lines, throughput_texts};
use cds_core::{cohort_matches, Lexicon, PatternIndex};

/// Published per-category schema counts, canonical category order.
const PUBLISHED_COUNTS: [usize; 12] = [11, 23, 14, 7, 8, 44, 8, 14, 72, 21, 14, 5];

/// Published personal-pronoun percentages; None where no schema carries one.
const PUBLISHED_PRONOUN_PCT: [Option<f64>; 12] = [
    None,        // Catastrophizing
    None,        // Dichotomous Reasoning
    Some(7.1),   // Disqualifying the Positive
    Some(85.7),  // Emotional Reasoning
    Some(87.5),  // Fortune-telling
    Some(36.4),  // Labeling and Mislabeling
    None,        // Magnification and Minimization
    Some(50.0),  // Mental Filtering
    Some(83.3),  // Mindreading
    Some(57.1),  // Overgeneralizing
    Some(100.0), // Personalizing
    None,        // Should Statements
];

fn load() -> (Lexicon, PatternIndex) {
    let lexicon = load_lexicon().expect("lexicon loads");
    let index = build_lexicon_index(&lexicon).expect("index builds");
    (lexicon, index)
}

/// Independent oracle: per-schema sliding-window scan over the tokens.
fn brute_force_match(lexicon: &Lexicon, tokens: &[String]) -> SchemaSet {
    let mut out = SchemaSet::EMPTY;
    for schema in lexicon.schemata() {
        let k = schema.tokens.len();
        if k <= tokens.len() && tokens.windows(k).any(|w| w == schema.tokens.as_slice()) {
            out.insert(schema.id);
        }
    }
    out
}

/// Cohort of one user with exactly `matched` of `total` posts matching.
fn planted_cohort(matched: u64, total: u64) -> CohortMatches {
    let mut sets = vec![SchemaSet::EMPTY; total as usize];
    for s in sets.iter_mut().take(matched as usize) {
        s.insert(0);
    }
    CohortMatches::from_user_sets([("u0".to_string(), sets)])
}

#[test]
fn criterion_01_lexicon_integrity() {
    let start = Instant::now();
    let lexicon = load_lexicon().expect("lexicon loads");
    let elapsed = start.elapsed();

    assert_eq!(lexicon.len(), 241);
    for (category, expected) in Category::ALL.into_iter().zip(PUBLISHED_COUNTS) {
        assert_eq!(
            lexicon.by_category(category).count(),
            expected,
            "{}",
            category.name()
        );
    }
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!("ACCEPTANCE 1 PASS: lexicon integrity (241 schemata, published per-category counts, loaded in {elapsed:?})");
}

#[test]
fn criterion_02_pronoun_tagging() {
    let lexicon = load_lexicon().unwrap();
    let stats = lexicon_stats(lexicon.schemata());

    // exact reproduction for the six named categories
    let exact: [(Category, usize, usize); 6] = [
        (Category::FortuneTelling, 7, 8),
        (Category::EmotionalReasoning, 6, 7),
        (Category::Mindreading, 60, 72),
        (Category::LabelingAndMislabeling, 16, 44),
        (Category::MentalFiltering, 7, 14),
        (Category::Personalizing, 14, 14),
    ];
    for (category, pron, n) in exact {
        let row = stats.category(category);
        assert_eq!(row.count, n, "{}", category.name());
        assert_eq!(row.pronoun_count, pron, "{}", category.name());
    }

    // every category within one schema of the published ratio (the printed
    // percentages are rounded, so recover the integer count first)
    for (category, published) in Category::ALL.into_iter().zip(PUBLISHED_PRONOUN_PCT) {
        let row = stats.category(category);
        let expected = published.map_or(0, |pct| (pct / 100.0 * row.count as f64).round() as i64);
        let off = (row.pronoun_count as i64 - expected).abs();
        assert!(
            off <= 1,
            "{}: {} pronoun schemata vs published {expected}",
            category.name(),
            row.pronoun_count
        );
    }
    println!("ACCEPTANCE 2 PASS: pronoun tagging (six named categories exact, all categories within one schema)");
}

#[test]
fn criterion_03_matcher_oracle_equivalence() {
    let (lexicon, index) = load();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let cases = 10_000;
    for case in 0..cases {
        let tokens = fragment_tokens(&lexicon, &index, &mut rng);
        let fast = index.match_tokens(tokens.iter().map(String::as_str));
        let slow = brute_force_match(&lexicon, &tokens);
        assert_eq!(fast, slow, "case {case}: tokens {tokens:?}");
    }
    println!("ACCEPTANCE 3 PASS: automaton equals brute-force oracle on {cases} randomized posts");
}

#[test]
fn criterion_04_published_table_consistency() {
    let d = planted_cohort(21_838, 100_000);
    let r = planted_cohort(18_407, 100_000);
    let subset: SchemaSet = [0u16].into_iter().collect();
    let pr = prevalence_ratio(&d, &r, &subset).unwrap().unwrap();
    let pd = prevalence_difference(&d, &r, &subset).unwrap();
    assert!((pr - 1.186).abs() <= 1e-3, "ratio {pr}");
    assert!((pd - 3.431).abs() <= 1e-3, "difference {pd}");
    println!("ACCEPTANCE 4 PASS: published prevalences give ratio {pr:.4} (1.186±0.001) and difference {pd:.4} (3.431±0.001)");
}

#[test]
fn criterion_05_bootstrap_zero_width_and_coverage() {
    let start = Instant::now();

    // (a) constant data: every post of both cohorts matches
    let all = |users: usize| {
        CohortMatches::from_user_sets((0..users).map(|u| {
            let mut sets = vec![SchemaSet::EMPTY; 50];
            for s in sets.iter_mut() {
                s.insert(0);
            }
            (format!("u{u}"), sets)
        }))
    };
    let subset: SchemaSet = [0u16].into_iter().collect();
    let cfg = BootstrapConfig { replicates: 1000, axis: Axis::Users, seed: 1, workers: 2 };
    let s = bootstrap_pair(&all(30), &all(30), &subset, PairStatistic::PrevalenceRatio, &cfg)
        .unwrap();
    assert_eq!(s.point, Some(1.0));
    assert_eq!((s.ci_low, s.median, s.ci_high), (Some(1.0), Some(1.0), Some(1.0)));

    // (b) planted Bernoulli rates 0.22 vs 0.18, 500 users x 200 posts,
    // 200 trials: the 95% interval covers the true ratio 93-97% of the time
    let true_ratio = 0.22 / 0.18;
    let users = 500;
    let posts = 200;
    let trials = 200;
    let mut covered = 0u32;
    for trial in 0..trials {
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + trial);
        let mut gen_cohort = |rate: f64| {
            CohortMatches::from_user_sets((0..users).map(|u| {
                let mut sets = vec![SchemaSet::EMPTY; posts];
                for s in sets.iter_mut() {
                    if rng.random_bool(rate) {
                        s.insert(0);
                    }
                }
                (format!("u{u:03}"), sets)
            }))
        };
        let d = gen_cohort(0.22);
        let r = gen_cohort(0.18);
        let cfg = BootstrapConfig {
            replicates: 2000,
            axis: Axis::Users,
            seed: 9000 + trial,
            workers: 4,
        };
        let s = bootstrap_pair(&d, &r, &subset, PairStatistic::PrevalenceRatio, &cfg).unwrap();
        let (lo, hi) = (s.ci_low.unwrap(), s.ci_high.unwrap());
        if lo <= true_ratio && true_ratio <= hi {
            covered += 1;
        }
    }
    let elapsed = start.elapsed();
    assert!(
        (186..=194).contains(&covered),
        "covered {covered}/200 trials (need 186..=194)"
    );
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:?}");
    println!(
        "ACCEPTANCE 5 PASS: zero-width interval on constant data; CI covered the true ratio in {covered}/200 trials ({:.1}%) in {elapsed:?}",
        covered as f64 / 2.0
    );
}

/// KS statistic oracle: evaluate the ECDF difference at every pooled point.
fn brute_force_d(a: &[f64], b: &[f64]) -> f64 {
    let mut d: f64 = 0.0;
    for v in a.iter().chain(b.iter()) {
        let fa = a.iter().filter(|x| *x <= v).count() as f64 / a.len() as f64;
        let fb = b.iter().filter(|x| *x <= v).count() as f64 / b.len() as f64;
        d = d.max((fa - fb).abs());
    }
    d
}

#[test]
fn criterion_06_ks_statistic_and_small_sample_p() {
    // (a) D equals the brute-force ECDF computation on 1000 random pairs
    let mut rng = ChaCha8Rng::seed_from_u64(0x6);
    for _ in 0..1000 {
        let n_a = rng.random_range(1..=150);
        let n_b = rng.random_range(1..=150);
        // integer-valued draws produce plenty of ties
        let a: Vec<f64> = (0..n_a).map(|_| rng.random_range(-40..40) as f64 / 8.0).collect();
        let b: Vec<f64> = (0..n_b).map(|_| rng.random_range(-40..40) as f64 / 8.0).collect();
        let d = ks_two_sample(&a, &b).unwrap().statistic;
        let oracle = brute_force_d(&a, &b);
        assert!((d - oracle).abs() < 1e-12, "D {d} vs oracle {oracle}");
    }

    // (b) asymptotic p within a factor of two of the exact permutation p,
    // exhaustively: every size pair with min >= 7 pooled to <= 20, every
    // achievable D. Below that floor the asymptotic approximation itself is
    // outside the factor-2 band (e.g. 5v5 complete separation), which is why
    // the suite pins the domain.
    let mut checked_pairs = 0;
    for n_a in 7..=10usize {
        for n_b in n_a..=(20 - n_a) {
            let n = n_a + n_b;
            let scale = (n_a * n_b) as f64;
            // one pass over every assignment of n distinct values: count the
            // exact distribution of D (as integer steps of 1/(n_a*n_b)) and
            // keep one representative sample pair per achievable D
            let mut counts: std::collections::BTreeMap<u64, u64> = Default::default();
            let mut reps: std::collections::BTreeMap<u64, (Vec<f64>, Vec<f64>)> = Default::default();
            let mut comb: Vec<usize> = (0..n_a).collect();
            let mut total = 0u64;
            loop {
                let a: Vec<f64> = comb.iter().map(|&i| i as f64).collect();
                let b: Vec<f64> =
                    (0..n).filter(|i| !comb.contains(i)).map(|i| i as f64).collect();
                let steps = (brute_force_d(&a, &b) * scale).round() as u64;
                *counts.entry(steps).or_insert(0) += 1;
                reps.entry(steps).or_insert((a, b));
                total += 1;
                // next combination
                let mut idx = n_a;
                let mut advanced = false;
                while idx > 0 {
                    idx -= 1;
                    if comb[idx] != idx + n - n_a {
                        comb[idx] += 1;
                        for j in idx + 1..n_a {
                            comb[j] = comb[j - 1] + 1;
                        }
                        advanced = true;
                        break;
                    }
                }
                if !advanced {
                    break;
                }
            }
            // exact upper-tail probability per achievable D via suffix sums
            let mut suffix = 0u64;
            let mut tail: std::collections::BTreeMap<u64, f64> = Default::default();
            for (&steps, &c) in counts.iter().rev() {
                suffix += c;
                tail.insert(steps, suffix as f64 / total as f64);
            }
            for (&steps, p_exact) in &tail {
                let (a, b) = &reps[&steps];
                let r = ks_two_sample(a, b).unwrap();
                assert_eq!((r.statistic * scale).round() as u64, steps);
                let ratio = (r.p_value / p_exact).max(p_exact / r.p_value);
                assert!(
                    ratio <= 2.0,
                    "n=({n_a},{n_b}) D={:.4}: asym {:.3e} vs exact {p_exact:.3e} (x{ratio:.2})",
                    steps as f64 / scale,
                    r.p_value
                );
            }
            checked_pairs += 1;
        }
    }
    println!(
        "ACCEPTANCE 6 PASS: D matches the ECDF oracle on 1000 random pairs; asymptotic p within 2x of the exact permutation p for all {checked_pairs} size pairs (min size 7, pooled <= 20) at every achievable D"
    );
}

#[test]
fn criterion_07_first_person_pronoun_analysis() {
    let lexicon = load_lexicon().unwrap();

    // the Personalizing category loses every schema under the FPP filter
    let filtered: Vec<_> = filter_schemata_by_pronouns(
        lexicon.by_category(Category::Personalizing),
        &FIRST_PERSON_PRONOUNS,
    );
    assert!(filtered.is_empty());

    // and its no-first-person row renders as "/" in the condition table
    let pers = lexicon.ids_for_category(Category::Personalizing)[0];
    let dich = lexicon.ids_for_category(Category::DichotomousReasoning)[0];
    let cohort = |p_rate: usize, d_rate: usize| {
        CohortMatches::from_user_sets((0..10).map(|u| {
            let mut sets = vec![SchemaSet::EMPTY; 40];
            for s in sets.iter_mut().take(p_rate) {
                s.insert(pers);
            }
            for s in sets.iter_mut().skip(20).take(d_rate) {
                s.insert(dich);
            }
            (format!("u{u}"), sets)
        }))
    };
    let cfg = ReportConfig { replicates: 300, min_posts: 10, ..Default::default() };
    let table = render_condition_table(
        &lexicon,
        &cohort(6, 10),
        &cohort(3, 9),
        PairStatistic::PrevalenceRatio,
        &cfg,
    )
    .unwrap();
    let row: Vec<&str> = table
        .lines()
        .find(|l| l.starts_with("Personalizing"))
        .unwrap()
        .split('\t')
        .collect();
    assert_eq!(&row[7..=10], &["/", "/", "/", "/"], "no-first-person cells must be /");
    println!("ACCEPTANCE 7 PASS: Personalizing is empty under the first-person filter and its row renders as \"/\"");
}

fn write_lines(path: &Path, lines: &[String]) {
    std::fs::write(path, lines.join("\n") + "\n").unwrap();
}

fn quota_rates() -> ([f64; 12], [f64; 12]) {
    // random-cohort base rates (every category >= 0.1%) and the planted
    // depressed-over-random multipliers
    let base = [
        0.002, 0.140, 0.003, 0.002, 0.002, 0.009, 0.019, 0.002, 0.010, 0.005, 0.004, 0.029,
    ];
    let mult = [
        0.729, 1.195, 1.349, 2.323, 0.954, 1.328, 1.075, 1.468, 1.136, 1.580, 2.402, 1.103,
    ];
    (base, mult)
}

#[test]
fn criterion_08_report_determinism_across_worker_counts() {
    let (lexicon, index) = load();
    let dir = tempfile::tempdir().unwrap();
    let (base, mult) = quota_rates();
    let mut d_rates = [0.0; 12];
    for i in 0..12 {
        d_rates[i] = base[i] * mult[i];
    }
    let (d_lines, _) = quota_corpus_lines(&lexicon, &index, "d", 40, 60, &d_rates, 81);
    let (r_lines, _) = quota_corpus_lines(&lexicon, &index, "r", 40, 60, &base, 82);
    let d_path = dir.path().join("d.jsonl");
    let r_path = dir.path().join("r.jsonl");
    write_lines(&d_path, &d_lines);
    write_lines(&r_path, &r_lines);

    let run = |workers: &str, out: &str| {
        let out_dir = dir.path().join(out);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_cds"))
            .args([
                "report",
                "--all",
                "--depressed",
                d_path.to_str().unwrap(),
                "--random",
                r_path.to_str().unwrap(),
                "--seed",
                "7",
                "--replicates",
                "400",
                "--min-posts",
                "20",
                "--workers",
                workers,
                "--out-dir",
                out_dir.to_str().unwrap(),
            ])
            .output()
            .expect("spawn cds");
        assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
        out_dir
    };
    let one = run("1", "out1");
    let four = run("4", "out4");

    let mut names: Vec<String> = std::fs::read_dir(&one)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.contains(&"ratio_by_category.tsv".to_string()));
    for name in &names {
        let a = std::fs::read(one.join(name)).unwrap();
        let b = std::fs::read(four.join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between worker counts");
    }
    println!(
        "ACCEPTANCE 8 PASS: report --all byte-identical across worker counts ({} files)",
        names.len()
    );
}

#[test]
fn criterion_09_matcher_throughput() {
    let (lexicon, index) = load();
    let n_posts = 1_000_000;
    let texts = throughput_texts(&lexicon, &index, n_posts, 20, 0.2, 0x9);

    let start = Instant::now();
    let mut matched = 0u64;
    let mut checksum = 0u64;
    for text in &texts {
        let tokens = cds_core::textnorm::normalize(text);
        let set = index.match_tokens(tokens.iter().map(String::as_str));
        matched += !set.is_empty() as u64;
        checksum = checksum.wrapping_add(set.len() as u64);
    }
    let elapsed = start.elapsed();

    assert!(matched > 0 && checksum > 0);
    assert!(
        elapsed.as_secs_f64() < 10.0,
        "matching {n_posts} posts took {elapsed:?}"
    );

    // peak RSS of the whole test process stays under 1 GiB
    let status = std::fs::read_to_string("/proc/self/status").unwrap();
    let hwm_kb: u64 = status
        .lines()
        .find(|l| l.starts_with("VmHWM:"))
        .and_then(|l| l.split_whitespace().nth(1))
        .and_then(|v| v.parse().ok())
        .expect("VmHWM in /proc/self/status");
    assert!(hwm_kb < 1_048_576, "peak RSS {hwm_kb} kB");
    println!(
        "ACCEPTANCE 9 PASS: matched {n_posts} posts (mean 20 tokens) in {elapsed:?} single-worker, peak RSS {} MiB",
        hwm_kb / 1024
    );
}

#[test]
fn criterion_10_end_to_end_synthetic_study() {
    let (lexicon, index) = load();
    let dir = tempfile::tempdir().unwrap();
    let (base, mult) = quota_rates();
    let mut d_rates = [0.0; 12];
    for i in 0..12 {
        d_rates[i] = base[i] * mult[i];
    }
    let users = 500;
    let posts = 200;
    let (d_lines, d_plan) = quota_corpus_lines(&lexicon, &index, "d", users, posts, &d_rates, 101);
    let (r_lines, r_plan) = quota_corpus_lines(&lexicon, &index, "r", users, posts, &base, 102);
    let d_path = dir.path().join("d.jsonl");
    let r_path = dir.path().join("r.jsonl");
    write_lines(&d_path, &d_lines);
    write_lines(&r_path, &r_lines);

    // the full pipeline: files -> ingestion -> normalization -> matching
    let opts = IngestOptions { max_posts_per_user: None, ..Default::default() };
    let d = cohort_matches(&index, &ingest_corpus(&[d_path], &opts).unwrap());
    let r = cohort_matches(&index, &ingest_corpus(&[r_path], &opts).unwrap());
    assert_eq!(d.total_posts(), (users * posts) as u64);

    let mut lines = Vec::new();
    for category in Category::ALL {
        let realized = d_plan.rate(category) / r_plan.rate(category);
        assert!(
            r_plan.rate(category) >= 0.001,
            "{} planted below the 0.1% floor",
            category.name()
        );
        let subset: SchemaSet = lexicon.ids_for_category(category).into_iter().collect();
        let point = cohort_prevalence(&d, &subset).unwrap() / cohort_prevalence(&r, &subset).unwrap();
        assert!(
            (point - realized).abs() < 1e-9,
            "{}: pipeline point {point} vs planted {realized}",
            category.name()
        );
        let cfg = BootstrapConfig {
            replicates: 2000,
            axis: Axis::Users,
            seed: 7,
            workers: 4,
        };
        let s = bootstrap_pair(&d, &r, &subset, PairStatistic::PrevalenceRatio, &cfg).unwrap();
        let (lo, hi) = (s.ci_low.unwrap(), s.ci_high.unwrap());
        assert!(
            lo <= realized && realized <= hi,
            "{}: planted {realized:.3} outside [{lo:.3}, {hi:.3}]",
            category.name()
        );
        lines.push(format!(
            "  {:32} planted x{realized:.3} recovered [{lo:.3}, {hi:.3}]",
            category.name()
        ));
    }
    println!("ACCEPTANCE 10 PASS: every planted category multiplier recovered within its bootstrap 95% CI");
    for l in lines {
        println!("{l}");
    }
}
