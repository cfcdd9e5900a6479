//! Python bindings: the lexicon, the normalization pipeline, the schema
//! matcher and the core statistics, exposed as the `cds_py` module.

use std::collections::HashMap;

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use cds_core::lexicon::{self, Category};
use cds_core::matcher::{build_lexicon_index, PatternIndex};
use cds_core::stats;
use cds_core::textnorm;

fn value_error(err: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(err.to_string())
}

/// Expand contractions with the fixed mapping table.
#[pyfunction]
fn expand_contractions(text: &str) -> String {
    textnorm::expand_contractions(text).into_owned()
}

/// Full normalization: contraction expansion plus tokenization.
#[pyfunction]
fn normalize(text: &str) -> Vec<String> {
    textnorm::normalize(text)
}

/// Ordered-subsequence diagnosis-statement detector.
#[pyfunction]
fn detect_diagnosis_statement(text: &str) -> bool {
    textnorm::detect_diagnosis_statement(text)
}

/// Two-sample KS test; returns (statistic, p_value).
#[pyfunction]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>) -> PyResult<(f64, f64)> {
    let r = stats::ks_two_sample(&a, &b).map_err(value_error)?;
    Ok((r.statistic, r.p_value))
}

/// Exhaustive permutation p-value for small samples (pooled size <= 26).
#[pyfunction]
fn ks_exact_permutation_p(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    stats::ks_exact_permutation_p(&a, &b).map_err(value_error)
}

fn counts_to_cohort(counts: &[(u64, u64)]) -> PyResult<stats::CohortMatches> {
    let mut users = Vec::with_capacity(counts.len());
    for (i, &(matched, total)) in counts.iter().enumerate() {
        if matched > total {
            return Err(PyValueError::new_err(format!(
                "user {i}: matched {matched} exceeds total {total}"
            )));
        }
        let mut sets = vec![cds_core::SchemaSet::EMPTY; total as usize];
        for s in sets.iter_mut().take(matched as usize) {
            s.insert(0);
        }
        users.push((format!("u{i:06}"), sets));
    }
    Ok(stats::CohortMatches::from_user_sets(users))
}

/// Percentile-bootstrap summary of the prevalence ratio between two cohorts,
/// resampling users. Each cohort is a list of per-user (matched, total) post
/// counts. Returns a dict with point, median, ci_low, ci_high, replicates,
/// effective_replicates and seed.
#[pyfunction]
#[pyo3(signature = (depressed, random, replicates=10_000, seed=0))]
fn bootstrap_prevalence_ratio(
    py: Python<'_>,
    depressed: Vec<(u64, u64)>,
    random: Vec<(u64, u64)>,
    replicates: u32,
    seed: u64,
) -> PyResult<Py<PyAny>> {
    let d = counts_to_cohort(&depressed)?;
    let r = counts_to_cohort(&random)?;
    let subset: cds_core::SchemaSet = [0u16].into_iter().collect();
    let cfg = stats::BootstrapConfig {
        replicates,
        axis: stats::Axis::Users,
        seed,
        workers: 1,
    };
    let s = stats::bootstrap_pair(&d, &r, &subset, stats::PairStatistic::PrevalenceRatio, &cfg)
        .map_err(value_error)?;
    let dict = pyo3::types::PyDict::new(py);
    dict.set_item("point", s.point)?;
    dict.set_item("median", s.median)?;
    dict.set_item("ci_low", s.ci_low)?;
    dict.set_item("ci_high", s.ci_high)?;
    dict.set_item("replicates", s.replicates)?;
    dict.set_item("effective_replicates", s.effective_replicates)?;
    dict.set_item("seed", s.seed)?;
    Ok(dict.into())
}

/// The embedded schema lexicon.
#[pyclass]
struct Lexicon {
    inner: lexicon::Lexicon,
}

#[pymethods]
impl Lexicon {
    #[new]
    fn new() -> PyResult<Self> {
        Ok(Lexicon { inner: lexicon::load_lexicon().map_err(value_error)? })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// Schema count per category name.
    fn category_counts(&self) -> HashMap<String, usize> {
        Category::ALL
            .into_iter()
            .map(|c| (c.name().to_string(), self.inner.by_category(c).count()))
            .collect()
    }

    /// One schema as a dict: id, text, tokens, category, pronoun flags.
    fn schema(&self, py: Python<'_>, id: u16) -> PyResult<Py<PyAny>> {
        if id as usize >= self.inner.len() {
            return Err(PyValueError::new_err(format!("schema id {id} out of range")));
        }
        let s = self.inner.schema(id);
        let dict = pyo3::types::PyDict::new(py);
        dict.set_item("id", s.id)?;
        dict.set_item("text", s.text)?;
        dict.set_item("tokens", s.tokens.clone())?;
        dict.set_item("category", s.category.name())?;
        dict.set_item("has_personal_pronoun", s.has_personal_pronoun)?;
        dict.set_item("has_first_person", s.has_first_person)?;
        Ok(dict.into())
    }

    /// Per-category (count, mean length, personal-pronoun percent) rows.
    fn stats(&self) -> Vec<(String, usize, f64, Option<f64>)> {
        let stats = lexicon::lexicon_stats(self.inner.schemata());
        stats
            .per_category
            .iter()
            .map(|row| {
                (
                    row.category.unwrap().name().to_string(),
                    row.count,
                    row.mean_len,
                    row.pronoun_pct(),
                )
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Lexicon({} schemata, {} categories)", self.inner.len(), Category::COUNT)
    }
}

/// One-pass multi-pattern matcher over the full lexicon.
#[pyclass]
struct Matcher {
    index: PatternIndex,
    categories: Vec<&'static str>,
}

#[pymethods]
impl Matcher {
    #[new]
    fn new() -> PyResult<Self> {
        let lexicon = lexicon::load_lexicon().map_err(value_error)?;
        let index = build_lexicon_index(&lexicon).map_err(value_error)?;
        let categories = lexicon.schemata().iter().map(|s| s.category.name()).collect();
        Ok(Matcher { index, categories })
    }

    /// Ids of all schemata matching the (raw) text.
    fn match_text(&self, text: &str) -> Vec<u16> {
        let tokens = textnorm::normalize(text);
        self.index.match_tokens(tokens.iter().map(String::as_str)).iter().collect()
    }

    /// Binary indicator: does the text contain any schema?
    fn matches(&self, text: &str) -> bool {
        !self.match_text(text).is_empty()
    }

    /// Names of the categories matched by the text.
    fn match_categories(&self, text: &str) -> Vec<String> {
        let mut names: Vec<String> = self
            .match_text(text)
            .into_iter()
            .map(|id| self.categories[id as usize].to_string())
            .collect();
        names.sort();
        names.dedup();
        names
    }

    /// Fraction of texts containing at least one schema.
    fn prevalence(&self, texts: Vec<String>) -> PyResult<f64> {
        if texts.is_empty() {
            return Err(PyValueError::new_err("prevalence of an empty corpus is undefined"));
        }
        let matched = texts.iter().filter(|t| self.matches(t)).count();
        Ok(matched as f64 / texts.len() as f64)
    }

    fn __repr__(&self) -> String {
        format!("Matcher({} patterns)", self.index.pattern_count())
    }
}

#[pymodule]
fn cds_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Lexicon>()?;
    m.add_class::<Matcher>()?;
    m.add_function(wrap_pyfunction!(expand_contractions, m)?)?;
    m.add_function(wrap_pyfunction!(normalize, m)?)?;
    m.add_function(wrap_pyfunction!(detect_diagnosis_statement, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(ks_exact_permutation_p, m)?)?;
    m.add_function(wrap_pyfunction!(bootstrap_prevalence_ratio, m)?)?;
    Ok(())
}
