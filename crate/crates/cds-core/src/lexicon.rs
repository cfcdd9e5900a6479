//! The embedded lexicon of cognitive-distortion schemata (CDS): 241 word
//! n-grams grouped into 12 distortion categories, with pronoun tagging and
//! per-category descriptive statistics.
//!
//! Schemata are stored verbatim as published and re-tokenized through the
//! same [`crate::textnorm`] pipeline as posts, so matcher and lexicon share
//! one token space. Ids are assigned by (category order, position within the
//! category row) and are stable across runs.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::textnorm::normalize;

/// The 12 distortion categories, in canonical (published) order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    Catastrophizing,
    DichotomousReasoning,
    DisqualifyingThePositive,
    EmotionalReasoning,
    FortuneTelling,
    LabelingAndMislabeling,
    MagnificationAndMinimization,
    MentalFiltering,
    Mindreading,
    Overgeneralizing,
    Personalizing,
    ShouldStatements,
}

impl Category {
    pub const COUNT: usize = 12;

    pub const ALL: [Category; Category::COUNT] = [
        Category::Catastrophizing,
        Category::DichotomousReasoning,
        Category::DisqualifyingThePositive,
        Category::EmotionalReasoning,
        Category::FortuneTelling,
        Category::LabelingAndMislabeling,
        Category::MagnificationAndMinimization,
        Category::MentalFiltering,
        Category::Mindreading,
        Category::Overgeneralizing,
        Category::Personalizing,
        Category::ShouldStatements,
    ];

    pub fn index(self) -> usize {
        Category::ALL.iter().position(|c| *c == self).unwrap()
    }

    pub fn name(self) -> &'static str {
        match self {
            Category::Catastrophizing => "Catastrophizing",
            Category::DichotomousReasoning => "Dichotomous Reasoning",
            Category::DisqualifyingThePositive => "Disqualifying the Positive",
            Category::EmotionalReasoning => "Emotional Reasoning",
            Category::FortuneTelling => "Fortune-telling",
            Category::LabelingAndMislabeling => "Labeling and Mislabeling",
            Category::MagnificationAndMinimization => "Magnification and Minimization",
            Category::MentalFiltering => "Mental Filtering",
            Category::Mindreading => "Mindreading",
            Category::Overgeneralizing => "Overgeneralizing",
            Category::Personalizing => "Personalizing",
            Category::ShouldStatements => "Should Statements",
        }
    }

    /// Display definition of the distortion type.
    pub fn definition(self) -> &'static str {
        match self {
            Category::Catastrophizing => "Exaggerating the importance of negative events",
            Category::DichotomousReasoning => {
                "Thinking that an inherently continuous situation can only fall into two categories"
            }
            Category::DisqualifyingThePositive => "Unreasonably discounting positive experiences",
            Category::EmotionalReasoning => {
                "Thinking that something is true based on how one feels, ignoring the evidence to the contrary"
            }
            Category::FortuneTelling => "Making predictions, usually negative ones, about the future",
            Category::LabelingAndMislabeling => {
                "Labeling yourself or others while discounting evidence that could lead to less disastrous conclusions"
            }
            Category::MagnificationAndMinimization => {
                "Magnifying negative aspects or minimizing positive aspects"
            }
            Category::MentalFiltering => {
                "Paying too much attention to negative details instead of the whole picture"
            }
            Category::Mindreading => "Believing you know what others are thinking",
            Category::Overgeneralizing => {
                "Making sweeping negative conclusions based on a few examples"
            }
            Category::Personalizing => {
                "Believing others are behaving negatively because of oneself, without considering more plausible or external explanations for behavior"
            }
            Category::ShouldStatements => "Having a fixed idea on how you and/or others should behave",
        }
    }

    /// Case-insensitive lookup by display name or dash/underscore slug.
    pub fn parse(s: &str) -> Option<Category> {
        let slug: String = s
            .chars()
            .map(|c| if c.is_alphanumeric() { c.to_ascii_lowercase() } else { '-' })
            .collect();
        let slug = slug.trim_matches('-').to_string();
        Category::ALL.into_iter().find(|c| {
            let canon: String = c
                .name()
                .chars()
                .map(|ch| if ch.is_alphanumeric() { ch.to_ascii_lowercase() } else { '-' })
                .collect();
            canon == slug
        })
    }
}

/// Personal pronouns used for the pronoun-ratio statistic.
pub const PERSONAL_PRONOUNS: [&str; 19] = [
    "i", "me", "my", "mine", "myself", "you", "your", "he", "him", "his", "she", "her", "it",
    "we", "us", "our", "they", "them", "their",
];

/// First-person pronouns, the subset removed in the no-first-person analysis.
pub const FIRST_PERSON_PRONOUNS: [&str; 5] = ["i", "me", "my", "mine", "myself"];

/// One CDS n-gram with its category and pronoun flags.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schema {
    /// Stable identifier: position in (category order, row order).
    pub id: u16,
    /// Raw schema string as published.
    pub text: &'static str,
    /// Token sequence produced by the shared normalization pipeline.
    pub tokens: Vec<String>,
    pub category: Category,
    pub has_first_person: bool,
    pub has_personal_pronoun: bool,
}

impl Schema {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("schema {id} ({text:?}) tokenizes to {n} tokens, outside 1..=5")]
    BadLength { id: u16, text: String, n: usize },
    #[error("duplicate schema in category {category}: {text:?}")]
    DuplicateInCategory { category: &'static str, text: String },
    #[error("lexicon holds {got} schemata, expected {expected}")]
    WrongTotal { got: usize, expected: usize },
}

/// Raw rows, verbatim. One tuple per category, in canonical order.
const RAW_ROWS: [(Category, &[&str]); Category::COUNT] = [
    (
        Category::Catastrophizing,
        &[
            "will fail",
            "will go wrong",
            "will end",
            "will be impossible",
            "will not happen",
            "will be terrible",
            "will be horrible",
            "will be a catastrophe",
            "will be a disaster",
            "will never end",
            "will not end",
        ],
    ),
    (
        Category::DichotomousReasoning,
        &[
            "only",
            "every",
            "everyone",
            "everybody",
            "everything",
            "everywhere",
            "always",
            "perfect",
            "the best",
            "all",
            "not a single",
            "no one",
            "nobody",
            "nothing",
            "nowhere",
            "never",
            "worthless",
            "the worst",
            "neither",
            "nor",
            "either or",
            "black or white",
            "ever",
        ],
    ),
    (
        Category::DisqualifyingThePositive,
        &[
            "great but",
            "good but",
            "OK but",
            "not that great",
            "not that good",
            "it was not",
            "not all that",
            "fine but",
            "acceptable but",
            "great yet",
            "good yet",
            "OK yet",
            "fine yet",
            "acceptable yet",
        ],
    ),
    (
        Category::EmotionalReasoning,
        &[
            "but I feel",
            "since I feel",
            "because I feel",
            "but it feels",
            "since it feels",
            "because it feels",
            "still feels",
        ],
    ),
    (
        Category::FortuneTelling,
        &[
            "I will not",
            "we will not",
            "you will not",
            "they will not",
            "it will not",
            "that will not",
            "he will not",
            "she will not",
        ],
    ),
    (
        Category::LabelingAndMislabeling,
        &[
            "I am a",
            "he is a",
            "she is a",
            "they are a",
            "it is a",
            "that is a",
            "sucks at",
            "suck at",
            "I never",
            "he never",
            "she never",
            "you never",
            "we never",
            "they never",
            "I am an",
            "he is an",
            "she is an",
            "they are an",
            "it is an",
            "that is an",
            "a burden",
            "a complete",
            "a completely",
            "a huge",
            "a loser",
            "a major",
            "a total",
            "a totally",
            "a weak",
            "an absolute",
            "an utter",
            "a bad",
            "a broken",
            "a damaged",
            "a helpless",
            "a hopeless",
            "an incompetent",
            "a toxic",
            "an ugly",
            "an undesirable",
            "an unlovable",
            "a worthless",
            "a horrible",
            "a terrible",
        ],
    ),
    (
        Category::MagnificationAndMinimization,
        &[
            "worst",
            "best",
            "not important",
            "not count",
            "not matter",
            "no matter",
            "the only thing",
            "the one thing",
        ],
    ),
    (
        Category::MentalFiltering,
        &[
            "I see only",
            "all I see",
            "all I can see",
            "can only think",
            "nothing good",
            "nothing right",
            "completely bad",
            "completely wrong",
            "only the bad",
            "only the worst",
            "if I just",
            "if I only",
            "if it just",
            "if it only",
        ],
    ),
    (
        Category::Mindreading,
        &[
            "everyone believes",
            "everyone knows",
            "everyone thinks",
            "everyone will believe",
            "everyone will know",
            "everyone will think",
            "nobody believes",
            "nobody knows",
            "nobody thinks",
            "nobody will believe",
            "nobody will know",
            "nobody will think",
            "he believes",
            "he knows",
            "he thinks",
            "he does not believe",
            "he does not know",
            "he does not think",
            "he will believe",
            "he will know",
            "he will think",
            "he will not believe",
            "he will not know",
            "he will not think",
            "she believes",
            "she knows",
            "she thinks",
            "she does not believe",
            "she does not know",
            "she does not think",
            "she will believe",
            "she will know",
            "she will think",
            "she will not believe",
            "she will not know",
            "she will not think",
            "they believe",
            "they know",
            "they think",
            "they do not believe",
            "they do not know",
            "they do not think",
            "they will believe",
            "they will know",
            "they will think",
            "they will not believe",
            "they will not know",
            "they will not think",
            "we believe",
            "we know",
            "we think",
            "we do not believe",
            "we do not know",
            "we do not think",
            "we will believe",
            "we will know",
            "we will think",
            "we will not believe",
            "we will not know",
            "we will not think",
            "you believe",
            "you know",
            "you think",
            "you do not believe",
            "you do not know",
            "you do not think",
            "you will believe",
            "you will know",
            "you will think",
            "you will not believe",
            "you will not know",
            "you will not think",
        ],
    ),
    (
        Category::Overgeneralizing,
        &[
            "all of the time",
            "all of them",
            "all the time",
            "always happens",
            "always like",
            "happens every time",
            "completely",
            "no one ever",
            "nobody ever",
            "every single one of them",
            "every single one of you",
            "I always",
            "you always",
            "he always",
            "she always",
            "they always",
            "I am always",
            "you are always",
            "he is always",
            "she is always",
            "they are always",
        ],
    ),
    (
        Category::Personalizing,
        &[
            "all me",
            "all my",
            "because I",
            "because my",
            "because of my",
            "because of me",
            "I am responsible",
            "blame me",
            "I caused",
            "I feel responsible",
            "all my doing",
            "all my fault",
            "my bad",
            "my responsibility",
        ],
    ),
    (
        Category::ShouldStatements,
        &["should", "ought", "must", "have to", "has to"],
    ),
];

/// Total number of schemata in the embedded lexicon.
pub const LEXICON_SIZE: usize = 241;

/// The loaded lexicon: all schemata in id order plus category indexing.
#[derive(Debug, Clone)]
pub struct Lexicon {
    schemata: Vec<Schema>,
}

impl Lexicon {
    pub fn schemata(&self) -> &[Schema] {
        &self.schemata
    }

    pub fn len(&self) -> usize {
        self.schemata.len()
    }

    pub fn is_empty(&self) -> bool {
        self.schemata.is_empty()
    }

    pub fn schema(&self, id: u16) -> &Schema {
        &self.schemata[id as usize]
    }

    pub fn by_category(&self, category: Category) -> impl Iterator<Item = &Schema> {
        self.schemata.iter().filter(move |s| s.category == category)
    }

    /// All schema ids, in id order.
    pub fn all_ids(&self) -> Vec<u16> {
        self.schemata.iter().map(|s| s.id).collect()
    }

    pub fn ids_for_category(&self, category: Category) -> Vec<u16> {
        self.by_category(category).map(|s| s.id).collect()
    }

    /// Ids of schemata containing none of the given pronoun tokens.
    pub fn ids_without_pronouns(&self, ids: &[u16], pronouns: &[&str]) -> Vec<u16> {
        let filtered = filter_schemata_by_pronouns(
            ids.iter().map(|&id| self.schema(id)),
            pronouns,
        );
        filtered.into_iter().map(|s| s.id).collect()
    }
}

/// Load and validate the embedded lexicon.
pub fn load_lexicon() -> Result<Lexicon, LexiconError> {
    let mut schemata = Vec::with_capacity(LEXICON_SIZE);
    let mut id: u16 = 0;
    for (category, row) in RAW_ROWS {
        let mut seen: Vec<&str> = Vec::with_capacity(row.len());
        for text in row {
            if seen.contains(text) {
                return Err(LexiconError::DuplicateInCategory {
                    category: category.name(),
                    text: (*text).to_string(),
                });
            }
            seen.push(text);
            let tokens = normalize(text);
            if tokens.is_empty() || tokens.len() > 5 {
                return Err(LexiconError::BadLength {
                    id,
                    text: (*text).to_string(),
                    n: tokens.len(),
                });
            }
            let has_personal_pronoun =
                tokens.iter().any(|t| PERSONAL_PRONOUNS.contains(&t.as_str()));
            let has_first_person =
                tokens.iter().any(|t| FIRST_PERSON_PRONOUNS.contains(&t.as_str()));
            schemata.push(Schema {
                id,
                text,
                tokens,
                category,
                has_first_person,
                has_personal_pronoun,
            });
            id += 1;
        }
    }
    if schemata.len() != LEXICON_SIZE {
        return Err(LexiconError::WrongTotal {
            got: schemata.len(),
            expected: LEXICON_SIZE,
        });
    }
    Ok(Lexicon { schemata })
}

/// Per-category descriptive statistics over a schema set.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoryStats {
    pub category: Option<Category>,
    pub count: usize,
    /// Arithmetic mean token length; 0.0 for an empty row.
    pub mean_len: f64,
    /// Schemata containing any personal pronoun.
    pub pronoun_count: usize,
    /// Schemata containing any first-person pronoun.
    pub first_person_count: usize,
}

impl CategoryStats {
    /// Personal-pronoun ratio as a percentage; `None` for an empty row.
    pub fn pronoun_pct(&self) -> Option<f64> {
        (self.count > 0).then(|| 100.0 * self.pronoun_count as f64 / self.count as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexiconStats {
    pub per_category: Vec<CategoryStats>,
    pub total: CategoryStats,
}

impl LexiconStats {
    pub fn category(&self, category: Category) -> &CategoryStats {
        &self.per_category[category.index()]
    }
}

/// Compute per-category and total counts, mean n-gram length, and pronoun
/// ratios for a set of schemata.
pub fn lexicon_stats<'a>(schemata: impl IntoIterator<Item = &'a Schema>) -> LexiconStats {
    let mut counts = vec![(0usize, 0usize, 0usize, 0usize); Category::COUNT];
    for s in schemata {
        let slot = &mut counts[s.category.index()];
        slot.0 += 1;
        slot.1 += s.len();
        if s.has_personal_pronoun {
            slot.2 += 1;
        }
        if s.has_first_person {
            slot.3 += 1;
        }
    }
    let per_category: Vec<CategoryStats> = Category::ALL
        .into_iter()
        .zip(&counts)
        .map(|(category, &(n, toks, pron, fp))| CategoryStats {
            category: Some(category),
            count: n,
            mean_len: if n > 0 { toks as f64 / n as f64 } else { 0.0 },
            pronoun_count: pron,
            first_person_count: fp,
        })
        .collect();
    let (n, toks, pron, fp) = counts
        .iter()
        .fold((0, 0, 0, 0), |acc, c| (acc.0 + c.0, acc.1 + c.1, acc.2 + c.2, acc.3 + c.3));
    let total = CategoryStats {
        category: None,
        count: n,
        mean_len: if n > 0 { toks as f64 / n as f64 } else { 0.0 },
        pronoun_count: pron,
        first_person_count: fp,
    };
    LexiconStats { per_category, total }
}

/// Schemata containing none of the given pronoun tokens. Matching is against
/// token identities, case-insensitively. Idempotent and monotone.
pub fn filter_schemata_by_pronouns<'a>(
    schemata: impl IntoIterator<Item = &'a Schema>,
    pronouns: &[&str],
) -> Vec<&'a Schema> {
    let lowered: Vec<String> = pronouns.iter().map(|p| p.to_lowercase()).collect();
    schemata
        .into_iter()
        .filter(|s| !s.tokens.iter().any(|t| lowered.iter().any(|p| p == t)))
        .collect()
}
