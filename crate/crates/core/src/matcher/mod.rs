//! Quality verification: matching parsed descriptions against the screens
//! and interactions of the execution model.

mod resolve;
mod similarity;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec_model::{ExecutionModel, GuiComponent, Screen, ScreenId};
use crate::nlp::{Lexicon, ParsedPhrase};
use crate::{Scalar, Score};

pub use resolve::{AmbiguityKind, ResolutionOutcome, StepResolution, TupleElement};
pub use similarity::{lcs_ratio, longest_common_substring, normalize, similarity};

pub const DEFAULT_THRESHOLD: f64 = 0.5;
pub const DEFAULT_DISPLAY_CAP: usize = 5;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchError {
    #[error("desynchronized session: screen {0} is not part of the model")]
    Desynchronized(usize),
}

/// Lookup text built from a behavior description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    /// Subject, action, object and object2, lemmatized and lowercased.
    pub text: String,
    /// Subject alone; empty when the subject names the app or the user.
    pub fallback_text: String,
}

impl Query {
    /// Query for an OB or EB phrase. Subjects such as "app" or "it" carry
    /// no GUI vocabulary and are left out. `None` when nothing remains.
    pub fn behavior(phrase: &ParsedPhrase, lexicon: &Lexicon) -> Option<Query> {
        let subject = if lexicon.is_generic_subject(&phrase.subject) {
            ""
        } else {
            phrase.subject.as_str()
        };
        let joined = [subject, &phrase.action, &phrase.object, &phrase.object2]
            .iter()
            .filter(|s| !s.is_empty())
            .copied()
            .collect::<Vec<_>>()
            .join(" ");
        let text = normalize(&strip_quotes(&joined), lexicon);
        if text.is_empty() {
            return None;
        }
        Some(Query {
            text,
            fallback_text: normalize(&strip_quotes(subject), lexicon),
        })
    }
}

fn strip_quotes(text: &str) -> String {
    text.chars()
        .filter(|c| !matches!(c, '"' | '\u{201c}' | '\u{201d}'))
        .collect()
}

/// Component query for a step: the domain verb (generic interaction verbs
/// are dropped), object and object2, without quoted literals, numbers or
/// widget nouns such as "button".
pub fn step_query(phrase: &ParsedPhrase, lexicon: &Lexicon) -> String {
    let action = match lexicon.verb(&phrase.action) {
        Some(v) if v.generic => "",
        _ => phrase.action.as_str(),
    };
    let mut parts = Vec::new();
    for piece in [action, phrase.object.as_str(), phrase.object2.as_str()] {
        let cleaned = strip_literals(piece);
        let words: Vec<&str> = cleaned
            .split_whitespace()
            .filter(|w| !lexicon.is_widget_noun(w) && !is_number(w))
            .collect();
        if !words.is_empty() {
            parts.push(words.join(" "));
        }
    }
    normalize(&parts.join(" "), lexicon)
}

fn strip_literals(text: &str) -> String {
    let mut out = String::new();
    let mut inside = false;
    for c in text.chars() {
        if matches!(c, '"' | '\u{201c}' | '\u{201d}') {
            inside = !inside;
            continue;
        }
        if !inside {
            out.push(c);
        }
    }
    out
}

fn is_number(word: &str) -> bool {
    let core = word.trim_start_matches(['$', '€', '£']).trim_end_matches('%');
    !core.is_empty() && core.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | ',' | '-'))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchOutcome {
    None,
    Unique,
    Multiple,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenCandidate<S = Score> {
    pub screen: ScreenId,
    /// Indices of matching components on the screen.
    pub components: Vec<usize>,
    pub similarity: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenMatch<S = Score> {
    pub outcome: MatchOutcome,
    /// Ascending by distance from the start screen.
    pub candidates: Vec<ScreenCandidate<S>>,
    pub used_fallback: bool,
}

impl<S> ScreenMatch<S> {
    /// The first `cap` candidates, as shown to the reporter.
    pub fn displayed(&self, cap: usize) -> &[ScreenCandidate<S>] {
        &self.candidates[..self.candidates.len().min(cap)]
    }
}

/// Matching operations over one lexicon and threshold.
#[derive(Debug, Clone)]
pub struct Matcher<'a, S = Score> {
    lexicon: &'a Lexicon,
    threshold: S,
}

impl<'a> Matcher<'a, Score> {
    pub fn with_default_threshold(lexicon: &'a Lexicon) -> Self {
        Matcher::new(lexicon, DEFAULT_THRESHOLD)
    }
}

impl<'a, S: Scalar> Matcher<'a, S> {
    pub fn new(lexicon: &'a Lexicon, threshold: S) -> Self {
        Matcher { lexicon, threshold }
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    pub fn threshold(&self) -> &S {
        &self.threshold
    }

    /// Best similarity between a normalized query and the component's
    /// label, description or identifier.
    pub fn component_similarity(&self, query: &str, component: &GuiComponent) -> S {
        let id = component.id_name.replace('_', " ");
        [component.label.as_str(), component.description.as_str(), id.as_str()]
            .into_iter()
            .filter(|f| !f.trim().is_empty())
            .map(|f| lcs_ratio::<S>(query, &normalize(f, self.lexicon)))
            .fold(S::zero(), |best, s| if s > best { s } else { best })
    }

    pub fn component_matches(&self, query: &str, component: &GuiComponent) -> bool {
        !query.is_empty() && self.component_similarity(query, component) >= self.threshold
    }

    fn screen_candidate(&self, query: &str, screen: &Screen) -> Option<ScreenCandidate<S>> {
        let mut best = S::zero();
        let mut components = Vec::new();
        for (i, c) in screen.components.iter().enumerate() {
            let s = self.component_similarity(query, c);
            if s >= self.threshold {
                components.push(i);
                if s > best {
                    best = s;
                }
            }
        }
        (!components.is_empty()).then(|| ScreenCandidate {
            screen: screen.id,
            components,
            similarity: best,
        })
    }

    /// Screens with at least one component matching `query`, in model order
    /// (distance from start, then fingerprint).
    pub fn screens_for_query(&self, model: &ExecutionModel, query: &str) -> Vec<ScreenCandidate<S>> {
        if query.is_empty() {
            return Vec::new();
        }
        model
            .screens()
            .iter()
            .filter_map(|s| self.screen_candidate(query, s))
            .collect()
    }

    /// Locates the screens an observed-behavior description refers to.
    /// Falls back to the subject alone when the full query matches nothing.
    pub fn match_ob(&self, model: &ExecutionModel, phrase: &ParsedPhrase) -> ScreenMatch<S> {
        let Some(query) = Query::behavior(phrase, self.lexicon) else {
            return ScreenMatch {
                outcome: MatchOutcome::None,
                candidates: Vec::new(),
                used_fallback: false,
            };
        };
        let mut candidates = self.screens_for_query(model, &query.text);
        let mut used_fallback = false;
        if candidates.is_empty() && !query.fallback_text.is_empty() && query.fallback_text != query.text {
            candidates = self.screens_for_query(model, &query.fallback_text);
            used_fallback = true;
        }
        let outcome = match candidates.len() {
            0 => MatchOutcome::None,
            1 => MatchOutcome::Unique,
            _ => MatchOutcome::Multiple,
        };
        ScreenMatch {
            outcome,
            candidates,
            used_fallback,
        }
    }

    /// Whether an expected-behavior description uses the vocabulary of the
    /// confirmed OB screen. Callers skip this when no OB screen was
    /// confirmed.
    pub fn match_eb(&self, ob_screen: &Screen, phrase: &ParsedPhrase) -> bool {
        Query::behavior(phrase, self.lexicon)
            .is_some_and(|q| ob_screen.components.iter().any(|c| self.component_matches(&q.text, c)))
    }
}
