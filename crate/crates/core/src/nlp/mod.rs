//! Sentence typing and tuple extraction for OB, EB and S2R descriptions.
//!
//! A deterministic pattern grammar over a closed lexicon stands in for a
//! dependency parser: the tips shown to reporters already steer phrasing
//! toward a handful of sentence shapes, and each shape has one extractor.

mod lemma;
mod lexicon;
mod parse;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use lemma::{lemmatize, lemmatize_text};
pub use lexicon::{Lexicon, VerbEntry};
pub use parse::{classify, extract_input_value, parse, segment};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NlpError {
    #[error("empty input")]
    EmptyInput,
    #[error("rephrase needed: {0}")]
    RephraseNeeded(String),
    #[error("invalid lexicon: {0}")]
    Lexicon(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SentenceType {
    Imperative,
    DeclarativePast,
    DeclarativePresent,
    ConditionalWhen,
    ModalExpectation,
    PassiveExpectation,
    CrashPhrase,
    Unparseable,
}

/// `[subject] [action] [object] [preposition] [object2]` extracted from one
/// clause. `action` is a lemma; `verb` keeps the surface form.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedPhrase {
    pub subject: String,
    pub action: String,
    pub verb: String,
    pub object: String,
    pub preposition: String,
    pub object2: String,
    pub raw: String,
}

impl ParsedPhrase {
    /// Non-empty elements in tuple order, for display.
    pub fn elements(&self) -> Vec<&str> {
        [
            self.subject.as_str(),
            self.action.as_str(),
            self.object.as_str(),
            self.preposition.as_str(),
            self.object2.as_str(),
        ]
        .into_iter()
        .filter(|s| !s.is_empty())
        .collect()
    }
}

/// Result of parsing one sentence.
///
/// `ob_part` carries behavior descriptions (observed or expected);
/// `s2r_part` carries a user action. Conditional sentences may fill both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParseOutcome {
    pub sentence_type: SentenceType,
    pub ob_part: Option<ParsedPhrase>,
    pub s2r_part: Option<ParsedPhrase>,
}
