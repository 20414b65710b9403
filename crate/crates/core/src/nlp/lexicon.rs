use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::Deserialize;

use super::NlpError;
use crate::exec_model::EventKind;

const BUILTIN: &str = include_str!("lexicon.json");

#[derive(Debug, Clone, Deserialize)]
struct VerbDoc {
    lemma: String,
    #[serde(default)]
    events: Vec<EventKind>,
    #[serde(default)]
    generic: bool,
}

#[derive(Debug, Clone, Deserialize)]
struct IrregularDoc {
    form: String,
    lemma: String,
    #[serde(default)]
    past: bool,
    #[serde(default)]
    participle: bool,
}

/// On-disk lexicon layout. Every section is optional so that an override
/// file only needs to list what it adds.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default)]
struct LexiconDoc {
    verbs: Vec<VerbDoc>,
    irregular: Vec<IrregularDoc>,
    determiners: Vec<String>,
    stopwords: Vec<String>,
    prepositions: Vec<String>,
    modal_markers: Vec<String>,
    auxiliaries: Vec<String>,
    negations: Vec<String>,
    condition_markers: Vec<String>,
    crash_markers: Vec<String>,
    first_person: Vec<String>,
    fillers: Vec<String>,
    generic_values: Vec<String>,
    widget_nouns: Vec<String>,
    generic_subjects: Vec<String>,
    object_events: BTreeMap<String, EventKind>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerbEntry {
    pub lemma: String,
    pub events: Vec<EventKind>,
    /// Pure interaction verbs ("tap", "enter") carry no domain vocabulary
    /// and are left out of component queries.
    pub generic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Irregular {
    past: bool,
    participle: bool,
}

/// Closed vocabulary driving the sentence grammar. All lookups are
/// case-insensitive.
#[derive(Debug, Clone)]
pub struct Lexicon {
    verbs: HashMap<String, VerbEntry>,
    multiword_verbs: Vec<Vec<String>>,
    irregular: HashMap<String, (String, Irregular)>,
    determiners: HashSet<String>,
    stopwords: HashSet<String>,
    prepositions: HashSet<String>,
    modals: HashSet<String>,
    auxiliaries: HashSet<String>,
    negations: HashSet<String>,
    condition_markers: HashSet<String>,
    crash_markers: Vec<String>,
    first_person: HashSet<String>,
    fillers: HashSet<String>,
    generic_values: HashSet<String>,
    widget_nouns: HashSet<String>,
    generic_subjects: HashSet<String>,
    object_events: HashMap<String, EventKind>,
}

fn lower_set(items: Vec<String>, into: &mut HashSet<String>) {
    into.extend(items.into_iter().map(|s| s.trim().to_lowercase()));
}

impl Lexicon {
    /// The vocabulary shipped with the crate.
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("builtin lexicon is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, NlpError> {
        let doc: LexiconDoc = serde_json::from_str(text).map_err(|e| NlpError::Lexicon(e.to_string()))?;
        let mut lex = Self::empty();
        lex.merge(doc);
        lex.validate()?;
        Ok(lex)
    }

    /// Builtin vocabulary extended with the entries in `path`. Verbs listed
    /// in the file replace builtin verbs with the same lemma.
    pub fn load_extending_builtin(path: &Path) -> Result<Self, NlpError> {
        let text = fs::read_to_string(path).map_err(|e| NlpError::Lexicon(format!("{}: {e}", path.display())))?;
        let doc: LexiconDoc = serde_json::from_str(&text).map_err(|e| NlpError::Lexicon(e.to_string()))?;
        let mut lex = Self::builtin();
        lex.merge(doc);
        lex.validate()?;
        Ok(lex)
    }

    fn empty() -> Self {
        Lexicon {
            verbs: HashMap::new(),
            multiword_verbs: Vec::new(),
            irregular: HashMap::new(),
            determiners: HashSet::new(),
            stopwords: HashSet::new(),
            prepositions: HashSet::new(),
            modals: HashSet::new(),
            auxiliaries: HashSet::new(),
            negations: HashSet::new(),
            condition_markers: HashSet::new(),
            crash_markers: Vec::new(),
            first_person: HashSet::new(),
            fillers: HashSet::new(),
            generic_values: HashSet::new(),
            widget_nouns: HashSet::new(),
            generic_subjects: HashSet::new(),
            object_events: HashMap::new(),
        }
    }

    fn merge(&mut self, doc: LexiconDoc) {
        for v in doc.verbs {
            let lemma = v.lemma.trim().to_lowercase();
            let words: Vec<String> = lemma.split_whitespace().map(str::to_string).collect();
            if words.len() > 1 && !self.multiword_verbs.contains(&words) {
                self.multiword_verbs.push(words);
            }
            self.verbs.insert(
                lemma.clone(),
                VerbEntry {
                    lemma,
                    events: v.events,
                    generic: v.generic,
                },
            );
        }
        // Longest phrases first so "long press" wins over a shorter prefix.
        self.multiword_verbs
            .sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        for i in doc.irregular {
            self.irregular.insert(
                i.form.to_lowercase(),
                (
                    i.lemma.to_lowercase(),
                    Irregular {
                        past: i.past,
                        participle: i.participle,
                    },
                ),
            );
        }
        lower_set(doc.determiners, &mut self.determiners);
        lower_set(doc.stopwords, &mut self.stopwords);
        lower_set(doc.prepositions, &mut self.prepositions);
        lower_set(doc.modal_markers, &mut self.modals);
        lower_set(doc.auxiliaries, &mut self.auxiliaries);
        lower_set(doc.negations, &mut self.negations);
        lower_set(doc.condition_markers, &mut self.condition_markers);
        lower_set(doc.first_person, &mut self.first_person);
        lower_set(doc.fillers, &mut self.fillers);
        lower_set(doc.generic_values, &mut self.generic_values);
        lower_set(doc.widget_nouns, &mut self.widget_nouns);
        lower_set(doc.generic_subjects, &mut self.generic_subjects);
        for m in doc.crash_markers {
            let m = m.to_lowercase();
            if !self.crash_markers.contains(&m) {
                self.crash_markers.push(m);
            }
        }
        for (k, v) in doc.object_events {
            self.object_events.insert(k.to_lowercase(), v);
        }
    }

    fn validate(&self) -> Result<(), NlpError> {
        for event in EventKind::ALL {
            if !self.verbs.values().any(|v| v.events.contains(&event)) {
                return Err(NlpError::Lexicon(format!("no verb maps to event {event}")));
            }
        }
        Ok(())
    }

    pub fn verb(&self, lemma: &str) -> Option<&VerbEntry> {
        self.verbs.get(&lemma.to_lowercase())
    }

    pub fn is_verb_lemma(&self, word: &str) -> bool {
        self.verbs.contains_key(word)
    }

    pub fn verbs(&self) -> impl Iterator<Item = &VerbEntry> {
        self.verbs.values()
    }

    pub(crate) fn multiword_verbs(&self) -> &[Vec<String>] {
        &self.multiword_verbs
    }

    pub(crate) fn irregular_lemma(&self, form: &str) -> Option<&str> {
        self.irregular.get(form).map(|(l, _)| l.as_str())
    }

    pub(crate) fn is_irregular_past(&self, form: &str) -> bool {
        self.irregular.get(form).is_some_and(|(_, i)| i.past)
    }

    pub(crate) fn is_irregular_participle(&self, form: &str) -> bool {
        self.irregular.get(form).is_some_and(|(_, i)| i.participle)
    }

    pub fn is_determiner(&self, w: &str) -> bool {
        self.determiners.contains(&w.to_lowercase())
    }

    pub fn is_stopword(&self, w: &str) -> bool {
        let w = w.to_lowercase();
        self.stopwords.contains(&w) || self.determiners.contains(&w)
    }

    pub fn is_preposition(&self, w: &str) -> bool {
        self.prepositions.contains(&w.to_lowercase())
    }

    pub fn is_modal(&self, w: &str) -> bool {
        self.modals.contains(&w.to_lowercase())
    }

    pub fn is_auxiliary(&self, w: &str) -> bool {
        self.auxiliaries.contains(&w.to_lowercase())
    }

    pub fn is_negation(&self, w: &str) -> bool {
        self.negations.contains(&w.to_lowercase())
    }

    pub fn is_condition_marker(&self, w: &str) -> bool {
        self.condition_markers.contains(&w.to_lowercase())
    }

    pub fn is_first_person(&self, w: &str) -> bool {
        self.first_person.contains(&w.to_lowercase())
    }

    pub fn is_filler(&self, w: &str) -> bool {
        self.fillers.contains(&w.to_lowercase())
    }

    pub fn is_generic_value(&self, w: &str) -> bool {
        self.generic_values.contains(&w.trim().to_lowercase())
    }

    pub fn is_widget_noun(&self, w: &str) -> bool {
        self.widget_nouns.contains(&w.to_lowercase())
    }

    /// Subjects that name the app or the reporter rather than a GUI element.
    pub fn is_generic_subject(&self, w: &str) -> bool {
        self.generic_subjects.contains(&w.trim().to_lowercase())
    }

    /// True when `text` mentions a crash marker as a whole-word phrase.
    pub fn mentions_crash(&self, text: &str) -> bool {
        let words: Vec<String> = text
            .split(|c: char| !c.is_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_lowercase)
            .collect();
        self.crash_markers.iter().any(|marker| {
            let m: Vec<&str> = marker.split_whitespace().collect();
            !m.is_empty() && words.windows(m.len()).any(|w| w.iter().zip(&m).all(|(a, b)| a == b))
        })
    }

    /// Event forced by the object alone, e.g. "go back" ⇒ BACK.
    pub fn object_event(&self, object: &str) -> Option<EventKind> {
        self.object_events.get(&object.trim().to_lowercase()).copied()
    }
}

impl Default for Lexicon {
    fn default() -> Self {
        Self::builtin()
    }
}
