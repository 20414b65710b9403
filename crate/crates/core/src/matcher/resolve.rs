use serde::{Deserialize, Serialize};

use super::{step_query, strip_literals, MatchError, Matcher};
use crate::exec_model::{EventKind, ExecutionModel, Interaction, InteractionId, ScreenId};
use crate::nlp::ParsedPhrase;
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ResolutionOutcome {
    Resolved,
    Ambiguous,
    Mismatch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum AmbiguityKind {
    MultiComponent,
    MultiEvent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TupleElement {
    Action,
    Object,
    Object2,
}

impl TupleElement {
    pub fn as_str(self) -> &'static str {
        match self {
            TupleElement::Action => "action",
            TupleElement::Object => "object",
            TupleElement::Object2 => "object2",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepResolution {
    pub outcome: ResolutionOutcome,
    pub resolved: Option<InteractionId>,
    pub ambiguity_kind: Option<AmbiguityKind>,
    pub missing_vocabulary: Vec<TupleElement>,
    pub candidates: Vec<InteractionId>,
}

impl StepResolution {
    fn resolved(id: InteractionId) -> Self {
        StepResolution {
            outcome: ResolutionOutcome::Resolved,
            resolved: Some(id),
            ambiguity_kind: None,
            missing_vocabulary: Vec::new(),
            candidates: vec![id],
        }
    }

    fn ambiguous(kind: AmbiguityKind, candidates: Vec<InteractionId>) -> Self {
        StepResolution {
            outcome: ResolutionOutcome::Ambiguous,
            resolved: None,
            ambiguity_kind: Some(kind),
            missing_vocabulary: Vec::new(),
            candidates,
        }
    }

    fn mismatch(missing: Vec<TupleElement>) -> Self {
        StepResolution {
            outcome: ResolutionOutcome::Mismatch,
            resolved: None,
            ambiguity_kind: None,
            missing_vocabulary: missing,
            candidates: Vec::new(),
        }
    }
}

/// Screens reachable from `from`, in depth-first order. Children are
/// visited in the model's outgoing order (result fingerprint first).
pub(crate) fn dfs_order(model: &ExecutionModel, from: ScreenId) -> Vec<ScreenId> {
    let mut visited = vec![false; model.screens().len()];
    let mut order = Vec::new();
    let mut stack = vec![from];
    while let Some(s) = stack.pop() {
        if std::mem::replace(&mut visited[s.0], true) {
            continue;
        }
        order.push(s);
        let children: Vec<ScreenId> = model.outgoing(s).map(|i| i.result).collect();
        stack.extend(children.into_iter().rev().filter(|c| !visited[c.0]));
    }
    order
}

impl<S: Scalar> Matcher<'_, S> {
    /// Event classes a step description can denote. An object such as
    /// "back" overrides the verb ("go back").
    pub fn step_events(&self, phrase: &ParsedPhrase) -> Vec<EventKind> {
        if let Some(e) = self.lexicon.object_event(&phrase.object) {
            return vec![e];
        }
        self.lexicon
            .verb(&phrase.action)
            .map(|v| v.events.clone())
            .unwrap_or_default()
    }

    /// Similarity of an interaction's component to the step query, or
    /// `None` when the component does not match. Interactions without a
    /// target (BACK, ROTATE, a plain SWIPE) match any query.
    fn interaction_score(&self, model: &ExecutionModel, query: &str, edge: &Interaction) -> Option<S> {
        match model.component_of(edge) {
            None => Some(S::one()),
            Some(_) if query.is_empty() => Some(S::one()),
            Some(c) => {
                let s = self.component_similarity(query, c);
                (s >= self.threshold).then_some(s)
            }
        }
    }

    /// Maps a step description to one interaction reachable from `current`.
    pub fn resolve_s2r(
        &self,
        model: &ExecutionModel,
        current: ScreenId,
        phrase: &ParsedPhrase,
    ) -> Result<StepResolution, MatchError> {
        if !model.contains(current) {
            return Err(MatchError::Desynchronized(current.0));
        }
        let events = self.step_events(phrase);
        let reachable = dfs_order(model, current);
        let query = step_query(phrase, self.lexicon);

        let mut found: Vec<(&Interaction, S)> = Vec::new();
        for &screen in &reachable {
            for edge in model.outgoing(screen) {
                if !events.contains(&edge.event) {
                    continue;
                }
                if let Some(s) = self.interaction_score(model, &query, edge) {
                    found.push((edge, s));
                }
            }
        }
        if found.is_empty() {
            return Ok(StepResolution::mismatch(
                self.diagnose(model, &reachable, phrase, &events),
            ));
        }

        let hops = model.hop_distances(current);
        let distance = |s: ScreenId| hops[s.0].unwrap_or(usize::MAX);
        let nearest = found.iter().map(|(e, _)| distance(e.source)).min().unwrap_or(0);
        let source = found
            .iter()
            .filter(|(e, _)| distance(e.source) == nearest)
            .map(|(e, _)| e)
            .max_by(|a, b| {
                a.weight.cmp(&b.weight).then_with(|| {
                    let fa = &model.screens()[a.source.0].fingerprint;
                    let fb = &model.screens()[b.source.0].fingerprint;
                    fb.cmp(fa)
                })
            })
            .map(|e| e.source)
            .unwrap_or(current);

        let at_source: Vec<&(&Interaction, S)> = found.iter().filter(|(e, _)| e.source == source).collect();
        let best = at_source
            .iter()
            .map(|(_, s)| s.clone())
            .fold(S::zero(), |a, s| if s > a { s } else { a });
        let top: Vec<&Interaction> = at_source.iter().filter(|(_, s)| *s == best).map(|(e, _)| *e).collect();

        if top.len() == 1 {
            return Ok(StepResolution::resolved(top[0].id));
        }
        let ids = top.iter().map(|e| e.id).collect();
        let same_component = top.iter().all(|e| e.component == top[0].component);
        let kind = if same_component {
            AmbiguityKind::MultiEvent
        } else {
            AmbiguityKind::MultiComponent
        };
        Ok(StepResolution::ambiguous(kind, ids))
    }

    /// Tuple elements that match nothing on their own in the reachable
    /// part of the model. Never empty: when every element matches alone
    /// but not together, the object parts (or the action) are reported.
    fn diagnose(
        &self,
        model: &ExecutionModel,
        reachable: &[ScreenId],
        phrase: &ParsedPhrase,
        events: &[EventKind],
    ) -> Vec<TupleElement> {
        let mut missing = Vec::new();
        let action_ok = reachable
            .iter()
            .any(|&s| model.outgoing(s).any(|e| events.contains(&e.event)));
        if !action_ok {
            missing.push(TupleElement::Action);
        }
        for (element, text) in [
            (TupleElement::Object, &phrase.object),
            (TupleElement::Object2, &phrase.object2),
        ] {
            let q = self.element_query(text);
            if q.is_empty() {
                continue;
            }
            let hit = reachable.iter().any(|&s| {
                model.screens()[s.0]
                    .components
                    .iter()
                    .any(|c| self.component_matches(&q, c))
            });
            if !hit {
                missing.push(element);
            }
        }
        if missing.is_empty() {
            for (element, text) in [
                (TupleElement::Object, &phrase.object),
                (TupleElement::Object2, &phrase.object2),
            ] {
                if !self.element_query(text).is_empty() {
                    missing.push(element);
                }
            }
        }
        if missing.is_empty() {
            missing.push(TupleElement::Action);
        }
        missing
    }

    fn element_query(&self, text: &str) -> String {
        let cleaned = strip_literals(text);
        let words: Vec<&str> = cleaned
            .split_whitespace()
            .filter(|w| !self.lexicon.is_widget_noun(w) && !super::is_number(w))
            .collect();
        super::normalize(&words.join(" "), self.lexicon)
    }
}
