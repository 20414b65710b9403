//! Next-step prediction: ranks paths from the current execution state to
//! the screen where the observed behavior shows up.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec_model::{EventKind, ExecutionModel, Interaction, InteractionId, ScreenId};
use crate::{Scalar, Score};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PredictError {
    #[error("cannot score an empty path")]
    EmptyPath,
    #[error("screen {0} is not part of the model")]
    UnknownScreen(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictorConfig {
    /// Longest simple path enumerated, in edges.
    pub max_path_len: usize,
    pub max_steps: usize,
    pub max_paths: usize,
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            max_path_len: 8,
            max_steps: 5,
            max_paths: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuggestedStep {
    pub interaction: InteractionId,
    pub text: String,
    pub annotated_screenshot: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuggestionPath<S = Score> {
    pub edges: Vec<InteractionId>,
    pub score: S,
    pub truncated_steps: Vec<SuggestedStep>,
}

/// Path score: mean edge weight plus `1/n`, computed as `(Σw + 1) / n` so
/// that equal rationals give identical floats.
pub fn score_path<S: Scalar>(weights: &[u32]) -> Result<S, PredictError> {
    if weights.is_empty() {
        return Err(PredictError::EmptyPath);
    }
    let sum: usize = weights.iter().map(|&w| w as usize).sum();
    Ok(S::ratio(sum + 1, weights.len()))
}

/// Every simple path (no repeated screen) from `from` to `to` with at most
/// `max_len` edges. Parallel edges yield distinct paths; self-edges never
/// appear.
pub fn simple_paths(model: &ExecutionModel, from: ScreenId, to: ScreenId, max_len: usize) -> Vec<Vec<InteractionId>> {
    let mut out = Vec::new();
    if from == to || max_len == 0 {
        return out;
    }
    let mut on_path = vec![false; model.screens().len()];
    let mut path = Vec::new();
    on_path[from.0] = true;
    extend_paths(model, from, to, max_len, &mut on_path, &mut path, &mut out);
    out
}

fn extend_paths(
    model: &ExecutionModel,
    at: ScreenId,
    to: ScreenId,
    max_len: usize,
    on_path: &mut [bool],
    path: &mut Vec<InteractionId>,
    out: &mut Vec<Vec<InteractionId>>,
) {
    for edge in model.outgoing(at) {
        let next = edge.result;
        if on_path[next.0] {
            continue;
        }
        path.push(edge.id);
        if next == to {
            out.push(path.clone());
        } else if path.len() < max_len {
            on_path[next.0] = true;
            extend_paths(model, next, to, max_len, on_path, path, out);
            on_path[next.0] = false;
        }
        path.pop();
    }
}

/// Scored simple paths, best first. Ties go to the shorter path, then to
/// the lexicographically smaller screen-fingerprint sequence, then to the
/// smaller edge ids.
pub fn rank_paths<S: Scalar>(
    model: &ExecutionModel,
    from: ScreenId,
    to: ScreenId,
    max_len: usize,
) -> Vec<(Vec<InteractionId>, S)> {
    let mut scored: Vec<(Vec<InteractionId>, S, Vec<&str>)> = simple_paths(model, from, to, max_len)
        .into_iter()
        .map(|p| {
            let weights: Vec<u32> = p.iter().map(|&e| edge(model, e).weight).collect();
            let score = score_path::<S>(&weights).expect("paths are non-empty");
            let mut prints = vec![model.screens()[from.0].fingerprint.as_str()];
            prints.extend(
                p.iter()
                    .map(|&e| model.screens()[edge(model, e).result.0].fingerprint.as_str()),
            );
            (p, score, prints)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(Ordering::Equal)
            .then_with(|| a.0.len().cmp(&b.0.len()))
            .then_with(|| a.2.cmp(&b.2))
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.into_iter().map(|(p, s, _)| (p, s)).collect()
}

fn edge(model: &ExecutionModel, id: InteractionId) -> &Interaction {
    &model.interactions()[id.0]
}

/// Inserts, before each path edge, the heaviest self-edge of its source
/// screen (at most one per screen).
pub fn augment_with_loops(model: &ExecutionModel, path: &[InteractionId]) -> Vec<InteractionId> {
    let mut out = Vec::with_capacity(path.len() * 2);
    for &id in path {
        let source = edge(model, id).source;
        let best_loop = model
            .outgoing(source)
            .filter(|e| e.is_loop())
            .min_by(|a, b| b.weight.cmp(&a.weight).then_with(|| a.id.cmp(&b.id)));
        if let Some(l) = best_loop {
            out.push(l.id);
        }
        out.push(id);
    }
    out
}

/// Up to `config.max_paths` suggestions leading from `current` to `target`.
pub fn predict<S: Scalar>(
    model: &ExecutionModel,
    current: ScreenId,
    target: ScreenId,
    config: &PredictorConfig,
) -> Result<Vec<SuggestionPath<S>>, PredictError> {
    for s in [current, target] {
        if !model.contains(s) {
            return Err(PredictError::UnknownScreen(s.0));
        }
    }
    let mut out: Vec<SuggestionPath<S>> = Vec::new();
    for (edges, score) in rank_paths::<S>(model, current, target, config.max_path_len) {
        if out.len() >= config.max_paths {
            break;
        }
        let mut steps = augment_with_loops(model, &edges);
        steps.truncate(config.max_steps);
        if out.iter().any(|p| {
            p.truncated_steps
                .iter()
                .map(|s| s.interaction)
                .eq(steps.iter().copied())
        }) {
            continue;
        }
        let truncated_steps = steps
            .into_iter()
            .map(|id| {
                let e = edge(model, id);
                SuggestedStep {
                    interaction: id,
                    text: step_text(model, e),
                    annotated_screenshot: e.annotated_screenshot.clone(),
                }
            })
            .collect();
        out.push(SuggestionPath {
            edges,
            score,
            truncated_steps,
        });
    }
    Ok(out)
}

/// Templated description of one interaction.
pub fn step_text(model: &ExecutionModel, interaction: &Interaction) -> String {
    let target = model.component_of(interaction).map(|c| c.display_name());
    match (interaction.event, target) {
        (EventKind::Launch, _) => "Launch the app".to_string(),
        (EventKind::Tap, Some(t)) => format!("Tap on '{t}'"),
        (EventKind::LongTap, Some(t)) => format!("Long tap on '{t}'"),
        (EventKind::Type, Some(t)) => format!("Enter text in '{t}'"),
        (EventKind::Swipe, Some(t)) => format!("Swipe on '{t}'"),
        (EventKind::Swipe, None) => "Swipe on the screen".to_string(),
        (EventKind::Back, _) => "Press the back button".to_string(),
        (EventKind::Rotate, _) => "Rotate the screen".to_string(),
        (e, None) => format!(
            "{} on the screen",
            capitalize(&e.as_str().replace('_', " ").to_lowercase())
        ),
    }
}

fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}
