//! App execution model: a directed weighted graph of screens and the GUI
//! interactions that connect them, built from recorded traces.

mod build;
mod fingerprint;
pub mod trace;

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use build::{build_model, BuiltGraph, GraphBuilder};
pub use fingerprint::fingerprint_screen;
pub use trace::{load_traces, TraceEvent, TraceFile, TraceNode, TraceScreen, TraceSource};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("empty screen")]
    EmptyScreen,
    #[error("no traces supplied")]
    NoTraces,
    #[error("trace {trace} has no events")]
    EmptyTrace { trace: String },
    #[error("duplicate trace id {0}")]
    DuplicateTrace(String),
    #[error("trace {trace} belongs to app {found}, expected {expected}")]
    MixedApps {
        trace: String,
        expected: String,
        found: String,
    },
    #[error("trace {trace}: first event must be LAUNCH")]
    FirstEventNotLaunch { trace: String },
    #[error("trace {trace} event {index}: result screen does not match the next event's source screen")]
    Continuity { trace: String, index: usize },
    #[error("trace {trace} event {index}: {reason}")]
    BadEvent {
        trace: String,
        index: usize,
        reason: String,
    },
    #[error("trace {trace} event {index}: interaction already recorded with a different result screen")]
    Nondeterministic { trace: String, index: usize },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AppInfo {
    pub name: String,
    pub version: String,
    pub package: String,
}

/// GUI event classes recorded in traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EventKind {
    Launch,
    Tap,
    LongTap,
    Type,
    Swipe,
    Back,
    Rotate,
}

impl EventKind {
    pub const ALL: [EventKind; 7] = [
        EventKind::Launch,
        EventKind::Tap,
        EventKind::LongTap,
        EventKind::Type,
        EventKind::Swipe,
        EventKind::Back,
        EventKind::Rotate,
    ];

    /// Events that always act on a specific component.
    pub fn requires_component(self) -> bool {
        matches!(self, EventKind::Tap | EventKind::LongTap | EventKind::Type)
    }

    /// Events that never carry a component.
    pub fn is_global(self) -> bool {
        matches!(self, EventKind::Launch | EventKind::Back | EventKind::Rotate)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Launch => "LAUNCH",
            EventKind::Tap => "TAP",
            EventKind::LongTap => "LONG_TAP",
            EventKind::Type => "TYPE",
            EventKind::Swipe => "SWIPE",
            EventKind::Back => "BACK",
            EventKind::Rotate => "ROTATE",
        }
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Screen rectangle `[x1, y1, x2, y2]` in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bounds(pub [i32; 4]);

impl Bounds {
    pub fn width(&self) -> i32 {
        self.0[2] - self.0[0]
    }

    pub fn height(&self) -> i32 {
        self.0[3] - self.0[1]
    }

    pub fn is_valid(&self) -> bool {
        self.0[0] <= self.0[2] && self.0[1] <= self.0[3]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuiComponent {
    pub kind: String,
    #[serde(default)]
    pub id_name: String,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub description: String,
    pub bounds: Bounds,
    #[serde(default)]
    pub parent: Option<usize>,
    #[serde(default)]
    pub children: Vec<usize>,
}

impl GuiComponent {
    /// Short widget class name, e.g. `Button` for `android.widget.Button`.
    pub fn short_kind(&self) -> &str {
        self.kind.rsplit('.').next().unwrap_or(&self.kind)
    }

    /// Best human-readable name: label, then description, then identifier
    /// (underscores as spaces), then widget kind.
    pub fn display_name(&self) -> String {
        if !self.label.trim().is_empty() {
            self.label.trim().to_string()
        } else if !self.description.trim().is_empty() {
            self.description.trim().to_string()
        } else if !self.id_name.trim().is_empty() {
            self.id_name.trim().replace('_', " ")
        } else {
            self.short_kind().to_string()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ScreenId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct InteractionId(pub usize);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Screen {
    pub id: ScreenId,
    pub fingerprint: String,
    pub activity: String,
    pub components: Vec<GuiComponent>,
    pub distance_from_start: usize,
    /// Plain screenshot of this screen, taken from the first recorded event
    /// that started on it.
    #[serde(default)]
    pub screenshot: String,
}

/// Where an interaction was observed: trace id and event index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ExecOrder {
    pub trace: String,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interaction {
    pub id: InteractionId,
    pub source: ScreenId,
    pub result: ScreenId,
    pub event: EventKind,
    /// Index into the source screen's component list.
    pub component: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_text: Option<String>,
    pub weight: u32,
    pub screenshot: String,
    pub annotated_screenshot: String,
    pub exec_orders: Vec<ExecOrder>,
}

impl Interaction {
    pub fn is_loop(&self) -> bool {
        self.source == self.result
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ModelDocument {
    app: AppInfo,
    start: ScreenId,
    screens: Vec<Screen>,
    interactions: Vec<Interaction>,
}

/// The immutable execution model.
///
/// Screens are stored sorted by `(distance_from_start, fingerprint)` and
/// interactions by `(source, event, component)`, so ids are deterministic for
/// a given trace set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModelDocument", into = "ModelDocument")]
pub struct ExecutionModel {
    app: AppInfo,
    start: ScreenId,
    screens: Vec<Screen>,
    interactions: Vec<Interaction>,
    by_fingerprint: HashMap<String, ScreenId>,
    outgoing: Vec<Vec<InteractionId>>,
}

impl From<ExecutionModel> for ModelDocument {
    fn from(m: ExecutionModel) -> Self {
        ModelDocument {
            app: m.app,
            start: m.start,
            screens: m.screens,
            interactions: m.interactions,
        }
    }
}

impl TryFrom<ModelDocument> for ExecutionModel {
    type Error = ModelError;

    fn try_from(doc: ModelDocument) -> Result<Self, ModelError> {
        ExecutionModel::assemble(doc.app, doc.start, doc.screens, doc.interactions)
    }
}

impl ExecutionModel {
    /// Builds indexes and checks structural invariants.
    pub(crate) fn assemble(
        app: AppInfo,
        start: ScreenId,
        screens: Vec<Screen>,
        interactions: Vec<Interaction>,
    ) -> Result<Self, ModelError> {
        let invalid = |m: String| Err(ModelError::Invalid(m));
        let mut by_fingerprint = HashMap::with_capacity(screens.len());
        for (i, s) in screens.iter().enumerate() {
            if s.id != ScreenId(i) {
                return invalid(format!("screen {i} has id {}", s.id.0));
            }
            if by_fingerprint.insert(s.fingerprint.clone(), s.id).is_some() {
                return invalid(format!("duplicate fingerprint {}", s.fingerprint));
            }
        }
        if start.0 >= screens.len() {
            return invalid("start screen out of range".into());
        }
        let mut outgoing = vec![Vec::new(); screens.len()];
        let mut seen = std::collections::HashSet::new();
        for (i, e) in interactions.iter().enumerate() {
            if e.id != InteractionId(i) {
                return invalid(format!("interaction {i} has id {}", e.id.0));
            }
            if e.source.0 >= screens.len() || e.result.0 >= screens.len() {
                return invalid(format!("interaction {i} references a missing screen"));
            }
            if e.weight == 0 {
                return invalid(format!("interaction {i} has zero weight"));
            }
            if let Some(c) = e.component {
                if c >= screens[e.source.0].components.len() {
                    return invalid(format!("interaction {i} references a missing component"));
                }
            }
            if e.event == EventKind::Type && e.input_text.is_none() {
                return invalid(format!("TYPE interaction {i} has no input text"));
            }
            if !seen.insert((e.source, e.event, e.component)) {
                return invalid(format!("interaction {i} duplicates an existing edge"));
            }
            outgoing[e.source.0].push(e.id);
        }
        let start_edges = &outgoing[start.0];
        if start_edges.len() != 1 || interactions[start_edges[0].0].event != EventKind::Launch {
            return invalid("start screen must have exactly one outgoing LAUNCH interaction".into());
        }
        // Children in a deterministic order: result fingerprint, then event,
        // then component index.
        for list in &mut outgoing {
            list.sort_by(|a, b| {
                let (a, b) = (&interactions[a.0], &interactions[b.0]);
                (&screens[a.result.0].fingerprint, a.event, a.component).cmp(&(
                    &screens[b.result.0].fingerprint,
                    b.event,
                    b.component,
                ))
            });
        }
        let model = ExecutionModel {
            app,
            start,
            screens,
            interactions,
            by_fingerprint,
            outgoing,
        };
        let dist = model.hop_distances(start);
        for s in &model.screens {
            match dist[s.id.0] {
                None => return invalid(format!("screen {} unreachable from start", s.fingerprint)),
                Some(d) if d != s.distance_from_start => {
                    return invalid(format!("screen {} has stale distance", s.fingerprint))
                }
                _ => {}
            }
        }
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::from_json(&text)
    }

    pub fn app(&self) -> &AppInfo {
        &self.app
    }

    pub fn app_id(&self) -> &str {
        &self.app.package
    }

    pub fn start(&self) -> &Screen {
        &self.screens[self.start.0]
    }

    /// The single LAUNCH interaction leaving the start screen.
    pub fn launch(&self) -> &Interaction {
        &self.interactions[self.outgoing[self.start.0][0].0]
    }

    pub fn screens(&self) -> &[Screen] {
        &self.screens
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }

    pub fn screen(&self, id: ScreenId) -> Option<&Screen> {
        self.screens.get(id.0)
    }

    pub fn interaction(&self, id: InteractionId) -> Option<&Interaction> {
        self.interactions.get(id.0)
    }

    pub fn screen_by_fingerprint(&self, fingerprint: &str) -> Option<&Screen> {
        self.by_fingerprint.get(fingerprint).map(|id| &self.screens[id.0])
    }

    pub fn contains(&self, id: ScreenId) -> bool {
        id.0 < self.screens.len()
    }

    /// Outgoing interactions of a screen in deterministic child order.
    pub fn outgoing(&self, id: ScreenId) -> impl Iterator<Item = &Interaction> + '_ {
        self.outgoing
            .get(id.0)
            .into_iter()
            .flatten()
            .map(|e| &self.interactions[e.0])
    }

    /// The component an interaction acts on, if any.
    pub fn component_of(&self, interaction: &Interaction) -> Option<&GuiComponent> {
        interaction
            .component
            .map(|c| &self.screens[interaction.source.0].components[c])
    }

    /// Unweighted hop counts from `from` to every screen (`None` = unreachable).
    pub fn hop_distances(&self, from: ScreenId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.screens.len()];
        let mut queue = VecDeque::new();
        dist[from.0] = Some(0);
        queue.push_back(from);
        while let Some(s) = queue.pop_front() {
            let d = dist[s.0].unwrap_or(0);
            for e in self.outgoing(s) {
                if dist[e.result.0].is_none() {
                    dist[e.result.0] = Some(d + 1);
                    queue.push_back(e.result);
                }
            }
        }
        dist
    }

    /// Screens satisfying `predicate`, ascending by distance from start with
    /// ties broken by fingerprint.
    pub fn screens_matching<F>(&self, predicate: F) -> Vec<&Screen>
    where
        F: Fn(&Screen) -> bool,
    {
        // Storage order already is (distance, fingerprint).
        self.screens.iter().filter(|s| predicate(s)).collect()
    }
}
