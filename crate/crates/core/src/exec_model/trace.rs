//! Recorded interaction traces, the input to model construction.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{AppInfo, Bounds, EventKind, GuiComponent, ModelError};

/// Who produced a trace. Only human executions count toward edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TraceSource {
    Human,
    Automated,
}

/// A component as it appears in a trace: recursive, with children inline.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceNode {
    pub kind: String,
    #[serde(default)]
    pub id_name: String,
    #[serde(default)]
    pub label: String,
    #[serde(default)]
    pub description: String,
    pub bounds: Bounds,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<TraceNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceScreen {
    pub activity: String,
    pub components: Vec<TraceNode>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceEvent {
    pub action: EventKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_text: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub component: Option<TraceNode>,
    pub source_screen: TraceScreen,
    pub result_screen: TraceScreen,
    #[serde(default)]
    pub screenshot: String,
    #[serde(default)]
    pub annotated_screenshot: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    /// Stable identifier used for provenance and build ordering. Filled from
    /// the file stem when loading from disk and absent in the document.
    #[serde(default)]
    pub id: String,
    pub app: AppInfo,
    pub source: TraceSource,
    pub events: Vec<TraceEvent>,
}

impl TraceFile {
    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        serde_json::from_str(text).map_err(|e| ModelError::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let text = fs::read_to_string(path).map_err(|e| ModelError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let mut trace = Self::from_json(&text).map_err(|e| match e {
            ModelError::Parse(m) => ModelError::Parse(format!("{}: {m}", path.display())),
            other => other,
        })?;
        if trace.id.is_empty() {
            trace.id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
        }
        Ok(trace)
    }
}

/// Loads every `*.json` trace in `dir`, in file-name order.
pub fn load_traces(dir: &Path) -> Result<Vec<TraceFile>, ModelError> {
    let entries = fs::read_dir(dir).map_err(|e| ModelError::Io {
        path: dir.display().to_string(),
        message: e.to_string(),
    })?;
    let mut paths: Vec<_> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    paths.iter().map(|p| TraceFile::load(p)).collect()
}

/// Flattens a component forest into pre-order with parent/child links.
pub fn flatten(roots: &[TraceNode]) -> Vec<GuiComponent> {
    fn visit(node: &TraceNode, parent: Option<usize>, out: &mut Vec<GuiComponent>) -> usize {
        let index = out.len();
        out.push(GuiComponent {
            kind: node.kind.clone(),
            id_name: node.id_name.clone(),
            label: node.label.clone(),
            description: node.description.clone(),
            bounds: node.bounds,
            parent,
            children: Vec::new(),
        });
        for child in &node.children {
            let c = visit(child, Some(index), out);
            out[index].children.push(c);
        }
        index
    }
    let mut out = Vec::new();
    for root in roots {
        visit(root, None, &mut out);
    }
    out
}

/// Locates the event's component snapshot inside a flattened screen.
///
/// Exact match on every identity field first, then progressively drop the
/// label and identifier (recorders often capture text after the event).
pub(crate) fn locate_component(screen: &[GuiComponent], snap: &TraceNode) -> Option<usize> {
    let exact = |c: &GuiComponent| {
        c.kind == snap.kind && c.bounds == snap.bounds && c.id_name == snap.id_name && c.label == snap.label
    };
    let no_label = |c: &GuiComponent| c.kind == snap.kind && c.bounds == snap.bounds && c.id_name == snap.id_name;
    let shape = |c: &GuiComponent| c.kind == snap.kind && c.bounds == snap.bounds;
    screen
        .iter()
        .position(exact)
        .or_else(|| screen.iter().position(no_label))
        .or_else(|| screen.iter().position(shape))
}
