use std::collections::{HashMap, HashSet, VecDeque};

use super::trace::{flatten, locate_component};
use super::{
    fingerprint_screen, EventKind, ExecOrder, ExecutionModel, GuiComponent, Interaction, InteractionId, ModelError,
    Screen, ScreenId, TraceFile, TraceSource,
};

struct ScreenDraft {
    fingerprint: String,
    activity: String,
    components: Vec<GuiComponent>,
    screenshot: String,
}

struct EdgeDraft {
    source: usize,
    result: usize,
    event: EventKind,
    component: Option<usize>,
    input_text: Option<String>,
    human_runs: u32,
    screenshot: String,
    annotated_screenshot: String,
    exec_orders: Vec<ExecOrder>,
}

#[derive(Default)]
struct Builder {
    screens: Vec<ScreenDraft>,
    by_fingerprint: HashMap<String, usize>,
    edges: Vec<EdgeDraft>,
    by_key: HashMap<(usize, EventKind, Option<usize>), usize>,
    start: Option<usize>,
}

impl Builder {
    fn intern(&mut self, fingerprint: String, activity: &str, components: Vec<GuiComponent>) -> usize {
        if let Some(&i) = self.by_fingerprint.get(&fingerprint) {
            return i;
        }
        let i = self.screens.len();
        self.by_fingerprint.insert(fingerprint.clone(), i);
        self.screens.push(ScreenDraft {
            fingerprint,
            activity: activity.to_string(),
            components,
            screenshot: String::new(),
        });
        i
    }
}

/// Builds an execution model from recorded traces.
///
/// Traces are processed in id order so the result does not depend on the
/// order they are supplied in. An edge's weight is the number of times human
/// traces executed it, or 1 when only automated traces did.
pub fn build_model(traces: &[TraceFile]) -> Result<ExecutionModel, ModelError> {
    let first = traces.first().ok_or(ModelError::NoTraces)?;
    let mut ordered: Vec<&TraceFile> = traces.iter().collect();
    ordered.sort_by(|a, b| a.id.cmp(&b.id));
    let mut ids = HashSet::new();
    for t in &ordered {
        if !ids.insert(t.id.as_str()) {
            return Err(ModelError::DuplicateTrace(t.id.clone()));
        }
        if t.app.package != first.app.package {
            return Err(ModelError::MixedApps {
                trace: t.id.clone(),
                expected: first.app.package.clone(),
                found: t.app.package.clone(),
            });
        }
    }

    let mut b = Builder::default();
    for trace in &ordered {
        ingest(&mut b, trace)?;
    }
    let start = b.start.expect("at least one LAUNCH ingested");
    finish(b, start, ordered[0].app.clone())
}

fn ingest(b: &mut Builder, trace: &TraceFile) -> Result<(), ModelError> {
    let bad = |index: usize, reason: &str| ModelError::BadEvent {
        trace: trace.id.clone(),
        index,
        reason: reason.to_string(),
    };
    match trace.events.first() {
        None => {
            return Err(ModelError::EmptyTrace {
                trace: trace.id.clone(),
            })
        }
        Some(e) if e.action != EventKind::Launch => {
            return Err(ModelError::FirstEventNotLaunch {
                trace: trace.id.clone(),
            })
        }
        _ => {}
    }

    let mut previous_result: Option<String> = None;
    for (index, event) in trace.events.iter().enumerate() {
        let source_tree = flatten(&event.source_screen.components);
        let result_tree = flatten(&event.result_screen.components);
        if source_tree.iter().chain(&result_tree).any(|c| !c.bounds.is_valid()) {
            return Err(bad(index, "component bounds are inverted"));
        }
        let source_fp = fingerprint_screen(&source_tree).map_err(|e| bad(index, &e.to_string()))?;
        let result_fp = fingerprint_screen(&result_tree).map_err(|e| bad(index, &e.to_string()))?;
        if let Some(prev) = &previous_result {
            if *prev != source_fp {
                return Err(ModelError::Continuity {
                    trace: trace.id.clone(),
                    index: index - 1,
                });
            }
        }
        previous_result = Some(result_fp.clone());

        let component = if event.action.is_global() {
            None
        } else {
            match &event.component {
                Some(snap) => Some(
                    locate_component(&source_tree, snap)
                        .ok_or_else(|| bad(index, "component not found on source screen"))?,
                ),
                None if event.action.requires_component() => {
                    return Err(bad(index, "event requires a component"));
                }
                None => None,
            }
        };
        let input_text = match event.action {
            EventKind::Type => match &event.input_text {
                Some(t) if !t.is_empty() => Some(t.clone()),
                _ => return Err(bad(index, "TYPE event without input text")),
            },
            _ => None,
        };

        let source = b.intern(source_fp, &event.source_screen.activity, source_tree);
        let result = b.intern(result_fp, &event.result_screen.activity, result_tree);
        if b.screens[source].screenshot.is_empty() {
            b.screens[source].screenshot = event.screenshot.clone();
        }

        match (b.start, event.action) {
            (None, EventKind::Launch) => b.start = Some(source),
            (Some(s), EventKind::Launch) if s != source => {
                return Err(bad(index, "LAUNCH from a screen other than the start screen"));
            }
            (Some(s), a) if s == source && a != EventKind::Launch => {
                return Err(bad(index, "only LAUNCH may leave the start screen"));
            }
            _ => {}
        }

        let order = ExecOrder {
            trace: trace.id.clone(),
            step: index,
        };
        let human = u32::from(trace.source == TraceSource::Human);
        let key = (source, event.action, component);
        match b.by_key.get(&key) {
            Some(&e) => {
                let edge = &mut b.edges[e];
                if edge.result != result {
                    return Err(ModelError::Nondeterministic {
                        trace: trace.id.clone(),
                        index,
                    });
                }
                edge.human_runs += human;
                edge.exec_orders.push(order);
            }
            None => {
                b.by_key.insert(key, b.edges.len());
                b.edges.push(EdgeDraft {
                    source,
                    result,
                    event: event.action,
                    component,
                    input_text,
                    human_runs: human,
                    screenshot: event.screenshot.clone(),
                    annotated_screenshot: event.annotated_screenshot.clone(),
                    exec_orders: vec![order],
                });
            }
        }
    }
    Ok(())
}

fn finish(b: Builder, start: usize, app: super::AppInfo) -> Result<ExecutionModel, ModelError> {
    finish_mapped(b, start, app).map(|(m, _, _)| m)
}

/// Like `finish`, also returning the new screen and interaction ids indexed
/// by draft position.
fn finish_mapped(
    b: Builder,
    start: usize,
    app: super::AppInfo,
) -> Result<(ExecutionModel, Vec<ScreenId>, Vec<InteractionId>), ModelError> {
    let n = b.screens.len();
    let mut adjacency = vec![Vec::new(); n];
    for e in &b.edges {
        adjacency[e.source].push(e.result);
    }
    let mut dist = vec![usize::MAX; n];
    dist[start] = 0;
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for &t in &adjacency[s] {
            if dist[t] == usize::MAX {
                dist[t] = dist[s] + 1;
                queue.push_back(t);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &c| (dist[a], &b.screens[a].fingerprint).cmp(&(dist[c], &b.screens[c].fingerprint)));
    let mut remap = vec![0; n];
    for (new, &old) in order.iter().enumerate() {
        remap[old] = new;
    }

    let mut drafts: Vec<Option<ScreenDraft>> = b.screens.into_iter().map(Some).collect();
    let screens: Vec<Screen> = order
        .iter()
        .enumerate()
        .map(|(new, &old)| {
            let d = drafts[old].take().expect("each screen moved once");
            Screen {
                id: ScreenId(new),
                fingerprint: d.fingerprint,
                activity: d.activity,
                components: d.components,
                distance_from_start: dist[old],
                screenshot: d.screenshot,
            }
        })
        .collect();

    let mut edges: Vec<(usize, EdgeDraft)> = b.edges.into_iter().enumerate().collect();
    edges.sort_by_key(|(_, e)| (remap[e.source], e.event, e.component));
    let mut edge_remap = vec![InteractionId(0); edges.len()];
    for (new, (old, _)) in edges.iter().enumerate() {
        edge_remap[*old] = InteractionId(new);
    }
    let interactions = edges
        .into_iter()
        .enumerate()
        .map(|(i, (_, mut e))| {
            e.exec_orders.sort();
            Interaction {
                id: InteractionId(i),
                source: ScreenId(remap[e.source]),
                result: ScreenId(remap[e.result]),
                event: e.event,
                component: e.component,
                input_text: e.input_text,
                weight: e.human_runs.max(1),
                screenshot: e.screenshot,
                annotated_screenshot: e.annotated_screenshot,
                exec_orders: e.exec_orders,
            }
        })
        .collect();

    let model = ExecutionModel::assemble(app, ScreenId(remap[start]), screens, interactions)?;
    Ok((model, remap.into_iter().map(ScreenId).collect(), edge_remap))
}

/// Builds a model directly from screens and weighted edges, without traces.
/// Intended for tests, synthetic benchmarks and hand-made demo models.
///
/// Each screen gets a root layout plus one button per label; screens are
/// kept structurally distinct by giving each root a unique width. Screen 0
/// is the launcher created by [`GraphBuilder::new`].
pub struct GraphBuilder {
    inner: Builder,
    app: super::AppInfo,
}

impl GraphBuilder {
    pub fn new(app_name: &str) -> Self {
        let mut g = GraphBuilder {
            inner: Builder::default(),
            app: super::AppInfo {
                name: app_name.to_string(),
                version: "1.0".to_string(),
                package: format!("org.example.{}", app_name.to_lowercase().replace(' ', "")),
            },
        };
        g.screen("Launcher", &[]);
        g.inner.start = Some(0);
        g
    }

    /// Adds a screen with one button per label and returns its index.
    pub fn screen(&mut self, activity: &str, labels: &[&str]) -> usize {
        let index = self.inner.screens.len();
        let width = 1000 + index as i32;
        let mut components = vec![GuiComponent {
            kind: "android.widget.LinearLayout".to_string(),
            id_name: String::new(),
            label: String::new(),
            description: String::new(),
            bounds: super::Bounds([0, 0, width, 2000]),
            parent: None,
            children: (1..=labels.len()).collect(),
        }];
        for (i, label) in labels.iter().enumerate() {
            let top = 100 * i as i32;
            components.push(GuiComponent {
                kind: "android.widget.Button".to_string(),
                id_name: String::new(),
                label: label.to_string(),
                description: String::new(),
                bounds: super::Bounds([0, top, 200, top + 80]),
                parent: Some(0),
                children: Vec::new(),
            });
        }
        self.screen_with(activity, components)
    }

    /// Adds a screen with explicit components (pre-order, with links).
    pub fn screen_with(&mut self, activity: &str, components: Vec<GuiComponent>) -> usize {
        let index = self.inner.screens.len();
        let fingerprint = fingerprint_screen(&components).unwrap_or_else(|_| format!("{:016x}", index));
        let fingerprint = if self.inner.by_fingerprint.contains_key(&fingerprint) {
            format!("{fingerprint}-{index}")
        } else {
            fingerprint
        };
        let i = self.inner.intern(fingerprint, activity, components);
        self.inner.screens[i].screenshot = format!("screens/s{i}.png");
        i
    }

    /// Index of the first component on `screen` whose label is `label`.
    pub fn component(&self, screen: usize, label: &str) -> Option<usize> {
        self.inner.screens[screen]
            .components
            .iter()
            .position(|c| c.label == label)
    }

    /// Adds an interaction. `component` is a label on the source screen.
    /// Panics on an unknown label, since builder input is code, not data.
    pub fn edge(
        &mut self,
        source: usize,
        result: usize,
        event: EventKind,
        component: Option<&str>,
        weight: u32,
    ) -> usize {
        let component = component.map(|l| {
            self.component(source, l)
                .unwrap_or_else(|| panic!("no component labeled {l:?} on screen {source}"))
        });
        let input_text = (event == EventKind::Type).then(|| "text".to_string());
        let i = self.inner.edges.len();
        self.inner.edges.push(EdgeDraft {
            source,
            result,
            event,
            component,
            input_text,
            human_runs: weight,
            screenshot: format!("screens/s{source}.png"),
            annotated_screenshot: format!("edges/e{i}.png"),
            exec_orders: Vec::new(),
        });
        i
    }

    /// The single LAUNCH edge from the launcher to `first`.
    pub fn launch(&mut self, first: usize) -> usize {
        self.edge(0, first, EventKind::Launch, None, 1)
    }

    pub fn build(self) -> Result<BuiltGraph, ModelError> {
        let (model, screens, edges) = finish_mapped(self.inner, 0, self.app)?;
        Ok(BuiltGraph { model, screens, edges })
    }
}

/// A built model plus the ids assigned to each builder screen and edge.
#[derive(Debug, Clone)]
pub struct BuiltGraph {
    pub model: ExecutionModel,
    pub screens: Vec<ScreenId>,
    pub edges: Vec<InteractionId>,
}

impl BuiltGraph {
    pub fn screen(&self, index: usize) -> ScreenId {
        self.screens[index]
    }

    pub fn edge(&self, index: usize) -> InteractionId {
        self.edges[index]
    }
}
