use burt_core::exec_model::{
    build_model, AppInfo, Bounds, EventKind, ExecutionModel, GraphBuilder, ModelError, TraceEvent, TraceFile,
    TraceNode, TraceScreen, TraceSource,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn node(kind: &str, label: &str, bounds: [i32; 4], children: Vec<TraceNode>) -> TraceNode {
    TraceNode {
        kind: kind.to_string(),
        id_name: String::new(),
        label: label.to_string(),
        description: String::new(),
        bounds: Bounds(bounds),
        children,
    }
}

/// A screen whose structure is keyed by `width`, with one button per label.
fn screen(activity: &str, width: i32, labels: &[&str]) -> TraceScreen {
    let buttons = labels
        .iter()
        .enumerate()
        .map(|(i, l)| {
            node(
                "android.widget.Button",
                l,
                [0, 100 * i as i32, 300, 100 * i as i32 + 80],
                vec![],
            )
        })
        .collect();
    TraceScreen {
        activity: activity.to_string(),
        components: vec![node("android.widget.FrameLayout", "", [0, 0, width, 1920], buttons)],
    }
}

fn button(s: &TraceScreen, label: &str) -> TraceNode {
    s.components[0]
        .children
        .iter()
        .find(|c| c.label == label)
        .unwrap()
        .clone()
}

fn event(action: EventKind, from: &TraceScreen, to: &TraceScreen, target: Option<&str>) -> TraceEvent {
    TraceEvent {
        action,
        input_text: (action == EventKind::Type).then(|| "42".to_string()),
        component: target.map(|l| button(from, l)),
        source_screen: from.clone(),
        result_screen: to.clone(),
        screenshot: format!("shots/{}.png", from.activity),
        annotated_screenshot: format!("shots/{}-{}.png", from.activity, target.unwrap_or("none")),
    }
}

fn app() -> AppInfo {
    AppInfo {
        name: "Mileage".into(),
        version: "3.1".into(),
        package: "com.evancharlton.mileage".into(),
    }
}

fn trace(id: &str, source: TraceSource, events: Vec<TraceEvent>) -> TraceFile {
    TraceFile {
        id: id.into(),
        app: app(),
        source,
        events,
    }
}

struct Screens {
    home: TraceScreen,
    a: TraceScreen,
    b: TraceScreen,
    c: TraceScreen,
}

fn screens() -> Screens {
    Screens {
        home: screen("Launcher", 1080, &[]),
        a: screen("A", 1000, &["Next"]),
        b: screen("B", 1001, &["Next", "Save"]),
        c: screen("C", 1002, &["Done"]),
    }
}

fn linear_trace(id: &str, source: TraceSource) -> TraceFile {
    let s = screens();
    trace(
        id,
        source,
        vec![
            event(EventKind::Launch, &s.home, &s.a, None),
            event(EventKind::Tap, &s.a, &s.b, Some("Next")),
            event(EventKind::Tap, &s.b, &s.c, Some("Next")),
        ],
    )
}

#[test]
fn single_trace_builds_a_chain() {
    let m = build_model(&[linear_trace("t1", TraceSource::Human)]).unwrap();
    assert_eq!(m.screens().len(), 4);
    assert_eq!(m.interactions().len(), 3);
    assert!(m.interactions().iter().all(|e| e.weight == 1));
    let c = m.screens().iter().find(|s| s.activity == "C").unwrap();
    assert_eq!(c.distance_from_start, 3);
    assert_eq!(m.start().distance_from_start, 0);
    assert_eq!(m.launch().event, EventKind::Launch);
}

#[test]
fn human_runs_set_weights_and_automated_runs_count_once() {
    let s = screens();
    let automated = trace(
        "auto",
        TraceSource::Automated,
        vec![
            event(EventKind::Launch, &s.home, &s.a, None),
            event(EventKind::Tap, &s.a, &s.b, Some("Next")),
            event(EventKind::Type, &s.b, &s.b, Some("Save")),
            event(EventKind::Type, &s.b, &s.b, Some("Save")),
            event(EventKind::Back, &s.b, &s.a, None),
            event(EventKind::Tap, &s.a, &s.b, Some("Next")),
            event(EventKind::Back, &s.b, &s.a, None),
            event(EventKind::Tap, &s.a, &s.b, Some("Next")),
        ],
    );
    let traces = vec![
        linear_trace("h1", TraceSource::Human),
        linear_trace("h2", TraceSource::Human),
        automated,
    ];
    let m = build_model(&traces).unwrap();
    let weight = |from: &str, event: EventKind| {
        m.interactions()
            .iter()
            .find(|e| m.screen(e.source).unwrap().activity == from && e.event == event)
            .unwrap()
            .weight
    };
    assert_eq!(weight("A", EventKind::Tap), 2);
    assert_eq!(weight("B", EventKind::Type), 1);
    assert_eq!(weight("B", EventKind::Back), 1);
    let shared = m
        .interactions()
        .iter()
        .find(|e| m.screen(e.source).unwrap().activity == "A")
        .unwrap();
    assert_eq!(shared.exec_orders.len(), 5);

    let mut permuted = traces.clone();
    permuted.reverse();
    assert_eq!(build_model(&permuted).unwrap(), m);
    permuted.swap(0, 1);
    assert_eq!(build_model(&permuted).unwrap().to_json(), m.to_json());
}

#[test]
fn labels_merge_but_structure_splits() {
    let s = screens();
    let relabeled = screen("A2", 1000, &["Continue"]);
    let t = trace(
        "t",
        TraceSource::Human,
        vec![
            event(EventKind::Launch, &s.home, &relabeled, None),
            event(EventKind::Tap, &relabeled, &s.b, Some("Continue")),
        ],
    );
    let m = build_model(&[linear_trace("t0", TraceSource::Human), t]).unwrap();
    assert_eq!(m.screens().len(), 4);
    let tap = m
        .interactions()
        .iter()
        .find(|e| e.event == EventKind::Tap && e.result.0 != 3)
        .unwrap();
    assert_eq!(tap.exec_orders.len(), 2);
}

#[test]
fn broken_continuity_names_trace_and_index() {
    let s = screens();
    let t = trace(
        "bad",
        TraceSource::Human,
        vec![
            event(EventKind::Launch, &s.home, &s.a, None),
            event(EventKind::Tap, &s.b, &s.c, Some("Next")),
        ],
    );
    let err = build_model(&[t]).unwrap_err();
    assert!(
        matches!(err, ModelError::Continuity { ref trace, index: 0 } if trace == "bad"),
        "{err}"
    );
}

#[test]
fn mixed_apps_are_rejected() {
    let mut other = linear_trace("b", TraceSource::Human);
    other.app.package = "org.other".into();
    let err = build_model(&[linear_trace("a", TraceSource::Human), other]).unwrap_err();
    assert!(matches!(err, ModelError::MixedApps { .. }));
}

#[test]
fn first_event_must_launch() {
    let s = screens();
    let t = trace(
        "t",
        TraceSource::Human,
        vec![event(EventKind::Tap, &s.a, &s.b, Some("Next"))],
    );
    assert!(matches!(build_model(&[t]), Err(ModelError::FirstEventNotLaunch { .. })));
}

#[test]
fn screens_matching_orders_by_distance() {
    let m = build_model(&[linear_trace("t1", TraceSource::Human)]).unwrap();
    assert!(m.screens_matching(|_| false).is_empty());
    let all = m.screens_matching(|_| true);
    assert_eq!(all.len(), 4);
    assert_eq!(all[0].id, m.start().id);
    let save: Vec<&str> = m
        .screens_matching(|s| s.components.iter().any(|c| c.label == "Save"))
        .iter()
        .map(|s| s.activity.as_str())
        .collect();
    assert_eq!(save, vec!["B"]);
}

#[test]
fn json_round_trip_preserves_the_model() {
    let m = build_model(&[linear_trace("t1", TraceSource::Human)]).unwrap();
    let back = ExecutionModel::from_json(&m.to_json()).unwrap();
    assert_eq!(back, m);
}

#[test]
fn tampered_documents_are_rejected() {
    let m = build_model(&[linear_trace("t1", TraceSource::Human)]).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&m.to_json()).unwrap();
    doc["interactions"][1]["weight"] = 0.into();
    assert!(ExecutionModel::from_json(&doc.to_string()).is_err());
}

/// All-pairs shortest hop counts by repeated relaxation.
fn floyd(m: &ExecutionModel) -> Vec<Vec<usize>> {
    let n = m.screens().len();
    let inf = usize::MAX / 2;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for e in m.interactions() {
        d[e.source.0][e.result.0] = d[e.source.0][e.result.0].min(1);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                d[i][j] = d[i][j].min(d[i][k] + d[k][j]);
            }
        }
    }
    d
}

proptest! {
    #[test]
    fn distances_equal_all_pairs_search(seed in 0u64..1000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.gen_range(1..50);
        let labels: Vec<String> = (0..8).map(|i| format!("b{i}")).collect();
        let labels: Vec<&str> = labels.iter().map(String::as_str).collect();
        let mut g = GraphBuilder::new("Random");
        let ids: Vec<usize> = (0..n).map(|i| g.screen(&format!("S{i}"), &labels)).collect();
        let mut used = vec![0; n];
        g.launch(ids[0]);
        for v in 1..n {
            let u = rng.gen_range(0..v);
            if used[u] < labels.len() {
                g.edge(ids[u], ids[v], EventKind::Tap, Some(labels[used[u]]), 1);
                used[u] += 1;
            } else {
                g.edge(ids[v - 1], ids[v], EventKind::Swipe, Some(labels[0]), 1);
            }
        }
        let m = g.build().unwrap().model;
        let d = floyd(&m);
        let start = m.start().id.0;
        for s in m.screens() {
            prop_assert_eq!(s.distance_from_start, d[start][s.id.0]);
        }
        let order: Vec<(usize, &str)> = m.screens().iter().map(|s| (s.distance_from_start, s.fingerprint.as_str())).collect();
        prop_assert!(order.windows(2).all(|w| w[0] < w[1]));
    }
}
