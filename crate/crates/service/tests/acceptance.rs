//! Acceptance criteria P1 to P7. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::VecDeque;
use std::fs;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use burt_core::dialogue::{BotKind, Dialogue, DialogueConfig, FixedClock, Pending, UserMessage};
use burt_core::exec_model::{
    build_model, load_traces, BuiltGraph, EventKind, ExecutionModel, GraphBuilder, InteractionId, ScreenId,
};
use burt_core::matcher::{lcs_ratio, longest_common_substring};
use burt_core::nlp::{classify, parse, Lexicon, ParsedPhrase, SentenceType};
use burt_core::predictor::{predict, rank_paths, PredictorConfig};
use burt_core::ExactScore;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if $cond {
        } else {
            return Err(format!($($msg)+));
        }
    };
}

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn mileage() -> ExecutionModel {
    ExecutionModel::load(&fixtures().join("models/mileage/model.json")).unwrap()
}

fn tuple(p: &ParsedPhrase) -> [&str; 5] {
    [&p.subject, &p.action, &p.object, &p.preposition, &p.object2]
}

fn p1_parser() -> Outcome {
    let started = Instant::now();
    let lex = Lexicon::builtin();

    let s = "Save the car fillup";
    ensure!(classify(s, &lex) == SentenceType::Imperative, "{s:?} is not imperative");
    let out = parse(s, &lex).map_err(|e| e.to_string())?;
    let step = out.s2r_part.ok_or("no step part")?;
    ensure!(
        tuple(&step) == ["user", "save", "car fillup", "", ""],
        "{s:?} -> {:?}",
        tuple(&step)
    );

    let s = "fuel economy statistics should be calculated correctly";
    ensure!(
        classify(s, &lex) == SentenceType::PassiveExpectation,
        "{s:?} is not a passive expectation"
    );

    let s = "The app stopped when I added a new time range";
    ensure!(
        classify(s, &lex) == SentenceType::ConditionalWhen,
        "{s:?} is not conditional"
    );
    let out = parse(s, &lex).map_err(|e| e.to_string())?;
    let ob = out.ob_part.ok_or("no behavior part")?;
    let step = out.s2r_part.ok_or("no step part")?;
    ensure!(
        tuple(&ob) == ["app", "stop", "", "", ""],
        "{s:?} behavior -> {:?}",
        tuple(&ob)
    );
    ensure!(ob.verb == "stopped", "surface verb {:?}", ob.verb);
    ensure!(
        tuple(&step) == ["user", "add", "new time range", "", ""],
        "{s:?} step -> {:?}",
        tuple(&step)
    );

    let s = "The average fuel economy shows a NaN value";
    let ob = parse(s, &lex)
        .map_err(|e| e.to_string())?
        .ob_part
        .ok_or("no behavior part")?;
    ensure!(
        tuple(&ob) == ["average fuel economy", "show", "NaN value", "", ""] && ob.verb == "shows",
        "{s:?} -> {:?}",
        tuple(&ob)
    );

    let took = started.elapsed();
    ensure!(took < Duration::from_secs(1), "took {took:?}");
    Ok(format!("4 example sentences, {} ms", took.as_millis()))
}

fn lcs_dp(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev = vec![0usize; b.len() + 1];
    let mut best = 0;
    for i in 1..=a.len() {
        let mut cur = vec![0usize; b.len() + 1];
        for j in 1..=b.len() {
            if a[i - 1] == b[j - 1] {
                cur[j] = prev[j - 1] + 1;
                best = best.max(cur[j]);
            }
        }
        prev = cur;
    }
    best
}

fn random_text(rng: &mut ChaCha8Rng, alphabet: &[char]) -> String {
    let len = rng.gen_range(0..40);
    (0..len).map(|_| alphabet[rng.gen_range(0..alphabet.len())]).collect()
}

fn p2_similarity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let alphabets: [&[char]; 3] = [
        &['a', 'b'],
        &['a', 'b', 'c', ' '],
        &['s', 'a', 'v', 'e', ' ', 'f', 'i', 'l', 'u', 'p', 'é'],
    ];
    let mut above = 0;
    for i in 0..1000 {
        let alphabet = alphabets[i % alphabets.len()];
        let a = random_text(&mut rng, alphabet);
        let b = random_text(&mut rng, alphabet);
        let fast = longest_common_substring(&a, &b);
        let slow = lcs_dp(&a, &b);
        ensure!(fast == slow, "pair {i} {a:?} {b:?}: {fast} vs {slow}");
        let shorter = a.chars().count().min(b.chars().count());
        let oracle = shorter > 0 && 2 * slow >= shorter;
        let exact = lcs_ratio::<ExactScore>(&a, &b) >= ExactScore::new(1, 2);
        let float = lcs_ratio::<f64>(&a, &b) >= 0.5;
        ensure!(
            oracle == exact && oracle == float,
            "pair {i} {a:?} {b:?}: threshold disagrees"
        );
        above += usize::from(oracle);
    }
    Ok(format!("1000 pairs exact, {above} at or above 0.5"))
}

const BUTTONS: [&str; 20] = [
    "b0", "b1", "b2", "b3", "b4", "b5", "b6", "b7", "b8", "b9", "b10", "b11", "b12", "b13", "b14", "b15", "b16", "b17",
    "b18", "b19",
];

fn random_graph(rng: &mut ChaCha8Rng) -> BuiltGraph {
    let n = rng.gen_range(2..=10);
    let max_edges = rng.gen_range(n..=20);
    let mut g = GraphBuilder::new("Random");
    let screens: Vec<usize> = (0..n).map(|i| g.screen(&format!("S{i}"), &BUTTONS)).collect();
    let mut used = vec![0usize; n];
    g.launch(screens[0]);
    let mut add = |g: &mut GraphBuilder, u: usize, v: usize, w: u32| {
        g.edge(screens[u], screens[v], EventKind::Tap, Some(BUTTONS[used[u]]), w);
        used[u] += 1;
    };
    let mut edges = 1;
    for v in 1..n {
        let u = rng.gen_range(0..v);
        let w = rng.gen_range(1..6);
        add(&mut g, u, v, w);
        edges += 1;
    }
    while edges < max_edges {
        let (u, v, w) = (rng.gen_range(0..n), rng.gen_range(0..n), rng.gen_range(1..6));
        add(&mut g, u, v, w);
        edges += 1;
    }
    g.build().unwrap()
}

/// Every simple path by breadth-first search, scored exactly as the mean
/// weight plus the reciprocal length.
fn exhaustive(model: &ExecutionModel, from: ScreenId, to: ScreenId) -> Vec<(Vec<InteractionId>, ExactScore)> {
    let mut found = Vec::new();
    let mut queue = VecDeque::from([(from, Vec::<InteractionId>::new(), vec![from])]);
    while let Some((at, path, seen)) = queue.pop_front() {
        if at == to && !path.is_empty() {
            found.push(path);
            continue;
        }
        for e in model
            .interactions()
            .iter()
            .filter(|e| e.source == at && !seen.contains(&e.result))
        {
            let mut p = path.clone();
            p.push(e.id);
            let mut s = seen.clone();
            s.push(e.result);
            queue.push_back((e.result, p, s));
        }
    }
    let mut scored: Vec<_> = found
        .into_iter()
        .map(|p| {
            let n = p.len() as i64;
            let sum: i64 = p.iter().map(|e| i64::from(model.interactions()[e.0].weight)).sum();
            let prints: Vec<String> = std::iter::once(from)
                .chain(p.iter().map(|e| model.interactions()[e.0].result))
                .map(|s| model.screens()[s.0].fingerprint.clone())
                .collect();
            (p, ExactScore::new(sum, n) + ExactScore::new(1, n), prints)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.cmp(&a.1)
            .then(a.0.len().cmp(&b.0.len()))
            .then(a.2.cmp(&b.2))
            .then(a.0.cmp(&b.0))
    });
    scored.into_iter().map(|(p, s, _)| (p, s)).collect()
}

fn diamond_check() -> Result<(), String> {
    let mut g = GraphBuilder::new("Diamond");
    let current = g.screen("Current", &["To A", "To B"]);
    let a = g.screen("A", &["Next"]);
    let b = g.screen("B", &["Next"]);
    let c = g.screen("C", &["Next"]);
    let ob = g.screen("Ob", &["Done"]);
    g.launch(current);
    g.edge(current, a, EventKind::Tap, Some("To A"), 3);
    g.edge(a, ob, EventKind::Tap, Some("Next"), 3);
    g.edge(current, b, EventKind::Tap, Some("To B"), 1);
    g.edge(b, c, EventKind::Tap, Some("Next"), 1);
    g.edge(c, ob, EventKind::Tap, Some("Next"), 1);
    let g = g.build().unwrap();
    let paths = predict::<f64>(&g.model, g.screen(current), g.screen(ob), &PredictorConfig::default())
        .map_err(|e| e.to_string())?;
    ensure!(paths.len() == 2, "diamond: {} paths", paths.len());
    ensure!(
        (paths[0].score - 3.5).abs() < 1e-12 && (paths[1].score - 4.0 / 3.0).abs() < 1e-12,
        "diamond scores {} {}",
        paths[0].score,
        paths[1].score
    );
    ensure!(
        paths[0].edges == vec![g.edge(1), g.edge(2)],
        "diamond: path through A is not first"
    );
    Ok(())
}

fn p3_predictor() -> Outcome {
    let started = Instant::now();
    diamond_check()?;
    let mut compared = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = random_graph(&mut rng);
        let n = g.model.screens().len();
        let from = g.model.launch().result;
        for to in g.model.screens().iter().map(|s| s.id).filter(|&t| t != from) {
            let oracle = exhaustive(&g.model, from, to);
            let ranked = rank_paths::<f64>(&g.model, from, to, n);
            ensure!(
                ranked.len() == oracle.len(),
                "seed {seed}: {} vs {} paths",
                ranked.len(),
                oracle.len()
            );
            for ((p, s), (q, t)) in ranked.iter().zip(&oracle) {
                let exact = *t.numer() as f64 / *t.denom() as f64;
                ensure!(p == q, "seed {seed}: order differs");
                ensure!((s - exact).abs() <= 1e-12, "seed {seed}: score {s} vs {exact}");
            }
            let predicted =
                predict::<f64>(&g.model, from, to, &PredictorConfig::default()).map_err(|e| e.to_string())?;
            ensure!(
                predicted.len() == oracle.len().min(2),
                "seed {seed}: {} suggestions",
                predicted.len()
            );
            for (sp, (q, _)) in predicted.iter().zip(&oracle) {
                ensure!(&sp.edges == q, "seed {seed}: suggestion is not the oracle's path");
                ensure!(sp.truncated_steps.len() <= 5, "seed {seed}: more than five steps");
            }
            compared += 1;
        }
    }
    let took = started.elapsed();
    ensure!(took < Duration::from_secs(10), "took {took:?}");
    Ok(format!(
        "diamond 7/2 vs 4/3, {compared} target screens over 100 seeds, {} ms",
        took.as_millis()
    ))
}

fn edge_weight(m: &ExecutionModel, source_activity: &str, event: EventKind, label: Option<&str>) -> Option<u32> {
    m.interactions()
        .iter()
        .find(|e| {
            m.screens()[e.source.0].activity.ends_with(source_activity)
                && e.event == event
                && m.component_of(e).map(|c| c.label.as_str()) == label
        })
        .map(|e| e.weight)
}

fn p4_weights() -> Outcome {
    let traces = load_traces(&fixtures().join("traces/mileage")).map_err(|e| e.to_string())?;
    let model = build_model(&traces).map_err(|e| e.to_string())?;
    let shared = edge_weight(&model, "FillupActivity", EventKind::Tap, Some("History"));
    ensure!(shared == Some(2), "shared edge weight {shared:?}");
    for (activity, event, label) in [
        ("HistoryActivity", EventKind::LongTap, Some("Fillup on Jan 5")),
        ("FillupActivity", EventKind::Rotate, None),
        ("StatisticsActivity", EventKind::Tap, Some("History")),
    ] {
        let w = edge_weight(&model, activity, event, label);
        ensure!(w == Some(1), "automated-only {activity} {event:?} weight {w:?}");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let mut shuffled = traces.clone();
        shuffled.shuffle(&mut rng);
        let other = build_model(&shuffled).map_err(|e| e.to_string())?;
        ensure!(
            other == model && other.to_json() == model.to_json(),
            "trace order changed the model"
        );
    }
    Ok("shared edge 2, automated-only edges 1, 10 permutations identical".into())
}

fn replay(script: &std::path::Path, extra: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_burt"))
        .arg("replay")
        .arg("--model")
        .arg(fixtures().join("models/mileage/model.json"))
        .arg("--script")
        .arg(script)
        .args(extra)
        .output()
        .expect("burt runs")
}

fn p5_goldens() -> Outcome {
    let required = [
        "happy_path",
        "ob_three_failures",
        "ob_disambiguation",
        "ambiguous_step",
        "input_detour",
        "restart_and_edit",
    ];
    let mut scripts: Vec<PathBuf> = fs::read_dir(fixtures().join("scripts"))
        .map_err(|e| e.to_string())?
        .map(|e| e.unwrap().path())
        .collect();
    scripts.sort();
    for name in required {
        ensure!(
            scripts.iter().any(|p| p.file_stem().is_some_and(|s| s == name)),
            "missing scenario {name}"
        );
    }
    for script in &scripts {
        let name = script.file_stem().unwrap().to_string_lossy();
        let out = replay(script, &[]);
        ensure!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let golden =
            fs::read(fixtures().join("golden").join(format!("{name}.jsonl"))).map_err(|e| format!("{name}: {e}"))?;
        ensure!(out.stdout == golden, "{name}: transcript differs from golden");
    }
    Ok(format!("{} transcripts byte-identical", scripts.len()))
}

fn p6_report() -> Outcome {
    let dir = TempDir::new().map_err(|e| e.to_string())?;
    let out = replay(
        &fixtures().join("scripts/happy_path.yaml"),
        &["--report-dir", dir.path().to_str().unwrap()],
    );
    ensure!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let json: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("replay.json")).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
    ensure!(
        json["ob_text"] == "The average fuel economy shows NaN",
        "OB text {}",
        json["ob_text"]
    );
    ensure!(
        json["eb_text"] == "The average fuel economy should be a number",
        "EB text {}",
        json["eb_text"]
    );
    let steps = json["steps"].as_array().ok_or("no steps")?;
    ensure!(steps.len() == 3, "{} steps", steps.len());
    for (i, st) in steps.iter().enumerate() {
        ensure!(st["number"] == i + 1, "step numbering breaks at {i}");
        let shot = st["screenshot"].as_str().ok_or("step without screenshot")?;
        ensure!(
            fixtures().join("models").join(shot).is_file(),
            "unresolvable screenshot {shot}"
        );
    }
    let html = fs::read_to_string(dir.path().join("replay.html")).map_err(|e| e.to_string())?;
    let imgs = html.matches("<img ").count();
    ensure!(imgs == steps.len(), "{imgs} images for {} steps", steps.len());
    Ok(format!(
        "{} steps numbered 1..{}, {imgs} images",
        steps.len(),
        steps.len()
    ))
}

fn fuzz_pool() -> Vec<UserMessage> {
    let texts = [
        "The average fuel economy shows NaN",
        "The history tab shows no fillups",
        "The delete button does nothing",
        "The total cost shows NaN",
        "The app crashed",
        "The app does not work",
        "The average fuel economy should be a number",
        "The history should show my fillups",
        "I tapped the history tab",
        "I tapped the statistics tab",
        "I tapped the fillup entry",
        "Tap the fillup tab",
        "Save the car fillup",
        "I entered the price per unit",
        "Go back",
        "Tap the delete button",
        "3.49",
        "hello",
    ];
    let mut pool: Vec<UserMessage> = texts
        .iter()
        .map(|t| UserMessage::Text { text: t.to_string() })
        .collect();
    for n in 0..7 {
        pool.push(UserMessage::StepSelection { indices: vec![n] });
        pool.push(UserMessage::ScreenSelection { indices: vec![n] });
    }
    pool.extend([
        UserMessage::StepSelection { indices: vec![] },
        UserMessage::StepSelection { indices: vec![0, 1] },
        UserMessage::StepSelection {
            indices: vec![0, 1, 2, 3, 4],
        },
        UserMessage::ScreenSelection { indices: vec![] },
        UserMessage::ConfirmYes,
        UserMessage::ConfirmYes,
        UserMessage::ConfirmNo,
        UserMessage::ActionPreview,
        UserMessage::ActionFinish,
        UserMessage::ActionRestart,
        UserMessage::StepDeleteLast,
        UserMessage::StepEdit {
            step: 1,
            text: "Open the app".into(),
        },
    ]);
    pool
}

fn p7_caps() -> Outcome {
    let model = mileage();
    let lexicon = Lexicon::builtin();
    let config = DialogueConfig::default();
    let pool = fuzz_pool();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut turns, mut max_cards, mut max_steps, mut max_paths, mut max_rephrases) = (0, 0, 0, 0, 0);
    for conv in 0..500 {
        let clock = FixedClock::default();
        let dialogue = Dialogue::new(&model, &lexicon, &config, &clock);
        let (mut s, _) = dialogue.start(&format!("fuzz{conv}"), "mileage");
        let mut ob_rephrases = 0;
        for _ in 0..rng.gen_range(5..60) {
            let msg = pool[rng.gen_range(0..pool.len())].clone();
            let restart = msg == UserMessage::ActionRestart;
            let Ok(out) = dialogue.advance(&mut s, msg) else {
                continue;
            };
            turns += 1;
            if restart {
                ob_rephrases = 0;
            }
            for m in &out {
                max_cards = max_cards.max(m.cards.len());
                if m.kind == BotKind::RephraseRequest && s.phase.stage() == 0 {
                    ob_rephrases += 1;
                }
            }
            max_rephrases = max_rephrases.max(ob_rephrases);
            if let Pending::Suggestions { paths, .. } = &s.pending {
                max_paths = max_paths.max(paths.len());
                max_steps = max_steps.max(paths.iter().map(Vec::len).max().unwrap_or(0));
            }
            ensure!(max_cards <= 5, "conversation {conv}: {max_cards} cards");
            ensure!(max_steps <= 5, "conversation {conv}: suggestion with {max_steps} steps");
            ensure!(max_paths <= 2, "conversation {conv}: {max_paths} suggested paths");
            ensure!(
                ob_rephrases <= 3,
                "conversation {conv}: OB rephrase request number {ob_rephrases}"
            );
        }
    }
    Ok(format!(
        "500 conversations, {turns} accepted turns; max cards {max_cards}, steps {max_steps}, paths {max_paths}, OB rephrases {max_rephrases}"
    ))
}

fn main() {
    let criteria: [Criterion; 7] = [
        ("P1", "parser fixtures", p1_parser),
        ("P2", "similarity oracle", p2_similarity),
        ("P3", "predictor oracle", p3_predictor),
        ("P4", "weight law", p4_weights),
        ("P5", "golden transcripts", p5_goldens),
        ("P6", "end-to-end report", p6_report),
        ("P7", "caps under fuzzing", p7_caps),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, check) in criteria {
        let result = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(format!("panic: {msg}"))
        });
        match result {
            Ok(detail) => println!("{id} PASS {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("{id} FAIL {name}: {why}");
            }
        }
    }
    println!("acceptance: {} of 7 criteria passed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
