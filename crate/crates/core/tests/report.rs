mod common;

use burt_core::dialogue::{Session, UserMessage};
use burt_core::report::{assemble, BugReport, ReportError, ReportFormat};
use chrono::{TimeZone, Utc};
use common::{fixtures, happy_prefix, text, Harness};

fn finished(h: &Harness) -> Session {
    let mut s = h.start();
    let mut script = happy_prefix();
    script.push(UserMessage::ConfirmYes);
    script.push(UserMessage::ActionFinish);
    h.run(&mut s, script);
    s
}

fn report_of(h: &Harness, s: &Session) -> BugReport {
    let at = Utc.with_ymd_and_hms(2024, 3, 1, 12, 0, 0).unwrap();
    assemble(s, &h.model, "r1", at).unwrap()
}

fn img_count(html: &str) -> usize {
    html.matches("<img ").count()
}

#[test]
fn report_carries_texts_and_numbered_steps() {
    let h = Harness::new();
    let s = finished(&h);
    let r = report_of(&h, &s);
    assert_eq!(r.ob_text, "The average fuel economy shows NaN");
    assert_eq!(
        r.eb_text.as_deref(),
        Some("The average fuel economy should be a number")
    );
    assert!(r.eb_verified);
    assert_eq!(r.created_at, "2024-03-01T12:00:00Z");
    assert_eq!(r.app.name, "Mileage");
    let texts: Vec<_> = r.steps.iter().map(|st| st.text.as_str()).collect();
    assert_eq!(
        texts,
        vec!["Launch the app", "Tap on 'Save Fillup'", "Tap on 'Statistics'"]
    );
    for (i, st) in r.steps.iter().enumerate() {
        assert_eq!(st.number, i + 1);
        assert!(st.screenshot.starts_with("mileage/steps/"));
        assert!(
            fixtures().join("models").join(&st.screenshot).is_file(),
            "{}",
            st.screenshot
        );
    }
    assert_eq!(r.ob_screenshot.as_deref(), Some("mileage/screens/statistics.png"));
}

#[test]
fn html_has_one_image_per_step() {
    let h = Harness::new();
    let r = report_of(&h, &finished(&h));
    let html = r.to_html("/assets");
    assert_eq!(img_count(&html), r.steps.len());
    assert!(html.contains("src=\"/assets/mileage/steps/fillup_tap_statistics.png\""));
    assert!(html.contains("The average fuel economy shows NaN"));
    assert!(html.contains("href=\"/assets/mileage/screens/statistics.png\""));
}

#[test]
fn html_escapes_user_text() {
    let h = Harness::new();
    let mut s = finished(&h);
    s.ob_text = Some("<script>alert('x')</script> & more".into());
    let html = report_of(&h, &s).to_html("/assets");
    assert!(!html.contains("<script>"));
    assert!(html.contains("&lt;script&gt;alert(&#39;x&#39;)&lt;/script&gt; &amp; more"));
}

#[test]
fn json_round_trips_and_is_deterministic() {
    let h = Harness::new();
    let s = finished(&h);
    let a = report_of(&h, &s);
    let b = report_of(&h, &s);
    assert_eq!(a.to_json(), b.to_json());
    assert_eq!(a.to_html("/a"), b.to_html("/a"));
    assert_eq!(BugReport::from_json(&a.to_json()).unwrap(), a);
    assert!(matches!(BugReport::from_json("{}"), Err(ReportError::Parse(_))));
}

#[test]
fn input_values_appear_in_both_renderings() {
    let h = Harness::new();
    let mut s = h.start();
    h.run(&mut s, happy_prefix()[..3].to_vec());
    h.run(
        &mut s,
        vec![text("I typed \"12.5\" in the volume field"), UserMessage::ConfirmYes],
    );
    let r = report_of(&h, &s);
    let step = &r.steps[1];
    assert_eq!(step.input_value.as_deref(), Some("12.5"));
    assert!(r.to_json().contains("\"input_value\": \"12.5\""));
    assert!(r.to_html("/assets").contains("<code>12.5</code>"));
}

#[test]
fn nothing_to_report_before_the_ob() {
    let h = Harness::new();
    let s = h.start();
    let at = Utc.timestamp_opt(0, 0).unwrap();
    assert!(matches!(
        assemble(&s, &h.model, "r", at),
        Err(ReportError::NothingToReport)
    ));
}

#[test]
fn unmatched_ob_has_no_screenshot_or_steps() {
    let h = Harness::new();
    let mut s = h.start();
    h.run(&mut s, vec![text("The app crashed"); 3]);
    let r = report_of(&h, &s);
    assert_eq!(r.ob_screenshot, None);
    assert!(r.steps.is_empty());
    assert_eq!(img_count(&r.to_html("/assets")), 0);
    assert!(r.to_html("/assets").contains("(not provided)"));
}

#[test]
fn persist_writes_both_files() {
    let h = Harness::new();
    let r = report_of(&h, &finished(&h));
    let dir = std::env::temp_dir().join(format!("burt-report-{}", std::process::id()));
    let (json, html) = r.persist(&dir, "/assets").unwrap();
    assert_eq!(
        BugReport::from_json(&std::fs::read_to_string(&json).unwrap()).unwrap(),
        r
    );
    assert_eq!(
        std::fs::read_to_string(&html).unwrap(),
        r.render(ReportFormat::Html, "/assets")
    );
    std::fs::remove_dir_all(dir).unwrap();
}
