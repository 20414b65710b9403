//! Bug report assembly and rendering.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dialogue::Session;
use crate::exec_model::{AppInfo, ExecutionModel};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("nothing to report")]
    NothingToReport,
    #[error("unknown report format: {0}")]
    UnknownFormat(String),
    #[error("malformed report: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportStep {
    pub number: usize,
    pub text: String,
    /// Path relative to the asset root: `<app_id>/<file>`.
    pub screenshot: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_value: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BugReport {
    pub report_id: String,
    pub session_id: String,
    pub app_id: String,
    pub app: AppInfo,
    pub created_at: String,
    pub ob_text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ob_screenshot: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eb_text: Option<String>,
    pub eb_verified: bool,
    pub steps: Vec<ReportStep>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Html,
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, ReportError> {
        match s.to_ascii_lowercase().as_str() {
            "json" | "structured" => Ok(ReportFormat::Json),
            "html" | "web" | "web-page" => Ok(ReportFormat::Html),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

fn asset_path(app_id: &str, path: &str) -> String {
    format!("{app_id}/{path}")
}

/// Builds the report from a session snapshot. Works mid-session for
/// previews; only the OB text is required.
pub fn assemble(
    session: &Session,
    model: &ExecutionModel,
    report_id: &str,
    created_at: DateTime<Utc>,
) -> Result<BugReport, ReportError> {
    let ob_text = session.ob_text.clone().ok_or(ReportError::NothingToReport)?;
    let ob_screenshot = session
        .ob_screen
        .and_then(|id| model.screen(id))
        .filter(|s| !s.screenshot.is_empty())
        .map(|s| asset_path(&session.app_id, &s.screenshot));
    let steps = session
        .steps
        .iter()
        .enumerate()
        .map(|(i, st)| ReportStep {
            number: i + 1,
            text: st.text.clone(),
            screenshot: asset_path(&session.app_id, &st.screenshot),
            input_value: st.input_value.clone(),
        })
        .collect();
    Ok(BugReport {
        report_id: report_id.to_string(),
        session_id: session.session_id.clone(),
        app_id: session.app_id.clone(),
        app: model.app().clone(),
        created_at: created_at.to_rfc3339_opts(SecondsFormat::Secs, true),
        ob_text,
        ob_screenshot,
        eb_text: session.eb_text.clone(),
        eb_verified: session.eb_verified,
        steps,
    })
}

impl BugReport {
    pub fn from_json(text: &str) -> Result<Self, ReportError> {
        serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    /// Self-contained page; images link to `<asset_base>/<screenshot>`.
    pub fn to_html(&self, asset_base: &str) -> String {
        let base = asset_base.trim_end_matches('/');
        let mut h = String::new();
        let title = format!("Bug report: {} {}", self.app.name, self.app.version);
        h.push_str("<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n");
        let _ = writeln!(h, "<title>{}</title>", escape(&title));
        h.push_str("</head>\n<body style=\"font-family: sans-serif; max-width: 60em; margin: 2em auto;\">\n");
        let _ = writeln!(h, "<h1>{}</h1>", escape(&title));
        let _ = writeln!(
            h,
            "<p style=\"color: #555;\">Report {} &middot; created {}</p>",
            escape(&self.report_id),
            escape(&self.created_at)
        );
        h.push_str("<h2>Observed behavior</h2>\n");
        let _ = writeln!(h, "<p>{}</p>", escape(&self.ob_text));
        if let Some(shot) = &self.ob_screenshot {
            let _ = writeln!(
                h,
                "<p><a href=\"{}/{}\">Screen where the problem appears</a></p>",
                escape(base),
                escape(shot)
            );
        }
        h.push_str("<h2>Expected behavior</h2>\n");
        let _ = writeln!(
            h,
            "<p>{}</p>",
            escape(self.eb_text.as_deref().unwrap_or("(not provided)"))
        );
        h.push_str("<h2>Steps to reproduce</h2>\n<ol>\n");
        for step in &self.steps {
            let _ = write!(h, "<li style=\"margin-bottom: 1.5em;\"><p>{}", escape(&step.text));
            if let Some(v) = &step.input_value {
                let _ = write!(h, " <code>{}</code>", escape(v));
            }
            h.push_str("</p>");
            if !step.screenshot.is_empty() {
                let _ = write!(
                    h,
                    "<img src=\"{}/{}\" alt=\"Step {}\" style=\"max-height: 24em; border: 1px solid #ccc;\">",
                    escape(base),
                    escape(&step.screenshot),
                    step.number
                );
            }
            h.push_str("</li>\n");
        }
        h.push_str("</ol>\n</body>\n</html>\n");
        h
    }

    pub fn render(&self, format: ReportFormat, asset_base: &str) -> String {
        match format {
            ReportFormat::Json => self.to_json(),
            ReportFormat::Html => self.to_html(asset_base),
        }
    }

    /// Writes `<report_id>.json` and `<report_id>.html` into `dir`.
    pub fn persist(&self, dir: &Path, asset_base: &str) -> Result<(PathBuf, PathBuf), ReportError> {
        let io = |p: &Path, e: std::io::Error| ReportError::Io {
            path: p.display().to_string(),
            message: e.to_string(),
        };
        fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        let json = dir.join(format!("{}.json", self.report_id));
        let html = dir.join(format!("{}.html", self.report_id));
        fs::write(&json, self.to_json()).map_err(|e| io(&json, e))?;
        fs::write(&html, self.to_html(asset_base)).map_err(|e| io(&html, e))?;
        Ok((json, html))
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&#39;"),
            c => out.push(c),
        }
    }
    out
}
