use std::fs;
use std::path::{Path, PathBuf};

use burt_core::dialogue::{Clock, Dialogue, DialogueConfig, FixedClock, Session, UserMessage};
use burt_core::exec_model::ExecutionModel;
use burt_core::nlp::Lexicon;
use burt_core::report::assemble;

use crate::error::ServiceError;

/// Reads a list of user messages. `.yaml`/`.yml` files are YAML, anything
/// else JSON.
pub fn load_script(path: &Path) -> Result<Vec<UserMessage>, ServiceError> {
    let text = fs::read_to_string(path).map_err(|e| ServiceError::io(path, e))?;
    let yaml = matches!(path.extension().and_then(|e| e.to_str()), Some("yaml") | Some("yml"));
    let parsed = if yaml {
        serde_yaml::from_str(&text).map_err(|e| e.to_string())
    } else {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|message| ServiceError::Script {
        path: path.display().to_string(),
        message,
    })
}

#[derive(Debug, Clone)]
pub struct ReplayOptions {
    pub session_id: String,
    pub app_id: String,
    pub dialogue: DialogueConfig,
    /// When set, the final report is written here as JSON and HTML.
    pub report_dir: Option<PathBuf>,
}

#[derive(Debug)]
pub struct ReplayOutcome {
    pub session: Session,
    /// Set when the script stopped on a rejected message.
    pub error: Option<ServiceError>,
    pub report_files: Option<(PathBuf, PathBuf)>,
}

impl ReplayOutcome {
    pub fn transcript_jsonl(&self) -> String {
        let mut out = String::new();
        for e in &self.session.transcript {
            out.push_str(&e.to_json_line());
            out.push('\n');
        }
        out
    }
}

/// Feeds `script` through a fresh session on a fixed clock. Stops at the
/// first rejected message.
pub fn replay(
    model: &ExecutionModel,
    lexicon: &Lexicon,
    options: &ReplayOptions,
    script: Vec<UserMessage>,
) -> Result<ReplayOutcome, ServiceError> {
    let clock = FixedClock::default();
    let dialogue = Dialogue::new(model, lexicon, &options.dialogue, &clock);
    let (mut session, _) = dialogue.start(&options.session_id, &options.app_id);
    let mut error = None;
    for (index, msg) in script.into_iter().enumerate() {
        let kind = msg.kind();
        if let Err(source) = dialogue.advance(&mut session, msg) {
            error = Some(ServiceError::Replay { index, kind, source });
            break;
        }
    }
    let report_files = match (&options.report_dir, &error, &session.ob_text) {
        (Some(dir), None, Some(_)) => {
            let report = assemble(&session, model, &session.session_id, clock.now())?;
            Some(report.persist(dir, &options.dialogue.asset_base)?)
        }
        _ => None,
    };
    Ok(ReplayOutcome {
        session,
        error,
        report_files,
    })
}
