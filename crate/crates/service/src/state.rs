use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use burt_core::dialogue::{Clock, Dialogue, DialogueConfig, Session, SystemClock};
use burt_core::nlp::Lexicon;
use tokio::sync::{Mutex, RwLock};

use crate::apps::{load_apps, LoadedApp};
use crate::config::ServiceConfig;
use crate::error::ServiceError;

pub type SessionHandle = Arc<Mutex<Session>>;

pub struct AppState {
    pub config: ServiceConfig,
    pub dialogue: DialogueConfig,
    pub lexicon: Lexicon,
    pub apps: BTreeMap<String, LoadedApp>,
    pub clock: Arc<dyn Clock>,
    sessions: RwLock<HashMap<String, SessionHandle>>,
}

impl AppState {
    pub fn load(config: ServiceConfig) -> Result<Self, ServiceError> {
        let apps = load_apps(&config.models_dir, config.assets_root())?;
        let lexicon = match &config.lexicon {
            Some(p) => Lexicon::load_extending_builtin(p).map_err(|e| ServiceError::Lexicon(e.to_string()))?,
            None => Lexicon::builtin(),
        };
        Ok(Self::new(config, apps, lexicon, Arc::new(SystemClock)))
    }

    pub fn new(
        config: ServiceConfig,
        apps: BTreeMap<String, LoadedApp>,
        lexicon: Lexicon,
        clock: Arc<dyn Clock>,
    ) -> Self {
        AppState {
            dialogue: config.dialogue_config(),
            config,
            lexicon,
            apps,
            clock,
            sessions: RwLock::new(HashMap::new()),
        }
    }

    pub fn dialogue_for<'a>(&'a self, app: &'a LoadedApp) -> Dialogue<'a> {
        Dialogue::new(&app.model, &self.lexicon, &self.dialogue, self.clock.as_ref())
    }

    pub async fn insert(&self, session: Session) -> SessionHandle {
        let id = session.session_id.clone();
        let handle = Arc::new(Mutex::new(session));
        self.sessions.write().await.insert(id, handle.clone());
        handle
    }

    pub async fn session(&self, id: &str) -> Option<SessionHandle> {
        self.sessions.read().await.get(id).cloned()
    }

    pub async fn session_count(&self) -> usize {
        self.sessions.read().await.len()
    }

    pub fn transcripts_dir(&self) -> PathBuf {
        self.config.output_dir.join("transcripts")
    }

    pub fn reports_dir(&self) -> PathBuf {
        self.config.output_dir.join("reports")
    }

    /// Rewrites `<output>/transcripts/<session>.jsonl`.
    pub fn persist_transcript(&self, session: &Session) -> Result<(), ServiceError> {
        let dir = self.transcripts_dir();
        fs::create_dir_all(&dir).map_err(|e| ServiceError::io(&dir, e))?;
        let path = dir.join(format!("{}.jsonl", session.session_id));
        let mut text = String::new();
        for entry in &session.transcript {
            text.push_str(&entry.to_json_line());
            text.push('\n');
        }
        fs::write(&path, text).map_err(|e| ServiceError::io(&path, e))
    }
}
