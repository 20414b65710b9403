#![allow(dead_code)]

use std::path::PathBuf;

use burt_core::dialogue::{BotMessage, Dialogue, DialogueConfig, DialogueError, FixedClock, Session, UserMessage};
use burt_core::exec_model::ExecutionModel;
use burt_core::nlp::Lexicon;

pub fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

pub fn mileage() -> ExecutionModel {
    ExecutionModel::load(&fixtures().join("models/mileage/model.json")).expect("fixture model loads")
}

pub fn text(t: &str) -> UserMessage {
    UserMessage::Text { text: t.to_string() }
}

pub fn steps(indices: &[usize]) -> UserMessage {
    UserMessage::StepSelection {
        indices: indices.to_vec(),
    }
}

pub fn screens(indices: &[usize]) -> UserMessage {
    UserMessage::ScreenSelection {
        indices: indices.to_vec(),
    }
}

/// Owns everything a `Dialogue` borrows.
pub struct Harness {
    pub model: ExecutionModel,
    pub lexicon: Lexicon,
    pub config: DialogueConfig,
    pub clock: FixedClock,
}

impl Harness {
    pub fn new() -> Self {
        Self::with_config(DialogueConfig::default())
    }

    pub fn with_config(config: DialogueConfig) -> Self {
        Harness {
            model: mileage(),
            lexicon: Lexicon::builtin(),
            config,
            clock: FixedClock::default(),
        }
    }

    pub fn dialogue(&self) -> Dialogue<'_> {
        Dialogue::new(&self.model, &self.lexicon, &self.config, &self.clock)
    }

    pub fn start(&self) -> Session {
        self.dialogue().start("s1", "mileage").0
    }

    pub fn send(&self, s: &mut Session, msg: UserMessage) -> Result<Vec<BotMessage>, DialogueError> {
        self.dialogue().advance(s, msg)
    }

    /// Sends every message, panicking on the first rejection.
    pub fn run(&self, s: &mut Session, script: Vec<UserMessage>) -> Vec<BotMessage> {
        let mut last = Vec::new();
        for m in script {
            let kind = m.kind();
            last = self
                .send(s, m)
                .unwrap_or_else(|e| panic!("{kind} rejected in {}: {e}", s.phase));
        }
        last
    }
}

/// OB, EB and the suggested steps up to the statistics screen, ending at
/// the last-step question.
pub fn happy_prefix() -> Vec<UserMessage> {
    vec![
        text("The average fuel economy shows NaN"),
        UserMessage::ConfirmYes,
        text("The average fuel economy should be a number"),
        steps(&[0, 1]),
    ]
}
