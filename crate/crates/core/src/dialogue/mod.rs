//! Session state machine for the OB, EB and S2R collection dialogue.

mod engine;
mod tips;
mod transcript;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec_model::{InteractionId, ScreenId};
use crate::nlp::ParsedPhrase;
use crate::predictor::PredictorConfig;

pub use engine::Dialogue;
pub use tips::tips_for;
pub use transcript::{Clock, FixedClock, Said, SystemClock, TranscriptEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Phase {
    SelectApp,
    CollectOb,
    DisambiguateOb,
    ConfirmOb,
    CollectEb,
    ConfirmEbScreen,
    CollectS2r,
    OfferSuggestions,
    ConfirmS2r,
    CollectInput,
    ConfirmLastStep,
    Preview,
    Done,
}

impl Phase {
    pub fn as_str(self) -> &'static str {
        match self {
            Phase::SelectApp => "SELECT_APP",
            Phase::CollectOb => "COLLECT_OB",
            Phase::DisambiguateOb => "DISAMBIGUATE_OB",
            Phase::ConfirmOb => "CONFIRM_OB",
            Phase::CollectEb => "COLLECT_EB",
            Phase::ConfirmEbScreen => "CONFIRM_EB_SCREEN",
            Phase::CollectS2r => "COLLECT_S2R",
            Phase::OfferSuggestions => "OFFER_SUGGESTIONS",
            Phase::ConfirmS2r => "CONFIRM_S2R",
            Phase::CollectInput => "COLLECT_INPUT",
            Phase::ConfirmLastStep => "CONFIRM_LAST_STEP",
            Phase::Preview => "PREVIEW",
            Phase::Done => "DONE",
        }
    }

    /// Position in the OB, EB, S2R ordering (0, 1, 2; report phases are 3).
    pub fn stage(self) -> u8 {
        match self {
            Phase::SelectApp | Phase::CollectOb | Phase::DisambiguateOb | Phase::ConfirmOb => 0,
            Phase::CollectEb | Phase::ConfirmEbScreen => 1,
            Phase::CollectS2r
            | Phase::OfferSuggestions
            | Phase::ConfirmS2r
            | Phase::CollectInput
            | Phase::ConfirmLastStep => 2,
            Phase::Preview | Phase::Done => 3,
        }
    }
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum UserMessage {
    Text {
        text: String,
    },
    /// At most one index into the screen cards last shown; empty means
    /// none of them.
    ScreenSelection {
        #[serde(default)]
        indices: Vec<usize>,
    },
    /// Indices into the step cards last shown, ascending.
    StepSelection {
        #[serde(default)]
        indices: Vec<usize>,
    },
    ConfirmYes,
    ConfirmNo,
    ActionFinish,
    ActionRestart,
    ActionPreview,
    /// Replaces the text of step `step` (1-based).
    StepEdit {
        step: usize,
        text: String,
    },
    StepDeleteLast,
}

impl UserMessage {
    pub fn kind(&self) -> &'static str {
        match self {
            UserMessage::Text { .. } => "TEXT",
            UserMessage::ScreenSelection { .. } => "SCREEN_SELECTION",
            UserMessage::StepSelection { .. } => "STEP_SELECTION",
            UserMessage::ConfirmYes => "CONFIRM_YES",
            UserMessage::ConfirmNo => "CONFIRM_NO",
            UserMessage::ActionFinish => "ACTION_FINISH",
            UserMessage::ActionRestart => "ACTION_RESTART",
            UserMessage::ActionPreview => "ACTION_PREVIEW",
            UserMessage::StepEdit { .. } => "STEP_EDIT",
            UserMessage::StepDeleteLast => "STEP_DELETE_LAST",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum BotKind {
    Prompt,
    RephraseRequest,
    ScreenCards,
    StepCards,
    ConfirmationQuestion,
    InputRequest,
    Info,
    ReportLink,
    TipsUpdate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Card {
    /// URL path of the image.
    pub screenshot: String,
    pub caption: String,
    /// True when the interacted component is highlighted.
    pub annotated: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub screen: Option<ScreenId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub interaction: Option<InteractionId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BotMessage {
    pub kind: BotKind,
    pub text: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub cards: Vec<Card>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub link: Option<String>,
}

impl BotMessage {
    pub fn new(kind: BotKind, text: impl Into<String>) -> Self {
        BotMessage {
            kind,
            text: text.into(),
            cards: Vec::new(),
            link: None,
        }
    }

    pub fn with_cards(mut self, cards: Vec<Card>) -> Self {
        self.cards = cards;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedStep {
    pub text: String,
    pub interaction: InteractionId,
    /// Asset-relative path of the annotated screenshot.
    pub screenshot: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_value: Option<String>,
}

/// What the last bot turn is waiting for.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Pending {
    #[default]
    Nothing,
    ObCandidates {
        candidates: Vec<ScreenId>,
        offset: usize,
    },
    ObConfirm {
        screen: ScreenId,
    },
    EbConfirm,
    Suggestions {
        paths: Vec<Vec<InteractionId>>,
        shown: usize,
    },
    StepConfirm {
        interaction: InteractionId,
        input_value: Option<String>,
    },
    StepChoice {
        candidates: Vec<InteractionId>,
        input_value: Option<String>,
    },
    Input {
        step: usize,
        queue: Vec<(InteractionId, Option<String>)>,
    },
    LastStep,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Session {
    pub session_id: String,
    pub app_id: String,
    pub phase: Phase,
    pub current_state: ScreenId,
    pub ob_text: Option<String>,
    pub ob_phrase: Option<ParsedPhrase>,
    pub ob_screen: Option<ScreenId>,
    pub ob_attempts: u8,
    pub eb_text: Option<String>,
    /// True when the EB was checked against the confirmed OB screen, either
    /// by matching or by the reporter's confirmation.
    pub eb_verified: bool,
    pub steps: Vec<ReportedStep>,
    pub pending: Pending,
    pub transcript: Vec<TranscriptEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelStep {
    pub number: usize,
    pub text: String,
    pub screenshot: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input_value: Option<String>,
}

/// What the chat UI side panels display.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PanelState {
    pub phase: Phase,
    pub steps: Vec<PanelStep>,
    /// Screenshot URLs of the last three steps, oldest first.
    pub screenshots: Vec<String>,
    pub tips: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DialogueConfig {
    pub threshold: f64,
    pub card_cap: usize,
    pub max_ob_attempts: u8,
    pub predictor: PredictorConfig,
    /// URL prefix under which `<app_id>/<asset path>` is served.
    pub asset_base: String,
    /// Report URL; `{session}` is replaced by the session id.
    pub report_link: String,
}

impl Default for DialogueConfig {
    fn default() -> Self {
        DialogueConfig {
            threshold: crate::matcher::DEFAULT_THRESHOLD,
            card_cap: crate::matcher::DEFAULT_DISPLAY_CAP,
            max_ob_attempts: 3,
            predictor: PredictorConfig::default(),
            asset_base: "/assets".to_string(),
            report_link: "/api/sessions/{session}/report?format=html".to_string(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DialogueError {
    #[error("{kind} is not allowed in phase {phase}")]
    IllegalMessage { kind: &'static str, phase: Phase },
    #[error("invalid payload: {0}")]
    InvalidPayload(String),
    #[error("nothing to report")]
    NothingToReport,
    #[error("no step can be deleted")]
    NothingToDelete,
    #[error("desynchronized session: {0}")]
    Desynchronized(String),
}
