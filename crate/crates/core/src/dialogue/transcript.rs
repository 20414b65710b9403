use std::sync::atomic::{AtomicI64, Ordering};

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use super::{BotMessage, Phase, UserMessage};

pub trait Clock: Send + Sync {
    fn now(&self) -> DateTime<Utc>;
}

#[derive(Debug, Default, Clone, Copy)]
pub struct SystemClock;

impl Clock for SystemClock {
    fn now(&self) -> DateTime<Utc> {
        Utc::now()
    }
}

/// Deterministic clock for replays: starts at a fixed instant and advances
/// one second per reading.
#[derive(Debug)]
pub struct FixedClock {
    next: AtomicI64,
}

impl FixedClock {
    pub fn starting_at(unix_seconds: i64) -> Self {
        FixedClock {
            next: AtomicI64::new(unix_seconds),
        }
    }
}

impl Default for FixedClock {
    fn default() -> Self {
        // 2024-01-01T00:00:00Z
        FixedClock::starting_at(1_704_067_200)
    }
}

impl Clock for FixedClock {
    fn now(&self) -> DateTime<Utc> {
        let s = self.next.fetch_add(1, Ordering::SeqCst);
        Utc.timestamp_opt(s, 0).single().unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "role", content = "message", rename_all = "lowercase")]
pub enum Said {
    User(UserMessage),
    Bot(BotMessage),
}

/// One transcript line. `phase` is the phase after the turn was processed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub seq: u64,
    pub at: String,
    pub phase: Phase,
    #[serde(flatten)]
    pub said: Said,
}

impl TranscriptEntry {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("transcript entries serialize")
    }
}
