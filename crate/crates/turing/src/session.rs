//! Session state machine and the events that drive it.
//!
//! All state changes go through [`SessionStore::apply`], which is also what
//! replay uses, so a store rebuilt from the log matches the live one.

use std::collections::BTreeMap;
use std::path::PathBuf;

use evalkit::statlab::ContingencyTable2x2;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;

pub const EVENT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TrueLabel {
    Real,
    Synthetic,
}

/// What the grader answers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Judgment {
    Real,
    Fake,
}

impl Judgment {
    pub fn is_correct_for(self, truth: TrueLabel) -> bool {
        matches!((self, truth), (Judgment::Real, TrueLabel::Real) | (Judgment::Fake, TrueLabel::Synthetic))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Item {
    pub token: String,
    pub label: TrueLabel,
    pub path: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JudgmentRecord {
    pub index: usize,
    pub label: Judgment,
    pub at: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Active,
    Complete,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TuringSession {
    pub id: String,
    pub grader: String,
    pub seed: u64,
    pub items: Vec<Item>,
    pub judgments: Vec<JudgmentRecord>,
    pub status: Status,
    pub created_at: u64,
}

impl TuringSession {
    pub fn cursor(&self) -> usize {
        self.judgments.len()
    }

    pub fn total(&self) -> usize {
        self.items.len()
    }

    /// Rows: true real / true synthetic. Columns: correct / incorrect.
    pub fn table(&self) -> ContingencyTable2x2 {
        let mut counts = [[0u64; 2]; 2];
        for j in &self.judgments {
            let truth = self.items[j.index].label;
            let row = match truth {
                TrueLabel::Real => 0,
                TrueLabel::Synthetic => 1,
            };
            let col = if j.label.is_correct_for(truth) { 0 } else { 1 };
            counts[row][col] += 1;
        }
        ContingencyTable2x2::new(counts)
    }
}

/// One line of the JSONL log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub v: u32,
    #[serde(flatten)]
    pub event: Event,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Event {
    SessionCreated { session_id: String, grader: String, seed: u64, items: Vec<Item>, at: u64 },
    Judgment { session_id: String, index: usize, label: Judgment, at: u64 },
    Completed { session_id: String, at: u64 },
}

impl Event {
    pub fn session_id(&self) -> &str {
        match self {
            Event::SessionCreated { session_id, .. }
            | Event::Judgment { session_id, .. }
            | Event::Completed { session_id, .. } => session_id,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SessionStore {
    sessions: BTreeMap<String, TuringSession>,
    tokens: BTreeMap<String, PathBuf>,
}

impl SessionStore {
    pub fn get(&self, id: &str) -> Result<&TuringSession, ServiceError> {
        self.sessions.get(id).ok_or_else(|| ServiceError::NotFound(format!("session {id}")))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.sessions.contains_key(id)
    }

    pub fn image_path(&self, token: &str) -> Option<&PathBuf> {
        self.tokens.get(token)
    }

    pub fn sessions(&self) -> impl Iterator<Item = &TuringSession> {
        self.sessions.values()
    }

    /// Checks that `event` is legal in the current state without applying it.
    pub fn check(&self, event: &Event) -> Result<(), ServiceError> {
        match event {
            Event::SessionCreated { session_id, items, .. } => {
                if self.sessions.contains_key(session_id) {
                    return Err(ServiceError::Conflict(format!("session {session_id} already exists")));
                }
                if items.is_empty() {
                    return Err(ServiceError::Validation("a session needs at least one item".into()));
                }
                Ok(())
            }
            Event::Judgment { session_id, index, .. } => {
                let s = self.get(session_id)?;
                if s.status == Status::Complete {
                    return Err(ServiceError::State(format!("session {session_id} is complete")));
                }
                if *index != s.cursor() {
                    return Err(ServiceError::Sequence { expected: s.cursor(), got: *index });
                }
                Ok(())
            }
            Event::Completed { session_id, .. } => {
                let s = self.get(session_id)?;
                if s.status == Status::Complete || s.cursor() != s.total() {
                    return Err(ServiceError::State(format!("session {session_id} cannot be completed now")));
                }
                Ok(())
            }
        }
    }

    pub fn apply(&mut self, event: &Event) -> Result<(), ServiceError> {
        self.check(event)?;
        match event {
            Event::SessionCreated { session_id, grader, seed, items, at } => {
                for item in items {
                    self.tokens.insert(item.token.clone(), item.path.clone());
                }
                self.sessions.insert(
                    session_id.clone(),
                    TuringSession {
                        id: session_id.clone(),
                        grader: grader.clone(),
                        seed: *seed,
                        items: items.clone(),
                        judgments: Vec::new(),
                        status: Status::Active,
                        created_at: *at,
                    },
                );
            }
            Event::Judgment { session_id, index, label, at } => {
                let s = self.sessions.get_mut(session_id).expect("checked");
                s.judgments.push(JudgmentRecord { index: *index, label: *label, at: *at });
            }
            Event::Completed { session_id, .. } => {
                self.sessions.get_mut(session_id).expect("checked").status = Status::Complete;
            }
        }
        Ok(())
    }
}
