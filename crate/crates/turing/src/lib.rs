//! Blinded human Turing-test sessions.
//!
//! Graders see one unlabeled image at a time and answer `real` or `fake`.
//! Every state change is first appended to a JSONL event log, which is
//! replayed on start-up.

pub mod api;
pub mod error;
pub mod log;
pub mod service;
pub mod session;

pub use crate::api::{router, serve};
pub use crate::error::ServiceError;
pub use crate::service::{CreateSession, Report, TuringService};
pub use crate::session::{Judgment, SessionStore, Status, TrueLabel, TuringSession};
