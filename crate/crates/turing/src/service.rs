use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use evalkit::statlab::{chi_square_2x2, ContingencyTable2x2, TestResult};
use evalkit::{DatasetManifest, Label};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::log::{replay, EventLog};
use crate::session::{Event, Item, Judgment, SessionStore, Status, TrueLabel};

#[derive(Debug, Clone, Deserialize)]
pub struct CreateSession {
    pub real_manifest: PathBuf,
    pub synth_manifest: PathBuf,
    pub n_real: usize,
    pub n_synth: usize,
    /// Omitted: a fresh random seed per session (per-grader image sets).
    pub seed: Option<u64>,
    #[serde(default)]
    pub grader: String,
    pub session_id: Option<String>,
}

/// Session summary sent to graders. Never carries labels or file paths.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionInfo {
    pub session_id: String,
    pub cursor: usize,
    pub total: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NextItem {
    pub session_id: String,
    pub index: usize,
    pub total: usize,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_token: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_url: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ack {
    pub accepted: bool,
    /// The same judgment was already recorded for this index; nothing changed.
    pub duplicate: bool,
    pub cursor: usize,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableView {
    pub counts: [[u64; 2]; 2],
    pub row_labels: [String; 2],
    pub col_labels: [String; 2],
    pub total: u64,
}

impl From<ContingencyTable2x2> for TableView {
    fn from(t: ContingencyTable2x2) -> Self {
        Self {
            counts: t.counts,
            row_labels: ContingencyTable2x2::ROW_LABELS.map(String::from),
            col_labels: ContingencyTable2x2::COL_LABELS.map(String::from),
            total: t.total(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub session_ids: Vec<String>,
    pub table: TableView,
    /// Absent when the table has a zero marginal (e.g. a grader who is always right).
    pub test: Option<TestResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub test_error: Option<String>,
}

impl Report {
    fn build(session_ids: Vec<String>, table: ContingencyTable2x2) -> Self {
        let (test, test_error) = match chi_square_2x2(&table, false) {
            Ok(t) => (Some(t), None),
            Err(e) => (None, Some(e.to_string())),
        };
        Self { session_ids, table: table.into(), test, test_error }
    }
}

pub struct TuringService {
    inner: Mutex<Inner>,
}

struct Inner {
    store: SessionStore,
    log: EventLog,
}

/// Unix time in milliseconds.
fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

fn new_token() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}

/// Picks `count` entries with `label` without replacement, in a seed-determined order.
fn sample(manifest: &DatasetManifest, label: Label, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<PathBuf>, ServiceError> {
    let mut pool: Vec<PathBuf> = manifest.with_label(label).map(|e| manifest.resolve(e)).collect();
    if pool.len() < count {
        return Err(ServiceError::Validation(format!(
            "manifest has {} {label} images, {count} requested",
            pool.len()
        )));
    }
    pool.shuffle(rng);
    pool.truncate(count);
    for path in &pool {
        if !path.is_file() {
            return Err(ServiceError::Validation(format!("image {} does not exist", path.display())));
        }
    }
    Ok(pool)
}

/// Deterministic item order for a seed: `(true label, path)` pairs.
pub fn plan_items(
    real: &DatasetManifest,
    synth: &DatasetManifest,
    n_real: usize,
    n_synth: usize,
    seed: u64,
) -> Result<Vec<(TrueLabel, PathBuf)>, ServiceError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items: Vec<(TrueLabel, PathBuf)> = sample(real, Label::Real, n_real, &mut rng)?
        .into_iter()
        .map(|p| (TrueLabel::Real, p))
        .chain(sample(synth, Label::Synthetic, n_synth, &mut rng)?.into_iter().map(|p| (TrueLabel::Synthetic, p)))
        .collect();
    items.shuffle(&mut rng);
    Ok(items)
}

impl TuringService {
    /// Opens (or creates) the event log and replays it.
    pub fn open(log_path: impl AsRef<Path>) -> Result<Self, ServiceError> {
        let store = replay(log_path.as_ref())?;
        let log = EventLog::open(log_path.as_ref())?;
        Ok(Self { inner: Mutex::new(Inner { store, log }) })
    }

    fn lock(&self) -> std::sync::MutexGuard<'_, Inner> {
        self.inner.lock().unwrap_or_else(|e| e.into_inner())
    }

    /// Snapshot of the in-memory store, for replay comparisons.
    pub fn snapshot(&self) -> SessionStore {
        self.lock().store.clone()
    }

    fn commit(inner: &mut Inner, event: Event) -> Result<(), ServiceError> {
        inner.store.check(&event)?;
        inner.log.append(&event)?;
        inner.store.apply(&event)
    }

    pub fn create_session(&self, req: CreateSession) -> Result<SessionInfo, ServiceError> {
        if req.n_real + req.n_synth == 0 {
            return Err(ServiceError::Validation("a session needs at least one image".into()));
        }
        let real = DatasetManifest::read(&req.real_manifest)?;
        let synth = DatasetManifest::read(&req.synth_manifest)?;
        let seed = req.seed.unwrap_or_else(rand::random);
        let planned = plan_items(&real, &synth, req.n_real, req.n_synth, seed)?;
        let items: Vec<Item> = planned.into_iter().map(|(label, path)| Item { token: new_token(), label, path }).collect();
        let session_id = req.session_id.unwrap_or_else(new_token);
        let total = items.len();
        let mut inner = self.lock();
        Self::commit(
            &mut inner,
            Event::SessionCreated { session_id: session_id.clone(), grader: req.grader, seed, items, at: now() },
        )?;
        Ok(SessionInfo { session_id, cursor: 0, total, status: Status::Active })
    }

    pub fn info(&self, id: &str) -> Result<SessionInfo, ServiceError> {
        let inner = self.lock();
        let s = inner.store.get(id)?;
        Ok(SessionInfo { session_id: s.id.clone(), cursor: s.cursor(), total: s.total(), status: s.status })
    }

    pub fn next(&self, id: &str) -> Result<NextItem, ServiceError> {
        let inner = self.lock();
        let s = inner.store.get(id)?;
        let token = (s.status == Status::Active).then(|| s.items[s.cursor()].token.clone());
        Ok(NextItem {
            session_id: s.id.clone(),
            index: s.cursor(),
            total: s.total(),
            status: s.status,
            image_url: token.as_ref().map(|t| format!("/images/{t}")),
            image_token: token,
        })
    }

    pub fn submit(&self, id: &str, index: usize, label: Judgment) -> Result<Ack, ServiceError> {
        let mut inner = self.lock();
        let s = inner.store.get(id)?;
        if let Some(last) = s.judgments.last() {
            if index == last.index && label == last.label {
                return Ok(Ack { accepted: true, duplicate: true, cursor: s.cursor(), status: s.status });
            }
        }
        Self::commit(&mut inner, Event::Judgment { session_id: id.to_string(), index, label, at: now() })?;
        let s = inner.store.get(id)?;
        if s.cursor() == s.total() {
            Self::commit(&mut inner, Event::Completed { session_id: id.to_string(), at: now() })?;
        }
        let s = inner.store.get(id)?;
        Ok(Ack { accepted: true, duplicate: false, cursor: s.cursor(), status: s.status })
    }

    pub fn report(&self, id: &str) -> Result<Report, ServiceError> {
        self.aggregate(&[id.to_string()])
    }

    /// Cell-wise sum over completed sessions, with the chi-square test on the total.
    pub fn aggregate(&self, ids: &[String]) -> Result<Report, ServiceError> {
        if ids.is_empty() {
            return Err(ServiceError::Validation("no session ids given".into()));
        }
        let inner = self.lock();
        let mut table = ContingencyTable2x2::default();
        for id in ids {
            let s = inner.store.get(id)?;
            if s.status != Status::Complete {
                return Err(ServiceError::State(format!("session {id} is not complete ({}/{})", s.cursor(), s.total())));
            }
            table = table.add(&s.table());
        }
        Ok(Report::build(ids.to_vec(), table))
    }

    pub fn image_path(&self, token: &str) -> Result<PathBuf, ServiceError> {
        self.lock().store.image_path(token).cloned().ok_or_else(|| ServiceError::NotFound("image".into()))
    }
}
