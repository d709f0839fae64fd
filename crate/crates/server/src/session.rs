//! Workbook sessions: the ordered edit pipeline, persistence and change feed.

use std::collections::{HashMap, VecDeque};
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Duration;

use rdfsheet_core::mapping::log::{EditLog, LogError, LogRecord, Recovered, LOG_FILE};
use rdfsheet_core::mapping::{EditOp, MappingError, Workbook, WorkbookOptions};
use rdfsheet_core::TripleDelta;
use serde::{Deserialize, Serialize};
use tokio::sync::{broadcast, RwLock, RwLockReadGuard};

/// One applied edit as delivered on the change feed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeEvent {
    pub revision: u64,
    pub edit: EditOp,
    pub delta: TripleDelta,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actor: Option<String>,
    pub timestamp_ms: u64,
}

impl ChangeEvent {
    fn from_record(record: LogRecord, delta: TripleDelta) -> Self {
        ChangeEvent {
            revision: record.revision,
            edit: record.edit,
            delta,
            actor: record.actor,
            timestamp_ms: record.timestamp_ms,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    /// Where workbooks are persisted; `None` keeps them in memory only.
    pub data_dir: Option<PathBuf>,
    /// Write a snapshot every this many revisions (0 disables).
    pub snapshot_every: u64,
    /// Keep at most this many past events for feed replay (`None`: all).
    pub retention: Option<usize>,
    /// Events a subscriber may fall behind before it is disconnected.
    pub feed_buffer: usize,
    pub heartbeat: Duration,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            data_dir: None,
            snapshot_every: 1000,
            retention: None,
            feed_buffer: 4096,
            heartbeat: Duration::from_secs(15),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ServiceError {
    #[error("workbook {0} not found")]
    NotFound(String),
    #[error(transparent)]
    Mapping(#[from] MappingError),
    #[error("storage: {0}")]
    Storage(#[from] LogError),
    #[error("revision {since} is ahead of the current revision {current}")]
    SinceAhead { since: u64, current: u64 },
    #[error("revision {since} predates the retained history (oldest replayable: {oldest})")]
    Gone { since: u64, oldest: u64 },
    #[error("workbook {0} is unavailable after a storage failure")]
    Poisoned(String),
}

pub struct SessionState {
    pub workbook: Workbook,
    log: Option<EditLog>,
    history: VecDeque<Arc<ChangeEvent>>,
    /// Subscribers may resume from any revision at or after this one.
    oldest_resumable: u64,
    poisoned: bool,
}

impl SessionState {
    fn trim(&mut self, retention: Option<usize>) {
        let Some(keep) = retention else { return };
        while self.history.len() > keep {
            if let Some(e) = self.history.pop_front() {
                self.oldest_resumable = e.revision;
            }
        }
    }
}

pub struct Session {
    state: RwLock<SessionState>,
    feed: broadcast::Sender<Arc<ChangeEvent>>,
    config: Arc<ServiceConfig>,
}

/// A subscription that will see every revision after `since` exactly once.
pub struct Subscription {
    pub backlog: Vec<Arc<ChangeEvent>>,
    pub live: broadcast::Receiver<Arc<ChangeEvent>>,
}

impl Session {
    fn new(mut state: SessionState, config: Arc<ServiceConfig>) -> Self {
        state.trim(config.retention);
        let (feed, _) = broadcast::channel(config.feed_buffer.max(1));
        Session {
            state: RwLock::new(state),
            feed,
            config,
        }
    }

    pub async fn read(&self) -> RwLockReadGuard<'_, SessionState> {
        self.state.read().await
    }

    /// Applies, persists, then broadcasts one edit. The write lock makes this
    /// the single serialization point for the workbook.
    pub async fn submit(&self, edit: EditOp, actor: Option<String>) -> Result<Arc<ChangeEvent>, ServiceError> {
        let mut guard = self.state.write().await;
        let st = &mut *guard;
        if st.poisoned {
            return Err(ServiceError::Poisoned(st.workbook.id().to_string()));
        }
        let (delta, revision) = st.workbook.apply_edit(&edit)?;
        let record = LogRecord::new(revision, edit, &delta, actor);
        if let Some(log) = st.log.as_mut() {
            if let Err(e) = log.append(&record) {
                // the in-memory workbook is now ahead of the log
                st.poisoned = true;
                return Err(e.into());
            }
            if self.config.snapshot_every > 0 && revision % self.config.snapshot_every == 0 {
                let _ = log.snapshot(&st.workbook);
            }
        }
        let event = Arc::new(ChangeEvent::from_record(record, delta));
        st.history.push_back(event.clone());
        st.trim(self.config.retention);
        let _ = self.feed.send(event.clone());
        Ok(event)
    }

    pub async fn subscribe(&self, since: u64) -> Result<Subscription, ServiceError> {
        let st = self.state.read().await;
        let current = st.workbook.revision();
        if since > current {
            return Err(ServiceError::SinceAhead { since, current });
        }
        if since < st.oldest_resumable {
            return Err(ServiceError::Gone {
                since,
                oldest: st.oldest_resumable,
            });
        }
        let backlog = st.history.iter().filter(|e| e.revision > since).cloned().collect();
        // subscribing under the read lock: no edit can slip between backlog and feed
        Ok(Subscription {
            backlog,
            live: self.feed.subscribe(),
        })
    }
}

/// All workbooks known to the service.
pub struct Registry {
    sessions: RwLock<HashMap<String, Arc<Session>>>,
    config: Arc<ServiceConfig>,
}

fn valid_id(id: &str) -> bool {
    !id.is_empty() && id.len() <= 64 && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'-' || b == b'_')
}

impl Registry {
    pub fn new(config: ServiceConfig) -> Self {
        Registry {
            sessions: RwLock::new(HashMap::new()),
            config: Arc::new(config),
        }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.config
    }

    fn dir_of(&self, id: &str) -> Option<PathBuf> {
        self.config.data_dir.as_ref().map(|d| d.join(id))
    }

    pub async fn create(&self, options: WorkbookOptions) -> Result<String, ServiceError> {
        let id = uuid::Uuid::new_v4().simple().to_string();
        let workbook = Workbook::new(id.clone(), options)?;
        let log = match self.dir_of(&id) {
            Some(dir) => Some(EditLog::create(&dir, &workbook)?),
            None => None,
        };
        let state = SessionState {
            workbook,
            log,
            history: VecDeque::new(),
            oldest_resumable: 0,
            poisoned: false,
        };
        let session = Arc::new(Session::new(state, self.config.clone()));
        self.sessions.write().await.insert(id.clone(), session);
        Ok(id)
    }

    /// Looks a workbook up, recovering it from disk on first access.
    pub async fn get(&self, id: &str) -> Result<Arc<Session>, ServiceError> {
        if let Some(s) = self.sessions.read().await.get(id) {
            return Ok(s.clone());
        }
        let not_found = || ServiceError::NotFound(id.to_string());
        if !valid_id(id) {
            return Err(not_found());
        }
        let dir = self.dir_of(id).ok_or_else(not_found)?;
        if !dir.join(LOG_FILE).is_file() {
            return Err(not_found());
        }
        let mut sessions = self.sessions.write().await;
        if let Some(s) = sessions.get(id) {
            return Ok(s.clone());
        }
        let session = Arc::new(Session::new(recover(&dir)?, self.config.clone()));
        sessions.insert(id.to_string(), session.clone());
        Ok(session)
    }

    /// Ids of workbooks on disk or in memory.
    pub async fn list(&self) -> Vec<String> {
        let mut ids: Vec<String> = self.sessions.read().await.keys().cloned().collect();
        if let Some(dir) = &self.config.data_dir {
            if let Ok(entries) = std::fs::read_dir(dir) {
                for e in entries.flatten() {
                    let name = e.file_name().to_string_lossy().into_owned();
                    if valid_id(&name) && e.path().join(LOG_FILE).is_file() {
                        ids.push(name);
                    }
                }
            }
        }
        ids.sort();
        ids.dedup();
        ids
    }
}

fn recover(dir: &Path) -> Result<SessionState, ServiceError> {
    let Recovered { log, workbook, tail } = EditLog::open(dir)?;
    let oldest_resumable = tail.first().map_or(workbook.revision(), |(r, _)| r.revision - 1);
    let history = tail
        .into_iter()
        .map(|(r, d)| Arc::new(ChangeEvent::from_record(r, d)))
        .collect();
    Ok(SessionState {
        workbook,
        log: Some(log),
        history,
        oldest_resumable,
        poisoned: false,
    })
}
