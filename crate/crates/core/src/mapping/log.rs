//! Append-only edit log and snapshots.
//!
//! A workbook directory holds `edits.log` (a JSON header line followed by one
//! JSON record per applied edit) and optional snapshot pairs
//! `snapshot-<rev>.json` / `snapshot-<rev>.nt`.

use std::fs::{self, File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::rdf::{ntriples, Iri, SyntaxError};

use super::{EditOp, IdSource, MappingError, RandomIds, TripleDelta, Workbook, WorkbookOptions, WorkbookState};

pub const LOG_FORMAT: &str = "rdfsheet-editlog";
pub const LOG_VERSION: u32 = 1;
pub const LOG_FILE: &str = "edits.log";

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("not an edit log: {0}")]
    Format(String),
    #[error("revision {revision}: {source}")]
    Replay { revision: u64, source: MappingError },
    #[error("expected revision {expected}, found {found}")]
    Gap { expected: u64, found: u64 },
    #[error("snapshot: {0}")]
    Snapshot(String),
    #[error("snapshot graph: {0}")]
    SnapshotGraph(#[from] SyntaxError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogHeader {
    pub format: String,
    pub version: u32,
    pub workbook: String,
    #[serde(flatten)]
    pub options: WorkbookOptions,
}

impl LogHeader {
    pub fn for_workbook(wb: &Workbook) -> Self {
        LogHeader {
            format: LOG_FORMAT.into(),
            version: LOG_VERSION,
            workbook: wb.id().to_string(),
            options: wb.options().clone(),
        }
    }
}

/// One applied edit, with the IRIs it minted so replay is deterministic.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogRecord {
    pub revision: u64,
    pub edit: EditOp,
    pub minted: Vec<Iri>,
    pub timestamp_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actor: Option<String>,
}

impl LogRecord {
    pub fn new(revision: u64, edit: EditOp, delta: &TripleDelta, actor: Option<String>) -> Self {
        let timestamp_ms = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_millis() as u64)
            .unwrap_or(0);
        LogRecord {
            revision,
            edit,
            minted: delta.minted.iter().map(|m| m.iri.clone()).collect(),
            timestamp_ms,
            actor,
        }
    }
}

/// Reads a log. A final line without a newline is a write interrupted by a
/// crash; it was never acknowledged and is dropped.
pub fn read_log(reader: impl io::Read) -> Result<(LogHeader, Vec<LogRecord>), LogError> {
    let mut reader = BufReader::new(reader);
    let mut header: Option<LogHeader> = None;
    let mut records = Vec::new();
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        if reader.read_line(&mut buf)? == 0 {
            break;
        }
        line_no += 1;
        let Some(line) = buf.strip_suffix('\n') else {
            break;
        };
        if line.trim().is_empty() {
            continue;
        }
        if header.is_none() {
            let h: LogHeader = serde_json::from_str(line).map_err(|source| LogError::Json { line: line_no, source })?;
            if h.format != LOG_FORMAT || h.version != LOG_VERSION {
                return Err(LogError::Format(format!("{} v{}", h.format, h.version)));
            }
            header = Some(h);
            continue;
        }
        let r: LogRecord = serde_json::from_str(line).map_err(|source| LogError::Json { line: line_no, source })?;
        records.push(r);
    }
    let header = header.ok_or_else(|| LogError::Format("missing header".into()))?;
    Ok((header, records))
}

pub fn read_log_file(path: &Path) -> Result<(LogHeader, Vec<LogRecord>), LogError> {
    read_log(File::open(path)?)
}

/// Applies records in order on top of `wb`, skipping those it already has,
/// and returns the deltas of the records applied.
pub fn replay_records(wb: &mut Workbook, records: &[LogRecord]) -> Result<Vec<TripleDelta>, LogError> {
    let mut deltas = Vec::new();
    for r in records {
        if r.revision <= wb.revision() {
            continue;
        }
        if r.revision != wb.revision() + 1 {
            return Err(LogError::Gap {
                expected: wb.revision() + 1,
                found: r.revision,
            });
        }
        let (delta, _) = wb.replay_edit(&r.edit, &r.minted).map_err(|source| LogError::Replay {
            revision: r.revision,
            source,
        })?;
        deltas.push(delta);
    }
    Ok(deltas)
}

/// Rebuilds a workbook from a log alone.
pub fn replay_log(header: &LogHeader, records: &[LogRecord]) -> Result<Workbook, LogError> {
    let mut wb = Workbook::new(header.workbook.clone(), header.options.clone())
        .map_err(|source| LogError::Replay { revision: 0, source })?;
    replay_records(&mut wb, records)?;
    Ok(wb)
}

fn snapshot_paths(dir: &Path, revision: u64) -> (PathBuf, PathBuf) {
    (
        dir.join(format!("snapshot-{revision}.json")),
        dir.join(format!("snapshot-{revision}.nt")),
    )
}

fn write_durably(path: &Path, contents: &[u8]) -> io::Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let mut f = File::create(&tmp)?;
    f.write_all(contents)?;
    f.sync_all()?;
    fs::rename(&tmp, path)
}

/// Writes the structure and graph of `wb` as a snapshot pair.
pub fn write_snapshot(dir: &Path, wb: &Workbook) -> Result<u64, LogError> {
    let (json, nt) = snapshot_paths(dir, wb.revision());
    let state = serde_json::to_vec_pretty(&wb.state()).map_err(|e| LogError::Snapshot(e.to_string()))?;
    write_durably(&nt, ntriples::serialize(wb.graph()).as_bytes())?;
    write_durably(&json, &state)?;
    Ok(wb.revision())
}

pub fn read_snapshot(dir: &Path, revision: u64, ids: Box<dyn IdSource>) -> Result<Workbook, LogError> {
    let (json, nt) = snapshot_paths(dir, revision);
    let state: WorkbookState =
        serde_json::from_slice(&fs::read(json)?).map_err(|e| LogError::Snapshot(e.to_string()))?;
    let graph = ntriples::parse(&fs::read_to_string(nt)?)?;
    Workbook::from_state(state, graph, ids).map_err(|e| LogError::Snapshot(e.to_string()))
}

/// Revisions of complete snapshot pairs in `dir`, ascending.
pub fn snapshot_revisions(dir: &Path) -> io::Result<Vec<u64>> {
    let mut revs = Vec::new();
    for entry in fs::read_dir(dir)? {
        let name = entry?.file_name();
        let Some(rev) = name
            .to_str()
            .and_then(|n| n.strip_prefix("snapshot-"))
            .and_then(|n| n.strip_suffix(".json"))
            .and_then(|n| n.parse::<u64>().ok())
        else {
            continue;
        };
        if snapshot_paths(dir, rev).1.exists() {
            revs.push(rev);
        }
    }
    revs.sort_unstable();
    Ok(revs)
}

/// The outcome of [`EditLog::open`].
#[derive(Debug)]
pub struct Recovered {
    pub log: EditLog,
    pub workbook: Workbook,
    /// Records replayed on top of the snapshot, with their deltas.
    pub tail: Vec<(LogRecord, TripleDelta)>,
}

/// A workbook directory opened for appending.
#[derive(Debug)]
pub struct EditLog {
    dir: PathBuf,
    file: File,
}

impl EditLog {
    /// Starts a new log for an empty workbook.
    pub fn create(dir: &Path, wb: &Workbook) -> Result<Self, LogError> {
        fs::create_dir_all(dir)?;
        let path = dir.join(LOG_FILE);
        let mut file = OpenOptions::new().write(true).create_new(true).open(&path)?;
        let mut line = serde_json::to_string(&LogHeader::for_workbook(wb)).expect("header serializes");
        line.push('\n');
        file.write_all(line.as_bytes())?;
        file.sync_all()?;
        if let Ok(d) = File::open(dir) {
            let _ = d.sync_all();
        }
        Ok(EditLog {
            dir: dir.to_path_buf(),
            file,
        })
    }

    /// Recovers the workbook in `dir` from its newest usable snapshot and the
    /// log tail, then opens the log for appending.
    pub fn open(dir: &Path) -> Result<Recovered, LogError> {
        let path = dir.join(LOG_FILE);
        let (header, records) = read_log_file(&path)?;
        let mut wb = None;
        for rev in snapshot_revisions(dir)?.into_iter().rev() {
            if let Ok(w) = read_snapshot(dir, rev, Box::new(RandomIds)) {
                wb = Some(w);
                break;
            }
        }
        let mut wb = match wb {
            Some(w) => w,
            None => Workbook::new(header.workbook.clone(), header.options.clone())
                .map_err(|source| LogError::Replay { revision: 0, source })?,
        };
        let base = wb.revision();
        let deltas = replay_records(&mut wb, &records)?;
        let tail = records.into_iter().filter(|r| r.revision > base).zip(deltas).collect();
        let mut file = OpenOptions::new().read(true).write(true).open(&path)?;
        truncate_torn_tail(&mut file)?;
        Ok(Recovered {
            log: EditLog {
                dir: dir.to_path_buf(),
                file,
            },
            workbook: wb,
            tail,
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Appends a record and waits until it is on disk.
    pub fn append(&mut self, record: &LogRecord) -> Result<(), LogError> {
        let mut line = serde_json::to_string(record).expect("record serializes");
        line.push('\n');
        self.file.write_all(line.as_bytes())?;
        self.file.sync_data()?;
        Ok(())
    }

    pub fn snapshot(&self, wb: &Workbook) -> Result<u64, LogError> {
        write_snapshot(&self.dir, wb)
    }
}

/// Cuts a trailing partial line left by an interrupted append and positions
/// the file at its end.
fn truncate_torn_tail(file: &mut File) -> io::Result<()> {
    use std::io::{Read, Seek, SeekFrom};
    let mut contents = Vec::new();
    file.seek(SeekFrom::Start(0))?;
    file.read_to_end(&mut contents)?;
    let keep = contents.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    if keep < contents.len() {
        file.set_len(keep as u64)?;
        file.sync_all()?;
    }
    file.seek(SeekFrom::End(0))?;
    Ok(())
}
