//! Append-only session logs: one JSON event per line in `<session id>.jsonl`.
//! Every append is synced to disk before it returns.

use std::fs::{File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use consult_core::AppliedAnswer;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Created {
        session_id: String,
        model_id: String,
        model_hash: String,
        seed: u64,
        at_ms: u64,
    },
    Answer {
        question: String,
        answer: String,
        at_ms: u64,
    },
    Undo {
        at_ms: u64,
    },
}

pub fn now_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

/// A session log folded into what replay needs.
#[derive(Debug, Clone, PartialEq)]
pub struct SessionLog {
    pub session_id: String,
    pub model_id: String,
    pub model_hash: String,
    pub seed: u64,
    pub answers: Vec<AppliedAnswer>,
}

impl SessionLog {
    pub fn fold(events: &[Event]) -> Result<Self, String> {
        let Some(Event::Created {
            session_id,
            model_id,
            model_hash,
            seed,
            ..
        }) = events.first()
        else {
            return Err("log does not start with a created event".into());
        };
        let mut answers = Vec::new();
        for (i, e) in events.iter().enumerate().skip(1) {
            match e {
                Event::Created { .. } => return Err(format!("event {}: second created event", i + 1)),
                Event::Answer { question, answer, .. } => answers.push(AppliedAnswer {
                    question: question.clone(),
                    answer: answer.clone(),
                }),
                Event::Undo { .. } => {
                    answers
                        .pop()
                        .ok_or_else(|| format!("event {}: undo with no answers", i + 1))?;
                }
            }
        }
        Ok(Self {
            session_id: session_id.clone(),
            model_id: model_id.clone(),
            model_hash: model_hash.clone(),
            seed: *seed,
            answers,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

impl Store {
    pub fn open(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn path(&self, session: &str) -> PathBuf {
        self.dir.join(format!("{session}.jsonl"))
    }

    /// Starts a new log; fails if one exists for this id.
    pub fn create(&self, created: &Event) -> io::Result<()> {
        let Event::Created { session_id, .. } = created else {
            return Err(io::Error::new(io::ErrorKind::InvalidInput, "not a created event"));
        };
        let file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(self.path(session_id))?;
        write_line(file, created)?;
        File::open(&self.dir)?.sync_all()
    }

    pub fn append(&self, session: &str, event: &Event) -> io::Result<()> {
        let file = OpenOptions::new().append(true).open(self.path(session))?;
        write_line(file, event)
    }

    pub fn read(&self, session: &str) -> io::Result<Vec<Event>> {
        read_events(&self.path(session))
    }

    /// Every log in the directory, by file name; a log that cannot be read
    /// or folded is returned as an error message for that file.
    pub fn load_all(&self) -> io::Result<Vec<(PathBuf, Result<SessionLog, String>)>> {
        let mut paths: Vec<PathBuf> = std::fs::read_dir(&self.dir)?
            .map(|e| e.map(|e| e.path()))
            .collect::<io::Result<_>>()?;
        paths.retain(|p| p.extension().is_some_and(|x| x == "jsonl"));
        paths.sort();
        Ok(paths
            .into_iter()
            .map(|p| {
                let log = drop_torn_tail(&p)
                    .and_then(|_| read_events(&p))
                    .map_err(|e| e.to_string())
                    .and_then(|events| SessionLog::fold(&events));
                (p, log)
            })
            .collect())
    }
}

fn write_line(mut file: File, event: &Event) -> io::Result<()> {
    let mut line = serde_json::to_vec(event).map_err(io::Error::other)?;
    line.push(b'\n');
    file.write_all(&line)?;
    file.sync_data()
}

/// Truncates a final line that lacks its newline so later appends start clean.
fn drop_torn_tail(path: &Path) -> io::Result<()> {
    let bytes = std::fs::read(path)?;
    if bytes.last().is_some_and(|&b| b != b'\n') {
        let keep = bytes.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
        let file = OpenOptions::new().write(true).open(path)?;
        file.set_len(keep as u64)?;
        file.sync_all()?;
    }
    Ok(())
}

/// A final line without its newline is a write that never completed and is dropped.
fn read_events(path: &Path) -> io::Result<Vec<Event>> {
    let text = std::fs::read_to_string(path)?;
    text.split_inclusive('\n')
        .filter(|l| l.ends_with('\n') && !l.trim().is_empty())
        .enumerate()
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| {
                io::Error::new(
                    io::ErrorKind::InvalidData,
                    format!("{} line {}: {e}", path.display(), i + 1),
                )
            })
        })
        .collect()
}
