//! Task state backed by an append-only journal.
//!
//! `journal.jsonl` is the source of truth and is replayed on open. Leases are
//! kept in memory only. `fakes.jsonl` is a derived view of every submission
//! that passed the mechanical gates and was not rejected on review; it is
//! rewritten atomically after each change.

use std::collections::BTreeMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::validate::{m_required, validate, ValidationResult};
use crate::error::{Error, Result};
use crate::fakes::{FakeRecord, FakeWriter};
use crate::squad::{paragraph_id, Paragraph, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Open,
    /// Passed the mechanical gates; awaiting expert review.
    Submitted,
    Accepted,
    Rejected,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationTask {
    pub task_id: String,
    pub paragraph_id: String,
    pub original: String,
    pub m_required: usize,
    pub status: TaskStatus,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annotator: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modified: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReviewDecision {
    Accept,
    Reject,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
enum Event {
    Create {
        task_id: String,
        text: String,
    },
    Submit {
        task_id: String,
        annotator: String,
        modified: String,
    },
    Review {
        task_id: String,
        decision: ReviewDecision,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SubmitOutcome {
    Submitted { validation: ValidationResult },
    Rejected { validation: ValidationResult },
}

struct Lease {
    annotator: String,
    expires: Instant,
}

#[derive(Default)]
struct State {
    tasks: BTreeMap<String, AnnotationTask>,
    leases: BTreeMap<String, Lease>,
    next_id: u64,
}

impl State {
    fn apply(&mut self, event: &Event) -> Result<()> {
        match event {
            Event::Create { task_id, text } => {
                let task = AnnotationTask {
                    task_id: task_id.clone(),
                    paragraph_id: paragraph_id(text),
                    original: text.clone(),
                    m_required: m_required(text),
                    status: TaskStatus::Open,
                    annotator: None,
                    modified: None,
                };
                self.tasks.insert(task_id.clone(), task);
                self.next_id += 1;
            }
            Event::Submit {
                task_id,
                annotator,
                modified,
            } => {
                let task = self.task_mut(task_id)?;
                task.status = TaskStatus::Submitted;
                task.annotator = Some(annotator.clone());
                task.modified = Some(modified.clone());
                self.leases.remove(task_id);
            }
            Event::Review { task_id, decision } => {
                let task = self.task_mut(task_id)?;
                task.status = match decision {
                    ReviewDecision::Accept => TaskStatus::Accepted,
                    ReviewDecision::Reject => TaskStatus::Rejected,
                };
            }
        }
        Ok(())
    }

    fn task_mut(&mut self, id: &str) -> Result<&mut AnnotationTask> {
        self.tasks.get_mut(id).ok_or_else(|| Error::NotFound(id.to_string()))
    }
}

pub struct AnnotationStore {
    dir: PathBuf,
    lease_timeout: Duration,
    state: Mutex<State>,
}

impl AnnotationStore {
    /// Open or create a store in `dir`, replaying its journal.
    pub fn open(dir: impl AsRef<Path>, lease_timeout: Duration) -> Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        let mut state = State::default();
        let journal = dir.join("journal.jsonl");
        if journal.exists() {
            let bytes = fs::read(&journal).map_err(|e| Error::io(&journal, e))?;
            // A torn final line means the process died mid-append and that
            // event never took effect. Cut it so later appends start clean.
            let complete = bytes.iter().rposition(|b| *b == b'\n').map_or(0, |i| i + 1);
            if complete < bytes.len() {
                log::warn!("dropping incomplete journal tail of {} bytes", bytes.len() - complete);
                let file = OpenOptions::new().write(true).open(&journal).map_err(|e| Error::io(&journal, e))?;
                file.set_len(complete as u64).map_err(|e| Error::io(&journal, e))?;
            }
            for (i, line) in bytes[..complete].split(|b| *b == b'\n').enumerate() {
                if line.iter().all(u8::is_ascii_whitespace) {
                    continue;
                }
                let event: Event = serde_json::from_slice(line).map_err(|e| Error::Format {
                    offset: e.column(),
                    message: format!("{} line {}: {e}", journal.display(), i + 1),
                })?;
                state.apply(&event)?;
            }
        }
        let store = AnnotationStore {
            dir,
            lease_timeout,
            state: Mutex::new(state),
        };
        store.export_fakes(&store.state.lock().expect("store lock"))?;
        Ok(store)
    }

    pub fn fakes_path(&self) -> PathBuf {
        self.dir.join("fakes.jsonl")
    }

    fn append(&self, event: &Event) -> Result<()> {
        let path = self.dir.join("journal.jsonl");
        let mut line = serde_json::to_vec(event)?;
        line.push(b'\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&path)
            .map_err(|e| Error::io(&path, e))?;
        file.write_all(&line).map_err(|e| Error::io(&path, e))?;
        file.sync_data().map_err(|e| Error::io(&path, e))
    }

    /// Record `event` in the journal, then apply it.
    fn commit(&self, state: &mut State, event: Event) -> Result<()> {
        self.append(&event)?;
        state.apply(&event)
    }

    fn export_fakes(&self, state: &State) -> Result<()> {
        let path = self.fakes_path();
        let tmp = self.dir.join("fakes.jsonl.tmp");
        let file = File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        let mut writer = FakeWriter::new(BufWriter::new(file), None)?;
        let mut per_paragraph: BTreeMap<&str, usize> = BTreeMap::new();
        for task in state.tasks.values() {
            if !matches!(task.status, TaskStatus::Submitted | TaskStatus::Accepted) {
                continue;
            }
            let Some(modified) = &task.modified else { continue };
            let index = per_paragraph.entry(&task.paragraph_id).or_default();
            writer.write(&FakeRecord::new(&task.paragraph_id, *index, modified.clone(), Provenance::HumanFake))?;
            *index += 1;
        }
        let mut out = writer.finish()?;
        out.flush().map_err(|e| Error::io(&tmp, e))?;
        out.get_ref().sync_data().map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    /// Create one open task per paragraph text.
    pub fn create_batch(&self, paragraphs: &[String]) -> Result<Vec<AnnotationTask>> {
        for text in paragraphs {
            Paragraph::real(text.as_str())?;
        }
        let mut state = self.state.lock().expect("store lock");
        let mut created = Vec::new();
        for text in paragraphs {
            let task_id = format!("t{:06}", state.next_id + 1);
            self.commit(
                &mut state,
                Event::Create {
                    task_id: task_id.clone(),
                    text: text.clone(),
                },
            )?;
            created.push(state.tasks[&task_id].clone());
        }
        Ok(created)
    }

    pub fn get_task(&self, task_id: &str) -> Result<AnnotationTask> {
        let state = self.state.lock().expect("store lock");
        state
            .tasks
            .get(task_id)
            .cloned()
            .ok_or_else(|| Error::NotFound(task_id.to_string()))
    }

    /// Lease an open task to `annotator`. An annotator asking again gets the
    /// task they already hold. `None` when nothing is available.
    pub fn next_task(&self, annotator: &str) -> Option<AnnotationTask> {
        let mut state = self.state.lock().expect("store lock");
        let now = Instant::now();
        state.leases.retain(|_, lease| lease.expires > now);
        let held = state
            .leases
            .iter()
            .find(|(_, l)| l.annotator == annotator)
            .map(|(id, _)| id.clone());
        let id = held.or_else(|| {
            state
                .tasks
                .values()
                .find(|t| t.status == TaskStatus::Open && !state.leases.contains_key(&t.task_id))
                .map(|t| t.task_id.clone())
        })?;
        state.leases.insert(
            id.clone(),
            Lease {
                annotator: annotator.to_string(),
                expires: now + self.lease_timeout,
            },
        );
        state.tasks.get(&id).cloned()
    }

    /// Dry-run validation of a rewrite.
    pub fn validate(&self, task_id: &str, modified: &str) -> Result<ValidationResult> {
        let original = self.get_task(task_id)?.original;
        Ok(validate(&original, modified))
    }

    /// Validate and, when every gate passes, record the rewrite as a human
    /// fake. Only open tasks accept submissions.
    pub fn submit(&self, task_id: &str, modified: &str, annotator: &str) -> Result<SubmitOutcome> {
        let original = self.get_task(task_id)?.original;
        let validation = validate(&original, modified);
        if !validation.valid {
            return Ok(SubmitOutcome::Rejected { validation });
        }
        let mut state = self.state.lock().expect("store lock");
        let task = state
            .tasks
            .get(task_id)
            .ok_or_else(|| Error::NotFound(task_id.to_string()))?;
        if task.status != TaskStatus::Open {
            return Err(Error::Conflict(format!("task {task_id} is {:?}", task.status)));
        }
        if let Some(lease) = state.leases.get(task_id) {
            if lease.annotator != annotator && lease.expires > Instant::now() {
                return Err(Error::Conflict(format!("task {task_id} is leased to another annotator")));
            }
        }
        // Gate again right before writing; the check above ran unlocked.
        if !validate(&task.original, modified).valid {
            return Err(Error::Contract("submission failed re-validation".into()));
        }
        self.commit(
            &mut state,
            Event::Submit {
                task_id: task_id.to_string(),
                annotator: annotator.to_string(),
                modified: modified.to_string(),
            },
        )?;
        self.export_fakes(&state)?;
        Ok(SubmitOutcome::Submitted { validation })
    }

    /// Expert decision on a submitted task.
    pub fn review(&self, task_id: &str, decision: ReviewDecision) -> Result<AnnotationTask> {
        let mut state = self.state.lock().expect("store lock");
        let task = state
            .tasks
            .get(task_id)
            .ok_or_else(|| Error::NotFound(task_id.to_string()))?;
        if task.status != TaskStatus::Submitted {
            return Err(Error::Conflict(format!("task {task_id} is {:?}", task.status)));
        }
        self.commit(
            &mut state,
            Event::Review {
                task_id: task_id.to_string(),
                decision,
            },
        )?;
        self.export_fakes(&state)?;
        Ok(state.tasks[task_id].clone())
    }

    pub fn tasks(&self) -> Vec<AnnotationTask> {
        self.state.lock().expect("store lock").tasks.values().cloned().collect()
    }
}
