//! Jobs and their on-disk store.
//!
//! Layout: `<data_dir>/jobs/<job_id>/job.json` plus the uploaded image next to
//! it. The in-memory index is rebuilt from that directory on startup.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};
use std::time::{SystemTime, UNIX_EPOCH};

use codeocr::codemodel::{PipelineResult, Stage};
use codeocr::postcorrect::CorrectionStrategy;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JobState {
    Queued,
    Ocr,
    Indent,
    Correct,
    Done,
    Failed,
}

impl JobState {
    fn rank(self) -> u8 {
        match self {
            JobState::Queued => 0,
            JobState::Ocr => 1,
            JobState::Indent => 2,
            JobState::Correct => 3,
            JobState::Done => 4,
            JobState::Failed => 5,
        }
    }

    pub fn is_terminal(self) -> bool {
        matches!(self, JobState::Done | JobState::Failed)
    }
}

impl From<Stage> for JobState {
    fn from(stage: Stage) -> Self {
        match stage {
            Stage::Ocr => JobState::Ocr,
            Stage::Indent => JobState::Indent,
            Stage::Correct => JobState::Correct,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JobError {
    /// Machine-readable error name, e.g. `ProviderUnavailable`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stage: Option<Stage>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoredImage {
    /// File name inside the job directory.
    pub file: String,
    pub media_type: String,
    /// Name the client uploaded it under.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub original_name: Option<String>,
}

/// One re-correction that reached the chat client.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub strategy: CorrectionStrategy,
    pub previous_code: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub new_code: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<JobError>,
    pub at_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Job {
    pub job_id: String,
    pub config_id: String,
    pub state: JobState,
    pub image: StoredImage,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<PipelineResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edited_code: Option<String>,
    /// Why the job failed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<JobError>,
    /// Most recent re-correction failure; the job itself stays done.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction_error: Option<JobError>,
    #[serde(default)]
    pub audit: Vec<AuditEntry>,
    pub created_at_ms: u64,
    pub updated_at_ms: u64,
}

impl Job {
    pub fn new(job_id: String, config_id: String, image: StoredImage) -> Self {
        let now = now_ms();
        Job {
            job_id,
            config_id,
            state: JobState::Queued,
            image,
            result: None,
            edited_code: None,
            error: None,
            correction_error: None,
            audit: vec![],
            created_at_ms: now,
            updated_at_ms: now,
        }
    }

    /// Moves forward along queued → ocr → indent → correct → done. Failed is
    /// reachable from any non-terminal state. Returns false (and changes
    /// nothing) for any other transition.
    pub fn advance(&mut self, next: JobState) -> bool {
        let ok = !self.state.is_terminal() && (next == JobState::Failed || next.rank() >= self.state.rank());
        if ok {
            self.state = next;
        }
        ok
    }

    pub fn fail(&mut self, error: JobError) -> bool {
        let ok = self.advance(JobState::Failed);
        if ok {
            self.error = Some(error);
        }
        ok
    }

    /// The code an export should hand back.
    pub fn export_code(&self) -> Option<&str> {
        self.edited_code.as_deref().or(self.result.as_ref().map(|r| r.corrected_code.as_str()))
    }
}

pub fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// A job plus its locks: the snapshot lock is held only briefly, the writer
/// lock serialises edits and re-corrections against each other.
#[derive(Debug)]
pub struct JobSlot {
    job: RwLock<Job>,
    pub writer: tokio::sync::Mutex<()>,
}

impl JobSlot {
    pub fn snapshot(&self) -> Job {
        self.job.read().unwrap_or_else(|e| e.into_inner()).clone()
    }
}

#[derive(Debug)]
pub struct JobStore {
    root: PathBuf,
    index: RwLock<HashMap<String, Arc<JobSlot>>>,
}

impl JobStore {
    /// Opens (creating if needed) `<data_dir>/jobs` and loads every job in
    /// it. Jobs that were still in flight when the previous process stopped
    /// are marked failed with kind `Interrupted`.
    pub fn open(data_dir: &Path) -> std::io::Result<Self> {
        let root = data_dir.join("jobs");
        std::fs::create_dir_all(&root)?;
        let store = JobStore { root, index: RwLock::new(HashMap::new()) };
        let mut loaded = HashMap::new();
        for entry in std::fs::read_dir(&store.root)? {
            let dir = entry?.path();
            let file = dir.join("job.json");
            if !file.is_file() {
                continue;
            }
            let job: Job = match std::fs::read_to_string(&file).map(|t| serde_json::from_str(&t)) {
                Ok(Ok(job)) => job,
                Ok(Err(e)) => {
                    log::warn!("skipping unreadable job {}: {e}", file.display());
                    continue;
                }
                Err(e) => {
                    log::warn!("skipping unreadable job {}: {e}", file.display());
                    continue;
                }
            };
            let slot = Arc::new(JobSlot { job: RwLock::new(job), writer: tokio::sync::Mutex::new(()) });
            let interrupted = !slot.snapshot().state.is_terminal();
            if interrupted {
                store.update(&slot, |j| {
                    j.fail(JobError {
                        kind: "Interrupted".into(),
                        stage: None,
                        message: "service stopped before the job finished".into(),
                    });
                })?;
            }
            loaded.insert(slot.snapshot().job_id, slot);
        }
        log::info!("loaded {} job(s) from {}", loaded.len(), store.root.display());
        *store.index.write().unwrap() = loaded;
        Ok(store)
    }

    pub fn job_dir(&self, job_id: &str) -> PathBuf {
        self.root.join(job_id)
    }

    /// Persists a new job with its image and adds it to the index.
    pub fn create(&self, job: Job, image: &[u8]) -> std::io::Result<Arc<JobSlot>> {
        let dir = self.job_dir(&job.job_id);
        std::fs::create_dir_all(&dir)?;
        std::fs::write(dir.join(&job.image.file), image)?;
        write_job(&dir, &job)?;
        let id = job.job_id.clone();
        let slot = Arc::new(JobSlot { job: RwLock::new(job), writer: tokio::sync::Mutex::new(()) });
        self.index.write().unwrap().insert(id, slot.clone());
        Ok(slot)
    }

    pub fn get(&self, job_id: &str) -> Option<Arc<JobSlot>> {
        self.index.read().unwrap().get(job_id).cloned()
    }

    pub fn list(&self) -> Vec<Job> {
        let mut jobs: Vec<Job> = self.index.read().unwrap().values().map(|s| s.snapshot()).collect();
        jobs.sort_by(|a, b| (a.created_at_ms, &a.job_id).cmp(&(b.created_at_ms, &b.job_id)));
        jobs
    }

    pub fn read_image(&self, job: &Job) -> std::io::Result<Vec<u8>> {
        std::fs::read(self.job_dir(&job.job_id).join(&job.image.file))
    }

    /// Applies `f` under the job's lock, stamps and persists the result.
    pub fn update<T>(&self, slot: &JobSlot, f: impl FnOnce(&mut Job) -> T) -> std::io::Result<(T, Job)> {
        let mut job = slot.job.write().unwrap_or_else(|e| e.into_inner());
        let mut next = job.clone();
        let out = f(&mut next);
        if next != *job {
            next.updated_at_ms = now_ms().max(job.updated_at_ms);
            write_job(&self.job_dir(&next.job_id), &next)?;
            *job = next;
        }
        Ok((out, job.clone()))
    }
}

fn write_job(dir: &Path, job: &Job) -> std::io::Result<()> {
    let tmp = dir.join("job.json.tmp");
    let mut text = serde_json::to_string_pretty(job).expect("job serializes");
    text.push('\n');
    std::fs::write(&tmp, text)?;
    std::fs::rename(tmp, dir.join("job.json"))
}
