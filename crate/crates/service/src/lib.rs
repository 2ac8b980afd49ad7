//! HTTP service for the review loop: upload a photo, poll the job, edit the
//! transcription, re-run post-correction and export the code.
//!
//! All routes live under `/api/v1`. See [`router`].

use std::collections::BTreeMap;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use codeocr::pipeline::{Pipeline, PipelineConfig};
use thiserror::Error;
use tokio::sync::Semaphore;

mod api;
pub mod jobs;

pub use api::router;
pub use jobs::{AuditEntry, Job, JobError, JobState, JobStore, StoredImage};

pub const DEFAULT_MAX_UPLOAD: usize = 10 * 1024 * 1024;

#[derive(Debug, Error)]
pub enum ServiceError {
    #[error(transparent)]
    Config(#[from] codeocr::pipeline::ConfigError),
    #[error("cannot open data directory {path}: {source}")]
    DataDir {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid setting {name}: {reason}")]
    Setting { name: &'static str, reason: String },
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub data_dir: PathBuf,
    pub config_dir: PathBuf,
    pub listen: SocketAddr,
    pub max_upload_bytes: usize,
    /// Pipelines allowed to run at once.
    pub workers: usize,
}

impl Settings {
    pub fn new(data_dir: impl Into<PathBuf>, config_dir: impl Into<PathBuf>) -> Self {
        Settings {
            data_dir: data_dir.into(),
            config_dir: config_dir.into(),
            listen: SocketAddr::from(([127, 0, 0, 1], 8080)),
            max_upload_bytes: DEFAULT_MAX_UPLOAD,
            workers: 2,
        }
    }

    /// Reads `CODEOCR_DATA_DIR`, `CODEOCR_CONFIG_DIR`, `CODEOCR_LISTEN`,
    /// `CODEOCR_MAX_UPLOAD_BYTES` and `CODEOCR_WORKERS`, falling back to
    /// `./data`, `./configs`, `127.0.0.1:8080`, 10 MiB and 2.
    pub fn from_env() -> Result<Self, ServiceError> {
        let var = |name: &str| std::env::var(name).ok().filter(|v| !v.is_empty());
        let mut s = Settings::new(
            var("CODEOCR_DATA_DIR").unwrap_or_else(|| "data".into()),
            var("CODEOCR_CONFIG_DIR").unwrap_or_else(|| "configs".into()),
        );
        if let Some(v) = var("CODEOCR_LISTEN") {
            s.listen =
                v.parse().map_err(|e| ServiceError::Setting { name: "CODEOCR_LISTEN", reason: format!("{v}: {e}") })?;
        }
        if let Some(v) = var("CODEOCR_MAX_UPLOAD_BYTES") {
            s.max_upload_bytes = v
                .parse()
                .map_err(|e| ServiceError::Setting { name: "CODEOCR_MAX_UPLOAD_BYTES", reason: format!("{v}: {e}") })?;
        }
        if let Some(v) = var("CODEOCR_WORKERS") {
            s.workers = v
                .parse()
                .map_err(|e| ServiceError::Setting { name: "CODEOCR_WORKERS", reason: format!("{v}: {e}") })?;
        }
        Ok(s)
    }
}

/// Shared state behind the router.
pub struct AppState {
    pipelines: BTreeMap<String, Arc<Pipeline>>,
    store: JobStore,
    permits: Arc<Semaphore>,
    max_upload: usize,
}

impl AppState {
    /// Loads every config in `settings.config_dir` and opens the job store.
    pub fn open(settings: &Settings) -> Result<Arc<Self>, ServiceError> {
        let configs = PipelineConfig::load_dir(&settings.config_dir)?;
        let pipelines = configs
            .into_iter()
            .map(|c| Ok((c.config_id.clone(), Arc::new(Pipeline::from_config(c)?))))
            .collect::<Result<BTreeMap<_, _>, ServiceError>>()?;
        Self::with_pipelines(pipelines, &settings.data_dir, settings.max_upload_bytes, settings.workers)
    }

    pub fn with_pipelines(
        pipelines: BTreeMap<String, Arc<Pipeline>>,
        data_dir: &Path,
        max_upload: usize,
        workers: usize,
    ) -> Result<Arc<Self>, ServiceError> {
        let store = JobStore::open(data_dir)
            .map_err(|source| ServiceError::DataDir { path: data_dir.to_path_buf(), source })?;
        Ok(Arc::new(AppState { pipelines, store, permits: Arc::new(Semaphore::new(workers)), max_upload }))
    }

    pub fn store(&self) -> &JobStore {
        &self.store
    }
}

/// Binds `settings.listen` and serves until the process is stopped.
pub async fn serve(settings: Settings) -> Result<(), Box<dyn std::error::Error + Send + Sync>> {
    let state = AppState::open(&settings)?;
    let listener = tokio::net::TcpListener::bind(settings.listen).await?;
    log::info!("listening on {}", listener.local_addr()?);
    axum::serve(listener, router(state)).await?;
    Ok(())
}
