use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{DefaultBodyLimit, Multipart, Path, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use codeocr::ocr::ImageInput;
use codeocr::pipeline::Pipeline;
use codeocr::postcorrect::CorrectionKind;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::jobs::{now_ms, AuditEntry, Job, JobError, JobSlot, JobState, StoredImage};
use crate::AppState;

/// Multipart framing overhead allowed on top of the image cap.
const FORM_SLACK: usize = 64 * 1024;

pub(crate) struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        ApiError { status, code, message: message.into() }
    }

    fn internal(message: impl std::fmt::Display) -> Self {
        log::error!("{message}");
        ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "Internal", message.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({"error": self.code, "message": self.message}))).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Routes:
///
/// - `POST /api/v1/jobs` multipart `image` + `config_id`, answers 202 `{job_id}`
/// - `GET /api/v1/jobs` and `GET /api/v1/jobs/{id}`
/// - `GET /api/v1/jobs/{id}/image`
/// - `PUT /api/v1/jobs/{id}/edit` `{code}`
/// - `POST /api/v1/jobs/{id}/recorrect` `{strategy, temperature?}`
/// - `GET /api/v1/jobs/{id}/export` as text/plain
/// - `GET /api/v1/configs`
///
/// Errors are JSON `{error, message}` where `error` is a stable name.
pub fn router(state: Arc<AppState>) -> Router {
    let limit = state.max_upload.saturating_add(FORM_SLACK);
    Router::new()
        .route("/api/v1/jobs", post(submit).get(list_jobs).layer(DefaultBodyLimit::max(limit)))
        .route("/api/v1/jobs/{id}", get(get_job))
        .route("/api/v1/jobs/{id}/image", get(get_image))
        .route("/api/v1/jobs/{id}/edit", put(save_edit))
        .route("/api/v1/jobs/{id}/recorrect", post(recorrect))
        .route("/api/v1/jobs/{id}/export", get(export))
        .route("/api/v1/configs", get(list_configs))
        .with_state(state)
}

fn sniff(bytes: &[u8]) -> Option<(&'static str, &'static str)> {
    if bytes.starts_with(b"\x89PNG\r\n\x1a\n") {
        Some(("image/png", "png"))
    } else if bytes.starts_with(&[0xFF, 0xD8, 0xFF]) {
        Some(("image/jpeg", "jpg"))
    } else {
        None
    }
}

fn slot(app: &AppState, id: &str) -> ApiResult<Arc<JobSlot>> {
    app.store.get(id).ok_or_else(|| ApiError::new(StatusCode::NOT_FOUND, "JobNotFound", format!("no job {id}")))
}

fn require_done(job: &Job) -> ApiResult<()> {
    if job.state == JobState::Done {
        Ok(())
    } else {
        Err(ApiError::new(
            StatusCode::CONFLICT,
            "JobNotDone",
            format!("job {} is {:?}", job.job_id, job.state).to_lowercase(),
        ))
    }
}

async fn submit(State(app): State<Arc<AppState>>, mut form: Multipart) -> ApiResult<impl IntoResponse> {
    let mut image: Option<(Vec<u8>, Option<String>)> = None;
    let mut config_id: Option<String> = None;
    loop {
        let field = match form.next_field().await {
            Ok(Some(f)) => f,
            Ok(None) => break,
            Err(e) if e.status() == StatusCode::PAYLOAD_TOO_LARGE => {
                return Err(too_large(app.max_upload));
            }
            Err(e) => return Err(ApiError::new(StatusCode::BAD_REQUEST, "InvalidForm", e.body_text())),
        };
        match field.name() {
            Some("image") => {
                let name = field.file_name().map(str::to_string);
                let bytes = field.bytes().await.map_err(|e| {
                    if e.status() == StatusCode::PAYLOAD_TOO_LARGE {
                        too_large(app.max_upload)
                    } else {
                        ApiError::new(StatusCode::BAD_REQUEST, "InvalidForm", e.body_text())
                    }
                })?;
                image = Some((bytes.to_vec(), name));
            }
            Some("config_id") => {
                let text = field
                    .text()
                    .await
                    .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, "InvalidForm", e.body_text()))?;
                config_id = Some(text.trim().to_string());
            }
            _ => {}
        }
    }
    let (bytes, original_name) = image
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "MissingField", "form field `image` is required"))?;
    let config_id = config_id
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "MissingField", "form field `config_id` is required"))?;
    if bytes.len() > app.max_upload {
        return Err(too_large(app.max_upload));
    }
    let Some((media_type, ext)) = sniff(&bytes) else {
        return Err(ApiError::new(
            StatusCode::UNSUPPORTED_MEDIA_TYPE,
            "UnsupportedMediaType",
            "image must be JPEG or PNG",
        ));
    };
    let pipeline = app.pipelines.get(&config_id).cloned().ok_or_else(|| {
        ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "UnknownConfig", format!("no config {config_id:?}"))
    })?;

    let job_id = uuid::Uuid::new_v4().simple().to_string();
    let stored = StoredImage {
        file: format!("image.{ext}"),
        media_type: media_type.into(),
        original_name: original_name.clone(),
    };
    let slot = app.store.create(Job::new(job_id.clone(), config_id, stored), &bytes).map_err(ApiError::internal)?;

    let mut input = ImageInput::new(bytes, media_type);
    if let Some(name) = original_name {
        input = input.with_name(name);
    }
    spawn_job(app.clone(), slot, pipeline, input);
    Ok((StatusCode::ACCEPTED, Json(json!({"job_id": job_id, "state": JobState::Queued}))))
}

fn too_large(cap: usize) -> ApiError {
    ApiError::new(StatusCode::PAYLOAD_TOO_LARGE, "ImageTooLarge", format!("image exceeds {cap} bytes"))
}

fn spawn_job(app: Arc<AppState>, slot: Arc<JobSlot>, pipeline: Arc<Pipeline>, image: ImageInput) {
    tokio::spawn(async move {
        let Ok(_permit) = app.permits.clone().acquire_owned().await else { return };
        let (worker_app, worker_slot) = (app.clone(), slot.clone());
        let outcome = tokio::task::spawn_blocking(move || {
            let mut on_stage = |stage: codeocr::codemodel::Stage| {
                if let Err(e) = worker_app.store.update(&worker_slot, |j| j.advance(stage.into())) {
                    log::error!("cannot persist job state: {e}");
                }
            };
            pipeline.run(&image, &mut on_stage)
        })
        .await;
        let finished = app.store.update(&slot, |job| match outcome {
            Ok(Ok(result)) => {
                if job.advance(JobState::Done) {
                    job.result = Some(result);
                }
            }
            Ok(Err(e)) => {
                job.fail(JobError { kind: e.code().into(), stage: Some(e.stage()), message: e.to_string() });
            }
            Err(e) => {
                job.fail(JobError { kind: "WorkerPanic".into(), stage: None, message: e.to_string() });
            }
        });
        match finished {
            Ok((_, job)) => log::info!("job {} finished as {:?}", job.job_id, job.state),
            Err(e) => log::error!("cannot persist finished job: {e}"),
        }
    });
}

async fn list_jobs(State(app): State<Arc<AppState>>) -> Json<Vec<Job>> {
    Json(app.store.list())
}

async fn get_job(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Job>> {
    Ok(Json(slot(&app, &id)?.snapshot()))
}

async fn get_image(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let job = slot(&app, &id)?.snapshot();
    let bytes = app.store.read_image(&job).map_err(ApiError::internal)?;
    Ok(([(header::CONTENT_TYPE, job.image.media_type)], bytes).into_response())
}

#[derive(Debug, Deserialize)]
struct EditRequest {
    code: String,
}

async fn save_edit(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<EditRequest>, JsonRejection>,
) -> ApiResult<Json<Job>> {
    let Json(req) = body.map_err(bad_body)?;
    let slot = slot(&app, &id)?;
    let _writer = slot.writer.lock().await;
    require_done(&slot.snapshot())?;
    let (_, job) = app.store.update(&slot, |j| j.edited_code = Some(req.code)).map_err(ApiError::internal)?;
    Ok(Json(job))
}

fn bad_body(e: JsonRejection) -> ApiError {
    ApiError::new(StatusCode::BAD_REQUEST, "InvalidBody", e.body_text())
}

#[derive(Debug, Deserialize)]
struct RecorrectRequest {
    strategy: String,
    #[serde(default)]
    temperature: Option<f64>,
}

async fn recorrect(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Result<Json<RecorrectRequest>, JsonRejection>,
) -> ApiResult<Json<Job>> {
    let Json(req) = body.map_err(bad_body)?;
    let invalid = |msg: String| ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "InvalidStrategy", msg);
    let kind = match CorrectionKind::parse(&req.strategy) {
        Some(CorrectionKind::None) => return Err(invalid("strategy `none` does not correct anything".into())),
        Some(k) => k,
        None => return Err(invalid(format!("unknown strategy {:?}", req.strategy))),
    };
    if req.temperature.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        return Err(invalid("temperature must be a non-negative number".into()));
    }

    let slot = slot(&app, &id)?;
    let _writer = slot.writer.lock().await;
    let job = slot.snapshot();
    require_done(&job)?;
    let pipeline = app.pipelines.get(&job.config_id).cloned().ok_or_else(|| {
        ApiError::new(StatusCode::CONFLICT, "UnknownConfig", format!("config {} is no longer loaded", job.config_id))
    })?;
    let result = job.result.as_ref().ok_or_else(|| ApiError::internal(format!("done job {id} has no result")))?;
    let previous_code = result.corrected_code.clone();

    let (code, image) = if kind == CorrectionKind::MultimodalEndToEnd {
        let bytes = app.store.read_image(&job).map_err(ApiError::internal)?;
        (String::new(), ImageInput::new(bytes, job.image.media_type.clone()))
    } else {
        let program = result.indented.as_ref().ok_or_else(|| {
            ApiError::new(StatusCode::CONFLICT, "NoIndentedProgram", "job has no indented program to correct")
        })?;
        (program.render(), ImageInput::new(vec![], job.image.media_type.clone()))
    };
    let mut strategy = pipeline.config().correction.clone();
    strategy.kind = kind;
    if let Some(t) = req.temperature {
        strategy.temperature = t;
    }

    let run_strategy = strategy.clone();
    let outcome = tokio::task::spawn_blocking(move || pipeline.correct(&run_strategy, &code, &image))
        .await
        .map_err(ApiError::internal)?;

    let (_, job) = app
        .store
        .update(&slot, |j| {
            let at_ms = now_ms();
            match outcome {
                Ok(corrected) => {
                    if let Some(r) = j.result.as_mut() {
                        r.corrected_code = corrected.code.clone();
                        r.warnings.extend(corrected.warnings);
                    }
                    j.correction_error = None;
                    j.audit.push(AuditEntry {
                        strategy,
                        previous_code,
                        new_code: Some(corrected.code),
                        error: None,
                        at_ms,
                    });
                }
                Err(e) => {
                    let error = JobError { kind: e.code().into(), stage: None, message: e.to_string() };
                    if e.reached_client() {
                        j.audit.push(AuditEntry {
                            strategy,
                            previous_code,
                            new_code: None,
                            error: Some(error.clone()),
                            at_ms,
                        });
                    }
                    j.correction_error = Some(error);
                }
            }
        })
        .map_err(ApiError::internal)?;
    Ok(Json(job))
}

async fn export(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Response> {
    let job = slot(&app, &id)?.snapshot();
    require_done(&job)?;
    let code = job.export_code().unwrap_or_default().to_string();
    Ok((
        [
            (header::CONTENT_TYPE, "text/plain; charset=utf-8".to_string()),
            (header::CONTENT_DISPOSITION, format!("attachment; filename=\"{}.py\"", job.job_id)),
        ],
        code,
    )
        .into_response())
}

#[derive(Debug, Serialize)]
struct ConfigSummary<'a> {
    config_id: &'a str,
    label: String,
    section: &'static str,
    config: &'a codeocr::pipeline::PipelineConfig,
}

async fn list_configs(State(app): State<Arc<AppState>>) -> Response {
    let summaries: Vec<ConfigSummary> = app
        .pipelines
        .values()
        .map(|p| {
            let c = p.config();
            ConfigSummary { config_id: &c.config_id, label: c.label(), section: c.section().title(), config: c }
        })
        .collect();
    Json(summaries).into_response()
}
