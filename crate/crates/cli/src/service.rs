//! HTTP session service.
//!
//! Sessions live in memory behind a per-session lock: mutations take it
//! exclusively, reads share it. Every mutation is appended to the session's
//! log and synced before the response is sent; on startup the logs are
//! replayed against the loaded models, checking each model's content hash.

use std::collections::{BTreeMap, HashMap};
use std::net::SocketAddr;
use std::sync::{Arc, RwLock as StdRwLock};

use anyhow::Context;
use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use consult_core::insight::{explain, Explanation};
use consult_core::{
    apply_answer, node_detail, overview, rank_questions, undo, AssessmentQuestion, ConsultationState, Error,
    McSettings, NodeDetail, Overview, RankedQuestion,
};
use serde::{Deserialize, Serialize};
use tokio::sync::RwLock;

use crate::commands::ServeArgs;
use crate::models::{load_dir, shipped, LoadedModel};
use crate::store::{now_ms, Event, Store};
use crate::{ErrorBody, ErrorRecord};

pub struct Session {
    pub model_id: String,
    pub seed: u64,
    pub state: ConsultationState,
}

pub struct AppState {
    models: BTreeMap<String, LoadedModel>,
    sessions: StdRwLock<HashMap<String, Arc<RwLock<Session>>>>,
    store: Store,
}

/// Sessions restored at startup and the logs that could not be.
#[derive(Debug, Default)]
pub struct Restored {
    pub sessions: usize,
    pub skipped: Vec<String>,
}

impl AppState {
    /// Loads nothing from disk except the session logs in `store`.
    pub fn open(models: BTreeMap<String, LoadedModel>, store: Store) -> anyhow::Result<(Arc<Self>, Restored)> {
        let app = Self {
            models,
            sessions: StdRwLock::new(HashMap::new()),
            store,
        };
        let mut restored = Restored::default();
        for (path, log) in app.store.load_all().context("cannot read session logs")? {
            let result = log.and_then(|log| {
                let m = app
                    .models
                    .get(&log.model_id)
                    .ok_or_else(|| format!("model `{}` is not loaded", log.model_id))?;
                if m.hash != log.model_hash {
                    return Err(format!(
                        "model `{}` changed since the session was created",
                        log.model_id
                    ));
                }
                let state = session_state(m, log.seed, &log.answers).map_err(|e| e.to_string())?;
                Ok((log, state))
            });
            match result {
                Ok((log, state)) => {
                    let session = Session {
                        model_id: log.model_id,
                        seed: log.seed,
                        state,
                    };
                    app.sessions
                        .write()
                        .unwrap()
                        .insert(log.session_id, Arc::new(RwLock::new(session)));
                    restored.sessions += 1;
                }
                Err(e) => restored.skipped.push(format!("{}: {e}", path.display())),
            }
        }
        Ok((Arc::new(app), restored))
    }

    fn model(&self, id: &str) -> Result<&LoadedModel, ApiError> {
        self.models
            .get(id)
            .ok_or_else(|| Error::Lookup(format!("unknown model `{id}`")).into())
    }

    fn session(&self, id: &str) -> Result<Arc<RwLock<Session>>, ApiError> {
        self.sessions
            .read()
            .unwrap()
            .get(id)
            .cloned()
            .ok_or_else(|| Error::Lookup(format!("unknown session `{id}`")).into())
    }
}

/// State for a session, with its Monte Carlo summary computed.
fn session_state(
    m: &LoadedModel,
    seed: u64,
    answers: &[consult_core::AppliedAnswer],
) -> Result<ConsultationState, Error> {
    let mc = McSettings {
        seed,
        ..McSettings::from_model(&m.model)
    };
    let state = ConsultationState::replay(m.model.clone(), mc, answers)?;
    state.eu_summary()?;
    Ok(state)
}

#[derive(Debug)]
pub enum ApiError {
    Core(Error),
    Internal(String),
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        ApiError::Core(e)
    }
}

impl From<std::io::Error> for ApiError {
    fn from(e: std::io::Error) -> Self {
        ApiError::Internal(format!("session log: {e}"))
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let (status, record) = match &self {
            ApiError::Core(e) => {
                let status = match e {
                    Error::Lookup(_) => StatusCode::NOT_FOUND,
                    Error::State(_) => StatusCode::CONFLICT,
                    _ => StatusCode::BAD_REQUEST,
                };
                (status, ErrorRecord::new(&anyhow::Error::new(e.clone())))
            }
            ApiError::Internal(message) => (
                StatusCode::INTERNAL_SERVER_ERROR,
                ErrorRecord {
                    error: ErrorBody {
                        kind: "internal".into(),
                        message: message.clone(),
                        findings: Vec::new(),
                    },
                },
            ),
        };
        (status, Json(record)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| {
        let err = if e.is_data() {
            Error::Schema(e.to_string())
        } else {
            Error::Parse {
                line: e.line(),
                column: e.column(),
                offset: 0,
                message: e.to_string(),
            }
        };
        err.into()
    })
}

async fn blocking<T: Send + 'static>(f: impl FnOnce() -> ApiResult<T> + Send + 'static) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError::Internal(format!("worker failed: {e}")))?
}

pub fn router(app: Arc<AppState>) -> Router {
    Router::new()
        .route("/models", get(list_models))
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/overview", get(get_overview))
        .route("/sessions/{id}/next-question", get(get_next_question))
        .route("/sessions/{id}/answers", post(post_answer))
        .route("/sessions/{id}/undo", post(post_undo))
        .route("/sessions/{id}/explanation", get(get_explanation))
        .route("/sessions/{id}/nodes/{node_id}", get(get_node))
        .with_state(app)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct ModelEntry {
    pub id: String,
    pub title: String,
    pub hash: String,
}

async fn list_models(State(app): State<Arc<AppState>>) -> Json<Vec<ModelEntry>> {
    Json(
        app.models
            .iter()
            .map(|(id, m)| ModelEntry {
                id: id.clone(),
                title: m.model.title.clone(),
                hash: m.hash.clone(),
            })
            .collect(),
    )
}

#[derive(Debug, Deserialize)]
struct CreateSession {
    model_id: String,
    seed: Option<u64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Created {
    pub session_id: String,
    pub overview: Overview,
}

async fn create_session(State(app): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<Created>)> {
    let req: CreateSession = parse_body(&body)?;
    let model = app.model(&req.model_id)?.clone();
    let seed = req.seed.unwrap_or_else(rand::random);
    let session_id = uuid::Uuid::new_v4().to_string();
    let (state, ov) = {
        let (app, session_id, model_id) = (app.clone(), session_id.clone(), req.model_id.clone());
        blocking(move || {
            let state = session_state(&model, seed, &[])?;
            app.store.create(&Event::Created {
                session_id,
                model_id,
                model_hash: model.hash.clone(),
                seed,
                at_ms: now_ms(),
            })?;
            let ov = overview(&state)?;
            Ok((state, ov))
        })
        .await?
    };
    let session = Session {
        model_id: req.model_id,
        seed,
        state,
    };
    app.sessions
        .write()
        .unwrap()
        .insert(session_id.clone(), Arc::new(RwLock::new(session)));
    Ok((
        StatusCode::CREATED,
        Json(Created {
            session_id,
            overview: ov,
        }),
    ))
}

async fn read_state(app: &AppState, id: &str) -> ApiResult<ConsultationState> {
    let session = app.session(id)?;
    let guard = session.read().await;
    Ok(guard.state.clone())
}

async fn get_overview(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Overview>> {
    let state = read_state(&app, &id).await?;
    Ok(Json(blocking(move || Ok(overview(&state)?)).await?))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "next", rename_all = "snake_case")]
pub enum NextPayload {
    Ask {
        question: AssessmentQuestion,
        evoi: f64,
        net_value: f64,
    },
    /// Advisory: no remaining question is worth its cost. The rest are listed.
    Stop { remaining: Vec<RankedQuestion> },
}

async fn get_next_question(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<NextPayload>> {
    let state = read_state(&app, &id).await?;
    let payload = blocking(move || {
        let ranking = rank_questions(&state)?;
        Ok(match ranking.questions.first() {
            Some(top) if !ranking.stop => NextPayload::Ask {
                question: state.question(&top.id)?.clone(),
                evoi: top.evoi,
                net_value: top.net_value,
            },
            _ => NextPayload::Stop {
                remaining: ranking.questions,
            },
        })
    })
    .await?;
    Ok(Json(payload))
}

#[derive(Debug, Deserialize)]
struct PostAnswer {
    question_id: String,
    answer: String,
}

/// Applies `change` under the session's exclusive lock, logs `event` once it succeeds,
/// and returns the new overview.
async fn mutate(
    app: Arc<AppState>,
    id: String,
    event: Event,
    change: impl FnOnce(&ConsultationState) -> Result<ConsultationState, Error> + Send + 'static,
) -> ApiResult<Json<Overview>> {
    let session = app.session(&id)?;
    let mut guard = session.write().await;
    let current = guard.state.clone();
    let (next, ov) = blocking(move || {
        let next = change(&current)?;
        next.eu_summary()?;
        app.store.append(&id, &event)?;
        let ov = overview(&next)?;
        Ok((next, ov))
    })
    .await?;
    guard.state = next;
    Ok(Json(ov))
}

async fn post_answer(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Overview>> {
    let req: PostAnswer = parse_body(&body)?;
    let event = Event::Answer {
        question: req.question_id.clone(),
        answer: req.answer.clone(),
        at_ms: now_ms(),
    };
    mutate(app, id, event, move |s| apply_answer(s, &req.question_id, &req.answer)).await
}

async fn post_undo(State(app): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<Overview>> {
    mutate(app, id, Event::Undo { at_ms: now_ms() }, undo).await
}

async fn get_explanation(
    State(app): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<Json<Explanation>> {
    let generic = match query.get("generic_summary").map(String::as_str) {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => {
            return Err(Error::Schema(format!("generic_summary must be true or false, not `{other}`")).into())
        }
    };
    let state = read_state(&app, &id).await?;
    Ok(Json(blocking(move || Ok(explain(&state, generic)?)).await?))
}

async fn get_node(
    State(app): State<Arc<AppState>>,
    Path((id, node)): Path<(String, String)>,
) -> ApiResult<Json<NodeDetail>> {
    let state = read_state(&app, &id).await?;
    Ok(Json(blocking(move || Ok(node_detail(&state, &node)?)).await?))
}

/// Loads models and session logs, binds, prints the address, and serves until interrupted.
pub async fn serve(args: &ServeArgs) -> anyhow::Result<()> {
    let models = match &args.models {
        Some(dir) => {
            let (models, failures) =
                load_dir(dir).with_context(|| format!("cannot read model directory {}", dir.display()))?;
            for (path, e) in &failures {
                tracing::error!("model {} failed to load: {e}", path.display());
            }
            anyhow::ensure!(!models.is_empty(), "no model in {} loaded", dir.display());
            models
        }
        None => shipped(),
    };
    let store = Store::open(&args.data).with_context(|| format!("cannot open {}", args.data.display()))?;
    let (app, restored) = AppState::open(models, store)?;
    for s in &restored.skipped {
        tracing::warn!("session not restored: {s}");
    }
    let addr = SocketAddr::new(args.host, args.port);
    let listener = tokio::net::TcpListener::bind(addr).await.map_err(|e| {
        if e.kind() == std::io::ErrorKind::AddrInUse {
            anyhow::anyhow!("port {} is busy", args.port)
        } else {
            anyhow::anyhow!("cannot bind {addr}: {e}")
        }
    })?;
    let local = listener.local_addr()?;
    println!("listening on http://{local} ({} sessions restored)", restored.sessions);
    axum::serve(listener, router(app))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await?;
    Ok(())
}
