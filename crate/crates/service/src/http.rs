use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{delete, get, patch, post};
use axum::{Json, Router};
use burt_core::dialogue::{BotMessage, PanelState, Session, UserMessage};
use burt_core::report::{assemble, ReportFormat};
use serde::{Deserialize, Serialize};
use tower_http::services::ServeDir;
use uuid::Uuid;

use crate::apps::AppSummary;
use crate::error::ApiError;
use crate::state::AppState;

type Shared = Arc<AppState>;
type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Deserialize)]
pub struct CreateSession {
    pub app_id: String,
}

#[derive(Debug, Serialize)]
pub struct SessionCreated {
    pub session_id: String,
    pub messages: Vec<BotMessage>,
    pub panel: PanelState,
}

#[derive(Debug, Serialize)]
pub struct TurnResponse {
    pub messages: Vec<BotMessage>,
    pub panel: PanelState,
}

#[derive(Debug, Serialize)]
pub struct SessionView {
    pub session_id: String,
    pub app_id: String,
    pub panel: PanelState,
}

#[derive(Debug, Deserialize)]
pub struct EditStep {
    pub text: String,
}

#[derive(Debug, Deserialize)]
pub struct ReportQuery {
    pub format: Option<String>,
}

pub fn router(state: Shared) -> Router {
    let assets = ServeDir::new(state.config.assets_root());
    Router::new()
        .route("/api/health", get(|| async { "ok" }))
        .route("/api/apps", get(list_apps))
        .route("/api/sessions", post(create_session))
        .route("/api/sessions/{id}", get(session_state))
        .route("/api/sessions/{id}/messages", post(post_message))
        .route("/api/sessions/{id}/steps/last", delete(delete_last_step))
        .route("/api/sessions/{id}/steps/{n}", patch(edit_step))
        .route("/api/sessions/{id}/report", get(report))
        .route("/api/sessions/{id}/transcript", get(transcript))
        .nest_service("/assets", assets)
        .with_state(state)
}

fn body<T>(payload: Result<Json<T>, JsonRejection>) -> ApiResult<T> {
    payload.map(|Json(v)| v).map_err(|e| ApiError::malformed(e.body_text()))
}

async fn list_apps(State(st): State<Shared>) -> Json<Vec<AppSummary>> {
    Json(st.apps.values().map(|a| a.summary(&st.dialogue.asset_base)).collect())
}

async fn create_session(
    State(st): State<Shared>,
    payload: Result<Json<CreateSession>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<SessionCreated>)> {
    let req = body(payload)?;
    let app = st
        .apps
        .get(&req.app_id)
        .ok_or_else(|| ApiError::unknown_app(&req.app_id))?;
    let session_id = Uuid::new_v4().simple().to_string();
    let dialogue = st.dialogue_for(app);
    let (session, messages) = dialogue.start(&session_id, &app.id);
    let panel = dialogue.panel_state(&session);
    st.persist_transcript(&session)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    st.insert(session).await;
    Ok((
        StatusCode::CREATED,
        Json(SessionCreated {
            session_id,
            messages,
            panel,
        }),
    ))
}

/// Runs one message against the session under its lock.
async fn turn(st: &AppState, id: &str, msg: UserMessage) -> ApiResult<TurnResponse> {
    let handle = st.session(id).await.ok_or_else(|| ApiError::unknown_session(id))?;
    let mut session = handle.lock().await;
    let app = app_of(st, &session)?;
    let dialogue = st.dialogue_for(app);
    let messages = dialogue.advance(&mut session, msg)?;
    st.persist_transcript(&session)
        .map_err(|e| ApiError::internal(e.to_string()))?;
    Ok(TurnResponse {
        messages,
        panel: dialogue.panel_state(&session),
    })
}

fn app_of<'a>(st: &'a AppState, session: &Session) -> ApiResult<&'a crate::apps::LoadedApp> {
    st.apps
        .get(&session.app_id)
        .ok_or_else(|| ApiError::internal(format!("app {} is no longer loaded", session.app_id)))
}

async fn post_message(
    State(st): State<Shared>,
    Path(id): Path<String>,
    payload: Result<Json<UserMessage>, JsonRejection>,
) -> ApiResult<Json<TurnResponse>> {
    let msg = body(payload)?;
    turn(&st, &id, msg).await.map(Json)
}

async fn edit_step(
    State(st): State<Shared>,
    Path((id, n)): Path<(String, usize)>,
    payload: Result<Json<EditStep>, JsonRejection>,
) -> ApiResult<Json<TurnResponse>> {
    let req = body(payload)?;
    turn(
        &st,
        &id,
        UserMessage::StepEdit {
            step: n,
            text: req.text,
        },
    )
    .await
    .map(Json)
}

async fn delete_last_step(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<TurnResponse>> {
    turn(&st, &id, UserMessage::StepDeleteLast).await.map(Json)
}

async fn session_state(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Json<SessionView>> {
    let handle = st.session(&id).await.ok_or_else(|| ApiError::unknown_session(&id))?;
    let session = handle.lock().await;
    let app = app_of(&st, &session)?;
    Ok(Json(SessionView {
        session_id: session.session_id.clone(),
        app_id: session.app_id.clone(),
        panel: st.dialogue_for(app).panel_state(&session),
    }))
}

async fn report(State(st): State<Shared>, Path(id): Path<String>, Query(q): Query<ReportQuery>) -> ApiResult<Response> {
    let format: ReportFormat = q.format.as_deref().unwrap_or("json").parse()?;
    let handle = st.session(&id).await.ok_or_else(|| ApiError::unknown_session(&id))?;
    let session = handle.lock().await;
    let app = app_of(&st, &session)?;
    let report = assemble(&session, &app.model, &session.session_id, st.clock.now())?;
    drop(session);
    report.persist(&st.reports_dir(), &st.dialogue.asset_base)?;
    let text = report.render(format, &st.dialogue.asset_base);
    let mime = match format {
        ReportFormat::Json => "application/json",
        ReportFormat::Html => "text/html; charset=utf-8",
    };
    Ok(([(header::CONTENT_TYPE, mime)], text).into_response())
}

async fn transcript(State(st): State<Shared>, Path(id): Path<String>) -> ApiResult<Response> {
    let handle = st.session(&id).await.ok_or_else(|| ApiError::unknown_session(&id))?;
    let session = handle.lock().await;
    let mut text = String::new();
    for entry in &session.transcript {
        text.push_str(&entry.to_json_line());
        text.push('\n');
    }
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text).into_response())
}
