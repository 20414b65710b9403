//! HTTP service and command-line front end for the bug reporting assistant.

pub mod apps;
pub mod config;
pub mod error;
pub mod http;
pub mod replay;
pub mod state;

use std::fs;
use std::path::Path;
use std::sync::Arc;

use burt_core::exec_model::{build_model, load_traces, ExecutionModel};

pub use config::ServiceConfig;
pub use error::{ApiError, ServiceError};
pub use state::AppState;

/// Builds a model from every trace in `traces` and writes it to `out`.
pub fn build_model_file(traces: &Path, out: &Path) -> Result<ExecutionModel, ServiceError> {
    let model_err = |e: burt_core::exec_model::ModelError| ServiceError::Model {
        path: traces.display().to_string(),
        message: e.to_string(),
    };
    let files = load_traces(traces).map_err(model_err)?;
    let model = build_model(&files).map_err(model_err)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| ServiceError::io(parent, e))?;
    }
    fs::write(out, model.to_json()).map_err(|e| ServiceError::io(out, e))?;
    Ok(model)
}

/// Binds and serves until ctrl-c.
pub async fn serve(config: ServiceConfig) -> Result<(), ServiceError> {
    let addr = format!("{}:{}", config.host, config.port);
    let state = Arc::new(AppState::load(config)?);
    let listener = tokio::net::TcpListener::bind(&addr)
        .await
        .map_err(|e| ServiceError::Bind {
            addr: addr.clone(),
            message: e.to_string(),
        })?;
    eprintln!("burt: {} app(s) loaded, listening on http://{addr}", state.apps.len());
    axum::serve(listener, http::router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| ServiceError::Bind {
            addr,
            message: e.to_string(),
        })
}
