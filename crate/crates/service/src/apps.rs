use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use burt_core::exec_model::ExecutionModel;
use serde::Serialize;

use crate::error::ServiceError;

pub const MODEL_FILE: &str = "model.json";
pub const ICON_FILE: &str = "icon.png";

#[derive(Debug, Clone)]
pub struct LoadedApp {
    pub id: String,
    pub model: ExecutionModel,
    pub has_icon: bool,
}

/// Entry of `GET /api/apps`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AppSummary {
    pub id: String,
    pub name: String,
    pub version: String,
    pub package: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub icon: Option<String>,
}

impl LoadedApp {
    pub fn summary(&self, asset_base: &str) -> AppSummary {
        let app = self.model.app();
        AppSummary {
            id: self.id.clone(),
            name: app.name.clone(),
            version: app.version.clone(),
            package: app.package.clone(),
            icon: self
                .has_icon
                .then(|| format!("{}/{}/{ICON_FILE}", asset_base.trim_end_matches('/'), self.id)),
        }
    }
}

/// Loads `<dir>/<app_id>/model.json` for every subdirectory that has one.
pub fn load_apps(models_dir: &Path, assets_dir: &Path) -> Result<BTreeMap<String, LoadedApp>, ServiceError> {
    let entries = fs::read_dir(models_dir).map_err(|e| ServiceError::io(models_dir, e))?;
    let mut apps = BTreeMap::new();
    for entry in entries {
        let entry = entry.map_err(|e| ServiceError::io(models_dir, e))?;
        let path = entry.path().join(MODEL_FILE);
        if !path.is_file() {
            continue;
        }
        let id = entry.file_name().to_string_lossy().into_owned();
        let model = ExecutionModel::load(&path).map_err(|e| ServiceError::Model {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        let has_icon = assets_dir.join(&id).join(ICON_FILE).is_file();
        apps.insert(id.clone(), LoadedApp { id, model, has_icon });
    }
    Ok(apps)
}
