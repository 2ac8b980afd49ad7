use std::path::{Path, PathBuf};

use super::{ImageInput, OcrError, OcrProvider};
use crate::codemodel::OcrDocument;

/// Serves previously recorded [`OcrDocument`]s from a directory.
///
/// A fixture is looked up as `<dir>/<image name>.json`, falling back to
/// `<dir>/<sha256 of image bytes>.json`.
#[derive(Debug, Clone)]
pub struct ReplayProvider {
    dir: PathBuf,
    provider_id: String,
}

impl ReplayProvider {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        ReplayProvider { dir: dir.into(), provider_id: "replay".into() }
    }

    pub fn with_provider_id(mut self, id: impl Into<String>) -> Self {
        self.provider_id = id.into();
        self
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn fixture_path(&self, image: &ImageInput) -> Option<PathBuf> {
        let by_name = image.name.as_ref().map(|n| {
            let stem = Path::new(n).file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| n.clone());
            self.dir.join(format!("{stem}.json"))
        });
        by_name
            .into_iter()
            .chain(std::iter::once(self.dir.join(format!("{}.json", image.sha256_hex()))))
            .find(|p| p.is_file())
    }
}

impl OcrProvider for ReplayProvider {
    fn provider_id(&self) -> &str {
        &self.provider_id
    }

    fn recognize(&self, image: &ImageInput) -> Result<OcrDocument, OcrError> {
        match self.fixture_path(image) {
            Some(path) => load_fixture(&path),
            None => Err(OcrError::ProviderUnavailable {
                provider: self.provider_id.clone(),
                attempts: 1,
                reason: format!(
                    "no fixture for image {} in {}",
                    image.name.as_deref().unwrap_or("<unnamed>"),
                    self.dir.display()
                ),
            }),
        }
    }
}

pub fn load_fixture(path: &Path) -> Result<OcrDocument, OcrError> {
    let text = std::fs::read_to_string(path).map_err(|source| OcrError::Io { path: path.to_path_buf(), source })?;
    let invalid = |reason: String| OcrError::InvalidFixture { path: path.to_path_buf(), reason };
    let doc: OcrDocument = serde_json::from_str(&text).map_err(|e| invalid(e.to_string()))?;
    doc.validate().map_err(|e| invalid(e.to_string()))?;
    Ok(doc)
}

/// Writes `doc` as pretty-printed JSON followed by a newline.
pub fn record_fixture(doc: &OcrDocument, path: &Path) -> Result<(), OcrError> {
    doc.validate().map_err(|e| OcrError::InvalidFixture { path: path.to_path_buf(), reason: e.to_string() })?;
    let mut json = serde_json::to_string_pretty(doc).expect("OcrDocument always serializes");
    json.push('\n');
    std::fs::write(path, json).map_err(|source| OcrError::Io { path: path.to_path_buf(), source })
}
