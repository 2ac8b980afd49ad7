//! Records OCR output as fixtures, then replays it without the provider.
//!
//! The "provider" here is a local stand-in that reads the bundled fixtures, so
//! the example runs offline; swap in a `RemoteProvider` to record a real one.
//!
//!     cargo run --example record_replay

use std::path::Path;

use codeocr::codemodel::OcrDocument;
use codeocr::eval::{load_manifest, record_fixtures};
use codeocr::ocr::{ImageInput, OcrError, OcrProvider, ReplayProvider};

struct Offline(ReplayProvider);

impl OcrProvider for Offline {
    fn provider_id(&self) -> &str {
        "offline"
    }

    fn recognize(&self, image: &ImageInput) -> Result<OcrDocument, OcrError> {
        let mut doc = self.0.recognize(image)?;
        doc.provider_id = "offline".into();
        Ok(doc)
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("testdata/synthetic");
    let entries: Vec<_> = load_manifest(&root.join("manifest.json"))?.into_iter().take(5).collect();
    let out = std::env::temp_dir().join("codeocr-recorded");

    let summary = record_fixtures(&Offline(ReplayProvider::new(root.join("ocr"))), &entries, &out)?;
    println!("recorded {} fixture(s) into {}", summary.written.len(), out.display());

    let replay = ReplayProvider::new(&out);
    for entry in &entries {
        let image = ImageInput::from_path(&entry.image_path)?;
        let doc = replay.recognize(&image)?;
        println!("{}: {} lines, first {:?}", entry.program_id, doc.lines.len(), doc.lines[0].text);
    }
    Ok(())
}
