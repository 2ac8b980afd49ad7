pub mod codemodel;
pub mod eval;
mod http;
pub mod indent;
pub mod metrics;
pub mod ocr;
pub mod pipeline;
pub mod postcorrect;
pub mod sync;
