//! Prompt templates and conversation builders.
//!
//! Templates are plain text files; the code payload is spliced in at
//! [`CODE_PLACEHOLDER`]. The defaults under `templates/` are compiled in and
//! can be replaced at runtime with [`PromptTemplates::load_dir`].

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ChatTurn, CorrectionError};

pub const CODE_PLACEHOLDER: &str = "{{code}}";
pub const TEMPLATE_VERSION: &str = "v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PromptTemplates {
    pub simple_system: String,
    pub simple_user: String,
    pub cot_system: String,
    pub cot_step1: String,
    pub cot_step2: String,
    pub cot_step3: String,
    pub multimodal: String,
}

fn clean(s: &str) -> String {
    s.trim_end_matches(['\n', '\r']).to_string()
}

impl Default for PromptTemplates {
    fn default() -> Self {
        PromptTemplates {
            simple_system: clean(include_str!("../../templates/simple_system_v1.txt")),
            simple_user: clean(include_str!("../../templates/simple_user_v1.txt")),
            cot_system: clean(include_str!("../../templates/cot_system_v1.txt")),
            cot_step1: clean(include_str!("../../templates/cot_step1_v1.txt")),
            cot_step2: clean(include_str!("../../templates/cot_step2_v1.txt")),
            cot_step3: clean(include_str!("../../templates/cot_step3_v1.txt")),
            multimodal: clean(include_str!("../../templates/multimodal_v1.txt")),
        }
    }
}

impl PromptTemplates {
    /// Loads `<name>_<version>.txt` files from `dir`; any file that is missing
    /// keeps the built-in default.
    pub fn load_dir(dir: &Path, version: &str) -> Result<Self, CorrectionError> {
        let mut t = PromptTemplates::default();
        let slots: [(&str, &mut String); 7] = [
            ("simple_system", &mut t.simple_system),
            ("simple_user", &mut t.simple_user),
            ("cot_system", &mut t.cot_system),
            ("cot_step1", &mut t.cot_step1),
            ("cot_step2", &mut t.cot_step2),
            ("cot_step3", &mut t.cot_step3),
            ("multimodal", &mut t.multimodal),
        ];
        for (name, slot) in slots {
            let path = dir.join(format!("{name}_{version}.txt"));
            if path.is_file() {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| CorrectionError::Template(format!("{}: {e}", path.display())))?;
                *slot = clean(&text);
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), CorrectionError> {
        for (name, template) in [("simple_user", &self.simple_user), ("cot_step1", &self.cot_step1)] {
            let count = template.matches(CODE_PLACEHOLDER).count();
            if count != 1 {
                return Err(CorrectionError::Template(format!(
                    "{name} must contain {CODE_PLACEHOLDER} exactly once, found {count}"
                )));
            }
        }
        Ok(())
    }
}

fn fill(template: &str, code: &str) -> String {
    template.replacen(CODE_PLACEHOLDER, code, 1)
}

fn require_code(code: &str) -> Result<(), CorrectionError> {
    if code.trim().is_empty() {
        return Err(CorrectionError::EmptyCode);
    }
    Ok(())
}

/// System turn plus one user turn carrying the code and the strict rules.
pub fn build_simple_prompt(code: &str, templates: &PromptTemplates) -> Result<Vec<ChatTurn>, CorrectionError> {
    require_code(code)?;
    Ok(vec![ChatTurn::system(&templates.simple_system), ChatTurn::user(fill(&templates.simple_user, code))])
}

/// Opening of the three-step conversation; steps two and three are appended
/// by the runner once the previous reply is known.
pub fn build_cot_opening(code: &str, templates: &PromptTemplates) -> Result<Vec<ChatTurn>, CorrectionError> {
    require_code(code)?;
    Ok(vec![ChatTurn::system(&templates.cot_system), ChatTurn::user(fill(&templates.cot_step1, code))])
}
