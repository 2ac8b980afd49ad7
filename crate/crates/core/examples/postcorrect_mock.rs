//! Simple and chain-of-thought correction against the scripted mock client.
//!
//!     cargo run --example postcorrect_mock

use std::collections::BTreeMap;

use codeocr::postcorrect::{
    build_simple_prompt, correct_code, CorrectionKind, MockChatClient, MockScript, PromptTemplates, ScriptedReply,
};

const OCR: &str = "def is_odd(numbr):\n    return number % 2 == l";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let templates = PromptTemplates::default();
    for turn in build_simple_prompt(OCR, &templates)? {
        println!("--- {:?}\n{}", turn.role, turn.content);
    }

    let fixed = "```python\ndef is_odd(number):\n    return number % 2 == 1\n```";
    let script = MockScript {
        model_id: "scripted".into(),
        image_capable: false,
        replies: BTreeMap::from([(0, ScriptedReply::Text(fixed.into()))]),
    };
    let client = MockChatClient::scripted(script);

    let simple = correct_code(OCR, CorrectionKind::Simple, &client, &templates, 0.0)?;
    println!("\nsimple:\n{}", simple.code);

    // later exchanges repeat the previous reply, so all three steps agree
    let cot = correct_code(OCR, CorrectionKind::ChainOfThought, &client, &templates, 0.0)?;
    println!("\nchain of thought:\n{}", cot.code);
    println!("\nclient calls: {}", client.calls());

    let echo = correct_code(OCR, CorrectionKind::Simple, &MockChatClient::echo(), &templates, 0.0)?;
    assert_eq!(echo.code, OCR);
    Ok(())
}
