use super::template::{MissingField, Template};
use crate::dataflow::{Item, Payload};

/// Render `template` against a Record (or any textual payload for `$_text`)
/// into one Text item. A placeholder the input cannot supply yields `Err`
/// carrying the field name; the engine counts it as an operator error.
pub fn transform(input: &Item, template: &Template) -> Result<Vec<Item>, MissingField> {
    if matches!(input.payload, Payload::HttpRequest(_)) {
        return Ok(Vec::new());
    }
    let (text, _) = template.render(input, str::to_string, false)?;
    Ok(vec![Item::text(text)])
}
