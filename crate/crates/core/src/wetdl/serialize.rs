use std::fmt::Write as _;

use super::{validate_network, TaskNetwork, WetdlError, MAP_PARAM};
use crate::xml::{escape_attr, escape_text};

/// Emit the canonical XML form of a valid network.
///
/// Canonical form: `name` before `forward-to`, two-space indentation, every
/// parameter as `<param name=".." value=".."/>` except the ordered key list,
/// which is written back as a `<map>` element, then `<data>`, then `<query>`.
pub fn serialize_task(net: &TaskNetwork) -> Result<String, WetdlError> {
    let diags: Vec<_> = validate_network(net).into_iter().filter(|d| d.is_error()).collect();
    if !diags.is_empty() {
        return Err(WetdlError::Invalid(diags));
    }

    let mut out = String::from("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    if net.operators.is_empty() {
        let _ = writeln!(out, "<source name=\"{}\"/>", escape_attr(&net.source_name));
        return Ok(out);
    }
    let _ = writeln!(out, "<source name=\"{}\">", escape_attr(&net.source_name));
    for op in &net.operators {
        let _ = write!(out, "  <{} name=\"{}\"", op.kind, escape_attr(&op.name));
        if !op.forward_to.is_empty() {
            let _ = write!(out, " forward-to=\"{}\"", escape_attr(&op.forward_to.join(",")));
        }
        let empty = op.params.is_empty() && op.inline_data.is_empty() && op.query_template.is_none();
        if empty {
            out.push_str("/>\n");
            continue;
        }
        out.push_str(">\n");
        for (key, value) in &op.params {
            if key == MAP_PARAM {
                out.push_str("    <map>\n");
                for k in value.split('\n') {
                    let _ = writeln!(out, "      <key>{}</key>", escape_text(k));
                }
                out.push_str("    </map>\n");
            } else {
                let _ = writeln!(out, "    <param name=\"{}\" value=\"{}\"/>", escape_attr(key), escape_attr(value));
            }
        }
        for data in &op.inline_data {
            let _ = writeln!(out, "    <data>{}</data>", escape_text(data));
        }
        if let Some(q) = &op.query_template {
            let _ = writeln!(out, "    <query>{}</query>", escape_text(q));
        }
        let _ = writeln!(out, "  </{}>", op.kind);
    }
    out.push_str("</source>\n");
    Ok(out)
}
