use super::{codes, Diagnostic, Locus, OperatorKind, OperatorSpec, Params, TaskNetwork, WetdlError, MAP_PARAM};
use crate::xml::{self, Element, XmlNode};

/// Parse a WetDL document.
///
/// Structural problems inside an otherwise well-formed document are all
/// collected and returned together. Graph-level problems (duplicate names,
/// dangling edges, cycles) are left to [`super::validate_network`].
pub fn parse_task(xml_text: &str) -> Result<TaskNetwork, WetdlError> {
    let root = xml::parse(xml_text)?;
    let mut diags = Vec::new();

    if root.local_name() != "source" {
        diags.push(Diagnostic::error(
            codes::BAD_ROOT,
            format!("root element must be <source>, found <{}>", root.name),
            root.position.into(),
        ));
        return Err(WetdlError::Invalid(diags));
    }
    let source_name = match root.attr("name") {
        Some(n) => n.to_string(),
        None => {
            diags.push(Diagnostic::error(
                codes::MISSING_NAME,
                "<source> requires a name attribute",
                root.position.into(),
            ));
            String::new()
        }
    };

    let mut net = TaskNetwork::new(source_name);
    for child in &root.children {
        match child {
            XmlNode::Text(t) if t.trim().is_empty() => {}
            XmlNode::Text(_) => diags.push(Diagnostic::error(
                codes::UNKNOWN_ELEMENT,
                "unexpected text inside <source>",
                root.position.into(),
            )),
            XmlNode::Element(el) => {
                if let Some(op) = parse_operator(el, &mut diags) {
                    net.operators.push(op);
                }
            }
        }
    }

    if diags.is_empty() {
        Ok(net)
    } else {
        Err(WetdlError::Invalid(diags))
    }
}

fn parse_operator(el: &Element, diags: &mut Vec<Diagnostic>) -> Option<OperatorSpec> {
    let Ok(kind) = el.local_name().parse::<OperatorKind>() else {
        diags.push(Diagnostic::error(
            codes::UNKNOWN_OPERATOR,
            format!("unknown operator element <{}>", el.name),
            el.position.into(),
        ));
        return None;
    };
    let Some(name) = el.attr("name") else {
        diags.push(Diagnostic::error(
            codes::MISSING_NAME,
            format!("<{}> requires a name attribute", el.name),
            el.position.into(),
        ));
        return None;
    };

    let mut op = OperatorSpec::new(kind, name);
    if let Some(targets) = el.attr("forward-to") {
        op.forward_to = targets.split(',').map(str::trim).filter(|t| !t.is_empty()).map(str::to_string).collect();
    }

    for child in &el.children {
        let child = match child {
            XmlNode::Element(c) => c,
            XmlNode::Text(t) if t.trim().is_empty() => continue,
            XmlNode::Text(_) => {
                diags.push(Diagnostic::error(
                    codes::UNKNOWN_ELEMENT,
                    "unexpected text inside operator",
                    Locus::Operator(name.to_string()),
                ));
                continue;
            }
        };
        match child.local_name() {
            "param" | "parameters" => collect_params(child, &mut op.params),
            "map" => {
                let keys: Vec<String> =
                    child.elements().filter(|k| k.local_name() == "key").map(|k| k.text().trim().to_string()).collect();
                op.params.push((MAP_PARAM.to_string(), keys.join("\n")));
            }
            "data" => op.inline_data.push(child.text().trim().to_string()),
            "query" => op.query_template = Some(child.text().trim().to_string()),
            other => diags.push(Diagnostic::error(
                codes::UNKNOWN_ELEMENT,
                format!("unknown element <{other}> inside <{}>", el.name),
                child.position.into(),
            )),
        }
    }
    Some(op)
}

/// Normalize a `param`/`parameters` element into key/value pairs.
///
/// `name` and `value` give the primary pair (element text stands in for a
/// missing `value`); any further attributes become extra pairs in attribute
/// order, and nested parameter elements are flattened after them.
fn collect_params(el: &Element, out: &mut Params) {
    let text = el
        .children
        .iter()
        .filter_map(|c| match c {
            XmlNode::Text(t) => Some(t.as_str()),
            XmlNode::Element(_) => None,
        })
        .collect::<String>();
    if let Some(name) = el.attr("name") {
        let value = el.attr("value").map(str::to_string).unwrap_or_else(|| text.trim().to_string());
        out.push((name.to_string(), value));
    }
    for (k, v) in &el.attributes {
        let local = xml::local_part(k);
        if local != "name" && local != "value" {
            out.push((local.to_string(), v.clone()));
        }
    }
    for nested in el.elements() {
        if matches!(nested.local_name(), "param" | "parameters") {
            collect_params(nested, out);
        }
    }
}
