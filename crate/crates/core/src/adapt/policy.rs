use std::fmt::Write as _;

use super::{AdaptError, CompareOp, Condition, ExtractionDirective, Policy, PolicyDocument, Rule, Value};
use crate::dataflow::Action;
use crate::wetdl::Params;
use crate::xml::{self, escape_attr, Element};

pub const SYSTEM_ROOT: &str = "system-policy";
pub const DIRECTIVE_ROOT: &str = "PersonalizedExtraction-policy";
pub const WETDL_LANGUAGE: &str = "WetDL";

fn required<'a>(e: &'a Element, attribute: &str) -> Result<&'a str, AdaptError> {
    e.attr(attribute)
        .ok_or_else(|| AdaptError::MissingAttribute { element: e.name.clone(), attribute: attribute.to_string() })
}

fn unknown(e: &Element) -> AdaptError {
    AdaptError::UnknownElement { name: e.name.clone(), line: e.position.line }
}

/// Parse a system policy or an extraction directive.
pub fn parse_policy(xml_text: &str) -> Result<PolicyDocument, AdaptError> {
    let root = xml::parse(xml_text)?;
    match root.local_name() {
        SYSTEM_ROOT => parse_system(&root).map(PolicyDocument::System),
        DIRECTIVE_ROOT => parse_directive(&root).map(PolicyDocument::Extraction),
        other => Err(AdaptError::BadRoot(other.to_string())),
    }
}

fn parse_system(root: &Element) -> Result<Policy, AdaptError> {
    let name = required(root, "name")?.to_string();
    let mut rules = Vec::new();
    for r in root.elements() {
        if r.local_name() != "rule" {
            return Err(unknown(r));
        }
        rules.push(parse_rule(r)?);
    }
    if rules.is_empty() {
        return Err(AdaptError::NoRules(name));
    }
    Ok(Policy { name, rules })
}

fn parse_rule(rule: &Element) -> Result<Rule, AdaptError> {
    let mut when = None;
    let mut ensure = None;
    for part in rule.elements() {
        match part.local_name() {
            "when" if when.is_none() => {
                let mut conds = part.elements();
                let c = conds.next().ok_or(AdaptError::MissingCondition)?;
                if let Some(extra) = conds.next() {
                    return Err(unknown(extra));
                }
                when = Some(parse_condition(c)?);
            }
            "ensure" if ensure.is_none() => {
                ensure = Some(part.elements().map(parse_action).collect::<Result<Vec<_>, _>>()?);
            }
            _ => return Err(unknown(part)),
        }
    }
    let when = when.ok_or(AdaptError::MissingCondition)?;
    let ensure = ensure.unwrap_or_default();
    if ensure.is_empty() {
        return Err(AdaptError::EmptyEnsure);
    }
    Ok(Rule { when, ensure })
}

fn parse_condition(c: &Element) -> Result<Condition, AdaptError> {
    let op: CompareOp = c.local_name().parse().map_err(|_| unknown(c))?;
    let mut left = None;
    let mut right = None;
    for operand in c.elements() {
        match operand.local_name() {
            "property-value" if left.is_none() => left = Some(required(operand, "name")?.to_string()),
            "number" if right.is_none() => {
                let v = required(operand, "value")?;
                match Value::infer(v) {
                    n @ Value::Number(_) => right = Some(n),
                    Value::Text(_) => return Err(AdaptError::BadNumber(v.to_string())),
                }
            }
            "string" if right.is_none() => right = Some(Value::Text(required(operand, "value")?.to_string())),
            _ => return Err(unknown(operand)),
        }
    }
    let missing = |what: &str| AdaptError::MissingAttribute { element: c.name.clone(), attribute: what.to_string() };
    Ok(Condition {
        op,
        left: left.ok_or_else(|| missing("property-value"))?,
        right: right.ok_or_else(|| missing("number"))?,
    })
}

fn parse_params(e: &Element) -> Result<Params, AdaptError> {
    let mut params = Params::new();
    for p in e.elements() {
        if p.local_name() != "parameter" {
            return Err(unknown(p));
        }
        let name = required(p, "name")?;
        let value = p
            .attr("property-value")
            .or_else(|| p.attr("value"))
            .ok_or_else(|| AdaptError::MissingAttribute { element: p.name.clone(), attribute: "value".into() })?;
        params.push((name.to_string(), value.to_string()));
    }
    Ok(params)
}

fn parse_action(e: &Element) -> Result<Action, AdaptError> {
    let service = required(e, "service")?.to_string();
    Ok(match e.local_name() {
        "detached" => {
            if let Some(child) = e.elements().next() {
                return Err(unknown(child));
            }
            Action::Detach { service }
        }
        "attached" => Action::Attach { service, params: parse_params(e)? },
        "updated" => Action::Update { service, params: parse_params(e)? },
        _ => return Err(unknown(e)),
    })
}

fn parse_directive(root: &Element) -> Result<ExtractionDirective, AdaptError> {
    let mut children = root.elements();
    let updated = children
        .next()
        .ok_or_else(|| AdaptError::MissingAttribute { element: root.name.clone(), attribute: "updated".into() })?;
    if updated.local_name() != "updated" {
        return Err(unknown(updated));
    }
    if let Some(extra) = children.next() {
        return Err(unknown(extra));
    }
    let clean = |a: &str| updated.attr(a).map(|v| v.split_whitespace().collect::<Vec<_>>().join(" "));
    let name = clean("Sname")
        .filter(|s| !s.is_empty())
        .ok_or_else(|| AdaptError::MissingAttribute { element: updated.name.clone(), attribute: "Sname".into() })?;
    let language = clean("Slang").unwrap_or_else(|| WETDL_LANGUAGE.to_string());
    if language != WETDL_LANGUAGE {
        return Err(AdaptError::UnsupportedLanguage(language));
    }
    // URL values may be split across lines; rejoin without spaces.
    let url = updated.attr("URL").map(|v| v.split_whitespace().collect::<String>());
    let wdl = updated.attr("Swdl").map(|v| v.split_whitespace().collect::<String>());
    if url.is_none() && wdl.is_none() {
        return Err(AdaptError::MissingAttribute { element: updated.name.clone(), attribute: "Swdl".into() });
    }
    Ok(ExtractionDirective { name, summary: clean("Sum"), location: clean("Loc"), url, language, wdl })
}

impl Policy {
    /// Canonical XML form; [`parse_policy`] reads it back unchanged.
    pub fn to_xml(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "<{SYSTEM_ROOT} name=\"{}\">", escape_attr(&self.name));
        for rule in &self.rules {
            s.push_str("  <rule>\n    <when>\n");
            let c = &rule.when;
            let _ = writeln!(s, "      <{}>", c.op.as_str());
            let _ = writeln!(s, "        <property-value name=\"{}\"/>", escape_attr(&c.left));
            let _ = match &c.right {
                Value::Number(n) => writeln!(s, "        <number value=\"{n}\"/>"),
                Value::Text(t) => writeln!(s, "        <string value=\"{}\"/>", escape_attr(t)),
            };
            let _ = writeln!(s, "      </{}>", c.op.as_str());
            s.push_str("    </when>\n    <ensure>\n");
            for a in &rule.ensure {
                let (tag, params) = match a {
                    Action::Detach { .. } => ("detached", &[][..]),
                    Action::Attach { params, .. } => ("attached", &params[..]),
                    Action::Update { params, .. } => ("updated", &params[..]),
                };
                let service = escape_attr(a.service());
                if params.is_empty() {
                    let _ = writeln!(s, "      <{tag} service=\"{service}\"/>");
                } else {
                    let _ = writeln!(s, "      <{tag} service=\"{service}\">");
                    for (k, v) in params {
                        let _ = writeln!(
                            s,
                            "        <parameter name=\"{}\" property-value=\"{}\"/>",
                            escape_attr(k),
                            escape_attr(v)
                        );
                    }
                    let _ = writeln!(s, "      </{tag}>");
                }
            }
            s.push_str("    </ensure>\n  </rule>\n");
        }
        let _ = writeln!(s, "</{SYSTEM_ROOT}>");
        s
    }
}
