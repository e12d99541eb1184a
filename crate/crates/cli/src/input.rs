//! Text formats accepted by `consult`.
//!
//! Crisp inputs are `var=value` pairs, comma-separated on a batch line.
//! Degree tables use the same notation the trace prints:
//!
//! ```text
//! family_implication (2.00) = {"reduce"/0.00, "moderate"/1.00, "high"/0.00}
//! ```

use fuzzyshell::{FuzzifiedValue, Inputs, KnowledgeBase};

/// Parses one `var=value` pair.
pub fn parse_assignment(text: &str) -> Result<(String, f64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("expected `variable=value`, got `{text}`"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(format!("missing variable name in `{text}`"));
    }
    let value: f64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a number", value.trim()))?;
    if !value.is_finite() {
        return Err(format!("value for `{name}` must be finite"));
    }
    Ok((name.to_ascii_lowercase(), value))
}

/// Collects pairs into inputs, rejecting a variable given twice.
pub fn collect_inputs<I>(pairs: I) -> Result<Inputs, String>
where
    I: IntoIterator<Item = (String, f64)>,
{
    let mut inputs = Inputs::new();
    for (name, value) in pairs {
        if inputs.insert(name.clone(), value).is_some() {
            return Err(format!("`{name}` is given more than once"));
        }
    }
    Ok(inputs)
}

/// One batch line; `None` for blank lines and `#` comments.
pub fn parse_batch_line(line: &str) -> Option<Result<Inputs, String>> {
    let line = line.trim();
    if line.is_empty() || line.starts_with('#') {
        return None;
    }
    let pairs: Result<Vec<_>, _> = line.split(',').map(parse_assignment).collect();
    Some(pairs.and_then(collect_inputs))
}

/// Parses a degree table, one variable per non-blank line.
pub fn parse_degree_table(
    text: &str,
    kb: &KnowledgeBase,
) -> Result<Vec<FuzzifiedValue>, (usize, String)> {
    let mut table = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        table.push(parse_degree_line(line, kb).map_err(|m| (i + 1, m))?);
    }
    Ok(table)
}

fn parse_degree_line(line: &str, kb: &KnowledgeBase) -> Result<FuzzifiedValue, String> {
    let shape = || format!("expected `name (value) = {{\"term\"/degree, ...}}`, got `{line}`");
    let (head, body) = line.split_once('=').ok_or_else(shape)?;
    let (name, crisp) = head.trim().split_once('(').ok_or_else(shape)?;
    let crisp = crisp.trim().strip_suffix(')').ok_or_else(shape)?;
    let crisp: f64 = crisp
        .trim()
        .parse()
        .map_err(|_| format!("`{crisp}` is not a number"))?;
    let name = name.trim().to_ascii_lowercase();
    let variable = kb
        .variable(&name)
        .ok_or_else(|| format!("unknown variable `{name}`"))?;
    let body = body
        .trim()
        .strip_prefix('{')
        .and_then(|b| b.strip_suffix('}'))
        .ok_or_else(shape)?;
    let mut degrees = Vec::new();
    for entry in body.split(',').map(str::trim).filter(|e| !e.is_empty()) {
        let (term, degree) = entry.rsplit_once('/').ok_or_else(shape)?;
        let term = term.trim().trim_matches('"').to_ascii_lowercase();
        let degree: f64 = degree
            .trim()
            .parse()
            .map_err(|_| format!("`{}` is not a degree", degree.trim()))?;
        degrees.push((term, degree));
    }
    let pairs: Vec<(&str, f64)> = degrees.iter().map(|(t, d)| (t.as_str(), *d)).collect();
    FuzzifiedValue::from_degrees(variable, crisp, &pairs).map_err(|e| e.to_string())
}
