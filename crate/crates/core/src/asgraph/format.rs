//! Catalog file reader.
//!
//! ```text
//! name: as_5_3
//! label: 5 3          # optional annotated (a, b)
//! vns: 5
//! cn: 0 1             # check node adjacent to VN 0 and VN 1
//! odd: 1              # degree-1 boundary check node on VN 1
//! order: 0:0 0:1 ...  # optional explicit message order, vn:cn pairs
//! ---
//! name: next_set
//! ```
//!
//! Check nodes are numbered by their order of appearance across `cn:` and
//! `odd:` lines. Documents are separated by a line holding only `---`.

use serde::Deserialize;
use thiserror::Error;

use super::{AbsorbingSetSpec, SpecError};

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: SpecError,
    },
    #[error("no AS found")]
    Empty,
}

impl ParseError {
    fn syntax(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    pub fn spec_error(&self) -> Option<&SpecError> {
        match self {
            ParseError::Invalid { source, .. } => Some(source),
            _ => None,
        }
    }
}

/// Parses a file containing exactly one document.
pub fn parse_spec(text: &str) -> Result<AbsorbingSetSpec, ParseError> {
    let mut all = parse_catalog(text)?;
    if all.len() != 1 {
        return Err(ParseError::syntax(
            1,
            1,
            format!("expected one document, found {}", all.len()),
        ));
    }
    Ok(all.remove(0))
}

/// Parses every `---`-separated document of a catalog file.
pub fn parse_catalog(text: &str) -> Result<Vec<AbsorbingSetSpec>, ParseError> {
    let mut specs = Vec::new();
    let mut doc = DocBuilder::new(1);
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim() == "---" {
            if let Some(spec) = doc.finish()? {
                specs.push(spec);
            }
            doc = DocBuilder::new(line_no + 1);
            continue;
        }
        if content.trim().is_empty() {
            continue;
        }
        doc.line(line_no, content)?;
    }
    if let Some(spec) = doc.finish()? {
        specs.push(spec);
    }
    if specs.is_empty() {
        return Err(ParseError::Empty);
    }
    Ok(specs)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonSpec {
    name: String,
    vns: usize,
    #[serde(default)]
    cns: Vec<Vec<usize>>,
    #[serde(default)]
    odd: Vec<usize>,
    #[serde(default)]
    order: Option<Vec<(usize, usize)>>,
    #[serde(default)]
    label: Option<(usize, usize)>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonCatalog {
    One(JsonSpec),
    Many(Vec<JsonSpec>),
}

/// JSON mirror of the text format: one object or an array of objects with
/// keys `name`, `vns`, `cns`, `odd`, and optional `order` / `label`.
pub fn parse_catalog_json(text: &str) -> Result<Vec<AbsorbingSetSpec>, ParseError> {
    let parsed: JsonCatalog = serde_json::from_str(text)
        .map_err(|e| ParseError::syntax(e.line(), e.column(), e.to_string()))?;
    let docs = match parsed {
        JsonCatalog::One(d) => vec![d],
        JsonCatalog::Many(d) => d,
    };
    if docs.is_empty() {
        return Err(ParseError::Empty);
    }
    docs.into_iter()
        .map(|d| {
            let mut cns = d.cns;
            cns.extend(d.odd.into_iter().map(|v| vec![v]));
            let mut spec = AbsorbingSetSpec::new(d.name, d.vns, cns, d.order)
                .map_err(|source| ParseError::Invalid { line: 1, source })?;
            spec.label = d.label;
            Ok(spec)
        })
        .collect()
}

struct DocBuilder {
    start_line: usize,
    name: Option<String>,
    vns: Option<usize>,
    cns: Vec<Vec<usize>>,
    order: Option<Vec<(usize, usize)>>,
    label: Option<(usize, usize)>,
    touched: bool,
}

impl DocBuilder {
    fn new(start_line: usize) -> Self {
        DocBuilder {
            start_line,
            name: None,
            vns: None,
            cns: Vec::new(),
            order: None,
            label: None,
            touched: false,
        }
    }

    fn line(&mut self, line_no: usize, content: &str) -> Result<(), ParseError> {
        self.touched = true;
        let Some(colon) = content.find(':') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(ParseError::syntax(line_no, col, "expected `key: value`"));
        };
        let key = content[..colon].trim();
        let value = &content[colon + 1..];
        let value_col = colon + 2;
        let ints = || parse_ints(value, line_no, value_col);
        match key {
            "name" => {
                let name = value.trim();
                if name.is_empty() {
                    return Err(ParseError::syntax(line_no, value_col, "empty name"));
                }
                self.name = Some(name.to_string());
            }
            "vns" => {
                let v = ints()?;
                if v.len() != 1 {
                    return Err(ParseError::syntax(line_no, value_col, "expected one integer"));
                }
                self.vns = Some(v[0]);
            }
            "cn" => {
                let v = ints()?;
                if v.is_empty() {
                    return Err(ParseError::syntax(line_no, value_col, "CN without VNs"));
                }
                self.cns.push(v);
            }
            "odd" => {
                for v in ints()? {
                    self.cns.push(vec![v]);
                }
            }
            "label" => {
                let v = ints()?;
                if v.len() != 2 {
                    return Err(ParseError::syntax(line_no, value_col, "label needs `a b`"));
                }
                self.label = Some((v[0], v[1]));
            }
            "order" => {
                let mut pairs = self.order.take().unwrap_or_default();
                for (col, tok) in tokens(value, value_col) {
                    let (vn, cn) = tok
                        .split_once(':')
                        .and_then(|(v, c)| Some((v.parse().ok()?, c.parse().ok()?)))
                        .ok_or_else(|| {
                            ParseError::syntax(line_no, col, format!("bad vn:cn pair `{tok}`"))
                        })?;
                    pairs.push((vn, cn));
                }
                self.order = Some(pairs);
            }
            other => {
                let col = content.len() - content.trim_start().len() + 1;
                return Err(ParseError::syntax(line_no, col, format!("unknown key `{other}`")));
            }
        }
        Ok(())
    }

    fn finish(self) -> Result<Option<AbsorbingSetSpec>, ParseError> {
        if !self.touched {
            return Ok(None);
        }
        let line = self.start_line;
        let name = self
            .name
            .ok_or_else(|| ParseError::syntax(line, 1, "document without `name:`"))?;
        let a = self
            .vns
            .ok_or_else(|| ParseError::syntax(line, 1, "document without `vns:`"))?;
        let mut spec = AbsorbingSetSpec::new(name, a, self.cns, self.order)
            .map_err(|source| ParseError::Invalid { line, source })?;
        spec.label = self.label;
        Ok(Some(spec))
    }
}

fn tokens(value: &str, base_col: usize) -> impl Iterator<Item = (usize, &str)> {
    let mut offset = 0;
    value.split_whitespace().map(move |tok| {
        let at = value[offset..].find(tok).unwrap() + offset;
        offset = at + tok.len();
        (base_col + at, tok)
    })
}

fn parse_ints(value: &str, line: usize, base_col: usize) -> Result<Vec<usize>, ParseError> {
    tokens(value, base_col)
        .map(|(col, tok)| {
            tok.parse()
                .map_err(|_| ParseError::syntax(line, col, format!("expected integer, got `{tok}`")))
        })
        .collect()
}
