//! Reader for momentum files: one configuration per line, `4n` decimals,
//! whitespace separated, `#` starting a comment.

use std::fmt;
use std::path::Path;

use qst_core::kernel::MomentumConfig;

/// A malformed input line, cited by its 1-based number.
#[derive(Debug)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ParseError {}

/// A parsed configuration with its source line.
#[derive(Debug, Clone)]
pub struct Row {
    pub line: usize,
    pub config: MomentumConfig,
}

pub fn parse_line(text: &str, line: usize) -> Result<Option<MomentumConfig>, ParseError> {
    let body = text.split('#').next().unwrap_or_default().trim();
    if body.is_empty() {
        return Ok(None);
    }
    let values = body
        .split_whitespace()
        .map(|tok| tok.parse::<f64>().map_err(|_| ParseError { line, message: format!("`{tok}` is not a number") }))
        .collect::<Result<Vec<f64>, _>>()?;
    if values.len() % 4 != 0 {
        return Err(ParseError { line, message: format!("expected a multiple of 4 numbers, found {}", values.len()) });
    }
    MomentumConfig::from_flat(&values).map(Some).map_err(|e| ParseError { line, message: e.to_string() })
}

pub fn parse_momenta(text: &str) -> Result<Vec<Row>, ParseError> {
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if let Some(config) = parse_line(raw, i + 1)? {
            rows.push(Row { line: i + 1, config });
        }
    }
    Ok(rows)
}

pub fn read_momenta(path: &Path) -> anyhow::Result<Vec<Row>> {
    let text = std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(parse_momenta(&text)?)
}
