//! Findings and their two renderings: `SEVERITY file:line:col CODE message`
//! lines, or one JSON object per line carrying the same fields.

use std::fmt;

use reftc_lang::Pos;
use serde_json::{json, Value as Json};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Note,
    Info,
    Error,
}

impl Severity {
    pub fn name(self) -> &'static str {
        match self {
            Severity::Note => "note",
            Severity::Info => "info",
            Severity::Error => "error",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub file: String,
    pub line: u32,
    pub col: u32,
    pub code: String,
    pub message: String,
    /// Extra machine-readable payload, only shown in structured mode.
    pub data: Option<Json>,
}

impl Diagnostic {
    pub fn new(severity: Severity, file: &str, pos: Pos, code: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic {
            severity,
            file: file.to_string(),
            line: pos.line.max(1),
            col: pos.col.max(1),
            code: code.to_string(),
            message: message.into(),
            data: None,
        }
    }

    pub fn error(file: &str, pos: Pos, code: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(Severity::Error, file, pos, code, message)
    }

    pub fn info(file: &str, pos: Pos, code: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(Severity::Info, file, pos, code, message)
    }

    pub fn note(file: &str, pos: Pos, code: &str, message: impl Into<String>) -> Diagnostic {
        Diagnostic::new(Severity::Note, file, pos, code, message)
    }

    pub fn with_data(mut self, data: Json) -> Diagnostic {
        self.data = Some(data);
        self
    }

    pub fn text(&self) -> String {
        format!("{} {}:{}:{} {} {}", self.severity, self.file, self.line, self.col, self.code, self.message)
    }

    pub fn json(&self) -> Json {
        let mut out = json!({
            "severity": self.severity.name(),
            "file": self.file,
            "line": self.line,
            "col": self.col,
            "code": self.code,
            "message": self.message,
        });
        if let Some(d) = &self.data {
            out["data"] = d.clone();
        }
        out
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text())
    }
}
