//! Compiler diagnostics in `file:line:col: severity: message` form.

use std::fmt;
use std::path::Path;

use flower_core::frontend::{ChannelDecl, Program};
use flower_core::graph::GraphError;
use flower_core::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub file: String,
    pub span: Option<Span>,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn error(file: &Path, span: Option<Span>, message: impl fmt::Display) -> Self {
        Diagnostic {
            file: file.display().to_string(),
            span: span.filter(|s| !s.is_none()),
            severity: Severity::Error,
            message: message.to_string(),
        }
    }

    pub fn warning(file: &Path, span: Option<Span>, message: impl fmt::Display) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(file, span, message) }
    }

    pub fn render(&self, color: bool) -> String {
        let location = match self.span {
            Some(s) => format!("{}:{}:{}", self.file, s.line, s.col),
            None => self.file.clone(),
        };
        let (label, ansi) = match self.severity {
            Severity::Error => ("error", "\x1b[1;31m"),
            Severity::Warning => ("warning", "\x1b[1;33m"),
        };
        if color {
            format!("\x1b[1m{location}:\x1b[0m {ansi}{label}:\x1b[0m {}", self.message)
        } else {
            format!("{location}: {label}: {}", self.message)
        }
    }
}

/// Whether `FLOWER_COLOR` asks for ANSI colors.
pub fn color_enabled() -> bool {
    std::env::var("FLOWER_COLOR").is_ok_and(|v| v == "1")
}

/// Source position best describing a graph error: the offending channel's
/// declaration, or the first task named in it.
pub fn graph_error_span(program: &Program, err: &GraphError) -> Option<Span> {
    let channel = |name: &str| program.channels.iter().find(|c| c.name == name).map(|c: &ChannelDecl| c.span);
    let task = |name: &str| program.tasks.iter().find(|t| t.name == name).map(|t| t.span);
    match err {
        GraphError::NoTasks => None,
        GraphError::MultipleWriters { name, tasks } => channel(name)
            .or_else(|| program.images.iter().find(|i| i.name == *name).map(|i| i.span))
            .or_else(|| task(&tasks[0])),
        GraphError::MultipleReaders { channel: c, .. } | GraphError::DanglingChannel { channel: c, .. } => channel(c),
        GraphError::CyclicGraph { path } => task(&path[0]),
    }
}
