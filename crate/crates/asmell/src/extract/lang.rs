//! Just enough C/C++ lexing: comment masking, LOC counting, and
//! `#include` extraction.
//!
//! No preprocessor is run. Conditional compilation is deliberately ignored —
//! includes from every `#if` branch are kept, which matches how a
//! dependency analysis should treat optional dependencies.

use crate::diag::{Diagnostic, DiagnosticKind};

/// How an include spec was written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum IncludeForm {
    /// `#include "spec"` — resolved relative to the including file first.
    Quoted,
    /// `#include <spec>` — resolved against include roots only.
    Angled,
}

/// One `#include` directive found in a file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncludeDirective {
    /// The text between the delimiters, e.g. `net/tcp.h`.
    pub spec: String,
    pub form: IncludeForm,
    /// 1-based source line.
    pub line: usize,
}

/// Replaces comment text with spaces, preserving newlines, string literals,
/// and everything else column for column.
///
/// Tracks `//` and `/* */` comments plus string and character literals so a
/// quoted `"//"` does not start a comment. Unterminated literals reset at
/// the end of the line; an unterminated block comment masks to the end of
/// the text. Masking is idempotent.
pub fn mask_comments(text: &str) -> String {
    #[derive(PartialEq)]
    enum State {
        Code,
        LineComment,
        BlockComment,
        Str,
        Char,
    }

    let mut out = String::with_capacity(text.len());
    let mut state = State::Code;
    let mut chars = text.chars().peekable();
    while let Some(c) = chars.next() {
        match state {
            State::Code => match c {
                '/' if chars.peek() == Some(&'/') => {
                    chars.next();
                    out.push_str("  ");
                    state = State::LineComment;
                }
                '/' if chars.peek() == Some(&'*') => {
                    chars.next();
                    out.push_str("  ");
                    state = State::BlockComment;
                }
                '"' => {
                    out.push(c);
                    state = State::Str;
                }
                '\'' => {
                    out.push(c);
                    state = State::Char;
                }
                _ => out.push(c),
            },
            State::LineComment => {
                if c == '\n' {
                    out.push('\n');
                    state = State::Code;
                } else {
                    out.push(' ');
                }
            }
            State::BlockComment => {
                if c == '*' && chars.peek() == Some(&'/') {
                    chars.next();
                    out.push_str("  ");
                    state = State::Code;
                } else if c == '\n' {
                    out.push('\n');
                } else {
                    out.push(' ');
                }
            }
            State::Str | State::Char => {
                let delim = if state == State::Str { '"' } else { '\'' };
                out.push(c);
                match c {
                    '\\' => {
                        if let Some(escaped) = chars.next() {
                            out.push(escaped);
                        }
                    }
                    '\n' => state = State::Code, // unterminated literal
                    _ if c == delim => state = State::Code,
                    _ => {}
                }
            }
        }
    }
    out
}

/// Counts lines that are neither blank nor pure comment. A line mixing code
/// and a comment counts.
pub fn count_loc(text: &str) -> u64 {
    mask_comments(text)
        .lines()
        .filter(|line| !line.trim().is_empty())
        .count() as u64
}

/// Extracts every `#include` directive outside comments, in source order.
///
/// Returns the directives plus diagnostics for lines that look like an
/// include but cannot be parsed (computed includes such as
/// `#include HEADER_MACRO`, unterminated specs).
pub fn extract_includes(text: &str) -> (Vec<IncludeDirective>, Vec<Diagnostic>) {
    let masked = mask_comments(text);
    let mut includes = Vec::new();
    let mut diagnostics = Vec::new();
    for (lineno, line) in masked.lines().enumerate() {
        let lineno = lineno + 1;
        let trimmed = line.trim_start();
        let Some(after_hash) = trimmed.strip_prefix('#') else {
            continue;
        };
        let after_hash = after_hash.trim_start();
        let Some(rest) = after_hash.strip_prefix("include") else {
            continue;
        };
        // Reject `#include_next` and friends: the keyword must end here.
        if rest.chars().next().is_some_and(|c| c.is_alphanumeric() || c == '_') {
            continue;
        }
        let rest = rest.trim_start();
        let parsed = match rest.chars().next() {
            Some('"') => rest[1..].find('"').map(|end| (rest[1..1 + end].to_string(), IncludeForm::Quoted)),
            Some('<') => rest[1..].find('>').map(|end| (rest[1..1 + end].to_string(), IncludeForm::Angled)),
            _ => None,
        };
        match parsed {
            Some((spec, _)) if spec.trim().is_empty() => diagnostics.push(Diagnostic::new(
                DiagnosticKind::MalformedInclude,
                format!("line {lineno}: empty include spec"),
            )),
            Some((spec, form)) => includes.push(IncludeDirective { spec, form, line: lineno }),
            None => diagnostics.push(Diagnostic::new(
                DiagnosticKind::MalformedInclude,
                format!("line {lineno}: unparsable include `{}`", line.trim()),
            )),
        }
    }
    (includes, diagnostics)
}
