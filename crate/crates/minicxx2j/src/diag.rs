//! Diagnostics shared across the pipeline: stable codes, source spans and
//! the `path:line:col: CODE message` rendering consumed by CI greps.

use std::fmt;
use std::path::{Path, PathBuf};

/// Half-open byte range into the source text of one translation unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Self {
        Span { start, end }
    }

    pub fn contains(&self, other: &Span) -> bool {
        self.start <= other.start && other.end <= self.end
    }

    /// Smallest span covering both inputs.
    pub fn cover(a: Span, b: Span) -> Span {
        Span::new(a.start.min(b.start), a.end.max(b.end))
    }
}

/// Stable diagnostic codes. Errors abort the file's conversion, warnings
/// are reported but leave the exit code untouched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Code {
    SyntaxError,
    TypedefCycle,
    PrimaryClassNotFound,
    RuleParse,
    DuplicateTemplateName,
    DuplicateExactSignature,
    UnknownTemplate,
    MissingSubstitution,
    NoRuleMatch,
    UnboundName,
    DuplicateDeclaration,
    UnresolvedDaoAccess,
    MissingRunMethod,
    ManualFallback,
    UnsupportedStreamKind,
    StaleReplace,
    Config,
    Io,
    // warnings
    ResourceAfterUse,
    DuplicateEnumValue,
    DroppedDestructor,
    CtorSideEffects,
    NarrowingCheck,
}

impl Code {
    pub fn as_str(&self) -> &'static str {
        match self {
            Code::SyntaxError => "E_SYNTAX",
            Code::TypedefCycle => "E_TYPEDEF_CYCLE",
            Code::PrimaryClassNotFound => "E_PRIMARY_CLASS_NOT_FOUND",
            Code::RuleParse => "E_RULE_PARSE",
            Code::DuplicateTemplateName => "E_DUP_TEMPLATE",
            Code::DuplicateExactSignature => "E_DUP_SIGNATURE",
            Code::UnknownTemplate => "E_UNKNOWN_TEMPLATE",
            Code::MissingSubstitution => "E_MISSING_SUBSTITUTION",
            Code::NoRuleMatch => "E_NO_RULE_MATCH",
            Code::UnboundName => "E_UNBOUND_NAME",
            Code::DuplicateDeclaration => "E_DUP_DECLARATION",
            Code::UnresolvedDaoAccess => "E_UNRESOLVED_DAO_ACCESS",
            Code::MissingRunMethod => "E_MISSING_RUN_METHOD",
            Code::ManualFallback => "E_MANUAL_FALLBACK",
            Code::UnsupportedStreamKind => "E_UNSUPPORTED_STREAM",
            Code::StaleReplace => "E_STALE_REPLACE",
            Code::Config => "E_CONFIG",
            Code::Io => "E_IO",
            Code::ResourceAfterUse => "W_RESOURCE_AFTER_USE",
            Code::DuplicateEnumValue => "W_DUP_ENUM_VALUE",
            Code::DroppedDestructor => "W_DROPPED_DESTRUCTOR",
            Code::CtorSideEffects => "W_CTOR_SIDE_EFFECTS",
            Code::NarrowingCheck => "W_NARROWING_CHECK",
        }
    }

    pub fn is_warning(&self) -> bool {
        matches!(
            self,
            Code::ResourceAfterUse
                | Code::DuplicateEnumValue
                | Code::DroppedDestructor
                | Code::CtorSideEffects
                | Code::NarrowingCheck
        )
    }
}

#[derive(Debug, Clone)]
pub struct Diagnostic {
    pub code: Code,
    pub message: String,
    pub path: Option<PathBuf>,
    pub line: usize,
    pub col: usize,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            message: message.into(),
            path: None,
            line: 0,
            col: 0,
        }
    }

    pub fn at(code: Code, message: impl Into<String>, src: &str, offset: usize) -> Self {
        let (line, col) = line_col(src, offset);
        Diagnostic {
            code,
            message: message.into(),
            path: None,
            line,
            col,
        }
    }

    pub fn with_path(mut self, path: &Path) -> Self {
        self.path = Some(path.to_path_buf());
        self
    }

    pub fn is_warning(&self) -> bool {
        self.code.is_warning()
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = self
            .path
            .as_ref()
            .map(|p| p.display().to_string())
            .unwrap_or_else(|| "<input>".to_string());
        write!(
            f,
            "{}:{}:{}: {} {}",
            path,
            self.line,
            self.col,
            self.code.as_str(),
            self.message
        )
    }
}

impl std::error::Error for Diagnostic {}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let mut line = 1;
    let mut col = 1;
    for (i, ch) in src.char_indices() {
        if i >= offset {
            break;
        }
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
    }
    (line, col)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_col_counts_from_one() {
        let src = "ab\ncd";
        assert_eq!(line_col(src, 0), (1, 1));
        assert_eq!(line_col(src, 3), (2, 1));
        assert_eq!(line_col(src, 4), (2, 2));
    }

    #[test]
    fn diagnostic_renders_stable_format() {
        let d = Diagnostic::at(Code::SyntaxError, "unexpected token", "x\ny z", 2)
            .with_path(Path::new("a/b.cpp"));
        assert_eq!(d.to_string(), "a/b.cpp:2:1: E_SYNTAX unexpected token");
    }

    #[test]
    fn span_containment() {
        let outer = Span::new(0, 10);
        assert!(outer.contains(&Span::new(2, 5)));
        assert!(!outer.contains(&Span::new(2, 11)));
    }
}
