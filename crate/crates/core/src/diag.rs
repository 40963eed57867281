//! Validation diagnostics with stable codes.
//!
//! Codes are part of the public contract: tools and tests match on the code
//! string, never on the message text.

use crate::span::SourceSpan;
use std::fmt;

/// Stable diagnostic code. The numeric part never changes meaning across
/// releases; new checks get new codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Code {
    /// Arc endpoint does not resolve to a declared machine stage.
    E001,
    /// Stage kind declared more than once in a machine.
    E002,
    /// Illegal intra-machine flow succession.
    E003,
    /// Inter-machine flow that is not transfer to transfer.
    E004,
    /// Receive coexists with arrive or accept in one machine.
    E005,
    /// Duplicate or unusable sphere or machine name.
    E006,
    /// Stage with no incident arc.
    W001,
    /// Machine with an empty stage set.
    W002,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::E001 => "FM-E001",
            Code::E002 => "FM-E002",
            Code::E003 => "FM-E003",
            Code::E004 => "FM-E004",
            Code::E005 => "FM-E005",
            Code::E006 => "FM-E006",
            Code::W001 => "FM-W001",
            Code::W002 => "FM-W002",
        }
    }

    pub fn severity(self) -> Severity {
        match self {
            Code::W001 | Code::W002 => Severity::Warning,
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Severity::Warning => f.write_str("warning"),
            Severity::Error => f.write_str("error"),
        }
    }
}

/// Where a diagnostic points: a source span when the model was parsed from
/// text, otherwise the dotted path of the offending element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Span(SourceSpan),
    Element(String),
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Span(s) => write!(f, "{s}"),
            Location::Element(p) => f.write_str(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub location: Location,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: Code, location: Location, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: code.severity(),
            location,
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} {}: {}",
            self.location, self.code, self.severity, self.message
        )
    }
}
