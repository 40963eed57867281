//! Source positions attached to parsed model elements.

use std::fmt;

/// Half-open byte region in a source file, with 1-based line and column of
/// its start. Spans identify where an element was declared; they are carried
/// for diagnostics only and never take part in model equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SourceSpan {
    pub offset: usize,
    pub len: usize,
    pub line: u32,
    pub col: u32,
}

impl SourceSpan {
    pub fn new(offset: usize, len: usize, line: u32, col: u32) -> Self {
        SourceSpan {
            offset,
            len,
            line,
            col,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
