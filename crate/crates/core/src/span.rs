use std::fmt;

use serde::Serialize;

/// Byte range plus line/column positions (1-based) into a source text.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub col: u32,
    pub end_line: u32,
    pub end_col: u32,
}

impl Span {
    pub const DUMMY: Span = Span { start: 0, end: 0, line: 0, col: 0, end_line: 0, end_col: 0 };

    pub fn join(self, other: Span) -> Span {
        if self == Span::DUMMY {
            return other;
        }
        if other == Span::DUMMY {
            return self;
        }
        let (first, last) = if self.start <= other.start { (self, other) } else { (other, self) };
        let tail = if last.end >= first.end { last } else { first };
        Span {
            start: first.start,
            end: tail.end,
            line: first.line,
            col: first.col,
            end_line: tail.end_line,
            end_col: tail.end_col,
        }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}
