use crate::span::Span;

use super::ParseError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// Contents of a quoted word literal.
    Word(String),
    Eps,
    Box,
    Declare,
    In,
    Call,
    While,
    If,
    Else,
    Skip,
    Var,
    Return,
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Assign,
    At,
    Restrict,
    Arrow,
    Neq,
    EqEq,
    Dot,
    Lambda,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Word(w) => format!("\"{w}\""),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    pub fn text(&self) -> &str {
        match self {
            Tok::Ident(s) | Tok::Word(s) => s,
            Tok::Eps => "~",
            Tok::Box => "box",
            Tok::Declare => "declare",
            Tok::In => "in",
            Tok::Call => "call",
            Tok::While => "while",
            Tok::If => "if",
            Tok::Else => "else",
            Tok::Skip => "skip",
            Tok::Var => "var",
            Tok::Return => "return",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Assign => ":=",
            Tok::At => "@",
            Tok::Restrict => "|>",
            Tok::Arrow => "->",
            Tok::Neq => "!=",
            Tok::EqEq => "==",
            Tok::Dot => ".",
            Tok::Lambda => "\\",
            Tok::Eof => "",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

struct Cursor<'a> {
    src: &'a str,
    pos: usize,
    line: u32,
    col: u32,
}

impl Cursor<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek2(&self) -> Option<char> {
        let mut it = self.src[self.pos..].chars();
        it.next();
        it.next()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.col)
    }

    fn span_from(&self, (start, line, col): (usize, u32, u32)) -> Span {
        Span { start, end: self.pos, line, col, end_line: self.line, end_col: self.col }
    }
}

fn keyword(s: &str) -> Option<Tok> {
    Some(match s {
        "box" => Tok::Box,
        "declare" => Tok::Declare,
        "in" => Tok::In,
        "call" => Tok::Call,
        "while" => Tok::While,
        "if" => Tok::If,
        "else" => Tok::Else,
        "skip" => Tok::Skip,
        "var" => Tok::Var,
        "return" => Tok::Return,
        _ => return None,
    })
}

/// Tokenizes `src`. The result always ends with [`Tok::Eof`].
pub fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let mut c = Cursor { src, pos: 0, line: 1, col: 1 };
    let mut out = Vec::new();
    loop {
        while let Some(ch) = c.peek() {
            if ch.is_whitespace() {
                c.bump();
            } else if ch == '/' && c.peek2() == Some('/') {
                while c.peek().is_some_and(|ch| ch != '\n') {
                    c.bump();
                }
            } else {
                break;
            }
        }
        let start = c.mark();
        let Some(ch) = c.bump() else {
            out.push(Token { tok: Tok::Eof, span: c.span_from(start) });
            return Ok(out);
        };
        let two = |c: &mut Cursor, next: char, tok: Tok| -> Option<Tok> {
            if c.peek() == Some(next) {
                c.bump();
                Some(tok)
            } else {
                None
            }
        };
        let tok = match ch {
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '{' => Some(Tok::LBrace),
            '}' => Some(Tok::RBrace),
            '[' => Some(Tok::LBracket),
            ']' => Some(Tok::RBracket),
            ',' => Some(Tok::Comma),
            ';' => Some(Tok::Semi),
            '@' => Some(Tok::At),
            '.' => Some(Tok::Dot),
            '~' | 'ε' => Some(Tok::Eps),
            '\\' | 'λ' => Some(Tok::Lambda),
            '↾' => Some(Tok::Restrict),
            '≠' => Some(Tok::Neq),
            '→' => Some(Tok::Arrow),
            ':' => two(&mut c, '=', Tok::Assign),
            '|' => two(&mut c, '>', Tok::Restrict),
            '-' => two(&mut c, '>', Tok::Arrow),
            '!' => two(&mut c, '=', Tok::Neq),
            '=' => two(&mut c, '=', Tok::EqEq),
            '"' => {
                let mut w = String::new();
                loop {
                    match c.peek() {
                        Some('"') => {
                            c.bump();
                            break;
                        }
                        Some(s) if s.is_ascii_graphic() => {
                            w.push(s);
                            c.bump();
                        }
                        other => {
                            let at = c.mark();
                            c.bump();
                            return Err(ParseError {
                                span: c.span_from(at),
                                expected: "a word symbol or closing `\"`".to_string(),
                                found: other.map_or("end of input".to_string(), |s| format!("{s:?}")),
                            });
                        }
                    }
                }
                Some(Tok::Word(w))
            }
            ch if ch.is_ascii_alphabetic() || ch == '_' => {
                while c.peek().is_some_and(|ch| ch.is_ascii_alphanumeric() || ch == '_') {
                    c.bump();
                }
                let text = &src[start.0..c.pos];
                Some(keyword(text).unwrap_or_else(|| Tok::Ident(text.to_string())))
            }
            _ => None,
        };
        match tok {
            Some(tok) => out.push(Token { tok, span: c.span_from(start) }),
            None => {
                return Err(ParseError {
                    span: c.span_from(start),
                    expected: "a valid token".to_string(),
                    found: format!("{:?}", &src[start.0..c.pos]),
                })
            }
        }
    }
}
