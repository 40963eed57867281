//! Tokenizer for the textual model format.

use crate::span::SourceSpan;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    /// Identifier or keyword; the parser decides which.
    Word(String),
    /// Decoded string literal.
    Str(String),
    LBrace,
    RBrace,
    Colon,
    Comma,
    Dot,
    Arrow,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Word(w) => format!("`{w}`"),
            TokenKind::Str(_) => "string literal".into(),
            TokenKind::LBrace => "`{`".into(),
            TokenKind::RBrace => "`}`".into(),
            TokenKind::Colon => "`:`".into(),
            TokenKind::Comma => "`,`".into(),
            TokenKind::Dot => "`.`".into(),
            TokenKind::Arrow => "`->`".into(),
            TokenKind::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct LexError {
    pub message: String,
    pub line: u32,
    pub col: u32,
}

struct Cursor<'a> {
    rest: std::str::CharIndices<'a>,
    src: &'a str,
    offset: usize,
    line: u32,
    col: u32,
}

impl<'a> Cursor<'a> {
    fn peek(&self) -> Option<char> {
        self.rest.clone().next().map(|(_, c)| c)
    }

    fn bump(&mut self) -> Option<char> {
        let (i, c) = self.rest.next()?;
        self.offset = i + c.len_utf8();
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }
}

pub fn lex(src: &str) -> Result<Vec<Token>, LexError> {
    let mut cur = Cursor {
        rest: src.char_indices(),
        src,
        offset: 0,
        line: 1,
        col: 1,
    };
    let mut tokens = Vec::new();

    loop {
        let start_offset = cur.offset;
        let (line, col) = (cur.line, cur.col);
        let span = |len: usize| SourceSpan::new(start_offset, len, line, col);
        let c = match cur.bump() {
            Some(c) => c,
            None => {
                tokens.push(Token {
                    kind: TokenKind::Eof,
                    span: span(0),
                });
                return Ok(tokens);
            }
        };
        let kind = match c {
            ' ' | '\t' | '\r' | '\n' => continue,
            '#' => {
                while let Some(c) = cur.peek() {
                    if c == '\n' {
                        break;
                    }
                    cur.bump();
                }
                continue;
            }
            '{' => TokenKind::LBrace,
            '}' => TokenKind::RBrace,
            ':' => TokenKind::Colon,
            ',' => TokenKind::Comma,
            '.' => TokenKind::Dot,
            '-' if cur.peek() == Some('>') => {
                cur.bump();
                TokenKind::Arrow
            }
            '"' => {
                let mut text = String::new();
                loop {
                    match cur.bump() {
                        None | Some('\n') => {
                            return Err(LexError {
                                message: "unterminated string literal".into(),
                                line,
                                col,
                            })
                        }
                        Some('"') => break,
                        Some('\\') => match cur.bump() {
                            Some('"') => text.push('"'),
                            Some('\\') => text.push('\\'),
                            other => {
                                return Err(LexError {
                                    message: format!(
                                        "unknown string escape `\\{}`",
                                        other.map(String::from).unwrap_or_default()
                                    ),
                                    line: cur.line,
                                    col: cur.col.saturating_sub(1),
                                })
                            }
                        },
                        Some(c) => text.push(c),
                    }
                }
                TokenKind::Str(text)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while let Some(n) = cur.peek() {
                    if n.is_ascii_alphanumeric() || n == '_' || n == '-' {
                        // A `->` ends the word: `a->b` lexes as word, arrow, word.
                        if n == '-' {
                            let mut lookahead = cur.rest.clone();
                            lookahead.next();
                            if lookahead.next().map(|(_, c)| c) == Some('>') {
                                break;
                            }
                        }
                        cur.bump();
                    } else {
                        break;
                    }
                }
                TokenKind::Word(cur.src[start_offset..cur.offset].to_string())
            }
            other => {
                return Err(LexError {
                    message: format!("unexpected character `{other}`"),
                    line,
                    col,
                })
            }
        };
        let len = cur.offset - start_offset;
        tokens.push(Token {
            kind,
            span: span(len),
        });
    }
}

impl fmt::Display for TokenKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe())
    }
}
