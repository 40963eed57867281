//! Recursive-descent parser producing a [`Model`].

use super::lexer::{lex, LexError, Token, TokenKind};
use crate::model::{
    Endpoint, FlowArc, Machine, Model, Sphere, StageKind, TriggerArc, RESERVED_WORDS,
};
use crate::span::SourceSpan;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("{line}:{col}: {message}")]
pub struct ParseError {
    pub message: String,
    pub line: u32,
    pub col: u32,
}

impl From<LexError> for ParseError {
    fn from(e: LexError) -> Self {
        ParseError {
            message: e.message,
            line: e.line,
            col: e.col,
        }
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

/// Parses a complete model source. Declaration order in the result matches
/// source order within each category (spheres, machines, annotations,
/// flows, triggers).
pub fn parse(src: &str) -> Result<Model, ParseError> {
    let mut p = Parser {
        tokens: lex(src)?,
        pos: 0,
    };
    let mut model = Model::default();
    loop {
        let t = p.peek().clone();
        match &t.kind {
            TokenKind::Eof => {
                if model.roots.is_empty() {
                    return Err(p.error_at(&t, "a model needs at least one sphere".into()));
                }
                return Ok(model);
            }
            TokenKind::Word(w) => match w.as_str() {
                "sphere" => {
                    let sphere = p.sphere()?;
                    model.roots.push(sphere);
                }
                "flow" => {
                    let arc = p.arc()?;
                    model.flows.push(FlowArc {
                        src: arc.0,
                        dst: arc.1,
                        guard: arc.2,
                        span: Some(t.span),
                    });
                }
                "trigger" => {
                    let arc = p.arc()?;
                    model.triggers.push(TriggerArc {
                        src: arc.0,
                        dst: arc.1,
                        guard: arc.2,
                        span: Some(t.span),
                    });
                }
                _ => {
                    return Err(p.error_at(
                        &t,
                        format!("expected `sphere`, `flow`, or `trigger`, found {}", t.kind),
                    ))
                }
            },
            other => {
                return Err(p.error_at(
                    &t,
                    format!("expected `sphere`, `flow`, or `trigger`, found {}", other),
                ))
            }
        }
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, token: &Token, message: String) -> ParseError {
        ParseError {
            message,
            line: token.span.line,
            col: token.span.col,
        }
    }

    fn expect_kind(&mut self, kind: TokenKind) -> Result<Token, ParseError> {
        let t = self.bump();
        if t.kind == kind {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected {}, found {}", kind, t.kind)))
        }
    }

    fn expect_keyword(&mut self, word: &str) -> Result<Token, ParseError> {
        let t = self.bump();
        match &t.kind {
            TokenKind::Word(w) if w == word => Ok(t),
            other => Err(self.error_at(&t, format!("expected `{word}`, found {other}"))),
        }
    }

    /// A name position: any word that is not reserved.
    fn ident(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        let t = self.bump();
        match &t.kind {
            TokenKind::Word(w) if !RESERVED_WORDS.contains(&w.as_str()) => Ok((w.clone(), t.span)),
            TokenKind::Word(w) => {
                Err(self.error_at(&t, format!("expected {what}, found reserved word `{w}`")))
            }
            other => Err(self.error_at(&t, format!("expected {what}, found {other}"))),
        }
    }

    fn string(&mut self) -> Result<String, ParseError> {
        let t = self.bump();
        match &t.kind {
            TokenKind::Str(s) => Ok(s.clone()),
            other => Err(self.error_at(&t, format!("expected string literal, found {other}"))),
        }
    }

    fn sphere(&mut self) -> Result<Sphere, ParseError> {
        self.expect_keyword("sphere")?;
        let (name, span) = self.ident("sphere name")?;
        let mut sphere = Sphere::new(name);
        sphere.span = Some(span);
        self.expect_kind(TokenKind::LBrace)?;
        loop {
            let t = self.peek().clone();
            match &t.kind {
                TokenKind::RBrace => {
                    self.bump();
                    return Ok(sphere);
                }
                TokenKind::Word(w) => match w.as_str() {
                    "sphere" => sphere.children.push(self.sphere()?),
                    "machine" => sphere.machines.push(self.machine()?),
                    "note" => {
                        self.bump();
                        sphere.annotations.push(self.string()?);
                    }
                    _ => {
                        return Err(self.error_at(
                            &t,
                            format!(
                                "expected `sphere`, `machine`, `note`, or `}}` in sphere body, found {}",
                                t.kind
                            ),
                        ))
                    }
                },
                other => {
                    return Err(self.error_at(
                        &t,
                        format!(
                            "expected `sphere`, `machine`, `note`, or `}}` in sphere body, found {other}"
                        ),
                    ))
                }
            }
        }
    }

    fn machine(&mut self) -> Result<Machine, ParseError> {
        self.expect_keyword("machine")?;
        let (name, span) = self.ident("machine name")?;
        self.expect_keyword("of")?;
        let (thing, _) = self.ident("thing name")?;
        self.expect_kind(TokenKind::LBrace)?;
        self.expect_keyword("stages")?;
        self.expect_kind(TokenKind::Colon)?;
        let mut machine = Machine::new(name, thing, &[]);
        machine.span = Some(span);
        loop {
            machine.stages.push(self.stage()?);
            if self.peek().kind == TokenKind::Comma {
                self.bump();
            } else {
                break;
            }
        }
        loop {
            let t = self.peek().clone();
            match &t.kind {
                TokenKind::RBrace => {
                    self.bump();
                    return Ok(machine);
                }
                TokenKind::Word(w) if w == "note" => {
                    self.bump();
                    machine.annotations.push(self.string()?);
                }
                other => {
                    return Err(self.error_at(
                        &t,
                        format!("expected `note` or `}}` after stage list, found {other}"),
                    ))
                }
            }
        }
    }

    fn stage(&mut self) -> Result<StageKind, ParseError> {
        let t = self.bump();
        match &t.kind {
            TokenKind::Word(w) => StageKind::parse(w)
                .ok_or_else(|| self.error_at(&t, format!("expected stage name, found `{w}`"))),
            other => Err(self.error_at(&t, format!("expected stage name, found {other}"))),
        }
    }

    /// `path -> path (when STRING)?` shared by flow and trigger.
    fn arc(&mut self) -> Result<(Endpoint, Endpoint, Option<String>), ParseError> {
        self.bump(); // `flow` or `trigger`, already checked by the caller
        let src = self.path()?;
        self.expect_kind(TokenKind::Arrow)?;
        let dst = self.path()?;
        let guard = if self.peek().kind == TokenKind::Word("when".into()) {
            self.bump();
            Some(self.string()?)
        } else {
            None
        };
        Ok((src, dst, guard))
    }

    /// Dotted path whose last segment is a stage name.
    fn path(&mut self) -> Result<Endpoint, ParseError> {
        let mut segments: Vec<(String, SourceSpan)> = Vec::new();
        loop {
            let t = self.bump();
            let word = match &t.kind {
                TokenKind::Word(w) => w.clone(),
                other => {
                    return Err(self.error_at(&t, format!("expected path segment, found {other}")))
                }
            };
            segments.push((word, t.span));
            if self.peek().kind == TokenKind::Dot {
                self.bump();
            } else {
                break;
            }
        }
        let (last, last_span) = segments.pop().expect("at least one segment");
        let stage = match StageKind::parse(&last) {
            Some(s) => s,
            None => {
                return Err(ParseError {
                    message: format!("path must end in a stage name, found `{last}`"),
                    line: last_span.line,
                    col: last_span.col,
                })
            }
        };
        if segments.is_empty() {
            return Err(ParseError {
                message: "path needs a machine before the stage name".into(),
                line: last_span.line,
                col: last_span.col,
            });
        }
        for (word, span) in &segments {
            if RESERVED_WORDS.contains(&word.as_str()) {
                return Err(ParseError {
                    message: format!("reserved word `{word}` cannot appear in a path"),
                    line: span.line,
                    col: span.col,
                });
            }
        }
        Ok(Endpoint::new(
            segments.into_iter().map(|(w, _)| w).collect(),
            stage,
        ))
    }
}
