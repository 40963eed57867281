//! Scenario files: the inputs that drive one simulation run.
//!
//! Line oriented, `#` starts a comment outside quotes:
//!
//! ```text
//! inject 2 Order at Shop.Orders.create time 0 with qty=3, label="rush"
//! decide goods_ok = true, false
//! latency Shop.Orders.process = 4
//! handle Shop.Orders.process with ascii-hash(body, hash)
//! maxsteps 500
//! ```
//!
//! Repeating `decide` for a label appends to its decision list. Latency and
//! handler lines keep their order; binding the same endpoint twice is caught
//! when the run starts, not here.

use std::collections::BTreeMap;
use std::fmt;

use super::event::{AttrMap, Value};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub count: u32,
    pub thing: String,
    pub path: String,
    pub time: u64,
    pub attrs: AttrMap,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HandlerBinding {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub injections: Vec<Injection>,
    pub decisions: BTreeMap<String, Vec<bool>>,
    pub latencies: Vec<(String, u64)>,
    pub handlers: Vec<(String, HandlerBinding)>,
    pub max_steps: u64,
}

pub const DEFAULT_MAX_STEPS: u64 = 10_000;

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            injections: Vec::new(),
            decisions: BTreeMap::new(),
            latencies: Vec::new(),
            handlers: Vec::new(),
            max_steps: DEFAULT_MAX_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ScenarioError {}

pub fn parse_scenario(src: &str) -> Result<Scenario, ScenarioError> {
    let mut scenario = Scenario::default();
    for (idx, raw) in src.lines().enumerate() {
        let line_no = idx + 1;
        let tokens = lex_line(raw).map_err(|message| ScenarioError {
            line: line_no,
            message,
        })?;
        if tokens.is_empty() {
            continue;
        }
        let mut cur = Cursor {
            tokens: &tokens,
            pos: 0,
            line: line_no,
        };
        let head = cur.word("a directive")?;
        match head.as_str() {
            "inject" => {
                let count = cur.unsigned("an injection count")? as u32;
                let thing = cur.word("a thing type")?;
                cur.keyword("at")?;
                let path = cur.word("a stage path")?;
                cur.keyword("time")?;
                let time = cur.unsigned("a time")?;
                let mut attrs = AttrMap::new();
                if !cur.done() {
                    cur.keyword("with")?;
                    loop {
                        let key = cur.word("an attribute name")?;
                        cur.punct('=')?;
                        let value = cur.value()?;
                        attrs.insert(key, value);
                        if cur.done() {
                            break;
                        }
                        cur.punct(',')?;
                    }
                }
                cur.finish()?;
                scenario.injections.push(Injection {
                    count,
                    thing,
                    path,
                    time,
                    attrs,
                });
            }
            "decide" => {
                let label = cur.word_or_string("a guard label")?;
                cur.punct('=')?;
                let list = scenario.decisions.entry(label).or_default();
                loop {
                    list.push(cur.boolean()?);
                    if cur.done() {
                        break;
                    }
                    cur.punct(',')?;
                }
            }
            "latency" => {
                let path = cur.word("a stage path")?;
                cur.punct('=')?;
                let value = cur.unsigned("a latency")?;
                cur.finish()?;
                scenario.latencies.push((path, value));
            }
            "handle" => {
                let path = cur.word("a stage path")?;
                cur.keyword("with")?;
                let name = cur.word("a handler name")?;
                let mut args = Vec::new();
                if cur.peek_punct('(') {
                    cur.punct('(')?;
                    if !cur.peek_punct(')') {
                        loop {
                            args.push(cur.arg()?);
                            if cur.peek_punct(')') {
                                break;
                            }
                            cur.punct(',')?;
                        }
                    }
                    cur.punct(')')?;
                }
                cur.finish()?;
                scenario
                    .handlers
                    .push((path, HandlerBinding { name, args }));
            }
            "maxsteps" => {
                scenario.max_steps = cur.unsigned("a step budget")?;
                cur.finish()?;
            }
            other => {
                return Err(ScenarioError {
                    line: line_no,
                    message: format!(
                        "unknown directive `{other}`; expected inject, decide, latency, handle, or maxsteps"
                    ),
                });
            }
        }
    }
    Ok(scenario)
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Str(String),
    Punct(char),
}

fn lex_line(raw: &str) -> Result<Vec<Tok>, String> {
    let mut tokens = Vec::new();
    let mut chars = raw.char_indices().peekable();
    while let Some(&(start, ch)) = chars.peek() {
        match ch {
            '#' => break,
            c if c.is_whitespace() => {
                chars.next();
            }
            '=' | ',' | '(' | ')' => {
                chars.next();
                tokens.push(Tok::Punct(ch));
            }
            '"' => {
                chars.next();
                let mut text = String::new();
                loop {
                    match chars.next() {
                        None => return Err("unterminated string".into()),
                        Some((_, '"')) => break,
                        Some((_, '\\')) => match chars.next() {
                            Some((_, '"')) => text.push('"'),
                            Some((_, '\\')) => text.push('\\'),
                            Some((_, other)) => {
                                return Err(format!("unknown escape `\\{other}` in string"));
                            }
                            None => return Err("unterminated string".into()),
                        },
                        Some((_, c)) => text.push(c),
                    }
                }
                tokens.push(Tok::Str(text));
            }
            c if is_word_char(c) => {
                let mut end = start;
                while let Some(&(i, c)) = chars.peek() {
                    if is_word_char(c) {
                        end = i + c.len_utf8();
                        chars.next();
                    } else {
                        break;
                    }
                }
                tokens.push(Tok::Word(raw[start..end].to_string()));
            }
            other => return Err(format!("unexpected character `{other}`")),
        }
    }
    Ok(tokens)
}

fn is_word_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

struct Cursor<'a> {
    tokens: &'a [Tok],
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, message: String) -> ScenarioError {
        ScenarioError {
            line: self.line,
            message,
        }
    }

    fn next(&mut self, wanted: &str) -> Result<&'a Tok, ScenarioError> {
        let tok = self
            .tokens
            .get(self.pos)
            .ok_or_else(|| self.err(format!("expected {wanted}, found end of line")))?;
        self.pos += 1;
        Ok(tok)
    }

    fn done(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn finish(&self) -> Result<(), ScenarioError> {
        if self.done() {
            Ok(())
        } else {
            Err(self.err("trailing input after directive".into()))
        }
    }

    fn word(&mut self, wanted: &str) -> Result<String, ScenarioError> {
        match self.next(wanted)? {
            Tok::Word(w) => Ok(w.clone()),
            other => Err(self.err(format!("expected {wanted}, found {}", describe(other)))),
        }
    }

    fn word_or_string(&mut self, wanted: &str) -> Result<String, ScenarioError> {
        match self.next(wanted)? {
            Tok::Word(w) => Ok(w.clone()),
            Tok::Str(s) => Ok(s.clone()),
            other => Err(self.err(format!("expected {wanted}, found {}", describe(other)))),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ScenarioError> {
        let word = self.word(&format!("`{kw}`"))?;
        if word == kw {
            Ok(())
        } else {
            Err(self.err(format!("expected `{kw}`, found `{word}`")))
        }
    }

    fn punct(&mut self, p: char) -> Result<(), ScenarioError> {
        match self.next(&format!("`{p}`"))? {
            Tok::Punct(c) if *c == p => Ok(()),
            other => Err(self.err(format!("expected `{p}`, found {}", describe(other)))),
        }
    }

    fn peek_punct(&self, p: char) -> bool {
        matches!(self.tokens.get(self.pos), Some(Tok::Punct(c)) if *c == p)
    }

    fn unsigned(&mut self, wanted: &str) -> Result<u64, ScenarioError> {
        let word = self.word(wanted)?;
        word.parse::<u64>()
            .map_err(|_| self.err(format!("expected {wanted}, found `{word}`")))
    }

    fn boolean(&mut self) -> Result<bool, ScenarioError> {
        let word = self.word("`true` or `false`")?;
        match word.as_str() {
            "true" => Ok(true),
            "false" => Ok(false),
            other => Err(self.err(format!("expected `true` or `false`, found `{other}`"))),
        }
    }

    fn value(&mut self) -> Result<Value, ScenarioError> {
        match self.next("an attribute value")? {
            Tok::Str(s) => Ok(Value::Text(s.clone())),
            Tok::Word(w) => w.parse::<i64>().map(Value::Int).map_err(|_| {
                self.err(format!("expected an integer or quoted string, found `{w}`"))
            }),
            other => Err(self.err(format!(
                "expected an attribute value, found {}",
                describe(other)
            ))),
        }
    }

    fn arg(&mut self) -> Result<String, ScenarioError> {
        match self.next("a handler argument")? {
            Tok::Word(w) => Ok(w.clone()),
            Tok::Str(s) => Ok(s.clone()),
            other => Err(self.err(format!(
                "expected a handler argument, found {}",
                describe(other)
            ))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Word(w) => format!("`{w}`"),
        Tok::Str(s) => format!("string \"{s}\""),
        Tok::Punct(c) => format!("`{c}`"),
    }
}
