//! Attribute handlers: named transformations bound to stages by a scenario.
//!
//! A handler runs when a token enters its stage, before the latency elapses,
//! so the result is visible to everything downstream, including triggers
//! fired at the exit. Handlers see only the token's attributes and the run's
//! verdict map; routing stays the engine's business. The one exception is
//! `combine`, which merges tokens and is built into the engine rather than
//! registered here.

use std::collections::BTreeMap;

use thiserror::Error;

use super::event::{AttrMap, Value};
use crate::model::Endpoint;

/// What a handler may touch while a token sits in its stage.
pub struct HandlerCtx<'a> {
    /// Arguments from the scenario binding, usually attribute names.
    pub args: &'a [String],
    pub attrs: &'a mut AttrMap,
    /// Run-wide named outcomes, surfaced at the end of the log.
    pub verdicts: &'a mut BTreeMap<String, Value>,
    pub endpoint: &'a Endpoint,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HandlerError {
    #[error("expected {expected} arguments, got {got}")]
    BadArity { expected: &'static str, got: usize },
    #[error("token has no attribute `{key}`")]
    MissingAttr { key: String },
    #[error("attribute `{key}` must be an integer")]
    ExpectedInt { key: String },
    #[error("attribute `{key}` must be text")]
    ExpectedText { key: String },
    #[error("attribute `{key}` is not a comma-joined integer list")]
    BadCipherList { key: String },
    #[error(transparent)]
    Pki(#[from] crate::toypki::PkiError),
    #[error("{0}")]
    Other(String),
}

pub trait AttrHandler {
    fn apply(&self, ctx: HandlerCtx<'_>) -> Result<(), HandlerError>;
}

impl<F> AttrHandler for F
where
    F: Fn(HandlerCtx<'_>) -> Result<(), HandlerError>,
{
    fn apply(&self, ctx: HandlerCtx<'_>) -> Result<(), HandlerError> {
        self(ctx)
    }
}

/// Handlers by name. Lookup happens once, when a run starts.
#[derive(Default)]
pub struct HandlerRegistry {
    entries: BTreeMap<String, Box<dyn AttrHandler>>,
}

impl HandlerRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers under `name`, replacing any previous entry.
    pub fn register(&mut self, name: &str, handler: Box<dyn AttrHandler>) {
        self.entries.insert(name.to_string(), handler);
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn get(&self, name: &str) -> Option<&dyn AttrHandler> {
        self.entries.get(name).map(|b| b.as_ref())
    }
}

/// Reads an integer attribute or reports why it can't.
pub fn int_attr(attrs: &AttrMap, key: &str) -> Result<i64, HandlerError> {
    match attrs.get(key) {
        None => Err(HandlerError::MissingAttr {
            key: key.to_string(),
        }),
        Some(Value::Int(n)) => Ok(*n),
        Some(Value::Text(_)) => Err(HandlerError::ExpectedInt {
            key: key.to_string(),
        }),
    }
}

/// Reads a text attribute or reports why it can't.
pub fn text_attr<'a>(attrs: &'a AttrMap, key: &str) -> Result<&'a str, HandlerError> {
    match attrs.get(key) {
        None => Err(HandlerError::MissingAttr {
            key: key.to_string(),
        }),
        Some(Value::Text(s)) => Ok(s),
        Some(Value::Int(_)) => Err(HandlerError::ExpectedText {
            key: key.to_string(),
        }),
    }
}
