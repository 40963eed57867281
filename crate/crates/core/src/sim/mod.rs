//! Deterministic token simulation.
//!
//! A scenario injects tokens at create or transfer stages; tokens then walk
//! the flow arcs, spending one latency unit per stage visit. Exiting a stage
//! routes the token along its outgoing flow arcs (guards pick exactly one
//! branch; several unguarded arcs duplicate the token) and fires the stage's
//! outgoing triggers, which give birth to new tokens at create stages.
//! A token with nowhere to go retires.
//!
//! At a transfer stage direction matters: a token that arrived from outside
//! the machine continues along intra-machine arcs, while a token coming from
//! its own machine's release leaves along cross-machine arcs. This is what
//! lets the canonical transfer/receive/process/release/transfer machine
//! import and export through the same stage without looping.
//!
//! Everything is ordered by (time, token id), with token ids handed out in
//! declaration and arc order, so two runs of the same scenario produce
//! byte-identical logs.

mod engine;
mod event;
mod handler;
mod scenario;

pub use engine::{simulate, simulate_with, Sim, SimError};
pub use event::{dump_attrs, AttrMap, Event, EventKind, EventLog, RetiredToken, TokenId, Value};
pub use handler::{int_attr, text_attr, AttrHandler, HandlerCtx, HandlerError, HandlerRegistry};
pub use scenario::{parse_scenario, HandlerBinding, Injection, Scenario, ScenarioError};
