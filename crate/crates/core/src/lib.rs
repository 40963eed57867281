//! Toolkit for flow-based conceptual models.
//!
//! A model is a tree of spheres. Each sphere owns machines, and a machine
//! moves things of one type through up to seven stages (create, release,
//! transfer, arrive, accept, receive, process). Solid flow arcs carry things
//! between stages; dashed trigger arcs activate other flows, possibly across
//! sphere boundaries.
//!
//! The crate offers four views of a model:
//!
//! * [`dsl`] parses the textual `.fm` format and prints the canonical form.
//! * [`validate`] checks stage successions and endpoint wiring, reporting
//!   stable `FM-*` diagnostic codes.
//! * [`sim`] runs deterministic token simulations driven by `.fms` scenarios.
//! * [`render`] emits Graphviz DOT at three levels of detail.
//!
//! [`toypki`] implements the additive toy cipher used by the worked
//! public-key examples, plus the handler registry that makes those
//! computations runnable inside simulations.

pub mod diag;
pub mod dsl;
pub mod model;
pub mod render;
pub mod rules;
pub mod sim;
pub mod span;
pub mod toypki;
pub mod validate;

pub use diag::{Code, Diagnostic, Location, Severity};
pub use model::{
    Endpoint, FlowArc, Machine, Model, ResolveError, Ruleset, Sphere, StageKind, TriggerArc,
};
pub use span::SourceSpan;
pub use validate::validate;
