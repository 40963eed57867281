//! Graph rendering: Graphviz output at three grains.

mod dot;
mod simplify;

pub use dot::{render_dot, RankDir, RenderOptions};
pub use simplify::{simplify, EdgeKind, Level, SimplifiedEdge, SimplifiedGraph, SimplifiedNode};
