//! Graphviz text output.
//!
//! The full level draws one node per stage inside nested sphere clusters.
//! The machines level draws one node per machine, still clustered; the
//! spheres level drops clusters and draws one node per sphere that owns
//! machines. Flow arcs are solid, triggers dashed. Guard labels appear at
//! the full level only; collapsed edges carry a multiplicity label when
//! they stand for more than one arc.

use std::fmt::Write;

use super::simplify::{simplify, EdgeKind, Level};
use crate::model::{Model, Sphere};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RankDir {
    #[default]
    LR,
    TB,
}

impl RankDir {
    fn as_str(self) -> &'static str {
        match self {
            RankDir::LR => "LR",
            RankDir::TB => "TB",
        }
    }
}

#[derive(Debug, Clone)]
pub struct RenderOptions {
    pub level: Level,
    pub show_annotations: bool,
    pub rankdir: RankDir,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            level: Level::Full,
            show_annotations: false,
            rankdir: RankDir::default(),
        }
    }
}

pub fn render_dot(model: &Model, options: &RenderOptions) -> String {
    let mut out = String::from("digraph fm {\n");
    let _ = writeln!(out, "  rankdir={};", options.rankdir.as_str());

    match options.level {
        Level::Full | Level::Machines => {
            for root in &model.roots {
                emit_cluster(&mut out, root, &mut Vec::new(), options);
            }
        }
        Level::Spheres => {
            let graph = simplify(model, Level::Spheres);
            for node in &graph.nodes {
                let label = node_label(&node.label, &node.annotations, options);
                let _ = writeln!(out, "  \"{}\" [label=\"{}\"];", escape(&node.id), label);
            }
        }
    }

    match options.level {
        Level::Full => {
            let arcs = model
                .flows
                .iter()
                .map(|a| (&a.src, &a.dst, &a.guard, EdgeKind::Flow))
                .chain(
                    model
                        .triggers
                        .iter()
                        .map(|a| (&a.src, &a.dst, &a.guard, EdgeKind::Trigger)),
                );
            for (src, dst, guard, kind) in arcs {
                if model.resolve(src).is_err() || model.resolve(dst).is_err() {
                    continue;
                }
                let label = guard.as_deref().map(escape);
                out.push_str(&edge_line(&src.to_string(), &dst.to_string(), label, kind));
            }
        }
        Level::Machines | Level::Spheres => {
            let graph = simplify(model, options.level);
            for edge in &graph.edges {
                let label = (edge.multiplicity > 1).then(|| edge.multiplicity.to_string());
                out.push_str(&edge_line(&edge.src, &edge.dst, label, edge.kind));
            }
        }
    }

    out.push_str("}\n");
    out
}

fn emit_cluster(
    out: &mut String,
    sphere: &Sphere,
    path: &mut Vec<String>,
    options: &RenderOptions,
) {
    path.push(sphere.name.clone());
    let depth = path.len();
    let pad = "  ".repeat(depth);
    let id = path.join(".");
    let label = node_label(&sphere.name, &sphere.annotations, options);
    let _ = writeln!(out, "{pad}subgraph \"cluster_{}\" {{", escape(&id));
    let _ = writeln!(out, "{pad}  label=\"{label}\";");
    for machine in &sphere.machines {
        match options.level {
            Level::Full => {
                // Stage nodes; machine annotations have no anchor here.
                for &stage in &machine.stages {
                    let _ = writeln!(
                        out,
                        "{pad}  \"{}.{}.{}\" [label=\"{}.{}\"];",
                        escape(&id),
                        escape(&machine.name),
                        stage,
                        escape(&machine.name),
                        stage
                    );
                }
            }
            Level::Machines => {
                let label = node_label(&machine.name, &machine.annotations, options);
                let _ = writeln!(
                    out,
                    "{pad}  \"{}.{}\" [label=\"{label}\"];",
                    escape(&id),
                    escape(&machine.name)
                );
            }
            Level::Spheres => unreachable!("spheres level draws no clusters"),
        }
    }
    for child in &sphere.children {
        emit_cluster(out, child, path, options);
    }
    let _ = writeln!(out, "{pad}}}");
    path.pop();
}

fn edge_line(src: &str, dst: &str, label: Option<String>, kind: EdgeKind) -> String {
    let mut attrs = Vec::new();
    if let Some(label) = label {
        attrs.push(format!("label=\"{label}\""));
    }
    if kind == EdgeKind::Trigger {
        attrs.push("style=dashed".to_string());
    }
    let mut line = format!("  \"{}\" -> \"{}\"", escape(src), escape(dst));
    if !attrs.is_empty() {
        line.push_str(&format!(" [{}]", attrs.join(", ")));
    }
    line.push_str(";\n");
    line
}

fn node_label(name: &str, annotations: &[String], options: &RenderOptions) -> String {
    let mut label = escape(name);
    if options.show_annotations {
        for note in annotations {
            label.push_str("\\n");
            label.push_str(&escape(note));
        }
    }
    label
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            _ => out.push(ch),
        }
    }
    out
}
