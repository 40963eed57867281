//! Collapsing a model to coarser grains.
//!
//! The machines level folds every stage into its machine; the spheres level
//! folds every machine into its immediate owning sphere. Parallel arcs
//! between the same pair of collapsed nodes become one edge with a
//! multiplicity count, and arcs that stay inside a node disappear. Arcs
//! with endpoints that do not resolve are skipped.

use std::collections::BTreeMap;

use crate::model::{Endpoint, Model};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Level {
    Full,
    Machines,
    Spheres,
}

impl Level {
    pub fn as_str(self) -> &'static str {
        match self {
            Level::Full => "full",
            Level::Machines => "machines",
            Level::Spheres => "spheres",
        }
    }
}

impl std::str::FromStr for Level {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Level::Full),
            "machines" => Ok(Level::Machines),
            "spheres" => Ok(Level::Spheres),
            other => Err(format!(
                "unknown level `{other}`; expected full, machines, or spheres"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum EdgeKind {
    Flow,
    Trigger,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplifiedNode {
    /// Dotted path, unique at its level.
    pub id: String,
    /// Display name, the last path segment at collapsed levels.
    pub label: String,
    pub annotations: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimplifiedEdge {
    pub src: String,
    pub dst: String,
    pub kind: EdgeKind,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SimplifiedGraph {
    pub nodes: Vec<SimplifiedNode>,
    pub edges: Vec<SimplifiedEdge>,
}

/// Collapses the model. At `Level::Full` nodes are stages and every arc is
/// its own edge; guard labels are a rendering concern and are not carried.
pub fn simplify(model: &Model, level: Level) -> SimplifiedGraph {
    let mut nodes = Vec::new();
    match level {
        Level::Full => {
            model.for_each_machine(|path, m| {
                for &stage in &m.stages {
                    let mut id = path.join(".");
                    id.push('.');
                    id.push_str(&m.name);
                    id.push('.');
                    id.push_str(stage.as_str());
                    nodes.push(SimplifiedNode {
                        id,
                        label: format!("{}.{}", m.name, stage),
                        annotations: Vec::new(),
                    });
                }
            });
        }
        Level::Machines => {
            model.for_each_machine(|path, m| {
                nodes.push(SimplifiedNode {
                    id: format!("{}.{}", path.join("."), m.name),
                    label: m.name.clone(),
                    annotations: m.annotations.clone(),
                });
            });
        }
        Level::Spheres => {
            model.for_each_sphere(|path, sphere| {
                if !sphere.machines.is_empty() {
                    nodes.push(SimplifiedNode {
                        id: path.join("."),
                        label: sphere.name.clone(),
                        annotations: sphere.annotations.clone(),
                    });
                }
            });
        }
    }

    let group = |ep: &Endpoint| -> Option<String> {
        model.resolve(ep).ok()?;
        Some(match level {
            Level::Full => ep.to_string(),
            Level::Machines => ep.machine_path(),
            Level::Spheres => {
                let (_, spheres) = ep.machine.split_last()?;
                spheres.join(".")
            }
        })
    };

    let mut edges: Vec<SimplifiedEdge> = Vec::new();
    let mut index: BTreeMap<(String, String, EdgeKind), usize> = BTreeMap::new();
    let arcs = model
        .flows
        .iter()
        .map(|a| (&a.src, &a.dst, EdgeKind::Flow))
        .chain(
            model
                .triggers
                .iter()
                .map(|a| (&a.src, &a.dst, EdgeKind::Trigger)),
        );
    for (src, dst, kind) in arcs {
        let (Some(src), Some(dst)) = (group(src), group(dst)) else {
            continue;
        };
        if level != Level::Full && src == dst {
            continue;
        }
        match index.get(&(src.clone(), dst.clone(), kind)) {
            Some(&i) if level != Level::Full => edges[i].multiplicity += 1,
            _ => {
                index.insert((src.clone(), dst.clone(), kind), edges.len());
                edges.push(SimplifiedEdge {
                    src,
                    dst,
                    kind,
                    multiplicity: 1,
                });
            }
        }
    }

    SimplifiedGraph { nodes, edges }
}
