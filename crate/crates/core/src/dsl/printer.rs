//! Canonical textual form of a model.

use crate::model::{is_usable_name, Endpoint, Machine, Model, Sphere};
use std::fmt::Write;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SerializeError {
    #[error("{kind} name `{name}` cannot be written in the textual format")]
    BadName { kind: &'static str, name: String },
    #[error("machine `{path}` has no stages; the textual format requires at least one")]
    NoStages { path: String },
    #[error("{kind} endpoint `{endpoint}` does not resolve: {reason}")]
    BrokenArc {
        kind: &'static str,
        endpoint: String,
        reason: String,
    },
}

/// Prints the canonical form. Fails on models the grammar cannot express:
/// unusable names, machines without stages, or arcs whose endpoints do not
/// resolve.
pub fn serialize(model: &Model) -> Result<String, SerializeError> {
    let mut out = String::new();
    for sphere in &model.roots {
        write_sphere(&mut out, sphere, 0)?;
    }
    for arc in &model.flows {
        check_arc(model, "flow", &arc.src)?;
        check_arc(model, "flow", &arc.dst)?;
        write_arc(&mut out, "flow", &arc.src, &arc.dst, arc.guard.as_deref());
    }
    for arc in &model.triggers {
        check_arc(model, "trigger", &arc.src)?;
        check_arc(model, "trigger", &arc.dst)?;
        write_arc(
            &mut out,
            "trigger",
            &arc.src,
            &arc.dst,
            arc.guard.as_deref(),
        );
    }
    Ok(out)
}

fn check_name(kind: &'static str, name: &str) -> Result<(), SerializeError> {
    if is_usable_name(name) {
        Ok(())
    } else {
        Err(SerializeError::BadName {
            kind,
            name: name.to_string(),
        })
    }
}

fn check_arc(model: &Model, kind: &'static str, endpoint: &Endpoint) -> Result<(), SerializeError> {
    model
        .resolve(endpoint)
        .map(|_| ())
        .map_err(|e| SerializeError::BrokenArc {
            kind,
            endpoint: endpoint.to_string(),
            reason: e.to_string(),
        })
}

fn write_sphere(out: &mut String, sphere: &Sphere, depth: usize) -> Result<(), SerializeError> {
    check_name("sphere", &sphere.name)?;
    let pad = "  ".repeat(depth);
    let _ = writeln!(out, "{pad}sphere {} {{", sphere.name);
    for note in &sphere.annotations {
        let _ = writeln!(out, "{pad}  note \"{}\"", escape(note));
    }
    for machine in &sphere.machines {
        write_machine(out, machine, depth + 1)?;
    }
    for child in &sphere.children {
        write_sphere(out, child, depth + 1)?;
    }
    let _ = writeln!(out, "{pad}}}");
    Ok(())
}

fn write_machine(out: &mut String, machine: &Machine, depth: usize) -> Result<(), SerializeError> {
    check_name("machine", &machine.name)?;
    check_name("thing", &machine.thing)?;
    if machine.stages.is_empty() {
        return Err(SerializeError::NoStages {
            path: machine.name.clone(),
        });
    }
    let pad = "  ".repeat(depth);
    let _ = writeln!(out, "{pad}machine {} of {} {{", machine.name, machine.thing);
    let stages: Vec<&str> = machine.stages.iter().map(|s| s.as_str()).collect();
    let _ = writeln!(out, "{pad}  stages: {}", stages.join(", "));
    for note in &machine.annotations {
        let _ = writeln!(out, "{pad}  note \"{}\"", escape(note));
    }
    let _ = writeln!(out, "{pad}}}");
    Ok(())
}

fn write_arc(out: &mut String, kind: &str, src: &Endpoint, dst: &Endpoint, guard: Option<&str>) {
    match guard {
        Some(g) => {
            let _ = writeln!(out, "{kind} {src} -> {dst} when \"{}\"", escape(g));
        }
        None => {
            let _ = writeln!(out, "{kind} {src} -> {dst}");
        }
    }
}

fn escape(text: &str) -> String {
    text.replace('\\', "\\\\").replace('"', "\\\"")
}
