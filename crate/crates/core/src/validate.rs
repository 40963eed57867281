//! Whole-model validation.
//!
//! Every check runs on every element; nothing aborts early. Diagnostics
//! come back ordered by (element declaration order, code), so repeated runs
//! over the same model produce byte-identical reports. Declaration order is
//! the pre-order walk of the sphere tree (a sphere, then its machines, then
//! its children), followed by flow arcs, then trigger arcs.

use crate::diag::{Code, Diagnostic, Location};
use crate::model::{is_usable_name, is_valid_ident, Endpoint, Model, StageKind};
use crate::rules::legal_successor;
use crate::span::SourceSpan;
use std::collections::HashSet;

struct Collector {
    items: Vec<(usize, Diagnostic)>,
}

impl Collector {
    fn push(
        &mut self,
        ordinal: usize,
        code: Code,
        span: Option<SourceSpan>,
        element: &str,
        message: String,
    ) {
        let location = match span {
            Some(s) => Location::Span(s),
            None => Location::Element(element.to_string()),
        };
        self.items
            .push((ordinal, Diagnostic::new(code, location, message)));
    }
}

/// Runs the full diagnostic catalog over `model`.
pub fn validate(model: &Model) -> Vec<Diagnostic> {
    let mut out = Collector { items: Vec::new() };

    // Stages that some resolvable arc endpoint touches, keyed by
    // (machine path, stage). Collected up front so the no-incident-arc
    // check can run during the tree walk.
    let mut incident: HashSet<(String, StageKind)> = HashSet::new();
    for endpoint in model
        .flows
        .iter()
        .flat_map(|a| [&a.src, &a.dst])
        .chain(model.triggers.iter().flat_map(|a| [&a.src, &a.dst]))
    {
        if model.resolve(endpoint).is_ok() {
            incident.insert((endpoint.machine_path(), endpoint.stage));
        }
    }

    let mut ordinal = 0usize;
    walk_spheres(model, &mut ordinal, &mut out, &incident);

    for arc in &model.flows {
        check_arc_endpoints(
            model, &mut out, ordinal, arc.span, "flow", &arc.src, &arc.dst,
        );
        check_flow_succession(model, &mut out, ordinal, arc.span, &arc.src, &arc.dst);
        ordinal += 1;
    }
    for arc in &model.triggers {
        check_arc_endpoints(
            model, &mut out, ordinal, arc.span, "trigger", &arc.src, &arc.dst,
        );
        ordinal += 1;
    }

    let mut items = out.items;
    let mut seq = 0usize;
    let mut keyed: Vec<_> = items
        .drain(..)
        .map(|(ord, d)| {
            seq += 1;
            ((ord, d.code, seq), d)
        })
        .collect();
    keyed.sort_by_key(|a| a.0);
    keyed.into_iter().map(|(_, d)| d).collect()
}

fn walk_spheres(
    model: &Model,
    ordinal: &mut usize,
    out: &mut Collector,
    incident: &HashSet<(String, StageKind)>,
) {
    fn walk(
        spheres: &[crate::model::Sphere],
        path: &mut Vec<String>,
        ordinal: &mut usize,
        out: &mut Collector,
        incident: &HashSet<(String, StageKind)>,
    ) {
        let mut seen_spheres: HashSet<&str> = HashSet::new();
        for sphere in spheres {
            let sphere_ord = *ordinal;
            *ordinal += 1;
            path.push(sphere.name.clone());
            let sphere_path = path.join(".");

            check_name(
                out,
                sphere_ord,
                sphere.span,
                &sphere_path,
                "sphere",
                &sphere.name,
            );
            if !seen_spheres.insert(sphere.name.as_str()) {
                out.push(
                    sphere_ord,
                    Code::E006,
                    sphere.span,
                    &sphere_path,
                    format!("duplicate sphere name `{sphere_path}`"),
                );
            }

            let mut seen_machines: HashSet<&str> = HashSet::new();
            for machine in &sphere.machines {
                let machine_ord = *ordinal;
                *ordinal += 1;
                let machine_path = format!("{sphere_path}.{}", machine.name);

                check_name(
                    out,
                    machine_ord,
                    machine.span,
                    &machine_path,
                    "machine",
                    &machine.name,
                );
                if !seen_machines.insert(machine.name.as_str()) {
                    out.push(
                        machine_ord,
                        Code::E006,
                        machine.span,
                        &machine_path,
                        format!("duplicate machine name `{machine_path}`"),
                    );
                }

                if machine.stages.is_empty() {
                    out.push(
                        machine_ord,
                        Code::W002,
                        machine.span,
                        &machine_path,
                        format!("machine `{machine_path}` declares no stages"),
                    );
                }

                let mut seen_stages = HashSet::new();
                for stage in &machine.stages {
                    if !seen_stages.insert(*stage) {
                        out.push(
                            machine_ord,
                            Code::E002,
                            machine.span,
                            &machine_path,
                            format!("stage `{stage}` declared more than once in machine `{machine_path}`"),
                        );
                    }
                }

                if machine.has_stage(StageKind::Receive)
                    && (machine.has_stage(StageKind::Arrive)
                        || machine.has_stage(StageKind::Accept))
                {
                    out.push(
                        machine_ord,
                        Code::E005,
                        machine.span,
                        &machine_path,
                        format!(
                            "machine `{machine_path}` declares receive together with arrive or accept"
                        ),
                    );
                }

                for stage in &machine.stages {
                    if seen_stages.contains(stage)
                        && !incident.contains(&(machine_path.clone(), *stage))
                    {
                        out.push(
                            machine_ord,
                            Code::W001,
                            machine.span,
                            &machine_path,
                            format!("stage `{machine_path}.{stage}` has no incident arc"),
                        );
                        // One report per stage kind even when duplicated.
                        seen_stages.remove(stage);
                    }
                }
            }

            walk(&sphere.children, path, ordinal, out, incident);
            path.pop();
        }
    }

    let mut path = Vec::new();
    walk(&model.roots, &mut path, ordinal, out, incident);
}

fn check_name(
    out: &mut Collector,
    ordinal: usize,
    span: Option<SourceSpan>,
    path: &str,
    kind: &str,
    name: &str,
) {
    if is_usable_name(name) {
        return;
    }
    let reason = if !is_valid_ident(name) {
        format!("{kind} name `{name}` is not a valid identifier")
    } else {
        format!("{kind} name `{name}` is a reserved word")
    };
    out.push(ordinal, Code::E006, span, path, reason);
}

fn check_arc_endpoints(
    model: &Model,
    out: &mut Collector,
    ordinal: usize,
    span: Option<SourceSpan>,
    kind: &str,
    src: &Endpoint,
    dst: &Endpoint,
) {
    for (role, endpoint) in [("source", src), ("destination", dst)] {
        if let Err(err) = model.resolve(endpoint) {
            out.push(
                ordinal,
                Code::E001,
                span,
                &endpoint.to_string(),
                format!("{kind} {role} `{endpoint}` does not resolve: {err}"),
            );
        }
    }
}

fn check_flow_succession(
    model: &Model,
    out: &mut Collector,
    ordinal: usize,
    span: Option<SourceSpan>,
    src: &Endpoint,
    dst: &Endpoint,
) {
    // Succession is only judged between endpoints that exist.
    if model.resolve(src).is_err() || model.resolve(dst).is_err() {
        return;
    }
    let same_machine = src.same_machine(dst);
    if legal_successor(model.ruleset, src.stage, dst.stage, same_machine) {
        return;
    }
    if same_machine {
        out.push(
            ordinal,
            Code::E003,
            span,
            &src.to_string(),
            format!(
                "illegal flow succession `{} -> {}` in machine `{}`",
                src.stage,
                dst.stage,
                src.machine_path()
            ),
        );
    } else {
        out.push(
            ordinal,
            Code::E004,
            span,
            &src.to_string(),
            format!(
                "flow between machines `{}` and `{}` must connect transfer to transfer, found `{} -> {}`",
                src.machine_path(),
                dst.machine_path(),
                src.stage,
                dst.stage
            ),
        );
    }
}
