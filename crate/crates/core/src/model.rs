//! Model structure: spheres, machines, stages, and arcs.
//!
//! Spheres form a tree. Machines sit inside spheres and never contain
//! sub-spheres. A flow arc moves a thing from one stage to another; a
//! trigger arc activates another flow and may connect any stage to any
//! stage, across machine and sphere boundaries.
//!
//! Element identity is positional: machines are addressed by the dotted
//! path of their owning spheres plus the machine name, stages by that path
//! plus the stage name. Source spans are carried for diagnostics only and
//! are ignored by equality.

use crate::span::SourceSpan;
use std::fmt;

/// The seven stage kinds a machine may declare, each at most once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StageKind {
    Create,
    Release,
    Transfer,
    Arrive,
    Accept,
    Receive,
    Process,
}

impl StageKind {
    pub const ALL: [StageKind; 7] = [
        StageKind::Create,
        StageKind::Release,
        StageKind::Transfer,
        StageKind::Arrive,
        StageKind::Accept,
        StageKind::Receive,
        StageKind::Process,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            StageKind::Create => "create",
            StageKind::Release => "release",
            StageKind::Transfer => "transfer",
            StageKind::Arrive => "arrive",
            StageKind::Accept => "accept",
            StageKind::Receive => "receive",
            StageKind::Process => "process",
        }
    }

    pub fn parse(name: &str) -> Option<StageKind> {
        StageKind::ALL.iter().copied().find(|s| s.as_str() == name)
    }
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Which succession table the validator applies to intra-machine flows.
/// The lenient table additionally permits the create-to-transfer and
/// process-to-transfer shorthands that published diagrams sometimes use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ruleset {
    #[default]
    Strict,
    Lenient,
}

/// One end of an arc: a machine path plus a stage kind.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Endpoint {
    /// Owning sphere names from the root, then the machine name.
    pub machine: Vec<String>,
    pub stage: StageKind,
}

impl Endpoint {
    pub fn new(machine: Vec<String>, stage: StageKind) -> Self {
        Endpoint { machine, stage }
    }

    pub fn machine_path(&self) -> String {
        self.machine.join(".")
    }

    pub fn same_machine(&self, other: &Endpoint) -> bool {
        self.machine == other.machine
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.machine_path(), self.stage)
    }
}

#[derive(Debug, Clone)]
pub struct FlowArc {
    pub src: Endpoint,
    pub dst: Endpoint,
    /// Guard label consumed from scenario decisions. A leading `!` negates
    /// the looked-up decision; the label itself is the part after `!`.
    pub guard: Option<String>,
    pub span: Option<SourceSpan>,
}

impl PartialEq for FlowArc {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.dst == other.dst && self.guard == other.guard
    }
}
impl Eq for FlowArc {}

#[derive(Debug, Clone)]
pub struct TriggerArc {
    pub src: Endpoint,
    pub dst: Endpoint,
    pub guard: Option<String>,
    pub span: Option<SourceSpan>,
}

impl PartialEq for TriggerArc {
    fn eq(&self, other: &Self) -> bool {
        self.src == other.src && self.dst == other.dst && self.guard == other.guard
    }
}
impl Eq for TriggerArc {}

#[derive(Debug, Clone)]
pub struct Machine {
    pub name: String,
    /// Type of thing this machine handles.
    pub thing: String,
    /// Declaration order is preserved; duplicates are a validation error,
    /// not a construction error.
    pub stages: Vec<StageKind>,
    pub annotations: Vec<String>,
    pub span: Option<SourceSpan>,
}

impl Machine {
    pub fn new(name: impl Into<String>, thing: impl Into<String>, stages: &[StageKind]) -> Self {
        Machine {
            name: name.into(),
            thing: thing.into(),
            stages: stages.to_vec(),
            annotations: Vec::new(),
            span: None,
        }
    }

    pub fn has_stage(&self, stage: StageKind) -> bool {
        self.stages.contains(&stage)
    }
}

impl PartialEq for Machine {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.thing == other.thing
            && self.stages == other.stages
            && self.annotations == other.annotations
    }
}
impl Eq for Machine {}

#[derive(Debug, Clone, Default)]
pub struct Sphere {
    pub name: String,
    pub annotations: Vec<String>,
    pub machines: Vec<Machine>,
    pub children: Vec<Sphere>,
    pub span: Option<SourceSpan>,
}

impl Sphere {
    pub fn new(name: impl Into<String>) -> Self {
        Sphere {
            name: name.into(),
            ..Sphere::default()
        }
    }
}

impl PartialEq for Sphere {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
            && self.annotations == other.annotations
            && self.machines == other.machines
            && self.children == other.children
    }
}
impl Eq for Sphere {}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Model {
    pub roots: Vec<Sphere>,
    pub flows: Vec<FlowArc>,
    pub triggers: Vec<TriggerArc>,
    pub ruleset: Ruleset,
}

/// Why an endpoint path failed to resolve.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("path `{path}` is too short; expected sphere.machine.stage")]
    TooShort { path: String },
    #[error("`{segment}` in `{path}` does not name a sphere")]
    NoSuchSphere { path: String, segment: String },
    #[error("`{segment}` in `{path}` does not name a machine")]
    NoSuchMachine { path: String, segment: String },
    #[error("machine `{machine}` does not declare stage `{stage}`")]
    NoSuchStage { machine: String, stage: StageKind },
    #[error("`{segment}` in `{path}` is not a stage name")]
    NotAStage { path: String, segment: String },
}

impl Model {
    /// Looks up the machine an endpoint refers to and checks that the
    /// stage is declared there.
    pub fn resolve(&self, endpoint: &Endpoint) -> Result<&Machine, ResolveError> {
        let machine = self.machine_at(&endpoint.machine)?;
        if machine.has_stage(endpoint.stage) {
            Ok(machine)
        } else {
            Err(ResolveError::NoSuchStage {
                machine: endpoint.machine_path(),
                stage: endpoint.stage,
            })
        }
    }

    /// Looks up a machine by its dotted-path segments (spheres then name).
    pub fn machine_at(&self, segments: &[String]) -> Result<&Machine, ResolveError> {
        let path = segments.join(".");
        if segments.len() < 2 {
            return Err(ResolveError::TooShort { path });
        }
        let (machine_name, sphere_names) = segments.split_last().expect("len checked");
        let mut level = &self.roots;
        let mut sphere = None;
        for name in sphere_names {
            match level.iter().find(|s| s.name == *name) {
                Some(s) => {
                    level = &s.children;
                    sphere = Some(s);
                }
                None => {
                    return Err(ResolveError::NoSuchSphere {
                        path,
                        segment: name.clone(),
                    })
                }
            }
        }
        let sphere = sphere.expect("at least one sphere segment");
        sphere
            .machines
            .iter()
            .find(|m| m.name == *machine_name)
            .ok_or(ResolveError::NoSuchMachine {
                path,
                segment: machine_name.clone(),
            })
    }

    /// Parses a dotted textual path (`Sphere.Machine.stage`) into an
    /// endpoint and resolves it against this model.
    pub fn resolve_path(&self, path: &str) -> Result<Endpoint, ResolveError> {
        let segments: Vec<&str> = path.split('.').collect();
        if segments.len() < 3 {
            return Err(ResolveError::TooShort { path: path.into() });
        }
        let (stage_name, machine) = segments.split_last().expect("len checked");
        let stage = StageKind::parse(stage_name).ok_or_else(|| ResolveError::NotAStage {
            path: path.into(),
            segment: (*stage_name).into(),
        })?;
        let endpoint = Endpoint::new(machine.iter().map(|s| s.to_string()).collect(), stage);
        self.resolve(&endpoint)?;
        Ok(endpoint)
    }

    /// Visits every machine in declaration order (pre-order over the
    /// sphere tree), passing the owning-sphere path segments.
    pub fn for_each_machine<'a>(&'a self, mut f: impl FnMut(&[&'a str], &'a Machine)) {
        fn walk<'a>(
            sphere: &'a Sphere,
            path: &mut Vec<&'a str>,
            f: &mut impl FnMut(&[&'a str], &'a Machine),
        ) {
            path.push(&sphere.name);
            for m in &sphere.machines {
                f(path, m);
            }
            for child in &sphere.children {
                walk(child, path, f);
            }
            path.pop();
        }
        let mut path = Vec::new();
        for root in &self.roots {
            walk(root, &mut path, &mut f);
        }
    }

    /// Visits every sphere in declaration order (pre-order), passing the
    /// path segments including the sphere itself.
    pub fn for_each_sphere<'a>(&'a self, mut f: impl FnMut(&[&'a str], &'a Sphere)) {
        fn walk<'a>(
            sphere: &'a Sphere,
            path: &mut Vec<&'a str>,
            f: &mut impl FnMut(&[&'a str], &'a Sphere),
        ) {
            path.push(&sphere.name);
            f(path, sphere);
            for child in &sphere.children {
                walk(child, path, f);
            }
            path.pop();
        }
        let mut path = Vec::new();
        for root in &self.roots {
            walk(root, &mut path, &mut f);
        }
    }
}

/// Words with fixed meaning in the textual format. Sphere, machine, and
/// thing names must avoid them.
pub const RESERVED_WORDS: [&str; 15] = [
    "sphere", "machine", "of", "stages", "flow", "trigger", "when", "note", "create", "release",
    "transfer", "arrive", "accept", "receive", "process",
];

/// True when `name` can be written as an identifier in the textual format.
pub fn is_valid_ident(name: &str) -> bool {
    let mut chars = name.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// True when `name` is usable for a sphere or machine: a valid identifier
/// that is not a reserved word.
pub fn is_usable_name(name: &str) -> bool {
    is_valid_ident(name) && !RESERVED_WORDS.contains(&name)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_model() -> Model {
        let mut outer = Sphere::new("Outer");
        outer.machines.push(Machine::new(
            "Belt",
            "Box",
            &[StageKind::Create, StageKind::Release],
        ));
        let mut inner = Sphere::new("Inner");
        inner
            .machines
            .push(Machine::new("Sink", "Box", &[StageKind::Transfer]));
        outer.children.push(inner);
        Model {
            roots: vec![outer],
            ..Model::default()
        }
    }

    #[test]
    fn resolves_nested_machine_paths() {
        let m = toy_model();
        let ep = m.resolve_path("Outer.Inner.Sink.transfer").unwrap();
        assert_eq!(ep.machine, vec!["Outer", "Inner", "Sink"]);
        assert_eq!(ep.stage, StageKind::Transfer);
        assert_eq!(m.resolve(&ep).unwrap().name, "Sink");
    }

    #[test]
    fn reports_first_unresolvable_segment() {
        let m = toy_model();
        assert_eq!(
            m.resolve_path("Outer.Nowhere.Sink.transfer"),
            Err(ResolveError::NoSuchSphere {
                path: "Outer.Nowhere.Sink".into(),
                segment: "Nowhere".into()
            })
        );
        assert_eq!(
            m.resolve_path("Outer.Belt.transfer"),
            Err(ResolveError::NoSuchStage {
                machine: "Outer.Belt".into(),
                stage: StageKind::Transfer
            })
        );
        assert_eq!(
            m.resolve_path("Outer.Belt.box"),
            Err(ResolveError::NotAStage {
                path: "Outer.Belt.box".into(),
                segment: "box".into()
            })
        );
    }

    #[test]
    fn equality_ignores_spans() {
        let mut a = toy_model();
        let b = toy_model();
        a.roots[0].span = Some(crate::span::SourceSpan::new(3, 5, 1, 4));
        a.roots[0].machines[0].span = Some(crate::span::SourceSpan::new(9, 4, 2, 3));
        assert_eq!(a, b);
    }

    #[test]
    fn name_usability() {
        assert!(is_usable_name("Manufacturer"));
        assert!(is_usable_name("order-desk_2"));
        assert!(!is_usable_name("2fast"));
        assert!(!is_usable_name("transfer"));
        assert!(!is_usable_name("machine"));
        assert!(!is_usable_name(""));
        assert!(!is_usable_name("naïve"));
    }
}
