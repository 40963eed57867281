//! Helpers shared by the integration tests: corpus loading, a seeded
//! random model generator, and a structural well-formedness check for
//! DOT output.
#![allow(dead_code)]

use flowthing::model::{Endpoint, FlowArc, Machine, Model, Sphere, StageKind, TriggerArc};
use flowthing::sim::{parse_scenario, Scenario};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;

pub fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

pub fn read_model_file(name: &str) -> String {
    let path = models_dir().join(format!("{name}.fm"));
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

pub fn parse_model(name: &str) -> Model {
    let src = read_model_file(name);
    flowthing::dsl::parse(&src).unwrap_or_else(|e| panic!("{name}.fm does not parse: {e}"))
}

pub fn read_scenario(name: &str) -> Scenario {
    let path = models_dir().join("scenarios").join(format!("{name}.fms"));
    let src =
        std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()));
    parse_scenario(&src).unwrap_or_else(|e| panic!("{name}.fms does not parse: {e}"))
}

/// Counts (spheres, machines, stages, flows, triggers) the same way a
/// reader of the textual form would: one sphere per `sphere` block, one
/// machine per `machine` block, stages summed over `stages:` lines.
pub fn model_counts(model: &Model) -> (usize, usize, usize, usize, usize) {
    let mut spheres = 0;
    let mut machines = 0;
    let mut stages = 0;
    model.for_each_sphere(|_, sphere: &Sphere| {
        spheres += 1;
        machines += sphere.machines.len();
        stages += sphere
            .machines
            .iter()
            .map(|m| m.stages.len())
            .sum::<usize>();
    });
    (
        spheres,
        machines,
        stages,
        model.flows.len(),
        model.triggers.len(),
    )
}

const NAME_POOL: [&str; 12] = [
    "Alder", "Birch", "Cedar", "Dogwood", "Elm", "Fir", "Hazel", "Juniper", "Larch", "Maple",
    "Oak", "Pine",
];

const STAGE_POOL: [StageKind; 7] = [
    StageKind::Create,
    StageKind::Release,
    StageKind::Transfer,
    StageKind::Arrive,
    StageKind::Accept,
    StageKind::Receive,
    StageKind::Process,
];

const NOTE_POOL: [&str; 4] = [
    "plain note",
    "note with \"quotes\" inside",
    "backslash \\ and tab survive",
    "second line of context",
];

/// Builds a random model with globally unique names, so every generated
/// arc endpoint resolves unambiguously. Arcs connect arbitrary stages and
/// need not pass validation; the round-trip and renderer tests exercise
/// syntax, not legality.
pub struct ModelGen {
    rng: ChaCha8Rng,
    counter: usize,
}

impl ModelGen {
    pub fn new(seed: u64) -> Self {
        ModelGen {
            rng: ChaCha8Rng::seed_from_u64(seed),
            counter: 0,
        }
    }

    fn name(&mut self) -> String {
        let word = NAME_POOL[self.rng.random_range(0..NAME_POOL.len())];
        self.counter += 1;
        format!("{word}{}", self.counter)
    }

    fn machine(&mut self) -> Machine {
        let count = self.rng.random_range(1..=STAGE_POOL.len());
        let mut stages: Vec<StageKind> = STAGE_POOL.to_vec();
        stages.shuffle(&mut self.rng);
        stages.truncate(count);
        let mut machine = Machine::new(self.name(), self.name(), &stages);
        if self.rng.random_bool(0.3) {
            let note = NOTE_POOL[self.rng.random_range(0..NOTE_POOL.len())];
            machine.annotations.push(note.to_string());
        }
        machine
    }

    fn sphere(&mut self, depth: usize) -> Sphere {
        let mut sphere = Sphere::new(self.name());
        if self.rng.random_bool(0.3) {
            let note = NOTE_POOL[self.rng.random_range(0..NOTE_POOL.len())];
            sphere.annotations.push(note.to_string());
        }
        for _ in 0..self.rng.random_range(0..=3) {
            sphere.machines.push(self.machine());
        }
        if depth < 3 {
            for _ in 0..self.rng.random_range(0..=2) {
                sphere.children.push(self.sphere(depth + 1));
            }
        }
        sphere
    }

    pub fn model(&mut self) -> Model {
        let mut model = Model::default();
        for _ in 0..self.rng.random_range(1..=2) {
            model.roots.push(self.sphere(0));
        }
        let mut have_machine = false;
        model.for_each_machine(|_, _| have_machine = true);
        if !have_machine {
            // Guarantee at least one machine so arcs have somewhere to go.
            let machine = self.machine();
            model.roots[0].machines.push(machine);
        }
        let mut endpoints = Vec::new();
        model.for_each_machine(|path: &[&str], machine: &Machine| {
            let mut segments: Vec<String> = path.iter().map(|s| s.to_string()).collect();
            segments.push(machine.name.clone());
            for &stage in &machine.stages {
                endpoints.push(Endpoint::new(segments.clone(), stage));
            }
        });
        for _ in 0..self.rng.random_range(0..=10) {
            let src = endpoints[self.rng.random_range(0..endpoints.len())].clone();
            let dst = endpoints[self.rng.random_range(0..endpoints.len())].clone();
            let guard = self.guard();
            model.flows.push(FlowArc {
                src,
                dst,
                guard,
                span: None,
            });
        }
        for _ in 0..self.rng.random_range(0..=5) {
            let src = endpoints[self.rng.random_range(0..endpoints.len())].clone();
            let dst = endpoints[self.rng.random_range(0..endpoints.len())].clone();
            let guard = self.guard();
            model.triggers.push(TriggerArc {
                src,
                dst,
                guard,
                span: None,
            });
        }
        model
    }

    fn guard(&mut self) -> Option<String> {
        if !self.rng.random_bool(0.4) {
            return None;
        }
        let base = ["ready", "ok to ship", "has \"room\"", "really?", "x\\y"];
        let pick = base[self.rng.random_range(0..base.len())];
        if self.rng.random_bool(0.3) {
            Some(format!("!{pick}"))
        } else {
            Some(pick.to_string())
        }
    }
}

/// Structural sanity for DOT output: one digraph wrapper, balanced braces
/// and quotes, and every interior line a subgraph opener, a closer, or a
/// `;`-terminated statement.
pub fn assert_dot_well_formed(dot: &str) {
    let lines: Vec<&str> = dot.lines().collect();
    assert!(lines.len() >= 2, "dot output too short: {dot:?}");
    assert_eq!(lines[0], "digraph fm {", "missing digraph opener");
    assert_eq!(*lines.last().unwrap(), "}", "missing digraph closer");
    let mut depth = 0i64;
    for line in &lines {
        let trimmed = line.trim();
        assert_eq!(
            trimmed.matches('"').count() % 2,
            0,
            "unbalanced quotes in {trimmed:?}"
        );
        if trimmed.ends_with('{') {
            depth += 1;
        } else if trimmed == "}" {
            depth -= 1;
            assert!(depth >= 0, "brace closed at top level: {dot}");
        } else {
            assert!(
                trimmed.ends_with(';'),
                "statement missing terminator: {trimmed:?}"
            );
        }
    }
    assert_eq!(depth, 0, "unbalanced braces in dot output");
}
