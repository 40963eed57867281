//! The run loop: a priority queue of work items keyed by (time, token id).
//!
//! Token ids are handed out so that queue order alone fixes the execution
//! order: injections get ids sorted by (time, declaration order), duplicates
//! and newborn tokens take the next id at the moment they appear. Every
//! stage visit costs that stage's latency (default one tick); moving along
//! an arc is instantaneous.

use std::collections::BTreeMap;

use thiserror::Error;

use super::event::{dump_attrs, AttrMap, Event, EventKind, EventLog, RetiredToken, TokenId};
use super::handler::{HandlerCtx, HandlerError, HandlerRegistry};
use super::scenario::{HandlerBinding, Scenario};
use crate::model::{Endpoint, Model, StageKind};
use crate::validate::validate;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("model has validation errors; first: {first}")]
    InvalidModel { first: String },
    #[error("scenario endpoint `{path}`: {reason}")]
    BadEndpoint { path: String, reason: String },
    #[error("injections must target a create or transfer stage, not `{endpoint}`")]
    BadInjectionStage { endpoint: String },
    #[error("latency for `{endpoint}` must be at least 1")]
    BadLatency { endpoint: String },
    #[error("no handler named `{name}` (bound at `{endpoint}`)")]
    UnknownHandler { name: String, endpoint: String },
    #[error("endpoint `{endpoint}` has more than one handler binding")]
    DuplicateBinding { endpoint: String },
    #[error("guard `{label}` has no decide line in the scenario")]
    MissingDecision { label: String },
    #[error("guard `{label}` ran out of decisions after {consumed}")]
    DecisionsExhausted { label: String, consumed: usize },
    #[error("guards at `{endpoint}` selected {true_count} branches; exactly one must be true")]
    Branching { endpoint: String, true_count: usize },
    #[error("handler `{name}` failed at `{endpoint}`: {source}")]
    Handler {
        name: String,
        endpoint: String,
        source: HandlerError,
    },
    #[error("run did not finish within {max_steps} steps")]
    Nonterminated { max_steps: u64, log: Box<EventLog> },
    #[error("{count} token(s) still waiting to merge at `{endpoint}` when the queue drained")]
    StalledMerge { endpoint: String, count: usize },
}

/// Runs a scenario with the built-in handlers.
pub fn simulate(model: &Model, scenario: &Scenario) -> Result<EventLog, SimError> {
    simulate_with(model, scenario, &crate::toypki::handlers::registry())
}

/// Runs a scenario against a caller-supplied handler registry.
pub fn simulate_with(
    model: &Model,
    scenario: &Scenario,
    registry: &HandlerRegistry,
) -> Result<EventLog, SimError> {
    Sim::new(model, scenario, registry)?.run()
}

/// Where a token came from when it reached a stage. Only transfer stages
/// care: arrivals from outside the machine continue inward, arrivals from
/// the machine's own stages continue outward.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Via {
    Outside,
    Inside,
}

#[derive(Debug, Clone)]
enum Work {
    Arrive {
        node: usize,
        via: Via,
        dup_of: Option<TokenId>,
        inject: bool,
    },
    Leave {
        node: usize,
        via: Via,
    },
}

#[derive(Debug, Clone)]
struct ArcRef {
    dst: usize,
    guard: Option<String>,
    cross: bool,
}

struct StageNode {
    endpoint: Endpoint,
    machine: usize,
    kind: StageKind,
    latency: u64,
    binding: Option<HandlerBinding>,
    flows: Vec<ArcRef>,
    triggers: Vec<ArcRef>,
    /// Arrivals a merge waits for: cross in-arcs at a transfer stage,
    /// all in-arcs elsewhere.
    countable_in: usize,
}

struct MachineInfo {
    thing: String,
}

#[derive(Debug, Clone)]
struct TokenState {
    thing: String,
    attrs: AttrMap,
}

pub struct Sim<'r> {
    nodes: Vec<StageNode>,
    machines: Vec<MachineInfo>,
    tokens: Vec<TokenState>,
    queue: BTreeMap<(u64, TokenId), Work>,
    parked: BTreeMap<usize, Vec<TokenId>>,
    decisions: BTreeMap<String, (Vec<bool>, usize)>,
    registry: &'r HandlerRegistry,
    log: EventLog,
    steps: u64,
    max_steps: u64,
}

impl<'r> Sim<'r> {
    pub fn new(
        model: &Model,
        scenario: &Scenario,
        registry: &'r HandlerRegistry,
    ) -> Result<Self, SimError> {
        if let Some(first) = validate(model).iter().find(|d| d.is_error()) {
            return Err(SimError::InvalidModel {
                first: first.to_string(),
            });
        }

        let mut machines = Vec::new();
        let mut nodes: Vec<StageNode> = Vec::new();
        let mut machine_index = BTreeMap::new();
        let mut node_index = BTreeMap::new();
        model.for_each_machine(|path, m| {
            let machine = machines.len();
            let mut segments: Vec<String> = path.iter().map(|s| s.to_string()).collect();
            segments.push(m.name.clone());
            machine_index.insert(segments.join("."), machine);
            machines.push(MachineInfo {
                thing: m.thing.clone(),
            });
            for &kind in &m.stages {
                node_index.insert((machine, kind), nodes.len());
                nodes.push(StageNode {
                    endpoint: Endpoint::new(segments.clone(), kind),
                    machine,
                    kind,
                    latency: 1,
                    binding: None,
                    flows: Vec::new(),
                    triggers: Vec::new(),
                    countable_in: 0,
                });
            }
        });

        let locate = |ep: &Endpoint| -> usize {
            let machine = machine_index[&ep.machine_path()];
            node_index[&(machine, ep.stage)]
        };

        for arc in &model.flows {
            let src = locate(&arc.src);
            let dst = locate(&arc.dst);
            let cross = !arc.src.same_machine(&arc.dst);
            if nodes[dst].kind != StageKind::Transfer || cross {
                nodes[dst].countable_in += 1;
            }
            nodes[src].flows.push(ArcRef {
                dst,
                guard: arc.guard.clone(),
                cross,
            });
        }
        for arc in &model.triggers {
            let src = locate(&arc.src);
            let dst = locate(&arc.dst);
            nodes[src].triggers.push(ArcRef {
                dst,
                guard: arc.guard.clone(),
                cross: !arc.src.same_machine(&arc.dst),
            });
        }

        let resolve = |path: &str| -> Result<usize, SimError> {
            let ep = model
                .resolve_path(path)
                .map_err(|e| SimError::BadEndpoint {
                    path: path.to_string(),
                    reason: e.to_string(),
                })?;
            Ok(locate(&ep))
        };

        for (path, latency) in &scenario.latencies {
            let node = resolve(path)?;
            if *latency == 0 {
                return Err(SimError::BadLatency {
                    endpoint: nodes[node].endpoint.to_string(),
                });
            }
            nodes[node].latency = *latency;
        }

        for (path, binding) in &scenario.handlers {
            let node = resolve(path)?;
            if binding.name != "combine" && !registry.contains(&binding.name) {
                return Err(SimError::UnknownHandler {
                    name: binding.name.clone(),
                    endpoint: nodes[node].endpoint.to_string(),
                });
            }
            if nodes[node].binding.is_some() {
                return Err(SimError::DuplicateBinding {
                    endpoint: nodes[node].endpoint.to_string(),
                });
            }
            nodes[node].binding = Some(binding.clone());
        }

        // Injection ids: 0..k over all copies, ordered by (time, declaration).
        let mut slots = Vec::new();
        for (decl, inj) in scenario.injections.iter().enumerate() {
            let node = resolve(&inj.path)?;
            if !matches!(nodes[node].kind, StageKind::Create | StageKind::Transfer) {
                return Err(SimError::BadInjectionStage {
                    endpoint: nodes[node].endpoint.to_string(),
                });
            }
            for _ in 0..inj.count {
                slots.push((inj.time, decl, node));
            }
        }
        slots.sort_by_key(|&(time, decl, _)| (time, decl));

        let mut tokens = Vec::new();
        let mut queue = BTreeMap::new();
        for (time, decl, node) in slots {
            let inj = &scenario.injections[decl];
            let id = tokens.len() as TokenId;
            tokens.push(TokenState {
                thing: inj.thing.clone(),
                attrs: inj.attrs.clone(),
            });
            queue.insert(
                (time, id),
                Work::Arrive {
                    node,
                    via: Via::Outside,
                    dup_of: None,
                    inject: true,
                },
            );
        }

        Ok(Sim {
            nodes,
            machines,
            tokens,
            queue,
            parked: BTreeMap::new(),
            decisions: scenario
                .decisions
                .iter()
                .map(|(k, v)| (k.clone(), (v.clone(), 0)))
                .collect(),
            registry,
            log: EventLog::default(),
            steps: 0,
            max_steps: scenario.max_steps,
        })
    }

    /// Drains the queue and returns the log, or the first error.
    pub fn run(mut self) -> Result<EventLog, SimError> {
        while !self.queue.is_empty() {
            if self.steps >= self.max_steps {
                return Err(SimError::Nonterminated {
                    max_steps: self.max_steps,
                    log: Box::new(self.log),
                });
            }
            let ((time, token), work) = self.queue.pop_first().expect("queue nonempty");
            self.steps += 1;
            match work {
                Work::Arrive {
                    node,
                    via,
                    dup_of,
                    inject,
                } => self.arrive(time, token, node, via, dup_of, inject)?,
                Work::Leave { node, via } => self.leave(time, token, node, via)?,
            }
        }
        for (&node, waiting) in &self.parked {
            if !waiting.is_empty() {
                return Err(SimError::StalledMerge {
                    endpoint: self.nodes[node].endpoint.to_string(),
                    count: waiting.len(),
                });
            }
        }
        Ok(self.log)
    }

    fn emit(&mut self, time: u64, token: TokenId, node: usize, kind: EventKind, detail: String) {
        self.log.events.push(Event {
            time,
            token,
            thing: self.tokens[token as usize].thing.clone(),
            endpoint: self.nodes[node].endpoint.clone(),
            kind,
            detail,
        });
    }

    fn arrive(
        &mut self,
        time: u64,
        token: TokenId,
        node: usize,
        via: Via,
        dup_of: Option<TokenId>,
        inject: bool,
    ) -> Result<(), SimError> {
        if inject {
            let dump = dump_attrs(&self.tokens[token as usize].attrs);
            self.emit(time, token, node, EventKind::Inject, dump);
        }
        let detail = dup_of.map(|p| format!("dup-of={p}")).unwrap_or_default();
        self.emit(time, token, node, EventKind::Enter, detail);

        let binding = self.nodes[node].binding.clone();
        let is_transfer = self.nodes[node].kind == StageKind::Transfer;
        match binding {
            Some(b) if b.name == "combine" && !(is_transfer && via == Via::Inside) => {
                self.park_for_merge(time, token, node, via)
            }
            Some(b) if b.name != "combine" => {
                self.apply_handler(time, token, node, &b)?;
                self.schedule_leave(time, token, node, via);
                Ok(())
            }
            // Merge stages pass tokens that are already on their way out.
            _ => {
                self.schedule_leave(time, token, node, via);
                Ok(())
            }
        }
    }

    fn park_for_merge(
        &mut self,
        time: u64,
        token: TokenId,
        node: usize,
        via: Via,
    ) -> Result<(), SimError> {
        let arity = self.nodes[node].countable_in.max(1);
        let waiting = self.parked.entry(node).or_default();
        waiting.push(token);
        if waiting.len() < arity {
            return Ok(());
        }
        let group = std::mem::take(self.parked.get_mut(&node).expect("just inserted"));
        let survivor = *group.last().expect("nonempty group");
        let mut merged = AttrMap::new();
        for &id in &group {
            merged.extend(self.tokens[id as usize].attrs.clone());
        }
        let absorbed = &group[..group.len() - 1];
        for &id in absorbed {
            let dump = dump_attrs(&self.tokens[id as usize].attrs);
            self.emit(time, id, node, EventKind::Retire, dump);
            self.record_retired(time, id, node);
        }
        let thing = self.machines[self.nodes[node].machine].thing.clone();
        let state = &mut self.tokens[survivor as usize];
        state.attrs = merged;
        state.thing = thing;
        let detail = if absorbed.is_empty() {
            "combine".to_string()
        } else {
            let ids: Vec<String> = absorbed.iter().map(|id| id.to_string()).collect();
            format!("combine absorbed={}", ids.join(","))
        };
        self.emit(time, survivor, node, EventKind::HandlerApplied, detail);
        self.schedule_leave(time, survivor, node, via);
        Ok(())
    }

    fn apply_handler(
        &mut self,
        time: u64,
        token: TokenId,
        node: usize,
        binding: &HandlerBinding,
    ) -> Result<(), SimError> {
        let handler = self
            .registry
            .get(&binding.name)
            .expect("binding checked at construction");
        let endpoint = &self.nodes[node].endpoint;
        handler
            .apply(HandlerCtx {
                args: &binding.args,
                attrs: &mut self.tokens[token as usize].attrs,
                verdicts: &mut self.log.verdicts,
                endpoint,
            })
            .map_err(|source| SimError::Handler {
                name: binding.name.clone(),
                endpoint: endpoint.to_string(),
                source,
            })?;
        self.emit(
            time,
            token,
            node,
            EventKind::HandlerApplied,
            binding.name.clone(),
        );
        Ok(())
    }

    fn schedule_leave(&mut self, time: u64, token: TokenId, node: usize, via: Via) {
        let at = time + self.nodes[node].latency;
        self.queue.insert((at, token), Work::Leave { node, via });
    }

    fn leave(&mut self, time: u64, token: TokenId, node: usize, via: Via) -> Result<(), SimError> {
        self.emit(time, token, node, EventKind::Exit, String::new());

        let flows = self.nodes[node].flows.clone();
        let triggers = self.nodes[node].triggers.clone();
        let is_transfer = self.nodes[node].kind == StageKind::Transfer;
        let outward = is_transfer && via == Via::Inside;
        let candidates: Vec<&ArcRef> = flows
            .iter()
            .filter(|arc| !is_transfer || arc.cross == outward)
            .collect();

        let mut cache = BTreeMap::new();
        let mut chosen = Vec::new();
        let mut guarded_seen = 0usize;
        let mut true_guarded = Vec::new();
        for (order, arc) in candidates.iter().enumerate() {
            match &arc.guard {
                None => chosen.push((order, *arc)),
                Some(expr) => {
                    guarded_seen += 1;
                    if self.eval_guard(time, token, node, expr, &mut cache)? {
                        true_guarded.push((order, *arc));
                    }
                }
            }
        }
        if guarded_seen > 0 {
            if true_guarded.len() != 1 {
                return Err(SimError::Branching {
                    endpoint: self.nodes[node].endpoint.to_string(),
                    true_count: true_guarded.len(),
                });
            }
            chosen.push(true_guarded[0]);
            chosen.sort_by_key(|&(order, _)| order);
        }

        // Duplicates take fresh ids in arc order, before any births below.
        let mut moves = Vec::new();
        for (i, (_, arc)) in chosen.iter().enumerate() {
            let (id, dup_of) = if i == 0 {
                (token, None)
            } else {
                let id = self.tokens.len() as TokenId;
                self.tokens.push(self.tokens[token as usize].clone());
                (id, Some(token))
            };
            let next_via = if arc.cross { Via::Outside } else { Via::Inside };
            moves.push((id, arc.dst, next_via, dup_of));
        }

        for trig in &triggers {
            let fire = match &trig.guard {
                None => true,
                Some(expr) => self.eval_guard(time, token, node, expr, &mut cache)?,
            };
            if !fire {
                continue;
            }
            let dst = trig.dst;
            if self.nodes[dst].kind == StageKind::Create {
                let baby = self.tokens.len() as TokenId;
                self.tokens.push(TokenState {
                    thing: self.machines[self.nodes[dst].machine].thing.clone(),
                    attrs: self.tokens[token as usize].attrs.clone(),
                });
                let detail = format!("-> {} born={}", self.nodes[dst].endpoint, baby);
                self.emit(time, token, node, EventKind::TriggerFired, detail);
                self.queue.insert(
                    (time, baby),
                    Work::Arrive {
                        node: dst,
                        via: Via::Outside,
                        dup_of: None,
                        inject: false,
                    },
                );
            } else {
                let detail = format!("-> {}", self.nodes[dst].endpoint);
                self.emit(time, token, node, EventKind::TriggerFired, detail);
            }
        }

        if moves.is_empty() {
            let dump = dump_attrs(&self.tokens[token as usize].attrs);
            self.emit(time, token, node, EventKind::Retire, dump);
            self.record_retired(time, token, node);
        } else {
            for (id, dst, next_via, dup_of) in moves {
                self.queue.insert(
                    (time, id),
                    Work::Arrive {
                        node: dst,
                        via: next_via,
                        dup_of,
                        inject: false,
                    },
                );
            }
        }
        Ok(())
    }

    fn eval_guard(
        &mut self,
        time: u64,
        token: TokenId,
        node: usize,
        expr: &str,
        cache: &mut BTreeMap<String, bool>,
    ) -> Result<bool, SimError> {
        let (label, negate) = match expr.strip_prefix('!') {
            Some(rest) => (rest, true),
            None => (expr, false),
        };
        if !cache.contains_key(label) {
            let (list, cursor) =
                self.decisions
                    .get_mut(label)
                    .ok_or_else(|| SimError::MissingDecision {
                        label: label.to_string(),
                    })?;
            if *cursor >= list.len() {
                return Err(SimError::DecisionsExhausted {
                    label: label.to_string(),
                    consumed: *cursor,
                });
            }
            let value = list[*cursor];
            *cursor += 1;
            cache.insert(label.to_string(), value);
            self.emit(
                time,
                token,
                node,
                EventKind::GuardEval,
                format!("{label}={value}"),
            );
        }
        let value = cache[label];
        Ok(if negate { !value } else { value })
    }

    fn record_retired(&mut self, time: u64, token: TokenId, node: usize) {
        let state = &self.tokens[token as usize];
        self.log.retired.insert(
            token,
            RetiredToken {
                thing: state.thing.clone(),
                endpoint: self.nodes[node].endpoint.clone(),
                time,
                attrs: state.attrs.clone(),
            },
        );
    }
}
