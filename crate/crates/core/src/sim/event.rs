//! Events, attribute values, and the run log.

use std::collections::BTreeMap;
use std::fmt;

use crate::model::Endpoint;

/// Tokens are numbered in creation order, starting at zero.
pub type TokenId = u64;

/// An attribute value carried by a token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Int(i64),
    Text(String),
}

impl Value {
    pub fn as_int(&self) -> Option<i64> {
        match self {
            Value::Int(n) => Some(*n),
            Value::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Int(_) => None,
            Value::Text(s) => Some(s),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Text(s) => f.write_str(s),
        }
    }
}

/// Token attributes, kept sorted so dumps are stable.
pub type AttrMap = BTreeMap<String, Value>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Inject,
    Enter,
    Exit,
    TriggerFired,
    GuardEval,
    Retire,
    HandlerApplied,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Inject => "inject",
            EventKind::Enter => "enter",
            EventKind::Exit => "exit",
            EventKind::TriggerFired => "trigger_fired",
            EventKind::GuardEval => "guard_eval",
            EventKind::Retire => "retire",
            EventKind::HandlerApplied => "handler_applied",
        }
    }
}

/// One line of the run log.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Event {
    pub time: u64,
    pub token: TokenId,
    pub thing: String,
    pub endpoint: Endpoint,
    pub kind: EventKind,
    pub detail: String,
}

/// Final state of a token that left the system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RetiredToken {
    pub thing: String,
    pub endpoint: Endpoint,
    pub time: u64,
    pub attrs: AttrMap,
}

/// Everything a run produced, in emission order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EventLog {
    pub events: Vec<Event>,
    /// Named outcomes written by handlers, e.g. a signature check result.
    pub verdicts: BTreeMap<String, Value>,
    pub retired: BTreeMap<TokenId, RetiredToken>,
}

impl EventLog {
    /// Time of the last event, zero for an empty log.
    pub fn final_time(&self) -> u64 {
        self.events.iter().map(|e| e.time).max().unwrap_or(0)
    }

    pub fn retired_attrs(&self, token: TokenId) -> Option<&AttrMap> {
        self.retired.get(&token).map(|r| &r.attrs)
    }

    /// Retired tokens of one thing type, in token id order.
    pub fn retired_of_thing(&self, thing: &str) -> Vec<(TokenId, &RetiredToken)> {
        self.retired
            .iter()
            .filter(|(_, r)| r.thing == thing)
            .map(|(id, r)| (*id, r))
            .collect()
    }

    /// Tab-separated dump: a header row, one row per event, then one
    /// `verdict` row per recorded verdict. Lines end in `\n`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("time\ttoken_id\tthing_type\tendpoint\tkind\tdetail\n");
        for e in &self.events {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\n",
                e.time,
                e.token,
                escape_field(&e.thing),
                e.endpoint,
                e.kind.as_str(),
                escape_field(&e.detail)
            ));
        }
        for (key, value) in &self.verdicts {
            out.push_str(&format!(
                "verdict\t{}\t{}\n",
                escape_field(key),
                escape_field(&value.to_string())
            ));
        }
        out
    }
}

/// Attribute dump used in inject and retire details: `k=v` pairs joined
/// with `;`, already sorted because the map is.
pub fn dump_attrs(attrs: &AttrMap) -> String {
    let mut parts = Vec::with_capacity(attrs.len());
    for (k, v) in attrs {
        parts.push(format!("{k}={v}"));
    }
    parts.join(";")
}

fn escape_field(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            _ => out.push(ch),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ep(path: &str) -> Endpoint {
        let segments: Vec<&str> = path.split('.').collect();
        let (stage, machine) = segments.split_last().unwrap();
        Endpoint {
            machine: machine.iter().map(|s| s.to_string()).collect(),
            stage: crate::model::StageKind::parse(stage).unwrap(),
        }
    }

    #[test]
    fn tsv_has_header_rows_and_verdicts() {
        let mut log = EventLog::default();
        log.events.push(Event {
            time: 0,
            token: 0,
            thing: "Order".into(),
            endpoint: ep("A.M.create"),
            kind: EventKind::Inject,
            detail: "qty=3".into(),
        });
        log.verdicts
            .insert("match".into(), Value::Text("true".into()));
        let tsv = log.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "time\ttoken_id\tthing_type\tendpoint\tkind\tdetail"
        );
        assert_eq!(lines[1], "0\t0\tOrder\tA.M.create\tinject\tqty=3");
        assert_eq!(lines[2], "verdict\tmatch\ttrue");
        assert!(tsv.ends_with('\n'));
    }

    #[test]
    fn detail_escaping_keeps_rows_one_line() {
        let mut log = EventLog::default();
        log.events.push(Event {
            time: 1,
            token: 2,
            thing: "T".into(),
            endpoint: ep("A.M.process"),
            kind: EventKind::Retire,
            detail: "note=a\tb\nc\\d".into(),
        });
        let tsv = log.to_tsv();
        assert_eq!(tsv.lines().count(), 2);
        assert!(tsv.contains("note=a\\tb\\nc\\\\d"));
    }

    #[test]
    fn attr_dump_is_sorted_and_joined() {
        let mut attrs = AttrMap::new();
        attrs.insert("zeta".into(), Value::Int(1));
        attrs.insert("alpha".into(), Value::Text("x".into()));
        assert_eq!(dump_attrs(&attrs), "alpha=x;zeta=1");
        assert_eq!(dump_attrs(&AttrMap::new()), "");
    }

    #[test]
    fn verdict_rows_are_sorted_by_key() {
        let mut log = EventLog::default();
        log.verdicts.insert("b".into(), Value::Int(2));
        log.verdicts.insert("a".into(), Value::Int(1));
        let tsv = log.to_tsv();
        let lines: Vec<&str> = tsv.lines().collect();
        assert_eq!(lines[1], "verdict\ta\t1");
        assert_eq!(lines[2], "verdict\tb\t2");
    }

    #[test]
    fn final_time_is_max_event_time() {
        let mut log = EventLog::default();
        assert_eq!(log.final_time(), 0);
        for t in [3u64, 1, 2] {
            log.events.push(Event {
                time: t,
                token: 0,
                thing: "T".into(),
                endpoint: ep("A.M.create"),
                kind: EventKind::Enter,
                detail: String::new(),
            });
        }
        assert_eq!(log.final_time(), 3);
    }
}
