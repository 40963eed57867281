//! Legal stage successions for flow arcs.
//!
//! Within one machine the strict table is:
//!
//! ```text
//! create   -> process | release
//! arrive   -> accept
//! accept   -> process | release
//! receive  -> process | release
//! process  -> release
//! release  -> transfer
//! transfer -> arrive | receive
//! ```
//!
//! The lenient table adds `create -> transfer` and `process -> transfer`.
//! Between machines the only legal flow is `transfer -> transfer`,
//! regardless of ruleset. Trigger arcs are not subject to these tables.

use crate::model::{Ruleset, StageKind};

/// True when a flow arc from `src` to `dst` is legal. `same_machine`
/// selects the intra-machine table versus the inter-machine rule.
pub fn legal_successor(
    ruleset: Ruleset,
    src: StageKind,
    dst: StageKind,
    same_machine: bool,
) -> bool {
    use StageKind::*;
    if !same_machine {
        return src == Transfer && dst == Transfer;
    }
    let strict = matches!(
        (src, dst),
        (Create, Process)
            | (Create, Release)
            | (Arrive, Accept)
            | (Accept, Process)
            | (Accept, Release)
            | (Receive, Process)
            | (Receive, Release)
            | (Process, Release)
            | (Release, Transfer)
            | (Transfer, Arrive)
            | (Transfer, Receive)
    );
    match ruleset {
        Ruleset::Strict => strict,
        Ruleset::Lenient => {
            strict || matches!((src, dst), (Create, Transfer) | (Process, Transfer))
        }
    }
}
