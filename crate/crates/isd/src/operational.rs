//! The small-step side of the semantics: termination, evasion, pruning, the
//! execution relation, trace membership and bounded trace enumeration.

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::syntax::{Action, Ident, Interaction, LoopKind, Trace, TraceSet};

/// One edge of the execution relation: consuming `action` leaves
/// `successor` to run.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Step {
    pub action: Action,
    pub successor: Interaction,
}

/// Steps order by action, then by the canonical rendering of the successor
/// term. Renderings are injective, so this agrees with structural equality.
impl Ord for Step {
    fn cmp(&self, other: &Self) -> Ordering {
        self.action.cmp(&other.action).then_with(|| {
            self.successor
                .to_string()
                .cmp(&other.successor.to_string())
        })
    }
}

impl PartialOrd for Step {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Outcome of a membership check. A witness is present exactly when the
/// verdict is positive and the trace non-empty; replaying it step by step
/// reproduces the trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub accepted: bool,
    pub witness: Option<Vec<Step>>,
}

/// True iff the interaction accepts the empty trace.
pub fn terminates(interaction: &Interaction) -> bool {
    match interaction {
        Interaction::Empty => true,
        Interaction::Act(_) => false,
        Interaction::Alt(l, r) => terminates(l) || terminates(r),
        Interaction::Strict(l, r) | Interaction::Seq(l, r) | Interaction::Par(l, r) => {
            terminates(l) && terminates(r)
        }
        Interaction::Loop(_, _) => true,
    }
}

/// True iff the interaction accepts at least one trace with no action on
/// lifeline `l`.
pub fn evades(interaction: &Interaction, l: &Ident) -> bool {
    match interaction {
        Interaction::Empty => true,
        Interaction::Act(a) => a.lifeline() != l,
        Interaction::Alt(left, right) => evades(left, l) || evades(right, l),
        Interaction::Strict(left, right)
        | Interaction::Seq(left, right)
        | Interaction::Par(left, right) => evades(left, l) && evades(right, l),
        Interaction::Loop(_, _) => true,
    }
}

/// Rewrites the interaction to the maximal sub-behavior whose traces avoid
/// lifeline `l`. Defined exactly when the interaction evades `l`; `None`
/// reports the collision.
pub fn prune(interaction: &Interaction, l: &Ident) -> Option<Interaction> {
    match interaction {
        Interaction::Empty => Some(Interaction::Empty),
        Interaction::Act(a) => {
            if a.lifeline() != l {
                Some(interaction.clone())
            } else {
                None
            }
        }
        Interaction::Strict(left, right) => Some(Interaction::strict(
            prune(left, l)?,
            prune(right, l)?,
        )),
        Interaction::Seq(left, right) => {
            Some(Interaction::seq(prune(left, l)?, prune(right, l)?))
        }
        Interaction::Par(left, right) => {
            Some(Interaction::par(prune(left, l)?, prune(right, l)?))
        }
        Interaction::Alt(left, right) => match (prune(left, l), prune(right, l)) {
            (Some(pl), Some(pr)) => Some(Interaction::alt(pl, pr)),
            (Some(pl), None) => Some(pl),
            (None, Some(pr)) => Some(pr),
            (None, None) => None,
        },
        Interaction::Loop(kind, body) => match prune(body, l) {
            Some(pruned) => Some(Interaction::loop_(*kind, pruned)),
            None => Some(Interaction::Empty),
        },
    }
}

/// The complete set of execution steps available from the interaction, in
/// canonical order and with duplicate (action, successor) pairs collapsed.
pub fn next_steps(interaction: &Interaction) -> Vec<Step> {
    let mut steps = Vec::new();
    collect_steps(interaction, &mut steps);
    steps.sort_by_cached_key(|s| (s.action.clone(), s.successor.to_string()));
    steps.dedup();
    steps
}

fn collect_steps(interaction: &Interaction, out: &mut Vec<Step>) {
    match interaction {
        Interaction::Empty => {}
        Interaction::Act(a) => out.push(Step {
            action: a.clone(),
            successor: Interaction::Empty,
        }),
        Interaction::Alt(left, right) => {
            collect_steps(left, out);
            collect_steps(right, out);
        }
        Interaction::Par(left, right) => {
            for_child_steps(left, out, |s| Interaction::par(s, right.clone()));
            for_child_steps(right, out, |s| Interaction::par(left.clone(), s));
        }
        Interaction::Strict(left, right) => {
            for_child_steps(left, out, |s| Interaction::strict(s, right.clone()));
            if terminates(left) {
                // The left side is forced to produce the empty trace, so
                // only the right's successor remains.
                collect_steps(right, out);
            }
        }
        Interaction::Seq(left, right) => {
            for_child_steps(left, out, |s| Interaction::seq(s, right.clone()));
            let mut right_steps = Vec::new();
            collect_steps(right, &mut right_steps);
            for step in right_steps {
                if let Some(pruned_left) = prune(left, step.action.lifeline()) {
                    out.push(Step {
                        action: step.action,
                        successor: Interaction::seq(pruned_left, step.successor),
                    });
                }
            }
        }
        Interaction::Loop(kind, body) => {
            let mut body_steps = Vec::new();
            collect_steps(body, &mut body_steps);
            for step in body_steps {
                let successor = match kind {
                    LoopKind::X => {
                        Interaction::strict(step.successor, interaction.clone())
                    }
                    LoopKind::H => {
                        Interaction::seq(step.successor, interaction.clone())
                    }
                    LoopKind::S => {
                        let pruned_loop = prune(interaction, step.action.lifeline())
                            .expect("loops evade every lifeline");
                        Interaction::seq(
                            pruned_loop,
                            Interaction::seq(step.successor, interaction.clone()),
                        )
                    }
                    LoopKind::P => {
                        Interaction::par(step.successor, interaction.clone())
                    }
                };
                out.push(Step {
                    action: step.action,
                    successor,
                });
            }
        }
    }
}

fn for_child_steps<F: Fn(Interaction) -> Interaction>(
    child: &Interaction,
    out: &mut Vec<Step>,
    wrap: F,
) {
    let mut child_steps = Vec::new();
    collect_steps(child, &mut child_steps);
    for step in child_steps {
        out.push(Step {
            action: step.action,
            successor: wrap(step.successor),
        });
    }
}

/// Checks whether the trace belongs to the operational semantics of the
/// interaction. Steps are tried in canonical order; the witness is the
/// first accepting step sequence.
pub fn accepts(interaction: &Interaction, trace: &Trace) -> Verdict {
    let mut path = Vec::new();
    let accepted = search(interaction, trace.actions(), &mut path);
    let witness = if accepted && !trace.is_empty() {
        Some(path)
    } else {
        None
    };
    Verdict { accepted, witness }
}

fn search(interaction: &Interaction, rest: &[Action], path: &mut Vec<Step>) -> bool {
    let Some((head, tail)) = rest.split_first() else {
        return terminates(interaction);
    };
    for step in next_steps(interaction) {
        if step.action != *head {
            continue;
        }
        path.push(step.clone());
        if search(&step.successor, tail, path) {
            return true;
        }
        path.pop();
    }
    false
}

/// All traces of the operational semantics no longer than `max_len`,
/// obtained by exploring the execution relation to that depth. Visited
/// (term, remaining depth) pairs are memoized by structural equality to
/// tame the state explosion from the loop rules.
pub fn traces_up_to(interaction: &Interaction, max_len: usize) -> TraceSet {
    let mut memo: HashMap<(Interaction, usize), TraceSet> = HashMap::new();
    explore(interaction, max_len, &mut memo)
}

fn explore(
    interaction: &Interaction,
    depth: usize,
    memo: &mut HashMap<(Interaction, usize), TraceSet>,
) -> TraceSet {
    let key = (interaction.clone(), depth);
    if let Some(cached) = memo.get(&key) {
        return cached.clone();
    }
    let mut out = TraceSet::new();
    if terminates(interaction) {
        out.insert(Trace::empty());
    }
    if depth > 0 {
        for step in next_steps(interaction) {
            let continuations = explore(&step.successor, depth - 1, memo);
            for t in continuations.iter() {
                out.insert(t.prepended(step.action.clone()));
            }
        }
    }
    memo.insert(key, out.clone());
    out
}
