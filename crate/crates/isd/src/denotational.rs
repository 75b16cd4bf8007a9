//! The compositional trace-set semantics, evaluated by structural recursion
//! with a length bound.
//!
//! The bound caps retained trace length, not loop unrollings: length bounds
//! compose through nested loops whereas unroll counts do not. Truncation is
//! applied at every binary combination (via the pair-skipping lifts) so
//! intermediate sets stay small; length additivity guarantees no trace
//! within the bound is lost.

use std::fmt;

use crate::scheduling::{closure_up_to, lift_up_to, Bound, SchedulingOp};
use crate::syntax::{Interaction, LoopKind, Trace, TraceSet};

/// An interaction together with the length bound to evaluate it under.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenotationRequest {
    pub interaction: Interaction,
    pub bound: Bound,
}

impl DenotationRequest {
    pub fn new(interaction: Interaction, max_len: usize) -> Self {
        DenotationRequest {
            interaction,
            bound: Bound::new(max_len),
        }
    }
}

/// Exactly the traces of the interaction's semantics that fit the bound.
pub fn traces(req: &DenotationRequest) -> TraceSet {
    eval(&req.interaction, req.bound)
}

fn eval(interaction: &Interaction, bound: Bound) -> TraceSet {
    let max_len = bound.max_len;
    match interaction {
        Interaction::Empty => TraceSet::just_empty(),
        Interaction::Act(a) => {
            if max_len >= 1 {
                TraceSet::singleton(Trace::single(a.clone()))
            } else {
                TraceSet::new()
            }
        }
        Interaction::Strict(l, r) => {
            lift_up_to(SchedulingOp::StrictSeq, &eval(l, bound), &eval(r, bound), max_len)
        }
        Interaction::Seq(l, r) => {
            lift_up_to(SchedulingOp::WeakSeq, &eval(l, bound), &eval(r, bound), max_len)
        }
        Interaction::Par(l, r) => {
            lift_up_to(SchedulingOp::Interleave, &eval(l, bound), &eval(r, bound), max_len)
        }
        Interaction::Alt(l, r) => {
            let mut out = eval(l, bound);
            out.union_with(eval(r, bound));
            out
        }
        Interaction::Loop(kind, body) => {
            let body_traces = eval(body, bound);
            let (op, restricted) = match kind {
                LoopKind::X => (SchedulingOp::StrictSeq, false),
                LoopKind::H => (SchedulingOp::WeakSeq, true),
                LoopKind::S => (SchedulingOp::WeakSeq, false),
                LoopKind::P => (SchedulingOp::Interleave, false),
            };
            closure_up_to(op, &body_traces, bound, restricted)
        }
    }
}

/// Raised by [`traces_exact`] when the term contains a loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoopInTermError;

impl fmt::Display for LoopInTermError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("exact semantics is only defined for loop-free interactions")
    }
}

impl std::error::Error for LoopInTermError {}

/// The full, finite semantics of a loop-free interaction, with no
/// truncation.
pub fn traces_exact(interaction: &Interaction) -> Result<TraceSet, LoopInTermError> {
    if interaction.contains_loop() {
        return Err(LoopInTermError);
    }
    Ok(eval(interaction, Bound::new(usize::MAX)))
}
