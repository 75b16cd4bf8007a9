//! Trace composition under three scheduling policies, and their repetition
//! closures on finite, length-bounded trace sets.
//!
//! Strict sequencing concatenates. Interleaving shuffles two traces while
//! preserving each one's internal order. Weak sequencing lets an action of
//! the right trace move ahead only while the remaining left trace has no
//! action on the same lifeline.
//!
//! Every composition is length-additive: a member built from `t1` and `t2`
//! has length `|t1| + |t2|`. Bounded closure enumeration leans on this: a
//! pair whose combined length exceeds the bound contributes nothing within
//! it, so pairs can be skipped instead of filtered after the fact.

use std::collections::BTreeSet;

use crate::syntax::{Action, Ident, Trace, TraceSet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// The three lifted scheduling operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchedulingOp {
    StrictSeq,
    WeakSeq,
    Interleave,
}

/// Maximum trace length retained during closure enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bound {
    pub max_len: usize,
}

impl Bound {
    pub fn new(max_len: usize) -> Self {
        Bound { max_len }
    }
}

/// `t1` followed by `t2`.
pub fn concat(t1: &Trace, t2: &Trace) -> Trace {
    let mut actions = Vec::with_capacity(t1.len() + t2.len());
    actions.extend_from_slice(t1.actions());
    actions.extend_from_slice(t2.actions());
    Trace::new(actions)
}

/// True iff some action of `t` occurs on lifeline `l`. The empty trace has
/// no conflicts.
pub fn has_conflict(t: &Trace, l: &Ident) -> bool {
    t.actions().iter().any(|a| a.lifeline() == l)
}

fn slice_has_conflict(actions: &[Action], l: &Ident) -> bool {
    actions.iter().any(|a| a.lifeline() == l)
}

/// All shuffles of `t1` and `t2` preserving the relative order of each.
pub fn interleavings(t1: &Trace, t2: &Trace) -> TraceSet {
    let mut out = BTreeSet::new();
    let mut prefix = Vec::with_capacity(t1.len() + t2.len());
    shuffle(t1.actions(), t2.actions(), &mut prefix, &mut out);
    out.into_iter().collect()
}

fn shuffle(
    left: &[Action],
    right: &[Action],
    prefix: &mut Vec<Action>,
    out: &mut BTreeSet<Trace>,
) {
    match (left.split_first(), right.split_first()) {
        (None, _) => {
            let mut actions = prefix.clone();
            actions.extend_from_slice(right);
            out.insert(Trace::new(actions));
        }
        (_, None) => {
            let mut actions = prefix.clone();
            actions.extend_from_slice(left);
            out.insert(Trace::new(actions));
        }
        (Some((a1, rest1)), Some((a2, rest2))) => {
            prefix.push(a1.clone());
            shuffle(rest1, right, prefix, out);
            prefix.pop();
            prefix.push(a2.clone());
            shuffle(left, rest2, prefix, out);
            prefix.pop();
        }
    }
}

/// Weak sequencing of two traces: an action of `t2` may be scheduled before
/// the rest of `t1` only if the remaining `t1` has no conflict on its
/// lifeline.
pub fn weak_seq_traces(t1: &Trace, t2: &Trace) -> TraceSet {
    let mut out = BTreeSet::new();
    let mut prefix = Vec::with_capacity(t1.len() + t2.len());
    weak_shuffle(t1.actions(), t2.actions(), &mut prefix, &mut out);
    out.into_iter().collect()
}

fn weak_shuffle(
    left: &[Action],
    right: &[Action],
    prefix: &mut Vec<Action>,
    out: &mut BTreeSet<Trace>,
) {
    match (left.split_first(), right.split_first()) {
        (None, _) => {
            let mut actions = prefix.clone();
            actions.extend_from_slice(right);
            out.insert(Trace::new(actions));
        }
        (_, None) => {
            let mut actions = prefix.clone();
            actions.extend_from_slice(left);
            out.insert(Trace::new(actions));
        }
        (Some((a1, rest1)), Some((a2, rest2))) => {
            prefix.push(a1.clone());
            weak_shuffle(rest1, right, prefix, out);
            prefix.pop();
            if !slice_has_conflict(left, a2.lifeline()) {
                prefix.push(a2.clone());
                weak_shuffle(left, rest2, prefix, out);
                prefix.pop();
            }
        }
    }
}

fn compose_pair(op: SchedulingOp, t1: &Trace, t2: &Trace) -> TraceSet {
    match op {
        SchedulingOp::StrictSeq => TraceSet::singleton(concat(t1, t2)),
        SchedulingOp::WeakSeq => weak_seq_traces(t1, t2),
        SchedulingOp::Interleave => interleavings(t1, t2),
    }
}

/// Lifts `op` to sets: the union of the pairwise compositions. Strict
/// sequencing contributes one trace per pair.
pub fn lift(op: SchedulingOp, t1s: &TraceSet, t2s: &TraceSet) -> TraceSet {
    lift_up_to(op, t1s, t2s, usize::MAX)
}

/// As [`lift`], but pairs whose combined length exceeds `max_len` are
/// skipped. By length additivity the result is exactly the truncation of the
/// unbounded lift.
pub fn lift_up_to(op: SchedulingOp, t1s: &TraceSet, t2s: &TraceSet, max_len: usize) -> TraceSet {
    #[cfg(feature = "parallel")]
    {
        // Fan the outer set out over rayon once the pair grid is big enough
        // to amortize the scheduling overhead.
        const PAR_THRESHOLD: usize = 16384;
        if rayon::current_num_threads() > 1
            && t1s.len().saturating_mul(t2s.len()) >= PAR_THRESHOLD
        {
            return lift_par(op, t1s, t2s, max_len);
        }
    }
    lift_seq_up_to(op, t1s, t2s, max_len)
}

/// Sequential pairwise lift; the building block of [`lift_up_to`] and the
/// baseline the bench suite compares the parallel path against.
pub fn lift_seq(op: SchedulingOp, t1s: &TraceSet, t2s: &TraceSet) -> TraceSet {
    lift_seq_up_to(op, t1s, t2s, usize::MAX)
}

/// Pairwise lift fanned out over rayon unconditionally, bypassing the size
/// and thread-count heuristics of [`lift`].
#[cfg(feature = "parallel")]
pub fn lift_parallel(op: SchedulingOp, t1s: &TraceSet, t2s: &TraceSet) -> TraceSet {
    lift_par(op, t1s, t2s, usize::MAX)
}

fn lift_seq_up_to(op: SchedulingOp, t1s: &TraceSet, t2s: &TraceSet, max_len: usize) -> TraceSet {
    let mut out = TraceSet::new();
    for t1 in t1s.iter() {
        for t2 in t2s.iter() {
            if t1.len().saturating_add(t2.len()) > max_len {
                continue;
            }
            out.union_with(compose_pair(op, t1, t2));
        }
    }
    out
}

#[cfg(feature = "parallel")]
fn lift_par(op: SchedulingOp, t1s: &TraceSet, t2s: &TraceSet, max_len: usize) -> TraceSet {
    let lefts: Vec<&Trace> = t1s.iter().collect();
    lefts
        .par_iter()
        .fold(TraceSet::new, |mut acc, t1| {
            for t2 in t2s.iter() {
                if t1.len().saturating_add(t2.len()) > max_len {
                    continue;
                }
                acc.union_with(compose_pair(op, t1, t2));
            }
            acc
        })
        .reduce(TraceSet::new, |mut a, b| {
            a.union_with(b);
            a
        })
}

/// The restricted lift: keeps only those members whose first action can be
/// taken from a trace of `t1s`. A member `a.t` survives iff some `a.t1` in
/// `t1s` satisfies `t ∈ lift(op, {t1}, t2s)`; the empty trace always
/// survives.
pub fn lift_restricted(op: SchedulingOp, t1s: &TraceSet, t2s: &TraceSet) -> TraceSet {
    lift_restricted_up_to(op, t1s, t2s, usize::MAX)
}

/// As [`lift_restricted`] with pairs beyond `max_len` skipped.
pub fn lift_restricted_up_to(
    op: SchedulingOp,
    t1s: &TraceSet,
    t2s: &TraceSet,
    max_len: usize,
) -> TraceSet {
    let full = lift_up_to(op, t1s, t2s, max_len);
    // One witness set per distinct left trace: what the composition yields
    // once the left head has been consumed.
    let witnesses: Vec<(&Action, TraceSet)> = t1s
        .iter()
        .filter_map(|t1| {
            let head = t1.head()?;
            let tail_set = TraceSet::singleton(t1.tail());
            Some((head, lift_up_to(op, &tail_set, t2s, max_len)))
        })
        .collect();
    full.into_iter()
        .filter(|t| match t.head() {
            None => true,
            Some(a) => witnesses
                .iter()
                .any(|(head, rest)| *head == a && rest.contains(&t.tail())),
        })
        .collect()
}

/// The `j`-th power of `t` under `op`: `{ε}` at zero, then one more left
/// factor per step, using the restricted lift when `restricted` is set.
pub fn power(op: SchedulingOp, t: &TraceSet, j: usize, restricted: bool) -> TraceSet {
    let mut acc = TraceSet::just_empty();
    for _ in 0..j {
        acc = if restricted {
            lift_restricted(op, t, &acc)
        } else {
            lift(op, t, &acc)
        };
    }
    acc
}

/// Every closure member no longer than the bound, as the least fixpoint of
/// `S ↦ S ∪ truncate(step(t, S))` from `{ε}`. Terminates because traces of
/// bounded length over the finite alphabet of `t` form a finite universe;
/// misses nothing within the bound because composition is length-additive.
pub fn closure_up_to(op: SchedulingOp, t: &TraceSet, bound: Bound, restricted: bool) -> TraceSet {
    let mut acc = TraceSet::just_empty();
    loop {
        let step = if restricted {
            lift_restricted_up_to(op, t, &acc, bound.max_len)
        } else {
            lift_up_to(op, t, &acc, bound.max_len)
        };
        let before = acc.len();
        acc.union_with(step);
        if acc.len() == before {
            return acc;
        }
    }
}
