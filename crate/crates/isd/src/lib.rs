//! An interaction language for message sequence charts and sequence
//! diagrams.
//!
//! Interactions model distributed systems by the scheduling of emission and
//! reception events on lifelines. Terms combine strict sequencing, weak
//! sequencing, parallel and alternative composition, and four kinds of
//! loops; their meaning is a set of traces. This crate implements that
//! meaning twice and ships the tooling to hold the two accountable to each
//! other:
//!
//! - [`syntax`]: signatures, actions, traces and interaction terms;
//! - [`scheduling`]: trace composition under the three scheduling policies
//!   and their bounded repetition closures;
//! - [`denotational`]: the compositional trace-set semantics;
//! - [`operational`]: termination, evasion, pruning, the small-step
//!   execution relation, membership checking and bounded enumeration;
//! - [`dsl`]: the textual surface syntax, parser and canonical printer;
//! - [`harness`]: seeded generators, brute-force closure oracles and the
//!   differential suite comparing both semantics.
//!
//! With the default `parallel` feature the pairwise trace-set products and
//! the differential suite fan out over rayon; built without it, the same
//! entry points run sequentially.

pub mod denotational;
pub mod dsl;
pub mod harness;
pub mod operational;
pub mod scheduling;
pub mod syntax;

pub use syntax::{Action, ActionKind, Ident, Interaction, LoopKind, Signature, Trace, TraceSet};
