//! Signatures, actions, traces and interaction terms.
//!
//! Everything here is immutable after construction and safe to share across
//! threads. Canonical text renderings live on the types themselves (as
//! `Display` impls) because the orderings of traces and execution steps are
//! defined in terms of them.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

/// A lifeline or message identifier.
///
/// Lexically a letter followed by letters, digits or underscores; the parser
/// in [`crate::dsl`] enforces this, identifiers built programmatically are
/// trusted.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(name: impl AsRef<str>) -> Self {
        Ident(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

impl From<String> for Ident {
    fn from(s: String) -> Self {
        Ident::new(s)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Whether an action emits (`l!m`) or receives (`l?m`) a message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ActionKind {
    Emission,
    Reception,
}

impl ActionKind {
    pub fn symbol(self) -> char {
        match self {
            ActionKind::Emission => '!',
            ActionKind::Reception => '?',
        }
    }
}

/// An atomic communication event, localized on a single lifeline.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Action {
    pub lifeline: Ident,
    pub kind: ActionKind,
    pub message: Ident,
}

impl Action {
    pub fn new(lifeline: impl Into<Ident>, kind: ActionKind, message: impl Into<Ident>) -> Self {
        Action {
            lifeline: lifeline.into(),
            kind,
            message: message.into(),
        }
    }

    pub fn emission(lifeline: impl Into<Ident>, message: impl Into<Ident>) -> Self {
        Action::new(lifeline, ActionKind::Emission, message)
    }

    pub fn reception(lifeline: impl Into<Ident>, message: impl Into<Ident>) -> Self {
        Action::new(lifeline, ActionKind::Reception, message)
    }

    /// The lifeline on which the action occurs.
    pub fn lifeline(&self) -> &Ident {
        &self.lifeline
    }

    fn rendered_chars(&self) -> impl Iterator<Item = char> + '_ {
        self.lifeline
            .as_str()
            .chars()
            .chain(std::iter::once(self.kind.symbol()))
            .chain(self.message.as_str().chars())
    }
}

/// Actions order by their rendered form (`l!m`). This differs from the
/// field-wise order when one lifeline is a prefix of another, e.g.
/// `l1?m1` sorts after `l10!m1` field-wise but before it rendered.
impl Ord for Action {
    fn cmp(&self, other: &Self) -> Ordering {
        self.rendered_chars().cmp(other.rendered_chars())
    }
}

impl PartialOrd for Action {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}", self.lifeline, self.kind.symbol(), self.message)
    }
}

/// A finite sequence of actions; the empty trace renders as `eps`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Trace(Vec<Action>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn new(actions: Vec<Action>) -> Self {
        Trace(actions)
    }

    pub fn single(action: Action) -> Self {
        Trace(vec![action])
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn head(&self) -> Option<&Action> {
        self.0.first()
    }

    /// Everything after the first action; the empty trace yields itself.
    pub fn tail(&self) -> Trace {
        if self.0.is_empty() {
            Trace::empty()
        } else {
            Trace(self.0[1..].to_vec())
        }
    }

    pub fn prepended(&self, action: Action) -> Trace {
        let mut actions = Vec::with_capacity(self.0.len() + 1);
        actions.push(action);
        actions.extend_from_slice(&self.0);
        Trace(actions)
    }
}

impl FromIterator<Action> for Trace {
    fn from_iter<I: IntoIterator<Item = Action>>(iter: I) -> Self {
        Trace(iter.into_iter().collect())
    }
}

/// Traces order by length first, then action-wise by the rendered order of
/// [`Action`]. This is the canonical order of [`TraceSet`] iteration.
impl Ord for Trace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Trace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("eps");
        }
        for (idx, action) in self.0.iter().enumerate() {
            if idx > 0 {
                f.write_str(".")?;
            }
            write!(f, "{action}")?;
        }
        Ok(())
    }
}

/// A finite, duplicate-free set of traces in canonical order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TraceSet(BTreeSet<Trace>);

impl TraceSet {
    pub fn new() -> Self {
        TraceSet(BTreeSet::new())
    }

    /// The set containing only the empty trace.
    pub fn just_empty() -> Self {
        let mut set = BTreeSet::new();
        set.insert(Trace::empty());
        TraceSet(set)
    }

    pub fn singleton(trace: Trace) -> Self {
        let mut set = BTreeSet::new();
        set.insert(trace);
        TraceSet(set)
    }

    pub fn insert(&mut self, trace: Trace) -> bool {
        self.0.insert(trace)
    }

    pub fn contains(&self, trace: &Trace) -> bool {
        self.0.contains(trace)
    }

    pub fn contains_empty(&self) -> bool {
        self.0.contains(&Trace::empty())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Iterates in canonical order: by length, then lexicographically by
    /// action rendering.
    pub fn iter(&self) -> impl Iterator<Item = &Trace> {
        self.0.iter()
    }

    pub fn union_with(&mut self, other: TraceSet) {
        self.0.extend(other.0);
    }

    /// The subset of traces no longer than `max_len`.
    pub fn truncated(&self, max_len: usize) -> TraceSet {
        TraceSet(
            self.0
                .iter()
                .filter(|t| t.len() <= max_len)
                .cloned()
                .collect(),
        )
    }
}

impl FromIterator<Trace> for TraceSet {
    fn from_iter<I: IntoIterator<Item = Trace>>(iter: I) -> Self {
        TraceSet(iter.into_iter().collect())
    }
}

impl IntoIterator for TraceSet {
    type Item = Trace;
    type IntoIter = std::collections::btree_set::IntoIter<Trace>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl Extend<Trace> for TraceSet {
    fn extend<I: IntoIterator<Item = Trace>>(&mut self, iter: I) {
        self.0.extend(iter);
    }
}

/// The four loop constructors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LoopKind {
    /// Strict loop: every instance completes before the next starts.
    X,
    /// Head loop: the first action of the composed trace comes from the
    /// earliest unfinished instance.
    H,
    /// Weak loop: instances overlap wherever lifelines allow it.
    S,
    /// Parallel loop: instances run concurrently.
    P,
}

impl LoopKind {
    pub fn suffix(self) -> char {
        match self {
            LoopKind::X => 'X',
            LoopKind::H => 'H',
            LoopKind::S => 'S',
            LoopKind::P => 'P',
        }
    }
}

/// An interaction term. Binary constructors only; n-ary surface syntax is
/// desugared by the parser.
///
/// Children are reference-counted so that successor terms built by the
/// execution relation share structure with their source.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Interaction {
    Empty,
    Act(Action),
    Strict(Arc<Interaction>, Arc<Interaction>),
    Seq(Arc<Interaction>, Arc<Interaction>),
    Par(Arc<Interaction>, Arc<Interaction>),
    Alt(Arc<Interaction>, Arc<Interaction>),
    Loop(LoopKind, Arc<Interaction>),
}

impl Interaction {
    pub fn act(action: Action) -> Self {
        Interaction::Act(action)
    }

    pub fn strict(left: impl Into<Arc<Interaction>>, right: impl Into<Arc<Interaction>>) -> Self {
        Interaction::Strict(left.into(), right.into())
    }

    pub fn seq(left: impl Into<Arc<Interaction>>, right: impl Into<Arc<Interaction>>) -> Self {
        Interaction::Seq(left.into(), right.into())
    }

    pub fn par(left: impl Into<Arc<Interaction>>, right: impl Into<Arc<Interaction>>) -> Self {
        Interaction::Par(left.into(), right.into())
    }

    pub fn alt(left: impl Into<Arc<Interaction>>, right: impl Into<Arc<Interaction>>) -> Self {
        Interaction::Alt(left.into(), right.into())
    }

    pub fn loop_(kind: LoopKind, body: impl Into<Arc<Interaction>>) -> Self {
        Interaction::Loop(kind, body.into())
    }

    /// Number of constructor nodes; `Empty` and actions count as one.
    pub fn size(&self) -> usize {
        match self {
            Interaction::Empty | Interaction::Act(_) => 1,
            Interaction::Strict(l, r)
            | Interaction::Seq(l, r)
            | Interaction::Par(l, r)
            | Interaction::Alt(l, r) => 1 + l.size() + r.size(),
            Interaction::Loop(_, body) => 1 + body.size(),
        }
    }

    /// True iff every action in the term references lifelines and messages
    /// present in `sig`.
    pub fn is_well_formed(&self, sig: &Signature) -> bool {
        match self {
            Interaction::Empty => true,
            Interaction::Act(a) => sig.has_lifeline(&a.lifeline) && sig.has_message(&a.message),
            Interaction::Strict(l, r)
            | Interaction::Seq(l, r)
            | Interaction::Par(l, r)
            | Interaction::Alt(l, r) => l.is_well_formed(sig) && r.is_well_formed(sig),
            Interaction::Loop(_, body) => body.is_well_formed(sig),
        }
    }

    pub fn contains_loop(&self) -> bool {
        match self {
            Interaction::Empty | Interaction::Act(_) => false,
            Interaction::Strict(l, r)
            | Interaction::Seq(l, r)
            | Interaction::Par(l, r)
            | Interaction::Alt(l, r) => l.contains_loop() || r.contains_loop(),
            Interaction::Loop(_, _) => true,
        }
    }

    /// Calls `f` on every action leaf, left to right.
    pub fn for_each_action<F: FnMut(&Action)>(&self, f: &mut F) {
        match self {
            Interaction::Empty => {}
            Interaction::Act(a) => f(a),
            Interaction::Strict(l, r)
            | Interaction::Seq(l, r)
            | Interaction::Par(l, r)
            | Interaction::Alt(l, r) => {
                l.for_each_action(f);
                r.for_each_action(f);
            }
            Interaction::Loop(_, body) => body.for_each_action(f),
        }
    }
}

/// Canonical text: binary form, no sugar, `0` for the empty interaction.
impl fmt::Display for Interaction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Interaction::Empty => f.write_str("0"),
            Interaction::Act(a) => write!(f, "{a}"),
            Interaction::Strict(l, r) => write!(f, "strict({l},{r})"),
            Interaction::Seq(l, r) => write!(f, "seq({l},{r})"),
            Interaction::Par(l, r) => write!(f, "par({l},{r})"),
            Interaction::Alt(l, r) => write!(f, "alt({l},{r})"),
            Interaction::Loop(kind, body) => write!(f, "loop{}({})", kind.suffix(), body),
        }
    }
}

/// Why a declared signature was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SignatureError {
    EmptyLifelines,
    EmptyMessages,
    DuplicateLifeline(Ident),
    DuplicateMessage(Ident),
}

impl fmt::Display for SignatureError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SignatureError::EmptyLifelines => f.write_str("no lifelines declared"),
            SignatureError::EmptyMessages => f.write_str("no messages declared"),
            SignatureError::DuplicateLifeline(l) => write!(f, "duplicate lifeline `{l}`"),
            SignatureError::DuplicateMessage(m) => write!(f, "duplicate message `{m}`"),
        }
    }
}

impl std::error::Error for SignatureError {}

/// The pair of lifeline and message alphabets an interaction is defined over.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    lifelines: Vec<Ident>,
    messages: Vec<Ident>,
}

impl Signature {
    /// A declared signature: both alphabets non-empty and duplicate-free.
    pub fn new(
        lifelines: Vec<Ident>,
        messages: Vec<Ident>,
    ) -> Result<Signature, SignatureError> {
        if lifelines.is_empty() {
            return Err(SignatureError::EmptyLifelines);
        }
        if messages.is_empty() {
            return Err(SignatureError::EmptyMessages);
        }
        let mut seen = BTreeSet::new();
        for l in &lifelines {
            if !seen.insert(l.clone()) {
                return Err(SignatureError::DuplicateLifeline(l.clone()));
            }
        }
        seen.clear();
        for m in &messages {
            if !seen.insert(m.clone()) {
                return Err(SignatureError::DuplicateMessage(m.clone()));
            }
        }
        Ok(Signature {
            lifelines,
            messages,
        })
    }

    /// Infers the alphabets as exactly the identifiers appearing in the term,
    /// in sorted order. Action-free terms yield empty alphabets.
    pub fn inferred_from(interaction: &Interaction) -> Signature {
        let mut lifelines = BTreeSet::new();
        let mut messages = BTreeSet::new();
        interaction.for_each_action(&mut |a: &Action| {
            lifelines.insert(a.lifeline.clone());
            messages.insert(a.message.clone());
        });
        Signature {
            lifelines: lifelines.into_iter().collect(),
            messages: messages.into_iter().collect(),
        }
    }

    pub fn lifelines(&self) -> &[Ident] {
        &self.lifelines
    }

    pub fn messages(&self) -> &[Ident] {
        &self.messages
    }

    pub fn has_lifeline(&self, l: &Ident) -> bool {
        self.lifelines.contains(l)
    }

    pub fn has_message(&self, m: &Ident) -> bool {
        self.messages.contains(m)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(text: &str) -> Action {
        crate::dsl::parse_action(text).expect("test action")
    }

    #[test]
    fn lifeline_projection() {
        assert_eq!(a("l1!m1").lifeline().as_str(), "l1");
        assert_eq!(a("l3?m1").lifeline().as_str(), "l3");
        assert_eq!(a("l2!m2").lifeline().as_str(), "l2");
    }

    #[test]
    fn action_order_follows_rendering() {
        // `l1?m1` renders before `l10!m1` even though field-wise l1 < l10
        // would put the emission first.
        let recv = a("l1?m1");
        let emit = a("l10!m1");
        assert!(emit < recv);
        assert_eq!(
            emit.cmp(&recv),
            emit.to_string().cmp(&recv.to_string()),
        );
    }

    #[test]
    fn trace_order_is_length_then_lexicographic() {
        let short = Trace::single(a("l9!m9"));
        let long = Trace::new(vec![a("l1!m1"), a("l1!m2")]);
        assert!(short < long);
        let t1 = Trace::new(vec![a("l1!m1"), a("l1!m2")]);
        let t2 = Trace::new(vec![a("l1!m1"), a("l3?m1")]);
        assert!(t1 < t2);
    }

    #[test]
    fn trace_set_order_is_total() {
        let traces = [
            Trace::empty(),
            Trace::single(a("l1!m1")),
            Trace::single(a("l1?m1")),
            Trace::new(vec![a("l1!m1"), a("l2?m1")]),
        ];
        for (i, x) in traces.iter().enumerate() {
            for (j, y) in traces.iter().enumerate() {
                if i == j {
                    assert_eq!(x.cmp(y), Ordering::Equal);
                } else {
                    assert_ne!(x.cmp(y), Ordering::Equal);
                    assert_eq!(x.cmp(y), y.cmp(x).reverse());
                }
            }
        }
    }

    #[test]
    fn well_formed_checks_alphabets() {
        let sig = Signature::new(vec![Ident::new("l1")], vec![Ident::new("m1")]).unwrap();
        assert!(Interaction::Empty.is_well_formed(&sig));
        assert!(Interaction::act(a("l1!m1")).is_well_formed(&sig));
        assert!(!Interaction::act(a("l9!m1")).is_well_formed(&sig));
    }

    #[test]
    fn term_size_counts_nodes() {
        assert_eq!(Interaction::Empty.size(), 1);
        let two_leaves = Interaction::strict(
            Interaction::act(a("l1!m1")),
            Interaction::act(a("l3?m1")),
        );
        assert_eq!(two_leaves.size(), 3);
    }

    #[test]
    fn term_size_decreases_on_subterms() {
        let inner = Interaction::alt(Interaction::Empty, Interaction::act(a("l1!m1")));
        let outer = Interaction::loop_(LoopKind::S, inner.clone());
        assert!(inner.size() < outer.size());
        assert!(outer.size() >= 1);
    }

    #[test]
    fn signature_rejects_duplicates_and_empties() {
        assert_eq!(
            Signature::new(vec![], vec![Ident::new("m")]),
            Err(SignatureError::EmptyLifelines)
        );
        assert_eq!(
            Signature::new(vec![Ident::new("l")], vec![]),
            Err(SignatureError::EmptyMessages)
        );
        assert_eq!(
            Signature::new(
                vec![Ident::new("l"), Ident::new("l")],
                vec![Ident::new("m")]
            ),
            Err(SignatureError::DuplicateLifeline(Ident::new("l")))
        );
    }

    #[test]
    fn inferred_signature_collects_term_identifiers() {
        let term = Interaction::seq(
            Interaction::act(a("l2!m1")),
            Interaction::act(a("l1?m1")),
        );
        let sig = Signature::inferred_from(&term);
        assert_eq!(
            sig.lifelines(),
            &[Ident::new("l1"), Ident::new("l2")]
        );
        assert_eq!(sig.messages(), &[Ident::new("m1")]);
        assert!(term.is_well_formed(&sig));
        let empty = Signature::inferred_from(&Interaction::Empty);
        assert!(empty.lifelines().is_empty());
    }
}
