//! Seeded generators, brute-force closure oracles, and the differential
//! suite that checks the two semantics against each other on random terms.
//!
//! Everything here is a pure function of its seed or config, so failures
//! reproduce exactly. Suite trials are independent; with the `parallel`
//! feature they fan out over rayon and are reported in seed-index order
//! either way.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::denotational::{self, DenotationRequest};
use crate::operational;
use crate::scheduling::{lift_restricted_up_to, lift_up_to, SchedulingOp};
use crate::syntax::{Action, ActionKind, Ident, Interaction, LoopKind, Signature, Trace, TraceSet};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// The term constructors a generator can choose from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Constructor {
    Empty,
    Act,
    Strict,
    Seq,
    Par,
    Alt,
    LoopX,
    LoopH,
    LoopS,
    LoopP,
}

impl Constructor {
    pub const ALL: [Constructor; 10] = [
        Constructor::Empty,
        Constructor::Act,
        Constructor::Strict,
        Constructor::Seq,
        Constructor::Par,
        Constructor::Alt,
        Constructor::LoopX,
        Constructor::LoopH,
        Constructor::LoopS,
        Constructor::LoopP,
    ];

    pub fn is_leaf(self) -> bool {
        matches!(self, Constructor::Empty | Constructor::Act)
    }

    pub fn is_loop(self) -> bool {
        matches!(
            self,
            Constructor::LoopX | Constructor::LoopH | Constructor::LoopS | Constructor::LoopP
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Constructor::Empty => "empty",
            Constructor::Act => "act",
            Constructor::Strict => "strict",
            Constructor::Seq => "seq",
            Constructor::Par => "par",
            Constructor::Alt => "alt",
            Constructor::LoopX => "loopX",
            Constructor::LoopH => "loopH",
            Constructor::LoopS => "loopS",
            Constructor::LoopP => "loopP",
        }
    }
}

/// Configuration for the term generator. Generation is a pure function of
/// this value.
#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    pub max_depth: usize,
    pub lifeline_count: usize,
    pub message_count: usize,
    pub operator_weights: BTreeMap<Constructor, f64>,
    /// Loop weights are scaled by this factor once per level below the
    /// root, keeping bounded enumeration of nested loops tractable.
    pub loop_probability_decay: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            max_depth: 4,
            lifeline_count: 3,
            message_count: 3,
            operator_weights: Constructor::ALL.iter().map(|&c| (c, 1.0)).collect(),
            loop_probability_decay: 0.5,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64) -> Self {
        GenConfig {
            seed,
            ..GenConfig::default()
        }
    }

    /// Zeroes the weight of the given constructors.
    pub fn without(mut self, constructors: &[Constructor]) -> Self {
        for c in constructors {
            self.operator_weights.insert(*c, 0.0);
        }
        self
    }

    /// The alphabets the generator draws actions from: `l1..ln`, `m1..mk`.
    pub fn signature(&self) -> Signature {
        let lifelines = (1..=self.lifeline_count)
            .map(|i| Ident::new(format!("l{i}")))
            .collect();
        let messages = (1..=self.message_count)
            .map(|i| Ident::new(format!("m{i}")))
            .collect();
        Signature::new(lifelines, messages).expect("counts are validated to be at least 1")
    }

    pub fn validate(&self) -> Result<(), GenConfigError> {
        if self.lifeline_count == 0 {
            return Err(GenConfigError::NoLifelines);
        }
        if self.message_count == 0 {
            return Err(GenConfigError::NoMessages);
        }
        if !(0.0..=1.0).contains(&self.loop_probability_decay) {
            return Err(GenConfigError::BadDecay(self.loop_probability_decay));
        }
        for (c, w) in &self.operator_weights {
            if !w.is_finite() || *w < 0.0 {
                return Err(GenConfigError::BadWeight(*c, *w));
            }
        }
        let leaf_weight: f64 = self
            .operator_weights
            .iter()
            .filter(|(c, _)| c.is_leaf())
            .map(|(_, w)| *w)
            .sum();
        if leaf_weight <= 0.0 {
            return Err(GenConfigError::NoLeafWeight);
        }
        Ok(())
    }

    fn weight(&self, c: Constructor) -> f64 {
        self.operator_weights.get(&c).copied().unwrap_or(0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenConfigError {
    NoLifelines,
    NoMessages,
    NoLeafWeight,
    BadDecay(f64),
    BadWeight(Constructor, f64),
}

impl fmt::Display for GenConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenConfigError::NoLifelines => f.write_str("lifeline_count must be at least 1"),
            GenConfigError::NoMessages => f.write_str("message_count must be at least 1"),
            GenConfigError::NoLeafWeight => {
                f.write_str("at least one leaf constructor needs positive weight")
            }
            GenConfigError::BadDecay(d) => {
                write!(f, "loop_probability_decay must lie in [0,1], got {d}")
            }
            GenConfigError::BadWeight(c, w) => {
                write!(f, "weight for {} must be finite and non-negative, got {w}", c.name())
            }
        }
    }
}

impl std::error::Error for GenConfigError {}

/// Generates a well-formed random term of depth at most `max_depth` over
/// the config's signature. Identical configs yield identical terms.
pub fn gen_interaction(cfg: &GenConfig) -> Interaction {
    cfg.validate().expect("gen_interaction needs a valid GenConfig");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    gen_node(cfg, &mut rng, cfg.max_depth, 0)
}

fn gen_node(cfg: &GenConfig, rng: &mut ChaCha8Rng, budget: usize, level: usize) -> Interaction {
    let loop_scale = cfg.loop_probability_decay.powi(level as i32);
    let choices: Vec<(Constructor, f64)> = Constructor::ALL
        .iter()
        .filter(|c| budget > 0 || c.is_leaf())
        .map(|&c| {
            let mut w = cfg.weight(c);
            if c.is_loop() {
                w *= loop_scale;
            }
            (c, w)
        })
        .filter(|(_, w)| *w > 0.0)
        .collect();
    match pick_weighted(rng, &choices) {
        Constructor::Empty => Interaction::Empty,
        Constructor::Act => Interaction::Act(gen_action(cfg, rng)),
        Constructor::Strict => {
            let l = gen_node(cfg, rng, budget - 1, level + 1);
            let r = gen_node(cfg, rng, budget - 1, level + 1);
            Interaction::strict(l, r)
        }
        Constructor::Seq => {
            let l = gen_node(cfg, rng, budget - 1, level + 1);
            let r = gen_node(cfg, rng, budget - 1, level + 1);
            Interaction::seq(l, r)
        }
        Constructor::Par => {
            let l = gen_node(cfg, rng, budget - 1, level + 1);
            let r = gen_node(cfg, rng, budget - 1, level + 1);
            Interaction::par(l, r)
        }
        Constructor::Alt => {
            let l = gen_node(cfg, rng, budget - 1, level + 1);
            let r = gen_node(cfg, rng, budget - 1, level + 1);
            Interaction::alt(l, r)
        }
        c => {
            let kind = match c {
                Constructor::LoopX => LoopKind::X,
                Constructor::LoopH => LoopKind::H,
                Constructor::LoopS => LoopKind::S,
                Constructor::LoopP => LoopKind::P,
                _ => unreachable!(),
            };
            Interaction::loop_(kind, gen_node(cfg, rng, budget - 1, level + 1))
        }
    }
}

fn pick_weighted(rng: &mut ChaCha8Rng, choices: &[(Constructor, f64)]) -> Constructor {
    let total: f64 = choices.iter().map(|(_, w)| w).sum();
    debug_assert!(total > 0.0, "a validated config keeps some leaf reachable");
    let mut roll = rng.random_range(0.0..total);
    for (c, w) in choices {
        if roll < *w {
            return *c;
        }
        roll -= w;
    }
    // Accumulated float error can leave the roll just past the last band.
    choices.last().expect("choices are never empty").0
}

fn gen_action(cfg: &GenConfig, rng: &mut ChaCha8Rng) -> Action {
    let lifeline = format!("l{}", rng.random_range(1..=cfg.lifeline_count));
    let message = format!("m{}", rng.random_range(1..=cfg.message_count));
    let kind = if rng.random_bool(0.5) {
        ActionKind::Emission
    } else {
        ActionKind::Reception
    };
    Action::new(lifeline.as_str(), kind, message.as_str())
}

/// Applies one random edit to the trace: swap two adjacent actions, drop
/// one action, or insert a duplicate of an existing action. The empty trace
/// maps to itself.
pub fn mutate_trace(trace: &Trace, seed: u64) -> Trace {
    if trace.is_empty() {
        return Trace::empty();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut actions = trace.actions().to_vec();
    let n = actions.len();
    let edit = if n >= 2 {
        rng.random_range(0..3usize)
    } else {
        rng.random_range(0..2usize)
    };
    match edit {
        0 => {
            // drop one action
            let i = rng.random_range(0..n);
            actions.remove(i);
        }
        1 => {
            // insert a duplicate of an existing action
            let copied = actions[rng.random_range(0..n)].clone();
            let at = rng.random_range(0..=n);
            actions.insert(at, copied);
        }
        _ => {
            // swap two adjacent actions
            let i = rng.random_range(0..n - 1);
            actions.swap(i, i + 1);
        }
    }
    Trace::new(actions)
}

/// Reference oracle for the bounded closures: the union of the powers of
/// `t` up to `max_power`, filtered to `max_len`.
///
/// Each rung of the ladder is truncated to `max_len` as it is built; by
/// length additivity a member within the bound only ever decomposes into
/// factors within the bound, so this is exact for the filtered result.
pub fn brute_force_closure(
    op: SchedulingOp,
    t: &TraceSet,
    max_power: usize,
    restricted: bool,
    max_len: usize,
) -> TraceSet {
    let mut out = TraceSet::just_empty();
    let mut rung = TraceSet::just_empty();
    for _ in 1..=max_power {
        rung = if restricted {
            lift_restricted_up_to(op, t, &rung, max_len)
        } else {
            lift_up_to(op, t, &rung, max_len)
        };
        let before = out.len();
        out.union_with(rung.clone());
        if out.len() == before && rung.is_empty() {
            break;
        }
    }
    out.truncated(max_len)
}

/// Parameters of one differential run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteConfig {
    pub seed: u64,
    pub cases: usize,
    pub max_depth: usize,
    pub max_len: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            cases: 500,
            max_depth: 4,
            max_len: 6,
        }
    }
}

/// A disagreement between the two semantics on one generated term.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub seed: u64,
    pub term: String,
    pub bound: usize,
    pub missing_in_operational: Vec<String>,
    pub missing_in_denotational: Vec<String>,
}

/// Outcome of one differential trial.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CaseReport {
    pub index: usize,
    pub seed: u64,
    pub term: String,
    pub trace_count: usize,
    pub discrepancy: Option<Discrepancy>,
}

/// All trials of a run, in seed-index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub cases: Vec<CaseReport>,
}

impl SuiteReport {
    pub fn total(&self) -> usize {
        self.cases.len()
    }

    pub fn agreed(&self) -> usize {
        self.cases.iter().filter(|c| c.discrepancy.is_none()).count()
    }

    pub fn all_agreed(&self) -> bool {
        self.agreed() == self.total()
    }

    pub fn discrepancies(&self) -> impl Iterator<Item = &Discrepancy> {
        self.cases.iter().filter_map(|c| c.discrepancy.as_ref())
    }
}

/// The seed of trial `index`, mixed from the root seed so trials stay
/// independent of scheduling order.
pub fn case_seed(root_seed: u64, index: usize) -> u64 {
    splitmix64(root_seed ^ splitmix64((index as u64).wrapping_add(1)))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs one trial: generate a term, enumerate both semantics to the bound,
/// and compare.
pub fn run_case(cfg: &SuiteConfig, index: usize) -> CaseReport {
    let seed = case_seed(cfg.seed, index);
    let gen_cfg = GenConfig {
        seed,
        max_depth: cfg.max_depth,
        ..GenConfig::default()
    };
    let term = gen_interaction(&gen_cfg);
    let rendered = term.to_string();
    let denotational = denotational::traces(&DenotationRequest::new(term.clone(), cfg.max_len));
    let operational = operational::traces_up_to(&term, cfg.max_len);
    let discrepancy = if denotational == operational {
        None
    } else {
        let missing_in_operational = denotational
            .iter()
            .filter(|t| !operational.contains(t))
            .map(|t| t.to_string())
            .collect();
        let missing_in_denotational = operational
            .iter()
            .filter(|t| !denotational.contains(t))
            .map(|t| t.to_string())
            .collect();
        Some(Discrepancy {
            seed,
            term: rendered.clone(),
            bound: cfg.max_len,
            missing_in_operational,
            missing_in_denotational,
        })
    };
    CaseReport {
        index,
        seed,
        term: rendered,
        trace_count: denotational.len(),
        discrepancy,
    }
}

/// Runs the differential suite; trials fan out over rayon when the
/// `parallel` feature is enabled.
pub fn run_suite(cfg: &SuiteConfig) -> SuiteReport {
    #[cfg(feature = "parallel")]
    fn gather(cfg: &SuiteConfig) -> Vec<CaseReport> {
        (0..cfg.cases)
            .into_par_iter()
            .map(|index| run_case(cfg, index))
            .collect()
    }
    #[cfg(not(feature = "parallel"))]
    fn gather(cfg: &SuiteConfig) -> Vec<CaseReport> {
        (0..cfg.cases).map(|index| run_case(cfg, index)).collect()
    }
    SuiteReport { cases: gather(cfg) }
}

/// Sequential twin of [`run_suite`]; same report, single-threaded.
pub fn run_suite_sequential(cfg: &SuiteConfig) -> SuiteReport {
    let cases = (0..cfg.cases).map(|index| run_case(cfg, index)).collect();
    SuiteReport { cases }
}
