//! C-bisimulations between ternary models and between first-order models,
//! the greatest C-bisimulation by refinement, and distinguishing formulas.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::models::{validate_ternary, FoModel, StateId, TernaryModel};
use crate::semantics::{eval_ternary, SemanticsError};
use crate::syntax::Formula;

/// A relation between the states of a left and a right model.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BisimRelation {
    pub pairs: BTreeSet<(StateId, StateId)>,
}

impl BisimRelation {
    pub fn new(pairs: impl IntoIterator<Item = (StateId, StateId)>) -> BisimRelation {
        BisimRelation { pairs: pairs.into_iter().collect() }
    }

    pub fn identity(n: usize) -> BisimRelation {
        BisimRelation::new((0..n).map(|s| (s, s)))
    }

    pub fn contains(&self, s1: StateId, s2: StateId) -> bool {
        self.pairs.contains(&(s1, s2))
    }

    pub fn transpose(&self) -> BisimRelation {
        BisimRelation::new(self.pairs.iter().map(|&(a, b)| (b, a)))
    }
}

/// A clause of the definition that fails at the pair `(left, right)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "clause")]
pub enum ClauseFailure {
    /// The relation has no pairs.
    Empty,
    Inv { left: StateId, right: StateId, prop: String },
    /// `left → t1` has no related `right`-successor.
    Zig { left: StateId, right: StateId, agent: String, t1: StateId },
    Zag { left: StateId, right: StateId, agent: String, t2: StateId },
    /// `left R t1 u1` has no related triple at `right`.
    KvbZig { left: StateId, right: StateId, agent: String, constant: String, t1: StateId, u1: StateId },
    KvbZag { left: StateId, right: StateId, agent: String, constant: String, t2: StateId, u2: StateId },
    /// `t1`, `u1` differ on `constant` with no related differing pair at `right`.
    KvrZig { left: StateId, right: StateId, agent: String, constant: String, t1: StateId, u1: StateId },
    KvrZag { left: StateId, right: StateId, agent: String, constant: String, t2: StateId, u2: StateId },
}

impl ClauseFailure {
    pub fn clause(&self) -> &'static str {
        match self {
            ClauseFailure::Empty => "non-empty",
            ClauseFailure::Inv { .. } => "Inv",
            ClauseFailure::Zig { .. } => "Zig",
            ClauseFailure::Zag { .. } => "Zag",
            ClauseFailure::KvbZig { .. } => "Kvb-Zig",
            ClauseFailure::KvbZag { .. } => "Kvb-Zag",
            ClauseFailure::KvrZig { .. } => "Kvr-Zig",
            ClauseFailure::KvrZag { .. } => "Kvr-Zag",
        }
    }

    fn pair(&self) -> Option<(StateId, StateId)> {
        match *self {
            ClauseFailure::Empty => None,
            ClauseFailure::Inv { left, right, .. }
            | ClauseFailure::Zig { left, right, .. }
            | ClauseFailure::Zag { left, right, .. }
            | ClauseFailure::KvbZig { left, right, .. }
            | ClauseFailure::KvbZag { left, right, .. }
            | ClauseFailure::KvrZig { left, right, .. }
            | ClauseFailure::KvrZag { left, right, .. } => Some((left, right)),
        }
    }
}

impl ClauseFailure {
    /// Human-readable description with state names supplied by the caller.
    pub fn describe(&self, left: &[String], right: &[String]) -> String {
        let l = |s: StateId| left.get(s).cloned().unwrap_or_else(|| s.to_string());
        let r = |s: StateId| right.get(s).cloned().unwrap_or_else(|| s.to_string());
        let Some((s1, s2)) = self.pair() else {
            return "relation is empty".to_string();
        };
        let head = format!("{} fails at ({}, {})", self.clause(), l(s1), r(s2));
        let tail = match self {
            ClauseFailure::Inv { prop, .. } => format!(" on `{prop}`"),
            ClauseFailure::Zig { agent, t1, .. } => format!(": {} -{agent}-> {}", l(s1), l(*t1)),
            ClauseFailure::Zag { agent, t2, .. } => format!(": {} -{agent}-> {}", r(s2), r(*t2)),
            ClauseFailure::KvbZig { agent, constant, t1, u1, .. }
            | ClauseFailure::KvrZig { agent, constant, t1, u1, .. } => {
                format!(": left pair ({}, {}) for {agent},{constant}", l(*t1), l(*u1))
            }
            ClauseFailure::KvbZag { agent, constant, t2, u2, .. }
            | ClauseFailure::KvrZag { agent, constant, t2, u2, .. } => {
                format!(": right pair ({}, {}) for {agent},{constant}", r(*t2), r(*u2))
            }
            ClauseFailure::Empty => String::new(),
        };
        head + &tail
    }
}

impl fmt::Display for ClauseFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.describe(&[], &[]))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BisimError {
    #[error("{side} model violates frame conditions: {first}")]
    Invalid { side: &'static str, first: String },
    #[error("state index {0} out of range")]
    StateOutOfRange(StateId),
    #[error("the states are C-bisimilar; no formula distinguishes them")]
    Bisimilar,
    #[error("constructed formula `{0}` failed verification")]
    Unverified(String),
    #[error(transparent)]
    Eval(#[from] SemanticsError),
}

fn agents_of<'a>(a: &'a crate::syntax::Vocabulary, b: &'a crate::syntax::Vocabulary) -> BTreeSet<&'a String> {
    a.agents().iter().chain(b.agents()).collect()
}

fn keys_of<'a>(m1: &'a TernaryModel, m2: &'a TernaryModel) -> BTreeSet<(&'a str, &'a str)> {
    let mut keys = BTreeSet::new();
    for v in [&m1.vocab, &m2.vocab] {
        for a in v.agents() {
            for c in v.constants() {
                keys.insert((a.as_str(), c.as_str()));
            }
        }
    }
    keys
}

/// Failing clause instances at `(s1, s2)` against `z`, in the order Inv,
/// Zig, Zag, Kvb-Zig, Kvb-Zag; with `first_only` the scan stops at the first.
fn failures_at(
    m1: &TernaryModel,
    m2: &TernaryModel,
    z: &BisimRelation,
    s1: StateId,
    s2: StateId,
    first_only: bool,
) -> Vec<ClauseFailure> {
    let (left, right) = (s1, s2);
    let mut out = Vec::new();
    macro_rules! push {
        ($f:expr) => {{
            out.push($f);
            if first_only {
                return out;
            }
        }};
    }
    for p in m1.val[s1].symmetric_difference(&m2.val[s2]) {
        push!(ClauseFailure::Inv { left, right, prop: p.clone() });
    }
    for agent in agents_of(&m1.vocab, &m2.vocab) {
        let (succ1, succ2) = (m1.successors(agent, s1), m2.successors(agent, s2));
        for &t1 in &succ1 {
            if !succ2.iter().any(|&t2| z.contains(t1, t2)) {
                push!(ClauseFailure::Zig { left, right, agent: agent.clone(), t1 });
            }
        }
        for &t2 in &succ2 {
            if !succ1.iter().any(|&t1| z.contains(t1, t2)) {
                push!(ClauseFailure::Zag { left, right, agent: agent.clone(), t2 });
            }
        }
    }
    for (agent, constant) in keys_of(m1, m2) {
        let (r1, r2) = (m1.triples_at(agent, constant, s1), m2.triples_at(agent, constant, s2));
        for &(t1, u1) in &r1 {
            if !r2.iter().any(|&(t2, u2)| z.contains(t1, t2) && z.contains(u1, u2)) {
                push!(ClauseFailure::KvbZig { left, right, agent: agent.into(), constant: constant.into(), t1, u1 });
            }
        }
        for &(t2, u2) in &r2 {
            if !r1.iter().any(|&(t1, u1)| z.contains(t1, t2) && z.contains(u1, u2)) {
                push!(ClauseFailure::KvbZag { left, right, agent: agent.into(), constant: constant.into(), t2, u2 });
            }
        }
    }
    out
}

/// Every failing clause instance of `z`; empty iff `z` is a C-bisimulation.
pub fn check_bisimulation(m1: &TernaryModel, m2: &TernaryModel, z: &BisimRelation) -> Vec<ClauseFailure> {
    if z.pairs.is_empty() {
        return vec![ClauseFailure::Empty];
    }
    z.pairs.iter().flat_map(|&(s1, s2)| failures_at(m1, m2, z, s1, s2, false)).collect()
}

/// Every failing clause instance of `z` between first-order models.
pub fn check_fo_bisimulation(f1: &FoModel, f2: &FoModel, z: &BisimRelation) -> Vec<ClauseFailure> {
    if z.pairs.is_empty() {
        return vec![ClauseFailure::Empty];
    }
    let mut out = Vec::new();
    let constants: BTreeSet<&String> = f1.vocab.constants().iter().chain(f2.vocab.constants()).collect();
    for &(left, right) in &z.pairs {
        for p in f1.val[left].symmetric_difference(&f2.val[right]) {
            out.push(ClauseFailure::Inv { left, right, prop: p.clone() });
        }
        for agent in agents_of(&f1.vocab, &f2.vocab) {
            let (succ1, succ2) = (f1.successors(agent, left), f2.successors(agent, right));
            for &t1 in &succ1 {
                if !succ2.iter().any(|&t2| z.contains(t1, t2)) {
                    out.push(ClauseFailure::Zig { left, right, agent: agent.clone(), t1 });
                }
            }
            for &t2 in &succ2 {
                if !succ1.iter().any(|&t1| z.contains(t1, t2)) {
                    out.push(ClauseFailure::Zag { left, right, agent: agent.clone(), t2 });
                }
            }
        }
        for agent in agents_of(&f1.vocab, &f2.vocab) {
            let (succ1, succ2) = (f1.successors(agent, left), f2.successors(agent, right));
            for &c in &constants {
                let differ1 = |t: StateId, u: StateId| f1.value(c, t) != f1.value(c, u);
                let differ2 = |t: StateId, u: StateId| f2.value(c, t) != f2.value(c, u);
                for &t1 in &succ1 {
                    for &u1 in &succ1 {
                        let matched = succ2.iter().any(|&t2| {
                            succ2.iter().any(|&u2| z.contains(t1, t2) && z.contains(u1, u2) && differ2(t2, u2))
                        });
                        if differ1(t1, u1) && !matched {
                            out.push(ClauseFailure::KvrZig { left, right, agent: agent.clone(), constant: c.clone(), t1, u1 });
                        }
                    }
                }
                for &t2 in &succ2 {
                    for &u2 in &succ2 {
                        let matched = succ1.iter().any(|&t1| {
                            succ1.iter().any(|&u1| z.contains(t1, t2) && z.contains(u1, u2) && differ1(t1, u1))
                        });
                        if differ2(t2, u2) && !matched {
                            out.push(ClauseFailure::KvrZag { left, right, agent: agent.clone(), constant: c.clone(), t2, u2 });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Outcome of refinement: the greatest C-bisimulation and, for every pair
/// outside it, the round and clause that removed it. Round 0 is the Inv
/// filter.
#[derive(Clone, Debug)]
pub struct Refinement {
    pub relation: BisimRelation,
    pub removed: BTreeMap<(StateId, StateId), (usize, ClauseFailure)>,
    pub rounds: usize,
}

/// Greatest C-bisimulation between two models (possibly with no pairs).
///
/// Starts from all pairs agreeing on propositions and removes, in each
/// round, every pair failing a clause against the previous round's relation.
pub fn greatest_bisim(m1: &TernaryModel, m2: &TernaryModel) -> Refinement {
    let mut z = BisimRelation::default();
    let mut removed = BTreeMap::new();
    for s1 in 0..m1.len() {
        for s2 in 0..m2.len() {
            if let Some(p) = m1.val[s1].symmetric_difference(&m2.val[s2]).next() {
                removed.insert((s1, s2), (0, ClauseFailure::Inv { left: s1, right: s2, prop: p.clone() }));
            } else {
                z.pairs.insert((s1, s2));
            }
        }
    }
    let mut rounds = 0;
    loop {
        let failures: Vec<ClauseFailure> = z
            .pairs
            .iter()
            .filter_map(|&(s1, s2)| failures_at(m1, m2, &z, s1, s2, true).pop())
            .collect();
        if failures.is_empty() {
            break;
        }
        rounds += 1;
        for f in failures {
            let pair = f.pair().expect("pair failure");
            z.pairs.remove(&pair);
            removed.insert(pair, (rounds, f));
        }
    }
    Refinement { relation: z, removed, rounds }
}

impl Refinement {
    /// The relation as it stood at the start of `round`.
    fn related_before(&self, round: usize, s1: StateId, s2: StateId) -> bool {
        match self.removed.get(&(s1, s2)) {
            None => true,
            Some(&(r, _)) => r >= round,
        }
    }

    /// A formula true at `m1, s1` and false at `m2, s2`, built by replaying
    /// the round that removed the pair, then checked by evaluation.
    pub fn distinguishing_formula(
        &self,
        m1: &TernaryModel,
        s1: StateId,
        m2: &TernaryModel,
        s2: StateId,
    ) -> Result<Formula, BisimError> {
        for (side, m) in [("left", m1), ("right", m2)] {
            if let Some(v) = validate_ternary(m).first() {
                return Err(BisimError::Invalid { side, first: v.to_string() });
            }
        }
        if s1 >= m1.len() {
            return Err(BisimError::StateOutOfRange(s1));
        }
        if s2 >= m2.len() {
            return Err(BisimError::StateOutOfRange(s2));
        }
        if self.relation.contains(s1, s2) {
            return Err(BisimError::Bisimilar);
        }
        let mut memo = HashMap::new();
        let f = self.delta(m1, m2, s1, s2, &mut memo);
        if eval_ternary(m1, s1, &f)? && !eval_ternary(m2, s2, &f)? {
            Ok(f)
        } else {
            Err(BisimError::Unverified(f.to_string()))
        }
    }

    fn delta(
        &self,
        m1: &TernaryModel,
        m2: &TernaryModel,
        s1: StateId,
        s2: StateId,
        memo: &mut HashMap<(StateId, StateId), Formula>,
    ) -> Formula {
        if let Some(f) = memo.get(&(s1, s2)) {
            return f.clone();
        }
        let (round, failure) = &self.removed[&(s1, s2)];
        let round = *round;
        let unrelated = |t1: StateId, t2: StateId| !self.related_before(round, t1, t2);
        let f = match failure {
            ClauseFailure::Inv { prop, .. } => {
                if m1.val[s1].contains(prop) {
                    Formula::prop(prop.clone())
                } else {
                    Formula::neg(Formula::prop(prop.clone()))
                }
            }
            ClauseFailure::Zig { agent, t1, .. } => {
                let parts: BTreeSet<Formula> = m2
                    .successors(agent, s2)
                    .into_iter()
                    .map(|t2| self.delta(m1, m2, *t1, t2, memo))
                    .collect();
                Formula::dia(agent.clone(), Formula::conj(parts))
            }
            ClauseFailure::Zag { agent, t2, .. } => {
                let parts: BTreeSet<Formula> = m1
                    .successors(agent, s1)
                    .into_iter()
                    .map(|t1| self.delta(m1, m2, t1, *t2, memo))
                    .collect();
                Formula::boxed(agent.clone(), Formula::disj(parts))
            }
            ClauseFailure::KvbZig { agent, constant, t1, u1, .. } => {
                let (mut alpha, mut beta) = (BTreeSet::new(), BTreeSet::new());
                for (t2, u2) in m2.triples_at(agent, constant, s2) {
                    if unrelated(*t1, t2) {
                        alpha.insert(self.delta(m1, m2, *t1, t2, memo));
                    } else {
                        debug_assert!(unrelated(*u1, u2));
                        beta.insert(self.delta(m1, m2, *u1, u2, memo));
                    }
                }
                Formula::dia_b(agent.clone(), constant.clone(), Formula::conj(alpha), Formula::conj(beta))
            }
            ClauseFailure::KvbZag { agent, constant, t2, u2, .. } => {
                let (mut alpha, mut beta) = (BTreeSet::new(), BTreeSet::new());
                for (t1, u1) in m1.triples_at(agent, constant, s1) {
                    if unrelated(t1, *t2) {
                        alpha.insert(self.delta(m1, m2, t1, *t2, memo));
                    } else {
                        debug_assert!(unrelated(u1, *u2));
                        beta.insert(self.delta(m1, m2, u1, *u2, memo));
                    }
                }
                Formula::bbox_b(agent.clone(), constant.clone(), Formula::disj(alpha), Formula::disj(beta))
            }
            ClauseFailure::Empty | ClauseFailure::KvrZig { .. } | ClauseFailure::KvrZag { .. } => {
                unreachable!("not produced by refinement")
            }
        };
        memo.insert((s1, s2), f.clone());
        f
    }
}

/// Convenience wrapper: refine, then extract a formula for `(s1, s2)`.
pub fn distinguishing_formula(
    m1: &TernaryModel,
    s1: StateId,
    m2: &TernaryModel,
    s2: StateId,
) -> Result<Formula, BisimError> {
    greatest_bisim(m1, m2).distinguishing_formula(m1, s1, m2, s2)
}
