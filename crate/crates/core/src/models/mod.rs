//! Ternary-relation models, first-order Kripke models, frame-condition
//! validation and random generation.

mod gen;
mod json;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::syntax::{SyntaxError, Vocabulary};

pub use gen::{close_and_repair, generate_direct, generate_value_induced, GenParams};
pub use json::{LoadReport, Model};

pub type StateId = usize;
pub type Triple = (StateId, StateId, StateId);
/// Binary accessibility per agent.
pub type Relations = BTreeMap<String, BTreeSet<(StateId, StateId)>>;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unknown {kind} `{name}`")]
    UnknownSymbol { kind: &'static str, name: String },
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("state index {0} out of range")]
    StateOutOfRange(StateId),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("model has no states")]
    NoStates,
    #[error("no value for constant `{constant}` at state `{state}`")]
    MissingValue { constant: String, state: String },
    #[error("value `{0}` is not in the domain")]
    UnknownValue(String),
    #[error("empty value domain")]
    EmptyDomain,
    #[error("malformed model file: {0}")]
    Format(String),
    #[error("invalid generation parameters: {0}")]
    Params(String),
    #[error(transparent)]
    Vocabulary(#[from] SyntaxError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A Kripke model with per-agent binary relations and per-(agent, constant)
/// ternary relations. Triples are stored as written; [`validate_ternary`]
/// checks that both orientations are present.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TernaryModel {
    pub vocab: Vocabulary,
    pub states: Vec<String>,
    pub rel: BTreeMap<String, BTreeSet<(StateId, StateId)>>,
    pub tern: BTreeMap<(String, String), BTreeSet<Triple>>,
    pub val: Vec<BTreeSet<String>>,
}

/// A first-order Kripke model: constant domain, binary relations, and a value
/// for every constant at every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FoModel {
    pub vocab: Vocabulary,
    pub states: Vec<String>,
    pub domain: Vec<String>,
    pub rel: BTreeMap<String, BTreeSet<(StateId, StateId)>>,
    pub val: Vec<BTreeSet<String>>,
    /// constant → value index (into `domain`) per state
    pub vc: BTreeMap<String, Vec<usize>>,
}

fn state_index(states: &[String], name: &str) -> Result<StateId, ModelError> {
    states
        .iter()
        .position(|s| s == name)
        .ok_or_else(|| ModelError::UnknownState(name.to_string()))
}

fn check_states(states: &[String]) -> Result<(), ModelError> {
    if states.is_empty() {
        return Err(ModelError::NoStates);
    }
    for (k, s) in states.iter().enumerate() {
        if states[..k].contains(s) {
            return Err(ModelError::DuplicateState(s.clone()));
        }
    }
    Ok(())
}

fn check_frame(
    vocab: &Vocabulary,
    n: usize,
    rel: &BTreeMap<String, BTreeSet<(StateId, StateId)>>,
    val: &[BTreeSet<String>],
) -> Result<(), ModelError> {
    for (agent, edges) in rel {
        if vocab.agent_index(agent).is_none() {
            return Err(ModelError::UnknownSymbol { kind: "agent", name: agent.clone() });
        }
        if let Some(&(s, t)) = edges.iter().find(|&&(s, t)| s >= n || t >= n) {
            return Err(ModelError::StateOutOfRange(s.max(t)));
        }
    }
    if val.len() != n {
        return Err(ModelError::Format(format!("valuation covers {} of {n} states", val.len())));
    }
    for props in val {
        if let Some(p) = props.iter().find(|p| vocab.prop_index(p).is_none()) {
            return Err(ModelError::UnknownSymbol { kind: "proposition", name: p.clone() });
        }
    }
    Ok(())
}

fn successors_of(rel: &BTreeMap<String, BTreeSet<(StateId, StateId)>>, agent: &str, s: StateId) -> Vec<StateId> {
    rel.get(agent)
        .map(|edges| edges.range((s, 0)..(s + 1, 0)).map(|&(_, t)| t).collect())
        .unwrap_or_default()
}

impl TernaryModel {
    /// A model over `states` with empty relations and valuation.
    pub fn new<S: Into<String>>(vocab: Vocabulary, states: impl IntoIterator<Item = S>) -> TernaryModel {
        let states: Vec<String> = states.into_iter().map(Into::into).collect();
        let val = vec![BTreeSet::new(); states.len()];
        TernaryModel {
            vocab,
            states,
            rel: BTreeMap::new(),
            tern: BTreeMap::new(),
            val,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, name: &str) -> Result<StateId, ModelError> {
        state_index(&self.states, name)
    }

    pub fn add_edge(&mut self, agent: &str, s: StateId, t: StateId) {
        self.rel.entry(agent.to_string()).or_default().insert((s, t));
    }

    pub fn has_edge(&self, agent: &str, s: StateId, t: StateId) -> bool {
        self.rel.get(agent).is_some_and(|e| e.contains(&(s, t)))
    }

    /// Inserts `sR tu` only, without its mirror image.
    pub fn add_triple(&mut self, agent: &str, constant: &str, triple: Triple) {
        self.tern
            .entry((agent.to_string(), constant.to_string()))
            .or_default()
            .insert(triple);
    }

    /// Inserts `sR tu` and `sR ut`.
    pub fn add_triple_sym(&mut self, agent: &str, constant: &str, (s, t, u): Triple) {
        self.add_triple(agent, constant, (s, t, u));
        self.add_triple(agent, constant, (s, u, t));
    }

    pub fn has_triple(&self, agent: &str, constant: &str, triple: Triple) -> bool {
        self.tern
            .get(&(agent.to_string(), constant.to_string()))
            .is_some_and(|ts| ts.contains(&triple))
    }

    pub fn set_prop(&mut self, s: StateId, p: &str) {
        self.val[s].insert(p.to_string());
    }

    pub fn successors(&self, agent: &str, s: StateId) -> Vec<StateId> {
        successors_of(&self.rel, agent, s)
    }

    /// Pairs `(t, u)` with `sR_i^c tu`.
    pub fn triples_at(&self, agent: &str, constant: &str, s: StateId) -> Vec<(StateId, StateId)> {
        self.tern
            .get(&(agent.to_string(), constant.to_string()))
            .map(|ts| ts.range((s, 0, 0)..(s + 1, 0, 0)).map(|&(_, t, u)| (t, u)).collect())
            .unwrap_or_default()
    }

    pub fn triple_count(&self) -> usize {
        self.tern.values().map(BTreeSet::len).sum()
    }

    /// Symbols and state indices are all declared.
    pub fn check_well_formed(&self) -> Result<(), ModelError> {
        check_states(&self.states)?;
        check_frame(&self.vocab, self.len(), &self.rel, &self.val)?;
        for ((agent, constant), triples) in &self.tern {
            if self.vocab.agent_index(agent).is_none() {
                return Err(ModelError::UnknownSymbol { kind: "agent", name: agent.clone() });
            }
            if self.vocab.constant_index(constant).is_none() {
                return Err(ModelError::UnknownSymbol { kind: "constant", name: constant.clone() });
            }
            if let Some(&(s, t, u)) = triples.iter().find(|&&(s, t, u)| s.max(t).max(u) >= self.len()) {
                return Err(ModelError::StateOutOfRange(s.max(t).max(u)));
            }
        }
        Ok(())
    }

    /// Adds every missing mirror triple; returns how many were added.
    pub fn close_symmetric(&mut self) -> usize {
        let mut added = 0;
        for triples in self.tern.values_mut() {
            let mirrors: Vec<Triple> = triples.iter().map(|&(s, t, u)| (s, u, t)).collect();
            for m in mirrors {
                if triples.insert(m) {
                    added += 1;
                }
            }
        }
        added
    }
}

impl FoModel {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, name: &str) -> Result<StateId, ModelError> {
        state_index(&self.states, name)
    }

    pub fn successors(&self, agent: &str, s: StateId) -> Vec<StateId> {
        successors_of(&self.rel, agent, s)
    }

    pub fn value(&self, constant: &str, s: StateId) -> Option<usize> {
        self.vc.get(constant).and_then(|vals| vals.get(s).copied())
    }

    pub fn check_well_formed(&self) -> Result<(), ModelError> {
        check_states(&self.states)?;
        check_frame(&self.vocab, self.len(), &self.rel, &self.val)?;
        if self.domain.is_empty() {
            return Err(ModelError::EmptyDomain);
        }
        for c in self.vocab.constants() {
            let vals = self.vc.get(c).ok_or_else(|| ModelError::MissingValue {
                constant: c.clone(),
                state: self.states[0].clone(),
            })?;
            if vals.len() != self.len() {
                return Err(ModelError::MissingValue {
                    constant: c.clone(),
                    state: self.states[vals.len().min(self.len() - 1)].clone(),
                });
            }
            if let Some(&v) = vals.iter().find(|&&v| v >= self.domain.len()) {
                return Err(ModelError::UnknownValue(v.to_string()));
            }
        }
        if let Some(c) = self.vc.keys().find(|c| self.vocab.constant_index(c).is_none()) {
            return Err(ModelError::UnknownSymbol { kind: "constant", name: c.clone() });
        }
        Ok(())
    }
}

/// A breach of one of the three ternary frame conditions.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    /// `sR tu` holds but `sR ut` does not.
    Sym { agent: String, constant: String, triple: Triple },
    /// `sR tu` holds but `s→t` or `s→u` is missing.
    Incl { agent: String, constant: String, triple: Triple },
    /// `sR tu` and `s→v`, yet neither `sR tv` nor `sR uv`.
    Ateuc { agent: String, constant: String, triple: Triple, v: StateId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Sym { agent, constant, triple: (s, t, u) } => {
                write!(f, "SYM {agent},{constant}: ({s},{t},{u}) without ({s},{u},{t})")
            }
            Violation::Incl { agent, constant, triple: (s, t, u) } => {
                write!(f, "INCL {agent},{constant}: ({s},{t},{u}) lacks an {agent}-edge")
            }
            Violation::Ateuc { agent, constant, triple: (s, t, u), v } => {
                write!(f, "ATEUC {agent},{constant}: ({s},{t},{u}) with {s}->{v} but neither ({s},{t},{v}) nor ({s},{u},{v})")
            }
        }
    }
}

impl Violation {
    pub fn condition(&self) -> &'static str {
        match self {
            Violation::Sym { .. } => "SYM",
            Violation::Incl { .. } => "INCL",
            Violation::Ateuc { .. } => "ATEUC",
        }
    }
}

/// Checks SYM, INCL and ATEUC for every agent and constant of the vocabulary.
/// The result is empty exactly when the model is a valid ternary model.
pub fn validate_ternary(m: &TernaryModel) -> Vec<Violation> {
    let no_edges = BTreeSet::new();
    let mut out = Vec::new();
    for ((agent, constant), triples) in &m.tern {
        let edges = m.rel.get(agent).unwrap_or(&no_edges);
        for &(s, t, u) in triples {
            if !triples.contains(&(s, u, t)) {
                out.push(Violation::Sym { agent: agent.clone(), constant: constant.clone(), triple: (s, t, u) });
            }
            if !edges.contains(&(s, t)) || !edges.contains(&(s, u)) {
                out.push(Violation::Incl { agent: agent.clone(), constant: constant.clone(), triple: (s, t, u) });
            }
            for &(_, v) in edges.range((s, 0)..(s + 1, 0)) {
                if !triples.contains(&(s, t, v)) && !triples.contains(&(s, u, v)) {
                    out.push(Violation::Ateuc { agent: agent.clone(), constant: constant.clone(), triple: (s, t, u), v });
                }
            }
        }
    }
    out
}

/// The value-induced ternary model: `sR_i^c tu` iff `s→t`, `s→u` and
/// the value of `c` differs at `t` and `u`.
pub fn derive_ternary(f: &FoModel) -> TernaryModel {
    let mut m = TernaryModel {
        vocab: f.vocab.clone(),
        states: f.states.clone(),
        rel: f.rel.clone(),
        tern: BTreeMap::new(),
        val: f.val.clone(),
    };
    for agent in f.vocab.agents() {
        for s in 0..f.len() {
            let succ = f.successors(agent, s);
            for c in f.vocab.constants() {
                for &t in &succ {
                    for &u in &succ {
                        if f.value(c, t) != f.value(c, u) {
                            m.add_triple(agent, c, (s, t, u));
                        }
                    }
                }
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab() -> Vocabulary {
        Vocabulary::new(["a"], ["p", "q"], ["c"]).unwrap()
    }

    /// s→t,u,v with R = SYM closure of {(s,t,u),(s,u,v)}; t,u: p; v: q.
    fn three_successors() -> TernaryModel {
        let mut m = TernaryModel::new(vocab(), ["s", "t", "u", "v"]);
        for t in 1..4 {
            m.add_edge("a", 0, t);
        }
        m.add_triple_sym("a", "c", (0, 1, 2));
        m.add_triple_sym("a", "c", (0, 2, 3));
        m.set_prop(1, "p");
        m.set_prop(2, "p");
        m.set_prop(3, "q");
        m
    }

    #[test]
    fn three_successors_model_is_valid() {
        assert_eq!(validate_ternary(&three_successors()), vec![]);
    }

    #[test]
    fn missing_edge_is_an_incl_violation() {
        let mut m = TernaryModel::new(vocab(), ["s", "t", "u"]);
        m.add_edge("a", 0, 1);
        m.add_triple_sym("a", "c", (0, 1, 2));
        let v = validate_ternary(&m);
        assert!(v.contains(&Violation::Incl {
            agent: "a".into(),
            constant: "c".into(),
            triple: (0, 1, 2)
        }));
        assert!(v.iter().all(|x| x.condition() == "INCL"));
    }

    #[test]
    fn unrelated_successor_is_an_ateuc_violation() {
        let mut m = TernaryModel::new(vocab(), ["s", "t", "u", "v"]);
        for t in 1..4 {
            m.add_edge("a", 0, t);
        }
        m.add_triple_sym("a", "c", (0, 1, 2));
        let v = validate_ternary(&m);
        assert!(v.contains(&Violation::Ateuc {
            agent: "a".into(),
            constant: "c".into(),
            triple: (0, 1, 2),
            v: 3
        }));
        assert!(v.iter().all(|x| x.condition() == "ATEUC"));
    }

    #[test]
    fn one_sided_triple_is_a_sym_violation() {
        let mut m = TernaryModel::new(vocab(), ["s", "t", "u"]);
        m.add_edge("a", 0, 1);
        m.add_edge("a", 0, 2);
        m.add_triple("a", "c", (0, 1, 2));
        assert!(validate_ternary(&m).iter().any(|x| x.condition() == "SYM"));
        assert_eq!(m.close_symmetric(), 1);
        assert_eq!(validate_ternary(&m), vec![]);
    }

    fn fo(values: &[usize], edges: &[(usize, usize)]) -> FoModel {
        let n = values.len();
        let mut rel = BTreeMap::new();
        rel.insert("a".to_string(), edges.iter().copied().collect());
        FoModel {
            vocab: vocab(),
            states: (0..n).map(|k| format!("w{k}")).collect(),
            domain: vec!["1".into(), "2".into()],
            rel,
            val: vec![BTreeSet::new(); n],
            vc: [("c".to_string(), values.to_vec())].into(),
        }
    }

    #[test]
    fn derived_triples_follow_value_differences() {
        let m = derive_ternary(&fo(&[0, 0, 1], &[(0, 1), (0, 2)]));
        assert_eq!(m.triples_at("a", "c", 0), vec![(1, 2), (2, 1)]);
        let same = derive_ternary(&fo(&[0, 1, 1], &[(0, 1), (0, 2)]));
        assert!(same.triples_at("a", "c", 0).is_empty());
        let refl = derive_ternary(&fo(&[0], &[(0, 0)]));
        assert_eq!(refl.triple_count(), 0);
        assert_eq!(validate_ternary(&m), vec![]);
    }
}
