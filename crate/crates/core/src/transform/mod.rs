//! Ternary models to first-order models: splitting, depth-bounded
//! unraveling, and value assignment by `~`-classes.
//!
//! ```text
//! to_fo(M, s, d) = assign_values(unravel(split(M), (s,0), d))
//! ```
//!
//! Truth of `T(φ)` at `M, s` is preserved at the root for every ELKvR `φ` of
//! modal depth at most `d`.

mod unionfind;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::models::{validate_ternary, FoModel, StateId, TernaryModel, Violation};
use unionfind::UnionFind;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransformError {
    #[error("input model violates {} ({} violations), first: {}", .0[0].condition(), .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error("state index {0} out of range")]
    StateOutOfRange(StateId),
    #[error("model is not tree-shaped: {0}")]
    NotATree(String),
    #[error("triple ({parent}, {child}, {child}) relates a state to itself; values cannot separate it")]
    ReflexivePair { parent: String, child: String },
    #[error("value equivalence for `{constant}` is not transitive between `{left}` and `{right}`")]
    NotTransitive { constant: String, left: String, right: String },
}

fn require_valid(m: &TernaryModel) -> Result<(), TransformError> {
    let v = validate_ternary(m);
    if v.is_empty() {
        Ok(())
    } else {
        Err(TransformError::Invalid(v))
    }
}

/// Index of the copy `(u, x)` in [`split`]'s output.
pub fn split_index(u: StateId, x: usize) -> StateId {
    2 * u + x
}

/// Two copies `(u,0)`, `(u,1)` of every state, named `u:0` and `u:1`.
///
/// `(u,x) → (v,y)` iff `u → v`; `(u,x) P (v,y)(w,z)` iff `u R vw` and
/// `(v,y) ≠ (w,z)`.
pub fn split(m: &TernaryModel) -> Result<TernaryModel, TransformError> {
    require_valid(m)?;
    let states = m.states.iter().flat_map(|s| [format!("{s}:0"), format!("{s}:1")]);
    let mut out = TernaryModel::new(m.vocab.clone(), states);
    for (s, props) in m.val.iter().enumerate() {
        for x in 0..2 {
            out.val[split_index(s, x)] = props.clone();
        }
    }
    for (agent, edges) in &m.rel {
        for &(u, v) in edges {
            for x in 0..2 {
                for y in 0..2 {
                    out.add_edge(agent, split_index(u, x), split_index(v, y));
                }
            }
        }
    }
    for ((agent, constant), triples) in &m.tern {
        for &(u, v, w) in triples {
            for x in 0..2 {
                for y in 0..2 {
                    for z in 0..2 {
                        let (a, b) = (split_index(v, y), split_index(w, z));
                        if a != b {
                            out.add_triple(agent, constant, (split_index(u, x), a, b));
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// The tree of paths from `root` of length at most `depth`.
///
/// The root is state 0 and keeps its name; a child is named
/// `parent/agent/base`. `p Q tu` iff `t`, `u` are children of `p` via the same
/// agent and their bases form a triple at the base of `p`.
pub fn unravel(m: &TernaryModel, root: StateId, depth: usize) -> Result<TernaryModel, TransformError> {
    require_valid(m)?;
    if root >= m.len() {
        return Err(TransformError::StateOutOfRange(root));
    }
    let mut names = vec![m.states[root].clone()];
    let mut base = vec![root];
    // (parent, agent, child)
    let mut edges: Vec<(StateId, String, StateId)> = Vec::new();
    let mut frontier = vec![0];
    for _ in 0..depth {
        let mut next = Vec::new();
        for &p in &frontier {
            for agent in m.vocab.agents() {
                for v in m.successors(agent, base[p]) {
                    let child = names.len();
                    names.push(format!("{}/{agent}/{}", names[p], m.states[v]));
                    base.push(v);
                    edges.push((p, agent.clone(), child));
                    next.push(child);
                }
            }
        }
        frontier = next;
    }
    let mut out = TernaryModel::new(m.vocab.clone(), names);
    for (k, &b) in base.iter().enumerate() {
        out.val[k] = m.val[b].clone();
    }
    let mut children: BTreeMap<(StateId, &str), Vec<StateId>> = BTreeMap::new();
    for (p, agent, child) in &edges {
        out.add_edge(agent, *p, *child);
        children.entry((*p, agent.as_str())).or_default().push(*child);
    }
    for ((p, agent), kids) in &children {
        for c in m.vocab.constants() {
            for &t in kids {
                for &u in kids {
                    if m.has_triple(agent, c, (base[*p], base[t], base[u])) {
                        out.add_triple(agent, c, (*p, t, u));
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Parent and connecting agent of every non-root state, or why the edges
/// do not form a tree rooted at `root`.
pub fn tree_parents(m: &TernaryModel, root: StateId) -> Result<Vec<Option<(StateId, String)>>, TransformError> {
    if root >= m.len() {
        return Err(TransformError::StateOutOfRange(root));
    }
    let mut parent: Vec<Option<(StateId, String)>> = vec![None; m.len()];
    for (agent, edges) in &m.rel {
        for &(s, t) in edges {
            if t == root {
                return Err(TransformError::NotATree(format!("root `{}` has a predecessor", m.states[root])));
            }
            if parent[t].is_some() {
                return Err(TransformError::NotATree(format!("`{}` has two predecessors", m.states[t])));
            }
            parent[t] = Some((s, agent.clone()));
        }
    }
    // every state must reach the root through its unique parents
    for start in 0..m.len() {
        let (mut s, mut steps) = (start, 0);
        while let Some((p, _)) = &parent[s] {
            s = *p;
            steps += 1;
            if steps > m.len() {
                return Err(TransformError::NotATree(format!("`{}` lies on a cycle", m.states[start])));
            }
        }
        if s != root {
            return Err(TransformError::NotATree(format!("`{}` is unreachable from the root", m.states[start])));
        }
    }
    Ok(parent)
}

/// Gives every constant a value at every state of a tree-shaped model.
///
/// `(c,u) ~ (c,v)` iff `u`, `v` are children of one parent via one agent and
/// no state relates them by the ternary relation for `c`; the value of `c` at
/// `w` is the `~`-class of `(c, w)`, named `c@w` after its least member.
pub fn assign_values(m: &TernaryModel, root: StateId) -> Result<FoModel, TransformError> {
    require_valid(m)?;
    let parent = tree_parents(m, root)?;
    let mut siblings: BTreeMap<(StateId, &str), Vec<StateId>> = BTreeMap::new();
    for (t, p) in parent.iter().enumerate() {
        if let Some((s, agent)) = p {
            siblings.entry((*s, agent.as_str())).or_default().push(t);
        }
    }
    let n = m.len();
    let mut vc = BTreeMap::new();
    let mut classes: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    for c in m.vocab.constants() {
        let related = |s: StateId, agent: &str, u: StateId, v: StateId| !m.has_triple(agent, c, (s, u, v));
        let mut uf = UnionFind::new(n);
        for (&(s, agent), kids) in &siblings {
            for &t in kids {
                if m.has_triple(agent, c, (s, t, t)) {
                    return Err(TransformError::ReflexivePair {
                        parent: m.states[s].clone(),
                        child: m.states[t].clone(),
                    });
                }
                for &u in kids {
                    if t < u && related(s, agent, t, u) {
                        uf.union(t, u);
                    }
                }
            }
        }
        // the closure must add nothing: every pair in a class is related directly
        let mut members: BTreeMap<usize, Vec<StateId>> = BTreeMap::new();
        for w in 0..n {
            members.entry(uf.find(w)).or_default().push(w);
        }
        for class in members.values() {
            for (k, &u) in class.iter().enumerate() {
                for &v in &class[k + 1..] {
                    let direct = match (&parent[u], &parent[v]) {
                        (Some((s, a)), Some((s2, a2))) => s == s2 && a == a2 && related(*s, a, u, v) && related(*s, a, v, u),
                        _ => false,
                    };
                    if !direct {
                        return Err(TransformError::NotTransitive {
                            constant: c.clone(),
                            left: m.states[u].clone(),
                            right: m.states[v].clone(),
                        });
                    }
                }
            }
        }
        let mut value = vec![usize::MAX; n];
        for class in members.values() {
            let least = class.iter().map(|&w| &m.states[w]).min().expect("non-empty class");
            let name = format!("{c}@{least}");
            let slot = classes.len();
            classes.insert(name.clone(), vec![slot]);
            for &w in class {
                value[w] = slot;
            }
        }
        vc.insert(c.clone(), value);
    }
    // number values by the (constant, path) order of their names
    let order: Vec<String> = classes.keys().cloned().collect();
    let mut remap = vec![0; order.len()];
    for (rank, name) in order.iter().enumerate() {
        remap[classes[name][0]] = rank;
    }
    for values in vc.values_mut() {
        for v in values.iter_mut() {
            *v = remap[*v];
        }
    }
    let fo = FoModel {
        vocab: m.vocab.clone(),
        states: m.states.clone(),
        domain: order,
        rel: m.rel.clone(),
        val: m.val.clone(),
        vc,
    };
    Ok(fo)
}

/// `assign_values(unravel(split(M), (s,0), depth))`; the root is state 0.
pub fn to_fo(m: &TernaryModel, s: StateId, depth: usize) -> Result<(FoModel, StateId), TransformError> {
    if s >= m.len() {
        return Err(TransformError::StateOutOfRange(s));
    }
    let tree = unravel(&split(m)?, split_index(s, 0), depth)?;
    Ok((assign_values(&tree, 0)?, 0))
}

/// Edges of the tree as `(parent, child)`, for structural checks.
pub fn tree_edges(m: &TernaryModel) -> BTreeSet<(StateId, StateId)> {
    m.rel.values().flatten().copied().collect()
}
