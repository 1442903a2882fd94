//! Shared generators and independent oracles for the integration tests.
//!
//! The oracles here re-derive results from definitions by brute force and
//! share no code with the library beyond the data types.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use kvlog::models::{generate_direct, generate_value_induced, FoModel, GenParams, TernaryModel, Violation};
use kvlog::syntax::gen::FormulaGen;
use kvlog::syntax::{Formula, LanguageTag, Vocabulary};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn vocab1() -> Vocabulary {
    Vocabulary::new(["a"], ["p", "q"], ["c"]).unwrap()
}

pub fn vocab2() -> Vocabulary {
    Vocabulary::new(["a", "b"], ["p", "q"], ["c", "d"]).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A seeded valid ternary model; even seeds use the direct generator, odd
/// seeds the value-induced one.
pub fn model(vocab: &Vocabulary, n: usize, seed: u64) -> TernaryModel {
    let params = GenParams::new(vocab.clone(), n, seed);
    if seed.is_multiple_of(2) {
        generate_direct(&params).unwrap()
    } else {
        generate_value_induced(&params).unwrap().1
    }
}

pub fn fo_model(vocab: &Vocabulary, n: usize, seed: u64) -> FoModel {
    generate_value_induced(&GenParams::new(vocab.clone(), n, seed)).unwrap().0
}

pub fn formula(vocab: &Vocabulary, lang: LanguageTag, depth: usize, seed: u64) -> Formula {
    FormulaGen::new(vocab, lang, depth).sample(&mut rng(seed))
}

// ---------------------------------------------------------------------------
// Formula strategies with shrinking

fn leaf() -> BoxedStrategy<Formula> {
    prop_oneof![
        1 => Just(Formula::Top),
        4 => prop::sample::select(vec!["p", "q", "r"]).prop_map(Formula::prop),
    ]
    .boxed()
}

/// Formulas of the given language over agents `a, b`, props `p, q, r` and
/// constants `c, d`.
pub fn arb_formula(lang: LanguageTag) -> BoxedStrategy<Formula> {
    leaf()
        .prop_recursive(4, 24, 2, move |inner| {
            let agent = prop::sample::select(vec!["a", "b"]);
            let constant = prop::sample::select(vec!["c", "d"]);
            let common = prop_oneof![
                inner.clone().prop_map(Formula::neg),
                (inner.clone(), inner.clone()).prop_map(|(x, y)| Formula::and(x, y)),
                (agent.clone(), inner.clone()).prop_map(|(i, x)| Formula::boxed(i, x)),
            ];
            match lang {
                LanguageTag::ELKvR => prop_oneof![
                    3 => common,
                    1 => (agent, inner, constant).prop_map(|(i, x, c)| Formula::kv(i, x, c)),
                ]
                .boxed(),
                LanguageTag::MLKvR => prop_oneof![
                    3 => common,
                    1 => (agent, constant, inner).prop_map(|(i, c, x)| Formula::bbox_u(i, c, x)),
                ]
                .boxed(),
                LanguageTag::MLKvB => prop_oneof![
                    3 => common,
                    1 => (agent, constant, inner.clone(), inner)
                        .prop_map(|(i, c, x, y)| Formula::bbox_b(i, c, x, y)),
                ]
                .boxed(),
                LanguageTag::MLKv => prop_oneof![
                    3 => common,
                    1 => (agent, constant).prop_map(|(i, c)| Formula::bbox_u(i, c, Formula::bot())),
                ]
                .boxed(),
            }
        })
        .boxed()
}

// ---------------------------------------------------------------------------
// Naive evaluators: the satisfaction clauses read off directly, by recursion
// on the formula and quantification over all states.

pub fn naive_eval(m: &TernaryModel, s: usize, f: &Formula) -> bool {
    let n = m.states.len();
    let edge = |i: &str, s: usize, t: usize| m.rel.get(i).is_some_and(|r| r.contains(&(s, t)));
    let tern = |i: &str, c: &str, x: (usize, usize, usize)| {
        m.tern.get(&(i.to_string(), c.to_string())).is_some_and(|r| r.contains(&x))
    };
    match f {
        Formula::Top => true,
        Formula::Prop(p) => m.val[s].contains(p),
        Formula::Neg(a) => !naive_eval(m, s, a),
        Formula::And(a, b) => naive_eval(m, s, a) && naive_eval(m, s, b),
        Formula::Box(i, a) => (0..n).all(|t| !edge(i, s, t) || naive_eval(m, t, a)),
        Formula::BBoxU(i, c, a) => (0..n).all(|t| {
            (0..n).all(|u| !tern(i, c, (s, t, u)) || naive_eval(m, t, a) || naive_eval(m, u, a))
        }),
        Formula::BBoxB(i, c, a, b) => (0..n).all(|t| {
            (0..n).all(|u| !tern(i, c, (s, t, u)) || naive_eval(m, t, a) || naive_eval(m, u, b))
        }),
        Formula::KvCond(..) => panic!("Kv has no ternary clause"),
    }
}

pub fn naive_eval_fo(m: &FoModel, s: usize, f: &Formula) -> bool {
    let n = m.states.len();
    let edge = |i: &str, s: usize, t: usize| m.rel.get(i).is_some_and(|r| r.contains(&(s, t)));
    match f {
        Formula::Top => true,
        Formula::Prop(p) => m.val[s].contains(p),
        Formula::Neg(a) => !naive_eval_fo(m, s, a),
        Formula::And(a, b) => naive_eval_fo(m, s, a) && naive_eval_fo(m, s, b),
        Formula::Box(i, a) => (0..n).all(|t| !edge(i, s, t) || naive_eval_fo(m, t, a)),
        Formula::KvCond(i, a, c) => {
            let val = &m.vc[c];
            (0..n).all(|t| {
                (0..n).all(|u| {
                    !(edge(i, s, t) && edge(i, s, u) && naive_eval_fo(m, t, a) && naive_eval_fo(m, u, a))
                        || val[t] == val[u]
                })
            })
        }
        Formula::BBoxU(..) | Formula::BBoxB(..) => panic!("no ternary relation in a first-order model"),
    }
}

// ---------------------------------------------------------------------------
// Frame conditions, written as the three universally quantified statements.

/// A violation as `(condition, agent index, constant index, s, t, u, v)`,
/// with condition 0 = SYM, 1 = INCL, 2 = ATEUC and `v = 0` unless ATEUC.
pub type ViolationKey = (u8, usize, usize, usize, usize, usize, usize);

pub fn violation_key(vocab: &Vocabulary, v: &Violation) -> ViolationKey {
    let idx = |a: &str, c: &str| (vocab.agent_index(a).unwrap(), vocab.constant_index(c).unwrap());
    match v {
        Violation::Sym { agent, constant, triple: (s, t, u) } => {
            let (a, c) = idx(agent, constant);
            (0, a, c, *s, *t, *u, 0)
        }
        Violation::Incl { agent, constant, triple: (s, t, u) } => {
            let (a, c) = idx(agent, constant);
            (1, a, c, *s, *t, *u, 0)
        }
        Violation::Ateuc { agent, constant, triple: (s, t, u), v } => {
            let (a, c) = idx(agent, constant);
            (2, a, c, *s, *t, *u, *v)
        }
    }
}

/// Sorted, duplicate-free violation keys.
pub fn oracle_keys(m: &TernaryModel) -> Vec<ViolationKey> {
    let n = m.states.len();
    let mut out = Vec::new();
    for (ai, agent) in m.vocab.agents().iter().enumerate() {
        let mut e = vec![false; n * n];
        for &(s, t) in m.rel.get(agent).into_iter().flatten() {
            e[s * n + t] = true;
        }
        for (ci, constant) in m.vocab.constants().iter().enumerate() {
            let mut r = vec![false; n * n * n];
            for &(s, t, u) in m.tern.get(&(agent.clone(), constant.clone())).into_iter().flatten() {
                r[(s * n + t) * n + u] = true;
            }
            let r = |s, t, u| r[(s * n + t) * n + u];
            for s in 0..n {
                for t in 0..n {
                    for u in 0..n {
                        if !r(s, t, u) {
                            continue;
                        }
                        if !r(s, u, t) {
                            out.push((0, ai, ci, s, t, u, 0));
                        }
                        if !(e[s * n + t] && e[s * n + u]) {
                            out.push((1, ai, ci, s, t, u, 0));
                        }
                        for v in 0..n {
                            if e[s * n + v] && !r(s, t, v) && !r(s, u, v) {
                                out.push((2, ai, ci, s, t, u, v));
                            }
                        }
                    }
                }
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

pub fn oracle_violations(m: &TernaryModel) -> BTreeSet<Violation> {
    let (agents, constants) = (m.vocab.agents(), m.vocab.constants());
    oracle_keys(m)
        .into_iter()
        .map(|(kind, a, c, s, t, u, v)| {
            let (agent, constant) = (agents[a].clone(), constants[c].clone());
            match kind {
                0 => Violation::Sym { agent, constant, triple: (s, t, u) },
                1 => Violation::Incl { agent, constant, triple: (s, t, u) },
                _ => Violation::Ateuc { agent, constant, triple: (s, t, u), v },
            }
        })
        .collect()
}

/// Every valid ternary model with exactly `n` states over one agent and one
/// constant: all valuations, all edge sets, all triple sets.
pub fn all_valid_models(vocab: &Vocabulary, n: usize) -> Vec<TernaryModel> {
    assert!(vocab.agents().len() == 1 && vocab.constants().len() == 1);
    let (a, c) = (vocab.agents()[0].clone(), vocab.constants()[0].clone());
    let props = vocab.props();
    let states: Vec<String> = (0..n).map(|k| format!("w{k}")).collect();
    let triples: Vec<(usize, usize, usize)> =
        (0..n).flat_map(|s| (0..n).flat_map(move |t| (0..n).map(move |u| (s, t, u)))).collect();
    let mut out = Vec::new();
    for vmask in 0u64..1 << (n * props.len()) {
        for emask in 0u64..1 << (n * n) {
            for tmask in 0u64..1 << triples.len() {
                let mut m = TernaryModel::new(vocab.clone(), states.clone());
                for s in 0..n {
                    for (k, p) in props.iter().enumerate() {
                        if vmask >> (s * props.len() + k) & 1 == 1 {
                            m.val[s].insert(p.clone());
                        }
                    }
                    for t in 0..n {
                        if emask >> (s * n + t) & 1 == 1 {
                            m.rel.entry(a.clone()).or_default().insert((s, t));
                        }
                    }
                }
                for (k, &x) in triples.iter().enumerate() {
                    if tmask >> k & 1 == 1 {
                        m.tern.entry((a.clone(), c.clone())).or_default().insert(x);
                    }
                }
                if oracle_violations(&m).is_empty() {
                    out.push(m);
                }
            }
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Truth tables over the propositional skeleton.

fn collect_atoms(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::Top => {}
        Formula::Neg(a) => collect_atoms(a, out),
        Formula::And(a, b) => {
            collect_atoms(a, out);
            collect_atoms(b, out);
        }
        atom => {
            if !out.contains(atom) {
                out.push(atom.clone());
            }
        }
    }
}

fn table_eval(f: &Formula, row: &BTreeMap<&Formula, bool>) -> bool {
    match f {
        Formula::Top => true,
        Formula::Neg(a) => !table_eval(a, row),
        Formula::And(a, b) => table_eval(a, row) && table_eval(b, row),
        atom => row[atom],
    }
}

pub fn skeleton_size(f: &Formula) -> usize {
    let mut atoms = Vec::new();
    collect_atoms(f, &mut atoms);
    atoms.len()
}

pub fn truth_table_tautology(f: &Formula) -> bool {
    let mut atoms = Vec::new();
    collect_atoms(f, &mut atoms);
    (0u64..1 << atoms.len()).all(|mask| {
        let row: BTreeMap<&Formula, bool> =
            atoms.iter().enumerate().map(|(k, a)| (a, mask >> k & 1 == 1)).collect();
        table_eval(f, &row)
    })
}

// ---------------------------------------------------------------------------
// Shipped files

pub fn workspace() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn kvp_files(dir: PathBuf) -> Vec<PathBuf> {
    let mut out: Vec<PathBuf> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "kvp"))
        .collect();
    out.sort();
    out
}

pub fn proof_scripts() -> Vec<PathBuf> {
    kvp_files(workspace().join("proofs"))
}

pub fn negative_scripts() -> Vec<PathBuf> {
    kvp_files(workspace().join("proofs/negative"))
}

/// Value of a `# key: value` header line.
pub fn header(text: &str, key: &str) -> Option<String> {
    let prefix = format!("# {key}:");
    text.lines()
        .find_map(|l| l.strip_prefix(&prefix))
        .map(|v| v.trim().to_string())
}
