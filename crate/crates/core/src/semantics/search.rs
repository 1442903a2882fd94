//! Exhaustive bounded countermodel search.
//!
//! Order: state count ascending, then valuations, then binary edges, then
//! SYM-closed, INCL-respecting triple sets. Triple sets failing ATEUC are
//! never produced: ATEUC only relates triples at one `(s, i, c)`, so the valid
//! local sets are enumerated once per successor count and combined.

use rayon::prelude::*;
use serde::Serialize;

use super::structure::{get, set, Program, Structure};
use super::{check_ternary_query, SemanticsError};
use crate::models::{StateId, TernaryModel};
use crate::syntax::{Formula, Vocabulary};

/// Successor counts above this are only bounded, never enumerated.
const MAX_LOCAL: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub max_states: usize,
    /// Largest number of models the search may visit.
    pub budget: u64,
    /// Worker threads; `None` uses the global pool.
    pub workers: Option<usize>,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions { max_states: 3, budget: 200_000_000, workers: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum Refutation {
    /// The least falsifying pointed model in enumeration order.
    Countermodel {
        #[serde(skip)]
        model: TernaryModel,
        state: StateId,
    },
    NoneWithin { max_states: usize, models: u64 },
    /// Enumerating `states` states would visit `required` models.
    BoundExceeded { states: usize, required: u128, budget: u64 },
}

/// Valid local triple sets over successor positions `0..k`, as ordered pairs.
fn local_sets(k: usize) -> Vec<Vec<(u8, u8)>> {
    let pairs: Vec<(usize, usize)> = (0..k).flat_map(|t| (t..k).map(move |u| (t, u))).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut has = vec![false; k * k];
        for (b, &(t, u)) in pairs.iter().enumerate() {
            if mask >> b & 1 == 1 {
                has[t * k + u] = true;
                has[u * k + t] = true;
            }
        }
        let ateuc = (0..k * k).filter(|&x| has[x]).all(|x| {
            let (t, u) = (x / k, x % k);
            (0..k).all(|v| has[t * k + v] || has[u * k + v])
        });
        if ateuc {
            out.push((0..k * k).filter(|&x| has[x]).map(|x| ((x / k) as u8, (x % k) as u8)).collect());
        }
    }
    out
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, j| acc * (n - j) as u128 / (j + 1) as u128)
}

fn pow_sat(base: u128, exp: usize) -> u128 {
    (0..exp).fold(1u128, |acc, _| acc.saturating_mul(base))
}

struct Counts {
    props: usize,
    agents: usize,
    constants: usize,
}

/// Number of models with `n` states; counts for successor sets larger than
/// [`MAX_LOCAL`] use the trivial bound `2^(k(k+1)/2)`.
fn model_count(n: usize, c: &Counts, local: &mut Vec<Option<u128>>) -> u128 {
    let mut per_state = 0u128;
    for k in 0..=n {
        while local.len() <= k {
            local.push(None);
        }
        let l = if k <= MAX_LOCAL {
            *local[k].get_or_insert_with(|| local_sets(k).len() as u128)
        } else {
            1u128.checked_shl((k * (k + 1) / 2) as u32).unwrap_or(u128::MAX)
        };
        per_state = per_state.saturating_add(binomial(n, k).saturating_mul(pow_sat(l, c.constants)));
    }
    pow_sat(2, n * c.props).saturating_mul(pow_sat(per_state, n * c.agents))
}

/// Searches valid ternary models of at most `opts.max_states` states, built
/// over the symbols of `f`, for a state falsifying `f`.
///
/// The returned model uses `vocab`; states are named `s0, s1, ...`. The
/// witness does not depend on the number of workers.
pub fn find_countermodel(f: &Formula, vocab: &Vocabulary, opts: &SearchOptions) -> Result<Refutation, SemanticsError> {
    check_ternary_query(vocab, f)?;
    let symbols = f.symbols();
    let sub = Vocabulary::covering(&symbols);
    let counts = Counts {
        props: symbols.props.len(),
        agents: symbols.agents.len(),
        constants: symbols.constants.len(),
    };
    let prog = Program::compile(f, &sub);
    let mut local_counts = Vec::new();
    let mut visited = 0u64;
    for n in 1..=opts.max_states.max(1) {
        let required = model_count(n, &counts, &mut local_counts);
        if required > u128::from(opts.budget - visited.min(opts.budget)) {
            return Ok(Refutation::BoundExceeded { states: n, required, budget: opts.budget });
        }
        let local: Vec<Vec<Vec<(u8, u8)>>> = (0..=n).map(local_sets).collect();
        let search = || search_size(n, &counts, &prog, &local);
        let hit = match opts.workers {
            Some(w) => rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .expect("thread pool")
                .install(search),
            None => search(),
        };
        if let Some(w) = hit {
            return Ok(Refutation::Countermodel { model: w.to_model(n, &counts, &sub, vocab, &local), state: w.state });
        }
        visited += required as u64;
    }
    Ok(Refutation::NoneWithin { max_states: opts.max_states, models: visited })
}

struct Witness {
    unit: u64,
    digits: Vec<usize>,
    state: StateId,
}

fn succ_list(unit: u64, n: usize, c: &Counts, agent: usize, s: usize) -> Vec<usize> {
    let edges = unit & ((1u64 << (n * n * c.agents)) - 1);
    (0..n).filter(|&t| edges >> (agent * n * n + s * n + t) & 1 == 1).collect()
}

fn search_size(n: usize, c: &Counts, prog: &Program, local: &[Vec<Vec<(u8, u8)>>]) -> Option<Witness> {
    let units = 1u64 << (n * c.props + n * n * c.agents);
    (0..units).into_par_iter().find_map_first(|unit| search_unit(unit, n, c, prog, local))
}

/// One valuation and edge assignment; all triple sets over it.
fn search_unit(unit: u64, n: usize, c: &Counts, prog: &Program, local: &[Vec<Vec<(u8, u8)>>]) -> Option<Witness> {
    let edge_bits = n * n * c.agents;
    let val = unit >> edge_bits;
    let mut st = Structure::with_counts(n, c.props, c.agents, c.constants);
    for p in 0..c.props {
        for s in 0..n {
            if val >> (p * n + s) & 1 == 1 {
                set(&mut st.props[p], s);
            }
        }
    }
    // slot = (agent, constant, state)
    let mut slots = Vec::new();
    for a in 0..c.agents {
        for s in 0..n {
            let succ = succ_list(unit, n, c, a, s);
            for &t in &succ {
                set(&mut st.succ[a][s], t);
            }
            for k in 0..c.constants {
                slots.push((a * c.constants + k, s, succ.clone()));
            }
        }
    }
    let fill = |st: &mut Structure, slot: usize, digit: usize| {
        let (ac, s, succ) = &slots[slot];
        let dst = &mut st.pairs[*ac][*s];
        dst.clear();
        dst.extend(local[succ.len()][digit].iter().map(|&(t, u)| (succ[t as usize] as u32, succ[u as usize] as u32)));
    };
    let radix: Vec<usize> = slots.iter().map(|(_, _, succ)| local[succ.len()].len()).collect();
    let mut digits = vec![0usize; slots.len()];
    for k in 0..slots.len() {
        fill(&mut st, k, 0);
    }
    let mut ext = Vec::new();
    loop {
        let root = prog.run(&st, &mut ext);
        if let Some(state) = (0..n).find(|&s| !get(root, s)) {
            return Some(Witness { unit, digits, state });
        }
        // odometer, last slot fastest
        let mut k = slots.len();
        loop {
            if k == 0 {
                return None;
            }
            k -= 1;
            digits[k] += 1;
            if digits[k] < radix[k] {
                fill(&mut st, k, digits[k]);
                break;
            }
            digits[k] = 0;
            fill(&mut st, k, 0);
        }
    }
}

impl Witness {
    fn to_model(&self, n: usize, c: &Counts, sub: &Vocabulary, vocab: &Vocabulary, local: &[Vec<Vec<(u8, u8)>>]) -> TernaryModel {
        let mut m = TernaryModel::new(vocab.clone(), (0..n).map(|k| format!("s{k}")));
        let val = self.unit >> (n * n * c.agents);
        for p in 0..c.props {
            for s in 0..n {
                if val >> (p * n + s) & 1 == 1 {
                    m.set_prop(s, &sub.props()[p]);
                }
            }
        }
        let mut slot = 0;
        for a in 0..c.agents {
            let agent = &sub.agents()[a];
            for s in 0..n {
                let succ = succ_list(self.unit, n, c, a, s);
                for &t in &succ {
                    m.add_edge(agent, s, t);
                }
                for k in 0..c.constants {
                    for &(t, u) in &local[succ.len()][self.digits[slot]] {
                        m.add_triple(agent, &sub.constants()[k], (s, succ[t as usize], succ[u as usize]));
                    }
                    slot += 1;
                }
            }
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::validate_ternary;
    use crate::semantics::eval_ternary;
    use crate::syntax::parse_open;

    #[test]
    fn local_set_counts() {
        assert_eq!(local_sets(0).len(), 1);
        // {} and {tt}
        assert_eq!(local_sets(1).len(), 2);
    }

    #[test]
    fn bottom_is_refuted_by_the_trivial_model() {
        let f = parse_open("F").unwrap();
        let vocab = Vocabulary::new(["a"], ["p"], ["c"]).unwrap();
        let opts = SearchOptions { max_states: 1, ..SearchOptions::default() };
        let Refutation::Countermodel { model, state } = find_countermodel(&f, &vocab, &opts).unwrap() else {
            panic!("no countermodel")
        };
        assert_eq!((model.len(), state), (1, 0));
        assert_eq!(model.triple_count(), 0);
        assert!(model.rel.is_empty());
    }

    #[test]
    fn non_normality_is_refuted_and_witness_is_valid() {
        let f = parse_open("<a>^c (p | q) -> <a>^c p | <a>^c q").unwrap();
        let vocab = Vocabulary::covering(&f.symbols());
        let out = find_countermodel(&f, &vocab, &SearchOptions::default()).unwrap();
        let Refutation::Countermodel { model, state } = out else { panic!("{out:?}") };
        assert_eq!(validate_ternary(&model), vec![]);
        assert!(!eval_ternary(&model, state, &f).unwrap());
    }

    #[test]
    fn budget_guard_fires() {
        let f = parse_open("[a]^c(p, q) -> [a]^c(q, p)").unwrap();
        let vocab = Vocabulary::covering(&f.symbols());
        let opts = SearchOptions { max_states: 3, budget: 1000, workers: Some(1) };
        assert!(matches!(
            find_countermodel(&f, &vocab, &opts).unwrap(),
            Refutation::BoundExceeded { .. }
        ));
    }
}
