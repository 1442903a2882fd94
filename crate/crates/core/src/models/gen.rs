use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{derive_ternary, validate_ternary, FoModel, ModelError, Relations, TernaryModel, Violation};
use crate::syntax::Vocabulary;

fn default_triple_density() -> f64 {
    0.5
}

/// Parameters for the seeded model generators.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub vocab: Vocabulary,
    pub num_states: usize,
    /// Probability of each ordered pair being an edge, per agent.
    pub edge_density: f64,
    /// Size of the value domain of first-order models.
    pub value_count: usize,
    pub seed: u64,
    /// Probability of each INCL-compatible unordered pair becoming a candidate
    /// triple in [`generate_direct`].
    #[serde(default = "default_triple_density")]
    pub triple_density: f64,
}

impl GenParams {
    pub fn new(vocab: Vocabulary, num_states: usize, seed: u64) -> GenParams {
        GenParams {
            vocab,
            num_states,
            edge_density: 0.4,
            value_count: 3,
            seed,
            triple_density: default_triple_density(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.num_states == 0 {
            return Err(ModelError::Params("num_states must be at least 1".into()));
        }
        if self.value_count == 0 {
            return Err(ModelError::Params("value_count must be at least 1".into()));
        }
        for (name, p) in [("edge_density", self.edge_density), ("triple_density", self.triple_density)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(ModelError::Params(format!("{name} must lie in [0, 1]")));
            }
        }
        Ok(())
    }

    fn state_names(&self) -> Vec<String> {
        (0..self.num_states).map(|k| format!("w{k}")).collect()
    }
}

fn random_frame(p: &GenParams, rng: &mut ChaCha8Rng) -> (Relations, Vec<BTreeSet<String>>) {
    let n = p.num_states;
    let mut rel = BTreeMap::new();
    for agent in p.vocab.agents() {
        let mut edges = BTreeSet::new();
        for s in 0..n {
            for t in 0..n {
                if rng.gen_bool(p.edge_density) {
                    edges.insert((s, t));
                }
            }
        }
        rel.insert(agent.clone(), edges);
    }
    let val = (0..n)
        .map(|_| {
            p.vocab
                .props()
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .cloned()
                .collect()
        })
        .collect();
    (rel, val)
}

/// A random first-order model together with its value-induced ternary model.
pub fn generate_value_induced(p: &GenParams) -> Result<(FoModel, TernaryModel), ModelError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (rel, val) = random_frame(p, &mut rng);
    let vc = p
        .vocab
        .constants()
        .iter()
        .map(|c| {
            let vals = (0..p.num_states).map(|_| rng.gen_range(0..p.value_count)).collect();
            (c.clone(), vals)
        })
        .collect();
    let fo = FoModel {
        vocab: p.vocab.clone(),
        states: p.state_names(),
        domain: (0..p.value_count).map(|k| format!("d{k}")).collect(),
        rel,
        val,
        vc,
    };
    let tern = derive_ternary(&fo);
    Ok((fo, tern))
}

/// A random ternary model built without values: candidate triples over
/// successor pairs (including `sR tt`), closed under SYM, then repaired to
/// satisfy ATEUC.
pub fn generate_direct(p: &GenParams) -> Result<TernaryModel, ModelError> {
    p.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (rel, val) = random_frame(p, &mut rng);
    let mut m = TernaryModel {
        vocab: p.vocab.clone(),
        states: p.state_names(),
        rel,
        tern: BTreeMap::new(),
        val,
    };
    for agent in p.vocab.agents() {
        for c in p.vocab.constants() {
            for s in 0..p.num_states {
                let succ = m.successors(agent, s);
                for (k, &t) in succ.iter().enumerate() {
                    for &u in &succ[k..] {
                        if rng.gen_bool(p.triple_density) {
                            m.add_triple(agent, c, (s, t, u));
                        }
                    }
                }
            }
        }
    }
    close_and_repair(&mut m);
    Ok(m)
}

/// Closes the triples under SYM and adds triples until ATEUC holds.
///
/// The existing triples must already satisfy INCL. For a violation
/// `sR tu`, `s→v`, the triple `(s, min(t, u), v)` is added with its mirror.
/// Returns the number of triples added.
pub fn close_and_repair(m: &mut TernaryModel) -> usize {
    let mut added = m.close_symmetric();
    loop {
        let first = validate_ternary(m).into_iter().find_map(|v| match v {
            Violation::Ateuc { agent, constant, triple: (s, t, u), v } => Some((agent, constant, s, t.min(u), v)),
            _ => None,
        });
        let Some((agent, constant, s, w, v)) = first else {
            return added;
        };
        let before = m.triple_count();
        m.add_triple_sym(&agent, &constant, (s, w, v));
        added += m.triple_count() - before;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, seed: u64) -> GenParams {
        let vocab = Vocabulary::new(["a", "b"], ["p", "q"], ["c", "d"]).unwrap();
        GenParams::new(vocab, n, seed)
    }

    #[test]
    fn single_value_means_no_triples() {
        let mut p = params(4, 3);
        p.value_count = 1;
        let (_, m) = generate_value_induced(&p).unwrap();
        assert_eq!(m.triple_count(), 0);
    }

    #[test]
    fn zero_density_means_no_relations() {
        let mut p = params(4, 3);
        p.edge_density = 0.0;
        let (fo, m) = generate_value_induced(&p).unwrap();
        assert!(fo.rel.values().all(BTreeSet::is_empty));
        assert_eq!(m.triple_count(), 0);
        let d = generate_direct(&p).unwrap();
        assert_eq!(d.triple_count(), 0);
    }

    #[test]
    fn generators_are_deterministic() {
        let p = params(5, 42);
        assert_eq!(generate_value_induced(&p).unwrap(), generate_value_induced(&p).unwrap());
        assert_eq!(generate_direct(&p).unwrap(), generate_direct(&p).unwrap());
    }

    #[test]
    fn bad_params_are_rejected() {
        let mut p = params(0, 1);
        assert!(generate_direct(&p).is_err());
        p.num_states = 2;
        p.edge_density = 1.5;
        assert!(generate_value_induced(&p).is_err());
    }

    #[test]
    fn reflexive_pair_candidate_survives_repair() {
        let vocab = Vocabulary::new(["a"], ["p"], ["c"]).unwrap();
        let mut m = TernaryModel::new(vocab, ["s", "t"]);
        m.add_edge("a", 0, 1);
        m.add_triple("a", "c", (0, 1, 1));
        close_and_repair(&mut m);
        assert!(m.has_triple("a", "c", (0, 1, 1)));
        assert_eq!(validate_ternary(&m), vec![]);
    }

    #[test]
    fn repair_uses_least_triple() {
        let vocab = Vocabulary::new(["a"], ["p"], ["c"]).unwrap();
        let mut m = TernaryModel::new(vocab, ["s", "t", "u", "v"]);
        for t in 1..4 {
            m.add_edge("a", 0, t);
        }
        m.add_triple("a", "c", (0, 1, 2));
        close_and_repair(&mut m);
        assert!(m.has_triple("a", "c", (0, 1, 3)));
        assert!(!m.has_triple("a", "c", (0, 2, 3)));
        assert_eq!(validate_ternary(&m), vec![]);
    }
}
