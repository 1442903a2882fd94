//! Randomized soundness checks: axiom instances must hold on random valid
//! models, and rules must send formulas valid on a model to formulas valid
//! on the same model.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{identity_substitution, ProofSystem, Rule, Schema};
use crate::models::{generate_direct, generate_value_induced, GenParams, Model, TernaryModel};
use crate::semantics::{truth_set_ternary, valid_on};
use crate::syntax::gen::FormulaGen;
use crate::syntax::{parse_open, print, Formula, Vocabulary};

#[derive(Clone, Debug)]
pub struct FuzzOptions {
    pub trials: usize,
    pub seed: u64,
    /// Random models have between 1 and this many states.
    pub max_states: usize,
    /// Modal depth of the random formulas substituted into schemas.
    pub modal_depth: usize,
    /// Random instances per schema per trial, on top of the identity instance.
    pub instances: usize,
    /// Schemas checked in addition to the system's own.
    pub extra_schemas: Vec<Schema>,
    pub workers: Option<usize>,
}

impl Default for FuzzOptions {
    fn default() -> FuzzOptions {
        FuzzOptions {
            trials: 100,
            seed: 0,
            max_states: 5,
            modal_depth: 2,
            instances: 4,
            extra_schemas: Vec::new(),
            workers: None,
        }
    }
}

/// A formula that should have been valid on the trial's model but is not.
#[derive(Clone, Debug, Serialize)]
pub struct Finding {
    pub trial: usize,
    /// Schema name, `TAUT`, or the rule whose conclusion failed.
    pub source: String,
    pub formula: String,
    #[serde(skip)]
    pub model: TernaryModel,
    /// The model in the JSON exchange format.
    pub model_json: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct FuzzReport {
    pub system: ProofSystem,
    pub trials: usize,
    pub checked: usize,
    pub findings: Vec<Finding>,
}

impl FuzzReport {
    pub fn is_sound(&self) -> bool {
        self.findings.is_empty()
    }
}

const TAUTOLOGIES: &[&str] = &[
    "p -> (q -> p)",
    "(p -> (q -> r)) -> ((p -> q) -> (p -> r))",
    "(~q -> ~p) -> (p -> q)",
    "p | ~p",
    "((p -> q) -> p) -> p",
    "p & q -> q & p",
    "~~p <-> p",
    "(p -> q) & (q -> r) -> (p -> r)",
];

fn fuzz_vocab() -> Vocabulary {
    Vocabulary::new(["a", "b"], ["p", "q", "r"], ["c", "d"]).expect("fixed vocabulary")
}

struct Trial<'a> {
    index: usize,
    sys: ProofSystem,
    model: TernaryModel,
    gen: FormulaGen,
    rng: ChaCha8Rng,
    opts: &'a FuzzOptions,
    checked: usize,
    findings: Vec<Finding>,
    /// Formulas known to be valid on `model`.
    pool: Vec<Formula>,
}

impl Trial<'_> {
    fn check(&mut self, source: &str, f: Formula) -> bool {
        self.checked += 1;
        let ok = valid_on(&self.model, &f).expect("fuzz formulas are in vocabulary");
        if !ok {
            self.findings.push(Finding {
                trial: self.index,
                source: source.to_string(),
                formula: print(&f),
                model: self.model.clone(),
                model_json: Model::Ternary(self.model.clone()).to_json_string(),
            });
        }
        ok
    }

    fn agent(&mut self) -> String {
        self.gen.agents.choose(&mut self.rng).expect("agents").clone()
    }

    fn constant(&mut self) -> String {
        self.gen.constants.choose(&mut self.rng).expect("constants").clone()
    }

    fn random_sigma(&mut self, vars: impl IntoIterator<Item = String>) -> BTreeMap<String, Formula> {
        vars.into_iter().map(|v| (v, self.gen.sample(&mut self.rng))).collect()
    }

    fn schemas(&mut self) {
        let mut schemas: Vec<Schema> = self
            .sys
            .schemas()
            .iter()
            .map(|n| Schema::lookup(n).expect("known schema"))
            .collect();
        schemas.extend(self.opts.extra_schemas.iter().cloned());
        for s in &schemas {
            let id = identity_substitution(s);
            let (agent, constant) = (self.agent(), self.constant());
            let f = s.instantiate(&id, &agent, &constant).expect("identity is complete");
            if self.check(s.name, f.clone()) {
                self.pool.push(f);
            }
            for _ in 0..self.opts.instances {
                let sigma = self.random_sigma(s.metavariables());
                let (agent, constant) = (self.agent(), self.constant());
                let f = s.instantiate(&sigma, &agent, &constant).expect("sigma is complete");
                if self.check(s.name, f.clone()) {
                    self.pool.push(f);
                }
            }
        }
    }

    fn tautologies(&mut self) {
        for _ in 0..self.opts.instances {
            let t = parse_open(TAUTOLOGIES.choose(&mut self.rng).expect("templates")).expect("template parses");
            let sigma = self.random_sigma(["p", "q", "r"].map(String::from));
            let f = t.substitute(&sigma);
            debug_assert_eq!(super::is_tautology(&f), Some(true));
            if self.check("TAUT", f.clone()) {
                self.pool.push(f);
            }
        }
    }

    fn pick(&mut self) -> Option<Formula> {
        self.pool.choose(&mut self.rng).cloned()
    }

    /// Two formulas with the same truth set on the model.
    fn equivalent_pair(&mut self) -> (Formula, Formula) {
        let mut seen: BTreeMap<Vec<bool>, Formula> = BTreeMap::new();
        for _ in 0..24 {
            let f = self.gen.sample(&mut self.rng);
            let set = truth_set_ternary(&self.model, &f).expect("in vocabulary");
            match seen.get(&set) {
                Some(g) if *g != f => return (g.clone(), f),
                Some(_) => {}
                None => {
                    seen.insert(set, f);
                }
            }
        }
        let f = self.gen.sample(&mut self.rng);
        (f.clone(), Formula::neg(Formula::neg(f)))
    }

    fn rules(&mut self) {
        let rules = self.sys.rules();
        for _ in 0..self.opts.instances {
            for &rule in rules {
                match rule {
                    Rule::Taut | Rule::Axiom => {}
                    Rule::Mp => {
                        let (Some(a), Some(b)) = (self.pick(), self.pick()) else { continue };
                        if self.check("MP", Formula::implies(a, b.clone())) {
                            self.check("MP", b);
                        }
                    }
                    Rule::NecK => {
                        let Some(a) = self.pick() else { continue };
                        let agent = self.agent();
                        self.check("NECK", Formula::boxed(agent, a));
                    }
                    Rule::NecKvR => {
                        let Some(a) = self.pick() else { continue };
                        let (agent, constant) = (self.agent(), self.constant());
                        self.check("NECKvR", Formula::bbox_u(agent, constant, a));
                    }
                    Rule::NecKvB => {
                        let Some(a) = self.pick() else { continue };
                        let (agent, constant) = (self.agent(), self.constant());
                        let side = self.gen.sample(&mut self.rng);
                        self.check("NECKvB", Formula::bbox_b(agent, constant, a, side));
                    }
                    Rule::Sub => {
                        // premises of SUB must be theorems, not merely valid on the model
                        let name = *self.sys.schemas().choose(&mut self.rng).expect("schemas");
                        let s = Schema::lookup(name).expect("known schema");
                        let (agent, constant) = (self.agent(), self.constant());
                        let premise = s.instantiate(&identity_substitution(&s), &agent, &constant).expect("complete");
                        let sigma = self.random_sigma(s.metavariables());
                        self.check("SUB", premise.substitute(&sigma));
                    }
                    Rule::Re => {
                        let (from, to) = self.equivalent_pair();
                        let rho = self.gen.sample(&mut self.rng);
                        let agent = self.agent();
                        let target = Formula::and(
                            rho.substitute(&BTreeMap::from([("p".to_string(), from.clone())])),
                            Formula::boxed(agent, from.clone()),
                        );
                        let all = target.occurrences(&from).into_iter().collect();
                        let replaced = target.replace_at(&all, &from, &to).expect("occurrences are valid paths");
                        self.check("RE", Formula::iff(target, replaced));
                    }
                }
            }
        }
    }
}

fn run_trial(sys: ProofSystem, opts: &FuzzOptions, index: usize) -> (usize, Vec<Finding>) {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let vocab = fuzz_vocab();
    let n = rng.gen_range(1..=opts.max_states.max(1));
    let params = GenParams::new(vocab.clone(), n, rng.gen());
    let model = if index.is_multiple_of(2) {
        generate_direct(&params).expect("valid parameters")
    } else {
        generate_value_induced(&params).expect("valid parameters").1
    };
    let mut trial = Trial {
        index,
        sys,
        model,
        gen: FormulaGen::new(&vocab, sys.language(), opts.modal_depth),
        rng,
        opts,
        checked: 0,
        findings: Vec::new(),
        pool: Vec::new(),
    };
    trial.schemas();
    trial.tautologies();
    trial.rules();
    (trial.checked, trial.findings)
}

/// Runs `opts.trials` seeded trials against `sys`. The report does not
/// depend on the number of workers.
pub fn soundness_fuzz(sys: ProofSystem, opts: &FuzzOptions) -> FuzzReport {
    let work = || {
        (0..opts.trials)
            .into_par_iter()
            .map(|k| run_trial(sys, opts, k))
            .collect::<Vec<_>>()
    };
    let results = match opts.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .expect("thread pool")
            .install(work),
        None => work(),
    };
    let mut report = FuzzReport { system: sys, trials: opts.trials, checked: 0, findings: Vec::new() };
    for (checked, findings) in results {
        report.checked += checked;
        report.findings.extend(findings);
    }
    report
}
