//! End-to-end acceptance run. Every criterion executes in sequence, reports
//! one line on stderr, and the test fails if any criterion fails or runs over
//! its time limit.

mod common;

use std::io::Write;
use std::time::{Duration, Instant};

use common::{
    fo_model, formula, header, model, naive_eval, naive_eval_fo, negative_scripts, oracle_keys, proof_scripts, violation_key,
    vocab2, ViolationKey,
};
use kvlog::bisim::greatest_bisim;
use kvlog::models::{derive_ternary, validate_ternary, Model, TernaryModel};
use kvlog::proof::{check_derivation, parse_script, soundness_fuzz, FuzzOptions, ProofSystem, BOGUS};
use kvlog::semantics::{eval_fo, eval_ternary, find_countermodel, truth_set_ternary, Refutation, SearchOptions};
use kvlog::syntax::{diamond_expansion, print, reduce_r, translate_t, Formula, LanguageTag, Vocabulary};
use kvlog::transform::{split, split_index, to_fo, tree_edges, tree_parents, unravel, TransformError};
use rayon::prelude::*;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn load_ternary(name: &str) -> TernaryModel {
    match Model::load(common::workspace().join("models").join(name)).unwrap().0 {
        Model::Ternary(m) => m,
        Model::Fo(f) => derive_ternary(&f),
    }
}

fn successor_models() -> Outcome {
    let (left, right) = (load_ternary("three_successors.json"), load_ternary("two_successors.json"));
    ensure!(validate_ternary(&left).is_empty() && validate_ternary(&right).is_empty(), "shipped models are invalid");
    let (s, x) = (left.state("s").unwrap(), right.state("x").unwrap());
    let dia = Formula::dia_b("a", "c", Formula::prop("p"), Formula::prop("q"));
    ensure!(eval_ternary(&left, s, &dia).unwrap(), "<a>^c(p, q) should hold at s");
    ensure!(!eval_ternary(&right, x, &dia).unwrap(), "<a>^c(p, q) should fail at x");
    let r = greatest_bisim(&left, &right);
    ensure!(!r.relation.contains(s, x), "s and x reported bisimilar");
    let f = r.distinguishing_formula(&left, s, &right, x).map_err(|e| e.to_string())?;
    ensure!(naive_eval(&left, s, &f) && !naive_eval(&right, x, &f), "`{}` does not separate s from x", print(&f));
    Ok(format!("<a>^c(p, q): s true, x false; separated by {}", print(&f)))
}

fn binary_reduction() -> Outcome {
    let v = vocab2();
    for k in 0..500u64 {
        let m = model(&v, 1 + (k % 5) as usize, 1000 + k);
        let phi = formula(&v, LanguageTag::MLKvB, 2, 2000 + k);
        let psi = formula(&v, LanguageTag::MLKvB, 2, 3000 + k);
        let lhs = Formula::dia_b("a", "c", phi.clone(), psi.clone());
        let rhs = diamond_expansion("a", "c", &phi, &psi);
        for s in 0..m.len() {
            ensure!(
                naive_eval(&m, s, &lhs) == naive_eval(&m, s, &rhs),
                "template differs for phi = {}, psi = {} (case {k}, state {s})",
                print(&phi),
                print(&psi)
            );
        }
        ensure!(truth_set_ternary(&m, &lhs).unwrap() == truth_set_ternary(&m, &rhs).unwrap(), "evaluator disagrees, case {k}");
    }
    for k in 0..500u64 {
        let m = model(&v, 1 + (k % 5) as usize, 4000 + k);
        let f = formula(&v, LanguageTag::MLKvB, 2, 5000 + k);
        let r = reduce_r(&f);
        ensure!(r.in_language(LanguageTag::MLKvR), "reduction of {} is not unary", print(&f));
        ensure!(truth_set_ternary(&m, &f).unwrap() == truth_set_ternary(&m, &r).unwrap(), "reduce_r changes {}", print(&f));
    }
    Ok("500 template triples and 500 reductions agree".into())
}

fn translation_forward() -> Outcome {
    let v = vocab2();
    let mut checks = 0;
    for k in 0..500u64 {
        let fo = fo_model(&v, 1 + (k % 6) as usize, 6000 + k);
        let tern = derive_ternary(&fo);
        for j in 0..4 {
            let f = formula(&v, LanguageTag::ELKvR, 2, 7000 + 4 * k + j);
            let t = translate_t(&f).unwrap();
            for s in 0..fo.len() {
                let lhs = eval_fo(&fo, s, &f).unwrap();
                ensure!(lhs == eval_ternary(&tern, s, &t).unwrap(), "{} at state {s} of model {k}", print(&f));
                ensure!(lhs == naive_eval_fo(&fo, s, &f), "evaluator and oracle disagree on {}", print(&f));
                checks += 1;
            }
        }
    }
    Ok(format!("500 first-order models, {checks} state checks"))
}

#[derive(Default)]
struct Structure {
    splits: usize,
    trees: usize,
    assignments: usize,
}

fn translation_backward(structure: &mut Structure) -> Outcome {
    let v = vocab2();
    let mut roots = 0;
    for k in 0..200u64 {
        let n = 1 + (k % 5) as usize;
        let m = model(&v, n, 8000 + k);
        ensure!(validate_ternary(&m).is_empty(), "generated model {k} is invalid");
        let sp = split(&m).map_err(|e| e.to_string())?;
        ensure!(sp.tern.values().flatten().all(|&(_, t, u)| t != u), "split of model {k} keeps a reflexive pair");
        structure.splits += 1;
        for j in 0..5 {
            let s = ((k + j) % n as u64) as usize;
            let f = formula(&v, LanguageTag::ELKvR, 2, 9000 + 5 * k + j);
            let d = f.modal_depth();
            let tree = unravel(&sp, split_index(s, 0), d).map_err(|e| e.to_string())?;
            ensure!(tree_edges(&tree).len() + 1 == tree.len(), "unravel of model {k} is not a tree");
            ensure!(tree_parents(&tree, 0).is_ok(), "unravel of model {k} has a bad parent map");
            structure.trees += 1;
            let (fo, root) = match to_fo(&m, s, d) {
                Ok(x) => x,
                Err(e @ TransformError::NotTransitive { .. }) => return Err(format!("model {k}: {e}")),
                Err(e) => return Err(e.to_string()),
            };
            structure.assignments += 1;
            let t = translate_t(&f).unwrap();
            ensure!(
                eval_ternary(&m, s, &t).unwrap() == eval_fo(&fo, root, &f).unwrap(),
                "{} at state {s} of model {k}, depth {d}",
                print(&f)
            );
            roots += 1;
        }
    }
    Ok(format!("200 ternary models, {roots} rooted conversions"))
}

/// All structures over one edge set: every SYM-closed, INCL-respecting
/// triple set, under every valuation. Returns (structures, valid) or the
/// first disagreement.
fn validator_on_edges(vocab: &Vocabulary, n: usize, emask: u32) -> Result<(u64, u64), String> {
    let succ: Vec<Vec<usize>> = (0..n).map(|s| (0..n).filter(|t| emask >> (s * n + t) & 1 == 1).collect()).collect();
    // unordered successor pairs {t, u} per state, t <= u
    let pairs: Vec<(usize, usize, usize)> = (0..n)
        .flat_map(|s| {
            let succ = &succ[s];
            succ.iter().enumerate().flat_map(move |(i, &t)| succ[i..].iter().map(move |&u| (s, t, u)))
        })
        .collect();
    let (mut structures, mut valid) = (0, 0);
    for tmask in 0u64..1 << pairs.len() {
        let mut m = TernaryModel::new(vocab.clone(), (0..n).map(|k| format!("w{k}")));
        for (s, succ) in succ.iter().enumerate() {
            for &t in succ {
                m.add_edge("a", s, t);
            }
        }
        for (b, &(s, t, u)) in pairs.iter().enumerate() {
            if tmask >> b & 1 == 1 {
                m.add_triple_sym("a", "c", (s, t, u));
            }
        }
        for vmask in 0..1 << n {
            for s in 0..n {
                m.val[s].clear();
                if vmask >> s & 1 == 1 {
                    m.val[s].insert("p".into());
                }
            }
            let mut found: Vec<ViolationKey> = validate_ternary(&m).iter().map(|v| violation_key(vocab, v)).collect();
            found.sort_unstable();
            ensure!(found == oracle_keys(&m), "disagreement on edges {emask:#b}, triples {tmask:#b}");
            structures += 1;
            valid += u64::from(found.is_empty());
        }
    }
    Ok((structures, valid))
}

fn validator_exhaustive() -> Outcome {
    let vocab = Vocabulary::new(["a"], ["p"], ["c"]).unwrap();
    let n = 3;
    let counts = (0u32..1 << (n * n))
        .into_par_iter()
        .map(|emask| validator_on_edges(&vocab, n, emask))
        .collect::<Result<Vec<_>, _>>()?;
    let (structures, valid) = counts.iter().fold((0, 0), |(a, b), (c, d)| (a + c, b + d));
    Ok(format!("{structures} structures, {valid} valid, all agree"))
}

fn soundness() -> Outcome {
    let mut summary = Vec::new();
    for sys in ProofSystem::ALL {
        let report = soundness_fuzz(sys, &FuzzOptions { trials: 100, max_states: 5, ..FuzzOptions::default() });
        if let Some(f) = report.findings.first() {
            return Err(format!("{sys}: [{}] {} falsified in trial {}", f.source, f.formula, f.trial));
        }
        summary.push(format!("{sys} {}", report.checked));
    }
    let bogus = BOGUS.formula();
    let vocab = Vocabulary::covering(&bogus.symbols());
    let witness = match find_countermodel(&bogus, &vocab, &SearchOptions { max_states: 3, ..SearchOptions::default() }) {
        Ok(Refutation::Countermodel { model, state }) => {
            ensure!(validate_ternary(&model).is_empty() && !naive_eval(&model, state, &bogus), "bad witness");
            model.len()
        }
        other => return Err(format!("bogus schema not refuted within 3 states: {other:?}")),
    };
    let caught = soundness_fuzz(
        ProofSystem::SmlkvR,
        &FuzzOptions { trials: 100, max_states: 3, extra_schemas: vec![BOGUS], ..FuzzOptions::default() },
    );
    ensure!(caught.findings.iter().any(|f| f.source == "BOGUS"), "fuzzing missed the bogus schema");
    Ok(format!(
        "instances checked: {}; bogus refuted with {witness} states",
        summary.join(", ")
    ))
}

fn replay() -> Outcome {
    let scripts = proof_scripts();
    ensure!(scripts.len() == 9, "expected 9 shipped scripts, found {}", scripts.len());
    let mut steps = 0;
    for path in &scripts {
        let text = std::fs::read_to_string(path).unwrap();
        let sys: ProofSystem = header(&text, "system").unwrap().parse().unwrap();
        let d = parse_script(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        let ok = check_derivation(sys, &d).map_err(|r| format!("{}: {r}", path.display()))?;
        steps += ok.steps;
    }
    let mutants = negative_scripts();
    for path in &mutants {
        let text = std::fs::read_to_string(path).unwrap();
        let sys: ProofSystem = header(&text, "system").unwrap().parse().unwrap();
        let at: usize = header(&text, "rejects-at").unwrap().parse().unwrap();
        let d = parse_script(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        match check_derivation(sys, &d) {
            Ok(_) => return Err(format!("{} was accepted", path.display())),
            Err(r) => ensure!(r.step == at, "{} rejected at {} instead of {at}", path.display(), r.step),
        }
    }
    Ok(format!("{} scripts ({steps} steps) accepted, {} mutants rejected on cue", scripts.len(), mutants.len()))
}

fn bisimulation() -> Outcome {
    let v = Vocabulary::new(["a"], ["p"], ["c"]).unwrap();
    let (mut paired, mut separated) = (0, 0);
    for k in 0..300u64 {
        let m1 = model(&v, 1 + (k % 4) as usize, 10_000 + k);
        let m2 = model(&v, 1 + (k / 4 % 4) as usize, 20_000 + k);
        let r = greatest_bisim(&m1, &m2);
        let formulas: Vec<Formula> = (0..50).map(|j| formula(&v, LanguageTag::MLKvB, 2, 30_000 + 50 * k + j)).collect();
        for s1 in 0..m1.len() {
            for s2 in 0..m2.len() {
                if r.relation.contains(s1, s2) {
                    for f in &formulas {
                        ensure!(naive_eval(&m1, s1, f) == naive_eval(&m2, s2, f), "pair {k}: bisimilar states differ on {}", print(f));
                    }
                    paired += 1;
                } else {
                    let f = r.distinguishing_formula(&m1, s1, &m2, s2).map_err(|e| format!("pair {k}: {e}"))?;
                    ensure!(naive_eval(&m1, s1, &f) && !naive_eval(&m2, s2, &f), "pair {k}: {} does not separate", print(&f));
                    separated += 1;
                }
            }
        }
    }
    Ok(format!("300 model pairs: {paired} bisimilar state pairs agree, {separated} separated by verified formulas"))
}

fn transform_structure(s: &Structure) -> Outcome {
    ensure!(s.splits == 200 && s.trees == 1000 && s.assignments == 1000, "criterion 4 inputs were not all covered");
    Ok(format!(
        "{} splits without reflexive pairs, {} trees, {} value assignments without transitivity failures",
        s.splits, s.trees, s.assignments
    ))
}

#[test]
fn acceptance() {
    let mut structure = Structure::default();
    let mut failures = Vec::new();
    let mut run = |id: u32, name: &str, limit: Option<Duration>, body: &mut dyn FnMut() -> Outcome| {
        let start = Instant::now();
        let result = body();
        let took = start.elapsed();
        let over = limit.is_some_and(|l| took > l);
        let verdict = if result.is_ok() && !over { "PASS" } else { "FAIL" };
        let detail = match &result {
            Ok(d) => d.clone(),
            Err(e) => e.clone(),
        };
        let budget = limit.map_or("no limit".to_string(), |l| format!("limit {:.0} s", l.as_secs_f64()));
        let line = format!("criterion {id} [{verdict}] {name}: {detail} ({:.2} s, {budget})", took.as_secs_f64());
        let _ = writeln!(std::io::stderr(), "{line}");
        if verdict == "FAIL" {
            failures.push(line);
        }
    };
    let secs = |s| Some(Duration::from_secs(s));
    run(1, "separating models", secs(1), &mut successor_models);
    run(2, "binary diamond reduction", secs(30), &mut binary_reduction);
    run(3, "first-order to ternary", secs(30), &mut translation_forward);
    run(4, "ternary to first-order", secs(60), &mut || translation_backward(&mut structure));
    run(5, "frame-condition validator", secs(60), &mut validator_exhaustive);
    run(6, "soundness fuzz", secs(60), &mut soundness);
    run(7, "derivation replay", secs(5), &mut replay);
    run(8, "bisimulation", secs(120), &mut bisimulation);
    run(9, "transform structure", None, &mut || transform_structure(&structure));
    assert!(failures.is_empty(), "failed criteria:\n{}", failures.join("\n"));
}
