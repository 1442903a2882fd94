use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use kvlog::bisim::greatest_bisim;
use kvlog::models::{
    derive_ternary, generate_direct, generate_value_induced, validate_ternary, GenParams, Model, TernaryModel,
};
use kvlog::proof::{check_derivation, parse_script, soundness_fuzz, FuzzOptions, ProofSystem, BOGUS};
use kvlog::semantics::{eval_fo, eval_ternary, find_countermodel, truth_set_fo, truth_set_ternary, Refutation, SearchOptions};
use kvlog::syntax::{parse, parse_open, print, reduce_r, translate_t, translate_t_inv, Formula, Vocabulary};
use kvlog::transform::to_fo;

/// Knowing-value modal logics: evaluation, translation, model conversion,
/// bisimulation and proof checking.
#[derive(Debug, Parser)]
#[command(name = "kvlog", version)]
pub struct Cli {
    /// Machine-readable JSON output.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Direction {
    Elkv2ml,
    Ml2elkv,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Target {
    Ternary,
    Fo,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum GenKind {
    Value,
    Direct,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse a formula and print it in normal form.
    Parse { formula: String },
    /// Evaluate a formula at a named state of a model.
    Check { model: PathBuf, state: String, formula: String },
    /// Evaluate a formula at every state of a model.
    Valid { model: PathBuf, formula: String },
    /// Search for a countermodel among small valid ternary models.
    Refute {
        formula: String,
        #[arg(long, default_value_t = 3)]
        max_states: usize,
        #[arg(long, default_value_t = 200_000_000)]
        budget: u64,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Translate between the first-order and ternary languages.
    Translate {
        #[arg(long)]
        dir: Direction,
        formula: String,
    },
    /// Rewrite binary modalities into unary ones.
    Reduce { formula: String },
    /// List frame-condition violations of a model.
    Validate { model: PathBuf },
    /// Convert a model to the other kind.
    Convert {
        model: PathBuf,
        #[arg(long)]
        to: Target,
        /// Root state for ternary to first-order conversion.
        #[arg(long)]
        root: Option<String>,
        /// Unraveling depth for ternary to first-order conversion.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Decide C-bisimilarity of two pointed models.
    Bisim { m1: PathBuf, s1: String, m2: PathBuf, s2: String },
    /// Check a derivation script.
    Prove { system: String, script: PathBuf },
    /// Fuzz the soundness of a proof system on random models.
    Fuzz {
        system: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 5)]
        max_states: usize,
        #[arg(long)]
        workers: Option<usize>,
        /// Also check the invalid schema `<a>^c (p | q) -> <a>^c p | <a>^c q`.
        #[arg(long)]
        inject_bogus: bool,
    },
    /// Generate a random model from a parameter file or inline JSON.
    Gen {
        #[arg(long)]
        kind: GenKind,
        params: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Output sink: plain text lines or a single JSON value.
struct Out {
    json: bool,
}

impl Out {
    fn emit(&self, text: impl AsRef<str>, value: Value) -> Result<()> {
        let mut stdout = std::io::stdout().lock();
        if self.json {
            writeln!(stdout, "{}", serde_json::to_string_pretty(&value)?)?;
        } else {
            writeln!(stdout, "{}", text.as_ref())?;
        }
        Ok(())
    }
}

fn load(path: &Path) -> Result<Model> {
    let (model, _) = Model::load(path).with_context(|| format!("loading {}", path.display()))?;
    Ok(model)
}

fn state_of(model: &Model, name: &str) -> Result<usize> {
    model
        .states()
        .iter()
        .position(|s| s == name)
        .with_context(|| format!("no state named `{name}`"))
}

fn formula_for(model: &Model, text: &str) -> Result<Formula> {
    parse(text, model.vocab()).with_context(|| format!("parsing `{text}`"))
}

fn model_value(m: &Model) -> Value {
    serde_json::from_str(&m.to_json_string()).expect("model JSON is valid")
}

fn truth_set(model: &Model, f: &Formula) -> Result<Vec<bool>> {
    Ok(match model {
        Model::Ternary(m) => truth_set_ternary(m, f)?,
        Model::Fo(m) => truth_set_fo(m, f)?,
    })
}

fn as_ternary(model: Model) -> TernaryModel {
    match model {
        Model::Ternary(m) => m,
        Model::Fo(m) => derive_ternary(&m),
    }
}

fn system(name: &str) -> Result<ProofSystem> {
    Ok(name.parse::<ProofSystem>()?)
}

fn write_model(out: &Out, model: &Model, output: Option<&Path>) -> Result<()> {
    match output {
        Some(path) => {
            model.save(path)?;
            out.emit(format!("wrote {}", path.display()), json!({ "written": path }))
        }
        None => {
            let text = model.to_json_string();
            out.emit(&text, model_value(model))
        }
    }
}

/// Runs one invocation and returns the exit code: 0 for success, true or
/// accepted; 1 for false, rejected or a finding.
pub fn run(cli: Cli) -> Result<i32> {
    let out = Out { json: cli.json };
    match cli.command {
        Command::Parse { formula } => {
            let f = parse_open(&formula)?;
            let langs: Vec<String> = f.language_of().iter().map(|l| l.to_string()).collect();
            out.emit(print(&f), json!({ "formula": print(&f), "languages": langs }))?;
            Ok(0)
        }
        Command::Check { model, state, formula } => {
            let m = load(&model)?;
            let s = state_of(&m, &state)?;
            let f = formula_for(&m, &formula)?;
            let holds = match &m {
                Model::Ternary(t) => eval_ternary(t, s, &f)?,
                Model::Fo(fo) => eval_fo(fo, s, &f)?,
            };
            out.emit(holds.to_string(), json!({ "state": state, "formula": print(&f), "holds": holds }))?;
            Ok(if holds { 0 } else { 1 })
        }
        Command::Valid { model, formula } => {
            let m = load(&model)?;
            let f = formula_for(&m, &formula)?;
            let set = truth_set(&m, &f)?;
            let failing: Vec<&String> = m.states().iter().zip(&set).filter(|(_, b)| !**b).map(|(s, _)| s).collect();
            let valid = failing.is_empty();
            let text = if valid {
                "true".to_string()
            } else {
                let names: Vec<&str> = failing.iter().map(|s| s.as_str()).collect();
                format!("false (fails at {})", names.join(", "))
            };
            out.emit(text, json!({ "formula": print(&f), "valid": valid, "failing": failing }))?;
            Ok(if valid { 0 } else { 1 })
        }
        Command::Refute { formula, max_states, budget, workers } => {
            if max_states == 0 {
                bail!("--max-states must be at least 1");
            }
            let f = parse_open(&formula)?;
            let vocab = Vocabulary::covering(&f.symbols());
            let opts = SearchOptions { max_states, budget, workers };
            match find_countermodel(&f, &vocab, &opts)? {
                Refutation::Countermodel { model, state } => {
                    let m = Model::Ternary(model);
                    let name = m.states()[state].clone();
                    let text = format!("countermodel at {name}\n{}", m.to_json_string());
                    out.emit(text, json!({ "result": "countermodel", "state": name, "model": model_value(&m) }))?;
                    Ok(1)
                }
                Refutation::NoneWithin { max_states, models } => {
                    out.emit(
                        format!("none within bound ({models} models up to {max_states} states)"),
                        json!({ "result": "none_within", "max_states": max_states, "models": models }),
                    )?;
                    Ok(0)
                }
                Refutation::BoundExceeded { states, required, budget } => {
                    bail!("bound exceeded: {states} states need {required} models, budget is {budget}")
                }
            }
        }
        Command::Translate { dir, formula } => {
            let f = parse_open(&formula)?;
            let g = match dir {
                Direction::Elkv2ml => translate_t(&f)?,
                Direction::Ml2elkv => translate_t_inv(&f)?,
            };
            out.emit(print(&g), json!({ "input": print(&f), "output": print(&g) }))?;
            Ok(0)
        }
        Command::Reduce { formula } => {
            let f = parse_open(&formula)?;
            let g = reduce_r(&f);
            out.emit(print(&g), json!({ "input": print(&f), "output": print(&g) }))?;
            Ok(0)
        }
        Command::Validate { model } => {
            let violations: Vec<String> = match load(&model)? {
                Model::Ternary(m) => validate_ternary(&m).iter().map(|v| v.to_string()).collect(),
                Model::Fo(_) => Vec::new(),
            };
            let text = if violations.is_empty() { "valid".to_string() } else { violations.join("\n") };
            out.emit(text, json!({ "valid": violations.is_empty(), "violations": violations }))?;
            Ok(if violations.is_empty() { 0 } else { 1 })
        }
        Command::Convert { model, to, root, depth, output } => {
            let m = load(&model)?;
            let converted = match (to, m) {
                (Target::Ternary, Model::Fo(fo)) => Model::Ternary(derive_ternary(&fo)),
                (Target::Fo, Model::Ternary(t)) => {
                    let root = match root {
                        Some(name) => t.state(&name)?,
                        None => 0,
                    };
                    Model::Fo(to_fo(&t, root, depth)?.0)
                }
                (Target::Ternary, m @ Model::Ternary(_)) | (Target::Fo, m @ Model::Fo(_)) => m,
            };
            write_model(&out, &converted, output.as_deref())?;
            Ok(0)
        }
        Command::Bisim { m1, s1, m2, s2 } => {
            let (a, b) = (load(&m1)?, load(&m2)?);
            let (i, j) = (state_of(&a, &s1)?, state_of(&b, &s2)?);
            let (a, b) = (as_ternary(a), as_ternary(b));
            for (side, m) in [("left", &a), ("right", &b)] {
                if let Some(v) = validate_ternary(m).first() {
                    bail!("{side} model violates frame conditions: {v}");
                }
            }
            let refinement = greatest_bisim(&a, &b);
            if refinement.relation.contains(i, j) {
                out.emit("bisimilar", json!({ "bisimilar": true, "pairs": refinement.relation.pairs.len() }))?;
                return Ok(0);
            }
            let (round, reason) = &refinement.removed[&(i, j)];
            let f = refinement.distinguishing_formula(&a, i, &b, j)?;
            let why = reason.describe(&a.states, &b.states);
            let text = format!("not bisimilar\nremoved in round {round}: {why}\ndistinguishing formula: {}", print(&f));
            out.emit(
                text,
                json!({ "bisimilar": false, "round": round, "reason": reason, "explanation": why, "formula": print(&f) }),
            )?;
            Ok(1)
        }
        Command::Prove { system: name, script } => {
            let sys = system(&name)?;
            let text = fs::read_to_string(&script).with_context(|| format!("reading {}", script.display()))?;
            let d = parse_script(&text)?;
            match check_derivation(sys, &d) {
                Ok(acc) => {
                    let text = format!("accepted: {} steps, concluding {}", acc.steps, print(&acc.conclusion));
                    out.emit(text, json!({ "accepted": true, "detail": acc }))?;
                    Ok(0)
                }
                Err(rej) => {
                    out.emit(
                        format!("rejected at step {}: {}", rej.step, rej.reason),
                        json!({ "accepted": false, "step": rej.step, "reason": rej.reason }),
                    )?;
                    Ok(1)
                }
            }
        }
        Command::Fuzz { system: name, trials, seed, max_states, workers, inject_bogus } => {
            let sys = system(&name)?;
            if trials == 0 || max_states == 0 {
                bail!("--trials and --max-states must be at least 1");
            }
            let opts = FuzzOptions {
                trials,
                seed,
                max_states,
                workers,
                extra_schemas: if inject_bogus { vec![BOGUS] } else { vec![] },
                ..FuzzOptions::default()
            };
            let report = soundness_fuzz(sys, &opts);
            let mut text = format!(
                "{sys}: {} trials, {} instances checked, {} findings",
                report.trials,
                report.checked,
                report.findings.len()
            );
            if let Some(first) = report.findings.first() {
                text.push_str(&format!("\nfirst: [{}] {} (trial {})", first.source, first.formula, first.trial));
            }
            out.emit(text, serde_json::to_value(&report)?)?;
            Ok(if report.is_sound() { 0 } else { 1 })
        }
        Command::Gen { kind, params, output } => {
            let raw = if params.trim_start().starts_with('{') {
                params
            } else {
                fs::read_to_string(&params).with_context(|| format!("reading {params}"))?
            };
            let p: GenParams = serde_json::from_str(&raw).context("parsing generator parameters")?;
            let model = match kind {
                GenKind::Value => Model::Fo(generate_value_induced(&p)?.0),
                GenKind::Direct => Model::Ternary(generate_direct(&p)?),
            };
            write_model(&out, &model, output.as_deref())?;
            Ok(0)
        }
    }
}
