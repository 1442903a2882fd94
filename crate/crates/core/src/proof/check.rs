use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::script::{Derivation, Justification, PositionSpec, Positions};
use super::{is_tautology, ProofSystem, Rule, Schema, MAX_TAUT_ATOMS};
use crate::syntax::{print, Formula, Path};

/// A derivation that checked out.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Accepted {
    pub system: ProofSystem,
    pub steps: usize,
    pub conclusion: Formula,
    pub rules_used: BTreeSet<Rule>,
    pub schemas_used: BTreeSet<String>,
}

/// The first step that failed, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, thiserror::Error)]
#[error("step {step}: {reason}")]
pub struct Rejection {
    pub step: usize,
    pub reason: String,
}

fn mismatch(expected: &Formula, stated: &Formula) -> String {
    format!("expected `{}`, stated `{}`", print(expected), print(stated))
}

/// Checks every step of `d` against the rules of `sys`.
pub fn check_derivation(sys: ProofSystem, d: &Derivation) -> Result<Accepted, Rejection> {
    let mut proved: BTreeMap<usize, &Formula> = BTreeMap::new();
    let mut rules_used = BTreeSet::new();
    let mut schemas_used = BTreeSet::new();
    let Some(last) = d.steps.last() else {
        return Err(Rejection { step: 0, reason: "empty derivation".into() });
    };
    for step in &d.steps {
        let reject = |reason: String| Rejection { step: step.number, reason };
        if proved.contains_key(&step.number) {
            return Err(reject(format!("step number {} used twice", step.number)));
        }
        let rule = step.justification.rule();
        if !sys.rules().contains(&rule) {
            return Err(reject(format!("{rule} is not a rule of {sys}")));
        }
        if !step.formula.in_language(sys.language()) {
            return Err(reject(format!("`{}` is not in {}", print(&step.formula), sys.language())));
        }
        let premise = |j: usize| -> Result<&Formula, Rejection> {
            proved
                .get(&j)
                .copied()
                .ok_or_else(|| reject(format!("step {j} is not an earlier step")))
        };
        let expect = |derived: Formula| -> Result<(), Rejection> {
            if derived == step.formula {
                Ok(())
            } else {
                Err(reject(mismatch(&derived, &step.formula)))
            }
        };
        match &step.justification {
            Justification::Taut => match is_tautology(&step.formula) {
                Some(true) => {}
                Some(false) => return Err(reject("not a propositional tautology".into())),
                None => {
                    return Err(reject(format!("more than {MAX_TAUT_ATOMS} propositional atoms")));
                }
            },
            Justification::Axiom { schema, agent, constant, bindings } => {
                let s = Schema::lookup(schema).map_err(|e| reject(e.to_string()))?;
                if !sys.schemas().contains(&s.name) {
                    return Err(reject(format!("{schema} is not an axiom of {sys}")));
                }
                if let Some(extra) = bindings.keys().find(|k| !s.metavariables().contains(*k)) {
                    return Err(reject(format!("{schema} has no metavariable `{extra}`")));
                }
                let mut sigma = super::identity_substitution(&s);
                sigma.extend(bindings.clone());
                expect(s.instantiate(&sigma, agent, constant).map_err(|e| reject(e.to_string()))?)?;
                schemas_used.insert(s.name.to_string());
            }
            Justification::Mp { minor, major } => {
                let a = premise(*minor)?;
                let imp = premise(*major)?;
                if *imp != Formula::implies(a.clone(), step.formula.clone()) {
                    return Err(reject(format!(
                        "step {major} is `{}`, not `{}`",
                        print(imp),
                        print(&Formula::implies(a.clone(), step.formula.clone()))
                    )));
                }
            }
            Justification::NecK { premise: j, agent } => {
                expect(Formula::boxed(agent.clone(), premise(*j)?.clone()))?;
            }
            Justification::NecKvR { premise: j, agent, constant } => {
                expect(Formula::bbox_u(agent.clone(), constant.clone(), premise(*j)?.clone()))?;
            }
            Justification::NecKvB { premise: j, agent, constant, side } => {
                expect(Formula::bbox_b(agent.clone(), constant.clone(), premise(*j)?.clone(), side.clone()))?;
            }
            Justification::Sub { premise: j, sigma } => {
                expect(premise(*j)?.substitute(sigma))?;
            }
            Justification::Re { premise: j, target, positions } => {
                let eq = premise(*j)?;
                let (from, to) = eq
                    .as_iff()
                    .ok_or_else(|| reject(format!("step {j} is not a biconditional")))?;
                let occ = target.occurrences(from);
                let chosen: BTreeSet<Path> = match positions {
                    Positions::All => occ.iter().cloned().collect(),
                    Positions::Listed(items) => {
                        let mut set = BTreeSet::new();
                        for item in items {
                            match item {
                                PositionSpec::Occurrence(n) => {
                                    let p = occ.get(*n).ok_or_else(|| {
                                        reject(format!("`{}` has {} occurrence(s) in the target", print(from), occ.len()))
                                    })?;
                                    set.insert(p.clone());
                                }
                                PositionSpec::Path(p) => {
                                    set.insert(p.clone());
                                }
                            }
                        }
                        set
                    }
                };
                if chosen.is_empty() {
                    return Err(reject(format!("`{}` does not occur in the target", print(from))));
                }
                let replaced = target.replace_at(&chosen, from, to).map_err(|e| reject(e.to_string()))?;
                expect(Formula::iff(target.clone(), replaced))?;
            }
        }
        rules_used.insert(rule);
        proved.insert(step.number, &step.formula);
    }
    Ok(Accepted {
        system: sys,
        steps: d.steps.len(),
        conclusion: last.formula.clone(),
        rules_used,
        schemas_used,
    })
}
