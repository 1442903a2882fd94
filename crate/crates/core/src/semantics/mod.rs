//! Truth on first-order models (`⊨`) and on ternary models (`⊩`), plus
//! bounded countermodel search.

mod search;
mod structure;

use thiserror::Error;

use crate::models::{FoModel, StateId, TernaryModel};
use crate::syntax::{Formula, LanguageTag, SyntaxError, Vocabulary};

pub use search::{find_countermodel, Refutation, SearchOptions};
pub(crate) use structure::{Program, Structure};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("state index {0} out of range")]
    StateOutOfRange(StateId),
    #[error(transparent)]
    Symbol(#[from] SyntaxError),
    #[error("{found} formula cannot be evaluated on a {model} model")]
    Language { found: &'static str, model: &'static str },
}

fn check_ternary_query(vocab: &Vocabulary, f: &Formula) -> Result<(), SemanticsError> {
    vocab.check(f)?;
    let langs = f.language_of();
    if !langs.contains(&LanguageTag::MLKvR) && !langs.contains(&LanguageTag::MLKvB) {
        let mut kv = false;
        f.walk(&mut |g| kv |= matches!(g, Formula::KvCond(..)));
        if kv {
            return Err(SemanticsError::Language { found: "ELKvR", model: "ternary" });
        }
    }
    Ok(())
}

/// The set of states of `m` where `f` holds, as a boolean per state.
///
/// Unary and binary ternary modalities may be mixed; `Kv` is rejected.
pub fn truth_set_ternary(m: &TernaryModel, f: &Formula) -> Result<Vec<bool>, SemanticsError> {
    check_ternary_query(&m.vocab, f)?;
    let st = Structure::from_model(m);
    let prog = Program::compile(f, &m.vocab);
    let mut ext = Vec::new();
    let root = prog.run(&st, &mut ext);
    Ok((0..m.len()).map(|s| structure::get(root, s)).collect())
}

/// `M, s ⊩ f`.
pub fn eval_ternary(m: &TernaryModel, s: StateId, f: &Formula) -> Result<bool, SemanticsError> {
    if s >= m.len() {
        return Err(SemanticsError::StateOutOfRange(s));
    }
    Ok(truth_set_ternary(m, f)?[s])
}

/// `f` holds at every state of `m`.
pub fn valid_on(m: &TernaryModel, f: &Formula) -> Result<bool, SemanticsError> {
    Ok(truth_set_ternary(m, f)?.into_iter().all(|b| b))
}

/// The set of states of `m` where the ELKvR formula `f` holds.
pub fn truth_set_fo(m: &FoModel, f: &Formula) -> Result<Vec<bool>, SemanticsError> {
    m.vocab.check(f)?;
    if !f.in_language(LanguageTag::ELKvR) {
        return Err(SemanticsError::Language { found: "ternary-modal", model: "first-order" });
    }
    Ok(fo_ext(m, f))
}

/// `F, s ⊨ f`.
pub fn eval_fo(m: &FoModel, s: StateId, f: &Formula) -> Result<bool, SemanticsError> {
    if s >= m.len() {
        return Err(SemanticsError::StateOutOfRange(s));
    }
    Ok(truth_set_fo(m, f)?[s])
}

fn fo_ext(m: &FoModel, f: &Formula) -> Vec<bool> {
    let n = m.len();
    match f {
        Formula::Top => vec![true; n],
        Formula::Prop(p) => m.val.iter().map(|v| v.contains(p)).collect(),
        Formula::Neg(a) => fo_ext(m, a).into_iter().map(|b| !b).collect(),
        Formula::And(a, b) => fo_ext(m, a).into_iter().zip(fo_ext(m, b)).map(|(x, y)| x && y).collect(),
        Formula::Box(i, a) => {
            let ea = fo_ext(m, a);
            (0..n).map(|s| m.successors(i, s).into_iter().all(|t| ea[t])).collect()
        }
        Formula::KvCond(i, a, c) => {
            let ea = fo_ext(m, a);
            (0..n)
                .map(|s| {
                    let mut values = m.successors(i, s).into_iter().filter(|&t| ea[t]).map(|t| m.value(c, t));
                    match values.next() {
                        None => true,
                        Some(first) => values.all(|v| v == first),
                    }
                })
                .collect()
        }
        Formula::BBoxU(..) | Formula::BBoxB(..) => unreachable!("checked by language_of"),
    }
}
