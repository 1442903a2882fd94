//! Translations between the languages.

use super::{negate, Formula, LanguageTag, SyntaxError};

/// Translation from the first-order language into the unary ternary language:
/// `Kv_i(φ, c)` becomes `⊡_i^c ¬T(φ)`, `K_i` becomes `□_i`.
pub fn translate_t(f: &Formula) -> Result<Formula, SyntaxError> {
    if !f.in_language(LanguageTag::ELKvR) {
        return Err(SyntaxError::WrongLanguage(LanguageTag::ELKvR));
    }
    Ok(to_ml(f))
}

fn to_ml(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Prop(_) => f.clone(),
        Formula::Neg(a) => Formula::neg(to_ml(a)),
        Formula::And(a, b) => Formula::and(to_ml(a), to_ml(b)),
        Formula::Box(i, a) => Formula::boxed(i.clone(), to_ml(a)),
        Formula::KvCond(i, a, c) => Formula::bbox_u(i.clone(), c.clone(), Formula::neg(to_ml(a))),
        Formula::BBoxU(..) | Formula::BBoxB(..) => unreachable!("checked by language_of"),
    }
}

/// Inverse translation: `⊡_i^c ψ` becomes `Kv_i(¬ψ', c)`, with a leading
/// double negation cancelled so that `⊡_i^c ¬p` maps back to `Kv_i(p, c)`.
pub fn translate_t_inv(f: &Formula) -> Result<Formula, SyntaxError> {
    if !f.in_language(LanguageTag::MLKvR) {
        return Err(SyntaxError::WrongLanguage(LanguageTag::MLKvR));
    }
    Ok(to_el(f))
}

fn to_el(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Prop(_) => f.clone(),
        Formula::Neg(a) => Formula::neg(to_el(a)),
        Formula::And(a, b) => Formula::and(to_el(a), to_el(b)),
        Formula::Box(i, a) => Formula::boxed(i.clone(), to_el(a)),
        Formula::BBoxU(i, c, a) => Formula::kv(i.clone(), negate(&to_el(a)), c.clone()),
        Formula::KvCond(..) | Formula::BBoxB(..) => unreachable!("checked by language_of"),
    }
}

/// Rewrites every unary `⊡_i^c ψ` as the binary `⊡_i^c(ψ, ψ)`.
pub fn embed_unary(f: &Formula) -> Result<Formula, SyntaxError> {
    if !f.in_language(LanguageTag::MLKvR) {
        return Err(SyntaxError::WrongLanguage(LanguageTag::MLKvR));
    }
    Ok(embed(f))
}

fn embed(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Prop(_) => f.clone(),
        Formula::Neg(a) => Formula::neg(embed(a)),
        Formula::And(a, b) => Formula::and(embed(a), embed(b)),
        Formula::Box(i, a) => Formula::boxed(i.clone(), embed(a)),
        Formula::BBoxU(i, c, a) => {
            let a = embed(a);
            Formula::bbox_b(i.clone(), c.clone(), a.clone(), a)
        }
        Formula::KvCond(..) | Formula::BBoxB(..) => unreachable!("checked by language_of"),
    }
}

/// The three-disjunct unary expansion of `◇_i^c(φ, ψ)`:
///
/// ```text
/// (◇^c φ ∧ ◇ψ) ∨ (◇^c ψ ∧ ◇φ) ∨ (◇φ ∧ ◇ψ ∧ ¬◇^c φ ∧ ¬◇^c ψ ∧ ◇^c(φ ∨ ψ))
/// ```
pub fn diamond_expansion(agent: &str, constant: &str, phi: &Formula, psi: &Formula) -> Formula {
    let dc = |f: &Formula| Formula::dia_u(agent, constant, f.clone());
    let d = |f: &Formula| Formula::dia(agent, f.clone());
    let first = Formula::and(dc(phi), d(psi));
    let second = Formula::and(dc(psi), d(phi));
    let third = Formula::conj([
        d(phi),
        d(psi),
        Formula::neg(dc(phi)),
        Formula::neg(dc(psi)),
        dc(&Formula::or(phi.clone(), psi.clone())),
    ]);
    Formula::disj([first, second, third])
}

/// Eliminates the binary modality, innermost first.
///
/// `⊡_i^c(φ, ψ)` is `¬◇_i^c(¬φ, ¬ψ)`, and a diamond is replaced by
/// [`diamond_expansion`] on the reduced arguments. Negations introduced by the
/// duality are cancelled against existing ones, so `◇^c(p, q)` reduces to the
/// template on `p` and `q` rather than on `¬¬p` and `¬¬q`.
pub fn reduce_r(f: &Formula) -> Formula {
    match f {
        Formula::Top | Formula::Prop(_) => f.clone(),
        Formula::Neg(inner) => match &**inner {
            Formula::BBoxB(i, c, a, b) => reduce_diamond(i, c, a, b),
            _ => Formula::neg(reduce_r(inner)),
        },
        Formula::And(a, b) => Formula::and(reduce_r(a), reduce_r(b)),
        Formula::Box(i, a) => Formula::boxed(i.clone(), reduce_r(a)),
        Formula::KvCond(i, a, c) => Formula::kv(i.clone(), reduce_r(a), c.clone()),
        Formula::BBoxU(i, c, a) => Formula::bbox_u(i.clone(), c.clone(), reduce_r(a)),
        Formula::BBoxB(i, c, a, b) => Formula::neg(reduce_diamond(i, c, a, b)),
    }
}

// ◇^c(φ, ψ) given the box arguments ¬φ, ¬ψ
fn reduce_diamond(agent: &str, constant: &str, box_a: &Formula, box_b: &Formula) -> Formula {
    let phi = negate(&reduce_r(box_a));
    let psi = negate(&reduce_r(box_b));
    diamond_expansion(agent, constant, &phi, &psi)
}
