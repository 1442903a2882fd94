use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::{LanguageTag, SyntaxError};

/// A position inside a formula: the sequence of child indices from the root.
///
/// Unary constructors have a single child `0`; `And` and the binary box have
/// children `0` and `1`.
pub type Path = Vec<usize>;

/// Formula AST shared by all four languages.
///
/// Only primitive constructors are stored. Derived connectives (`F`, `|`,
/// `->`, `<->`, the diamonds) are expanded by the smart constructors below and
/// recognized again by the `as_*` views, which the printer uses to resugar.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Top,
    Prop(String),
    Neg(Arc<Formula>),
    And(Arc<Formula>, Arc<Formula>),
    /// `K_i` in the first-order language, `□_i` in the modal ones.
    Box(String, Arc<Formula>),
    /// `Kv_i(φ, c)`: agent, condition, constant.
    KvCond(String, Arc<Formula>, String),
    /// Unary `⊡_i^c φ`: agent, constant, argument.
    BBoxU(String, String, Arc<Formula>),
    /// Binary `⊡_i^c(φ, ψ)`: agent, constant, arguments.
    BBoxB(String, String, Arc<Formula>, Arc<Formula>),
}

/// Symbols occurring in a formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Symbols {
    pub agents: BTreeSet<String>,
    pub props: BTreeSet<String>,
    pub constants: BTreeSet<String>,
}

impl Symbols {
    pub fn extend(&mut self, other: &Symbols) {
        self.agents.extend(other.agents.iter().cloned());
        self.props.extend(other.props.iter().cloned());
        self.constants.extend(other.constants.iter().cloned());
    }
}

impl Formula {
    pub fn top() -> Formula {
        Formula::Top
    }

    pub fn bot() -> Formula {
        Formula::neg(Formula::Top)
    }

    pub fn prop(p: impl Into<String>) -> Formula {
        Formula::Prop(p.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Formula::Neg(Arc::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::neg(Formula::and(Formula::neg(a), Formula::neg(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::neg(Formula::and(a, Formula::neg(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn boxed(agent: impl Into<String>, f: Formula) -> Formula {
        Formula::Box(agent.into(), Arc::new(f))
    }

    pub fn dia(agent: impl Into<String>, f: Formula) -> Formula {
        Formula::neg(Formula::boxed(agent, Formula::neg(f)))
    }

    pub fn kv(agent: impl Into<String>, f: Formula, c: impl Into<String>) -> Formula {
        Formula::KvCond(agent.into(), Arc::new(f), c.into())
    }

    pub fn bbox_u(agent: impl Into<String>, c: impl Into<String>, f: Formula) -> Formula {
        Formula::BBoxU(agent.into(), c.into(), Arc::new(f))
    }

    pub fn dia_u(agent: impl Into<String>, c: impl Into<String>, f: Formula) -> Formula {
        Formula::neg(Formula::bbox_u(agent, c, Formula::neg(f)))
    }

    pub fn bbox_b(agent: impl Into<String>, c: impl Into<String>, f: Formula, g: Formula) -> Formula {
        Formula::BBoxB(agent.into(), c.into(), Arc::new(f), Arc::new(g))
    }

    pub fn dia_b(agent: impl Into<String>, c: impl Into<String>, f: Formula, g: Formula) -> Formula {
        Formula::neg(Formula::bbox_b(agent, c, Formula::neg(f), Formula::neg(g)))
    }

    /// Left-nested conjunction; `T` for an empty iterator.
    pub fn conj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::Top)
    }

    /// Left-nested disjunction; `F` for an empty iterator.
    pub fn disj(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or_else(Formula::bot)
    }

    pub fn is_bot(&self) -> bool {
        matches!(self, Formula::Neg(inner) if **inner == Formula::Top)
    }

    pub fn as_neg(&self) -> Option<&Formula> {
        match self {
            Formula::Neg(f) => Some(f),
            _ => None,
        }
    }

    /// Recognizes `¬(¬a ∧ ¬b)`.
    pub fn as_or(&self) -> Option<(&Formula, &Formula)> {
        match self.as_neg()? {
            Formula::And(a, b) => Some((a.as_neg()?, b.as_neg()?)),
            _ => None,
        }
    }

    /// Recognizes `¬(a ∧ ¬b)`.
    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self.as_neg()? {
            Formula::And(a, b) => Some((a, b.as_neg()?)),
            _ => None,
        }
    }

    /// Recognizes `(a → b) ∧ (b → a)`.
    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::And(l, r) => {
                let (a, b) = l.as_implies()?;
                let (b2, a2) = r.as_implies()?;
                (a == a2 && b == b2).then_some((a, b))
            }
            _ => None,
        }
    }

    /// Recognizes `¬□_i¬φ`.
    pub fn as_dia(&self) -> Option<(&str, &Formula)> {
        match self.as_neg()? {
            Formula::Box(i, f) => Some((i, f.as_neg()?)),
            _ => None,
        }
    }

    /// Recognizes `¬⊡_i^c¬φ`.
    pub fn as_dia_u(&self) -> Option<(&str, &str, &Formula)> {
        match self.as_neg()? {
            Formula::BBoxU(i, c, f) => Some((i, c, f.as_neg()?)),
            _ => None,
        }
    }

    /// Recognizes `¬⊡_i^c(¬φ, ¬ψ)`.
    pub fn as_dia_b(&self) -> Option<(&str, &str, &Formula, &Formula)> {
        match self.as_neg()? {
            Formula::BBoxB(i, c, f, g) => Some((i, c, f.as_neg()?, g.as_neg()?)),
            _ => None,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Top | Formula::Prop(_) => vec![],
            Formula::Neg(f) | Formula::Box(_, f) | Formula::KvCond(_, f, _) | Formula::BBoxU(_, _, f) => {
                vec![f]
            }
            Formula::And(a, b) | Formula::BBoxB(_, _, a, b) => vec![a, b],
        }
    }

    /// Number of AST nodes.
    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(Formula::size).sum::<usize>()
    }

    /// Maximal nesting of modal operators; `Kv` and both boxes count as one step.
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Top | Formula::Prop(_) => 0,
            Formula::Neg(f) => f.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Box(_, f) | Formula::KvCond(_, f, _) | Formula::BBoxU(_, _, f) => 1 + f.modal_depth(),
            Formula::BBoxB(_, _, a, b) => 1 + a.modal_depth().max(b.modal_depth()),
        }
    }

    pub fn symbols(&self) -> Symbols {
        let mut out = Symbols::default();
        self.collect_symbols(&mut out);
        out
    }

    fn collect_symbols(&self, out: &mut Symbols) {
        match self {
            Formula::Top => {}
            Formula::Prop(p) => {
                out.props.insert(p.clone());
            }
            Formula::Neg(f) => f.collect_symbols(out),
            Formula::And(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            Formula::Box(i, f) => {
                out.agents.insert(i.clone());
                f.collect_symbols(out);
            }
            Formula::KvCond(i, f, c) | Formula::BBoxU(i, c, f) => {
                out.agents.insert(i.clone());
                out.constants.insert(c.clone());
                f.collect_symbols(out);
            }
            Formula::BBoxB(i, c, a, b) => {
                out.agents.insert(i.clone());
                out.constants.insert(c.clone());
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
        }
    }

    /// Every language whose grammar generates this formula.
    ///
    /// `BBoxU` is not accepted in `MLKvB`; use [`super::embed_unary`] to move
    /// there explicitly.
    pub fn language_of(&self) -> BTreeSet<LanguageTag> {
        let mut kv = false;
        let mut unary = false;
        let mut binary = false;
        let mut unary_non_bot = false;
        self.walk(&mut |f| match f {
            Formula::KvCond(..) => kv = true,
            Formula::BBoxU(_, _, arg) => {
                unary = true;
                if !normalizes_to_bot(arg) {
                    unary_non_bot = true;
                }
            }
            Formula::BBoxB(..) => binary = true,
            _ => {}
        });
        let mut out = BTreeSet::new();
        if !unary && !binary {
            out.insert(LanguageTag::ELKvR);
        }
        if !kv && !binary {
            out.insert(LanguageTag::MLKvR);
            if !unary_non_bot {
                out.insert(LanguageTag::MLKv);
            }
        }
        if !kv && !unary {
            out.insert(LanguageTag::MLKvB);
        }
        out
    }

    pub fn in_language(&self, tag: LanguageTag) -> bool {
        self.language_of().contains(&tag)
    }

    /// Pre-order traversal.
    pub fn walk<'a>(&'a self, visit: &mut impl FnMut(&'a Formula)) {
        visit(self);
        for child in self.children() {
            child.walk(visit);
        }
    }

    /// Simultaneous uniform substitution of propositions.
    pub fn substitute(&self, sigma: &BTreeMap<String, Formula>) -> Formula {
        if sigma.is_empty() {
            return self.clone();
        }
        self.map_props(&mut |p| sigma.get(p).cloned())
    }

    /// Rebuilds the formula, replacing each proposition for which `f` returns
    /// `Some`.
    pub fn map_props(&self, f: &mut impl FnMut(&str) -> Option<Formula>) -> Formula {
        match self {
            Formula::Top => Formula::Top,
            Formula::Prop(p) => f(p).unwrap_or_else(|| self.clone()),
            Formula::Neg(a) => Formula::neg(a.map_props(f)),
            Formula::And(a, b) => Formula::and(a.map_props(f), b.map_props(f)),
            Formula::Box(i, a) => Formula::boxed(i.clone(), a.map_props(f)),
            Formula::KvCond(i, a, c) => Formula::kv(i.clone(), a.map_props(f), c.clone()),
            Formula::BBoxU(i, c, a) => Formula::bbox_u(i.clone(), c.clone(), a.map_props(f)),
            Formula::BBoxB(i, c, a, b) => {
                Formula::bbox_b(i.clone(), c.clone(), a.map_props(f), b.map_props(f))
            }
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Formula> {
        let Some((&first, rest)) = path.split_first() else {
            return Some(self);
        };
        self.children().get(first)?.subterm(rest)
    }

    /// Paths of every occurrence of `pattern`, in pre-order.
    pub fn occurrences(&self, pattern: &Formula) -> Vec<Path> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_occurrences(pattern, &mut path, &mut out);
        out
    }

    fn collect_occurrences(&self, pattern: &Formula, path: &mut Path, out: &mut Vec<Path>) {
        if self == pattern {
            out.push(path.clone());
        }
        for (k, child) in self.children().into_iter().enumerate() {
            path.push(k);
            child.collect_occurrences(pattern, path, out);
            path.pop();
        }
    }

    /// Replaces the occurrences of `from` at `positions` by `to`.
    ///
    /// Every position must address a subterm equal to `from`. Such positions
    /// can never nest, since a formula is not a proper subterm of itself.
    pub fn replace_at(&self, positions: &BTreeSet<Path>, from: &Formula, to: &Formula) -> Result<Formula, SyntaxError> {
        for p in positions {
            match self.subterm(p) {
                None => return Err(SyntaxError::InvalidPath(p.clone())),
                Some(sub) if sub != from => return Err(SyntaxError::PathMismatch(p.clone())),
                Some(_) => {}
            }
        }
        let mut prefix = Vec::new();
        Ok(self.replace_rec(positions, to, &mut prefix))
    }

    fn replace_rec(&self, positions: &BTreeSet<Path>, to: &Formula, prefix: &mut Path) -> Formula {
        if positions.contains(prefix) {
            return to.clone();
        }
        if !positions.iter().any(|p| p.starts_with(prefix)) {
            return self.clone();
        }
        let mut child = |k: usize, f: &Formula| {
            prefix.push(k);
            let out = f.replace_rec(positions, to, prefix);
            prefix.pop();
            out
        };
        match self {
            Formula::Top | Formula::Prop(_) => self.clone(),
            Formula::Neg(a) => Formula::neg(child(0, a)),
            Formula::And(a, b) => {
                let a = child(0, a);
                Formula::and(a, child(1, b))
            }
            Formula::Box(i, a) => Formula::boxed(i.clone(), child(0, a)),
            Formula::KvCond(i, a, c) => Formula::kv(i.clone(), child(0, a), c.clone()),
            Formula::BBoxU(i, c, a) => Formula::bbox_u(i.clone(), c.clone(), child(0, a)),
            Formula::BBoxB(i, c, a, b) => {
                let a = child(0, a);
                Formula::bbox_b(i.clone(), c.clone(), a, child(1, b))
            }
        }
    }

    /// Removes every `¬¬` pair.
    pub fn cancel_double_negations(&self) -> Formula {
        match self {
            Formula::Top | Formula::Prop(_) => self.clone(),
            Formula::Neg(a) => match &**a {
                Formula::Neg(b) => b.cancel_double_negations(),
                _ => Formula::neg(a.cancel_double_negations()),
            },
            Formula::And(a, b) => Formula::and(a.cancel_double_negations(), b.cancel_double_negations()),
            Formula::Box(i, a) => Formula::boxed(i.clone(), a.cancel_double_negations()),
            Formula::KvCond(i, a, c) => Formula::kv(i.clone(), a.cancel_double_negations(), c.clone()),
            Formula::BBoxU(i, c, a) => Formula::bbox_u(i.clone(), c.clone(), a.cancel_double_negations()),
            Formula::BBoxB(i, c, a, b) => Formula::bbox_b(
                i.clone(),
                c.clone(),
                a.cancel_double_negations(),
                b.cancel_double_negations(),
            ),
        }
    }
}

/// Negation that strips an existing outer `¬` instead of stacking a second one.
pub fn negate(f: &Formula) -> Formula {
    match f {
        Formula::Neg(inner) => (**inner).clone(),
        _ => Formula::neg(f.clone()),
    }
}

/// `⊥` up to `¬¬`: an odd number of negations over `T`.
pub fn normalizes_to_bot(f: &Formula) -> bool {
    let mut negs = 0usize;
    let mut cur = f;
    while let Formula::Neg(inner) = cur {
        negs += 1;
        cur = inner;
    }
    *cur == Formula::Top && negs % 2 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::prop("p")
    }
    fn q() -> Formula {
        Formula::prop("q")
    }

    #[test]
    fn modal_depth_counts_every_modality_once() {
        assert_eq!(p().modal_depth(), 0);
        let f = Formula::boxed("a", Formula::dia_b("a", "c", p(), q()));
        assert_eq!(f.modal_depth(), 2);
        let g = Formula::kv("a", Formula::boxed("a", p()), "c");
        assert_eq!(g.modal_depth(), 2);
    }

    #[test]
    fn replace_some_occurrences() {
        let f = Formula::and(p(), p());
        let left: BTreeSet<Path> = [vec![0]].into();
        assert_eq!(f.replace_at(&left, &p(), &q()).unwrap(), Formula::and(q(), p()));
        let all: BTreeSet<Path> = f.occurrences(&p()).into_iter().collect();
        assert_eq!(f.replace_at(&all, &p(), &q()).unwrap(), Formula::and(q(), q()));
        assert_eq!(f.replace_at(&BTreeSet::new(), &p(), &q()).unwrap(), f);
    }

    #[test]
    fn replace_rejects_bad_paths() {
        let f = Formula::and(p(), q());
        let bad: BTreeSet<Path> = [vec![1]].into();
        assert!(matches!(f.replace_at(&bad, &p(), &q()), Err(SyntaxError::PathMismatch(_))));
        let missing: BTreeSet<Path> = [vec![2]].into();
        assert!(matches!(f.replace_at(&missing, &p(), &q()), Err(SyntaxError::InvalidPath(_))));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let f = Formula::implies(p(), q());
        let sigma: BTreeMap<String, Formula> = [("p".to_string(), q()), ("q".to_string(), p())].into();
        assert_eq!(f.substitute(&sigma), Formula::implies(q(), p()));
        assert_eq!(f.substitute(&BTreeMap::new()), f);
    }

    #[test]
    fn bot_normalization() {
        assert!(normalizes_to_bot(&Formula::bot()));
        assert!(normalizes_to_bot(&Formula::neg(Formula::neg(Formula::bot()))));
        assert!(!normalizes_to_bot(&Formula::neg(Formula::bot())));
        assert!(!normalizes_to_bot(&Formula::neg(p())));
    }

    #[test]
    fn derived_views_recognize_their_constructors() {
        assert_eq!(Formula::or(p(), q()).as_or(), Some((&p(), &q())));
        assert_eq!(Formula::implies(p(), q()).as_implies(), Some((&p(), &q())));
        assert_eq!(Formula::iff(p(), q()).as_iff(), Some((&p(), &q())));
        assert_eq!(Formula::dia("a", p()).as_dia(), Some(("a", &p())));
        assert_eq!(Formula::dia_u("a", "c", p()).as_dia_u(), Some(("a", "c", &p())));
        assert_eq!(Formula::dia_b("a", "c", p(), q()).as_dia_b(), Some(("a", "c", &p(), &q())));
    }
}
