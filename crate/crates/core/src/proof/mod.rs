//! Hilbert-style systems for the ternary languages: schemas, rules,
//! derivation scripts, a derivation checker and a soundness fuzzer.

mod check;
mod fuzz;
mod script;
mod taut;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{parse_open, Formula, LanguageTag};

pub use check::{check_derivation, Accepted, Rejection};
pub use fuzz::{soundness_fuzz, Finding, FuzzOptions, FuzzReport};
pub use script::{parse_script, Derivation, Justification, PositionSpec, Positions, Step};
pub use taut::{is_tautology, skeleton_atoms, MAX_TAUT_ATOMS};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProofError {
    #[error("unknown schema `{0}`")]
    UnknownSchema(String),
    #[error("schema `{schema}` is not part of {system}")]
    SchemaNotInSystem { schema: String, system: ProofSystem },
    #[error("substitution for `{schema}` leaves `{var}` unbound")]
    IncompleteSubstitution { schema: String, var: String },
    #[error("unknown proof system `{0}` (expected SMLKVr, SMLKVb or SMLKV)")]
    UnknownSystem(String),
    #[error("line {line}: {msg}")]
    Script { line: usize, msg: String },
}

/// The three systems.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProofSystem {
    #[serde(rename = "SMLKVr")]
    SmlkvR,
    #[serde(rename = "SMLKVb")]
    SmlkvB,
    #[serde(rename = "SMLKV")]
    Smlkv,
}

/// Rules of inference. `TAUT` and axiom instances are listed as rules so that
/// a script step always has exactly one justification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    Taut,
    Axiom,
    Mp,
    NecK,
    NecKvR,
    NecKvB,
    Sub,
    Re,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Taut => "TAUT",
            Rule::Axiom => "AX",
            Rule::Mp => "MP",
            Rule::NecK => "NECK",
            Rule::NecKvR => "NECKvR",
            Rule::NecKvB => "NECKvB",
            Rule::Sub => "SUB",
            Rule::Re => "RE",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl ProofSystem {
    pub const ALL: [ProofSystem; 3] = [ProofSystem::SmlkvR, ProofSystem::SmlkvB, ProofSystem::Smlkv];

    pub fn name(self) -> &'static str {
        match self {
            ProofSystem::SmlkvR => "SMLKVr",
            ProofSystem::SmlkvB => "SMLKVb",
            ProofSystem::Smlkv => "SMLKV",
        }
    }

    /// Axiom schemas other than `TAUT`.
    pub fn schemas(self) -> &'static [&'static str] {
        match self {
            ProofSystem::SmlkvR => &["DISTK", "DISTKvR", "KvRor"],
            ProofSystem::SmlkvB => &["DISTK", "DISTKvB", "SYM", "INCL", "ATEUC"],
            ProofSystem::Smlkv => &["DISTK", "INCLT"],
        }
    }

    pub fn rules(self) -> &'static [Rule] {
        use Rule::*;
        match self {
            ProofSystem::SmlkvR => &[Taut, Axiom, Mp, NecK, NecKvR, Sub, Re],
            ProofSystem::SmlkvB => &[Taut, Axiom, Mp, NecK, NecKvB, Sub, Re],
            ProofSystem::Smlkv => &[Taut, Axiom, Mp, NecK, Sub, Re],
        }
    }

    /// The language every step formula must belong to.
    pub fn language(self) -> LanguageTag {
        match self {
            ProofSystem::SmlkvR => LanguageTag::MLKvR,
            ProofSystem::SmlkvB => LanguageTag::MLKvB,
            ProofSystem::Smlkv => LanguageTag::MLKv,
        }
    }
}

impl fmt::Display for ProofSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProofSystem {
    type Err = ProofError;

    fn from_str(s: &str) -> Result<ProofSystem, ProofError> {
        ProofSystem::ALL
            .into_iter()
            .find(|sys| sys.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| ProofError::UnknownSystem(s.to_string()))
    }
}

/// A named axiom schema over metavariables `p`, `q`, `r`, written with
/// agent `a` and constant `c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Schema {
    pub name: &'static str,
    pub text: &'static str,
}

const SCHEMAS: &[Schema] = &[
    Schema { name: "DISTK", text: "[a](p -> q) -> ([a]p -> [a]q)" },
    Schema { name: "DISTKvR", text: "[a](p -> q) -> ([a]^c p -> [a]^c q)" },
    Schema { name: "KvRor", text: "<a>(p & q) & <a>^c (p | q) -> <a>^c p | <a>^c q" },
    Schema { name: "DISTKvB", text: "[a]^c(p -> q, r) -> ([a]^c(p, r) -> [a]^c(q, r))" },
    Schema { name: "SYM", text: "[a]^c(p, q) -> [a]^c(q, p)" },
    Schema { name: "INCL", text: "<a>^c(p, q) -> <a>p" },
    Schema { name: "ATEUC", text: "<a>^c(p, q) & <a>r -> <a>^c(p, r) | <a>^c(q, r)" },
    Schema { name: "INCLT", text: "<a>^c T -> <a>T" },
];

/// Unary diamond distributing over disjunction. Not valid; used to check
/// that the fuzzer and the countermodel search catch unsound schemas.
pub const BOGUS: Schema = Schema { name: "BOGUS", text: "<a>^c (p | q) -> <a>^c p | <a>^c q" };

impl Schema {
    pub fn lookup(name: &str) -> Result<Schema, ProofError> {
        SCHEMAS
            .iter()
            .chain([&BOGUS])
            .find(|s| s.name == name)
            .cloned()
            .ok_or_else(|| ProofError::UnknownSchema(name.to_string()))
    }

    pub fn formula(&self) -> Formula {
        parse_open(self.text).expect("schema text parses")
    }

    /// Metavariables in order of name.
    pub fn metavariables(&self) -> BTreeSet<String> {
        self.formula().symbols().props
    }

    /// Instance with every agent renamed to `agent`, every constant to
    /// `constant`, and metavariables replaced simultaneously by `sigma`.
    pub fn instantiate(
        &self,
        sigma: &BTreeMap<String, Formula>,
        agent: &str,
        constant: &str,
    ) -> Result<Formula, ProofError> {
        if let Some(var) = self.metavariables().into_iter().find(|v| !sigma.contains_key(v)) {
            return Err(ProofError::IncompleteSubstitution { schema: self.name.to_string(), var });
        }
        Ok(rename_modalities(&self.formula(), agent, constant).substitute(sigma))
    }
}

fn rename_modalities(f: &Formula, agent: &str, constant: &str) -> Formula {
    let r = |g: &Formula| rename_modalities(g, agent, constant);
    match f {
        Formula::Top | Formula::Prop(_) => f.clone(),
        Formula::Neg(a) => Formula::neg(r(a)),
        Formula::And(a, b) => Formula::and(r(a), r(b)),
        Formula::Box(_, a) => Formula::boxed(agent, r(a)),
        Formula::KvCond(_, a, _) => Formula::kv(agent, r(a), constant),
        Formula::BBoxU(_, _, a) => Formula::bbox_u(agent, constant, r(a)),
        Formula::BBoxB(_, _, a, b) => Formula::bbox_b(agent, constant, r(a), r(b)),
    }
}

/// The instance of `schema` in `sys` under `sigma`, with the schema's agent
/// and constant instantiated to `agent` and `constant`.
pub fn axiom_instance(
    sys: ProofSystem,
    schema: &str,
    sigma: &BTreeMap<String, Formula>,
    agent: &str,
    constant: &str,
) -> Result<Formula, ProofError> {
    let s = Schema::lookup(schema)?;
    if !sys.schemas().contains(&s.name) {
        return Err(ProofError::SchemaNotInSystem { schema: schema.to_string(), system: sys });
    }
    s.instantiate(sigma, agent, constant)
}

/// The substitution sending every metavariable of `schema` to itself.
pub fn identity_substitution(schema: &Schema) -> BTreeMap<String, Formula> {
    schema.metavariables().into_iter().map(|v| (v.clone(), Formula::prop(v))).collect()
}

/// Both directions of the equivalence between the rule NECKvR and the axiom
/// `[a]^c ~F` in SMLKVr.
#[derive(Clone, Debug)]
pub struct NeckvEquivalence {
    /// `[a]^c ~F` by NECKvR.
    pub axiom_from_rule: Derivation,
    /// `[a]^c ~F -> [a]^c (p | ~p)` from DISTKvR and NECK, without NECKvR.
    pub rule_from_axiom: Derivation,
}

/// The shipped, checked derivations of both directions.
pub fn derive_equivalent_neckv() -> NeckvEquivalence {
    let load = |text: &str| {
        let d = parse_script(text).expect("shipped script parses");
        check_derivation(ProofSystem::SmlkvR, &d).expect("shipped script checks");
        d
    };
    NeckvEquivalence {
        axiom_from_rule: load(include_str!("../../../../proofs/neckvr_gives_kvr_bot.kvp")),
        rule_from_axiom: load(include_str!("../../../../proofs/kvr_bot_gives_neckvr.kvp")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(s: &str) -> Formula {
        parse_open(s).unwrap()
    }

    #[test]
    fn instances() {
        let sigma = BTreeMap::from([("p".to_string(), f("r")), ("q".to_string(), f("T"))]);
        assert_eq!(
            axiom_instance(ProofSystem::SmlkvB, "INCL", &sigma, "a", "c").unwrap(),
            f("<a>^c(r, T) -> <a>r")
        );
        let sym = Schema::lookup("SYM").unwrap();
        assert_eq!(
            axiom_instance(ProofSystem::SmlkvB, "SYM", &identity_substitution(&sym), "a", "c").unwrap(),
            f("[a]^c(p, q) -> [a]^c(q, p)")
        );
        assert_eq!(
            axiom_instance(ProofSystem::Smlkv, "INCLT", &BTreeMap::new(), "b", "d").unwrap(),
            f("<b>^d T -> <b>T")
        );
    }

    #[test]
    fn instance_errors() {
        assert!(matches!(
            axiom_instance(ProofSystem::SmlkvR, "SYM", &BTreeMap::new(), "a", "c"),
            Err(ProofError::SchemaNotInSystem { .. })
        ));
        assert!(matches!(
            axiom_instance(ProofSystem::SmlkvB, "SYM", &BTreeMap::new(), "a", "c"),
            Err(ProofError::IncompleteSubstitution { .. })
        ));
        assert!(matches!(
            axiom_instance(ProofSystem::SmlkvB, "NOPE", &BTreeMap::new(), "a", "c"),
            Err(ProofError::UnknownSchema(_))
        ));
    }

    #[test]
    fn neckv_equivalence() {
        let eq = derive_equivalent_neckv();
        assert_eq!(eq.axiom_from_rule.conclusion(), Some(&f("[a]^c ~F")));
        assert_eq!(eq.rule_from_axiom.conclusion(), Some(&f("[a]^c ~F -> [a]^c (p | ~p)")));
        let used = check_derivation(ProofSystem::SmlkvR, &eq.rule_from_axiom).unwrap().rules_used;
        assert!(!used.contains(&Rule::NecKvR));
    }

    #[test]
    fn schemas_belong_to_their_languages() {
        for sys in ProofSystem::ALL {
            for name in sys.schemas() {
                let s = Schema::lookup(name).unwrap();
                assert!(s.formula().in_language(sys.language()), "{name} in {sys}");
            }
            assert_eq!(sys.name().parse::<ProofSystem>().unwrap(), sys);
        }
    }
}
