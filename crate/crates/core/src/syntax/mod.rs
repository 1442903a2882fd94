//! Formulas of the four knowing-value languages.
//!
//! One AST ([`Formula`]) covers all of them. [`LanguageTag`] membership is
//! decided syntactically by [`Formula::language_of`]:
//!
//! | tag     | modal constructors                         |
//! |---------|--------------------------------------------|
//! | `ELKvR` | `K_i` (stored as `Box`), `Kv_i(φ, c)`      |
//! | `MLKvR` | `□_i`, unary `⊡_i^c φ`                     |
//! | `MLKvB` | `□_i`, binary `⊡_i^c(φ, ψ)`                |
//! | `MLKv`  | `□_i`, unary `⊡_i^c ⊥` only                |

mod formula;
pub mod gen;
mod parse;
mod print;
mod translate;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use formula::{negate, normalizes_to_bot, Formula, Path, Symbols};
pub use parse::{parse, parse_open};
pub use print::{print, print_with, PrintOptions};
pub use translate::{embed_unary, diamond_expansion, reduce_r, translate_t, translate_t_inv};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SyntaxError {
    #[error("lex error at byte {pos}: unexpected {found:?}")]
    Lex { pos: usize, found: char },
    #[error("parse error at byte {pos}: expected {expected}, found {found}")]
    Unexpected { pos: usize, expected: String, found: String },
    #[error("unknown {kind} `{name}` (not in vocabulary)")]
    UnknownIdentifier { kind: &'static str, name: String },
    #[error("arity error at byte {pos}: {what}")]
    Arity { pos: usize, what: String },
    #[error("formula is not in {0}")]
    WrongLanguage(LanguageTag),
    #[error("path {0:?} does not address a subterm")]
    InvalidPath(Path),
    #[error("subterm at {0:?} differs from the pattern")]
    PathMismatch(Path),
    #[error("invalid vocabulary: {0}")]
    Vocabulary(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LanguageTag {
    ELKvR,
    MLKvR,
    MLKvB,
    MLKv,
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            LanguageTag::ELKvR => "ELKvR",
            LanguageTag::MLKvR => "MLKvR",
            LanguageTag::MLKvB => "MLKvB",
            LanguageTag::MLKv => "MLKv",
        };
        f.write_str(name)
    }
}

/// The finite working vocabulary: agents, propositions and constants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawVocabulary", into = "RawVocabulary")]
pub struct Vocabulary {
    agents: Vec<String>,
    props: Vec<String>,
    constants: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct RawVocabulary {
    agents: Vec<String>,
    props: Vec<String>,
    constants: Vec<String>,
}

impl TryFrom<RawVocabulary> for Vocabulary {
    type Error = SyntaxError;

    fn try_from(raw: RawVocabulary) -> Result<Self, Self::Error> {
        Vocabulary::new(raw.agents, raw.props, raw.constants)
    }
}

impl From<Vocabulary> for RawVocabulary {
    fn from(v: Vocabulary) -> Self {
        RawVocabulary {
            agents: v.agents,
            props: v.props,
            constants: v.constants,
        }
    }
}

pub fn is_identifier(name: &str) -> bool {
    let mut chars = name.chars();
    matches!(chars.next(), Some('a'..='z'))
        && chars.all(|ch| ch.is_ascii_lowercase() || ch.is_ascii_digit() || ch == '_')
}

impl Vocabulary {
    pub fn new<S: Into<String>>(
        agents: impl IntoIterator<Item = S>,
        props: impl IntoIterator<Item = S>,
        constants: impl IntoIterator<Item = S>,
    ) -> Result<Vocabulary, SyntaxError> {
        fn check(kind: &str, names: Vec<String>) -> Result<Vec<String>, SyntaxError> {
            if names.is_empty() {
                return Err(SyntaxError::Vocabulary(format!("no {kind}")));
            }
            for (k, name) in names.iter().enumerate() {
                if !is_identifier(name) {
                    return Err(SyntaxError::Vocabulary(format!("bad {kind} name `{name}`")));
                }
                if names[..k].contains(name) {
                    return Err(SyntaxError::Vocabulary(format!("duplicate {kind} `{name}`")));
                }
            }
            Ok(names)
        }
        Ok(Vocabulary {
            agents: check("agents", agents.into_iter().map(Into::into).collect())?,
            props: check("props", props.into_iter().map(Into::into).collect())?,
            constants: check("constants", constants.into_iter().map(Into::into).collect())?,
        })
    }

    /// The vocabulary of the given symbols, padded with `a`, `p` or `c` where a
    /// set would otherwise be empty.
    pub fn covering(symbols: &Symbols) -> Vocabulary {
        fn pad(set: &std::collections::BTreeSet<String>, default: &str) -> Vec<String> {
            if set.is_empty() {
                vec![default.to_string()]
            } else {
                set.iter().cloned().collect()
            }
        }
        Vocabulary {
            agents: pad(&symbols.agents, "a"),
            props: pad(&symbols.props, "p"),
            constants: pad(&symbols.constants, "c"),
        }
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn props(&self) -> &[String] {
        &self.props
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn agent_index(&self, name: &str) -> Option<usize> {
        self.agents.iter().position(|a| a == name)
    }

    pub fn prop_index(&self, name: &str) -> Option<usize> {
        self.props.iter().position(|a| a == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|a| a == name)
    }

    /// Fails on the first symbol of `f` outside this vocabulary.
    pub fn check(&self, f: &Formula) -> Result<(), SyntaxError> {
        let sym = f.symbols();
        let missing = |kind: &'static str, names: &std::collections::BTreeSet<String>, known: &[String]| {
            names
                .iter()
                .find(|n| !known.contains(n))
                .map(|n| SyntaxError::UnknownIdentifier { kind, name: n.clone() })
        };
        if let Some(e) = missing("agent", &sym.agents, &self.agents)
            .or_else(|| missing("proposition", &sym.props, &self.props))
            .or_else(|| missing("constant", &sym.constants, &self.constants))
        {
            return Err(e);
        }
        Ok(())
    }

    pub fn contains(&self, other: &Vocabulary) -> bool {
        other.agents.iter().all(|a| self.agents.contains(a))
            && other.props.iter().all(|a| self.props.contains(a))
            && other.constants.iter().all(|a| self.constants.contains(a))
    }
}
