//! Derivation scripts.
//!
//! One step per line:
//!
//! ```text
//! 3. [a]^c(p, q) -> [a]^c(q, p) BY AX(SYM, a, c)
//! 4. <a>p BY MP(1, 2)
//! ```
//!
//! Justifications: `TAUT`, `AX(NAME, agent, constant, x := φ, ...)`,
//! `MP(j, k)`, `NECK(j, agent)`, `NECKvR(j, agent, constant)`,
//! `NECKvB(j, agent, constant, ψ)`, `SUB(j, x := φ, ...)` and
//! `RE(j, φ, {positions})`. In `AX`, metavariables without a binding stand
//! for themselves. RE positions are `*` (every occurrence), `#k` (the k-th
//! occurrence in pre-order, from 0) or a dotted child path such as `0.1.0`
//! (`root` for the whole formula). Lines starting with `#` are comments.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use super::{ProofError, Rule};
use crate::syntax::{parse_open, print, Formula, Path};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PositionSpec {
    Occurrence(usize),
    Path(Path),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Positions {
    All,
    Listed(Vec<PositionSpec>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule")]
pub enum Justification {
    Taut,
    Axiom { schema: String, agent: String, constant: String, bindings: BTreeMap<String, Formula> },
    Mp { minor: usize, major: usize },
    NecK { premise: usize, agent: String },
    NecKvR { premise: usize, agent: String, constant: String },
    NecKvB { premise: usize, agent: String, constant: String, side: Formula },
    Sub { premise: usize, sigma: BTreeMap<String, Formula> },
    Re { premise: usize, target: Formula, positions: Positions },
}

impl Justification {
    pub fn rule(&self) -> Rule {
        match self {
            Justification::Taut => Rule::Taut,
            Justification::Axiom { .. } => Rule::Axiom,
            Justification::Mp { .. } => Rule::Mp,
            Justification::NecK { .. } => Rule::NecK,
            Justification::NecKvR { .. } => Rule::NecKvR,
            Justification::NecKvB { .. } => Rule::NecKvB,
            Justification::Sub { .. } => Rule::Sub,
            Justification::Re { .. } => Rule::Re,
        }
    }

    /// Step numbers this justification refers to.
    pub fn premises(&self) -> Vec<usize> {
        match self {
            Justification::Taut | Justification::Axiom { .. } => vec![],
            Justification::Mp { minor, major } => vec![*minor, *major],
            Justification::NecK { premise, .. }
            | Justification::NecKvR { premise, .. }
            | Justification::NecKvB { premise, .. }
            | Justification::Sub { premise, .. }
            | Justification::Re { premise, .. } => vec![*premise],
        }
    }

    /// The same justification with every step reference passed through `f`.
    pub fn renumbered(&self, f: impl Fn(usize) -> usize) -> Justification {
        let mut j = self.clone();
        match &mut j {
            Justification::Taut | Justification::Axiom { .. } => {}
            Justification::Mp { minor, major } => {
                *minor = f(*minor);
                *major = f(*major);
            }
            Justification::NecK { premise, .. }
            | Justification::NecKvR { premise, .. }
            | Justification::NecKvB { premise, .. }
            | Justification::Sub { premise, .. }
            | Justification::Re { premise, .. } => *premise = f(*premise),
        }
        j
    }
}

fn write_bindings(out: &mut fmt::Formatter<'_>, map: &BTreeMap<String, Formula>) -> fmt::Result {
    for (k, v) in map {
        write!(out, ", {k} := {}", print(v))?;
    }
    Ok(())
}

impl fmt::Display for Justification {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Justification::Taut => write!(out, "TAUT"),
            Justification::Axiom { schema, agent, constant, bindings } => {
                write!(out, "AX({schema}, {agent}, {constant}")?;
                write_bindings(out, bindings)?;
                write!(out, ")")
            }
            Justification::Mp { minor, major } => write!(out, "MP({minor}, {major})"),
            Justification::NecK { premise, agent } => write!(out, "NECK({premise}, {agent})"),
            Justification::NecKvR { premise, agent, constant } => {
                write!(out, "NECKvR({premise}, {agent}, {constant})")
            }
            Justification::NecKvB { premise, agent, constant, side } => {
                write!(out, "NECKvB({premise}, {agent}, {constant}, {})", print(side))
            }
            Justification::Sub { premise, sigma } => {
                write!(out, "SUB({premise}")?;
                write_bindings(out, sigma)?;
                write!(out, ")")
            }
            Justification::Re { premise, target, positions } => {
                write!(out, "RE({premise}, {}, {{", print(target))?;
                match positions {
                    Positions::All => write!(out, "*")?,
                    Positions::Listed(items) => {
                        for (k, item) in items.iter().enumerate() {
                            if k > 0 {
                                write!(out, ", ")?;
                            }
                            match item {
                                PositionSpec::Occurrence(n) => write!(out, "#{n}")?,
                                PositionSpec::Path(p) if p.is_empty() => write!(out, "root")?,
                                PositionSpec::Path(p) => {
                                    let parts: Vec<String> = p.iter().map(|k| k.to_string()).collect();
                                    write!(out, "{}", parts.join("."))?
                                }
                            }
                        }
                    }
                }
                write!(out, "}})")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub number: usize,
    pub formula: Formula,
    pub justification: Justification,
    /// 1-based source line, 0 for steps built in code.
    pub line: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

impl Derivation {
    /// The formula of the last step.
    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }

    /// Renders the derivation back into script syntax.
    pub fn to_script(&self) -> String {
        self.steps
            .iter()
            .map(|s| format!("{}. {} BY {}\n", s.number, print(&s.formula), s.justification))
            .collect()
    }
}

/// Splits on commas outside brackets.
fn split_args(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            ',' if depth == 0 => {
                out.push(s[start..k].trim());
                start = k + 1;
            }
            _ => {}
        }
    }
    let last = s[start..].trim();
    if !last.is_empty() || !out.is_empty() {
        out.push(last);
    }
    out
}

struct LineCtx {
    line: usize,
}

impl LineCtx {
    fn err(&self, msg: impl Into<String>) -> ProofError {
        ProofError::Script { line: self.line, msg: msg.into() }
    }

    fn formula(&self, text: &str) -> Result<Formula, ProofError> {
        parse_open(text).map_err(|e| self.err(format!("in `{text}`: {e}")))
    }

    fn number(&self, text: &str) -> Result<usize, ProofError> {
        text.parse().map_err(|_| self.err(format!("expected a step number, found `{text}`")))
    }

    fn ident<'a>(&self, text: &'a str) -> Result<&'a str, ProofError> {
        if crate::syntax::is_identifier(text) {
            Ok(text)
        } else {
            Err(self.err(format!("expected an identifier, found `{text}`")))
        }
    }

    fn binding(&self, text: &str) -> Result<(String, Formula), ProofError> {
        let (var, rhs) = text
            .split_once(":=")
            .ok_or_else(|| self.err(format!("expected `x := formula`, found `{text}`")))?;
        Ok((self.ident(var.trim())?.to_string(), self.formula(rhs.trim())?))
    }

    fn bindings(&self, items: &[&str]) -> Result<BTreeMap<String, Formula>, ProofError> {
        let mut map = BTreeMap::new();
        for item in items {
            let (k, v) = self.binding(item)?;
            if map.insert(k.clone(), v).is_some() {
                return Err(self.err(format!("`{k}` bound twice")));
            }
        }
        Ok(map)
    }

    fn arity(&self, rule: &str, args: &[&str], min: usize, max: Option<usize>) -> Result<(), ProofError> {
        let ok = args.len() >= min && max.is_none_or(|m| args.len() <= m);
        if ok {
            Ok(())
        } else {
            Err(self.err(format!("{rule} takes {min}{} arguments, found {}", if max.is_none() { " or more" } else { "" }, args.len())))
        }
    }

    fn positions(&self, text: &str) -> Result<Positions, ProofError> {
        let inner = text
            .strip_prefix('{')
            .and_then(|t| t.strip_suffix('}'))
            .ok_or_else(|| self.err(format!("expected `{{positions}}`, found `{text}`")))?;
        let items = split_args(inner);
        if items.len() == 1 && items[0] == "*" {
            return Ok(Positions::All);
        }
        if items.is_empty() {
            return Err(self.err("empty position set"));
        }
        let mut out = Vec::new();
        for item in items {
            if let Some(n) = item.strip_prefix('#') {
                out.push(PositionSpec::Occurrence(self.number(n)?));
            } else if item == "root" {
                out.push(PositionSpec::Path(vec![]));
            } else {
                let path = item.split('.').map(|k| self.number(k.trim())).collect::<Result<Vec<_>, _>>()?;
                out.push(PositionSpec::Path(path));
            }
        }
        Ok(Positions::Listed(out))
    }

    fn justification(&self, text: &str) -> Result<Justification, ProofError> {
        let text = text.trim();
        if text == "TAUT" {
            return Ok(Justification::Taut);
        }
        let (name, rest) = text
            .split_once('(')
            .ok_or_else(|| self.err(format!("unknown justification `{text}`")))?;
        let body = rest
            .strip_suffix(')')
            .ok_or_else(|| self.err("justification must end with `)`"))?;
        let args = split_args(body);
        let name = name.trim();
        Ok(match name {
            "AX" => {
                self.arity(name, &args, 3, None)?;
                Justification::Axiom {
                    schema: args[0].to_string(),
                    agent: self.ident(args[1])?.to_string(),
                    constant: self.ident(args[2])?.to_string(),
                    bindings: self.bindings(&args[3..])?,
                }
            }
            "MP" => {
                self.arity(name, &args, 2, Some(2))?;
                Justification::Mp { minor: self.number(args[0])?, major: self.number(args[1])? }
            }
            "NECK" => {
                self.arity(name, &args, 2, Some(2))?;
                Justification::NecK { premise: self.number(args[0])?, agent: self.ident(args[1])?.to_string() }
            }
            "NECKvR" => {
                self.arity(name, &args, 3, Some(3))?;
                Justification::NecKvR {
                    premise: self.number(args[0])?,
                    agent: self.ident(args[1])?.to_string(),
                    constant: self.ident(args[2])?.to_string(),
                }
            }
            "NECKvB" => {
                self.arity(name, &args, 4, Some(4))?;
                Justification::NecKvB {
                    premise: self.number(args[0])?,
                    agent: self.ident(args[1])?.to_string(),
                    constant: self.ident(args[2])?.to_string(),
                    side: self.formula(args[3])?,
                }
            }
            "SUB" => {
                self.arity(name, &args, 2, None)?;
                Justification::Sub { premise: self.number(args[0])?, sigma: self.bindings(&args[1..])? }
            }
            "RE" => {
                self.arity(name, &args, 3, Some(3))?;
                Justification::Re {
                    premise: self.number(args[0])?,
                    target: self.formula(args[1])?,
                    positions: self.positions(args[2])?,
                }
            }
            _ => return Err(self.err(format!("unknown rule `{name}`"))),
        })
    }
}

/// Parses a derivation script. Step numbers must increase strictly.
pub fn parse_script(text: &str) -> Result<Derivation, ProofError> {
    let mut steps: Vec<Step> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let ctx = LineCtx { line: k + 1 };
        let content = raw.trim();
        if content.is_empty() || content.starts_with('#') {
            continue;
        }
        let (num, rest) = content
            .split_once('.')
            .ok_or_else(|| ctx.err("expected `n. formula BY justification`"))?;
        let number = ctx.number(num.trim())?;
        let (formula, just) = rest
            .rsplit_once(" BY ")
            .ok_or_else(|| ctx.err("missing ` BY `"))?;
        if let Some(prev) = steps.last() {
            if number <= prev.number {
                return Err(ctx.err(format!("step {number} follows step {}", prev.number)));
            }
        }
        steps.push(Step {
            number,
            formula: ctx.formula(formula.trim())?,
            justification: ctx.justification(just)?,
            line: k + 1,
        });
    }
    Ok(Derivation { steps })
}
