use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::{FoModel, ModelError, Relations, StateId, TernaryModel};
use crate::syntax::Vocabulary;

/// A model of either kind, as stored in a JSON model file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Model {
    Ternary(TernaryModel),
    Fo(FoModel),
}

/// Facts recorded while loading a model file.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LoadReport {
    /// Mirror triples the loader added to close the ternary relation under SYM.
    pub sym_added: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum Kind {
    Ternary,
    Fo,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    vocab: Vocabulary,
    kind: Kind,
    states: Vec<String>,
    #[serde(default)]
    rel: BTreeMap<String, Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tern: Option<BTreeMap<String, Vec<[String; 3]>>>,
    #[serde(default)]
    val: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    domain: Option<Vec<Value>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    vc: Option<BTreeMap<String, Value>>,
}

fn atom(v: &Value) -> Result<String, ModelError> {
    match v {
        Value::String(s) => Ok(s.clone()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        other => Err(ModelError::Format(format!("value atom must be a string or number, got {other}"))),
    }
}

fn split_key(key: &str, what: &str) -> Result<(String, String), ModelError> {
    let (a, b) = key
        .split_once(',')
        .ok_or_else(|| ModelError::Format(format!("{what} key `{key}` must have the form `x,y`")))?;
    Ok((a.trim().to_string(), b.trim().to_string()))
}

impl RawModel {
    fn index(&self, name: &str) -> Result<StateId, ModelError> {
        self.states
            .iter()
            .position(|s| s == name)
            .ok_or_else(|| ModelError::UnknownState(name.to_string()))
    }

    fn frame(&self) -> Result<(Relations, Vec<BTreeSet<String>>), ModelError> {
        let mut rel = BTreeMap::new();
        for (agent, edges) in &self.rel {
            let mut set = BTreeSet::new();
            for [s, t] in edges {
                set.insert((self.index(s)?, self.index(t)?));
            }
            rel.insert(agent.clone(), set);
        }
        let mut val = vec![BTreeSet::new(); self.states.len()];
        for (s, props) in &self.val {
            val[self.index(s)?].extend(props.iter().cloned());
        }
        Ok((rel, val))
    }

    fn into_model(self) -> Result<(Model, LoadReport), ModelError> {
        let (rel, val) = self.frame()?;
        match self.kind {
            Kind::Ternary => {
                if self.domain.is_some() || self.vc.is_some() {
                    return Err(ModelError::Format("ternary models take no `domain` or `vc`".into()));
                }
                let mut m = TernaryModel {
                    vocab: self.vocab.clone(),
                    states: self.states.clone(),
                    rel,
                    tern: BTreeMap::new(),
                    val,
                };
                for (key, triples) in self.tern.iter().flatten() {
                    let (agent, constant) = split_key(key, "tern")?;
                    let set = m.tern.entry((agent, constant)).or_default();
                    for [s, t, u] in triples {
                        set.insert((self.index(s)?, self.index(t)?, self.index(u)?));
                    }
                }
                m.check_well_formed()?;
                let sym_added = m.close_symmetric();
                Ok((Model::Ternary(m), LoadReport { sym_added }))
            }
            Kind::Fo => {
                if self.tern.is_some() {
                    return Err(ModelError::Format("first-order models take no `tern`".into()));
                }
                let domain = self
                    .domain
                    .as_deref()
                    .ok_or_else(|| ModelError::Format("first-order model without `domain`".into()))?
                    .iter()
                    .map(atom)
                    .collect::<Result<Vec<_>, _>>()?;
                let mut vc: BTreeMap<String, Vec<Option<usize>>> = BTreeMap::new();
                for (key, v) in self.vc.iter().flatten() {
                    let (constant, state) = split_key(key, "vc")?;
                    let s = self.index(&state)?;
                    if self.vocab.constant_index(&constant).is_none() {
                        return Err(ModelError::UnknownSymbol { kind: "constant", name: constant });
                    }
                    let name = atom(v)?;
                    let d = domain
                        .iter()
                        .position(|x| *x == name)
                        .ok_or(ModelError::UnknownValue(name))?;
                    vc.entry(constant).or_insert_with(|| vec![None; self.states.len()])[s] = Some(d);
                }
                let mut total = BTreeMap::new();
                for c in self.vocab.constants() {
                    let vals = vc.remove(c).unwrap_or_else(|| vec![None; self.states.len()]);
                    let vals = vals
                        .into_iter()
                        .enumerate()
                        .map(|(s, v)| {
                            v.ok_or_else(|| ModelError::MissingValue {
                                constant: c.clone(),
                                state: self.states[s].clone(),
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    total.insert(c.clone(), vals);
                }
                let m = FoModel {
                    vocab: self.vocab.clone(),
                    states: self.states.clone(),
                    domain,
                    rel,
                    val,
                    vc: total,
                };
                m.check_well_formed()?;
                Ok((Model::Fo(m), LoadReport::default()))
            }
        }
    }
}

type RawFrame = (BTreeMap<String, Vec<[String; 2]>>, BTreeMap<String, Vec<String>>);

fn raw_frame(
    states: &[String],
    rel: &BTreeMap<String, BTreeSet<(StateId, StateId)>>,
    val: &[BTreeSet<String>],
) -> RawFrame {
    let rel = rel
        .iter()
        .map(|(a, edges)| {
            let edges = edges.iter().map(|&(s, t)| [states[s].clone(), states[t].clone()]).collect();
            (a.clone(), edges)
        })
        .collect();
    let val = val
        .iter()
        .enumerate()
        .filter(|(_, props)| !props.is_empty())
        .map(|(s, props)| (states[s].clone(), props.iter().cloned().collect()))
        .collect();
    (rel, val)
}

impl Model {
    /// Parses a model file, closing ternary relations under SYM.
    pub fn from_json_str(text: &str) -> Result<(Model, LoadReport), ModelError> {
        let raw: RawModel = serde_json::from_str(text)?;
        raw.into_model()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<(Model, LoadReport), ModelError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ModelError::Format(format!("cannot read {}: {e}", path.display())))?;
        Model::from_json_str(&text)
    }

    /// Serializes with both orientations of every triple written out.
    pub fn to_json_string(&self) -> String {
        let raw = match self {
            Model::Ternary(m) => {
                let (rel, val) = raw_frame(&m.states, &m.rel, &m.val);
                let tern = m
                    .tern
                    .iter()
                    .map(|((a, c), ts)| {
                        let st = |k: StateId| m.states[k].clone();
                        (format!("{a},{c}"), ts.iter().map(|&(s, t, u)| [st(s), st(t), st(u)]).collect())
                    })
                    .collect();
                RawModel {
                    vocab: m.vocab.clone(),
                    kind: Kind::Ternary,
                    states: m.states.clone(),
                    rel,
                    tern: Some(tern),
                    val,
                    domain: None,
                    vc: None,
                }
            }
            Model::Fo(m) => {
                let (rel, val) = raw_frame(&m.states, &m.rel, &m.val);
                let mut vc = BTreeMap::new();
                for (c, vals) in &m.vc {
                    for (s, &d) in vals.iter().enumerate() {
                        vc.insert(format!("{c},{}", m.states[s]), Value::String(m.domain[d].clone()));
                    }
                }
                RawModel {
                    vocab: m.vocab.clone(),
                    kind: Kind::Fo,
                    states: m.states.clone(),
                    rel,
                    tern: None,
                    val,
                    domain: Some(m.domain.iter().cloned().map(Value::String).collect()),
                    vc: Some(vc),
                }
            }
        };
        serde_json::to_string_pretty(&raw).expect("model serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ModelError> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json_string() + "\n")
            .map_err(|e| ModelError::Format(format!("cannot write {}: {e}", path.display())))
    }

    pub fn vocab(&self) -> &Vocabulary {
        match self {
            Model::Ternary(m) => &m.vocab,
            Model::Fo(m) => &m.vocab,
        }
    }

    pub fn states(&self) -> &[String] {
        match self {
            Model::Ternary(m) => &m.states,
            Model::Fo(m) => &m.states,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Model::Ternary(_) => "ternary",
            Model::Fo(_) => "fo",
        }
    }
}
