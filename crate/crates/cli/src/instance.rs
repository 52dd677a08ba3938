//! The instance file format.
//!
//! ```json
//! {
//!   "group": {"family": "cyclic", "n": 2},
//!   "carrier": ["a", "b", "c"],
//!   "domains": {"0": ["a", "b", "c"], "1": ["a", "b"]},
//!   "maps": {"1": [["a", "b"], ["b", "a"]]}
//! }
//! ```
//!
//! Keys of `domains` and `maps` are group element indices. A missing domain
//! is empty; a missing identity map defaults to the identity on the carrier.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use parok::action::{PartialAction, ValidationError};
use parok::group::{build_group, GroupSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("field {field}: {message}")]
    Field { field: String, message: String },
    #[error("invalid partial action: {0}")]
    Validation(#[from] ValidationError),
}

/// Point labels may be written as strings or integers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Text(String),
    Number(i64),
}

impl Label {
    fn text(&self) -> String {
        match self {
            Label::Text(s) => s.clone(),
            Label::Number(n) => n.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub group: GroupSpec,
    pub carrier: Vec<Label>,
    #[serde(default)]
    pub domains: BTreeMap<String, Vec<Label>>,
    #[serde(default)]
    pub maps: BTreeMap<String, Vec<(Label, Label)>>,
}

/// A validated instance with its point labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub action: PartialAction,
    pub labels: Vec<String>,
}

fn field(field: impl Into<String>, message: impl Into<String>) -> InstanceError {
    InstanceError::Field { field: field.into(), message: message.into() }
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        serde_json::from_str(text).map_err(|e| InstanceError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn to_instance(&self) -> Result<Instance, InstanceError> {
        let group = Arc::new(build_group(&self.group).map_err(ValidationError::from)?);
        let labels: Vec<String> = self.carrier.iter().map(Label::text).collect();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(field(format!("carrier[{i}]"), format!("duplicate label {l:?}")));
            }
        }
        let element = |key: &str, what: &str| -> Result<usize, InstanceError> {
            let g: usize = key
                .parse()
                .map_err(|_| field(format!("{what}.{key}"), "keys must be group element indices"))?;
            if g >= group.order() {
                return Err(field(format!("{what}.{key}"), format!("group has order {}", group.order())));
            }
            Ok(g)
        };
        let point = |l: &Label, at: String| -> Result<usize, InstanceError> {
            index.get(&l.text()).copied().ok_or_else(|| field(at, format!("unknown label {:?}", l.text())))
        };
        let mut domains = vec![Vec::new(); group.order()];
        for (key, pts) in &self.domains {
            let g = element(key, "domains")?;
            for (i, l) in pts.iter().enumerate() {
                domains[g].push(point(l, format!("domains.{key}[{i}]"))?);
            }
        }
        let mut maps = vec![Vec::new(); group.order()];
        for (key, pairs) in &self.maps {
            let g = element(key, "maps")?;
            for (i, (s, t)) in pairs.iter().enumerate() {
                let s = point(s, format!("maps.{key}[{i}][0]"))?;
                let t = point(t, format!("maps.{key}[{i}][1]"))?;
                maps[g].push((s, t));
            }
        }
        if !self.maps.contains_key("0") {
            maps[0] = (0..labels.len()).map(|x| (x, x)).collect();
        }
        let action = PartialAction::new(group, labels.len(), &domains, &maps)?;
        Ok(Instance { action, labels })
    }

    pub fn from_instance(inst: &Instance) -> Self {
        let pa = &inst.action;
        let label = |x: usize| Label::Text(inst.labels[x].clone());
        let raw = pa.to_raw();
        let mut domains = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for g in pa.group().elements() {
            domains.insert(g.to_string(), raw.domains[g].iter().map(|&x| label(x)).collect());
            maps.insert(g.to_string(), raw.maps[g].iter().map(|&(s, t)| (label(s), label(t))).collect());
        }
        InstanceFile { group: pa.group().spec().clone(), carrier: (0..pa.size()).map(label).collect(), domains, maps }
    }
}

impl Instance {
    pub fn parse(text: &str) -> Result<Self, InstanceError> {
        InstanceFile::parse(text)?.to_instance()
    }

    /// Integer labels `0..n`.
    pub fn unlabeled(action: PartialAction) -> Self {
        let labels = (0..action.size()).map(|x| x.to_string()).collect();
        Instance { action, labels }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&InstanceFile::from_instance(self)).expect("instance serializes")
    }

    /// SHA-256 of the canonical serialization.
    pub fn digest(&self) -> String {
        let canonical = serde_json::to_string(&InstanceFile::from_instance(self)).expect("instance serializes");
        format!("sha256:{:x}", Sha256::digest(canonical.as_bytes()))
    }

    pub fn labels_of(&self, points: &[usize]) -> Vec<String> {
        points.iter().map(|&x| self.labels[x].clone()).collect()
    }
}
