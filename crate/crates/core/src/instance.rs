//! JSON instance files.
//!
//! ```json
//! { "nodes": ["a","b"], "matrix": [[0,1],[1,0]], "start": "a",
//!   "deadlines": {"b": 3}, "budget": 2, "k": 2 }
//! ```
//!
//! Exactly one of `matrix`, `coords`, `edges` gives the distances. Numbers
//! may be JSON numbers or `"p/q"` strings. `bags` and `bag_tree` optionally
//! carry a tree decomposition over node ids.

use crate::error::{MetricError, SolveError};
use crate::metric::{BuildOptions, MetricInstance, RawMetric};
use crate::rational::{deserialize_q, format_q, Q};
use crate::treewidth::TreeDecomposition;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeMap;
use std::path::Path;

/// Rational that serializes as a JSON integer when it is one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Num(pub Q);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_integer() {
            s.serialize_i64(*self.0.numer())
        } else {
            s.serialize_str(&format_q(&self.0))
        }
    }
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        deserialize_q(d).map(Num)
    }
}

impl From<Q> for Num {
    fn from(q: Q) -> Self {
        Num(q)
    }
}

impl From<i64> for Num {
    fn from(x: i64) -> Self {
        Num(Q::from_integer(x))
    }
}

/// Node ids may be strings or integers in the file; they are kept as strings.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl<'de> Deserialize<'de> for NodeId {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        match v {
            serde_json::Value::String(s) => Ok(NodeId(s)),
            serde_json::Value::Number(n) => Ok(NodeId(n.to_string())),
            other => Err(serde::de::Error::custom(format!("node id must be a string or integer, got {other}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub nodes: Vec<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coords: Option<Vec<Vec<Num>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<(NodeId, NodeId, Num)>>,
    pub start: NodeId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end: Option<NodeId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deadlines: Option<BTreeMap<NodeId, Num>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bags: Option<Vec<Vec<NodeId>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bag_tree: Option<Vec<(usize, usize)>>,
}

/// Parsed instance: the metric plus the optional problem fields.
#[derive(Debug, Clone)]
pub struct Instance {
    pub file: InstanceFile,
    pub metric: MetricInstance,
    /// raw deadlines by node index
    pub deadlines: Option<Vec<Option<Q>>>,
    pub budget: Option<Q>,
    pub k: Option<usize>,
    pub decomposition: Option<TreeDecomposition>,
}

fn index(ids: &BTreeMap<&NodeId, usize>, id: &NodeId) -> Result<usize, MetricError> {
    ids.get(id).copied().ok_or_else(|| MetricError::UnknownNode(id.0.clone()))
}

impl InstanceFile {
    pub fn from_json(text: &str) -> Result<Self, SolveError> {
        serde_json::from_str(text).map_err(|e| SolveError::Metric(MetricError::Invalid(e.to_string())))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes") + "\n"
    }

    pub fn load(path: &Path) -> Result<Self, SolveError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| SolveError::Metric(MetricError::Invalid(format!("{}: {e}", path.display()))))?;
        Self::from_json(&text)
    }

    pub fn parse(self) -> Result<Instance, SolveError> {
        let n = self.nodes.len();
        let mut ids = BTreeMap::new();
        for (i, id) in self.nodes.iter().enumerate() {
            if ids.insert(id, i).is_some() {
                return Err(MetricError::Invalid(format!("duplicate node id {:?}", id.0)).into());
            }
        }
        let q = |rows: &Vec<Vec<Num>>| rows.iter().map(|r| r.iter().map(|x| x.0).collect()).collect::<Vec<Vec<Q>>>();
        let raw = match (&self.matrix, &self.coords, &self.edges) {
            (Some(mx), None, None) => RawMetric::Matrix(q(mx)),
            (None, Some(c), None) => RawMetric::Coords(q(c)),
            (None, None, Some(es)) => RawMetric::Graph {
                n,
                edges: es
                    .iter()
                    .map(|(u, v, w)| Ok((index(&ids, u)?, index(&ids, v)?, w.0)))
                    .collect::<Result<_, MetricError>>()?,
            },
            _ => return Err(MetricError::Invalid("exactly one of matrix, coords, edges is required".into()).into()),
        };
        let len = match &raw {
            RawMetric::Matrix(r) | RawMetric::Coords(r) => r.len(),
            RawMetric::Graph { n, .. } => *n,
        };
        if len != n {
            return Err(MetricError::Invalid(format!("{len} rows for {n} nodes")).into());
        }
        let labels = self.nodes.iter().map(|x| x.0.clone()).collect();
        let opts = BuildOptions { labels: Some(labels), ..BuildOptions::default() };
        let start = index(&ids, &self.start)?;
        let end = self.end.as_ref().map(|e| index(&ids, e)).transpose()?;
        let mut metric = MetricInstance::build(raw, &opts)?.with_start(start).with_end(end);
        let deadlines = match &self.deadlines {
            Some(map) => {
                let mut d = vec![None; n];
                for (id, x) in map {
                    d[index(&ids, id)?] = Some(x.0);
                }
                metric = metric.with_deadlines(&d);
                Some(d)
            }
            None => None,
        };
        let decomposition = match (&self.bags, &self.bag_tree) {
            (Some(bags), tree) => {
                let bags = bags
                    .iter()
                    .map(|b| b.iter().map(|id| index(&ids, id)).collect::<Result<Vec<_>, _>>())
                    .collect::<Result<Vec<_>, _>>()?;
                Some(TreeDecomposition::new(bags, tree.clone().unwrap_or_default(), 0))
            }
            (None, Some(_)) => return Err(MetricError::Invalid("bag_tree without bags".into()).into()),
            (None, None) => None,
        };
        Ok(Instance { budget: self.budget.map(|b| b.0), k: self.k, metric, deadlines, decomposition, file: self })
    }
}

impl Instance {
    pub fn load(path: &Path) -> Result<Self, SolveError> {
        InstanceFile::load(path)?.parse()
    }

    pub fn from_json(text: &str) -> Result<Self, SolveError> {
        InstanceFile::from_json(text)?.parse()
    }

    pub fn id(&self) -> String {
        self.file.id.clone().unwrap_or_default()
    }

    pub fn node(&self, v: usize) -> &str {
        self.metric.label(v)
    }

    /// Budget in ticks, rounded down.
    pub fn budget_ticks(&self) -> Result<i64, SolveError> {
        self.budget.map(|b| self.metric.raw_floor_ticks(&b)).ok_or(SolveError::Missing("budget"))
    }

    pub fn end_or_start(&self) -> usize {
        self.metric.end.unwrap_or(self.metric.start)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_matrix_with_rationals_and_deadlines() {
        let text = r#"{"nodes":["a","b",7],"matrix":[[0,1,"3/2"],[1,0,1],["3/2",1,0]],
            "start":"a","end":7,"deadlines":{"b":2},"budget":"5/2","k":2}"#;
        let inst = Instance::from_json(text).unwrap();
        assert_eq!(inst.metric.n(), 3);
        assert_eq!(inst.metric.end, Some(2));
        assert_eq!(inst.budget, Some(Q::new(5, 2)));
        assert_eq!(inst.deadlines.as_ref().unwrap()[1], Some(Q::from_integer(2)));
        assert!(!inst.metric.is_integral());
    }

    #[test]
    fn rejects_ambiguous_or_unknown_input() {
        assert!(Instance::from_json(r#"{"nodes":["a"],"start":"a"}"#).is_err());
        assert!(Instance::from_json(r#"{"nodes":["a"],"matrix":[[0]],"start":"z"}"#).is_err());
        assert!(Instance::from_json(r#"{"nodes":["a"],"matrix":[[0]],"start":"a","extra":1}"#).is_err());
    }

    #[test]
    fn emits_integers_as_numbers() {
        let text = r#"{"nodes":["a","b"],"edges":[["a","b",2]],"start":"a","bags":[["a","b"]]}"#;
        let file = InstanceFile::from_json(text).unwrap();
        let out = file.to_json();
        assert!(out.contains("2"));
        assert!(!out.contains("\"2\""));
        let inst = file.parse().unwrap();
        assert_eq!(inst.decomposition.unwrap().width(), 1);
    }
}
