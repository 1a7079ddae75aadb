//! JSON document format for networks.
//!
//! ```text
//! {"version":1,
//!  "nodes":[{"id":str,"broadcast":bool}],
//!  "edges":[{"id":str,"tail":str,"head":str,"size":int|null}],
//!  "messages":[int|null,...],
//!  "sources":{nodeId:[int,...]},
//!  "demands":{nodeId:[int,...]}}
//! ```
//!
//! `null` stands for the default size. Edges may carry an optional
//! `"unlimited": true` flag; it is omitted for ordinary edges.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::{validate, Edge, Network, NetworkError, Node, SizeSpec};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkDoc {
    pub version: u32,
    pub nodes: Vec<NodeDoc>,
    pub edges: Vec<EdgeDoc>,
    pub messages: Vec<Option<i64>>,
    pub sources: BTreeMap<String, Vec<usize>>,
    pub demands: BTreeMap<String, Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeDoc {
    pub id: String,
    pub broadcast: bool,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeDoc {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub size: Option<i64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unlimited: bool,
}

fn size_to_doc(s: SizeSpec) -> Option<i64> {
    match s {
        SizeSpec::Fixed(v) => Some(v as i64),
        SizeSpec::Default => None,
    }
}

fn size_from_doc(s: Option<i64>, what: &str) -> Result<SizeSpec, NetworkError> {
    match s {
        None => Ok(SizeSpec::Default),
        Some(v) if v >= 1 => Ok(SizeSpec::Fixed(v as usize)),
        Some(v) => Err(NetworkError::Malformed(format!(
            "{what}: size must be ≥1 or null(default), got {v}"
        ))),
    }
}

impl From<&Network> for NetworkDoc {
    fn from(net: &Network) -> Self {
        let set = |m: &BTreeMap<String, BTreeSet<usize>>| {
            m.iter().map(|(k, v)| (k.clone(), v.iter().copied().collect())).collect()
        };
        NetworkDoc {
            version: FORMAT_VERSION,
            nodes: net.nodes.iter().map(|n| NodeDoc { id: n.id.clone(), broadcast: n.broadcast }).collect(),
            edges: net
                .edges
                .iter()
                .map(|e| EdgeDoc {
                    id: e.id.clone(),
                    tail: e.tail.clone(),
                    head: e.head.clone(),
                    size: if e.unlimited { None } else { size_to_doc(e.size) },
                    unlimited: e.unlimited,
                })
                .collect(),
            messages: net.messages.iter().map(|&m| size_to_doc(m)).collect(),
            sources: set(&net.sources),
            demands: set(&net.demands),
        }
    }
}

impl TryFrom<NetworkDoc> for Network {
    type Error = NetworkError;

    fn try_from(doc: NetworkDoc) -> Result<Self, Self::Error> {
        if doc.version != FORMAT_VERSION {
            return Err(NetworkError::Malformed(format!("unsupported version {}", doc.version)));
        }
        let mut edges = Vec::with_capacity(doc.edges.len());
        for (i, e) in doc.edges.into_iter().enumerate() {
            let size = if e.unlimited {
                SizeSpec::Default
            } else {
                size_from_doc(e.size, &format!("edges[{i}] ({})", e.id))?
            };
            edges.push(Edge { id: e.id, tail: e.tail, head: e.head, size, unlimited: e.unlimited });
        }
        let messages = doc
            .messages
            .into_iter()
            .enumerate()
            .map(|(i, m)| size_from_doc(m, &format!("messages[{i}]")))
            .collect::<Result<_, _>>()?;
        let set = |m: BTreeMap<String, Vec<usize>>| -> BTreeMap<String, BTreeSet<usize>> {
            m.into_iter().map(|(k, v)| (k, v.into_iter().collect())).collect()
        };
        Ok(Network {
            nodes: doc.nodes.into_iter().map(|n| Node { id: n.id, broadcast: n.broadcast }).collect(),
            edges,
            messages,
            sources: set(doc.sources),
            demands: set(doc.demands),
        })
    }
}

/// Pretty-printed JSON document. Requires a valid network.
pub fn serialize(net: &Network) -> Result<String, NetworkError> {
    let report = validate(net);
    if !report.ok {
        return Err(NetworkError::Invalid(report));
    }
    Ok(serde_json::to_string_pretty(&NetworkDoc::from(net)).expect("network documents always serialize"))
}

/// Parses a network document. Structural validity is not checked here; run
/// [`validate`] on the result.
pub fn deserialize(text: &str) -> Result<Network, NetworkError> {
    let doc: NetworkDoc = serde_json::from_str(text).map_err(|e| {
        NetworkError::Malformed(format!("line {} column {}: {e}", e.line(), e.column()))
    })?;
    Network::try_from(doc)
}
