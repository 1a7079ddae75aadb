//! Partially fixed-size networks.
//!
//! A [`Network`] is a directed acyclic multigraph. Every message and every
//! edge carries a [`SizeSpec`]: either a fixed alphabet size or the common
//! default size `k`, which is only chosen when the network is solved.
//!
//! Edges may additionally be flagged `unlimited`. Such edges are produced by
//! the gadget constructors (fan-out wires whose size is irrelevant) and are
//! turned into ordinary sized edges by [`canonicalize`].

mod canon;
mod dot;
pub mod fixtures;
mod json;
mod validate;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

pub use canon::canonicalize;
pub use dot::to_dot;
pub use json::{deserialize, serialize, NetworkDoc};
pub use validate::{validate, ValidationReport, Violation};

/// Errors raised by network operations that require a valid input.
#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    #[error("invalid network: {0}")]
    Invalid(ValidationReport),
    #[error("malformed document: {0}")]
    Malformed(String),
}

/// Alphabet size of a message or an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SizeSpec {
    Fixed(usize),
    /// Resolves to the common alphabet size `k`.
    Default,
}

impl SizeSpec {
    pub fn resolve(self, k: usize) -> usize {
        resolve_size(self, k)
    }

    pub fn is_default(self) -> bool {
        matches!(self, SizeSpec::Default)
    }
}

impl fmt::Display for SizeSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SizeSpec::Fixed(s) => write!(f, "{s}"),
            SizeSpec::Default => f.write_str("k"),
        }
    }
}

/// `Fixed(s)` resolves to `s`, `Default` to `k`.
pub fn resolve_size(spec: SizeSpec, k: usize) -> usize {
    match spec {
        SizeSpec::Fixed(s) => s,
        SizeSpec::Default => k,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub id: String,
    /// Junction: in-degree one, every out-edge relays the input.
    pub broadcast: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub id: String,
    pub tail: String,
    pub head: String,
    pub size: SizeSpec,
    /// Constructor-level annotation; the `size` field is ignored when set.
    pub unlimited: bool,
}

/// A partially fixed-size network. Messages are numbered from 1.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub messages: Vec<SizeSpec>,
    pub sources: BTreeMap<String, BTreeSet<usize>>,
    pub demands: BTreeMap<String, BTreeSet<usize>>,
}

impl Network {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a message and returns its (1-based) index.
    pub fn add_message(&mut self, size: SizeSpec) -> usize {
        self.messages.push(size);
        self.messages.len()
    }

    pub fn add_node(&mut self, id: impl Into<String>) -> &mut Self {
        self.nodes.push(Node { id: id.into(), broadcast: false });
        self
    }

    pub fn add_broadcast(&mut self, id: impl Into<String>) -> &mut Self {
        self.nodes.push(Node { id: id.into(), broadcast: true });
        self
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        tail: impl Into<String>,
        head: impl Into<String>,
        size: SizeSpec,
    ) -> &mut Self {
        self.edges.push(Edge {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            size,
            unlimited: false,
        });
        self
    }

    pub fn add_unlimited_edge(
        &mut self,
        id: impl Into<String>,
        tail: impl Into<String>,
        head: impl Into<String>,
    ) -> &mut Self {
        self.edges.push(Edge {
            id: id.into(),
            tail: tail.into(),
            head: head.into(),
            size: SizeSpec::Default,
            unlimited: true,
        });
        self
    }

    pub fn add_source(&mut self, node: &str, message: usize) -> &mut Self {
        self.sources.entry(node.to_string()).or_default().insert(message);
        self
    }

    pub fn add_demand(&mut self, node: &str, message: usize) -> &mut Self {
        self.demands.entry(node.to_string()).or_default().insert(message);
        self
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.nodes.iter().find(|n| n.id == id)
    }

    pub fn edge(&self, id: &str) -> Option<&Edge> {
        self.edges.iter().find(|e| e.id == id)
    }

    pub fn is_broadcast(&self, id: &str) -> bool {
        self.node(id).is_some_and(|n| n.broadcast)
    }

    /// Source set `A_v` (empty if absent).
    pub fn sources_of(&self, node: &str) -> impl Iterator<Item = usize> + '_ {
        self.sources.get(node).into_iter().flatten().copied()
    }

    /// Demand set `B_v` (empty if absent).
    pub fn demands_of(&self, node: &str) -> impl Iterator<Item = usize> + '_ {
        self.demands.get(node).into_iter().flatten().copied()
    }

    pub fn message_size(&self, message: usize, k: usize) -> usize {
        self.messages[message - 1].resolve(k)
    }

    /// Product of all resolved message sizes: the number of message tuples.
    pub fn tuple_count(&self, k: usize) -> usize {
        self.messages.iter().map(|m| m.resolve(k)).product()
    }

    /// Resolved alphabet size of an edge. An unlimited edge can carry every
    /// message tuple.
    pub fn edge_size(&self, edge: &Edge, k: usize) -> usize {
        if edge.unlimited {
            self.tuple_count(k)
        } else {
            edge.size.resolve(k)
        }
    }

    /// Incoming edges of `node`, sorted by edge id.
    pub fn in_edges(&self, node: &str) -> Vec<&Edge> {
        let mut v: Vec<&Edge> = self.edges.iter().filter(|e| e.head == node).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// Outgoing edges of `node`, sorted by edge id.
    pub fn out_edges(&self, node: &str) -> Vec<&Edge> {
        let mut v: Vec<&Edge> = self.edges.iter().filter(|e| e.tail == node).collect();
        v.sort_by(|a, b| a.id.cmp(&b.id));
        v
    }

    /// True when some edge's resolved size depends on `k`.
    pub fn uses_default(&self) -> bool {
        self.messages.iter().any(|m| m.is_default())
            || self.edges.iter().any(|e| e.unlimited || e.size.is_default())
    }

    pub fn has_unlimited(&self) -> bool {
        self.edges.iter().any(|e| e.unlimited)
    }

    /// No parallel edges and no unlimited annotations.
    pub fn is_simple(&self) -> bool {
        let mut seen = BTreeSet::new();
        self.edges
            .iter()
            .all(|e| !e.unlimited && seen.insert((e.tail.as_str(), e.head.as_str())))
    }

    /// Resolved domain of the encoding function of an edge leaving `node`,
    /// and of the decoding function at `node`: the node's source messages in
    /// ascending order, then its in-edges by edge id.
    pub fn input_radices(&self, node: &str, k: usize) -> Vec<usize> {
        let mut radices: Vec<usize> = self.sources_of(node).map(|m| self.message_size(m, k)).collect();
        radices.extend(self.in_edges(node).into_iter().map(|e| self.edge_size(e, k)));
        radices
    }
}

/// Topological order with ties broken by node id.
///
/// Requires an acyclic network with valid endpoints.
pub fn topo_order(net: &Network) -> Result<Vec<String>, NetworkError> {
    let report = validate(net);
    if !report.ok {
        return Err(NetworkError::Invalid(report));
    }
    Ok(kahn(net).expect("validated network is acyclic"))
}

/// Kahn's algorithm on a min-heap of ids. Returns `None` on a cycle.
pub(crate) fn kahn(net: &Network) -> Option<Vec<String>> {
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;

    let mut indeg: HashMap<&str, usize> = net.nodes.iter().map(|n| (n.id.as_str(), 0)).collect();
    let mut succ: HashMap<&str, Vec<&str>> = HashMap::new();
    for e in &net.edges {
        *indeg.get_mut(e.head.as_str())? += 1;
        succ.entry(e.tail.as_str()).or_default().push(e.head.as_str());
    }
    let mut heap: BinaryHeap<Reverse<&str>> =
        indeg.iter().filter(|(_, &d)| d == 0).map(|(&n, _)| Reverse(n)).collect();
    let mut order = Vec::with_capacity(net.nodes.len());
    while let Some(Reverse(n)) = heap.pop() {
        order.push(n.to_string());
        for &h in succ.get(n).map(Vec::as_slice).unwrap_or(&[]) {
            let d = indeg.get_mut(h).unwrap();
            *d -= 1;
            if *d == 0 {
                heap.push(Reverse(h));
            }
        }
    }
    (order.len() == indeg.len()).then_some(order)
}
