//! Partially fixed-size index coding, decided through the confusion graph.
//!
//! A broadcast symbol `f(M)` from an alphabet of size `a·k^b` must let every
//! client `j` recover `M_{B_j}` from the symbol and `M_{A_j}`. Two message
//! tuples that some client cannot tell apart by side information but must
//! decode differently are confusable; valid encoders are exactly the proper
//! colorings of the confusion graph.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::network::SizeSpec;

/// Largest tuple space the module will build a graph on.
pub const MAX_INDEX_TUPLES: usize = 1 << 12;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IndexError {
    #[error("invalid instance: {0}")]
    Instance(String),
    #[error("{0} message tuples exceed the cap of {MAX_INDEX_TUPLES}")]
    Cap(u128),
    #[error("k must be positive")]
    ZeroK,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Client {
    pub has: Vec<usize>,
    pub wants: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexInstance {
    /// `null` is the default size.
    #[serde(with = "sizes_json")]
    pub messages: Vec<SizeSpec>,
    pub a: usize,
    pub b: usize,
    pub clients: Vec<Client>,
}

mod sizes_json {
    use serde::{Deserialize, Deserializer, Serializer};

    use crate::network::SizeSpec;

    pub fn serialize<S: Serializer>(v: &[SizeSpec], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|m| match m {
            SizeSpec::Fixed(x) => Some(*x),
            SizeSpec::Default => None,
        }))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<SizeSpec>, D::Error> {
        let raw: Vec<Option<usize>> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|m| m.map_or(SizeSpec::Default, SizeSpec::Fixed)).collect())
    }
}

impl IndexInstance {
    /// Sorts, dedups and range-checks index sets and drops wanted messages a
    /// client already has.
    pub fn normalize(&mut self) -> Result<(), IndexError> {
        if self.a == 0 {
            return Err(IndexError::Instance("a must be positive".into()));
        }
        let l = self.messages.len();
        if self.messages.contains(&SizeSpec::Fixed(0)) {
            return Err(IndexError::Instance("message sizes must be positive".into()));
        }
        for (j, c) in self.clients.iter_mut().enumerate() {
            for set in [&mut c.has, &mut c.wants] {
                set.sort_unstable();
                set.dedup();
                if set.iter().any(|&m| m == 0 || m > l) {
                    return Err(IndexError::Instance(format!("client {j}: message index out of range 1..={l}")));
                }
            }
            let has = c.has.clone();
            c.wants.retain(|m| !has.contains(m));
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, IndexError> {
        let mut inst: IndexInstance = serde_json::from_str(s).map_err(|e| IndexError::Instance(e.to_string()))?;
        inst.normalize()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instances serialize")
    }

    pub fn sizes(&self, k: usize) -> Vec<usize> {
        self.messages.iter().map(|m| m.resolve(k)).collect()
    }

    /// `a·k^b`, saturating.
    pub fn alphabet(&self, k: usize) -> usize {
        let p = (k as u128).checked_pow(self.b as u32).unwrap_or(u128::MAX);
        p.saturating_mul(self.a as u128).min(usize::MAX as u128) as usize
    }

    /// Every message tuple, message 1 most significant.
    pub fn tuples(&self, k: usize) -> Result<Vec<Vec<u32>>, IndexError> {
        if k == 0 {
            return Err(IndexError::ZeroK);
        }
        let sizes = self.sizes(k);
        let count = sizes.iter().try_fold(1u128, |acc, &s| acc.checked_mul(s as u128)).unwrap_or(u128::MAX);
        if count > MAX_INDEX_TUPLES as u128 {
            return Err(IndexError::Cap(count));
        }
        let mut all = vec![Vec::new()];
        for s in sizes {
            all = all
                .into_iter()
                .flat_map(|t: Vec<u32>| {
                    (0..s as u32).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        Ok(all)
    }
}

fn project(t: &[u32], set: &[usize]) -> Vec<u32> {
    set.iter().map(|&m| t[m - 1]).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConfusionGraph {
    pub vertices: usize,
    /// Sorted neighbour lists.
    pub adjacency: Vec<Vec<usize>>,
}

impl ConfusionGraph {
    pub fn new(vertices: usize) -> Self {
        ConfusionGraph { vertices, adjacency: vec![Vec::new(); vertices] }
    }

    pub fn from_edges(vertices: usize, edges: &[(usize, usize)]) -> Self {
        let mut g = Self::new(vertices);
        for &(a, b) in edges {
            if a != b {
                g.adjacency[a].push(b);
                g.adjacency[b].push(a);
            }
        }
        for n in &mut g.adjacency {
            n.sort_unstable();
            n.dedup();
        }
        g
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }

    pub fn is_proper(&self, colors: &[u32]) -> bool {
        colors.len() == self.vertices && (0..self.vertices).all(|v| self.adjacency[v].iter().all(|&w| colors[v] != colors[w]))
    }
}

/// Tuples (by row index) joined when some client has equal side information
/// and different demands on them.
pub fn confusion_graph(inst: &IndexInstance, k: usize) -> Result<ConfusionGraph, IndexError> {
    let tuples = inst.tuples(k)?;
    let mut edges = Vec::new();
    for c in &inst.clients {
        if c.wants.is_empty() {
            continue;
        }
        let mut groups: HashMap<Vec<u32>, Vec<usize>> = HashMap::new();
        for (i, t) in tuples.iter().enumerate() {
            groups.entry(project(t, &c.has)).or_default().push(i);
        }
        for members in groups.values() {
            for (x, &i) in members.iter().enumerate() {
                for &j in &members[x + 1..] {
                    if project(&tuples[i], &c.wants) != project(&tuples[j], &c.wants) {
                        edges.push((i, j));
                    }
                }
            }
        }
    }
    Ok(ConfusionGraph::from_edges(tuples.len(), &edges))
}

/// A proper coloring with colors below `m`, if one exists.
///
/// Exact backtracking: a greedy clique is colored first, then the most
/// saturated vertex is branched on, and a new color is only ever the
/// smallest unused one.
pub fn chromatic_leq(g: &ConfusionGraph, m: usize) -> Option<Vec<u32>> {
    let n = g.vertices;
    if n == 0 {
        return Some(Vec::new());
    }
    if m == 0 {
        return None;
    }
    if m >= n {
        return Some((0..n as u32).collect());
    }
    let mut by_degree: Vec<usize> = (0..n).collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.adjacency[v].len()), v));
    let mut clique: Vec<usize> = Vec::new();
    for &v in &by_degree {
        if clique.iter().all(|&c| g.has_edge(v, c)) {
            clique.push(v);
        }
    }
    if clique.len() > m {
        return None;
    }
    let mut s = Coloring { g, m, color: vec![u32::MAX; n], forbid: vec![0; n * m], sat: vec![0; n], used: 0 };
    for (i, &v) in clique.iter().enumerate() {
        s.set(v, i as u32);
    }
    s.used = clique.len();
    if s.search(n - clique.len()) {
        Some(s.color)
    } else {
        None
    }
}

struct Coloring<'g> {
    g: &'g ConfusionGraph,
    m: usize,
    color: Vec<u32>,
    /// `forbid[v * m + c]`: neighbours of `v` colored `c`.
    forbid: Vec<u32>,
    sat: Vec<usize>,
    used: usize,
}

impl Coloring<'_> {
    fn set(&mut self, v: usize, c: u32) {
        self.color[v] = c;
        for &w in &self.g.adjacency[v] {
            let f = &mut self.forbid[w * self.m + c as usize];
            *f += 1;
            if *f == 1 {
                self.sat[w] += 1;
            }
        }
    }

    fn clear(&mut self, v: usize) {
        let c = self.color[v] as usize;
        self.color[v] = u32::MAX;
        for &w in &self.g.adjacency[v] {
            let f = &mut self.forbid[w * self.m + c];
            *f -= 1;
            if *f == 0 {
                self.sat[w] -= 1;
            }
        }
    }

    fn search(&mut self, left: usize) -> bool {
        if left == 0 {
            return true;
        }
        let v = (0..self.g.vertices)
            .filter(|&v| self.color[v] == u32::MAX)
            .max_by_key(|&v| (self.sat[v], self.g.adjacency[v].len(), std::cmp::Reverse(v)))
            .expect("uncolored vertex");
        let top = (self.used + 1).min(self.m);
        for c in 0..top {
            if self.forbid[v * self.m + c] > 0 {
                continue;
            }
            let prev = self.used;
            self.used = self.used.max(c + 1);
            self.set(v, c as u32);
            if self.search(left - 1) {
                return true;
            }
            self.clear(v);
            self.used = prev;
        }
        false
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexOutcome {
    pub k: usize,
    pub alphabet: usize,
    pub solvable: bool,
    /// Encoder table over message tuples, message 1 most significant.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub encoder: Option<Vec<u32>>,
}

/// Checks by simulation that every client decodes on every tuple.
pub fn encoder_works(inst: &IndexInstance, k: usize, f: &[u32]) -> Result<bool, IndexError> {
    let tuples = inst.tuples(k)?;
    if f.len() != tuples.len() || f.iter().any(|&x| x as usize >= inst.alphabet(k)) {
        return Ok(false);
    }
    Ok(inst.clients.iter().all(|c| {
        let mut decoder: HashMap<(u32, Vec<u32>), Vec<u32>> = HashMap::new();
        tuples.iter().zip(f).all(|(t, &x)| {
            let want = project(t, &c.wants);
            decoder.entry((x, project(t, &c.has))).or_insert_with(|| want.clone()) == &want
        })
    }))
}

/// Decides solvability at `k`; a witness encoder comes with a positive
/// answer and has been checked by simulation.
pub fn solvable_at_k(inst: &IndexInstance, k: usize) -> Result<IndexOutcome, IndexError> {
    let g = confusion_graph(inst, k)?;
    let alphabet = inst.alphabet(k);
    let encoder = chromatic_leq(&g, alphabet);
    if let Some(f) = &encoder {
        assert!(encoder_works(inst, k, f)?, "coloring is not a valid encoder");
    }
    Ok(IndexOutcome { k, alphabet, solvable: encoder.is_some(), encoder })
}
