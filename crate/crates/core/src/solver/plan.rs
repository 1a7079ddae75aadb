//! Reduction of a network at fixed `k` to a constraint problem over
//! per-edge functions of "knowledge classes".
//!
//! Every node knows a partition of the message tuples: the classes of its
//! source messages and incoming signals. A searched edge is a function from
//! its tail's classes to its alphabet; a demand holds iff the demand node's
//! classes never mix tuples that differ on the demanded messages.
//!
//! With symmetry breaking enabled the plan also
//! - contracts relay chains and merges parallel edges into super-edges,
//! - marks a super-edge as forwarding when its alphabet can carry every
//!   class of its tail; an injective code is never worse, so such edges are
//!   not searched and their head inherits the tail's knowledge,
//! - fixes edges that cannot influence any demand to the constant 0.

use std::collections::{BTreeSet, HashMap};

use super::partition::{separates, Partition};
use super::scheme::{domain_size, row_index, verify_scheme, CodingScheme, TupleSpace};
use super::{SolveError, SolveOptions};
use crate::network::{kahn, validate, Network};

/// Largest tuple space the search accepts.
pub const MAX_SEARCH_TUPLES: usize = 1 << 16;

#[derive(Clone, Debug, Default)]
pub(crate) struct Know {
    /// Message indices, 0-based.
    pub msgs: Vec<usize>,
    pub pins: Vec<usize>,
    pub vars: Vec<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    Var(usize),
    Pinned(usize),
    Forwarded,
    Const,
}

#[derive(Clone, Debug)]
struct SuperEdge {
    tail: usize,
    /// Each chain is a path of edges (indices into `net.edges`).
    chains: Vec<Vec<usize>>,
    chain_caps: Vec<usize>,
    cap: usize,
    role: Role,
}

#[derive(Clone, Debug)]
pub(crate) struct VarSpec {
    pub cap: usize,
    pub know: Know,
    /// Demands whose last variable is this one.
    pub checks: Vec<usize>,
}

#[derive(Clone, Debug)]
pub(crate) struct DemandSpec {
    pub know: Know,
    pub targets: Vec<usize>,
}

pub(crate) struct Plan {
    pub symmetric: bool,
    pub tuples: usize,
    pub msg_sizes: Vec<usize>,
    pub msg_cols: Vec<Vec<u32>>,
    pub pin_cols: Vec<Vec<u32>>,
    pub pin_caps: Vec<usize>,
    pub vars: Vec<VarSpec>,
    pub demands: Vec<DemandSpec>,
    /// Some demand without searched inputs already fails.
    pub infeasible: bool,
    /// Messages known at every variable tail and every checked demand.
    pub common: Vec<usize>,
    k: usize,
    supers: Vec<SuperEdge>,
    /// Non-relay nodes in topological order.
    super_topo: Vec<usize>,
    in_supers: Vec<Vec<usize>>,
    out_supers: Vec<Vec<usize>>,
}

struct Graph<'a> {
    net: &'a Network,
    index: HashMap<&'a str, usize>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
    sources: Vec<Vec<usize>>,
    demands: Vec<Vec<usize>>,
    sizes: Vec<usize>,
}

impl<'a> Graph<'a> {
    fn new(net: &'a Network, k: usize) -> Self {
        let index: HashMap<&str, usize> = net.nodes.iter().enumerate().map(|(i, n)| (n.id.as_str(), i)).collect();
        let mut ins = vec![Vec::new(); net.nodes.len()];
        let mut outs = vec![Vec::new(); net.nodes.len()];
        let mut order: Vec<usize> = (0..net.edges.len()).collect();
        order.sort_by(|&a, &b| net.edges[a].id.cmp(&net.edges[b].id));
        for j in order {
            let e = &net.edges[j];
            outs[index[e.tail.as_str()]].push(j);
            ins[index[e.head.as_str()]].push(j);
        }
        let per_node = |m: &std::collections::BTreeMap<String, BTreeSet<usize>>| {
            net.nodes
                .iter()
                .map(|n| m.get(&n.id).map(|s| s.iter().map(|&x| x - 1).collect()).unwrap_or_default())
                .collect()
        };
        Graph {
            net,
            index,
            ins,
            outs,
            sources: per_node(&net.sources),
            demands: per_node(&net.demands),
            sizes: net.edges.iter().map(|e| net.edge_size(e, k)).collect(),
        }
    }

    fn tail(&self, e: usize) -> usize {
        self.index[self.net.edges[e].tail.as_str()]
    }

    fn head(&self, e: usize) -> usize {
        self.index[self.net.edges[e].head.as_str()]
    }

    fn radices(&self, node: usize, msg_sizes: &[usize]) -> Vec<usize> {
        let mut r: Vec<usize> = self.sources[node].iter().map(|&m| msg_sizes[m]).collect();
        r.extend(self.ins[node].iter().map(|&e| self.sizes[e]));
        r
    }
}

fn union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut s: BTreeSet<usize> = a.iter().copied().collect();
    s.extend(b.iter().copied());
    s.into_iter().collect()
}

impl Plan {
    pub fn build(net: &Network, k: usize, opts: &SolveOptions) -> Result<Plan, SolveError> {
        let report = validate(net);
        if !report.ok {
            return Err(SolveError::Invalid(report));
        }
        if k == 0 {
            return Err(SolveError::ZeroK);
        }
        let space = TupleSpace::new(net, k).map_err(|_| SolveError::TooLarge("message tuple space".into()))?;
        if space.count > MAX_SEARCH_TUPLES {
            return Err(SolveError::TooLarge(format!(
                "{} message tuples (search limit {MAX_SEARCH_TUPLES})",
                space.count
            )));
        }
        let t_count = space.count;
        let msg_cols = space.columns();
        let msg_sizes = space.sizes.clone();
        let g = Graph::new(net, k);
        let topo: Vec<usize> = kahn(net).expect("validated").iter().map(|id| g.index[id.as_str()]).collect();
        let mut topo_pos = vec![0; net.nodes.len()];
        for (i, &n) in topo.iter().enumerate() {
            topo_pos[n] = i;
        }

        // Pins.
        let edge_index: HashMap<&str, usize> = net.edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
        let mut pinned: HashMap<usize, usize> = HashMap::new();
        let mut pin_cols = Vec::new();
        let mut pin_caps = Vec::new();
        for (id, table) in &opts.pins {
            let pin_err = |reason: String| SolveError::Pin { edge: id.clone(), reason };
            let &e = edge_index.get(id.as_str()).ok_or_else(|| pin_err("no such edge".into()))?;
            let tail = g.tail(e);
            if !g.ins[tail].is_empty() {
                return Err(pin_err("pinned edges must leave a node without incoming edges".into()));
            }
            let radices = g.radices(tail, &msg_sizes);
            let rows = domain_size(&radices).ok_or_else(|| pin_err("domain too large".into()))?;
            if table.len() != rows {
                return Err(pin_err(format!("table has {} rows, domain has {rows}", table.len())));
            }
            if let Some(v) = table.iter().find(|&&v| v as usize >= g.sizes[e]) {
                return Err(pin_err(format!("value {v} out of range for size {}", g.sizes[e])));
            }
            let srcs = &g.sources[tail];
            let col = (0..t_count)
                .map(|t| table[row_index(&radices, srcs.iter().map(|&m| msg_cols[m][t]))])
                .collect();
            pinned.insert(e, pin_cols.len());
            pin_cols.push(col);
            pin_caps.push(g.sizes[e]);
        }

        let symmetric = opts.symmetry_breaking;
        let is_relay: Vec<bool> = (0..net.nodes.len())
            .map(|n| {
                symmetric
                    && g.ins[n].len() == 1
                    && g.outs[n].len() == 1
                    && g.sources[n].is_empty()
                    && g.demands[n].is_empty()
                    && !pinned.contains_key(&g.ins[n][0])
            })
            .collect();

        // Chains, then super-edges.
        struct Chain {
            tail: usize,
            head: usize,
            edges: Vec<usize>,
            cap: usize,
            pin: Option<usize>,
        }
        let mut chains = Vec::new();
        for e in 0..net.edges.len() {
            let tail = g.tail(e);
            if is_relay[tail] {
                continue;
            }
            let mut edges = vec![e];
            let mut cur = g.head(e);
            while is_relay[cur] {
                let next = g.outs[cur][0];
                edges.push(next);
                cur = g.head(next);
            }
            let cap = edges.iter().map(|&j| g.sizes[j]).min().expect("nonempty");
            chains.push(Chain { tail, head: cur, edges, cap, pin: pinned.get(&e).copied() });
        }
        let mut supers: Vec<(usize, SuperEdge)> = Vec::new();
        let mut by_pair: HashMap<(usize, usize), usize> = HashMap::new();
        for c in chains {
            let role = c.pin.map_or(Role::Var(0), Role::Pinned);
            if symmetric && c.pin.is_none() {
                if let Some(&s) = by_pair.get(&(c.tail, c.head)) {
                    let se = &mut supers[s].1;
                    se.chains.push(c.edges);
                    se.chain_caps.push(c.cap);
                    continue;
                }
                by_pair.insert((c.tail, c.head), supers.len());
            }
            supers.push((c.head, SuperEdge { tail: c.tail, chains: vec![c.edges], chain_caps: vec![c.cap], cap: c.cap, role }));
        }
        for (_, s) in &mut supers {
            // Chains inside a super-edge are ordered by their first edge id.
            let mut order: Vec<usize> = (0..s.chains.len()).collect();
            order.sort_by(|&a, &b| net.edges[s.chains[a][0]].id.cmp(&net.edges[s.chains[b][0]].id));
            s.chains = order.iter().map(|&i| s.chains[i].clone()).collect();
            s.chain_caps = order.iter().map(|&i| s.chain_caps[i]).collect();
            s.cap = if symmetric {
                s.chain_caps.iter().fold(1usize, |acc, &c| acc.saturating_mul(c)).min(t_count.max(1))
            } else {
                s.chain_caps[0]
            };
        }
        supers.sort_by(|a, b| {
            let key = |s: &SuperEdge| (topo_pos[s.tail], net.edges[s.chains[0][0]].id.clone());
            key(&a.1).cmp(&key(&b.1))
        });
        let heads: Vec<usize> = supers.iter().map(|(h, _)| *h).collect();
        let mut supers: Vec<SuperEdge> = supers.into_iter().map(|(_, s)| s).collect();

        let super_topo: Vec<usize> = topo.iter().copied().filter(|&n| !is_relay[n]).collect();
        let mut in_supers = vec![Vec::new(); net.nodes.len()];
        let mut out_supers = vec![Vec::new(); net.nodes.len()];
        for (i, s) in supers.iter().enumerate() {
            in_supers[heads[i]].push(i);
            out_supers[s.tail].push(i);
        }

        // Static bound on the number of classes a node can distinguish.
        let mut max_classes = vec![1usize; net.nodes.len()];
        for &u in &super_topo {
            let mut mc = g.sources[u].iter().fold(1usize, |acc, &m| acc.saturating_mul(msg_sizes[m]));
            for &s in &in_supers[u] {
                let se = &supers[s];
                mc = mc.saturating_mul(se.cap.min(max_classes[se.tail]));
            }
            max_classes[u] = mc.min(t_count);
        }
        if symmetric {
            for s in &mut supers {
                if s.role == Role::Var(0) && s.cap >= max_classes[s.tail] {
                    s.role = Role::Forwarded;
                }
            }
        }

        // Knowledge, with variables still named by super-edge index.
        let mut know: Vec<Know> = vec![Know::default(); net.nodes.len()];
        for &u in &super_topo {
            let mut kn = Know { msgs: g.sources[u].clone(), pins: Vec::new(), vars: Vec::new() };
            for &s in &in_supers[u] {
                match supers[s].role {
                    Role::Forwarded => {
                        let up = &know[supers[s].tail];
                        kn.msgs = union(&kn.msgs, &up.msgs);
                        kn.pins = union(&kn.pins, &up.pins);
                        kn.vars = union(&kn.vars, &up.vars);
                    }
                    Role::Pinned(p) => kn.pins = union(&kn.pins, &[p]),
                    _ => kn.vars = union(&kn.vars, &[s]),
                }
            }
            know[u] = kn;
        }

        let demand_nodes: Vec<usize> = super_topo.iter().copied().filter(|&u| !g.demands[u].is_empty()).collect();
        let mut relevant = vec![!symmetric; supers.len()];
        let mut stack: Vec<usize> = demand_nodes.iter().flat_map(|&u| know[u].vars.clone()).collect();
        while let Some(s) = stack.pop() {
            if !relevant[s] {
                relevant[s] = true;
                stack.extend(know[supers[s].tail].vars.iter().copied());
            }
        }
        let mut var_of = vec![usize::MAX; supers.len()];
        let mut var_supers = Vec::new();
        for (i, s) in supers.iter_mut().enumerate() {
            if s.role == Role::Var(0) {
                if relevant[i] {
                    var_of[i] = var_supers.len();
                    s.role = Role::Var(var_supers.len());
                    var_supers.push(i);
                } else {
                    s.role = Role::Const;
                }
            }
        }
        let remap = |kn: &Know| Know {
            msgs: kn.msgs.clone(),
            pins: kn.pins.clone(),
            vars: kn.vars.iter().filter(|&&s| var_of[s] != usize::MAX).map(|&s| var_of[s]).collect(),
        };
        let mut vars: Vec<VarSpec> = var_supers
            .iter()
            .map(|&s| VarSpec { cap: supers[s].cap, know: remap(&know[supers[s].tail]), checks: Vec::new() })
            .collect();

        let mut demands = Vec::new();
        let mut infeasible = false;
        for &u in &demand_nodes {
            let d = DemandSpec { know: remap(&know[u]), targets: g.demands[u].clone() };
            match d.know.vars.iter().max() {
                Some(&last) => {
                    vars[last].checks.push(demands.len());
                    demands.push(d);
                }
                None => {
                    let all: Vec<u32> = (0..t_count as u32).collect();
                    if !static_separates(&d, &all, &msg_cols, &msg_sizes, &pin_cols, &pin_caps) {
                        infeasible = true;
                    }
                }
            }
        }

        let mut common: Option<BTreeSet<usize>> = None;
        for kn in vars.iter().map(|v| &v.know).chain(demands.iter().map(|d| &d.know)) {
            let s: BTreeSet<usize> = kn.msgs.iter().copied().collect();
            common = Some(match common {
                None => s,
                Some(c) => c.intersection(&s).copied().collect(),
            });
        }

        Ok(Plan {
            symmetric,
            tuples: t_count,
            msg_sizes,
            msg_cols,
            pin_cols,
            pin_caps,
            vars,
            demands,
            infeasible,
            common: common.map(|c| c.into_iter().collect()).unwrap_or_default(),
            k,
            supers,
            super_topo,
            in_supers,
            out_supers,
        })
    }

    /// Groups tuples by the value of the common messages.
    pub fn slices(&self) -> Vec<Vec<u32>> {
        let mut p = Partition::trivial(self.tuples);
        for &m in &self.common {
            p.refine(&self.msg_cols[m], self.msg_sizes[m]);
        }
        p.classes()
    }

    /// Builds the full scheme from global variable columns and checks it.
    pub fn materialize(&self, net: &Network, var_cols: &[Vec<u32>]) -> Result<CodingScheme, SolveError> {
        let g = Graph::new(net, self.k);
        let t_count = self.tuples;
        let mut svals: Vec<Vec<u32>> = self
            .supers
            .iter()
            .map(|s| match s.role {
                Role::Var(i) => var_cols[i].clone(),
                Role::Pinned(p) => self.pin_cols[p].clone(),
                Role::Const => vec![0; t_count],
                Role::Forwarded => Vec::new(),
            })
            .collect();
        for &u in &self.super_topo {
            if !self.out_supers[u].iter().any(|&s| self.supers[s].role == Role::Forwarded) {
                continue;
            }
            let mut p = Partition::trivial(t_count);
            for &m in &g.sources[u] {
                p.refine(&self.msg_cols[m], self.msg_sizes[m]);
            }
            for &s in &self.in_supers[u] {
                p.refine(&svals[s], self.supers[s].cap);
            }
            for &s in &self.out_supers[u] {
                if self.supers[s].role == Role::Forwarded {
                    debug_assert!(p.count <= self.supers[s].cap);
                    svals[s] = p.ids.clone();
                }
            }
        }

        let mut edge_vals: Vec<Vec<u32>> = vec![Vec::new(); net.edges.len()];
        for (s, se) in self.supers.iter().enumerate() {
            let mut digits = vec![vec![0u32; t_count]; se.chains.len()];
            for t in 0..t_count {
                let mut v = svals[s][t] as usize;
                for j in (0..se.chains.len()).rev() {
                    digits[j][t] = (v % se.chain_caps[j]) as u32;
                    v /= se.chain_caps[j];
                }
            }
            for (chain, col) in se.chains.iter().zip(digits) {
                for &e in chain {
                    edge_vals[e] = col.clone();
                }
            }
        }

        let table_for = |node: usize| -> Result<(usize, Vec<usize>), SolveError> {
            let radices = g.radices(node, &self.msg_sizes);
            let rows = domain_size(&radices)
                .ok_or_else(|| SolveError::TooLarge(format!("domain of `{}`", net.nodes[node].id)))?;
            let row_of_tuple = (0..t_count)
                .map(|t| {
                    let digits = g.sources[node]
                        .iter()
                        .map(|&m| self.msg_cols[m][t])
                        .chain(g.ins[node].iter().map(|&e| edge_vals[e][t]));
                    row_index(&radices, digits)
                })
                .collect();
            Ok((rows, row_of_tuple))
        };
        let mut encodings = std::collections::BTreeMap::new();
        let mut decodings = std::collections::BTreeMap::new();
        for u in 0..net.nodes.len() {
            if g.outs[u].is_empty() && g.demands[u].is_empty() {
                continue;
            }
            let (rows, row_of) = table_for(u)?;
            for &e in &g.outs[u] {
                let mut table = vec![0u32; rows];
                for (t, &r) in row_of.iter().enumerate() {
                    table[r] = edge_vals[e][t];
                }
                encodings.insert(net.edges[e].id.clone(), table);
            }
            if !g.demands[u].is_empty() {
                let width = g.demands[u].len();
                let mut table = vec![vec![0u32; width]; rows];
                for (t, &r) in row_of.iter().enumerate() {
                    table[r] = g.demands[u].iter().map(|&m| self.msg_cols[m][t]).collect();
                }
                decodings.insert(net.nodes[u].id.clone(), table);
            }
        }
        let scheme = CodingScheme { k: self.k, encodings, decodings };
        let report = verify_scheme(net, &scheme);
        assert!(report.ok, "solver produced an invalid witness: {report}");
        Ok(scheme)
    }
}

/// Separation check for a demand that depends on no searched edge.
fn static_separates(
    d: &DemandSpec,
    tuples: &[u32],
    msg_cols: &[Vec<u32>],
    msg_sizes: &[usize],
    pin_cols: &[Vec<u32>],
    pin_caps: &[usize],
) -> bool {
    let pick = |col: &[u32]| -> Vec<u32> { tuples.iter().map(|&t| col[t as usize]).collect() };
    let mut base = Partition::trivial(tuples.len());
    for &m in &d.know.msgs {
        base.refine(&pick(&msg_cols[m]), msg_sizes[m]);
    }
    for &p in &d.know.pins {
        base.refine(&pick(&pin_cols[p]), pin_caps[p]);
    }
    let mut target = Partition::trivial(tuples.len());
    for &m in &d.targets {
        target.refine(&pick(&msg_cols[m]), msg_sizes[m]);
    }
    separates(&base, &target)
}
