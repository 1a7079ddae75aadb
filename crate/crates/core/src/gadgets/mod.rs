//! Checkers and gates as network fragments with typed ports.
//!
//! Fragments are compiled from condition lists by two rules:
//! - `Determined(messages | S)` becomes a demand node that holds the message
//!   inputs of `S` as sources and receives the signal inputs of `S`;
//! - an existential signal becomes a node receiving its inputs and emitting
//!   one edge of the declared size into a broadcast junction.
//!
//! Every signal lives on a broadcast junction whose fan-out edges are
//! unlimited; [`crate::network::canonicalize`] turns them into sized edges.

mod accept;
mod compose;
mod library;

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::entropy::InfoCondition;
use crate::network::{to_dot, Network, NetworkDoc, NetworkError, SizeSpec};
use crate::solver::SolveError;

pub use accept::{
    accepted_by_conditions, accepted_set, accepted_set_in, all_functions, read_switch_state, CandidateFunction, Harness,
    SwitchState,
};
pub use compose::{compose, standalone, Binding, Composer, Signal};
pub use library::*;

#[derive(Debug, thiserror::Error)]
pub enum GadgetError {
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("name `{0}` is already used")]
    Collision(String),
    #[error("port `{port}`: {reason}")]
    Binding { port: String, reason: String },
    #[error("port `{0}` must be bound")]
    Unbound(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error("{0}")]
    Candidate(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PortKind {
    /// Must be fed by messages.
    MessageIn,
    SignalIn,
    SignalOut,
    /// Fans out to every non-broadcast node of the fragment.
    ConditionIn,
}

/// Declared alphabet of a port or existential.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PortSize {
    Fixed(usize),
    Default,
    Any,
}

impl PortSize {
    pub fn spec(self) -> Option<SizeSpec> {
        match self {
            PortSize::Fixed(s) => Some(SizeSpec::Fixed(s)),
            PortSize::Default => Some(SizeSpec::Default),
            PortSize::Any => None,
        }
    }

    pub fn resolve(self, k: usize) -> Option<usize> {
        self.spec().map(|s| s.resolve(k))
    }
}

impl From<SizeSpec> for PortSize {
    fn from(s: SizeSpec) -> Self {
        match s {
            SizeSpec::Fixed(v) => PortSize::Fixed(v),
            SizeSpec::Default => PortSize::Default,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Attach {
    /// Placeholder message index in the fragment.
    Message(usize),
    /// Broadcast junction carrying the signal.
    Node(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Port {
    pub name: String,
    pub kind: PortKind,
    pub size: PortSize,
    pub attach: Attach,
}

/// An internal signal the checker may choose freely, as a function of its
/// inputs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Existential {
    pub name: String,
    pub size: PortSize,
    pub inputs: Vec<String>,
}

/// A declared condition, required on every slice where `given` is fixed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub cond: InfoCondition,
    pub given: Vec<String>,
    /// For `SupportAtMost`: the bound is the default size `k`.
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub bound_is_k: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Gadget {
    pub name: String,
    #[serde(serialize_with = "fragment_doc")]
    pub fragment: Network,
    pub ports: Vec<Port>,
    pub existentials: Vec<Existential>,
    pub conditions: Vec<Condition>,
}

fn fragment_doc<S: serde::Serializer>(net: &Network, s: S) -> Result<S::Ok, S::Error> {
    NetworkDoc::from(net).serialize(s)
}

impl Gadget {
    pub fn port(&self, name: &str) -> Option<&Port> {
        self.ports.iter().find(|p| p.name == name)
    }

    /// A checker has no outputs.
    pub fn is_checker(&self) -> bool {
        self.ports.iter().all(|p| p.kind != PortKind::SignalOut)
    }

    /// Edge carrying output `port` once the gadget is embedded under `prefix`.
    pub fn output_edge(&self, prefix: &str, port: &str) -> Option<String> {
        let p = self.port(port).filter(|p| p.kind == PortKind::SignalOut)?;
        let Attach::Node(j) = &p.attach else { return None };
        Some(format!("{prefix}:@{j}->{j}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("gadgets serialize")
    }

    pub fn to_dot(&self) -> String {
        to_dot(&self.fragment)
    }

    fn names(&self) -> BTreeSet<&str> {
        self.ports.iter().map(|p| p.name.as_str()).chain(self.existentials.iter().map(|e| e.name.as_str())).collect()
    }
}

/// Adds condition input `name` with alphabet `w_alphabet`: every
/// non-broadcast node receives it over an unlimited edge, every existential
/// may depend on it, and every condition is required slice by slice.
pub fn conditionalize_as(g: &Gadget, name: &str, w_alphabet: usize) -> Result<Gadget, GadgetError> {
    if w_alphabet == 0 {
        return Err(GadgetError::Parameter("condition alphabet must be positive".into()));
    }
    if g.names().contains(name) || g.fragment.node(name).is_some() {
        return Err(GadgetError::Collision(name.to_string()));
    }
    let mut out = g.clone();
    out.name = format!("cond_{}", g.name);
    let targets: Vec<String> = g.fragment.nodes.iter().filter(|n| !n.broadcast).map(|n| n.id.clone()).collect();
    out.fragment.add_broadcast(name);
    for t in targets {
        out.fragment.add_unlimited_edge(format!("{name}->{t}"), name, &t);
    }
    out.ports.push(Port {
        name: name.to_string(),
        kind: PortKind::ConditionIn,
        size: PortSize::Fixed(w_alphabet),
        attach: Attach::Node(name.to_string()),
    });
    for e in &mut out.existentials {
        e.inputs.push(name.to_string());
    }
    for c in &mut out.conditions {
        c.given.push(name.to_string());
    }
    Ok(out)
}

/// [`conditionalize_as`] with the condition input named `W`.
pub fn conditionalize(g: &Gadget, w_alphabet: usize) -> Result<Gadget, GadgetError> {
    conditionalize_as(g, "W", w_alphabet)
}

#[derive(Clone, Debug)]
pub(crate) enum Handle {
    Msgs(Vec<usize>),
    Junction(String),
}

/// Incremental construction of a fragment (or of a whole composed network).
pub(crate) struct Builder {
    name: String,
    net: Network,
    handles: BTreeMap<String, Handle>,
    sizes: BTreeMap<String, PortSize>,
    ports: Vec<Port>,
    existentials: Vec<Existential>,
    conditions: Vec<Condition>,
    demands: usize,
}

fn rename_condition(c: &InfoCondition, f: &dyn Fn(&str) -> String) -> InfoCondition {
    let r = |v: &Vec<String>| v.iter().map(|n| f(n)).collect::<Vec<_>>();
    match c {
        InfoCondition::Determined { target, given } => InfoCondition::Determined { target: r(target), given: r(given) },
        InfoCondition::Independent { a, b } => InfoCondition::Independent { a: r(a), b: r(b) },
        InfoCondition::Uniform { set } => InfoCondition::Uniform { set: r(set) },
        InfoCondition::SupportAtMost { set, bound } => InfoCondition::SupportAtMost { set: r(set), bound: *bound },
    }
}

impl Builder {
    pub fn new(name: &str) -> Self {
        Builder {
            name: name.to_string(),
            net: Network::new(),
            handles: BTreeMap::new(),
            sizes: BTreeMap::new(),
            ports: Vec::new(),
            existentials: Vec::new(),
            conditions: Vec::new(),
            demands: 0,
        }
    }

    fn claim(&mut self, name: &str, h: Handle, size: PortSize) -> Result<(), GadgetError> {
        if self.handles.contains_key(name) {
            return Err(GadgetError::Collision(name.to_string()));
        }
        self.handles.insert(name.to_string(), h);
        self.sizes.insert(name.to_string(), size);
        Ok(())
    }

    pub fn handle(&self, name: &str) -> Result<&Handle, GadgetError> {
        self.handles.get(name).ok_or_else(|| GadgetError::UnknownName(name.to_string()))
    }

    pub fn size_of(&self, name: &str) -> PortSize {
        self.sizes.get(name).copied().unwrap_or(PortSize::Any)
    }

    /// A real message (no port).
    pub fn message(&mut self, name: &str, size: SizeSpec) -> Result<usize, GadgetError> {
        let idx = self.net.add_message(size);
        self.claim(name, Handle::Msgs(vec![idx]), size.into())?;
        Ok(idx)
    }

    pub fn message_in(&mut self, name: &str, size: SizeSpec) -> Result<(), GadgetError> {
        let idx = self.message(name, size)?;
        self.ports.push(Port {
            name: name.to_string(),
            kind: PortKind::MessageIn,
            size: size.into(),
            attach: Attach::Message(idx),
        });
        Ok(())
    }

    fn junction_port(&mut self, name: &str, kind: PortKind, size: PortSize) -> Result<(), GadgetError> {
        self.claim(name, Handle::Junction(name.to_string()), size)?;
        self.net.add_broadcast(name);
        self.ports.push(Port { name: name.to_string(), kind, size, attach: Attach::Node(name.to_string()) });
        Ok(())
    }

    pub fn signal_in(&mut self, name: &str, size: PortSize) -> Result<(), GadgetError> {
        self.junction_port(name, PortKind::SignalIn, size)
    }

    /// Wires the named inputs into `node`: message inputs become sources,
    /// signal inputs arrive over unlimited edges.
    fn feed(&mut self, node: &str, inputs: &[&str]) -> Result<(), GadgetError> {
        let mut seen = BTreeSet::new();
        for &i in inputs {
            if !seen.insert(i) {
                continue;
            }
            match self.handle(i)?.clone() {
                Handle::Msgs(ms) => {
                    for m in ms {
                        self.net.add_source(node, m);
                    }
                }
                Handle::Junction(j) => {
                    self.net.add_unlimited_edge(format!("{j}->{node}"), &j, node);
                }
            }
        }
        Ok(())
    }

    /// Existential signal `name` of the given size, computed from `inputs`.
    pub fn internal(&mut self, name: &str, size: SizeSpec, inputs: &[&str]) -> Result<(), GadgetError> {
        let node = format!("@{name}");
        self.claim(name, Handle::Junction(name.to_string()), size.into())?;
        self.net.add_node(&node);
        self.feed(&node, inputs)?;
        self.net.add_broadcast(name);
        self.net.add_edge(format!("{node}->{name}"), &node, name, size);
        self.existentials.push(Existential {
            name: name.to_string(),
            size: size.into(),
            inputs: inputs.iter().map(|s| s.to_string()).collect(),
        });
        self.conditions.push(Condition {
            cond: InfoCondition::determined(&[name], inputs),
            given: Vec::new(),
            bound_is_k: false,
        });
        Ok(())
    }

    /// Exposes an existing signal as an output port.
    pub fn output(&mut self, name: &str) -> Result<(), GadgetError> {
        let Handle::Junction(j) = self.handle(name)?.clone() else {
            return Err(GadgetError::Binding { port: name.into(), reason: "outputs must be signals".into() });
        };
        let size = self.size_of(name);
        self.ports.push(Port { name: name.to_string(), kind: PortKind::SignalOut, size, attach: Attach::Node(j) });
        Ok(())
    }

    /// Demand node requiring `targets` (messages) from `given`.
    pub fn demand(&mut self, targets: &[&str], given: &[&str]) -> Result<(), GadgetError> {
        self.demands += 1;
        let node = format!("d{}", self.demands);
        self.net.add_node(&node);
        self.feed(&node, given)?;
        for &t in targets {
            let Handle::Msgs(ms) = self.handle(t)?.clone() else {
                return Err(GadgetError::Binding { port: t.into(), reason: "demanded inputs must be messages".into() });
            };
            for m in ms {
                self.net.add_demand(&node, m);
            }
        }
        self.conditions.push(Condition { cond: InfoCondition::determined(targets, given), given: Vec::new(), bound_is_k: false });
        Ok(())
    }

    pub fn declare(&mut self, cond: InfoCondition, bound_is_k: bool) {
        self.conditions.push(Condition { cond, given: Vec::new(), bound_is_k });
    }

    /// A new name standing for several messages at once.
    pub fn group(&mut self, name: &str, members: &[&str]) -> Result<(), GadgetError> {
        let mut ms = Vec::new();
        let mut fixed: Option<usize> = Some(1);
        for &m in members {
            let Handle::Msgs(v) = self.handle(m)?.clone() else {
                return Err(GadgetError::Binding { port: name.into(), reason: format!("`{m}` is not a message") });
            };
            fixed = match (fixed, self.size_of(m)) {
                (Some(a), PortSize::Fixed(b)) => Some(a * b),
                _ => None,
            };
            ms.extend(v);
        }
        let size = match (members.len(), fixed) {
            (1, _) => self.size_of(members[0]),
            (_, Some(s)) => PortSize::Fixed(s),
            _ => PortSize::Any,
        };
        self.claim(name, Handle::Msgs(ms), size)
    }

    /// A new junction carrying the joint value of `members`.
    pub fn combine(&mut self, name: &str, members: &[&str]) -> Result<(), GadgetError> {
        let node = format!("@{name}");
        self.net.add_node(&node);
        self.feed(&node, members)?;
        self.claim(name, Handle::Junction(name.to_string()), PortSize::Any)?;
        self.net.add_broadcast(name);
        self.net.add_unlimited_edge(format!("{node}->{name}"), &node, name);
        Ok(())
    }

    /// A signal computed by a fresh node holding every message; the edge id
    /// is returned so that the caller can pin it.
    pub fn free_signal(&mut self, name: &str, size: SizeSpec) -> Result<String, GadgetError> {
        let node = format!("@{name}");
        self.claim(name, Handle::Junction(name.to_string()), size.into())?;
        self.net.add_node(&node);
        for m in 1..=self.net.messages.len() {
            self.net.add_source(&node, m);
        }
        self.net.add_broadcast(name);
        let id = format!("{node}->{name}");
        self.net.add_edge(&id, &node, name, size);
        Ok(id)
    }

    /// Copies `sub` under `prefix`. `map` binds sub ports to names of this
    /// builder; outputs listed in `map` become new names here. Unbound
    /// condition inputs receive a constant.
    pub fn embed(&mut self, prefix: &str, sub: &Gadget, map: &[(&str, &str)]) -> Result<(), GadgetError> {
        let map: BTreeMap<&str, &str> = map.iter().copied().collect();
        for k in map.keys() {
            if sub.port(k).is_none() {
                return Err(GadgetError::UnknownName(format!("{prefix}/{k}")));
            }
        }
        let pid = |id: &str| format!("{prefix}/{id}");
        // Distinct from the `junction->node` ids this builder creates itself.
        let eid = |id: &str| format!("{prefix}:{id}");
        let mut msg_map: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        let mut feeds: Vec<(String, Option<String>)> = Vec::new();
        for p in &sub.ports {
            let bound = map.get(p.name.as_str()).copied();
            match (p.kind, &p.attach) {
                (PortKind::MessageIn, Attach::Message(idx)) => {
                    let name = bound.ok_or_else(|| GadgetError::Unbound(pid(&p.name)))?;
                    let Handle::Msgs(ms) = self.handle(name)?.clone() else {
                        return Err(GadgetError::Binding {
                            port: pid(&p.name),
                            reason: format!("message input bound to signal `{name}`"),
                        });
                    };
                    check_size(&pid(&p.name), p.size, self.size_of(name))?;
                    msg_map.insert(*idx, ms);
                }
                (PortKind::SignalIn, Attach::Node(j)) => {
                    let name = bound.ok_or_else(|| GadgetError::Unbound(pid(&p.name)))?;
                    check_size(&pid(&p.name), p.size, self.size_of(name))?;
                    feeds.push((pid(j), Some(name.to_string())));
                }
                (PortKind::ConditionIn, Attach::Node(j)) => feeds.push((pid(j), bound.map(str::to_string))),
                (PortKind::SignalOut, Attach::Node(_)) => {}
                _ => return Err(GadgetError::Parameter(format!("malformed port {}", p.name))),
            }
        }
        for n in &sub.fragment.nodes {
            let id = pid(&n.id);
            if self.net.node(&id).is_some() {
                return Err(GadgetError::Collision(id));
            }
            if n.broadcast {
                self.net.add_broadcast(id);
            } else {
                self.net.add_node(id);
            }
        }
        for e in &sub.fragment.edges {
            if e.unlimited {
                self.net.add_unlimited_edge(eid(&e.id), pid(&e.tail), pid(&e.head));
            } else {
                self.net.add_edge(eid(&e.id), pid(&e.tail), pid(&e.head), e.size);
            }
        }
        let sub_msgs = |m: usize| msg_map.get(&m).cloned().unwrap_or_default();
        for (n, ms) in &sub.fragment.sources {
            for &m in ms {
                for real in sub_msgs(m) {
                    self.net.add_source(&pid(n), real);
                }
            }
        }
        for (n, ms) in &sub.fragment.demands {
            for &m in ms {
                for real in sub_msgs(m) {
                    self.net.add_demand(&pid(n), real);
                }
            }
        }
        for (junction, bound) in feeds {
            match bound {
                Some(name) => match self.handle(&name)?.clone() {
                    Handle::Junction(j) => {
                        self.net.add_unlimited_edge(format!("{j}->{junction}"), &j, &junction);
                    }
                    Handle::Msgs(ms) => {
                        let node = format!("{junction}<");
                        self.net.add_node(&node);
                        for m in ms {
                            self.net.add_source(&node, m);
                        }
                        self.net.add_unlimited_edge(format!("{node}->{junction}"), &node, &junction);
                    }
                },
                None => {
                    let node = format!("{junction}<0");
                    self.net.add_node(&node);
                    self.net.add_edge(format!("{node}->{junction}"), &node, &junction, SizeSpec::Fixed(1));
                }
            }
        }
        for p in &sub.ports {
            if let (PortKind::SignalOut, Attach::Node(j), Some(name)) = (p.kind, &p.attach, map.get(p.name.as_str())) {
                self.claim(name, Handle::Junction(pid(j)), p.size)?;
            }
        }
        let rename = |n: &str| -> String {
            match map.get(n) {
                Some(&m) => m.to_string(),
                None => pid(n),
            }
        };
        for e in &sub.existentials {
            self.existentials.push(Existential {
                name: rename(&e.name),
                size: e.size,
                inputs: e.inputs.iter().map(|i| rename(i)).collect(),
            });
        }
        for c in &sub.conditions {
            self.conditions.push(Condition {
                cond: rename_condition(&c.cond, &rename),
                given: c.given.iter().map(|g| rename(g)).collect(),
                bound_is_k: c.bound_is_k,
            });
        }
        Ok(())
    }

    pub fn finish(self) -> Gadget {
        Gadget {
            name: self.name,
            fragment: self.net,
            ports: self.ports,
            existentials: self.existentials,
            conditions: self.conditions,
        }
    }

    pub fn into_network(self) -> Network {
        self.net
    }
}

fn check_size(port: &str, want: PortSize, got: PortSize) -> Result<(), GadgetError> {
    match (want, got) {
        (PortSize::Any, _) | (_, PortSize::Any) => Ok(()),
        (a, b) if a == b => Ok(()),
        (a, b) => Err(GadgetError::Binding { port: port.into(), reason: format!("size mismatch: port {a:?}, bound {b:?}") }),
    }
}

/// Builds the named gadget from the catalog with the given parameters.
pub fn by_name(name: &str, params: &GadgetParams) -> Result<Gadget, GadgetError> {
    let b = params.b.unwrap_or(2);
    let w = params.w.unwrap_or(2);
    let n = params.n.unwrap_or(1);
    Ok(match name {
        "xor" | "xor_checker" => xor_checker(),
        "xor_gate" => xor_gate(),
        "tristate" | "tristate_checker" => tristate_checker(),
        "tristate_gate" => tristate_gate(),
        "bstate" | "bstate_checker" => bstate_checker(b)?,
        "switch" | "switch_checker" => switch_checker(),
        "switch_gate" => switch_gate(),
        "cond_switch_gate" => cond_switch_gate(w)?,
        "set_checker" | "cond_set_checker" => {
            let theta = match &params.theta {
                Some(t) => t.clone(),
                None => (0..1usize << n).map(|i| (0..n).map(|j| (i >> (n - 1 - j)) & 1 == 1).collect()).collect(),
            };
            let n = theta.first().map_or(n, Vec::len);
            if name == "set_checker" {
                set_checker(n, &theta)?
            } else {
                cond_set_checker(n, &theta, w)?
            }
        }
        "virtual_eq" | "virtual_equality_checker" => virtual_equality_checker(b)?,
        "cond_virtual_eq" | "cond_virtual_equality_checker" => cond_virtual_equality_checker(w, b)?,
        "virtual_or" | "virtual_or_checker" => virtual_or_checker(b)?,
        "cond_virtual_or" | "cond_virtual_or_checker" => cond_virtual_or_checker(w, b)?,
        "cycles" | "cycles_checker" => cycles_checker(),
        "cycles_gate" => cycles_gate(),
        other => return Err(GadgetError::UnknownName(other.to_string())),
    })
}

/// Parameters accepted by [`by_name`].
#[derive(Clone, Debug, Default)]
pub struct GadgetParams {
    pub b: Option<usize>,
    pub n: Option<usize>,
    pub w: Option<usize>,
    pub theta: Option<Vec<Vec<bool>>>,
}

/// Names understood by [`by_name`], one per constructor.
pub const CATALOG: &[&str] = &[
    "xor_checker",
    "xor_gate",
    "tristate_checker",
    "tristate_gate",
    "bstate_checker",
    "switch_checker",
    "switch_gate",
    "cond_switch_gate",
    "set_checker",
    "cond_set_checker",
    "virtual_equality_checker",
    "cond_virtual_equality_checker",
    "virtual_or_checker",
    "cond_virtual_or_checker",
    "cycles_checker",
    "cycles_gate",
];

/// Every catalog gadget at default parameters.
pub fn catalog() -> Vec<Gadget> {
    CATALOG.iter().map(|n| by_name(n, &GadgetParams::default()).expect("catalog defaults are valid")).collect()
}
