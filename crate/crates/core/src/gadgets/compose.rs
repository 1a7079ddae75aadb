//! Wiring gadgets together into one network.

use std::collections::{BTreeMap, BTreeSet};

use crate::network::{Network, SizeSpec};

use super::{Builder, Gadget, GadgetError, PortKind, PortSize};

/// Something a port can be bound to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Signal {
    /// A message of the composed network (1-based, as returned by
    /// [`Composer::message`]).
    Message(usize),
    /// Output port of an earlier part.
    Output { part: String, port: String },
}

impl Signal {
    pub fn output(part: &str, port: &str) -> Self {
        Signal::Output { part: part.to_string(), port: port.to_string() }
    }
}

/// Binds `part.port` to the joint value of `from`.
#[derive(Clone, Debug)]
pub struct Binding {
    pub part: String,
    pub port: String,
    pub from: Vec<Signal>,
}

impl Binding {
    pub fn new(part: &str, port: &str, from: Vec<Signal>) -> Self {
        Binding { part: part.to_string(), port: port.to_string(), from }
    }
}

/// Parts are embedded in insertion order, so an output may only feed parts
/// added after its own.
pub struct Composer {
    builder: Builder,
    messages: usize,
    parts: Vec<(String, Gadget)>,
    bindings: BTreeMap<(String, String), Vec<Signal>>,
}

impl Default for Composer {
    fn default() -> Self {
        Self::new()
    }
}

fn message_name(m: usize) -> String {
    format!("M{m}")
}

impl Composer {
    pub fn new() -> Self {
        Composer { builder: Builder::new("composed"), messages: 0, parts: Vec::new(), bindings: BTreeMap::new() }
    }

    pub fn message(&mut self, size: SizeSpec) -> usize {
        self.messages += 1;
        self.builder.message(&message_name(self.messages), size).expect("message names are fresh")
    }

    pub fn add_part(&mut self, name: &str, gadget: Gadget) -> &mut Self {
        self.parts.push((name.to_string(), gadget));
        self
    }

    pub fn bind(&mut self, part: &str, port: &str, from: Vec<Signal>) -> &mut Self {
        self.bindings.insert((part.to_string(), port.to_string()), from);
        self
    }

    pub fn finish(mut self) -> Result<Network, GadgetError> {
        let names: BTreeSet<&str> = self.parts.iter().map(|(n, _)| n.as_str()).collect();
        if names.len() != self.parts.len() {
            return Err(GadgetError::Collision("duplicate part name".into()));
        }
        for (part, port) in self.bindings.keys() {
            let g = self
                .parts
                .iter()
                .find(|(n, _)| n == part)
                .map(|(_, g)| g)
                .ok_or_else(|| GadgetError::UnknownName(part.clone()))?;
            if g.port(port).is_none() {
                return Err(GadgetError::UnknownName(format!("{part}/{port}")));
            }
        }
        let parts = std::mem::take(&mut self.parts);
        for (part, g) in &parts {
            let mut map: Vec<(String, String)> = Vec::new();
            for p in &g.ports {
                let out_name = format!("{part}.{}", p.name);
                if p.kind == PortKind::SignalOut {
                    map.push((p.name.clone(), out_name));
                    continue;
                }
                let Some(from) = self.bindings.get(&(part.clone(), p.name.clone())) else { continue };
                let items: Vec<String> = from
                    .iter()
                    .map(|s| match s {
                        Signal::Message(m) if (1..=self.messages).contains(m) => Ok(message_name(*m)),
                        Signal::Message(m) => Err(GadgetError::UnknownName(format!("message {m}"))),
                        Signal::Output { part, port } => Ok(format!("{part}.{port}")),
                    })
                    .collect::<Result<_, _>>()?;
                for i in &items {
                    if self.builder.handle(i).is_err() {
                        return Err(GadgetError::Binding {
                            port: format!("{part}/{}", p.name),
                            reason: format!("`{i}` is not an output of an earlier part"),
                        });
                    }
                }
                let name = match items.as_slice() {
                    [] => return Err(GadgetError::Unbound(format!("{part}/{}", p.name))),
                    [one] => one.clone(),
                    many => {
                        let refs: Vec<&str> = many.iter().map(String::as_str).collect();
                        let joint = format!("{part}.{}<", p.name);
                        if p.kind == PortKind::MessageIn {
                            self.builder.group(&joint, &refs)?;
                        } else {
                            self.builder.combine(&joint, &refs)?;
                        }
                        joint
                    }
                };
                map.push((p.name.clone(), name));
            }
            let map: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
            self.builder.embed(part, g, &map)?;
        }
        Ok(self.builder.into_network())
    }
}

/// One-shot composition; messages are created first, in order.
pub fn compose(parts: &[(&str, Gadget)], messages: &[SizeSpec], bindings: &[Binding]) -> Result<Network, GadgetError> {
    let mut c = Composer::new();
    for &s in messages {
        c.message(s);
    }
    for (n, g) in parts {
        c.add_part(n, g.clone());
    }
    for b in bindings {
        c.bind(&b.part, &b.port, b.from.clone());
    }
    c.finish()
}

/// `g` with a fresh message on every message and condition input and a free
/// encoder (holding every message) on every signal input.
pub fn standalone(g: &Gadget) -> Result<Network, GadgetError> {
    let mut b = Builder::new(&g.name);
    let mut map = Vec::new();
    for p in &g.ports {
        if matches!(p.kind, PortKind::MessageIn | PortKind::ConditionIn) {
            let name = format!("{}~", p.name);
            b.message(&name, p.size.spec().unwrap_or(SizeSpec::Fixed(2)))?;
            map.push((p.name.clone(), name));
        }
    }
    for p in &g.ports {
        if p.kind == PortKind::SignalIn {
            let name = format!("{}~", p.name);
            let size = match p.size {
                PortSize::Any => SizeSpec::Fixed(2),
                s => s.spec().expect("sized"),
            };
            b.free_signal(&name, size)?;
            map.push((p.name.clone(), name));
        }
    }
    let map: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    b.embed(&g.name, g, &map)?;
    Ok(b.into_network())
}
