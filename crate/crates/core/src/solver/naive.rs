//! Enumerate-everything reference solver.
//!
//! Tries every total encoding table on every non-pinned edge and checks the
//! decoding requirement by direct simulation. It shares nothing with the
//! search engine beyond the network type and is only usable on tiny inputs.

use std::collections::{BTreeMap, HashMap};

use crate::network::{topo_order, Network};

use super::SolveError;

/// Refuses inputs with more table combinations than this.
pub const NAIVE_LIMIT: u128 = 1 << 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NaiveOutcome {
    /// Number of complete encoding-table assignments that satisfy every demand.
    pub solutions: u64,
}

impl NaiveOutcome {
    pub fn solvable(&self) -> bool {
        self.solutions > 0
    }
}

struct Slot {
    edge: usize,
    tail_inputs: Vec<Input>,
    radices: Vec<usize>,
    size: usize,
}

#[derive(Clone, Copy)]
enum Input {
    Msg(usize),
    Edge(usize),
}

/// Counts all schemes of `net` at `k` (pinned edges held fixed).
pub fn solve_naive(net: &Network, k: usize, pins: &BTreeMap<String, Vec<u32>>) -> Result<NaiveOutcome, SolveError> {
    let order = topo_order(net).map_err(|e| match e {
        crate::network::NetworkError::Invalid(r) => SolveError::Invalid(r),
        other => SolveError::TooLarge(other.to_string()),
    })?;
    if k == 0 {
        return Err(SolveError::ZeroK);
    }
    let pos: HashMap<&str, usize> = net.edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let inputs_of = |node: &str| -> (Vec<Input>, Vec<usize>) {
        let mut ins: Vec<Input> = net.sources_of(node).map(|m| Input::Msg(m - 1)).collect();
        ins.extend(net.in_edges(node).iter().map(|e| Input::Edge(pos[e.id.as_str()])));
        (ins, net.input_radices(node, k))
    };

    let mut slots = Vec::new();
    for node in &order {
        for e in net.out_edges(node) {
            let (tail_inputs, radices) = inputs_of(node);
            slots.push(Slot { edge: pos[e.id.as_str()], tail_inputs, radices, size: net.edge_size(e, k) });
        }
    }
    let rows: Vec<usize> = slots.iter().map(|s| s.radices.iter().product()).collect();
    let mut tables: Vec<Vec<u32>> = rows.iter().map(|&r| vec![0; r]).collect();
    let mut free = Vec::new();
    let mut combos: u128 = 1;
    for (i, s) in slots.iter().enumerate() {
        match pins.get(&net.edges[s.edge].id) {
            Some(t) => {
                if t.len() != rows[i] || t.iter().any(|&v| v as usize >= s.size) {
                    return Err(SolveError::Pin { edge: net.edges[s.edge].id.clone(), reason: "bad table".into() });
                }
                tables[i] = t.clone();
            }
            None => {
                free.push(i);
                combos = combos.saturating_mul((s.size as u128).saturating_pow(rows[i] as u32));
            }
        }
    }
    if combos > NAIVE_LIMIT {
        return Err(SolveError::TooLarge(format!("{combos} table combinations")));
    }

    let sizes: Vec<usize> = (1..=net.messages.len()).map(|m| net.message_size(m, k)).collect();
    let tuples: Vec<Vec<u32>> = {
        let mut all = vec![Vec::new()];
        for &s in &sizes {
            all = all
                .into_iter()
                .flat_map(|t| {
                    (0..s as u32).map(move |v| {
                        let mut t = t.clone();
                        t.push(v);
                        t
                    })
                })
                .collect();
        }
        all
    };
    let decoders: Vec<(Vec<Input>, Vec<usize>)> = net
        .nodes
        .iter()
        .filter(|n| net.demands_of(&n.id).next().is_some())
        .map(|n| (inputs_of(&n.id).0, net.demands_of(&n.id).map(|m| m - 1).collect()))
        .collect();

    let mut solutions = 0u64;
    let mut signals = vec![0u32; net.edges.len()];
    loop {
        let ok = {
            let mut seen: Vec<HashMap<Vec<u32>, Vec<u32>>> = vec![HashMap::new(); decoders.len()];
            tuples.iter().all(|msg| {
                let read = |i: &Input, signals: &[u32]| match *i {
                    Input::Msg(m) => msg[m],
                    Input::Edge(e) => signals[e],
                };
                for (s, table) in slots.iter().zip(&tables) {
                    let row = s.tail_inputs.iter().zip(&s.radices).fold(0, |acc, (i, &r)| acc * r + read(i, &signals) as usize);
                    signals[s.edge] = table[row];
                }
                decoders.iter().zip(seen.iter_mut()).all(|((ins, wants), seen)| {
                    let key: Vec<u32> = ins.iter().map(|i| read(i, &signals)).collect();
                    let want: Vec<u32> = wants.iter().map(|&m| msg[m]).collect();
                    seen.entry(key).or_insert_with(|| want.clone()) == &want
                })
            })
        };
        if ok {
            solutions += 1;
        }
        // Odometer over the free tables.
        let mut advanced = false;
        'odo: for &i in free.iter().rev() {
            for cell in tables[i].iter_mut().rev() {
                if (*cell as usize) + 1 < slots[i].size {
                    *cell += 1;
                    advanced = true;
                    break 'odo;
                }
                *cell = 0;
            }
        }
        if !advanced {
            break;
        }
    }
    Ok(NaiveOutcome { solutions })
}
