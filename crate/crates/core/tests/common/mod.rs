//! Shared generators for integration tests and the acceptance runner.
#![allow(dead_code)]

pub mod checkers;

use fixsize_core::index_coding::{Client, IndexInstance};
use fixsize_core::network::{validate, Network, SizeSpec};
use fixsize_core::solver::NAIVE_LIMIT;
use rand::Rng;

fn size(rng: &mut impl Rng) -> SizeSpec {
    match rng.gen_range(0..4) {
        0 => SizeSpec::Default,
        s => SizeSpec::Fixed(s),
    }
}

/// Number of table combinations the naive enumerator would visit.
pub fn naive_cost(net: &Network, k: usize) -> u128 {
    net.edges
        .iter()
        .map(|e| {
            let rows: usize = net.input_radices(&e.tail, k).iter().product();
            (net.edge_size(e, k) as u128).saturating_pow(rows as u32)
        })
        .fold(1u128, |a, b| a.saturating_mul(b))
}

/// A random valid network with at most `max_edges` edges and resolved sizes
/// at most 3 for `k <= 3`, cheap enough for the naive enumerator at `k`.
pub fn random_small(rng: &mut impl Rng, max_edges: usize, k: usize) -> Network {
    loop {
        let mut net = Network::new();
        let n_nodes = rng.gen_range(2..=4);
        for i in 0..n_nodes {
            net.add_node(format!("n{i}"));
        }
        let n_msgs = rng.gen_range(1..=2);
        for _ in 0..n_msgs {
            net.add_message(size(rng));
        }
        let n_edges = rng.gen_range(1..=max_edges);
        for j in 0..n_edges {
            let a = rng.gen_range(0..n_nodes - 1);
            let b = rng.gen_range(a + 1..n_nodes);
            net.add_edge(format!("e{j}"), format!("n{a}"), format!("n{b}"), size(rng));
        }
        for m in 1..=n_msgs {
            let at = rng.gen_range(0..n_nodes);
            net.add_source(&format!("n{at}"), m);
            if rng.gen_bool(0.3) {
                let also = rng.gen_range(0..n_nodes);
                net.add_source(&format!("n{also}"), m);
            }
        }
        for m in 1..=n_msgs {
            if rng.gen_bool(0.7) {
                let at = rng.gen_range(1..n_nodes);
                net.add_demand(&format!("n{at}"), m);
            }
        }
        if validate(&net).ok && naive_cost(&net, k) <= NAIVE_LIMIT / 4 {
            return net;
        }
    }
}

/// Every index-coding instance with `l <= 3` messages of sizes drawn from
/// {1, 2, default} and a set of at most 3 distinct clients with nonempty
/// demands, at `a = 1, b = 0` (callers vary the alphabet).
pub fn micro_index_instances() -> Vec<IndexInstance> {
    let specs = [SizeSpec::Fixed(1), SizeSpec::Fixed(2), SizeSpec::Default];
    let mut out = Vec::new();
    for l in 1..=3usize {
        // Each message is held, wanted or ignored.
        let mut options = Vec::new();
        for code in 0..3usize.pow(l as u32) {
            let (mut has, mut wants) = (Vec::new(), Vec::new());
            let mut c = code;
            for m in 1..=l {
                match c % 3 {
                    1 => has.push(m),
                    2 => wants.push(m),
                    _ => {}
                }
                c /= 3;
            }
            if !wants.is_empty() {
                options.push(Client { has, wants });
            }
        }
        let mut client_sets: Vec<Vec<Client>> = vec![vec![]];
        for i in 0..options.len() {
            client_sets.push(vec![options[i].clone()]);
            for j in i + 1..options.len() {
                client_sets.push(vec![options[i].clone(), options[j].clone()]);
                for o in &options[j + 1..] {
                    client_sets.push(vec![options[i].clone(), options[j].clone(), o.clone()]);
                }
            }
        }
        for size_code in 0..3usize.pow(l as u32) {
            let messages: Vec<SizeSpec> = (0..l).map(|i| specs[size_code / 3usize.pow(i as u32) % 3]).collect();
            for clients in &client_sets {
                out.push(IndexInstance { messages: messages.clone(), a: 1, b: 0, clients: clients.clone() });
            }
        }
    }
    out
}

/// Fewest output symbols of any valid encoder, found by enumerating every
/// encoder table up to renaming of its symbols and simulating each client.
pub fn min_symbols_by_enumeration(inst: &IndexInstance, k: usize) -> usize {
    let sizes = inst.sizes(k);
    let total: usize = sizes.iter().product();
    let digits = |mut t: usize| {
        let mut d = vec![0usize; sizes.len()];
        for (i, s) in sizes.iter().enumerate().rev() {
            d[i] = t % s;
            t /= s;
        }
        d
    };
    let tuples: Vec<Vec<usize>> = (0..total).map(digits).collect();
    let works = |f: &[usize]| {
        inst.clients.iter().all(|c| {
            (0..total).all(|x| {
                (0..total).all(|y| {
                    let same_side = c.has.iter().all(|&m| tuples[x][m - 1] == tuples[y][m - 1]);
                    let same_want = c.wants.iter().all(|&m| tuples[x][m - 1] == tuples[y][m - 1]);
                    !(f[x] == f[y] && same_side) || same_want
                })
            })
        })
    };
    // Restricted growth strings: f[i] <= 1 + max(f[..i]).
    let mut f = vec![0usize; total];
    let mut best = total;
    loop {
        let used = f.iter().max().map_or(0, |m| m + 1);
        if used < best && works(&f) {
            best = used;
        }
        let mut i = total;
        loop {
            if i <= 1 {
                return best;
            }
            i -= 1;
            let cap = f[..i].iter().max().map_or(0, |m| m + 1);
            if f[i] < cap {
                f[i] += 1;
                for v in &mut f[i + 1..] {
                    *v = 0;
                }
                break;
            }
        }
    }
}
