//! Exact solvability at a fixed default size `k`.
//!
//! [`solve_at_k`] is a complete search: `UnsolvableAtK` means no coding
//! scheme exists at that `k`. [`solve_up_to`] only semi-decides solvability
//! over all `k`: finding nothing up to `k_max` says nothing about larger `k`.

mod naive;
mod partition;
mod plan;
mod scheme;
mod search;

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::network::{Network, ValidationReport};
use plan::Plan;
use search::{Budget, Flow, Leaf, Search};

pub use naive::{solve_naive, NaiveOutcome, NAIVE_LIMIT};
pub use plan::MAX_SEARCH_TUPLES;
pub use scheme::{evaluate, verify_scheme, CodingScheme, Evaluation, SchemeError, MAX_TABLE_ROWS};

#[derive(Clone, Debug)]
pub struct SolveOptions {
    /// Edge id to a fixed encoding table. The tail of a pinned edge must have
    /// no incoming edges.
    pub pins: BTreeMap<String, Vec<u32>>,
    /// Canonical-relabelling search plus the structural reductions described
    /// in the plan module. Disabling it searches every table.
    pub symmetry_breaking: bool,
    /// Cap on value trials; `None` searches to completion.
    pub node_budget: Option<u64>,
    /// Parallel runs return the witness a single worker would.
    pub deterministic: bool,
    pub jobs: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { pins: BTreeMap::new(), symmetry_breaking: true, node_budget: None, deterministic: true, jobs: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    Solvable(CodingScheme),
    UnsolvableAtK,
    BudgetExhausted,
}

impl SolveOutcome {
    pub fn is_solvable(&self) -> bool {
        matches!(self, SolveOutcome::Solvable(_))
    }

    pub fn status(&self) -> &'static str {
        match self {
            SolveOutcome::Solvable(_) => "solvable",
            SolveOutcome::UnsolvableAtK => "unsolvable_at_k",
            SolveOutcome::BudgetExhausted => "budget_exhausted",
        }
    }

    pub fn witness(&self) -> Option<&CodingScheme> {
        match self {
            SolveOutcome::Solvable(s) => Some(s),
            _ => None,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("invalid network: {0}")]
    Invalid(ValidationReport),
    #[error("k must be positive")]
    ZeroK,
    #[error("pin on `{edge}`: {reason}")]
    Pin { edge: String, reason: String },
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("search budget exhausted")]
    BudgetExhausted,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("search budget exhausted at k = {k}")]
    BudgetExhausted { k: usize },
    #[error("at k = {k}: {source}")]
    Solve { k: usize, source: SolveError },
}

enum SliceResult {
    Found(Vec<Vec<u32>>),
    Empty,
    Exhausted,
}

fn first_in_slice(plan: &Plan, slice: &[u32], budget: &Budget, prefix: Vec<u32>) -> SliceResult {
    let mut found = None;
    let flow = Search::new(plan, slice, budget).with_forced(prefix).run(&mut |leaf| match leaf {
        Leaf::Solution(cols) => {
            found = Some(cols.to_vec());
            Flow::Stop
        }
        Leaf::Prefix(_) => Flow::Continue,
    });
    match (found, flow) {
        (Some(cols), _) => SliceResult::Found(cols),
        (None, Flow::Exhausted) => SliceResult::Exhausted,
        (None, _) => SliceResult::Empty,
    }
}

fn prefixes(plan: &Plan, slice: &[u32], budget: &Budget, depth: usize) -> Option<Vec<Vec<u32>>> {
    let mut out = Vec::new();
    let flow = Search::new(plan, slice, budget).with_cut(depth).run(&mut |leaf| {
        if let Leaf::Prefix(p) = leaf {
            out.push(p.to_vec());
        }
        Flow::Continue
    });
    (flow != Flow::Exhausted).then_some(out)
}

fn solve_slice(plan: &Plan, slice: &[u32], budget: &Budget, opts: &SolveOptions) -> SliceResult {
    if opts.jobs <= 1 {
        return first_in_slice(plan, slice, budget, Vec::new());
    }
    let target = 4 * opts.jobs;
    let mut depth = 2;
    let work = loop {
        let Some(p) = prefixes(plan, slice, budget, depth) else {
            return SliceResult::Exhausted;
        };
        if p.is_empty() {
            return SliceResult::Empty;
        }
        if p.len() >= target || depth >= 32 {
            break p;
        }
        depth += 2;
    };
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs).build().expect("thread pool");
    let run = |p: &Vec<u32>| match first_in_slice(plan, slice, budget, p.clone()) {
        SliceResult::Empty => None,
        other => Some(other),
    };
    let hit = pool.install(|| {
        if opts.deterministic {
            work.par_iter().find_map_first(run)
        } else {
            work.par_iter().find_map_any(run)
        }
    });
    hit.unwrap_or(SliceResult::Empty)
}

fn scatter(plan: &Plan, slices: &[Vec<u32>], locals: &[&Vec<Vec<u32>>]) -> Vec<Vec<u32>> {
    let mut cols = vec![vec![0u32; plan.tuples]; plan.vars.len()];
    for (slice, local) in slices.iter().zip(locals) {
        for (v, col) in local.iter().enumerate() {
            for (i, &t) in slice.iter().enumerate() {
                cols[v][t as usize] = col[i];
            }
        }
    }
    cols
}

/// Decides solvability at `k`; a `Solvable` witness always passes
/// [`verify_scheme`].
pub fn solve_at_k(net: &Network, k: usize, opts: &SolveOptions) -> Result<SolveOutcome, SolveError> {
    let plan = Plan::build(net, k, opts)?;
    if plan.infeasible {
        return Ok(SolveOutcome::UnsolvableAtK);
    }
    if plan.vars.is_empty() {
        return Ok(SolveOutcome::Solvable(plan.materialize(net, &[])?));
    }
    let budget = Budget::new(opts.node_budget);
    let slices = plan.slices();
    let mut found = Vec::with_capacity(slices.len());
    for slice in &slices {
        match solve_slice(&plan, slice, &budget, opts) {
            SliceResult::Found(cols) => found.push(cols),
            SliceResult::Empty => return Ok(SolveOutcome::UnsolvableAtK),
            SliceResult::Exhausted => return Ok(SolveOutcome::BudgetExhausted),
        }
    }
    let locals: Vec<&Vec<Vec<u32>>> = found.iter().collect();
    Ok(SolveOutcome::Solvable(plan.materialize(net, &scatter(&plan, &slices, &locals))?))
}

/// Up to `limit` distinct schemes in search order.
///
/// Schemes are distinguished by the table entries reachable from some
/// message tuple; unreachable rows are always 0. With symmetry breaking
/// enabled only canonical representatives are listed.
pub fn enumerate_solutions(
    net: &Network,
    k: usize,
    limit: usize,
    opts: &SolveOptions,
) -> Result<Vec<CodingScheme>, SolveError> {
    let plan = Plan::build(net, k, opts)?;
    if plan.infeasible || limit == 0 {
        return Ok(Vec::new());
    }
    if plan.vars.is_empty() {
        return Ok(vec![plan.materialize(net, &[])?]);
    }
    let budget = Budget::new(opts.node_budget);
    let slices = plan.slices();
    let mut per_slice: Vec<Vec<Vec<Vec<u32>>>> = Vec::with_capacity(slices.len());
    for slice in &slices {
        let mut sols = Vec::new();
        let flow = Search::new(&plan, slice, &budget).run(&mut |leaf| {
            if let Leaf::Solution(cols) = leaf {
                sols.push(cols.to_vec());
                if sols.len() >= limit {
                    return Flow::Stop;
                }
            }
            Flow::Continue
        });
        if flow == Flow::Exhausted {
            return Err(SolveError::BudgetExhausted);
        }
        if sols.is_empty() {
            return Ok(Vec::new());
        }
        per_slice.push(sols);
    }
    // Cartesian product, first slice varying slowest.
    let mut out = Vec::new();
    let mut idx = vec![0usize; per_slice.len()];
    loop {
        let locals: Vec<&Vec<Vec<u32>>> = idx.iter().zip(&per_slice).map(|(&i, s)| &s[i]).collect();
        out.push(plan.materialize(net, &scatter(&plan, &slices, &locals))?);
        if out.len() >= limit {
            break;
        }
        let mut pos = per_slice.len();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < per_slice[pos].len() {
                break;
            }
            idx[pos] = 0;
        }
    }
    Ok(out)
}

/// Outcome per `k` from 1 upward, stopping at the first solvable `k`. A
/// network whose sizes never mention `k` is only tried at `k = 1`.
pub fn sweep(net: &Network, k_max: usize, opts: &SolveOptions) -> Result<Vec<(usize, SolveOutcome)>, SweepError> {
    let top = if net.uses_default() { k_max } else { k_max.min(1) };
    let mut out = Vec::new();
    for k in 1..=top {
        let outcome = solve_at_k(net, k, opts).map_err(|source| SweepError::Solve { k, source })?;
        let done = outcome.is_solvable();
        out.push((k, outcome));
        if done {
            break;
        }
    }
    Ok(out)
}

/// Least `k ≤ k_max` with a solution. `None` means none up to `k_max`, not
/// unsolvability.
pub fn solve_up_to(
    net: &Network,
    k_max: usize,
    opts: &SolveOptions,
) -> Result<Option<(usize, CodingScheme)>, SweepError> {
    for (k, outcome) in sweep(net, k_max, opts)? {
        match outcome {
            SolveOutcome::Solvable(s) => return Ok(Some((k, s))),
            SolveOutcome::BudgetExhausted => return Err(SweepError::BudgetExhausted { k }),
            SolveOutcome::UnsolvableAtK => {}
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::fixtures::{butterfly, pigeonhole};
    use crate::network::SizeSpec;

    #[test]
    fn butterfly_solvable_at_two() {
        let out = solve_at_k(&butterfly(), 2, &SolveOptions::default()).unwrap();
        let s = out.witness().expect("solvable");
        assert_eq!(s.k, 2);
        assert!(verify_scheme(&butterfly(), s).ok);
    }

    #[test]
    fn butterfly_unsolvable_at_one() {
        let out = solve_at_k(&butterfly(), 1, &SolveOptions::default()).unwrap();
        assert_eq!(out, SolveOutcome::UnsolvableAtK);
        let (k, _) = solve_up_to(&butterfly(), 4, &SolveOptions::default()).unwrap().unwrap();
        assert_eq!(k, 2);
    }

    #[test]
    fn pigeonhole_never_solvable() {
        for k in 1..=3 {
            let out = solve_at_k(&pigeonhole(), k, &SolveOptions::default()).unwrap();
            assert_eq!(out, SolveOutcome::UnsolvableAtK);
        }
        assert!(solve_up_to(&pigeonhole(), 4, &SolveOptions::default()).unwrap().is_none());
    }

    #[test]
    fn fixed_only_network_tries_k1_only() {
        let runs = sweep(&pigeonhole(), 5, &SolveOptions::default()).unwrap();
        assert_eq!(runs.len(), 1);
    }

    #[test]
    fn disconnected_demand_is_unsolvable() {
        let mut net = Network::new();
        let m = net.add_message(SizeSpec::Fixed(2));
        net.add_node("s").add_node("x").add_node("t");
        net.add_edge("e", "x", "t", SizeSpec::Default);
        net.add_source("s", m).add_demand("t", m);
        assert!(solve_up_to(&net, 3, &SolveOptions::default()).unwrap().is_none());
    }

    #[test]
    fn enumerate_single_edge_four_tables() {
        let mut net = Network::new();
        let m = net.add_message(SizeSpec::Default);
        net.add_node("u").add_node("v");
        net.add_edge("e", "u", "v", SizeSpec::Default);
        net.add_source("u", m);
        let plain = SolveOptions { symmetry_breaking: false, ..SolveOptions::default() };
        let all = enumerate_solutions(&net, 2, usize::MAX, &plain).unwrap();
        assert_eq!(all.len(), 4);
        let mut tables: Vec<_> = all.iter().map(|s| s.encodings["e"].clone()).collect();
        tables.sort();
        tables.dedup();
        assert_eq!(tables.len(), 4);
    }

    #[test]
    fn enumerate_unsolvable_is_empty() {
        assert!(enumerate_solutions(&pigeonhole(), 2, 10, &SolveOptions::default()).unwrap().is_empty());
    }

    #[test]
    fn enumerate_butterfly_limit_one() {
        let v = enumerate_solutions(&butterfly(), 2, 1, &SolveOptions::default()).unwrap();
        assert_eq!(v.len(), 1);
        assert!(verify_scheme(&butterfly(), &v[0]).ok);
    }

    #[test]
    fn budget_is_reported() {
        let opts = SolveOptions { node_budget: Some(1), symmetry_breaking: false, ..SolveOptions::default() };
        assert_eq!(solve_at_k(&butterfly(), 2, &opts).unwrap(), SolveOutcome::BudgetExhausted);
        let err = solve_up_to(&butterfly(), 3, &opts).unwrap_err();
        assert!(matches!(err, SweepError::BudgetExhausted { k: 1 } | SweepError::BudgetExhausted { k: 2 }));
    }

    #[test]
    fn plain_and_symmetric_agree_on_butterfly() {
        let plain = SolveOptions { symmetry_breaking: false, ..SolveOptions::default() };
        for k in 1..=2 {
            let a = solve_at_k(&butterfly(), k, &plain).unwrap().is_solvable();
            let b = solve_at_k(&butterfly(), k, &SolveOptions::default()).unwrap().is_solvable();
            assert_eq!(a, b, "k={k}");
        }
    }

    #[test]
    fn parallel_witness_matches_sequential() {
        let plain = SolveOptions { symmetry_breaking: false, ..SolveOptions::default() };
        let one = solve_at_k(&butterfly(), 2, &plain).unwrap();
        for jobs in [2, 4] {
            let many = solve_at_k(&butterfly(), 2, &SolveOptions { jobs, ..plain.clone() }).unwrap();
            assert_eq!(one, many);
        }
    }

    #[test]
    fn pins_are_checked() {
        let mut opts = SolveOptions::default();
        opts.pins.insert("c-d".into(), vec![0, 1, 1, 0]);
        assert!(matches!(solve_at_k(&butterfly(), 2, &opts), Err(SolveError::Pin { .. })));
        let mut opts = SolveOptions::default();
        opts.pins.insert("s-a".into(), vec![0, 0, 1]);
        assert!(matches!(solve_at_k(&butterfly(), 2, &opts), Err(SolveError::Pin { .. })));
        let mut opts = SolveOptions::default();
        opts.pins.insert("s-a".into(), vec![0, 0, 0, 0]);
        assert_eq!(solve_at_k(&butterfly(), 2, &opts).unwrap(), SolveOutcome::UnsolvableAtK);
    }
}
