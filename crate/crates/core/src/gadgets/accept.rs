//! Checker acceptance, decided twice: by solving an embedding network and by
//! enumerating existentials against the declared conditions.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{check_given, InfoCondition, UniformSupport, Variable};
use crate::network::{canonicalize, SizeSpec};
use crate::solver::{solve_at_k, SolveOptions, SolveOutcome};

use super::{Builder, Gadget, GadgetError, PortKind};

/// Messages surrounding a checker under test, and which of them feed its
/// message and condition inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Harness {
    pub messages: Vec<(String, SizeSpec)>,
    /// Port name to the messages it carries jointly.
    pub bindings: Vec<(String, Vec<String>)>,
}

impl Harness {
    /// One fresh message per message or condition input, named after it.
    pub fn for_checker(g: &Gadget) -> Self {
        let mut h = Harness { messages: Vec::new(), bindings: Vec::new() };
        for p in &g.ports {
            if matches!(p.kind, PortKind::MessageIn | PortKind::ConditionIn) {
                h.messages.push((p.name.clone(), p.size.spec().unwrap_or(SizeSpec::Fixed(2))));
                h.bindings.push((p.name.clone(), vec![p.name.clone()]));
            }
        }
        h
    }

    pub fn sizes(&self, k: usize) -> Vec<usize> {
        self.messages.iter().map(|(_, s)| s.resolve(k)).collect()
    }

    /// Every message tuple, first message most significant.
    pub fn tuples(&self, k: usize) -> Vec<Vec<u32>> {
        let mut all = vec![Vec::new()];
        for s in self.sizes(k) {
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
        all
    }

    fn index(&self, name: &str) -> Result<usize, GadgetError> {
        self.messages.iter().position(|(n, _)| n == name).ok_or_else(|| GadgetError::UnknownName(name.to_string()))
    }
}

/// A candidate for one signal input, tabulated over the harness tuples.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateFunction {
    pub output: String,
    pub alphabet: usize,
    pub table: Vec<u32>,
}

impl CandidateFunction {
    pub fn from_fn(harness: &Harness, k: usize, output: &str, alphabet: usize, f: impl Fn(&[u32]) -> u32) -> Self {
        let table = harness.tuples(k).iter().map(|t| f(t)).collect();
        CandidateFunction { output: output.to_string(), alphabet, table }
    }
}

/// Every table for `output` over the harness tuples (first row most
/// significant).
pub fn all_functions(harness: &Harness, k: usize, output: &str, alphabet: usize) -> Result<Vec<CandidateFunction>, GadgetError> {
    let rows = harness.tuples(k).len();
    let count = (alphabet as u128).checked_pow(rows as u32).filter(|&c| c <= 1 << 20);
    let count = count.ok_or_else(|| GadgetError::Candidate(format!("{alphabet}^{rows} candidates is too many")))?;
    Ok((0..count as u64)
        .map(|mut i| {
            let mut table = vec![0u32; rows];
            for cell in table.iter_mut().rev() {
                *cell = (i % alphabet as u64) as u32;
                i /= alphabet as u64;
            }
            CandidateFunction { output: output.to_string(), alphabet, table }
        })
        .collect())
}

fn signal_inputs(checker: &Gadget) -> Vec<&str> {
    checker.ports.iter().filter(|p| p.kind == PortKind::SignalIn).map(|p| p.name.as_str()).collect()
}

fn check_candidate(checker: &Gadget, rows: usize, cand: &[CandidateFunction], k: usize) -> Result<(), GadgetError> {
    let inputs = signal_inputs(checker);
    for f in cand {
        let port = checker.port(&f.output).ok_or_else(|| GadgetError::UnknownName(f.output.clone()))?;
        if port.kind != PortKind::SignalIn {
            return Err(GadgetError::Candidate(format!("`{}` is not a signal input", f.output)));
        }
        if let Some(s) = port.size.resolve(k) {
            if s != f.alphabet {
                return Err(GadgetError::Candidate(format!("`{}` has alphabet {s}, candidate {}", f.output, f.alphabet)));
            }
        }
        if f.table.len() != rows {
            return Err(GadgetError::Candidate(format!("`{}`: {} rows, expected {rows}", f.output, f.table.len())));
        }
        if f.table.iter().any(|&v| v as usize >= f.alphabet) {
            return Err(GadgetError::Candidate(format!("`{}`: value out of range", f.output)));
        }
    }
    for i in inputs {
        if cand.iter().filter(|f| f.output == i).count() != 1 {
            return Err(GadgetError::Candidate(format!("candidate must define `{i}` exactly once")));
        }
    }
    Ok(())
}

/// [`accepted_set_in`] with [`Harness::for_checker`].
pub fn accepted_set(checker: &Gadget, family: &[Vec<CandidateFunction>], k: usize) -> Result<Vec<usize>, GadgetError> {
    accepted_set_in(checker, &Harness::for_checker(checker), family, k)
}

/// Indices of the candidates for which the embedding network is solvable at
/// `k`. Each signal input is driven by a pinned encoder holding every
/// harness message; the checker's own edges are searched.
pub fn accepted_set_in(
    checker: &Gadget,
    harness: &Harness,
    family: &[Vec<CandidateFunction>],
    k: usize,
) -> Result<Vec<usize>, GadgetError> {
    let rows = harness.tuples(k).len();
    for cand in family {
        check_candidate(checker, rows, cand, k)?;
    }
    let Some(first) = family.first() else { return Ok(Vec::new()) };

    let mut b = Builder::new("harness");
    for (name, size) in &harness.messages {
        b.message(name, *size)?;
    }
    let mut map: Vec<(String, String)> = Vec::new();
    for (port, msgs) in &harness.bindings {
        let refs: Vec<&str> = msgs.iter().map(String::as_str).collect();
        let name = format!("{port}<");
        b.group(&name, &refs)?;
        map.push((port.clone(), name));
    }
    let mut pins_at: BTreeMap<String, String> = BTreeMap::new();
    for f in first {
        let name = format!("{}~", f.output);
        let size = checker.port(&f.output).and_then(|p| p.size.spec()).unwrap_or(SizeSpec::Fixed(f.alphabet));
        let edge = b.free_signal(&name, size)?;
        pins_at.insert(f.output.clone(), edge);
        map.push((f.output.clone(), name));
    }
    let refs: Vec<(&str, &str)> = map.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    b.embed("chk", checker, &refs)?;
    let net = canonicalize(&b.into_network())?;

    let verdicts: Vec<Result<bool, GadgetError>> = family
        .par_iter()
        .map(|cand| {
            let mut opts = SolveOptions::default();
            for f in cand {
                opts.pins.insert(pins_at[&f.output].clone(), f.table.clone());
            }
            match solve_at_k(&net, k, &opts)? {
                SolveOutcome::Solvable(_) => Ok(true),
                SolveOutcome::UnsolvableAtK => Ok(false),
                SolveOutcome::BudgetExhausted => Err(GadgetError::Candidate("budget exhausted".into())),
            }
        })
        .collect();
    let mut out = Vec::new();
    for (i, v) in verdicts.into_iter().enumerate() {
        if v? {
            out.push(i);
        }
    }
    Ok(out)
}

struct Oracle<'a> {
    names: Vec<String>,
    sizes: Vec<usize>,
    /// Columns of port variables followed by existentials, over the rows of
    /// the current group.
    cols: Vec<Vec<u32>>,
    /// Existential index, input columns, size.
    exist: Vec<(usize, Vec<usize>, usize)>,
    /// Conditions to check after existential `i` is assigned (index 0: before any).
    stage: Vec<Vec<&'a super::Condition>>,
    k: usize,
}

impl Oracle<'_> {
    fn holds(&self, assigned: usize, conds: &[&super::Condition]) -> Result<bool, GadgetError> {
        let vars: Vec<Variable> = self.names[..assigned]
            .iter()
            .zip(&self.sizes)
            .map(|(n, &s)| Variable { name: n.clone(), size: s })
            .collect();
        let dist = UniformSupport::from_columns(vars, &self.cols[..assigned])
            .map_err(|e| GadgetError::Candidate(e.to_string()))?;
        for c in conds {
            let cond = match (&c.cond, c.bound_is_k) {
                (InfoCondition::SupportAtMost { set, .. }, true) => InfoCondition::SupportAtMost { set: set.clone(), bound: self.k },
                (other, _) => other.clone(),
            };
            if !check_given(&dist, &cond, &c.given).map_err(|e| GadgetError::Candidate(e.to_string()))? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Is there an assignment of existentials `e..` satisfying every stage?
    fn search(&mut self, e: usize) -> Result<bool, GadgetError> {
        if e == self.exist.len() {
            return Ok(true);
        }
        let (col, inputs, size) = self.exist[e].clone();
        let rows = self.cols[0].len();
        let mut class_of: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
        let ids: Vec<usize> = (0..rows)
            .map(|r| {
                let key: Vec<u32> = inputs.iter().map(|&i| self.cols[i][r]).collect();
                let n = class_of.len();
                *class_of.entry(key).or_insert(n)
            })
            .collect();
        let classes = class_of.len();
        // Restricted growth strings: relabelling an existential never changes
        // whether a condition holds.
        let mut values = vec![0u32; classes];
        loop {
            for r in 0..rows {
                self.cols[col][r] = values[ids[r]];
            }
            let stage = std::mem::take(&mut self.stage[e + 1]);
            let ok = self.holds(col + 1, &stage)?;
            self.stage[e + 1] = stage;
            if ok && self.search(e + 1)? {
                return Ok(true);
            }
            if !next_rgs(&mut values, size) {
                return Ok(false);
            }
        }
    }
}

/// Advances a restricted growth string with values below `limit`.
fn next_rgs(v: &mut [u32], limit: usize) -> bool {
    for i in (1..v.len()).rev() {
        let max_prefix = v[..i].iter().copied().max().unwrap_or(0);
        if v[i] <= max_prefix && (v[i] as usize) + 1 < limit {
            v[i] += 1;
            for x in &mut v[i + 1..] {
                *x = 0;
            }
            return true;
        }
    }
    false
}

/// Indices of the candidates whose induced law satisfies the checker's
/// declared conditions for some choice of its existentials.
pub fn accepted_by_conditions(
    checker: &Gadget,
    harness: &Harness,
    family: &[Vec<CandidateFunction>],
    k: usize,
) -> Result<Vec<usize>, GadgetError> {
    let tuples = harness.tuples(k);
    let sizes = harness.sizes(k);
    for cand in family {
        check_candidate(checker, tuples.len(), cand, k)?;
    }
    // Port columns that do not depend on the candidate.
    let mut names = vec!["#tuple".to_string()];
    let mut var_sizes = vec![tuples.len().max(1)];
    let mut fixed_cols: Vec<Vec<u32>> = vec![(0..tuples.len() as u32).collect()];
    for (port, msgs) in &harness.bindings {
        checker.port(port).ok_or_else(|| GadgetError::UnknownName(port.clone()))?;
        let idx: Vec<usize> = msgs.iter().map(|m| harness.index(m)).collect::<Result<_, _>>()?;
        let size: usize = idx.iter().map(|&i| sizes[i]).product();
        fixed_cols.push(
            tuples.iter().map(|t| idx.iter().fold(0u32, |acc, &i| acc * sizes[i] as u32 + t[i])).collect(),
        );
        names.push(port.clone());
        var_sizes.push(size);
    }
    let signal_names: Vec<&str> = signal_inputs(checker);
    for s in &signal_names {
        names.push(s.to_string());
        var_sizes.push(checker.port(s).and_then(|p| p.size.resolve(k)).unwrap_or(0));
    }
    let n_ports = names.len();
    let mut exist = Vec::new();
    for (i, e) in checker.existentials.iter().enumerate() {
        let size = e.size.resolve(k).ok_or_else(|| GadgetError::Parameter(format!("`{}` has no size", e.name)))?;
        let inputs = e
            .inputs
            .iter()
            .map(|n| names.iter().position(|x| x == n).ok_or_else(|| GadgetError::UnknownName(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        exist.push((n_ports + i, inputs, size));
        names.push(e.name.clone());
        var_sizes.push(size);
    }
    let mut stage: Vec<Vec<&super::Condition>> = vec![Vec::new(); exist.len() + 1];
    for c in &checker.conditions {
        let mut last = 0;
        for v in c.cond.variables().into_iter().chain(c.given.iter().map(String::as_str)) {
            let pos = names.iter().position(|x| x == v).ok_or_else(|| GadgetError::UnknownName(v.to_string()))?;
            last = last.max(if pos < n_ports { 0 } else { pos - n_ports + 1 });
        }
        stage[last].push(c);
    }

    // Every condition shares the same given set and every existential may
    // read it: slices are then independent.
    let givens: BTreeSet<Vec<String>> =
        checker.conditions.iter().map(|c| c.given.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()).collect();
    let slice_on: Vec<usize> = match givens.iter().next() {
        Some(g) if givens.len() == 1 && !g.is_empty() && checker.existentials.iter().all(|e| g.iter().all(|x| e.inputs.contains(x))) => {
            g.iter().filter_map(|x| names.iter().position(|n| n == x)).filter(|&p| p < n_ports).collect()
        }
        _ => Vec::new(),
    };

    let verdicts: Vec<Result<bool, GadgetError>> = family
        .par_iter()
        .map(|cand| {
            let mut cols = fixed_cols.clone();
            for s in &signal_names {
                let f = cand.iter().find(|f| f.output == *s).expect("checked");
                cols.push(f.table.clone());
            }
            let mut groups: BTreeMap<Vec<u32>, Vec<usize>> = BTreeMap::new();
            #[allow(clippy::needless_range_loop)]
            for r in 0..tuples.len() {
                let key: Vec<u32> = slice_on.iter().map(|&c| cols[c][r]).collect();
                groups.entry(key).or_default().push(r);
            }
            for rows in groups.values() {
                let mut group_cols: Vec<Vec<u32>> = cols.iter().map(|c| rows.iter().map(|&r| c[r]).collect()).collect();
                group_cols.extend(exist.iter().map(|_| vec![0; rows.len()]));
                let mut o = Oracle {
                    names: names.clone(),
                    sizes: var_sizes.clone(),
                    cols: group_cols,
                    exist: exist.clone(),
                    stage: stage.clone(),
                    k,
                };
                let pre = o.stage[0].clone();
                if !o.holds(n_ports, &pre)? || !o.search(0)? {
                    return Ok(false);
                }
            }
            Ok(true)
        })
        .collect();
    let mut out = Vec::new();
    for (i, v) in verdicts.into_iter().enumerate() {
        if v? {
            out.push(i);
        }
    }
    Ok(out)
}

/// State of a (conditional) switch read off its outputs:
/// `(Z0, Z1) = (M_θ ⊕ η0, M_{1-θ} ⊕ η1)` on every condition slice.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SwitchState {
    pub theta: Vec<bool>,
    pub eta0: Vec<bool>,
    pub eta1: Vec<bool>,
}

/// Reads the switch state from columns over a common index; `w` holds the
/// condition value of each row (all zero for an unconditional switch).
/// `None` if some slice is not a switch configuration.
pub fn read_switch_state(m0: &[u32], m1: &[u32], w: &[u32], z0: &[u32], z1: &[u32]) -> Option<SwitchState> {
    let slices = w.iter().copied().max().map_or(0, |x| x as usize + 1);
    let mut st = SwitchState { theta: vec![false; slices], eta0: vec![false; slices], eta1: vec![false; slices] };
    // Which message `z` equals up to a fixed negation on slice `s`.
    let carried = |z: &[u32], s: u32| -> Option<(bool, bool)> {
        let rows: Vec<usize> = (0..w.len()).filter(|&r| w[r] == s).collect();
        for (src, theta) in [(m0, false), (m1, true)] {
            for eta in [0u32, 1] {
                if rows.iter().all(|&r| z[r] == src[r] ^ eta) {
                    return Some((theta, eta == 1));
                }
            }
        }
        None
    };
    for s in 0..slices {
        if !w.contains(&(s as u32)) {
            continue;
        }
        let (t0, e0) = carried(z0, s as u32)?;
        let (t1, e1) = carried(z1, s as u32)?;
        if t0 == t1 {
            return None;
        }
        st.theta[s] = t0;
        st.eta0[s] = e0;
        st.eta1[s] = e1;
    }
    Some(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gadgets::{conditionalize, cycles_checker, switch_checker, xor_checker};

    fn singletons(fs: Vec<CandidateFunction>) -> Vec<Vec<CandidateFunction>> {
        fs.into_iter().map(|f| vec![f]).collect()
    }

    #[test]
    fn rgs_counts_match_bell_numbers() {
        let count = |n: usize, limit: usize| {
            let mut v = vec![0u32; n];
            let mut c = 1;
            while next_rgs(&mut v, limit) {
                c += 1;
            }
            c
        };
        assert_eq!(count(4, 4), 15);
        assert_eq!(count(4, 2), 8);
        assert_eq!(count(3, 1), 1);
    }

    #[test]
    fn xor_accepts_xor_and_xnor() {
        let g = xor_checker();
        let h = Harness::for_checker(&g);
        let fam = singletons(all_functions(&h, 1, "Y", 2).unwrap());
        assert_eq!(fam.len(), 16);
        let net = accepted_set(&g, &fam, 2).unwrap();
        let ent = accepted_by_conditions(&g, &h, &fam, 2).unwrap();
        assert_eq!(net, ent);
        let tables: Vec<_> = net.iter().map(|&i| fam[i][0].table.clone()).collect();
        assert_eq!(tables, vec![vec![0, 1, 1, 0], vec![1, 0, 0, 1]]);
    }

    #[test]
    fn empty_family_is_accepted_nowhere() {
        assert!(accepted_set(&xor_checker(), &[], 2).unwrap().is_empty());
    }

    #[test]
    fn conditional_xor_accepts_per_slice_negations() {
        let g = conditionalize(&xor_checker(), 2).unwrap();
        let h = Harness::for_checker(&g);
        let fam = singletons(all_functions(&h, 1, "Y", 2).unwrap());
        let net = accepted_set(&g, &fam, 1).unwrap();
        assert_eq!(net, accepted_by_conditions(&g, &h, &fam, 1).unwrap());
        // Y = M1 ⊕ M2 ⊕ η_W for the four choices of η.
        assert_eq!(net.len(), 4);
        let bad = CandidateFunction::from_fn(&h, 1, "Y", 2, |t| t[0] ^ (t[2] & t[1]));
        assert!(accepted_set(&g, &[vec![bad]], 1).unwrap().is_empty());
    }

    #[test]
    fn switch_accepts_eight_pairs() {
        let g = switch_checker();
        let h = Harness::for_checker(&g);
        let z0 = all_functions(&h, 1, "Z0", 2).unwrap();
        let z1 = all_functions(&h, 1, "Z1", 2).unwrap();
        let fam: Vec<Vec<CandidateFunction>> =
            z0.iter().flat_map(|a| z1.iter().map(move |b| vec![a.clone(), b.clone()])).collect();
        let net = accepted_set(&g, &fam, 1).unwrap();
        assert_eq!(net.len(), 8);
        assert_eq!(net, accepted_by_conditions(&g, &h, &fam, 1).unwrap());
        let m: Vec<u32> = (0..4).collect();
        for &i in &net {
            let st = read_switch_state(
                &m.iter().map(|x| x >> 1).collect::<Vec<_>>(),
                &m.iter().map(|x| x & 1).collect::<Vec<_>>(),
                &[0; 4],
                &fam[i][0].table,
                &fam[i][1].table,
            );
            assert!(st.is_some());
        }
    }

    #[test]
    fn cycles_counts() {
        let g = cycles_checker();
        let h = Harness::for_checker(&g);
        for (k, want) in [(2, 2), (3, 12)] {
            let fam = singletons(all_functions(&h, k, "X2", k).unwrap());
            let net = accepted_set(&g, &fam, k).unwrap();
            assert_eq!(net.len(), want);
            assert_eq!(net, accepted_by_conditions(&g, &h, &fam, k).unwrap());
        }
    }
}
