//! Exact information conditions on uniform-over-support distributions.
//!
//! Every distribution arising from deterministic coding of independent
//! uniform messages is uniform over its support, so all conditions used by
//! the gadgets reduce to counting. Nothing here uses floating point except
//! [`entropy_display`], which is for reports only.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::network::Network;
use crate::solver::{evaluate, CodingScheme, SchemeError};

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum EntropyError {
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("support must be nonempty")]
    EmptySupport,
    #[error("tuple {tuple:?} has arity {got}, expected {expected}")]
    Arity { tuple: Vec<u32>, got: usize, expected: usize },
    #[error("value {value} of `{name}` is outside its alphabet of size {size}")]
    OutOfRange { name: String, value: u32, size: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Variable {
    pub name: String,
    pub size: usize,
}

/// Uniform probability over a finite set of tuples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniformSupport {
    variables: Vec<Variable>,
    support: Vec<Vec<u32>>,
}

impl UniformSupport {
    /// Builds the distribution; duplicate tuples are merged.
    pub fn new(variables: Vec<Variable>, mut support: Vec<Vec<u32>>) -> Result<Self, EntropyError> {
        if support.is_empty() {
            return Err(EntropyError::EmptySupport);
        }
        for t in &support {
            if t.len() != variables.len() {
                return Err(EntropyError::Arity { tuple: t.clone(), got: t.len(), expected: variables.len() });
            }
            for (v, &x) in variables.iter().zip(t) {
                if x as usize >= v.size {
                    return Err(EntropyError::OutOfRange { name: v.name.clone(), value: x, size: v.size });
                }
            }
        }
        support.sort_unstable();
        support.dedup();
        Ok(UniformSupport { variables, support })
    }

    /// Builds the distribution from per-variable columns over a common index.
    pub fn from_columns(variables: Vec<Variable>, columns: &[Vec<u32>]) -> Result<Self, EntropyError> {
        let rows = columns.first().map_or(0, Vec::len);
        let support = (0..rows).map(|r| columns.iter().map(|c| c[r]).collect()).collect();
        Self::new(variables, support)
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn support(&self) -> &[Vec<u32>] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn index_of(&self, name: &str) -> Result<usize, EntropyError> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .ok_or_else(|| EntropyError::UnknownVariable(name.to_string()))
    }

    fn indices<S: AsRef<str>>(&self, names: &[S]) -> Result<Vec<usize>, EntropyError> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    /// Counts of each distinct projection onto `cols`.
    fn marginal(&self, cols: &[usize]) -> HashMap<Vec<u32>, u64> {
        let mut counts = HashMap::new();
        for t in &self.support {
            *counts.entry(project(t, cols)).or_insert(0) += 1;
        }
        counts
    }

    /// Restricts to the tuples whose projection on `cols` equals `key`.
    fn slice(&self, cols: &[usize], key: &[u32]) -> UniformSupport {
        UniformSupport {
            variables: self.variables.clone(),
            support: self.support.iter().filter(|t| project(t, cols) == key).cloned().collect(),
        }
    }
}

fn project(t: &[u32], cols: &[usize]) -> Vec<u32> {
    cols.iter().map(|&c| t[c]).collect()
}

/// An exact information condition over named variables.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum InfoCondition {
    /// `H(target | given) = 0`.
    Determined { target: Vec<String>, given: Vec<String> },
    /// `I(a; b) = 0`.
    Independent { a: Vec<String>, b: Vec<String> },
    /// The marginal on `set` is uniform over its support.
    Uniform { set: Vec<String> },
    /// The marginal on `set` has at most `bound` atoms.
    SupportAtMost { set: Vec<String>, bound: usize },
}

impl InfoCondition {
    pub fn determined<S: AsRef<str>>(target: &[S], given: &[S]) -> Self {
        InfoCondition::Determined { target: owned(target), given: owned(given) }
    }

    pub fn support_at_most<S: AsRef<str>>(set: &[S], bound: usize) -> Self {
        InfoCondition::SupportAtMost { set: owned(set), bound }
    }

    /// Every variable name the condition mentions.
    pub fn variables(&self) -> Vec<&str> {
        let lists: Vec<&Vec<String>> = match self {
            InfoCondition::Determined { target, given } => vec![target, given],
            InfoCondition::Independent { a, b } => vec![a, b],
            InfoCondition::Uniform { set } | InfoCondition::SupportAtMost { set, .. } => vec![set],
        };
        lists.into_iter().flatten().map(String::as_str).collect()
    }
}

fn owned<S: AsRef<str>>(names: &[S]) -> Vec<String> {
    names.iter().map(|n| n.as_ref().to_string()).collect()
}

/// Exact check of `cond` on `dist`.
pub fn check(dist: &UniformSupport, cond: &InfoCondition) -> Result<bool, EntropyError> {
    match cond {
        InfoCondition::Determined { target, given } => {
            let t = dist.indices(target)?;
            let s = dist.indices(given)?;
            let mut seen: HashMap<Vec<u32>, Vec<u32>> = HashMap::new();
            for tuple in &dist.support {
                let tv = project(tuple, &t);
                match seen.entry(project(tuple, &s)) {
                    std::collections::hash_map::Entry::Occupied(o) => {
                        if *o.get() != tv {
                            return Ok(false);
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(v) => {
                        v.insert(tv);
                    }
                }
            }
            Ok(true)
        }
        InfoCondition::Independent { a, b } => {
            let ia = dist.indices(a)?;
            let ib = dist.indices(b)?;
            let mut joint_cols = ia.clone();
            joint_cols.extend(&ib);
            let ca = dist.marginal(&ia);
            let cb = dist.marginal(&ib);
            let joint = dist.marginal(&joint_cols);
            let total = dist.len() as u64;
            // Every pair (x, y) with positive marginals must have the product count.
            for (x, &nx) in &ca {
                for (y, &ny) in &cb {
                    let mut key = x.clone();
                    key.extend(y);
                    let nxy = joint.get(&key).copied().unwrap_or(0);
                    if nxy * total != nx * ny {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
        InfoCondition::Uniform { set } => {
            let cols = dist.indices(set)?;
            let counts = dist.marginal(&cols);
            let mut it = counts.values();
            let first = it.next().copied();
            Ok(it.all(|&c| Some(c) == first))
        }
        InfoCondition::SupportAtMost { set, bound } => {
            let cols = dist.indices(set)?;
            Ok(dist.marginal(&cols).len() <= *bound)
        }
    }
}

/// Checks `cond` on every slice of `dist` obtained by fixing the variables
/// in `given`. With `given` empty this is [`check`].
pub fn check_given<S: AsRef<str>>(
    dist: &UniformSupport,
    cond: &InfoCondition,
    given: &[S],
) -> Result<bool, EntropyError> {
    if given.is_empty() {
        return check(dist, cond);
    }
    // Validate names before slicing so errors do not depend on the data.
    for v in cond.variables() {
        dist.index_of(v)?;
    }
    let cols = dist.indices(given)?;
    let mut keys: Vec<Vec<u32>> = dist.marginal(&cols).into_keys().collect();
    keys.sort_unstable();
    for key in keys {
        if !check(&dist.slice(&cols, &key), cond)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Shannon entropy (bits) of the marginal on `set`. For display only: every
/// decision in this crate is made by [`check`].
pub fn entropy_display<S: AsRef<str>>(dist: &UniformSupport, set: &[S]) -> Result<f64, EntropyError> {
    let cols = dist.indices(set)?;
    let total = dist.len() as f64;
    Ok(dist
        .marginal(&cols)
        .values()
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum::<f64>()
        .max(0.0))
}

/// Joint distribution of all messages (`M1..Ml`) and all edge signals
/// (named by edge id, in network edge order) under `scheme`.
pub fn support_of_scheme(net: &Network, scheme: &CodingScheme) -> Result<UniformSupport, SchemeError> {
    let eval = evaluate(net, scheme)?;
    let k = scheme.k;
    let mut vars: Vec<Variable> = (1..=net.messages.len())
        .map(|m| Variable { name: format!("M{m}"), size: net.message_size(m, k) })
        .collect();
    let mut columns: Vec<Vec<u32>> = eval.messages.clone();
    for (i, e) in net.edges.iter().enumerate() {
        vars.push(Variable { name: e.id.clone(), size: net.edge_size(e, k) });
        columns.push(eval.edges[i].clone());
    }
    Ok(UniformSupport::from_columns(vars, &columns).expect("evaluated signals are in range"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn var(name: &str, size: usize) -> Variable {
        Variable { name: name.into(), size }
    }

    fn xor_triple() -> UniformSupport {
        let rows = (0..4u32).map(|i| vec![i >> 1, i & 1, (i >> 1) ^ (i & 1)]).collect();
        UniformSupport::new(vec![var("M1", 2), var("M2", 2), var("Y", 2)], rows).unwrap()
    }

    fn two_bits() -> UniformSupport {
        let rows = (0..4u32).map(|i| vec![i >> 1, i & 1, 0]).collect();
        UniformSupport::new(vec![var("M1", 2), var("M2", 2), var("C", 1)], rows).unwrap()
    }

    #[test]
    fn xor_condition_holds() {
        let d = xor_triple();
        assert!(check(&d, &InfoCondition::determined(&["M1"], &["Y", "M2"])).unwrap());
        assert!(check(&d, &InfoCondition::determined(&["M2"], &["Y", "M1"])).unwrap());
    }

    #[test]
    fn independent_bits_do_not_determine_each_other() {
        let d = two_bits();
        assert!(!check(&d, &InfoCondition::determined(&["M2"], &["M1"])).unwrap());
        let ind = InfoCondition::Independent { a: vec!["M1".into()], b: vec!["M2".into()] };
        assert!(check(&d, &ind).unwrap());
        let dep = InfoCondition::Independent { a: vec!["M1".into()], b: vec!["M1".into()] };
        assert!(!check(&d, &dep).unwrap());
    }

    #[test]
    fn cycles_support_determines_u() {
        // X2 = pi_U(X1) with pi_0 = id, pi_1 = swap on k = 2.
        let rows = (0..4u32)
            .map(|i| {
                let (x1, u) = (i >> 1, i & 1);
                vec![x1, u, x1 ^ u]
            })
            .collect();
        let d = UniformSupport::new(vec![var("X1", 2), var("U", 2), var("X2", 2)], rows).unwrap();
        assert!(check(&d, &InfoCondition::determined(&["U"], &["X1", "X2"])).unwrap());
        assert!(check(&d, &InfoCondition::support_at_most(&["X2"], 2)).unwrap());
        assert!(!check(&d, &InfoCondition::support_at_most(&["X2"], 1)).unwrap());
    }

    #[test]
    fn uniform_marginals() {
        let rows = vec![vec![0, 0], vec![0, 1], vec![1, 0]];
        let d = UniformSupport::new(vec![var("A", 2), var("B", 2)], rows).unwrap();
        assert!(!check(&d, &InfoCondition::Uniform { set: vec!["A".into()] }).unwrap());
        assert!(check(&d, &InfoCondition::Uniform { set: vec!["A".into(), "B".into()] }).unwrap());
    }

    #[test]
    fn entropy_display_values() {
        assert!((entropy_display(&two_bits(), &["M1", "M2"]).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(entropy_display(&two_bits(), &["C"]).unwrap(), 0.0);
        assert!((entropy_display(&xor_triple(), &["Y"]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn conditional_check_slices() {
        // Y = M1 xor M2 xor W: XOR holds on each slice of W.
        let rows = (0..8u32)
            .map(|i| {
                let (a, b, w) = (i >> 2, (i >> 1) & 1, i & 1);
                vec![a, b, w, a ^ b ^ w]
            })
            .collect();
        let d = UniformSupport::new(vec![var("M1", 2), var("M2", 2), var("W", 2), var("Y", 2)], rows).unwrap();
        let c = InfoCondition::determined(&["M1"], &["Y", "M2"]);
        assert!(check_given(&d, &c, &["W"]).unwrap());
        assert!(!check_given(&d, &InfoCondition::determined(&["M1"], &["Y"]), &["W"]).unwrap());
    }

    #[test]
    fn errors() {
        let d = xor_triple();
        assert_eq!(
            check(&d, &InfoCondition::determined(&["Q"], &["Y"])),
            Err(EntropyError::UnknownVariable("Q".into()))
        );
        assert_eq!(UniformSupport::new(vec![var("A", 2)], vec![]), Err(EntropyError::EmptySupport));
        assert!(UniformSupport::new(vec![var("A", 2)], vec![vec![2]]).is_err());
    }
}
