//! Torus-coloring condition programs: a brute-force oracle on small tori and
//! compilation of a program into a network.
//!
//! Grid conventions for the oracle: vertex `(x, y)` with `x` in
//! `0..width`, `y` in `0..height`, both wrapping. Horizontal edges join
//! `(x, y)` and `(x+1, y)`, vertical edges `(x, y)` and `(x, y+1)`. The face
//! at `(x, y)` has corners `(x, y), (x+1, y), (x, y+1), (x+1, y+1)`; it is
//! even when `x + y` is even, of type 11 when moreover `x` is even and of
//! type 22 when `x` is odd.

use serde::{Deserialize, Serialize};

use crate::gadgets::{
    cond_set_checker, cond_switch_gate, cond_virtual_equality_checker, cond_virtual_or_checker, cycles_gate, set_port,
    Composer, GadgetError, Signal,
};
use crate::network::{canonicalize, Network, SizeSpec, ValidationReport, Violation};

/// Largest torus (in vertices) the oracle accepts.
pub const MAX_TORUS_CELLS: usize = 36;

/// Nominal alphabet recorded on condition inputs inside a reduced network;
/// the actual alphabet is that of whatever the input is bound to.
const NOMINAL_W: usize = 2;

#[derive(Debug, thiserror::Error)]
pub enum TilingError {
    #[error("invalid program: {0}")]
    Program(String),
    #[error("invalid coloring: {0}")]
    Coloring(String),
    #[error("torus {0}x{1} exceeds the search cap of {MAX_TORUS_CELLS} cells")]
    Cap(usize, usize),
    #[error(transparent)]
    Gadget(#[from] GadgetError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Orientation {
    #[serde(rename = "h")]
    Horizontal,
    #[serde(rename = "v")]
    Vertical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FaceType {
    #[serde(rename = "11")]
    Type11,
    #[serde(rename = "22")]
    Type22,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TileCondition {
    /// Both ends of every edge agree on membership in `set`.
    EdgeEq { orientation: Orientation, set: Vec<usize> },
    /// Some end of every edge is in `set`.
    EdgeOr { orientation: Orientation, set: Vec<usize> },
    /// Some corner of every face of the type is in `set`.
    FaceOr { face: FaceType, set: Vec<usize> },
}

impl TileCondition {
    pub fn set(&self) -> &[usize] {
        match self {
            TileCondition::EdgeEq { set, .. } | TileCondition::EdgeOr { set, .. } | TileCondition::FaceOr { set, .. } => set,
        }
    }

    fn set_mut(&mut self) -> &mut Vec<usize> {
        match self {
            TileCondition::EdgeEq { set, .. } | TileCondition::EdgeOr { set, .. } | TileCondition::FaceOr { set, .. } => set,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionProgram {
    pub colors: usize,
    pub conditions: Vec<TileCondition>,
}

impl ConditionProgram {
    pub fn new(colors: usize, conditions: Vec<TileCondition>) -> Result<Self, TilingError> {
        let mut p = ConditionProgram { colors, conditions };
        p.normalize()?;
        Ok(p)
    }

    /// Sorts and dedups every set, then checks it is a nonempty proper
    /// subset of the colors.
    pub fn normalize(&mut self) -> Result<(), TilingError> {
        if self.colors < 2 {
            return Err(TilingError::Program(format!("need at least 2 colors, got {}", self.colors)));
        }
        for (i, c) in self.conditions.iter_mut().enumerate() {
            let set = c.set_mut();
            set.sort_unstable();
            set.dedup();
            if set.is_empty() || set.len() >= self.colors {
                return Err(TilingError::Program(format!("condition {i}: set must be a nonempty proper subset")));
            }
            if set.iter().any(|&x| x == 0 || x > self.colors) {
                return Err(TilingError::Program(format!("condition {i}: colors are 1..={}", self.colors)));
            }
        }
        Ok(())
    }

    pub fn from_json(s: &str) -> Result<Self, TilingError> {
        let mut p: ConditionProgram = serde_json::from_str(s).map_err(|e| TilingError::Program(e.to_string()))?;
        p.normalize()?;
        Ok(p)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("programs serialize")
    }
}

/// Nonempty proper subsets of `1..=n`, by size then lexicographically.
pub fn subsets(n: usize) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = (1..(1usize << n) - 1)
        .map(|mask| (1..=n).filter(|&c| mask >> (c - 1) & 1 == 1).collect())
        .collect();
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all
}

/// Membership of `c` in each subset of [`subsets`].
pub fn phi(c: usize, n: usize) -> Result<Vec<bool>, TilingError> {
    if n < 2 || c == 0 || c > n {
        return Err(TilingError::Program(format!("color {c} out of range 1..={n}")));
    }
    Ok(subsets(n).iter().map(|s| s.contains(&c)).collect())
}

/// `{phi(c) : c in 1..=n}`.
pub fn codewords(n: usize) -> Vec<Vec<bool>> {
    (1..=n).map(|c| phi(c, n).expect("in range")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusColoring {
    pub width: usize,
    pub height: usize,
    /// `colors[y][x]`, values in `1..=N`.
    pub colors: Vec<Vec<usize>>,
}

impl TorusColoring {
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self, TilingError> {
        let height = rows.len();
        let width = rows.first().map_or(0, Vec::len);
        let c = TorusColoring { width, height, colors: rows };
        c.check_shape()?;
        Ok(c)
    }

    fn check_shape(&self) -> Result<(), TilingError> {
        if self.width == 0 || self.height == 0 || self.width % 2 == 1 || self.height % 2 == 1 {
            return Err(TilingError::Coloring(format!("dimensions {}x{} must be even and positive", self.width, self.height)));
        }
        if self.colors.len() != self.height || self.colors.iter().any(|r| r.len() != self.width) {
            return Err(TilingError::Coloring("grid shape does not match dimensions".into()));
        }
        Ok(())
    }

    pub fn at(&self, x: usize, y: usize) -> usize {
        self.colors[y % self.height][x % self.width]
    }
}

/// One constraint instance: the cells involved and how to test them.
struct Constraint {
    cells: Vec<(usize, usize)>,
    cond: usize,
}

fn constraints(program: &ConditionProgram, width: usize, height: usize) -> Vec<Constraint> {
    let mut out = Vec::new();
    for (ci, c) in program.conditions.iter().enumerate() {
        for y in 0..height {
            for x in 0..width {
                let cells = match c {
                    TileCondition::EdgeEq { orientation, .. } | TileCondition::EdgeOr { orientation, .. } => match orientation {
                        Orientation::Horizontal => vec![(x, y), ((x + 1) % width, y)],
                        Orientation::Vertical => vec![(x, y), (x, (y + 1) % height)],
                    },
                    TileCondition::FaceOr { face, .. } => {
                        let wanted = match face {
                            FaceType::Type11 => (x + y) % 2 == 0 && x % 2 == 0,
                            FaceType::Type22 => (x + y) % 2 == 0 && x % 2 == 1,
                        };
                        if !wanted {
                            continue;
                        }
                        let (x1, y1) = ((x + 1) % width, (y + 1) % height);
                        vec![(x, y), (x1, y), (x, y1), (x1, y1)]
                    }
                };
                out.push(Constraint { cells, cond: ci });
            }
        }
    }
    out
}

fn holds(cond: &TileCondition, colors: &[usize]) -> bool {
    let inside = |c: &usize| cond.set().contains(c);
    match cond {
        TileCondition::EdgeEq { .. } => inside(&colors[0]) == inside(&colors[1]),
        TileCondition::EdgeOr { .. } | TileCondition::FaceOr { .. } => colors.iter().any(inside),
    }
}

fn describe(cells: &[(usize, usize)]) -> String {
    cells.iter().map(|(x, y)| format!("({x},{y})")).collect::<Vec<_>>().join("-")
}

/// Every violated constraint, with its cells.
pub fn validate_coloring(program: &ConditionProgram, coloring: &TorusColoring) -> ValidationReport {
    let mut v = Vec::new();
    if let Err(e) = coloring.check_shape() {
        v.push(Violation::new("shape", e.to_string()));
        return ValidationReport::from_violations(v);
    }
    for (y, row) in coloring.colors.iter().enumerate() {
        for (x, &c) in row.iter().enumerate() {
            if c == 0 || c > program.colors {
                v.push(Violation::new("color_range", describe(&[(x, y)])));
            }
        }
    }
    for k in constraints(program, coloring.width, coloring.height) {
        let colors: Vec<usize> = k.cells.iter().map(|&(x, y)| coloring.at(x, y)).collect();
        let cond = &program.conditions[k.cond];
        if !holds(cond, &colors) {
            let rule = match cond {
                TileCondition::EdgeEq { .. } => "edge_eq",
                TileCondition::EdgeOr { .. } => "edge_or",
                TileCondition::FaceOr { .. } => "face_or",
            };
            v.push(Violation::new(rule, format!("#{} {}", k.cond, describe(&k.cells))));
        }
    }
    ValidationReport::from_violations(v)
}

/// Lexicographically first coloring (row by row, colors ascending) that
/// satisfies every condition, or `None` if there is none of this size.
pub fn torus_bruteforce(program: &ConditionProgram, width: usize, height: usize) -> Result<Option<TorusColoring>, TilingError> {
    if width == 0 || height == 0 || width % 2 == 1 || height % 2 == 1 {
        return Err(TilingError::Coloring(format!("dimensions {width}x{height} must be even and positive")));
    }
    if width * height > MAX_TORUS_CELLS {
        return Err(TilingError::Cap(width, height));
    }
    let cells = width * height;
    let index = |(x, y): (usize, usize)| y * width + x;
    // Each constraint is tested once its last cell is assigned.
    let mut due: Vec<Vec<Constraint>> = (0..cells).map(|_| Vec::new()).collect();
    for k in constraints(program, width, height) {
        let last = k.cells.iter().map(|&c| index(c)).max().expect("nonempty");
        due[last].push(k);
    }
    let mut grid = vec![0usize; cells];
    let mut pos = 0usize;
    loop {
        grid[pos] += 1;
        if grid[pos] > program.colors {
            grid[pos] = 0;
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            continue;
        }
        let ok = due[pos].iter().all(|k| {
            let colors: Vec<usize> = k.cells.iter().map(|&c| grid[index(c)]).collect();
            holds(&program.conditions[k.cond], &colors)
        });
        if ok {
            if pos + 1 == cells {
                let rows = grid.chunks(width).map(<[usize]>::to_vec).collect();
                return Ok(Some(TorusColoring { width, height, colors: rows }));
            }
            pos += 1;
        }
    }
}

/// Every single condition (over all types and sets) that `coloring`
/// satisfies.
pub fn derive_program(coloring: &TorusColoring, colors: usize) -> Result<ConditionProgram, TilingError> {
    let mut all = Vec::new();
    for set in subsets(colors) {
        for orientation in [Orientation::Horizontal, Orientation::Vertical] {
            all.push(TileCondition::EdgeEq { orientation, set: set.clone() });
            all.push(TileCondition::EdgeOr { orientation, set: set.clone() });
        }
        for face in [FaceType::Type11, FaceType::Type22] {
            all.push(TileCondition::FaceOr { face, set: set.clone() });
        }
    }
    let kept = all
        .into_iter()
        .filter(|c| {
            let p = ConditionProgram { colors, conditions: vec![c.clone()] };
            validate_coloring(&p, coloring).ok
        })
        .collect();
    ConditionProgram::new(colors, kept)
}

/// A 3-color periodic pattern on the 4x4 torus, in the spirit of the
/// rotated-tile illustration.
pub fn sample_coloring() -> TorusColoring {
    TorusColoring::from_rows(vec![vec![1, 2, 1, 3], vec![2, 1, 3, 1], vec![1, 3, 1, 2], vec![3, 1, 2, 1]])
        .expect("4x4 is even")
}

/// Where each part of a reduced network came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReduceLayout {
    /// Part name of the switch for each subset, in [`subsets`] order.
    pub switches: Vec<(Vec<usize>, String)>,
    pub set_checker: String,
    /// Checker parts emitted for each condition, in program order.
    pub checkers: Vec<Vec<String>>,
    /// Message indices of `M0, M1, U, V, X1, Y1`.
    pub messages: [usize; 6],
}

/// [`reduce_with_layout`] without the layout.
pub fn reduce(program: &ConditionProgram) -> Result<Network, TilingError> {
    reduce_with_layout(program).map(|(n, _)| n)
}

/// Compiles `program` into a canonical network: cycles on `(X1, U)` and
/// `(Y1, V)`, one conditional switch per subset selected by
/// `(X1, U, Y1, V)`, a conditional set checker for the color codewords, and
/// virtual checkers per condition.
pub fn reduce_with_layout(program: &ConditionProgram) -> Result<(Network, ReduceLayout), TilingError> {
    let mut program = program.clone();
    program.normalize()?;
    let n_colors = program.colors;
    if n_colors > 4 {
        return Err(TilingError::Program(format!("{n_colors} colors need {} switches; at most 4 colors", (1 << n_colors) - 2)));
    }
    let mut c = Composer::new();
    let bit = SizeSpec::Fixed(2);
    let (m0, m1, u, v) = (c.message(bit), c.message(bit), c.message(bit), c.message(bit));
    let (x1, y1) = (c.message(SizeSpec::Default), c.message(SizeSpec::Default));
    let msg = Signal::Message;

    c.add_part("cx", cycles_gate());
    c.bind("cx", "X1", vec![msg(x1)]).bind("cx", "U", vec![msg(u)]);
    c.add_part("cy", cycles_gate());
    c.bind("cy", "X1", vec![msg(y1)]).bind("cy", "U", vec![msg(v)]);
    let x2 = Signal::output("cx", "X2");
    let y2 = Signal::output("cy", "X2");
    let select = vec![msg(x1), msg(u), msg(y1), msg(v)];

    let subs = subsets(n_colors);
    let mut switches = Vec::new();
    for (i, s) in subs.iter().enumerate() {
        let name = format!("sw{}", i + 1);
        c.add_part(&name, cond_switch_gate(NOMINAL_W)?);
        c.bind(&name, "M0", vec![msg(m0)]).bind(&name, "M1", vec![msg(m1)]).bind(&name, "W", select.clone());
        switches.push((s.clone(), name));
    }
    let n = subs.len();
    c.add_part("set", cond_set_checker(n, &codewords(n_colors), NOMINAL_W)?);
    c.bind("set", "M1", vec![msg(m1)]).bind("set", "W", select.clone());
    for (i, (_, sw)) in switches.iter().enumerate() {
        for a in 0..2u8 {
            c.bind("set", &set_port(i + 1, a), vec![Signal::output(sw, &format!("Z{a}"))]);
        }
    }

    let mut checkers = Vec::new();
    for (j, cond) in program.conditions.iter().enumerate() {
        let idx = subs.iter().position(|s| s.as_slice() == cond.set()).expect("normalized");
        let sw = &switches[idx].1;
        let z0 = Signal::output(sw, "Z0");
        // (condition, remaining select) pairs.
        let variants: Vec<(Vec<Signal>, Vec<Signal>)> = match cond {
            TileCondition::EdgeEq { orientation, .. } | TileCondition::EdgeOr { orientation, .. } => match orientation {
                Orientation::Horizontal => vec![
                    (vec![msg(x1), msg(y1), y2.clone()], vec![msg(u)]),
                    (vec![x2.clone(), msg(y1), y2.clone()], vec![msg(u)]),
                ],
                Orientation::Vertical => vec![
                    (vec![msg(x1), x2.clone(), msg(y1)], vec![msg(v)]),
                    (vec![msg(x1), x2.clone(), y2.clone()], vec![msg(v)]),
                ],
            },
            TileCondition::FaceOr { face: FaceType::Type11, .. } => vec![(vec![msg(x1), msg(y1)], vec![msg(u), msg(v)])],
            TileCondition::FaceOr { face: FaceType::Type22, .. } => vec![(vec![x2.clone(), y2.clone()], vec![msg(u), msg(v)])],
        };
        let mut parts = Vec::new();
        for (vi, (condition, rest)) in variants.into_iter().enumerate() {
            let name = format!("c{}{}", j + 1, (b'a' + vi as u8) as char);
            match cond {
                TileCondition::EdgeEq { .. } => {
                    c.add_part(&name, cond_virtual_equality_checker(NOMINAL_W, 2)?);
                    c.bind(&name, "M0", vec![msg(m0)]).bind(&name, "M1", vec![msg(m1)]);
                }
                _ => {
                    c.add_part(&name, cond_virtual_or_checker(NOMINAL_W, 2 * rest.len())?);
                    c.bind(&name, "M1", vec![msg(m1)]);
                }
            }
            c.bind(&name, "Z0", vec![z0.clone()]).bind(&name, "W", rest).bind(&name, "W1", condition);
            parts.push(name);
        }
        checkers.push(parts);
    }
    let net = canonicalize(&c.finish()?).map_err(GadgetError::from)?;
    Ok((net, ReduceLayout { switches, set_checker: "set".into(), checkers, messages: [m0, m1, u, v, x1, y1] }))
}

/// A program with no coloring on any torus: every row is uniformly in or
/// out of `{1}`, no two horizontal neighbours avoid `{1}`, and no two avoid
/// `{2}`.
pub fn contradiction_program() -> ConditionProgram {
    let h = Orientation::Horizontal;
    ConditionProgram::new(
        2,
        vec![
            TileCondition::EdgeEq { orientation: h, set: vec![1] },
            TileCondition::EdgeOr { orientation: h, set: vec![1] },
            TileCondition::EdgeOr { orientation: h, set: vec![2] },
        ],
    )
    .expect("valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::validate;

    #[test]
    fn subset_order_and_phi() {
        assert_eq!(subsets(3), vec![vec![1], vec![2], vec![3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(phi(1, 2).unwrap(), vec![true, false]);
        assert_eq!(phi(3, 3).unwrap().len(), 6);
        let cw = codewords(3);
        assert!(cw[0] != cw[1] && cw[1] != cw[2] && cw[0] != cw[2]);
        assert!(phi(0, 3).is_err() && phi(4, 3).is_err());
    }

    #[test]
    fn program_json_round_trip() {
        let json = r#"{"colors":3,"conditions":[{"type":"edge_eq","orientation":"h","set":[2,1]},
            {"type":"face_or","face":"22","set":[1,2]}]}"#;
        let p = ConditionProgram::from_json(json).unwrap();
        assert_eq!(p.conditions[0].set(), &[1, 2]);
        assert_eq!(ConditionProgram::from_json(&p.to_json()).unwrap(), p);
        assert!(ConditionProgram::from_json(r#"{"colors":2,"conditions":[{"type":"edge_or","orientation":"v","set":[1,2]}]}"#).is_err());
        assert!(ConditionProgram::from_json(r#"{"colors":2,"conditions":[{"type":"edge_or","orientation":"v","set":[]}]}"#).is_err());
    }

    #[test]
    fn empty_program_gives_all_ones() {
        let p = ConditionProgram::new(3, vec![]).unwrap();
        let c = torus_bruteforce(&p, 4, 4).unwrap().unwrap();
        assert!(c.colors.iter().flatten().all(|&x| x == 1));
        assert!(torus_bruteforce(&p, 3, 4).is_err());
        assert!(matches!(torus_bruteforce(&p, 8, 8), Err(TilingError::Cap(8, 8))));
    }

    #[test]
    fn validator_examples() {
        let eq = ConditionProgram::new(2, vec![TileCondition::EdgeEq { orientation: Orientation::Horizontal, set: vec![1] }]).unwrap();
        let flat = TorusColoring::from_rows(vec![vec![2; 4]; 4]).unwrap();
        assert!(validate_coloring(&eq, &flat).ok);
        let checker = TorusColoring::from_rows((0..4).map(|y| (0..4).map(|x| 1 + (x + y) % 2).collect()).collect()).unwrap();
        let r = validate_coloring(&eq, &checker);
        assert_eq!(r.violations.len(), 16);
        assert!(r.violations.iter().all(|v| v.rule == "edge_eq"));
    }

    #[test]
    fn face_types_split_even_faces() {
        let t11 = ConditionProgram::new(2, vec![TileCondition::FaceOr { face: FaceType::Type11, set: vec![1] }]).unwrap();
        let t22 = ConditionProgram::new(2, vec![TileCondition::FaceOr { face: FaceType::Type22, set: vec![1] }]).unwrap();
        let all2 = TorusColoring::from_rows(vec![vec![2; 4]; 4]).unwrap();
        assert_eq!(validate_coloring(&t11, &all2).violations.len(), 4);
        assert_eq!(validate_coloring(&t22, &all2).violations.len(), 4);
    }

    #[test]
    fn sample_and_contradiction() {
        let s = sample_coloring();
        let p = derive_program(&s, 3).unwrap();
        assert!(!p.conditions.is_empty());
        assert!(validate_coloring(&p, &s).ok);
        let found = torus_bruteforce(&p, 4, 4).unwrap().unwrap();
        assert!(validate_coloring(&p, &found).ok);
        let bad = contradiction_program();
        assert!(torus_bruteforce(&bad, 2, 2).unwrap().is_none());
        assert!(torus_bruteforce(&bad, 4, 4).unwrap().is_none());
    }

    #[test]
    fn reduce_structure() {
        let p2 = ConditionProgram::new(2, vec![]).unwrap();
        let (net, layout) = reduce_with_layout(&p2).unwrap();
        assert_eq!(layout.switches.len(), 2);
        assert!(validate(&net).ok);
        assert!(net.is_simple());
        assert_eq!(net.messages.len(), 6);
        let p3 = ConditionProgram::new(3, vec![TileCondition::FaceOr { face: FaceType::Type22, set: vec![1, 2] }]).unwrap();
        let (net3, layout3) = reduce_with_layout(&p3).unwrap();
        assert_eq!(layout3.switches.len(), 6);
        assert_eq!(layout3.checkers, vec![vec!["c1a".to_string()]]);
        assert!(validate(&net3).ok && net3.is_simple());
    }
}
