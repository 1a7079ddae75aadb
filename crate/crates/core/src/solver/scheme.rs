use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::network::{kahn, validate, Network, ValidationReport, Violation};

/// Largest table (rows) or tuple space this crate will materialize.
pub const MAX_TABLE_ROWS: usize = 1 << 24;

/// A concrete coding scheme at alphabet size `k`.
///
/// Tables are row-major over the resolved input domain of the node: source
/// messages in ascending order, then in-edges ordered by edge id, with the
/// first coordinate most significant. The serde form is the witness JSON.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CodingScheme {
    pub k: usize,
    pub encodings: BTreeMap<String, Vec<u32>>,
    pub decodings: BTreeMap<String, Vec<Vec<u32>>>,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum SchemeError {
    #[error("invalid network: {0}")]
    Invalid(ValidationReport),
    #[error("no encoding table for edge `{0}`")]
    MissingTable(String),
    #[error("table for `{id}` has {got} rows, domain has {expected}")]
    Shape { id: String, expected: usize, got: usize },
    #[error("edge `{id}` emits {value} at row {row}, alphabet size is {size}")]
    OutOfRange { id: String, row: usize, value: u32, size: usize },
    #[error("{0} exceeds the materialization limit of {MAX_TABLE_ROWS} rows")]
    TooLarge(String),
}

/// Row-major mixed-radix index; the first coordinate is most significant.
pub(crate) fn row_index(radices: &[usize], digits: impl IntoIterator<Item = u32>) -> usize {
    radices.iter().zip(digits).fold(0, |acc, (&r, d)| acc * r + d as usize)
}

/// Checked product of radices, `None` above [`MAX_TABLE_ROWS`].
pub(crate) fn domain_size(radices: &[usize]) -> Option<usize> {
    radices
        .iter()
        .try_fold(1usize, |acc, &r| acc.checked_mul(r))
        .filter(|&n| n <= MAX_TABLE_ROWS)
}

/// Enumerates message tuples in row-major order (message 1 most significant).
#[derive(Clone, Debug)]
pub(crate) struct TupleSpace {
    pub sizes: Vec<usize>,
    pub count: usize,
}

impl TupleSpace {
    pub fn new(net: &Network, k: usize) -> Result<Self, SchemeError> {
        let sizes: Vec<usize> = (1..=net.messages.len()).map(|m| net.message_size(m, k)).collect();
        let count = domain_size(&sizes).ok_or_else(|| SchemeError::TooLarge("message tuple space".into()))?;
        Ok(TupleSpace { sizes, count })
    }

    /// One column per message: its value at every tuple.
    pub fn columns(&self) -> Vec<Vec<u32>> {
        let mut cols = vec![Vec::with_capacity(self.count); self.sizes.len()];
        for t in 0..self.count {
            let mut rest = t;
            for (i, &s) in self.sizes.iter().enumerate().rev() {
                cols[i].push((rest % s) as u32);
                rest /= s;
            }
        }
        cols
    }
}

/// Every signal of the network at every message tuple.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// `messages[i][t]`: value of message `i + 1` at tuple `t`.
    pub messages: Vec<Vec<u32>>,
    /// `edges[j][t]`: signal on `net.edges[j]` at tuple `t`.
    pub edges: Vec<Vec<u32>>,
}

impl Evaluation {
    /// Column of the edge with id `id` in `net`.
    pub fn edge<'a>(&'a self, net: &Network, id: &str) -> Option<&'a [u32]> {
        net.edges.iter().position(|e| e.id == id).map(|j| self.edges[j].as_slice())
    }
}

struct RawEval {
    eval: Evaluation,
    problems: Vec<SchemeError>,
}

fn evaluate_raw(net: &Network, scheme: &CodingScheme) -> Result<RawEval, SchemeError> {
    let report = validate(net);
    if !report.ok {
        return Err(SchemeError::Invalid(report));
    }
    let k = scheme.k;
    let space = TupleSpace::new(net, k)?;
    let messages = space.columns();
    let order = kahn(net).expect("validated");
    let edge_pos: HashMap<&str, usize> = net.edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let mut edges: Vec<Vec<u32>> = vec![Vec::new(); net.edges.len()];
    let mut problems = Vec::new();

    for node in &order {
        let radices = net.input_radices(node, k);
        let rows = domain_size(&radices).ok_or_else(|| SchemeError::TooLarge(format!("domain of `{node}`")))?;
        let srcs: Vec<usize> = net.sources_of(node).collect();
        let ins: Vec<usize> = net.in_edges(node).iter().map(|e| edge_pos[e.id.as_str()]).collect();
        let row_of = |t: usize| -> usize {
            let digits = srcs.iter().map(|&m| messages[m - 1][t]).chain(ins.iter().map(|&j| edges[j][t]));
            // Clamp out-of-range upstream values so a bad table cannot index past the domain.
            let clamped = digits.zip(&radices).map(|(d, &r)| d.min(r as u32 - 1));
            row_index(&radices, clamped)
        };
        let row_cache: Vec<usize> = (0..space.count).map(row_of).collect();
        for e in net.out_edges(node) {
            let table = scheme.encodings.get(&e.id).ok_or_else(|| SchemeError::MissingTable(e.id.clone()))?;
            if table.len() != rows {
                return Err(SchemeError::Shape { id: e.id.clone(), expected: rows, got: table.len() });
            }
            let size = net.edge_size(e, k);
            let mut col = Vec::with_capacity(space.count);
            let mut flagged = false;
            for &row in &row_cache {
                let v = table[row];
                if v as usize >= size && !flagged {
                    problems.push(SchemeError::OutOfRange { id: e.id.clone(), row, value: v, size });
                    flagged = true;
                }
                col.push(v);
            }
            edges[edge_pos[e.id.as_str()]] = col;
        }
    }
    Ok(RawEval { eval: Evaluation { messages, edges }, problems })
}

/// Runs the scheme on every message tuple. Fails on a missing or misshapen
/// table or on any out-of-range table entry that is reached.
pub fn evaluate(net: &Network, scheme: &CodingScheme) -> Result<Evaluation, SchemeError> {
    let raw = evaluate_raw(net, scheme)?;
    match raw.problems.into_iter().next() {
        Some(p) => Err(p),
        None => Ok(raw.eval),
    }
}

/// Exhaustively checks a scheme: table shapes, ranges, and that every node
/// decodes its demanded messages on every message tuple.
pub fn verify_scheme(net: &Network, scheme: &CodingScheme) -> ValidationReport {
    let mut out = Vec::new();
    if scheme.k == 0 {
        out.push(Violation::new("k", "k must be positive"));
        return ValidationReport::from_violations(out);
    }
    let raw = match evaluate_raw(net, scheme) {
        Ok(r) => r,
        Err(SchemeError::Invalid(rep)) => return rep,
        Err(e @ SchemeError::MissingTable(_)) => {
            out.push(Violation::new("missing_table", e.to_string()));
            return ValidationReport::from_violations(out);
        }
        Err(e) => {
            out.push(Violation::new("table_shape", e.to_string()));
            return ValidationReport::from_violations(out);
        }
    };
    for p in &raw.problems {
        if let SchemeError::OutOfRange { id, .. } = p {
            out.push(Violation::new("range", format!("{id}: {p}")));
        }
    }
    let k = scheme.k;
    let eval = &raw.eval;
    let edge_pos: HashMap<&str, usize> = net.edges.iter().enumerate().map(|(i, e)| (e.id.as_str(), i)).collect();
    let tuples = eval.messages.first().map_or(1, Vec::len);

    for node in &net.nodes {
        let wanted: Vec<usize> = net.demands_of(&node.id).collect();
        if wanted.is_empty() {
            continue;
        }
        let Some(table) = scheme.decodings.get(&node.id) else {
            out.push(Violation::new("missing_decoder", &node.id));
            continue;
        };
        let radices = net.input_radices(&node.id, k);
        let Some(rows) = domain_size(&radices) else {
            out.push(Violation::new("table_shape", format!("domain of `{}` too large", node.id)));
            continue;
        };
        if table.len() != rows || table.iter().any(|r| r.len() != wanted.len()) {
            out.push(Violation::new("table_shape", format!("decoder of `{}`", node.id)));
            continue;
        }
        let srcs: Vec<usize> = net.sources_of(&node.id).collect();
        let ins: Vec<usize> = net.in_edges(&node.id).iter().map(|e| edge_pos[e.id.as_str()]).collect();
        let fails = (0..tuples).any(|t| {
            let digits = srcs
                .iter()
                .map(|&m| eval.messages[m - 1][t])
                .chain(ins.iter().map(|&j| eval.edges[j][t]))
                .zip(&radices)
                .map(|(d, &r)| d.min(r as u32 - 1));
            let row = &table[row_index(&radices, digits)];
            wanted.iter().zip(row).any(|(&m, &got)| eval.messages[m - 1][t] != got)
        });
        if fails {
            out.push(Violation::new("decode", &node.id));
        }
    }
    ValidationReport::from_violations(out)
}
