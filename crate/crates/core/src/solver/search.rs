//! Depth-first search over one slice of a [`Plan`].
//!
//! Variables are assigned in plan order, class by class over the tail's
//! knowledge classes. Each demand is checked incrementally while its last
//! variable is being assigned: a table keyed by (base class, value) records
//! the demanded tuple seen there, and a second, different tuple is a
//! conflict.

use std::sync::atomic::{AtomicU64, Ordering};

use super::partition::Partition;
use super::plan::Plan;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Flow {
    Continue,
    Stop,
    Exhausted,
}

pub(crate) struct Budget {
    used: AtomicU64,
    limit: Option<u64>,
}

impl Budget {
    pub fn new(limit: Option<u64>) -> Self {
        Budget { used: AtomicU64::new(0), limit }
    }

    fn tick(&self) -> bool {
        let n = self.used.fetch_add(1, Ordering::Relaxed);
        self.limit.is_none_or(|l| n < l)
    }
}

struct Check {
    base: Vec<u32>,
    target: Vec<u32>,
    width: usize,
    /// (target class, count) per (base class, value).
    table: Vec<(u32, u32)>,
}

struct Frame {
    classes: Vec<Vec<u32>>,
    width: usize,
    identity: bool,
    checks: Vec<Check>,
}

/// What the caller sees at a leaf.
pub(crate) enum Leaf<'s> {
    /// All variables assigned; columns are local to the slice.
    Solution(&'s [Vec<u32>]),
    /// Value sequence reaching the cut depth (or a full solution above it).
    Prefix(&'s [u32]),
}

pub(crate) struct Search<'p> {
    plan: &'p Plan,
    budget: &'p Budget,
    /// Local message and pin columns.
    msgs: Vec<Vec<u32>>,
    pins: Vec<Vec<u32>>,
    values: Vec<Vec<u32>>,
    frames: Vec<Option<Frame>>,
    path: Vec<u32>,
    forced: Vec<u32>,
    cut: Option<usize>,
}

impl<'p> Search<'p> {
    pub fn new(plan: &'p Plan, slice: &[u32], budget: &'p Budget) -> Self {
        let pick = |col: &Vec<u32>| slice.iter().map(|&t| col[t as usize]).collect();
        Search {
            plan,
            budget,
            msgs: plan.msg_cols.iter().map(pick).collect(),
            pins: plan.pin_cols.iter().map(pick).collect(),
            values: vec![vec![0; slice.len()]; plan.vars.len()],
            frames: (0..plan.vars.len()).map(|_| None).collect(),
            path: Vec::new(),
            forced: Vec::new(),
            cut: None,
        }
    }

    /// Replays `prefix` before searching freely.
    pub fn with_forced(mut self, prefix: Vec<u32>) -> Self {
        self.forced = prefix;
        self
    }

    /// Stops descending after `depth` decisions and reports the prefix.
    pub fn with_cut(mut self, depth: usize) -> Self {
        self.cut = Some(depth);
        self
    }

    pub fn run(&mut self, sink: &mut dyn FnMut(Leaf<'_>) -> Flow) -> Flow {
        self.run_var(0, sink)
    }

    fn partition(&self, know: &super::plan::Know, skip: Option<usize>) -> Partition {
        let n = self.values.first().map_or_else(|| self.msgs.first().map_or(0, Vec::len), Vec::len);
        let mut p = Partition::trivial(n);
        for &m in &know.msgs {
            p.refine(&self.msgs[m], self.plan.msg_sizes[m]);
        }
        for &q in &know.pins {
            p.refine(&self.pins[q], self.plan.pin_caps[q]);
        }
        for &v in &know.vars {
            if Some(v) != skip {
                p.refine(&self.values[v], self.plan.vars[v].cap);
            }
        }
        p
    }

    fn build_frame(&self, var: usize) -> Frame {
        let spec = &self.plan.vars[var];
        let classes = self.partition(&spec.know, None).classes();
        let identity = self.plan.symmetric && spec.cap >= classes.len();
        let width = if self.plan.symmetric { spec.cap.min(classes.len()) } else { spec.cap };
        let checks = spec
            .checks
            .iter()
            .map(|&d| {
                let dem = &self.plan.demands[d];
                let base = self.partition(&dem.know, Some(var));
                let mut target = Partition::trivial(base.ids.len());
                for &m in &dem.targets {
                    target.refine(&self.msgs[m], self.plan.msg_sizes[m]);
                }
                Check { table: vec![(0, 0); base.count * width], base: base.ids, target: target.ids, width }
            })
            .collect();
        Frame { classes, width, identity, checks }
    }

    fn run_var(&mut self, var: usize, sink: &mut dyn FnMut(Leaf<'_>) -> Flow) -> Flow {
        if var == self.plan.vars.len() {
            return if self.cut.is_some() { sink(Leaf::Prefix(&self.path)) } else { sink(Leaf::Solution(&self.values)) };
        }
        self.frames[var] = Some(self.build_frame(var));
        let flow = self.run_class(var, 0, 0, sink);
        self.frames[var] = None;
        flow
    }

    fn run_class(&mut self, var: usize, class: usize, fresh: u32, sink: &mut dyn FnMut(Leaf<'_>) -> Flow) -> Flow {
        let frame = self.frames[var].as_ref().expect("frame");
        if class == frame.classes.len() {
            return self.run_var(var + 1, sink);
        }
        if self.cut == Some(self.path.len()) {
            return sink(Leaf::Prefix(&self.path));
        }
        let (lo, hi) = if frame.identity {
            (class as u32, class as u32 + 1)
        } else if self.plan.symmetric {
            (0, (fresh + 1).min(frame.width as u32))
        } else {
            (0, frame.width as u32)
        };
        let (lo, hi) = match self.forced.get(self.path.len()) {
            Some(&x) if x >= lo && x < hi => (x, x + 1),
            Some(_) => return Flow::Continue,
            None => (lo, hi),
        };
        for x in lo..hi {
            if !self.budget.tick() {
                return Flow::Exhausted;
            }
            if !self.assign(var, class, x) {
                continue;
            }
            self.path.push(x);
            let flow = self.run_class(var, class + 1, fresh.max(x + 1), sink);
            self.path.pop();
            self.unassign(var, class, x);
            if flow != Flow::Continue {
                return flow;
            }
        }
        Flow::Continue
    }

    fn assign(&mut self, var: usize, class: usize, x: u32) -> bool {
        let frame = self.frames[var].as_mut().expect("frame");
        let mut failed = None;
        'members: for (i, &t) in frame.classes[class].iter().enumerate() {
            let t = t as usize;
            for (ci, ch) in frame.checks.iter_mut().enumerate() {
                let slot = &mut ch.table[ch.base[t] as usize * ch.width + x as usize];
                if slot.1 > 0 && slot.0 != ch.target[t] {
                    failed = Some((i, ci));
                    break 'members;
                }
                slot.0 = ch.target[t];
                slot.1 += 1;
            }
        }
        if let Some((i, ci)) = failed {
            undo(frame, class, x, i, ci);
            return false;
        }
        for &t in &frame.classes[class] {
            self.values[var][t as usize] = x;
        }
        true
    }

    fn unassign(&mut self, var: usize, class: usize, x: u32) {
        let frame = self.frames[var].as_mut().expect("frame");
        let n = frame.classes[class].len();
        undo(frame, class, x, n, 0);
    }
}

/// Reverses the first `tuples` members of `class` fully, then the first
/// `checks` checks of the next member.
fn undo(frame: &mut Frame, class: usize, x: u32, tuples: usize, checks: usize) {
    let members = &frame.classes[class];
    for (i, &t) in members.iter().enumerate().take(tuples + 1) {
        let upto = if i < tuples { frame.checks.len() } else { checks };
        for ch in frame.checks.iter_mut().take(upto) {
            ch.table[ch.base[t as usize] as usize * ch.width + x as usize].1 -= 1;
        }
    }
}
