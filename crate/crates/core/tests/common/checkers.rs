//! Checker harness helpers shared by the gadget tests and the acceptance runner.

use std::collections::BTreeSet;

use fixsize_core::gadgets::*;
use fixsize_core::network::{canonicalize, SizeSpec};
use fixsize_core::solver::{enumerate_solutions, evaluate, SolveOptions};

pub fn singletons(fs: Vec<CandidateFunction>) -> Vec<Vec<CandidateFunction>> {
    fs.into_iter().map(|f| vec![f]).collect()
}

pub fn both(g: &Gadget, h: &Harness, fam: &[Vec<CandidateFunction>], k: usize) -> Vec<usize> {
    let net = accepted_set_in(g, h, fam, k).unwrap();
    let ent = accepted_by_conditions(g, h, fam, k).unwrap();
    assert_eq!(net, ent, "{}: network and condition oracles disagree", g.name);
    net
}

pub fn tables(fam: &[Vec<CandidateFunction>], idx: &[usize]) -> Vec<Vec<u32>> {
    idx.iter().map(|&i| fam[i][0].table.clone()).collect()
}


/// Harness (M0, M1, [W1], W) and the candidate `Z0 = M_θ(w1, w)`.
pub fn select_harness(ports: &[&str], b1: Option<usize>, b: usize) -> Harness {
    let mut messages = vec![("M0".to_string(), SizeSpec::Fixed(2)), ("M1".to_string(), SizeSpec::Fixed(2))];
    if let Some(b1) = b1 {
        messages.push(("W1".to_string(), SizeSpec::Fixed(b1)));
    }
    messages.push(("Wm".to_string(), SizeSpec::Fixed(b)));
    let bindings = ports
        .iter()
        .map(|&p| {
            let m = if p == "W" { "Wm" } else { p };
            (p.to_string(), vec![m.to_string()])
        })
        .collect();
    Harness { messages, bindings }
}

pub fn theta_family(h: &Harness, conditional: bool, b1: usize, b: usize, with_select: bool) -> Vec<(Vec<bool>, Vec<CandidateFunction>)> {
    let n = b1 * b;
    (0..1usize << n)
        .map(|bits| {
            let theta: Vec<bool> = (0..n).map(|i| (bits >> i) & 1 == 1).collect();
            let th = theta.clone();
            let z0 = CandidateFunction::from_fn(h, 1, "Z0", 2, move |t| {
                let (w1, w) = if conditional { (t[2] as usize, t[3] as usize) } else { (0, t[2] as usize) };
                t[th[w1 * b + w] as usize]
            });
            let mut cand = vec![z0];
            if with_select {
                let wi = if conditional { 3 } else { 2 };
                cand.push(CandidateFunction::from_fn(h, 1, "W", b, move |t| t[wi]));
            }
            (theta, cand)
        })
        .collect()
}


/// Physical array of `n` switches sharing (M0, M1) under a set checker;
/// returns the switch states of every enumerated solution.
pub fn array_states(n: usize, theta: &[Vec<bool>]) -> BTreeSet<Vec<bool>> {
    let mut c = Composer::new();
    let m0 = c.message(SizeSpec::Fixed(2));
    let m1 = c.message(SizeSpec::Fixed(2));
    for i in 1..=n {
        let p = format!("sw{i}");
        c.add_part(&p, switch_gate());
        c.bind(&p, "M0", vec![Signal::Message(m0)]).bind(&p, "M1", vec![Signal::Message(m1)]);
    }
    c.add_part("set", set_checker(n, theta).unwrap());
    c.bind("set", "M1", vec![Signal::Message(m1)]);
    for i in 1..=n {
        for a in 0..2u8 {
            c.bind("set", &set_port(i, a), vec![Signal::output(&format!("sw{i}"), &format!("Z{a}"))]);
        }
    }
    let net = canonicalize(&c.finish().unwrap()).unwrap();
    let sols = enumerate_solutions(&net, 2, 10_000, &SolveOptions::default()).unwrap();
    assert!(sols.len() < 10_000);
    let gate = switch_gate();
    sols.iter()
        .map(|s| {
            let ev = evaluate(&net, s).unwrap();
            let col = |id: String| ev.edge(&net, &id).unwrap().to_vec();
            (1..=n)
                .map(|i| {
                    let p = format!("sw{i}");
                    let st = read_switch_state(
                        &ev.messages[0],
                        &ev.messages[1],
                        &vec![0; ev.messages[0].len()],
                        &col(gate.output_edge(&p, "Z0").unwrap()),
                        &col(gate.output_edge(&p, "Z1").unwrap()),
                    )
                    .expect("every switch is in a switch state");
                    st.theta[0]
                })
                .collect()
        })
        .collect()
}
