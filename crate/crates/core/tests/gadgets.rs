mod common;

use std::collections::BTreeSet;
use std::path::PathBuf;

use fixsize_core::gadgets::*;
use fixsize_core::network::canonicalize;
use fixsize_core::solver::{enumerate_solutions, evaluate, solve_at_k, SolveOptions};

use common::checkers::*;

#[test]
fn xor_examples() {
    let g = xor_checker();
    let h = Harness::for_checker(&g);
    let xor = CandidateFunction::from_fn(&h, 1, "Y", 2, |t| t[0] ^ t[1]);
    let copy = CandidateFunction::from_fn(&h, 1, "Y", 2, |t| t[0]);
    assert_eq!(both(&g, &h, &[vec![xor], vec![copy]], 1), vec![0]);
}

#[test]
fn conditional_xor_with_one_value_matches_plain() {
    let plain = xor_checker();
    let cond = conditionalize(&plain, 1).unwrap();
    let hp = Harness::for_checker(&plain);
    let hc = Harness::for_checker(&cond);
    let fp = singletons(all_functions(&hp, 1, "Y", 2).unwrap());
    let fc = singletons(all_functions(&hc, 1, "Y", 2).unwrap());
    assert_eq!(both(&plain, &hp, &fp, 1), both(&cond, &hc, &fc, 1));
}

#[test]
fn conditional_xor_equals_slicewise_plain() {
    let plain = xor_checker();
    let cond = conditionalize(&plain, 2).unwrap();
    let hp = Harness::for_checker(&plain);
    let hc = Harness::for_checker(&cond);
    let fp = singletons(all_functions(&hp, 1, "Y", 2).unwrap());
    let ok: BTreeSet<Vec<u32>> = tables(&fp, &both(&plain, &hp, &fp, 1)).into_iter().collect();
    let fc = singletons(all_functions(&hc, 1, "Y", 2).unwrap());
    let got = both(&cond, &hc, &fc, 1);
    // Harness order is (M1, M2, W): slice w takes every other row.
    let want: Vec<usize> = (0..fc.len())
        .filter(|&i| {
            (0..2).all(|w| {
                let slice: Vec<u32> = fc[i][0].table.iter().skip(w).step_by(2).copied().collect();
                ok.contains(&slice)
            })
        })
        .collect();
    assert_eq!(got, want);
}

fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

#[test]
fn tristate_matches_golden_and_condition_oracle() {
    let g = tristate_checker();
    let h = Harness::for_checker(&g);
    let fam = singletons(all_functions(&h, 1, "Z", 3).unwrap());
    assert_eq!(fam.len(), 81);
    let acc = tables(&fam, &both(&g, &h, &fam, 1));
    // Rows are (X, Y) = 00, 01, 10, 11.
    assert!(acc.contains(&vec![2, 0, 2, 1]));
    assert!(!acc.contains(&vec![1, 1, 1, 1]));
    let path = golden_path("tristate_accepted.json");
    if std::env::var_os("UPDATE_GOLDEN").is_some() {
        std::fs::write(&path, serde_json::to_string_pretty(&acc).unwrap()).unwrap();
    }
    let frozen: Vec<Vec<u32>> = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(acc, frozen);
}

#[test]
fn bstate_two_agrees_with_tristate() {
    let t = tristate_checker();
    let b = bstate_checker(2).unwrap();
    let ht = Harness::for_checker(&t);
    let hb = Harness::for_checker(&b);
    let ft = singletons(all_functions(&ht, 1, "Z", 3).unwrap());
    let fb = singletons(all_functions(&hb, 1, "Z", 3).unwrap());
    assert_eq!(tables(&ft, &both(&t, &ht, &ft, 1)), tables(&fb, &both(&b, &hb, &fb, 1)));
}

#[test]
fn bstate_three_double_oracle() {
    let g = bstate_checker(3).unwrap();
    let h = Harness::for_checker(&g);
    let fam = singletons(all_functions(&h, 1, "Z", 4).unwrap());
    assert_eq!(fam.len(), 4096);
    let acc = both(&g, &h, &fam, 1);
    assert!(!acc.is_empty());
    // Z = Y ignores X.
    let zy = CandidateFunction::from_fn(&h, 1, "Z", 4, |t| t[1]);
    assert!(accepted_set_in(&g, &h, &[vec![zy]], 1).unwrap().is_empty());
    assert!(bstate_checker(0).is_err());
}

#[test]
fn virtual_equality_accepts_constant_states() {
    for b in 1..=3 {
        let g = virtual_equality_checker(b).unwrap();
        let h = select_harness(&["M0", "M1"], None, b);
        let fam = theta_family(&h, false, 1, b, true);
        let cands: Vec<_> = fam.iter().map(|(_, c)| c.clone()).collect();
        let acc: Vec<Vec<bool>> = both(&g, &h, &cands, 1).into_iter().map(|i| fam[i].0.clone()).collect();
        assert_eq!(acc, vec![vec![false; b], vec![true; b]], "b={b}");
    }
}

#[test]
fn virtual_or_rejects_only_the_zero_state() {
    for b in 1..=3 {
        let g = virtual_or_checker(b).unwrap();
        let h = select_harness(&["M1", "W"], None, b);
        let fam = theta_family(&h, false, 1, b, false);
        let cands: Vec<_> = fam.iter().map(|(_, c)| c.clone()).collect();
        let acc: Vec<Vec<bool>> = both(&g, &h, &cands, 1).into_iter().map(|i| fam[i].0.clone()).collect();
        let want: Vec<Vec<bool>> = fam.iter().map(|(t, _)| t.clone()).filter(|t| t.iter().any(|&x| x)).collect();
        assert_eq!(acc, want, "b={b}");
    }
}

#[test]
fn conditional_virtual_equality_checks_each_row() {
    let (b1, b2) = (2, 2);
    let g = cond_virtual_equality_checker(b1, b2).unwrap();
    let h = select_harness(&["M0", "M1", "W1"], Some(b1), b2);
    let fam = theta_family(&h, true, b1, b2, true);
    let cands: Vec<_> = fam.iter().map(|(_, c)| c.clone()).collect();
    let acc: Vec<Vec<bool>> = both(&g, &h, &cands, 1).into_iter().map(|i| fam[i].0.clone()).collect();
    let want: Vec<Vec<bool>> =
        fam.iter().map(|(t, _)| t.clone()).filter(|t| t.chunks(b2).all(|r| r.iter().all(|&x| x == r[0]))).collect();
    assert_eq!(acc, want);
    assert!(acc.contains(&vec![false, false, true, true]));
}

#[test]
fn conditional_virtual_or_checks_each_row() {
    let (b1, b2) = (2, 2);
    let g = cond_virtual_or_checker(b1, b2).unwrap();
    let h = select_harness(&["M1", "W", "W1"], Some(b1), b2);
    let fam = theta_family(&h, true, b1, b2, false);
    let cands: Vec<_> = fam.iter().map(|(_, c)| c.clone()).collect();
    let acc: Vec<Vec<bool>> = both(&g, &h, &cands, 1).into_iter().map(|i| fam[i].0.clone()).collect();
    let want: Vec<Vec<bool>> =
        fam.iter().map(|(t, _)| t.clone()).filter(|t| t.chunks(b2).all(|r| r.iter().any(|&x| x))).collect();
    assert_eq!(acc, want);
}

#[test]
fn one_hot_set_checker() {
    let theta = vec![vec![true, false, false], vec![false, true, false], vec![false, false, true]];
    let got = array_states(3, &theta);
    assert_eq!(got, theta.into_iter().collect());
}

#[test]
fn set_checker_edge_cases() {
    let both11 = array_states(2, &[vec![true, true]]);
    assert_eq!(both11, [vec![true, true]].into_iter().collect());
    let all: Vec<Vec<bool>> = (0..4).map(|i| vec![i & 2 != 0, i & 1 != 0]).collect();
    assert_eq!(set_checker(2, &all).unwrap().fragment.demands.len(), 0);
    assert_eq!(array_states(2, &all).len(), 4);
    assert!(set_checker(2, &[]).is_err());
}

#[test]
fn gates_are_solvable_and_sound() {
    for g in [xor_gate(), tristate_gate(), switch_gate(), cycles_gate()] {
        let net = canonicalize(&standalone(&g).unwrap()).unwrap();
        let k = if g.name == "cycles_gate" { 2 } else { 1 };
        assert!(solve_at_k(&net, k, &SolveOptions::default()).unwrap().is_solvable(), "{}", g.name);
    }
    // Every enumerated switch gate solution is a switch configuration.
    let net = canonicalize(&standalone(&switch_gate()).unwrap()).unwrap();
    let gate = switch_gate();
    for s in enumerate_solutions(&net, 1, 1000, &SolveOptions::default()).unwrap() {
        let ev = evaluate(&net, &s).unwrap();
        let st = read_switch_state(
            &ev.messages[0],
            &ev.messages[1],
            &[0; 4],
            ev.edge(&net, &gate.output_edge("switch_gate", "Z0").unwrap()).unwrap(),
            ev.edge(&net, &gate.output_edge("switch_gate", "Z1").unwrap()).unwrap(),
        );
        assert!(st.is_some());
    }
}

#[test]
fn conditional_switch_states_vary_with_the_condition() {
    let net = canonicalize(&standalone(&cond_switch_gate(2).unwrap()).unwrap()).unwrap();
    let gate = cond_switch_gate(2).unwrap();
    let mut seen = BTreeSet::new();
    for s in enumerate_solutions(&net, 1, 10_000, &SolveOptions::default()).unwrap() {
        let ev = evaluate(&net, &s).unwrap();
        let st = read_switch_state(
            &ev.messages[0],
            &ev.messages[1],
            &ev.messages[2],
            ev.edge(&net, &gate.output_edge("cond_switch_gate", "Z0").unwrap()).unwrap(),
            ev.edge(&net, &gate.output_edge("cond_switch_gate", "Z1").unwrap()).unwrap(),
        )
        .expect("switch configuration on every slice");
        seen.insert(st.theta);
    }
    assert_eq!(seen.len(), 4);
}

#[test]
fn xor_characterizes_parity() {
    use fixsize_core::entropy::{check, InfoCondition, UniformSupport, Variable};
    for n in 1..=3usize {
        let rows = 1usize << n;
        for y in 0..1u32 << rows {
            let mut vars: Vec<Variable> = (0..n).map(|i| Variable { name: format!("X{i}"), size: 2 }).collect();
            vars.push(Variable { name: "Y".into(), size: 2 });
            let support: Vec<Vec<u32>> = (0..rows)
                .map(|r| {
                    let mut t: Vec<u32> = (0..n).map(|i| ((r >> (n - 1 - i)) & 1) as u32).collect();
                    t.push((y >> r) & 1);
                    t
                })
                .collect();
            let d = UniformSupport::new(vars, support.clone()).unwrap();
            let ok = (0..n).all(|i| {
                let mut given: Vec<String> = (0..n).filter(|&j| j != i).map(|j| format!("X{j}")).collect();
                given.push("Y".into());
                let given: Vec<&str> = given.iter().map(String::as_str).collect();
                check(&d, &InfoCondition::determined(&[format!("X{i}").as_str()], &given)).unwrap()
            });
            let parity = support.iter().all(|t| t[..n].iter().fold(0, |a, b| a ^ b) == t[n]);
            let coparity = support.iter().all(|t| t[..n].iter().fold(1, |a, b| a ^ b) == t[n]);
            assert_eq!(ok, parity || coparity, "n={n} y={y:b}");
        }
    }
}
