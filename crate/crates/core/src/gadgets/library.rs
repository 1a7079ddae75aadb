//! The checker and gate constructors.

use crate::entropy::InfoCondition;
use crate::network::SizeSpec;

use super::{conditionalize, conditionalize_as, Builder, Gadget, GadgetError, PortSize};

const BIT: SizeSpec = SizeSpec::Fixed(2);

fn xor(produce: bool) -> Gadget {
    let mut b = Builder::new(if produce { "xor_gate" } else { "xor_checker" });
    b.message_in("M1", BIT).unwrap();
    b.message_in("M2", BIT).unwrap();
    if produce {
        b.internal("Y", BIT, &["M1", "M2"]).unwrap();
        b.output("Y").unwrap();
    } else {
        b.signal_in("Y", PortSize::Fixed(2)).unwrap();
    }
    b.demand(&["M1"], &["Y", "M2"]).unwrap();
    b.demand(&["M2"], &["Y", "M1"]).unwrap();
    b.finish()
}

/// `Y` is accepted iff it is `M1 ⊕ M2` up to relabelling.
pub fn xor_checker() -> Gadget {
    xor(false)
}

/// Butterfly: outputs `Y = M1 ⊕ M2` up to relabelling.
pub fn xor_gate() -> Gadget {
    xor(true)
}

fn tristate(produce: bool) -> Gadget {
    let mut b = Builder::new(if produce { "tristate_gate" } else { "tristate_checker" });
    b.message_in("X", BIT).unwrap();
    b.message_in("Y", BIT).unwrap();
    if produce {
        b.internal("Z", SizeSpec::Fixed(3), &["X", "Y"]).unwrap();
        b.output("Z").unwrap();
    } else {
        b.signal_in("Z", PortSize::Fixed(3)).unwrap();
    }
    b.internal("Zt", SizeSpec::Fixed(3), &["X", "Y"]).unwrap();
    b.demand(&["Y"], &["Z"]).unwrap();
    b.demand(&["Y"], &["Zt"]).unwrap();
    b.demand(&["X"], &["Z", "Zt"]).unwrap();
    b.finish()
}

/// Size-3 `Z` that carries `X` on one value of `Y` and a third symbol on
/// the other.
pub fn tristate_checker() -> Gadget {
    tristate(false)
}

pub fn tristate_gate() -> Gadget {
    tristate(true)
}

/// `Z` (size `b+1`) together with internal `Z_2..Z_b`, each determining
/// `Y`, jointly determine `X`.
pub fn bstate_checker(b: usize) -> Result<Gadget, GadgetError> {
    if b == 0 {
        return Err(GadgetError::Parameter(format!("bstate needs b >= 1, got {b}")));
    }
    let mut g = Builder::new(&format!("bstate_checker_{b}"));
    let z = SizeSpec::Fixed(b + 1);
    g.message_in("X", BIT)?;
    g.message_in("Y", SizeSpec::Fixed(b))?;
    g.signal_in("Z", PortSize::Fixed(b + 1))?;
    let mut zs = vec!["Z".to_string()];
    for i in 2..=b {
        let name = format!("Z_{i}");
        g.internal(&name, z, &["X", "Y"])?;
        zs.push(name);
    }
    for zi in &zs {
        g.demand(&["Y"], &[zi.as_str()])?;
    }
    let all: Vec<&str> = zs.iter().map(String::as_str).collect();
    g.demand(&["X"], &all)?;
    Ok(g.finish())
}

fn switch(produce: bool) -> Gadget {
    let mut b = Builder::new(if produce { "switch_gate" } else { "switch_checker" });
    b.message_in("M0", BIT).unwrap();
    b.message_in("M1", BIT).unwrap();
    for z in ["Z0", "Z1"] {
        if produce {
            b.internal(z, BIT, &["M0", "M1"]).unwrap();
            b.output(z).unwrap();
        } else {
            b.signal_in(z, PortSize::Fixed(2)).unwrap();
        }
    }
    b.embed("S", &xor_gate(), &[("M1", "M0"), ("M2", "M1"), ("Y", "S")]).unwrap();
    b.demand(&["M0", "M1"], &["Z0", "Z1"]).unwrap();
    b.demand(&["M0", "M1"], &["Z0", "S"]).unwrap();
    b.demand(&["M0", "M1"], &["Z1", "S"]).unwrap();
    b.finish()
}

/// Accepts `(Z0, Z1)` equal to `(M0, M1)` or `(M1, M0)`, each bit up to
/// negation.
pub fn switch_checker() -> Gadget {
    switch(false)
}

pub fn switch_gate() -> Gadget {
    switch(true)
}

/// Switch whose state may depend on the condition input `W`.
pub fn cond_switch_gate(w_alphabet: usize) -> Result<Gadget, GadgetError> {
    conditionalize(&switch_gate(), w_alphabet)
}

/// Port name of output `a` of switch `i` (1-based) on a set checker.
pub fn set_port(i: usize, a: u8) -> String {
    format!("Z_{i}_{a}")
}

/// Checker on a physical array of `n` switches: states outside `theta` are
/// rejected. Ports `M1` and `Z_i_a` for switch `i`, output `a`.
pub fn set_checker(n: usize, theta: &[Vec<bool>]) -> Result<Gadget, GadgetError> {
    if n == 0 || n > 16 {
        return Err(GadgetError::Parameter(format!("set checker size {n} out of range 1..=16")));
    }
    if theta.is_empty() {
        return Err(GadgetError::Parameter("empty state set".into()));
    }
    if let Some(bad) = theta.iter().find(|t| t.len() != n) {
        return Err(GadgetError::Parameter(format!("state of length {} in a set checker of size {n}", bad.len())));
    }
    let mut g = Builder::new(&format!("set_checker_{n}"));
    g.message_in("M1", BIT)?;
    for i in 1..=n {
        for a in 0..2 {
            g.signal_in(&set_port(i, a), PortSize::Fixed(2))?;
        }
    }
    for pattern in 0..1usize << n {
        let bits: Vec<bool> = (0..n).map(|j| (pattern >> (n - 1 - j)) & 1 == 1).collect();
        if theta.contains(&bits) {
            continue;
        }
        let given: Vec<String> = bits.iter().enumerate().map(|(j, &a)| set_port(j + 1, a as u8)).collect();
        let given: Vec<&str> = given.iter().map(String::as_str).collect();
        g.demand(&["M1"], &given)?;
    }
    Ok(g.finish())
}

pub fn cond_set_checker(n: usize, theta: &[Vec<bool>], w_alphabet: usize) -> Result<Gadget, GadgetError> {
    conditionalize(&set_checker(n, theta)?, w_alphabet)
}

/// Ports `M0, M1` (messages), `Z0` (switch output) and select `W` of size
/// `b`; accepts iff the switch state is the same for every select value.
pub fn virtual_equality_checker(b: usize) -> Result<Gadget, GadgetError> {
    if b == 0 {
        return Err(GadgetError::Parameter("select alphabet must be positive".into()));
    }
    let mut g = Builder::new(&format!("virtual_equality_checker_{b}"));
    g.message_in("M0", BIT)?;
    g.message_in("M1", BIT)?;
    g.signal_in("Z0", PortSize::Fixed(2))?;
    g.signal_in("W", PortSize::Fixed(b))?;
    g.internal("G", BIT, &["Z0", "W"])?;
    g.embed("S", &xor_gate(), &[("M1", "M0"), ("M2", "M1"), ("Y", "S")])?;
    g.demand(&["M0", "M1"], &["G", "S"])?;
    Ok(g.finish())
}

/// Condition input `W1` of alphabet `b1`, select `W` of size `b2`.
pub fn cond_virtual_equality_checker(b1: usize, b2: usize) -> Result<Gadget, GadgetError> {
    conditionalize_as(&virtual_equality_checker(b2)?, "W1", b1)
}

/// Ports `M1`, `Z0` and message select `W` of size `b`; accepts iff the
/// switch is crossed for at least one select value.
pub fn virtual_or_checker(b: usize) -> Result<Gadget, GadgetError> {
    let bstate = bstate_checker(b)?;
    let mut g = Builder::new(&format!("virtual_or_checker_{b}"));
    g.message_in("M1", BIT)?;
    g.signal_in("Z0", PortSize::Fixed(2))?;
    g.message_in("W", SizeSpec::Fixed(b))?;
    g.internal("G", SizeSpec::Fixed(b + 1), &["Z0", "W"])?;
    g.embed("B", &bstate, &[("X", "M1"), ("Y", "W"), ("Z", "G")])?;
    Ok(g.finish())
}

pub fn cond_virtual_or_checker(b1: usize, b2: usize) -> Result<Gadget, GadgetError> {
    conditionalize_as(&virtual_or_checker(b2)?, "W1", b1)
}

fn cycles(produce: bool) -> Gadget {
    let mut b = Builder::new(if produce { "cycles_gate" } else { "cycles_checker" });
    b.message_in("X1", SizeSpec::Default).unwrap();
    b.message_in("U", BIT).unwrap();
    if produce {
        b.internal("X2", SizeSpec::Default, &["X1", "U"]).unwrap();
        b.output("X2").unwrap();
    } else {
        b.signal_in("X2", PortSize::Default).unwrap();
    }
    b.demand(&["U"], &["X1", "X2"]).unwrap();
    b.demand(&["X1"], &["X2", "U"]).unwrap();
    b.declare(InfoCondition::support_at_most(&["X2"], 0), true);
    b.finish()
}

/// `X2 = π_U(X1)` for two pointwise-distinct permutations `π_0, π_1`.
pub fn cycles_gate() -> Gadget {
    cycles(true)
}

pub fn cycles_checker() -> Gadget {
    cycles(false)
}
