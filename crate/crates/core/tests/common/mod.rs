//! Exhaustive semantic oracles shared by the integration tests.

#![allow(dead_code)]

pub mod solver;
pub mod synth;

use std::collections::BTreeMap;

use qbf_synth::benchgen::{gen_alu, Family, FamilySpec};
use qbf_synth::circuit::Circuit;

/// Runs `check` on every assignment, with named integer views of the ports.
pub struct Ports<'a> {
    ins: BTreeMap<String, bool>,
    outs: &'a BTreeMap<String, bool>,
}

impl Ports<'_> {
    pub fn word_in(&self, prefix: &str, n: usize) -> u64 {
        (0..n).fold(0, |acc, i| {
            acc | (u64::from(self.ins[&format!("{prefix}{i}")]) << i)
        })
    }
    pub fn word_out(&self, prefix: &str, n: usize) -> u64 {
        (0..n).fold(0, |acc, i| {
            acc | (u64::from(self.outs[&format!("{prefix}{i}")]) << i)
        })
    }
    pub fn bit_in(&self, name: &str) -> bool {
        self.ins[name]
    }
    pub fn bit_out(&self, name: &str) -> bool {
        self.outs[name]
    }
}

pub fn exhaust(c: &Circuit, mut check: impl FnMut(&Ports)) {
    let names = c.input_names();
    assert!(names.len() <= 20);
    for row in 0u64..(1 << names.len()) {
        let ins: BTreeMap<String, bool> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), (row >> i) & 1 == 1))
            .collect();
        let outs = c.evaluate(&ins).unwrap();
        check(&Ports { ins, outs: &outs });
    }
}

/// Checks the generated `n`-bit member of `family` against integer arithmetic on every input.
pub fn check_family(family: Family, n: usize) {
    let c = gen_alu(FamilySpec::new(family, n).unwrap());
    match family {
        Family::Add => exhaust(&c, |p| {
            let want = p.word_in("a", n) + p.word_in("b", n) + u64::from(p.bit_in("cin"));
            let got = p.word_out("s", n) | (u64::from(p.bit_out("cout")) << n);
            assert_eq!(got, want);
        }),
        Family::Sub => exhaust(&c, |p| {
            let a = p.word_in("a", n) as i64;
            let b = p.word_in("b", n) as i64;
            let diff = a - b - i64::from(p.bit_in("bin"));
            assert_eq!(p.word_out("d", n) as i64, diff.rem_euclid(1 << n));
            assert_eq!(p.bit_out("bout"), diff < 0);
        }),
        Family::Cmp => exhaust(&c, |p| {
            let a = p.word_in("a", n);
            let b = p.word_in("b", n);
            assert_eq!(p.bit_out("eq"), a == b);
            assert_eq!(p.bit_out("gt"), a > b);
            assert_eq!(p.bit_out("lt"), a < b);
        }),
        Family::Mux => {
            let k = n.trailing_zeros() as usize;
            exhaust(&c, |p| {
                let sel = p.word_in("s", k);
                assert_eq!(p.bit_out("y0"), (p.word_in("d", n) >> sel) & 1 == 1);
            })
        }
        Family::Demux => {
            let k = n.trailing_zeros() as usize;
            exhaust(&c, |p| {
                let sel = p.word_in("s", k);
                let want = if p.bit_in("d0") { 1u64 << sel } else { 0 };
                assert_eq!(p.word_out("y", n), want);
            })
        }
        Family::Shift => {
            let w = 1 << n;
            exhaust(&c, |p| {
                let amount = p.word_in("s", n);
                assert_eq!(p.word_out("y", w), p.word_in("x", w) >> amount);
            })
        }
        Family::Moa => {
            let k = (n + 1).trailing_zeros() as usize;
            exhaust(&c, |p| {
                let ones = p.word_in("x", n).count_ones() as u64;
                assert_eq!(p.word_out("s", k), ones);
            })
        }
        Family::Mul => exhaust(&c, |p| {
            assert_eq!(
                p.word_out("p", 2 * n),
                p.word_in("a", n) * p.word_in("b", n)
            );
        }),
    }
}
