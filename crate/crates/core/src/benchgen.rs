//! Generators for the ALU-n benchmark families, table-specified requirements
//! and the bundled 74XXX netlists.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use thiserror::Error;

use crate::circuit::bench::{parse_bench, BenchError};
use crate::circuit::{BooleanFunction, Circuit, CircuitError, NaryOp, Wire};

#[derive(Debug, Error)]
pub enum GenError {
    #[error("{family}: invalid n = {n} ({rule})")]
    InvalidParameter {
        family: Family,
        n: usize,
        rule: &'static str,
    },
    #[error("unknown family {0:?}")]
    UnknownFamily(String),
    #[error("unknown chip {0:?}")]
    UnknownChip(String),
    #[error(transparent)]
    Bench(#[from] BenchError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Mux,
    Demux,
    Add,
    Sub,
    Cmp,
    Shift,
    Moa,
    Mul,
}

impl Family {
    pub const ALL: [Family; 8] = [
        Family::Mux,
        Family::Demux,
        Family::Add,
        Family::Sub,
        Family::Cmp,
        Family::Shift,
        Family::Moa,
        Family::Mul,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Mux => "mux",
            Family::Demux => "demux",
            Family::Add => "add",
            Family::Sub => "sub",
            Family::Cmp => "cmp",
            Family::Shift => "shift",
            Family::Moa => "moa",
            Family::Mul => "mul",
        }
    }

    fn rule(self) -> &'static str {
        match self {
            Family::Mux | Family::Demux => "n must be a power of two, at least 2",
            Family::Moa => "n must be 2^k - 1 with k >= 2",
            Family::Mul => "n must be at least 2",
            _ => "n must be at least 1",
        }
    }

    pub fn is_valid(self, n: usize) -> bool {
        match self {
            Family::Mux | Family::Demux => n >= 2 && n.is_power_of_two(),
            Family::Moa => n >= 3 && (n + 1).is_power_of_two(),
            Family::Mul => n >= 2,
            _ => n >= 1,
        }
    }

    /// Parameters of the family that belong to the ALU-4 benchmark.
    pub fn alu4_range(self) -> Vec<usize> {
        match self {
            Family::Mux | Family::Demux => vec![2, 4],
            Family::Moa => vec![3],
            Family::Mul => vec![2, 3, 4],
            _ => vec![1, 2, 3, 4],
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.to_ascii_lowercase())
            .ok_or_else(|| GenError::UnknownFamily(s.to_string()))
    }
}

/// A family together with a validated parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FamilySpec {
    family: Family,
    n: usize,
}

impl FamilySpec {
    pub fn new(family: Family, n: usize) -> Result<Self, GenError> {
        if family.is_valid(n) {
            Ok(FamilySpec { family, n })
        } else {
            Err(GenError::InvalidParameter {
                family,
                n,
                rule: family.rule(),
            })
        }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Expected `(inputs, outputs, gates)` of the generated circuit.
    pub fn expected_size(&self) -> (usize, usize, usize) {
        let n = self.n;
        let k = log2(n + usize::from(self.family == Family::Moa));
        let p = 1usize << n.min(31);
        match self.family {
            Family::Mux => (n + k, 1, n + k + 1),
            Family::Demux => (k + 1, n, n + k),
            Family::Add => (2 * n + 1, n + 1, 5 * n),
            Family::Sub => (2 * n + 1, n + 1, 7 * n),
            Family::Cmp => (2 * n, 3, 3 * n + 4),
            Family::Shift => (p + n, p, p * (3 * n - 2) + n + 2),
            Family::Moa => (n, k, (1 << (k + 1)) * (k - 2) + (1 << k) + 3 - k),
            Family::Mul => (2 * n, 2 * n, 6 * n * n - 8 * n),
        }
    }
}

impl fmt::Display for FamilySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.n, self.family)
    }
}

fn log2(n: usize) -> usize {
    n.trailing_zeros() as usize
}

/// Generates the circuit of a family member.
pub fn gen_alu(spec: FamilySpec) -> Circuit {
    let n = spec.n;
    match spec.family {
        Family::Mux => mux(n),
        Family::Demux => demux(n),
        Family::Add => adder(n),
        Family::Sub => subtractor(n),
        Family::Cmp => comparator(n),
        Family::Shift => shifter(n),
        Family::Moa => multi_operand_adder(n),
        Family::Mul => multiplier(n),
    }
}

struct Builder {
    c: Circuit,
}

impl Builder {
    fn new() -> Self {
        Builder { c: Circuit::new() }
    }

    fn inputs(&mut self, prefix: &str, n: usize) -> Vec<Wire> {
        (0..n)
            .map(|i| self.c.add_input(format!("{prefix}{i}")).into())
            .collect()
    }

    fn op(&mut self, op: NaryOp, ins: &[Wire]) -> Wire {
        self.c
            .add_gate(BooleanFunction::nary(op, ins.len()), ins)
            .into()
    }

    fn and(&mut self, ins: &[Wire]) -> Wire {
        self.op(NaryOp::And, ins)
    }

    fn or(&mut self, ins: &[Wire]) -> Wire {
        self.op(NaryOp::Or, ins)
    }

    fn xor(&mut self, a: Wire, b: Wire) -> Wire {
        self.op(NaryOp::Xor, &[a, b])
    }

    fn not(&mut self, a: Wire) -> Wire {
        self.c.add_gate(BooleanFunction::not(), &[a]).into()
    }

    /// Returns `(sum, carry)`.
    fn half_adder(&mut self, a: Wire, b: Wire) -> (Wire, Wire) {
        (self.xor(a, b), self.and(&[a, b]))
    }

    /// Returns `(sum, carry)` with five gates.
    fn full_adder(&mut self, a: Wire, b: Wire, c: Wire) -> (Wire, Wire) {
        let x = self.xor(a, b);
        let s = self.xor(x, c);
        let g = self.and(&[a, b]);
        let p = self.and(&[x, c]);
        (s, self.or(&[g, p]))
    }

    fn outputs(mut self, prefix: &str, ws: &[Wire]) -> Self {
        for (i, &w) in ws.iter().enumerate() {
            self.c.add_output(format!("{prefix}{i}"), w);
        }
        self
    }
}

/// Select literal for bit `j` of `index`.
fn literal(sel: &[Wire], neg: &[Wire], index: usize, j: usize) -> Wire {
    if (index >> j) & 1 == 1 {
        sel[j]
    } else {
        neg[j]
    }
}

fn mux(n: usize) -> Circuit {
    let k = log2(n);
    let mut b = Builder::new();
    let d = b.inputs("d", n);
    let s = b.inputs("s", k);
    let ns: Vec<Wire> = s.iter().map(|&x| b.not(x)).collect();
    let terms: Vec<Wire> = (0..n)
        .map(|i| {
            let mut ins = vec![d[i]];
            ins.extend((0..k).map(|j| literal(&s, &ns, i, j)));
            b.and(&ins)
        })
        .collect();
    let y = b.or(&terms);
    b.outputs("y", &[y]).c
}

fn demux(n: usize) -> Circuit {
    let k = log2(n);
    let mut b = Builder::new();
    let d = b.inputs("d", 1)[0];
    let s = b.inputs("s", k);
    let ns: Vec<Wire> = s.iter().map(|&x| b.not(x)).collect();
    let ys: Vec<Wire> = (0..n)
        .map(|i| {
            let mut ins = vec![d];
            ins.extend((0..k).map(|j| literal(&s, &ns, i, j)));
            b.and(&ins)
        })
        .collect();
    b.outputs("y", &ys).c
}

fn adder(n: usize) -> Circuit {
    let mut b = Builder::new();
    let x = b.inputs("a", n);
    let y = b.inputs("b", n);
    let mut carry = b.c.add_input("cin").into();
    let mut sums = Vec::with_capacity(n);
    for i in 0..n {
        let (s, c) = b.full_adder(x[i], y[i], carry);
        sums.push(s);
        carry = c;
    }
    let mut b = b.outputs("s", &sums);
    b.c.add_output("cout", carry);
    b.c
}

fn subtractor(n: usize) -> Circuit {
    let mut b = Builder::new();
    let x = b.inputs("a", n);
    let y = b.inputs("b", n);
    let mut borrow = b.c.add_input("bin").into();
    let mut diffs = Vec::with_capacity(n);
    for i in 0..n {
        let t = b.xor(x[i], y[i]);
        diffs.push(b.xor(t, borrow));
        let na = b.not(x[i]);
        let u = b.and(&[na, y[i]]);
        let nt = b.not(t);
        let v = b.and(&[nt, borrow]);
        borrow = b.or(&[u, v]);
    }
    let mut b = b.outputs("d", &diffs);
    b.c.add_output("bout", borrow);
    b.c
}

fn comparator(n: usize) -> Circuit {
    let mut b = Builder::new();
    let x = b.inputs("a", n);
    let y = b.inputs("b", n);
    let e: Vec<Wire> = (0..n).map(|i| b.op(NaryOp::Xnor, &[x[i], y[i]])).collect();
    let mut gts = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let nb = b.not(y[i]);
        let mut ins = vec![x[i], nb];
        ins.extend(e[i + 1..].iter().rev());
        gts.push(b.and(&ins));
    }
    let eq = b.and(&e);
    let gt = b.or(&gts);
    let ge = b.or(&[eq, gt]);
    let lt = b.not(ge);
    b.c.add_output("eq", eq);
    b.c.add_output("gt", gt);
    b.c.add_output("lt", lt);
    b.c
}

/// Right barrel shifter: `n` selector bits over `2^n` data bits.
fn shifter(n: usize) -> Circuit {
    let width = 1usize << n;
    let mut b = Builder::new();
    let mut x = b.inputs("x", width);
    let s = b.inputs("s", n);
    let ns: Vec<Wire> = s.iter().map(|&w| b.not(w)).collect();
    for j in 0..n {
        let dist = 1 << j;
        x = (0..width)
            .map(|i| {
                let keep = b.and(&[ns[j], x[i]]);
                if i + dist < width {
                    let take = b.and(&[s[j], x[i + dist]]);
                    b.or(&[keep, take])
                } else {
                    // the shifted-in bit is ground
                    keep
                }
            })
            .collect();
    }
    b.outputs("y", &x).c
}

/// Population count of `n = 2^k - 1` bits by accumulating half-adder chains.
fn multi_operand_adder(n: usize) -> Circuit {
    let mut b = Builder::new();
    let x = b.inputs("x", n);
    let mut acc = vec![x[0]];
    for (t, &bit) in x.iter().enumerate().skip(1) {
        let count = t + 1;
        let grows = (usize::BITS - count.leading_zeros()) as usize > acc.len();
        let mut carry = bit;
        for j in 0..acc.len() {
            let last = j + 1 == acc.len();
            if last && !grows {
                acc[j] = b.xor(acc[j], carry);
            } else {
                let (s, c) = b.half_adder(acc[j], carry);
                acc[j] = s;
                carry = c;
            }
        }
        if grows {
            acc.push(carry);
        }
    }
    b.outputs("s", &acc).c
}

/// Array multiplier with ripple rows.
fn multiplier(n: usize) -> Circuit {
    let mut b = Builder::new();
    let x = b.inputs("a", n);
    let y = b.inputs("b", n);
    let pp: Vec<Vec<Wire>> = (0..n)
        .map(|i| (0..n).map(|j| b.and(&[x[j], y[i]])).collect())
        .collect();
    let mut product = vec![pp[0][0]];
    // running sum of weights i..i+n-1 after row i
    let mut sum: Vec<Wire> = pp[0][1..].to_vec();
    for (i, row) in pp.iter().enumerate().skip(1) {
        let mut next = Vec::with_capacity(n);
        let (s, mut carry) = b.half_adder(sum[0], row[0]);
        product.push(s);
        for j in 1..n {
            let (s, c) = if j < sum.len() {
                b.full_adder(sum[j], row[j], carry)
            } else {
                b.half_adder(row[j], carry)
            };
            next.push(s);
            carry = c;
        }
        next.push(carry);
        sum = next;
        if i + 1 == n {
            product.extend(sum.iter().copied());
        }
    }
    b.outputs("p", &product).c
}

/// A requirement given by one hex truth table per output over `m` inputs.
///
/// Inputs are `x0..`, outputs `y0..`; row `r` reads `x0` as its most
/// significant bit.
pub fn truth_table_requirement(tables: &[&str], m: usize) -> Result<Circuit, GenError> {
    let f = BooleanFunction::from_hex("TT", m, tables)?;
    let mut c = Circuit::new();
    let ins: Vec<Wire> = (0..m)
        .map(|i| c.add_input(format!("x{i}")).into())
        .collect();
    let g = c.add_gate(f, &ins);
    for j in 0..tables.len() {
        c.add_output(format!("y{j}"), Wire::new(g, j));
    }
    Ok(c)
}

/// A bitonic sorting network over `n` inputs built from CMP gates.
///
/// Outputs `y0..` are ascending: `y0` is the AND of all inputs. Sizes that
/// are not powers of two use the generalized merge that compares across the
/// largest power of two below the block length.
pub fn bitonic_sorter(n: usize) -> Circuit {
    fn cmp(c: &mut Circuit, w: &mut [Wire], i: usize, j: usize, up: bool) {
        let g = c.add_gate(BooleanFunction::comparator(), &[w[i], w[j]]);
        let (lo, hi) = (Wire::new(g, 0), Wire::new(g, 1));
        (w[i], w[j]) = if up { (lo, hi) } else { (hi, lo) };
    }
    fn merge(c: &mut Circuit, w: &mut [Wire], lo: usize, len: usize, up: bool) {
        if len < 2 {
            return;
        }
        let m = 1 << (usize::BITS - 1 - (len - 1).leading_zeros());
        for i in lo..lo + len - m {
            cmp(c, w, i, i + m, up);
        }
        merge(c, w, lo, m, up);
        merge(c, w, lo + m, len - m, up);
    }
    fn sort(c: &mut Circuit, w: &mut [Wire], lo: usize, len: usize, up: bool) {
        if len < 2 {
            return;
        }
        let m = len / 2;
        sort(c, w, lo, m, !up);
        sort(c, w, lo + m, len - m, up);
        merge(c, w, lo, len, up);
    }
    let mut c = Circuit::new();
    let mut w: Vec<Wire> = (0..n)
        .map(|i| c.add_input(format!("x{i}")).into())
        .collect();
    sort(&mut c, &mut w, 0, n, true);
    for (j, &o) in w.iter().enumerate() {
        c.add_output(format!("y{j}"), o);
    }
    c
}

/// Names of the bundled 74XXX netlists.
pub const CHIPS: [&str; 4] = ["74182", "74283", "74L85", "74181"];

/// BENCH text of a bundled chip.
pub fn chip_bench(name: &str) -> Result<&'static str, GenError> {
    Ok(match name.to_ascii_uppercase().as_str() {
        "74182" => include_str!("../data/74182.bench"),
        "74283" => include_str!("../data/74283.bench"),
        "74L85" => include_str!("../data/74L85.bench"),
        "74181" => include_str!("../data/74181.bench"),
        _ => return Err(GenError::UnknownChip(name.to_string())),
    })
}

/// A bundled chip as a circuit.
pub fn chip(name: &str) -> Result<Circuit, GenError> {
    Ok(parse_bench(chip_bench(name)?)?)
}

/// Reads a 74XXX (or any other) BENCH netlist from disk.
pub fn load_74xxx(path: impl AsRef<Path>) -> Result<Circuit, GenError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| GenError::Io {
        path: path.display().to_string(),
        source,
    })?;
    Ok(parse_bench(&text)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn size(c: &Circuit) -> (usize, usize, usize) {
        (c.input_names().len(), c.outputs().len(), c.gate_count())
    }

    #[test]
    fn parameter_rules() {
        assert!(FamilySpec::new(Family::Mux, 3).is_err());
        assert!(FamilySpec::new(Family::Mux, 1).is_err());
        assert!(FamilySpec::new(Family::Moa, 4).is_err());
        assert!(FamilySpec::new(Family::Moa, 1).is_err());
        assert!(FamilySpec::new(Family::Mul, 1).is_err());
        assert!(FamilySpec::new(Family::Add, 0).is_err());
        assert!(FamilySpec::new(Family::Moa, 15).is_ok());
    }

    #[test]
    fn alu4_sizes() {
        for f in Family::ALL {
            for n in f.alu4_range() {
                let spec = FamilySpec::new(f, n).unwrap();
                let c = gen_alu(spec);
                assert!(c.validate().is_ok(), "{spec}");
                assert_eq!(size(&c), spec.expected_size(), "{spec}");
            }
        }
    }

    #[test]
    fn larger_moa_sizes() {
        for (n, gates) in [(7, 24), (15, 79)] {
            let c = gen_alu(FamilySpec::new(Family::Moa, n).unwrap());
            assert_eq!(c.gate_count(), gates);
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("alu".parse::<Family>().is_err());
    }

    #[test]
    fn half_adder_from_tables() {
        let c = truth_table_requirement(&["6", "8"], 2).unwrap();
        assert_eq!(c.outputs().len(), 2);
        let t = c.truth_table().unwrap();
        assert_eq!(t.hex(0).unwrap(), "0x6");
        assert_eq!(t.hex(1).unwrap(), "0x8");
        assert!(truth_table_requirement(&["12D"], 3).is_err());
    }

    #[test]
    fn chips_parse_with_expected_sizes() {
        for (name, want) in CHIPS
            .iter()
            .zip([(9, 5, 19), (9, 5, 36), (11, 3, 33), (14, 8, 65)])
        {
            assert_eq!(size(&chip(name).unwrap()), want, "{name}");
        }
        assert!(chip("7400").is_err());
    }
}
