//! Encodings of label selection and synthesis as `∃S ∀X` miters.

mod fabric;
mod miter;

use thiserror::Error;

pub use fabric::{
    build_fabric, encode_synthesis, Fabric, FabricSpec, Mode, Sink, Source, Symmetry, SynthEncoding,
};
pub use miter::{create_miter, LabelMiter};

use crate::bases::{bits_for, Basis};
use crate::circuit::{BooleanFunction, Circuit, NaryOp, NodeId, NodeKind, ValidationReport};
use crate::formula::{GateGraph, Ref, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("no basis function fits node {node} (in-degree {in_degree}, {outputs} outputs used)")]
    Incompatible {
        node: NodeId,
        in_degree: usize,
        outputs: usize,
    },
    #[error("invalid requirements circuit: {0}")]
    InvalidCircuit(ValidationReport),
    #[error("network mode needs a basis whose functions share one arity")]
    HeterogeneousNetwork,
    #[error("witness does not decode: {0}")]
    Undecodable(String),
}

/// Sequential variable numbering from 1.
#[derive(Clone, Debug)]
pub struct VarAlloc {
    next: Var,
}

impl Default for VarAlloc {
    fn default() -> Self {
        Self::new()
    }
}

impl VarAlloc {
    pub fn new() -> Self {
        VarAlloc { next: 1 }
    }

    pub fn fresh(&mut self) -> Var {
        let v = self.next;
        self.next += 1;
        v
    }

    pub fn fresh_n(&mut self, n: usize) -> Vec<Var> {
        (0..n).map(|_| self.fresh()).collect()
    }

    pub fn count(&self) -> usize {
        self.next as usize - 1
    }
}

/// Builds `f(inputs)`; only the first `f.arity_in()` inputs are read.
pub fn apply_function(g: &mut GateGraph, f: &BooleanFunction, inputs: &[Ref]) -> Vec<Ref> {
    let m = f.arity_in();
    let ins = &inputs[..m];
    if let Some(op) = f.nary_op() {
        let r = match op {
            NaryOp::And => g.and(ins.iter().copied()),
            NaryOp::Or => g.or(ins.iter().copied()),
            NaryOp::Nand => {
                let a = g.and(ins.iter().copied());
                g.not(a)
            }
            NaryOp::Nor => {
                let a = g.or(ins.iter().copied());
                g.not(a)
            }
            NaryOp::Xor | NaryOp::Xnor => {
                let mut acc = GateGraph::FALSE;
                for &x in ins {
                    acc = g.xor(acc, x);
                }
                if op == NaryOp::Xnor {
                    g.not(acc)
                } else {
                    acc
                }
            }
        };
        return vec![r];
    }
    let rows = f.rows().expect("table functions are within the cap");
    (0..f.arity_out())
        .map(|j| shannon(g, &rows, j, ins, 0, 0))
        .collect()
}

/// Shannon expansion of output `j` over `ins[depth..]` with the row prefix fixed.
fn shannon(
    g: &mut GateGraph,
    rows: &[u64],
    j: usize,
    ins: &[Ref],
    depth: usize,
    prefix: usize,
) -> Ref {
    if depth == ins.len() {
        return g.constant((rows[prefix] >> j) & 1 == 1);
    }
    // a constant input picks one branch without building the other
    if let Some(b) = g.const_value(ins[depth]) {
        return shannon(g, rows, j, ins, depth + 1, (prefix << 1) | b as usize);
    }
    let lo = shannon(g, rows, j, ins, depth + 1, prefix << 1);
    let hi = shannon(g, rows, j, ins, depth + 1, (prefix << 1) | 1);
    g.mux(ins[depth], hi, lo)
}

/// Selector literals matching `code`; `sel[b]` carries bit `b`.
fn code_literals(g: &mut GateGraph, sel: &[Ref], code: usize) -> Vec<Ref> {
    sel.iter()
        .enumerate()
        .map(|(b, &s)| if (code >> b) & 1 == 1 { s } else { g.not(s) })
        .collect()
}

/// `n`-way multiplexer: one AND term per data wire over the matching
/// selector literals, and one OR. `sel` must have `ceil(log2 n)` lines.
pub fn build_multiplexer(g: &mut GateGraph, data: &[Ref], sel: &[Ref]) -> Ref {
    assert!(!data.is_empty());
    assert_eq!(
        sel.len(),
        bits_for(data.len()),
        "selector width must be ceil(log2 n)"
    );
    if data.len() == 1 {
        return data[0];
    }
    let terms: Vec<Ref> = data
        .iter()
        .enumerate()
        .map(|(code, &d)| {
            let mut lits = code_literals(g, sel, code);
            lits.push(d);
            g.and(lits)
        })
        .collect();
    g.or(terms)
}

/// A cell that realizes any of the `allowed` basis functions.
///
/// Local selector code `c` picks `basis[allowed[c]]`; codes at or above
/// `allowed.len()` are blocked by clauses.
#[derive(Clone, Debug)]
pub struct UniversalCell {
    pub sel: Vec<Var>,
    pub allowed: Vec<usize>,
    /// `decoders[c]` is true iff local code `c` is selected.
    pub decoders: Vec<Ref>,
    pub outputs: Vec<Ref>,
}

impl UniversalCell {
    /// True iff the selected function satisfies `pred`.
    pub fn selects_any(
        &self,
        g: &mut GateGraph,
        basis: &Basis,
        pred: impl Fn(&BooleanFunction) -> bool,
    ) -> Ref {
        let hits: Vec<Ref> = self
            .allowed
            .iter()
            .zip(&self.decoders)
            .filter(|(&f, _)| pred(&basis.functions()[f]))
            .map(|(_, &d)| d)
            .collect();
        if hits.len() == self.allowed.len() {
            GateGraph::TRUE
        } else {
            g.or(hits)
        }
    }

    /// Decodes the selector bits of a witness to a basis index.
    pub fn decode(&self, value: impl Fn(Var) -> bool) -> Option<usize> {
        let code = self
            .sel
            .iter()
            .enumerate()
            .fold(0usize, |acc, (b, &v)| acc | ((value(v) as usize) << b));
        self.allowed.get(code).copied()
    }

    /// Selector assignment for basis index `f`.
    pub fn encode(&self, f: usize) -> Option<Vec<(Var, bool)>> {
        let code = self.allowed.iter().position(|&a| a == f)?;
        Some(
            self.sel
                .iter()
                .enumerate()
                .map(|(b, &v)| (v, (code >> b) & 1 == 1))
                .collect(),
        )
    }
}

/// Instantiates every allowed function on the shared `inputs` and routes
/// each output position through a multiplexer.
pub fn build_universal_cell(
    g: &mut GateGraph,
    basis: &Basis,
    allowed: &[usize],
    inputs: &[Ref],
    alloc: &mut VarAlloc,
) -> UniversalCell {
    let sel = alloc.fresh_n(bits_for(allowed.len()));
    build_universal_cell_with(g, basis, allowed, inputs, sel)
}

pub(crate) fn build_universal_cell_with(
    g: &mut GateGraph,
    basis: &Basis,
    allowed: &[usize],
    inputs: &[Ref],
    sel: Vec<Var>,
) -> UniversalCell {
    assert!(!allowed.is_empty());
    assert_eq!(sel.len(), bits_for(allowed.len()));
    let sel_refs: Vec<Ref> = sel.iter().map(|&v| g.var(v)).collect();
    for code in allowed.len()..(1usize << sel.len()) {
        let lits: Vec<Ref> = code_literals(g, &sel_refs, code)
            .into_iter()
            .map(|l| g.not(l))
            .collect();
        let block = g.or(lits);
        g.assert(block);
    }
    let decoders: Vec<Ref> = (0..allowed.len())
        .map(|c| {
            let lits = code_literals(g, &sel_refs, c);
            g.and(lits)
        })
        .collect();
    let width_out = allowed
        .iter()
        .map(|&f| basis.functions()[f].arity_out())
        .max()
        .unwrap_or(1);
    let values: Vec<Vec<Ref>> = allowed
        .iter()
        .map(|&f| apply_function(g, &basis.functions()[f], inputs))
        .collect();
    let outputs = (0..width_out)
        .map(|j| {
            if allowed.len() == 1 {
                return values[0].get(j).copied().unwrap_or(GateGraph::FALSE);
            }
            let terms: Vec<Ref> = values
                .iter()
                .zip(&decoders)
                .map(|(v, &d)| {
                    let x = v.get(j).copied().unwrap_or(GateGraph::FALSE);
                    g.and2(d, x)
                })
                .collect();
            g.or(terms)
        })
        .collect();
    UniversalCell {
        sel,
        allowed: allowed.to_vec(),
        decoders,
        outputs,
    }
}

/// Builds a circuit over `inputs` (port order); returns output refs in declared order.
pub fn circuit_into_graph(
    g: &mut GateGraph,
    c: &Circuit,
    inputs: &[Ref],
) -> Result<Vec<Ref>, EncodeError> {
    let order = c.topo_order().map_err(|e| match e {
        crate::circuit::CircuitError::Invalid(r) => EncodeError::InvalidCircuit(r),
        other => EncodeError::InterfaceMismatch(other.to_string()),
    })?;
    let mut wires: Vec<Vec<Ref>> = vec![Vec::new(); c.nodes().len()];
    for (k, &n) in c.input_nodes().iter().enumerate() {
        wires[n] = vec![inputs[k]];
    }
    for id in order {
        match &c.node(id).kind {
            NodeKind::Input(_) => {}
            NodeKind::Ancilla(b) => wires[id] = vec![g.constant(*b)],
            NodeKind::Gate(f) => {
                let ins: Vec<Ref> = c
                    .fanin(id)
                    .iter()
                    .map(|w| wires[w.node][w.output])
                    .collect();
                wires[id] = apply_function(g, f, &ins);
            }
        }
    }
    Ok(c.outputs()
        .iter()
        .map(|(_, w)| wires[w.node][w.output])
        .collect())
}

/// Asserts at least one of `xs` when `cond` holds.
pub fn at_least_one(g: &mut GateGraph, cond: Ref, xs: &[Ref]) {
    let nc = g.not(cond);
    let c = g.or(std::iter::once(nc).chain(xs.iter().copied()));
    g.assert(c);
}

/// Pairwise at-most-one.
pub fn at_most_one(g: &mut GateGraph, xs: &[Ref]) {
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let both = g.and2(xs[i], xs[j]);
            let c = g.not(both);
            g.assert(c);
        }
    }
}

/// Exactly one of `xs` when `cond` holds.
pub fn exactly_one(g: &mut GateGraph, cond: Ref, xs: &[Ref]) {
    at_least_one(g, cond, xs);
    at_most_one(g, xs);
}

/// Forces every `xs` false unless `cond` holds.
pub fn none_unless(g: &mut GateGraph, cond: Ref, xs: &[Ref]) {
    if cond == GateGraph::TRUE {
        return;
    }
    for &x in xs {
        let c = g.implies(x, cond);
        g.assert(c);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::builtin_basis;
    use crate::formula::GNode;

    #[test]
    fn multiplexer_structure_and_behaviour() {
        let mut g = GateGraph::new();
        let data: Vec<Ref> = (1..=4).map(|v| g.var(v)).collect();
        let sel: Vec<Ref> = (5..=6).map(|v| g.var(v)).collect();
        let before = g.len();
        let out = build_multiplexer(&mut g, &data, &sel);
        let new: Vec<&GNode> = (before..g.len()).map(|r| g.node(r as Ref)).collect();
        assert_eq!(new.iter().filter(|n| matches!(n, GNode::Not(_))).count(), 2);
        assert_eq!(new.iter().filter(|n| matches!(n, GNode::And(_))).count(), 4);
        assert_eq!(new.iter().filter(|n| matches!(n, GNode::Or(_))).count(), 1);
        for bits in 0..64u32 {
            let asg: Vec<bool> = (0..=6)
                .map(|v| v > 0 && (bits >> (v - 1)) & 1 == 1)
                .collect();
            let code = (bits >> 4) as usize & 3;
            assert_eq!(g.eval(out, &asg), asg[1 + code]);
        }
        let mut g = GateGraph::new();
        let d = g.var(1);
        assert_eq!(build_multiplexer(&mut g, &[d], &[]), d);
    }

    #[test]
    fn multiplexer_of_eight_is_exhaustively_correct() {
        let mut g = GateGraph::new();
        let data: Vec<Ref> = (1..=8).map(|v| g.var(v)).collect();
        let sel: Vec<Ref> = (9..=11).map(|v| g.var(v)).collect();
        let out = build_multiplexer(&mut g, &data, &sel);
        for bits in 0..(1u32 << 11) {
            let asg: Vec<bool> = (0..=11)
                .map(|v| v > 0 && (bits >> (v - 1)) & 1 == 1)
                .collect();
            let code = (bits >> 8) as usize;
            assert_eq!(g.eval(out, &asg), asg[1 + code]);
        }
    }

    /// Every valid code reproduces its function on every row.
    fn check_cell_fidelity(name: &str) {
        let b = builtin_basis(name).unwrap();
        let mut g = GateGraph::new();
        let m = b.max_arity_in();
        let inputs: Vec<Ref> = (1..=m as Var).map(|v| g.var(v)).collect();
        let mut alloc = VarAlloc { next: m as Var + 1 };
        let all: Vec<usize> = (0..b.len()).collect();
        let cell = build_universal_cell(&mut g, &b, &all, &inputs, &mut alloc);
        assert_eq!(cell.sel.len(), bits_for(b.len()));
        for (code, f) in b.functions().iter().enumerate() {
            for row in 0..1usize << m {
                let mut asg = vec![false; alloc.count() + 1];
                for i in 0..m {
                    asg[1 + i] = (row >> (m - 1 - i)) & 1 == 1;
                }
                for (bit, &v) in cell.sel.iter().enumerate() {
                    asg[v as usize] = (code >> bit) & 1 == 1;
                }
                let vals = g.eval_all(&asg);
                assert!(g.assertions().iter().all(|&a| vals[a as usize]));
                let expect = f.eval(&asg[1..1 + f.arity_in()]);
                for (j, e) in expect.iter().enumerate() {
                    assert_eq!(
                        vals[cell.outputs[j] as usize],
                        *e,
                        "{name} {} row {row}",
                        f.name()
                    );
                }
            }
        }
        // invalid codes violate an assertion
        for code in b.len()..(1usize << cell.sel.len()) {
            let mut asg = vec![false; alloc.count() + 1];
            for (bit, &v) in cell.sel.iter().enumerate() {
                asg[v as usize] = (code >> bit) & 1 == 1;
            }
            assert!(!g.satisfied(&asg));
        }
    }

    #[test]
    fn universal_cells_reproduce_every_function() {
        for name in ["standard", "reversible", "comparator", "ite", "nand", "nor"] {
            check_cell_fidelity(name);
        }
    }

    #[test]
    fn cell_widths() {
        let mut g = GateGraph::new();
        let ins: Vec<Ref> = (1..=3).map(|v| g.var(v)).collect();
        let mut alloc = VarAlloc { next: 4 };
        let r = builtin_basis("reversible").unwrap();
        let c = build_universal_cell(&mut g, &r, &[0, 1], &ins, &mut alloc);
        assert_eq!((c.sel.len(), c.outputs.len()), (1, 3));
        let n = builtin_basis("nand").unwrap();
        let c = build_universal_cell(&mut g, &n, &[0], &ins, &mut alloc);
        assert_eq!((c.sel.len(), c.outputs.len()), (0, 1));
    }
}
