//! Label selection miter: universal cells on a fixed topology against ψ.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::{build_universal_cell_with, circuit_into_graph, EncodeError, UniversalCell, VarAlloc};
use crate::bases::{bits_for, Basis};
use crate::circuit::{BooleanFunction, Circuit, NodeId, TopoNode, Topology};
use crate::formula::{GateGraph, Qbf2, Ref, Var};
use crate::solver::Witness;

/// `∃S ∀X` miter for one topology; cells are listed in internal-node id order.
#[derive(Clone, Debug)]
pub struct LabelMiter {
    pub qbf: Qbf2,
    pub topology: Topology,
    pub basis: Basis,
    pub nodes: Vec<NodeId>,
    pub cells: Vec<UniversalCell>,
}

/// Builds the label-selection miter.
///
/// A node may be labelled by any function with exactly its in-degree and
/// enough outputs for the output indices read from it.
pub fn create_miter(
    basis: &Basis,
    topo: &Topology,
    psi: &Circuit,
) -> Result<LabelMiter, EncodeError> {
    let mut t_in = topo.input_names();
    let mut p_in = psi.input_names();
    let mut t_out = topo.output_names();
    let mut p_out = psi.output_names();
    t_in.sort();
    p_in.sort();
    t_out.sort();
    p_out.sort();
    if t_in != p_in || t_out != p_out {
        return Err(EncodeError::InterfaceMismatch(
            "topology and requirements differ in port names".into(),
        ));
    }
    let report = psi.validate();
    if !report.is_ok() {
        return Err(EncodeError::InvalidCircuit(report));
    }

    let nodes = topo.internal_nodes();
    let mut used_out = vec![0usize; topo.nodes.len()];
    let mut indeg = vec![0usize; topo.nodes.len()];
    for &(w, t) in &topo.edges {
        used_out[w.node] = used_out[w.node].max(w.output + 1);
        indeg[t] += 1;
    }
    for (_, w) in &topo.outputs {
        used_out[w.node] = used_out[w.node].max(w.output + 1);
    }
    let mut allowed = Vec::with_capacity(nodes.len());
    for &n in &nodes {
        let a: Vec<usize> = (0..basis.len())
            .filter(|&i| {
                let f = &basis.functions()[i];
                f.arity_in() == indeg[n] && f.arity_out() >= used_out[n]
            })
            .collect();
        if a.is_empty() {
            return Err(EncodeError::Incompatible {
                node: n,
                in_degree: indeg[n],
                outputs: used_out[n],
            });
        }
        allowed.push(a);
    }

    let mut alloc = VarAlloc::new();
    let sels: Vec<Vec<Var>> = allowed
        .iter()
        .map(|a| alloc.fresh_n(bits_for(a.len())))
        .collect();
    let s: Vec<Var> = sels.iter().flatten().copied().collect();
    let x: Vec<Var> = alloc.fresh_n(topo.inputs.len());

    let mut g = GateGraph::new();
    let mut wires: Vec<Vec<Ref>> = vec![Vec::new(); topo.nodes.len()];
    for (k, &n) in topo.inputs.iter().enumerate() {
        wires[n] = vec![g.var(x[k])];
    }
    let order = topo_order(topo)
        .ok_or_else(|| EncodeError::InterfaceMismatch("topology has a cycle".into()))?;
    let cell_index: HashMap<NodeId, usize> =
        nodes.iter().enumerate().map(|(i, &n)| (n, i)).collect();
    let mut cells: Vec<Option<UniversalCell>> = vec![None; nodes.len()];
    for n in order {
        match &topo.nodes[n] {
            TopoNode::Input(_) => {}
            TopoNode::Ancilla(b) => wires[n] = vec![g.constant(*b)],
            TopoNode::Internal { .. } => {
                let i = cell_index[&n];
                let ins: Vec<Ref> = topo
                    .fanin(n)
                    .iter()
                    .map(|w| wires[w.node][w.output])
                    .collect();
                let cell =
                    build_universal_cell_with(&mut g, basis, &allowed[i], &ins, sels[i].clone());
                wires[n] = cell.outputs.clone();
                cells[i] = Some(cell);
            }
        }
    }

    // ψ reads the shared inputs by name
    let by_name: HashMap<String, Ref> = topo
        .input_names()
        .into_iter()
        .zip(topo.inputs.iter().map(|&n| wires[n][0]))
        .collect();
    let psi_ins: Vec<Ref> = psi.input_names().iter().map(|nm| by_name[nm]).collect();
    let psi_outs = circuit_into_graph(&mut g, psi, &psi_ins)?;
    let psi_by_name: HashMap<String, Ref> = psi.output_names().into_iter().zip(psi_outs).collect();
    for (name, w) in &topo.outputs {
        let phi = wires[w.node][w.output];
        let tie = g.xnor(phi, psi_by_name[name]);
        g.assert(tie);
    }

    Ok(LabelMiter {
        qbf: Qbf2 {
            matrix: g,
            s,
            x,
            z: Vec::new(),
        },
        topology: topo.clone(),
        basis: basis.clone(),
        nodes,
        cells: cells
            .into_iter()
            .map(|c| c.expect("every internal node is reached"))
            .collect(),
    })
}

fn topo_order(topo: &Topology) -> Option<Vec<NodeId>> {
    let n = topo.nodes.len();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(w, t) in &topo.edges {
        indeg[t] += 1;
        succ[w.node].push(t);
    }
    let mut ready: Vec<NodeId> = (0..n).filter(|&i| indeg[i] == 0).rev().collect();
    let mut out = Vec::with_capacity(n);
    while let Some(u) = ready.pop() {
        out.push(u);
        for &v in &succ[u] {
            indeg[v] -= 1;
            if indeg[v] == 0 {
                ready.push(v);
            }
        }
    }
    (out.len() == n).then_some(out)
}

impl LabelMiter {
    fn value_map(&self, w: &Witness) -> HashMap<Var, bool> {
        self.qbf
            .s
            .iter()
            .copied()
            .zip(w.0.iter().copied())
            .collect()
    }

    /// Basis indices chosen by a witness, per internal node.
    pub fn decode(&self, w: &Witness) -> Result<Vec<usize>, EncodeError> {
        let vals = self.value_map(w);
        self.cells
            .iter()
            .enumerate()
            .map(|(i, c)| {
                c.decode(|v| vals[&v]).ok_or_else(|| {
                    EncodeError::Undecodable(format!("cell {i} has an invalid code"))
                })
            })
            .collect()
    }

    /// The labelled circuit a witness describes.
    pub fn reconstruct(&self, w: &Witness) -> Result<Circuit, EncodeError> {
        let labels: Vec<BooleanFunction> = self
            .decode(w)?
            .into_iter()
            .map(|f| self.basis.functions()[f].clone())
            .collect();
        self.topology
            .label(&labels)
            .map_err(|e| EncodeError::Undecodable(e.to_string()))
    }

    /// Selector assignment for a labelling given as basis indices.
    pub fn witness_for_labels(&self, labels: &[usize]) -> Option<Witness> {
        if labels.len() != self.cells.len() {
            return None;
        }
        let mut vals = HashMap::new();
        for (c, &f) in self.cells.iter().zip(labels) {
            vals.extend(c.encode(f)?);
        }
        Some(Witness(self.qbf.s.iter().map(|v| vals[v]).collect()))
    }

    /// One line per selector variable.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut pos = 1;
        for (c, &n) in self.cells.iter().zip(&self.nodes) {
            let names: Vec<&str> = c
                .allowed
                .iter()
                .map(|&f| self.basis.functions()[f].name())
                .collect();
            for (b, v) in c.sel.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "s{pos} = var {v}: node {n} code bit {b} over [{}]",
                    names.join(" ")
                );
                pos += 1;
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bases::builtin_basis;
    use crate::circuit::Wire;
    use crate::formula::EXPANSION_CAP;
    use crate::solver::{solve_2qbf, Budget, QbfStatus};

    fn full_adder() -> Circuit {
        let mut c = Circuit::new();
        let a = c.add_input("a");
        let b = c.add_input("b");
        let ci = c.add_input("ci");
        let x1 = c.add_gate(BooleanFunction::xor2(), &[a.into(), b.into()]);
        let s = c.add_gate(BooleanFunction::xor2(), &[x1.into(), ci.into()]);
        let a1 = c.add_gate(BooleanFunction::and2(), &[a.into(), b.into()]);
        let a2 = c.add_gate(BooleanFunction::and2(), &[x1.into(), ci.into()]);
        let co = c.add_gate(BooleanFunction::or2(), &[a1.into(), a2.into()]);
        c.add_output("s", s);
        c.add_output("co", Wire::from(co));
        c
    }

    #[test]
    fn full_adder_miter_shape() {
        let b = builtin_basis("standard").unwrap();
        let fa = full_adder();
        let m = create_miter(&b, &fa.topology(), &fa).unwrap();
        assert_eq!(m.cells.len(), 5);
        assert_eq!(m.qbf.s.len(), 15);
        assert_eq!(m.qbf.x.len(), 3);
        m.qbf.check().unwrap();
    }

    #[test]
    fn own_labels_are_a_witness() {
        let b = builtin_basis("standard").unwrap();
        let fa = full_adder();
        let m = create_miter(&b, &fa.topology(), &fa).unwrap();
        let labels: Vec<usize> = m
            .nodes
            .iter()
            .map(|&n| b.position(fa.node(n).function().unwrap()).unwrap())
            .collect();
        let w = m.witness_for_labels(&labels).unwrap();
        let mut g = m.qbf.matrix.clone();
        for (&v, &bit) in m.qbf.s.iter().zip(&w.0) {
            let r = g.var(v);
            let l = if bit { r } else { g.not(r) };
            g.assert(l);
        }
        let q = Qbf2 {
            matrix: g,
            ..m.qbf.clone()
        };
        assert!(matches!(
            solve_2qbf(&q, &Budget::unlimited(), EXPANSION_CAP)
                .unwrap()
                .status,
            QbfStatus::Sat(_)
        ));
        assert_eq!(m.decode(&w).unwrap(), labels);
    }

    #[test]
    fn and_only_basis_cannot_label_full_adder() {
        let b = Basis::new("and", vec![BooleanFunction::and2()]).unwrap();
        let fa = full_adder();
        let m = create_miter(&b, &fa.topology(), &fa).unwrap();
        assert_eq!(
            solve_2qbf(&m.qbf, &Budget::unlimited(), EXPANSION_CAP)
                .unwrap()
                .status,
            QbfStatus::Unsat
        );
    }

    #[test]
    fn arity_mismatch_is_reported() {
        let b = builtin_basis("reversible").unwrap();
        let fa = full_adder();
        assert!(matches!(
            create_miter(&b, &fa.topology(), &fa),
            Err(EncodeError::Incompatible { .. })
        ));
    }
}
