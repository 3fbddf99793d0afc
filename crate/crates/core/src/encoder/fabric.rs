//! Synthesis encoding: `k` universal cells joined by a configurable fabric.
//!
//! Sources are primary inputs, ancillae and cell outputs; sinks are cell
//! input slots, primary outputs and (network mode only) garbage sinks that
//! absorb surplus lines. Entry `s_{t,i}` connects source `i` to sink `t`.
//! Cell `i` may only read sources that precede its own outputs, so every
//! configuration is acyclic by construction.

use std::collections::HashMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use super::{
    at_least_one, build_universal_cell_with, circuit_into_graph, exactly_one, none_unless,
    EncodeError, UniversalCell, VarAlloc,
};
use crate::bases::{bits_for, commuting_pairs, Basis};
use crate::circuit::{Circuit, NodeKind, Wire, EVAL_CAP};
use crate::formula::{GateGraph, Qbf2, Ref, Var};
use crate::solver::Witness;

/// Fan-out discipline of the fabric columns.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Every source is read at least once; fan-out is free.
    Circuit,
    /// Every cell output is read exactly once; primary inputs at least once.
    BooleanFunction,
    /// Every line is read exactly once.
    Network,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Circuit => "circuit",
            Mode::BooleanFunction => "boolean-function",
            Mode::Network => "network",
        })
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "circuit" => Ok(Mode::Circuit),
            "boolean-function" | "bf" => Ok(Mode::BooleanFunction),
            "network" => Ok(Mode::Network),
            _ => Err(format!(
                "unknown mode {s:?} (circuit, boolean-function, network)"
            )),
        }
    }
}

/// Ordering imposed on commuting input pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Symmetry {
    Off,
    /// The later slot reads a source no earlier than the first slot does.
    NonStrict,
    /// The later slot reads a strictly later source.
    Strict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FabricSpec {
    pub k: usize,
    pub mode: Mode,
    pub symmetry: Symmetry,
    /// Constant lines available to the cells.
    pub ancillae: Vec<bool>,
}

impl FabricSpec {
    pub fn new(k: usize, mode: Mode) -> Self {
        FabricSpec {
            k,
            mode,
            symmetry: Symmetry::NonStrict,
            ancillae: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Source {
    Input(usize),
    Ancilla(usize),
    Cell { cell: usize, output: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sink {
    Cell { cell: usize, slot: usize },
    Output(usize),
    Garbage(usize),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Input(i) => write!(f, "pi{i}"),
            Source::Ancilla(a) => write!(f, "anc{a}"),
            Source::Cell { cell, output } => write!(f, "cell{cell}.out{output}"),
        }
    }
}

impl fmt::Display for Sink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sink::Cell { cell, slot } => write!(f, "cell{cell}.in{slot}"),
            Sink::Output(o) => write!(f, "po{o}"),
            Sink::Garbage(g) => write!(f, "garbage{g}"),
        }
    }
}

/// Selector matrix; entries removed by cycle breaking are absent.
#[derive(Clone, Debug)]
pub struct Fabric {
    pub mode: Mode,
    pub sources: Vec<Source>,
    pub sinks: Vec<Sink>,
    /// Per sink, the candidate `(source index, variable)` pairs in source order.
    pub rows: Vec<Vec<(usize, Var)>>,
}

impl Fabric {
    pub fn entry(&self, sink: usize, source: usize) -> Option<Var> {
        self.rows[sink]
            .iter()
            .find(|(s, _)| *s == source)
            .map(|&(_, v)| v)
    }

    pub fn column(&self, source: usize) -> Vec<(usize, Var)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(t, row)| row.iter().find(|(s, _)| *s == source).map(|&(_, v)| (t, v)))
            .collect()
    }

    pub fn entry_count(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn source_index(&self, s: Source) -> Option<usize> {
        self.sources.iter().position(|&x| x == s)
    }

    pub fn sink_index(&self, s: Sink) -> Option<usize> {
        self.sinks.iter().position(|&x| x == s)
    }
}

/// Allocates the selector matrix for `k` cells of the basis' maximal width.
pub fn build_fabric(
    k: usize,
    num_inputs: usize,
    num_outputs: usize,
    num_ancillae: usize,
    basis: &Basis,
    mode: Mode,
    alloc: &mut VarAlloc,
) -> Fabric {
    let (w_in, w_out) = (basis.max_arity_in(), basis.max_arity_out());
    let mut sources: Vec<Source> = (0..num_inputs).map(Source::Input).collect();
    sources.extend((0..num_ancillae).map(Source::Ancilla));
    let fixed = sources.len();
    for cell in 0..k {
        sources.extend((0..w_out).map(|output| Source::Cell { cell, output }));
    }
    let mut sinks: Vec<Sink> = Vec::new();
    for cell in 0..k {
        sinks.extend((0..w_in).map(|slot| Sink::Cell { cell, slot }));
    }
    sinks.extend((0..num_outputs).map(Sink::Output));
    if mode == Mode::Network {
        let surplus = sources.len().saturating_sub(sinks.len());
        sinks.extend((0..surplus).map(Sink::Garbage));
    }
    let rows = sinks
        .iter()
        .map(|sink| {
            let visible = match sink {
                Sink::Cell { cell, .. } => fixed + cell * w_out,
                _ => sources.len(),
            };
            (0..visible).map(|s| (s, alloc.fresh())).collect()
        })
        .collect();
    Fabric {
        mode,
        sources,
        sinks,
        rows,
    }
}

/// A complete synthesis instance and the metadata to decode its witnesses.
#[derive(Clone, Debug)]
pub struct SynthEncoding {
    pub qbf: Qbf2,
    pub basis: Basis,
    pub spec: FabricSpec,
    pub fabric: Fabric,
    pub cells: Vec<UniversalCell>,
    pub input_names: Vec<String>,
    pub output_names: Vec<String>,
}

/// Encodes "some `spec.k`-cell circuit over `basis` equals `psi`".
pub fn encode_synthesis(
    basis: &Basis,
    psi: &Circuit,
    spec: &FabricSpec,
) -> Result<SynthEncoding, EncodeError> {
    let report = psi.validate();
    if !report.is_ok() {
        return Err(EncodeError::InvalidCircuit(report));
    }
    if spec.mode == Mode::Network && !basis.is_homogeneous() {
        return Err(EncodeError::HeterogeneousNetwork);
    }
    let (m, n, k) = (psi.input_nodes().len(), psi.outputs().len(), spec.k);
    let all: Vec<usize> = (0..basis.len()).collect();
    let w_out = basis.max_arity_out();

    let mut alloc = VarAlloc::new();
    let sels: Vec<Vec<Var>> = (0..k)
        .map(|_| alloc.fresh_n(bits_for(basis.len())))
        .collect();
    let fabric = build_fabric(k, m, n, spec.ancillae.len(), basis, spec.mode, &mut alloc);
    let x = alloc.fresh_n(m);
    let mut s: Vec<Var> = sels.iter().flatten().copied().collect();
    s.extend(fabric.rows.iter().flatten().map(|&(_, v)| v));

    let mut g = GateGraph::new();
    let mut value: Vec<Ref> = Vec::with_capacity(fabric.sources.len());
    for &src in &fabric.sources {
        match src {
            Source::Input(i) => value.push(g.var(x[i])),
            Source::Ancilla(a) => value.push(g.constant(spec.ancillae[a])),
            Source::Cell { .. } => break,
        }
    }
    let net = |g: &mut GateGraph, row: &[(usize, Var)], value: &[Ref]| -> Ref {
        let terms: Vec<Ref> = row
            .iter()
            .map(|&(src, v)| {
                let sv = g.var(v);
                g.and2(sv, value[src])
            })
            .collect();
        g.or(terms)
    };
    let mut cells = Vec::with_capacity(k);
    for (i, sel) in sels.iter().enumerate() {
        let ins: Vec<Ref> = (0..basis.max_arity_in())
            .map(|slot| {
                let t = fabric
                    .sink_index(Sink::Cell { cell: i, slot })
                    .expect("slot sink exists");
                net(&mut g, &fabric.rows[t], &value)
            })
            .collect();
        let cell = build_universal_cell_with(&mut g, basis, &all, &ins, sel.clone());
        value.extend((0..w_out).map(|j| cell.outputs[j]));
        cells.push(cell);
    }

    let psi_ins: Vec<Ref> = x.iter().map(|&v| g.var(v)).collect();
    let psi_outs = circuit_into_graph(&mut g, psi, &psi_ins)?;
    for (o, &want) in psi_outs.iter().enumerate() {
        let t = fabric
            .sink_index(Sink::Output(o))
            .expect("output sink exists");
        let got = net(&mut g, &fabric.rows[t], &value);
        let tie = g.xnor(got, want);
        g.assert(tie);
    }

    add_row_constraints(&mut g, basis, &fabric, &cells);
    add_column_constraints(&mut g, basis, psi, &fabric, &cells, spec.mode);
    if spec.symmetry != Symmetry::Off {
        add_symmetry_breaking(&mut g, basis, &fabric, &cells, spec.symmetry);
    }
    add_garbage_order(&mut g, &fabric);

    Ok(SynthEncoding {
        qbf: Qbf2 {
            matrix: g,
            s,
            x,
            z: Vec::new(),
        },
        basis: basis.clone(),
        spec: spec.clone(),
        fabric,
        cells,
        input_names: psi.input_names(),
        output_names: psi.output_names(),
    })
}

fn row_refs(g: &mut GateGraph, row: &[(usize, Var)]) -> Vec<Ref> {
    row.iter().map(|&(_, v)| g.var(v)).collect()
}

/// Exactly one source per used sink; unused cell slots read nothing.
fn add_row_constraints(g: &mut GateGraph, basis: &Basis, fabric: &Fabric, cells: &[UniversalCell]) {
    for (t, sink) in fabric.sinks.iter().enumerate() {
        let xs = row_refs(g, &fabric.rows[t]);
        let used = match *sink {
            Sink::Cell { cell, slot } => cells[cell].selects_any(g, basis, |f| f.arity_in() > slot),
            _ => GateGraph::TRUE,
        };
        exactly_one(g, used, &xs);
        none_unless(g, used, &xs);
    }
}

fn add_column_constraints(
    g: &mut GateGraph,
    basis: &Basis,
    psi: &Circuit,
    fabric: &Fabric,
    cells: &[UniversalCell],
    mode: Mode,
) {
    let table = psi.truth_table_capped(EVAL_CAP).ok();
    for (i, &src) in fabric.sources.iter().enumerate() {
        let col: Vec<Ref> = fabric
            .column(i)
            .into_iter()
            .map(|(_, v)| g.var(v))
            .collect();
        match src {
            Source::Input(pi) => {
                if mode == Mode::Network {
                    exactly_one(g, GateGraph::TRUE, &col);
                } else if table.as_ref().is_some_and(|f| f.depends_on(pi)) {
                    at_least_one(g, GateGraph::TRUE, &col);
                }
            }
            Source::Ancilla(_) => {
                if mode == Mode::Network {
                    exactly_one(g, GateGraph::TRUE, &col);
                }
            }
            Source::Cell { cell, output } => {
                let active = cells[cell].selects_any(g, basis, |f| f.arity_out() > output);
                none_unless(g, active, &col);
                match mode {
                    Mode::Circuit => at_least_one(g, active, &col),
                    Mode::BooleanFunction | Mode::Network => exactly_one(g, active, &col),
                }
            }
        }
    }
}

/// Orders the sources read by consecutive commuting slots of each cell.
fn add_symmetry_breaking(
    g: &mut GateGraph,
    basis: &Basis,
    fabric: &Fabric,
    cells: &[UniversalCell],
    mode: Symmetry,
) {
    let pairs: Vec<_> = basis.functions().iter().map(commuting_pairs).collect();
    let width = basis.max_arity_in();
    for (i, cell) in cells.iter().enumerate() {
        for a in 0..width.saturating_sub(1) {
            let b = a + 1;
            let hits: Vec<Ref> = cell
                .allowed
                .iter()
                .zip(&cell.decoders)
                .filter(|(&f, _)| pairs[f].contains(&(a, b)))
                .map(|(_, &d)| d)
                .collect();
            if hits.is_empty() {
                continue;
            }
            let guard = if hits.len() == cell.allowed.len() {
                GateGraph::TRUE
            } else {
                g.or(hits)
            };
            let ta = fabric
                .sink_index(Sink::Cell { cell: i, slot: a })
                .expect("slot");
            let tb = fabric
                .sink_index(Sink::Cell { cell: i, slot: b })
                .expect("slot");
            order_rows(
                g,
                guard,
                &fabric.rows[ta],
                &fabric.rows[tb],
                mode == Symmetry::Strict,
            );
        }
    }
}

/// `guard ∧ s_{b,j} → ∨_{l<j} s_{a,l}` (or `l ≤ j` when not strict).
fn order_rows(
    g: &mut GateGraph,
    guard: Ref,
    ra: &[(usize, Var)],
    rb: &[(usize, Var)],
    strict: bool,
) {
    let ng = g.not(guard);
    for (j, &(_, vb)) in rb.iter().enumerate() {
        let upto = if strict { j } else { j + 1 };
        let sb = g.var(vb);
        let nb = g.not(sb);
        let mut lits = vec![ng, nb];
        lits.extend(ra.iter().take(upto).map(|&(_, va)| g.var(va)));
        let c = g.or(lits);
        g.assert(c);
    }
}

/// Garbage sinks are interchangeable; they read strictly increasing sources.
fn add_garbage_order(g: &mut GateGraph, fabric: &Fabric) {
    let garbage: Vec<usize> = (0..fabric.sinks.len())
        .filter(|&t| matches!(fabric.sinks[t], Sink::Garbage(_)))
        .collect();
    for w in garbage.windows(2) {
        order_rows(
            g,
            GateGraph::TRUE,
            &fabric.rows[w[0]],
            &fabric.rows[w[1]],
            true,
        );
    }
}

impl SynthEncoding {
    fn values(&self, w: &Witness) -> HashMap<Var, bool> {
        self.qbf
            .s
            .iter()
            .copied()
            .zip(w.0.iter().copied())
            .collect()
    }

    fn chosen(&self, vals: &HashMap<Var, bool>, t: usize) -> Option<usize> {
        self.fabric.rows[t]
            .iter()
            .find(|(_, v)| vals[v])
            .map(|&(s, _)| s)
    }

    /// Decodes a witness into a circuit; ancillae appear only if read.
    pub fn reconstruct(&self, w: &Witness) -> Result<Circuit, EncodeError> {
        let vals = self.values(w);
        let mut c = Circuit::new();
        let inputs: Vec<usize> = self
            .input_names
            .iter()
            .map(|nm| c.add_input(nm.clone()))
            .collect();
        let mut ancilla_nodes: HashMap<usize, usize> = HashMap::new();
        let mut gate_nodes = Vec::with_capacity(self.cells.len());
        let mut wire_of = |c: &mut Circuit, src: usize, gates: &[usize]| -> Wire {
            match self.fabric.sources[src] {
                Source::Input(i) => Wire::new(inputs[i], 0),
                Source::Ancilla(a) => {
                    let id = *ancilla_nodes
                        .entry(a)
                        .or_insert_with(|| c.add_ancilla(self.spec.ancillae[a]));
                    Wire::new(id, 0)
                }
                Source::Cell { cell, output } => Wire::new(gates[cell], output),
            }
        };
        for (i, cell) in self.cells.iter().enumerate() {
            let f = cell
                .decode(|v| vals[&v])
                .ok_or_else(|| EncodeError::Undecodable(format!("cell {i} has an invalid code")))?;
            let f = self.basis.functions()[f].clone();
            let mut ins = Vec::with_capacity(f.arity_in());
            for slot in 0..f.arity_in() {
                let t = self
                    .fabric
                    .sink_index(Sink::Cell { cell: i, slot })
                    .expect("slot");
                let src = self.chosen(&vals, t).ok_or_else(|| {
                    EncodeError::Undecodable(format!("cell {i} slot {slot} is unconnected"))
                })?;
                ins.push(wire_of(&mut c, src, &gate_nodes));
            }
            gate_nodes.push(c.add_gate(f, &ins));
        }
        for (o, name) in self.output_names.iter().enumerate() {
            let t = self.fabric.sink_index(Sink::Output(o)).expect("output");
            let src = self
                .chosen(&vals, t)
                .ok_or_else(|| EncodeError::Undecodable(format!("output {name} is unconnected")))?;
            let wire = wire_of(&mut c, src, &gate_nodes);
            c.add_output(name.clone(), wire);
        }
        let report = c.validate();
        if !report.is_ok() {
            return Err(EncodeError::Undecodable(report.to_string()));
        }
        Ok(c)
    }

    /// Selector assignment describing an existing circuit with exactly `k`
    /// gates over the basis, or `None` if the fabric cannot express it.
    pub fn witness_for_circuit(&self, c: &Circuit) -> Option<Witness> {
        let order = c.topo_order().ok()?;
        let gates: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&id| matches!(c.node(id).kind, NodeKind::Gate(_)))
            .collect();
        if gates.len() != self.cells.len() || c.input_names() != self.input_names {
            return None;
        }
        let mut src_of: HashMap<(usize, usize), usize> = HashMap::new();
        for (i, &id) in c.input_nodes().iter().enumerate() {
            src_of.insert((id, 0), self.fabric.source_index(Source::Input(i))?);
        }
        let mut taken = vec![false; self.spec.ancillae.len()];
        for (id, node) in c.nodes().iter().enumerate() {
            if let NodeKind::Ancilla(b) = node.kind {
                let a = (0..taken.len()).find(|&a| !taken[a] && self.spec.ancillae[a] == b)?;
                taken[a] = true;
                src_of.insert((id, 0), self.fabric.source_index(Source::Ancilla(a))?);
            }
        }
        for (cell, &id) in gates.iter().enumerate() {
            for output in 0..c.node(id).output_count() {
                src_of.insert(
                    (id, output),
                    self.fabric.source_index(Source::Cell { cell, output })?,
                );
            }
        }
        let pairs: Vec<_> = self.basis.functions().iter().map(commuting_pairs).collect();
        let mut vals: HashMap<Var, bool> = self.qbf.s.iter().map(|&v| (v, false)).collect();
        let mut read = vec![false; self.fabric.sources.len()];
        let mut connect = |vals: &mut HashMap<Var, bool>, sink: Sink, src: usize| -> Option<()> {
            let t = self.fabric.sink_index(sink)?;
            vals.insert(self.fabric.entry(t, src)?, true);
            read[src] = true;
            Some(())
        };
        for (cell, &id) in gates.iter().enumerate() {
            let f = c.node(id).function()?;
            let code = self.basis.position(f)?;
            vals.extend(self.cells[cell].encode(code)?);
            let mut ins: Vec<usize> = c
                .fanin(id)
                .iter()
                .map(|w| src_of.get(&(w.node, w.output)).copied())
                .collect::<Option<_>>()?;
            if self.spec.symmetry != Symmetry::Off {
                // bubble commuting neighbours into source order
                for _ in 0..ins.len() {
                    for a in 0..ins.len().saturating_sub(1) {
                        if pairs[code].contains(&(a, a + 1)) && ins[a] > ins[a + 1] {
                            ins.swap(a, a + 1);
                        }
                    }
                }
            }
            for (slot, &src) in ins.iter().enumerate() {
                connect(&mut vals, Sink::Cell { cell, slot }, src)?;
            }
        }
        for (o, name) in self.output_names.iter().enumerate() {
            let (_, w) = c.outputs().iter().find(|(n, _)| n == name)?;
            connect(
                &mut vals,
                Sink::Output(o),
                *src_of.get(&(w.node, w.output))?,
            )?;
        }
        let garbage: Vec<usize> = (0..self.fabric.sinks.len())
            .filter(|&t| matches!(self.fabric.sinks[t], Sink::Garbage(_)))
            .collect();
        if !garbage.is_empty() {
            let mut spare = (0..read.len()).filter(|&s| {
                let live = match self.fabric.sources[s] {
                    Source::Cell { cell, output } => output < c.node(gates[cell]).output_count(),
                    _ => true,
                };
                live && !read[s]
            });
            for &t in &garbage {
                let s = spare.next()?;
                vals.insert(self.fabric.entry(t, s)?, true);
            }
        }
        Some(Witness(self.qbf.s.iter().map(|v| vals[v]).collect()))
    }

    /// One line per outer variable with its meaning.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let mut pos = 1;
        for (i, cell) in self.cells.iter().enumerate() {
            for (b, v) in cell.sel.iter().enumerate() {
                let _ = writeln!(out, "s{pos} = var {v}: cell{i} code bit {b}");
                pos += 1;
            }
        }
        for (t, row) in self.fabric.rows.iter().enumerate() {
            for &(src, v) in row {
                let _ = writeln!(
                    out,
                    "s{pos} = var {v}: {} <- {}",
                    self.fabric.sinks[t], self.fabric.sources[src]
                );
                pos += 1;
            }
        }
        out
    }
}
