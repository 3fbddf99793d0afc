//! Circuits, topologies, evaluation and netlist I/O.
//!
//! A circuit is a DAG of nodes. Input nodes carry a primary-input name,
//! gate nodes carry a [`BooleanFunction`], and ancilla nodes are constant
//! sources that are not part of any basis (they are not counted as gates).
//! Every edge records the driving wire and the input slot it feeds.
//! Primary outputs are names attached to wires.

pub mod bench;
mod function;

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

pub use function::{bits_to_hex, parse_hex_bits, BooleanFunction, NaryOp, MAX_OUTPUTS, TABLE_CAP};

/// Default cap on primary inputs for exhaustive evaluation.
pub const EVAL_CAP: usize = 20;

pub type NodeId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CircuitError {
    #[error("invalid circuit: {0}")]
    Invalid(ValidationReport),
    #[error("missing value for primary input {0:?}")]
    MissingInput(String),
    #[error("{inputs} inputs exceed the evaluation cap of {cap}")]
    CapExceeded { inputs: usize, cap: usize },
    #[error("interface mismatch: {0}")]
    InterfaceMismatch(String),
    #[error("bad function: {0}")]
    BadFunction(String),
}

/// One output wire of a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Wire {
    pub node: NodeId,
    pub output: usize,
}

impl Wire {
    pub fn new(node: NodeId, output: usize) -> Self {
        Wire { node, output }
    }
}

impl From<NodeId> for Wire {
    fn from(node: NodeId) -> Self {
        Wire { node, output: 0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum NodeKind {
    Input(String),
    Gate(BooleanFunction),
    Ancilla(bool),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    /// Signal name used when writing netlists.
    pub name: Option<String>,
}

impl Node {
    pub fn output_count(&self) -> usize {
        match &self.kind {
            NodeKind::Gate(f) => f.arity_out(),
            _ => 1,
        }
    }

    pub fn function(&self) -> Option<&BooleanFunction> {
        match &self.kind {
            NodeKind::Gate(f) => Some(f),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub from: Wire,
    pub to: NodeId,
    pub slot: usize,
}

/// A combinational circuit.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    inputs: Vec<NodeId>,
    outputs: Vec<(String, Wire)>,
}

/// A single violated well-formedness condition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Cycle(Vec<NodeId>),
    EdgeOutOfRange {
        edge: usize,
    },
    InputHasFanIn {
        node: NodeId,
    },
    UndrivenGate {
        node: NodeId,
    },
    ArityMismatch {
        node: NodeId,
        in_degree: usize,
        arity: usize,
    },
    DuplicateInputName(String),
    DuplicateOutputName(String),
    UndeclaredInput {
        node: NodeId,
    },
    SlotCollision {
        node: NodeId,
        slot: usize,
    },
    SlotGap {
        node: NodeId,
        slot: usize,
    },
    BadOutputWire {
        name: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Cycle(nodes) => write!(f, "cycle through nodes {nodes:?}"),
            Violation::EdgeOutOfRange { edge } => {
                write!(f, "edge {edge} references a missing node or wire")
            }
            Violation::InputHasFanIn { node } => write!(f, "input node {node} has incoming edges"),
            Violation::UndrivenGate { node } => {
                write!(
                    f,
                    "node {node} has in-degree 0 but is neither an input nor a constant"
                )
            }
            Violation::ArityMismatch {
                node,
                in_degree,
                arity,
            } => {
                write!(
                    f,
                    "node {node} has in-degree {in_degree} but its function takes {arity} inputs"
                )
            }
            Violation::DuplicateInputName(n) => {
                write!(f, "primary input {n:?} labels more than one node")
            }
            Violation::DuplicateOutputName(n) => {
                write!(f, "primary output {n:?} labels more than one wire")
            }
            Violation::UndeclaredInput { node } => {
                write!(f, "input node {node} is not in the port list")
            }
            Violation::SlotCollision { node, slot } => {
                write!(f, "node {node} has two edges into slot {slot}")
            }
            Violation::SlotGap { node, slot } => {
                write!(f, "node {node} has no edge into slot {slot}")
            }
            Violation::BadOutputWire { name } => {
                write!(f, "output {name:?} refers to a missing wire")
            }
        }
    }
}

/// Result of [`Circuit::validate`].
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has_cycle(&self) -> bool {
        self.violations
            .iter()
            .any(|v| matches!(v, Violation::Cycle(_)))
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

impl Circuit {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_input(&mut self, name: impl Into<String>) -> NodeId {
        let name = name.into();
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind: NodeKind::Input(name.clone()),
            name: Some(name),
        });
        self.inputs.push(id);
        id
    }

    pub fn add_ancilla(&mut self, value: bool) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind: NodeKind::Ancilla(value),
            name: None,
        });
        id
    }

    /// Adds a gate wired to `inputs` in slot order.
    pub fn add_gate(&mut self, f: BooleanFunction, inputs: &[Wire]) -> NodeId {
        self.add_named_gate(f, inputs, None::<String>)
    }

    pub fn add_named_gate(
        &mut self,
        f: BooleanFunction,
        inputs: &[Wire],
        name: Option<impl Into<String>>,
    ) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(Node {
            kind: NodeKind::Gate(f),
            name: name.map(Into::into),
        });
        for (slot, &w) in inputs.iter().enumerate() {
            self.edges.push(Edge {
                from: w,
                to: id,
                slot,
            });
        }
        id
    }

    /// Adds a node without edges; used to build arbitrary (possibly invalid) graphs.
    pub fn add_node(&mut self, kind: NodeKind) -> NodeId {
        let id = self.nodes.len();
        if let NodeKind::Input(n) = &kind {
            self.inputs.push(id);
            self.nodes.push(Node {
                name: Some(n.clone()),
                kind,
            });
        } else {
            self.nodes.push(Node { kind, name: None });
        }
        id
    }

    pub fn add_edge(&mut self, from: Wire, to: NodeId, slot: usize) {
        self.edges.push(Edge { from, to, slot });
    }

    pub fn add_output(&mut self, name: impl Into<String>, wire: impl Into<Wire>) {
        self.outputs.push((name.into(), wire.into()));
    }

    pub fn set_node_name(&mut self, node: NodeId, name: impl Into<String>) {
        self.nodes[node].name = Some(name.into());
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Primary-input nodes in port order.
    pub fn input_nodes(&self) -> &[NodeId] {
        &self.inputs
    }

    pub fn input_names(&self) -> Vec<String> {
        self.inputs
            .iter()
            .map(|&n| match &self.nodes[n].kind {
                NodeKind::Input(s) => s.clone(),
                _ => String::new(),
            })
            .collect()
    }

    pub fn outputs(&self) -> &[(String, Wire)] {
        &self.outputs
    }

    pub fn output_names(&self) -> Vec<String> {
        self.outputs.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Number of gate nodes (ancillae and inputs excluded).
    pub fn gate_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| matches!(n.kind, NodeKind::Gate(_)))
            .count()
    }

    /// Gate count per function name.
    pub fn gate_histogram(&self) -> BTreeMap<String, usize> {
        let mut h = BTreeMap::new();
        for n in &self.nodes {
            if let NodeKind::Gate(f) = &n.kind {
                *h.entry(f.name().to_string()).or_insert(0) += 1;
            }
        }
        h
    }

    /// Incoming wires of `node` ordered by slot (assumes a valid circuit).
    pub fn fanin(&self, node: NodeId) -> Vec<Wire> {
        let mut ins: Vec<&Edge> = self.edges.iter().filter(|e| e.to == node).collect();
        ins.sort_by_key(|e| e.slot);
        ins.into_iter().map(|e| e.from).collect()
    }

    /// Checks acyclicity, the labeling conditions and slot injectivity.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();
        let n = self.nodes.len();
        let mut slots: Vec<Vec<usize>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            if e.to >= n
                || e.from.node >= n
                || e.from.output >= self.nodes[e.from.node].output_count()
            {
                v.push(Violation::EdgeOutOfRange { edge: i });
                continue;
            }
            slots[e.to].push(e.slot);
        }
        let declared: HashSet<NodeId> = self.inputs.iter().copied().collect();
        for (id, node) in self.nodes.iter().enumerate() {
            let indeg = slots[id].len();
            match &node.kind {
                NodeKind::Input(_) => {
                    if indeg > 0 {
                        v.push(Violation::InputHasFanIn { node: id });
                    }
                    if !declared.contains(&id) {
                        v.push(Violation::UndeclaredInput { node: id });
                    }
                }
                NodeKind::Ancilla(_) => {
                    if indeg > 0 {
                        v.push(Violation::InputHasFanIn { node: id });
                    }
                }
                NodeKind::Gate(f) => {
                    if indeg == 0 && f.arity_in() > 0 {
                        v.push(Violation::UndrivenGate { node: id });
                    } else if indeg != f.arity_in() {
                        v.push(Violation::ArityMismatch {
                            node: id,
                            in_degree: indeg,
                            arity: f.arity_in(),
                        });
                    }
                    let mut s = slots[id].clone();
                    s.sort_unstable();
                    for w in s.windows(2) {
                        if w[0] == w[1] {
                            v.push(Violation::SlotCollision {
                                node: id,
                                slot: w[0],
                            });
                        }
                    }
                    s.dedup();
                    if let Some(gap) = (0..s.len()).find(|&i| s[i] != i) {
                        v.push(Violation::SlotGap {
                            node: id,
                            slot: gap,
                        });
                    }
                }
            }
        }
        let mut seen = HashSet::new();
        for &i in &self.inputs {
            if let NodeKind::Input(name) = &self.nodes[i].kind {
                if !seen.insert(name.clone()) {
                    v.push(Violation::DuplicateInputName(name.clone()));
                }
            }
        }
        let mut seen = HashSet::new();
        for (name, w) in &self.outputs {
            if !seen.insert(name.clone()) {
                v.push(Violation::DuplicateOutputName(name.clone()));
            }
            if w.node >= n || w.output >= self.nodes[w.node].output_count() {
                v.push(Violation::BadOutputWire { name: name.clone() });
            }
        }
        if let Err(cycle) = self.topo_order_raw() {
            v.push(Violation::Cycle(cycle));
        }
        ValidationReport { violations: v }
    }

    fn topo_order_raw(&self) -> Result<Vec<NodeId>, Vec<NodeId>> {
        let n = self.nodes.len();
        let mut indeg = vec![0usize; n];
        let mut succ: Vec<Vec<NodeId>> = vec![Vec::new(); n];
        for e in &self.edges {
            if e.to < n && e.from.node < n {
                indeg[e.to] += 1;
                succ[e.from.node].push(e.to);
            }
        }
        let mut stack: Vec<NodeId> = (0..n).rev().filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(u) = stack.pop() {
            order.push(u);
            for &w in &succ[u] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    stack.push(w);
                }
            }
        }
        if order.len() == n {
            Ok(order)
        } else {
            Err((0..n).filter(|&i| indeg[i] > 0).collect())
        }
    }

    /// Node ids in a topological order; fails on invalid circuits.
    pub fn topo_order(&self) -> Result<Vec<NodeId>, CircuitError> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(CircuitError::Invalid(report));
        }
        Ok(self
            .topo_order_raw()
            .expect("validated circuits are acyclic"))
    }

    /// Evaluates the circuit on a named input assignment.
    pub fn evaluate(
        &self,
        inputs: &BTreeMap<String, bool>,
    ) -> Result<BTreeMap<String, bool>, CircuitError> {
        let names = self.input_names();
        let mut bits = Vec::with_capacity(names.len());
        for n in &names {
            bits.push(
                *inputs
                    .get(n)
                    .ok_or_else(|| CircuitError::MissingInput(n.clone()))?,
            );
        }
        let out = Evaluator::new(self)?.eval_bits(&bits);
        Ok(self.output_names().into_iter().zip(out).collect())
    }

    /// Evaluates the circuit on input bits in port order.
    pub fn evaluate_bits(&self, inputs: &[bool]) -> Result<Vec<bool>, CircuitError> {
        if inputs.len() != self.inputs.len() {
            return Err(CircuitError::InterfaceMismatch(format!(
                "expected {} input bits, got {}",
                self.inputs.len(),
                inputs.len()
            )));
        }
        Ok(Evaluator::new(self)?.eval_bits(inputs))
    }

    /// Exhaustive truth table; outputs follow the declared output order.
    pub fn truth_table(&self) -> Result<BooleanFunction, CircuitError> {
        self.truth_table_capped(EVAL_CAP)
    }

    pub fn truth_table_capped(&self, cap: usize) -> Result<BooleanFunction, CircuitError> {
        let names = self.input_names();
        let outs = self.output_names();
        self.truth_table_for(&names, &outs, cap)
    }

    /// Truth table with inputs and outputs taken in the given name orders.
    pub fn truth_table_for(
        &self,
        inputs: &[String],
        outputs: &[String],
        cap: usize,
    ) -> Result<BooleanFunction, CircuitError> {
        let m = inputs.len();
        if m > cap.min(TABLE_CAP) {
            return Err(CircuitError::CapExceeded {
                inputs: m,
                cap: cap.min(TABLE_CAP),
            });
        }
        if outputs.is_empty() || outputs.len() > MAX_OUTPUTS {
            return Err(CircuitError::InterfaceMismatch(format!(
                "{} outputs is out of range",
                outputs.len()
            )));
        }
        let ev = Evaluator::new(self)?;
        let my_inputs = self.input_names();
        let perm: Vec<usize> = my_inputs
            .iter()
            .map(|n| {
                inputs.iter().position(|x| x == n).ok_or_else(|| {
                    CircuitError::InterfaceMismatch(format!("input {n:?} not in requested order"))
                })
            })
            .collect::<Result<_, _>>()?;
        if perm.len() != m {
            return Err(CircuitError::InterfaceMismatch("input sets differ".into()));
        }
        let my_outputs = self.output_names();
        let oidx: Vec<usize> = outputs
            .iter()
            .map(|n| {
                my_outputs.iter().position(|x| x == n).ok_or_else(|| {
                    CircuitError::InterfaceMismatch(format!("output {n:?} not present"))
                })
            })
            .collect::<Result<_, _>>()?;
        let nrows = 1usize << m;
        let mut rows = vec![0u64; nrows];
        let mut words = vec![0u64; m];
        let mut base = 0usize;
        while base < nrows {
            let block = (nrows - base).min(64);
            // word for my input i is the pattern of requested position perm[i]
            for (i, w) in words.iter_mut().enumerate() {
                let shift = m - 1 - perm[i];
                let mut x = 0u64;
                for b in 0..block {
                    x |= ((((base + b) >> shift) & 1) as u64) << b;
                }
                *w = x;
            }
            let out = ev.eval_words(&words);
            for (j, &oi) in oidx.iter().enumerate() {
                let word = out[oi];
                for b in 0..block {
                    rows[base + b] |= ((word >> b) & 1) << j;
                }
            }
            base += block;
        }
        BooleanFunction::from_rows("tt", m, outputs.len(), rows)
    }

    /// Drops β and slot indices.
    pub fn topology(&self) -> Topology {
        let nodes = self
            .nodes
            .iter()
            .map(|n| match &n.kind {
                NodeKind::Input(s) => TopoNode::Input(s.clone()),
                NodeKind::Ancilla(b) => TopoNode::Ancilla(*b),
                NodeKind::Gate(f) => TopoNode::Internal {
                    outputs: f.arity_out(),
                },
            })
            .collect();
        let mut edges = self.edges.clone();
        edges.sort_by_key(|e| (e.to, e.slot));
        Topology {
            nodes,
            edges: edges.into_iter().map(|e| (e.from, e.to)).collect(),
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
        }
    }

    /// Renames ports positionally.
    pub fn with_port_names(
        &self,
        inputs: &[&str],
        outputs: &[&str],
    ) -> Result<Circuit, CircuitError> {
        if inputs.len() != self.inputs.len() || outputs.len() != self.outputs.len() {
            return Err(CircuitError::InterfaceMismatch(format!(
                "port counts {}/{} do not match {}/{}",
                inputs.len(),
                outputs.len(),
                self.inputs.len(),
                self.outputs.len()
            )));
        }
        let mut c = self.clone();
        for (&node, &name) in self.inputs.iter().zip(inputs) {
            c.nodes[node].kind = NodeKind::Input(name.to_string());
            c.nodes[node].name = Some(name.to_string());
        }
        for (o, &name) in c.outputs.iter_mut().zip(outputs) {
            o.0 = name.to_string();
        }
        Ok(c)
    }

    /// Returns a copy with node ids permuted by `perm` (`perm[old] = new`).
    pub fn permuted(&self, perm: &[NodeId]) -> Circuit {
        let mut nodes = vec![None; self.nodes.len()];
        for (old, n) in self.nodes.iter().enumerate() {
            nodes[perm[old]] = Some(n.clone());
        }
        let remap = |w: Wire| Wire::new(perm[w.node], w.output);
        Circuit {
            nodes: nodes
                .into_iter()
                .map(|n| n.expect("perm is a permutation"))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge {
                    from: remap(e.from),
                    to: perm[e.to],
                    slot: e.slot,
                })
                .collect(),
            inputs: self.inputs.iter().map(|&i| perm[i]).collect(),
            outputs: self
                .outputs
                .iter()
                .map(|(n, w)| (n.clone(), remap(*w)))
                .collect(),
        }
    }

    /// Keeps only nodes that can reach a primary output.
    pub fn without_dead_gates(&self) -> Circuit {
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<NodeId> = self.outputs.iter().map(|(_, w)| w.node).collect();
        while let Some(u) = stack.pop() {
            if live[u] {
                continue;
            }
            live[u] = true;
            for e in &self.edges {
                if e.to == u {
                    stack.push(e.from.node);
                }
            }
        }
        for &i in &self.inputs {
            live[i] = true;
        }
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut c = Circuit::new();
        for (id, n) in self.nodes.iter().enumerate() {
            if live[id] {
                map[id] = c.nodes.len();
                c.nodes.push(n.clone());
            }
        }
        c.inputs = self.inputs.iter().map(|&i| map[i]).collect();
        c.edges = self
            .edges
            .iter()
            .filter(|e| live[e.to])
            .map(|e| Edge {
                from: Wire::new(map[e.from.node], e.from.output),
                to: map[e.to],
                slot: e.slot,
            })
            .collect();
        c.outputs = self
            .outputs
            .iter()
            .map(|(n, w)| (n.clone(), Wire::new(map[w.node], w.output)))
            .collect();
        c
    }
}

/// Projection of a circuit onto its connection structure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub nodes: Vec<TopoNode>,
    /// Edges sorted by target; the order among edges of one target is the slot order of the source circuit.
    pub edges: Vec<(Wire, NodeId)>,
    pub inputs: Vec<NodeId>,
    pub outputs: Vec<(String, Wire)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TopoNode {
    Input(String),
    Internal { outputs: usize },
    Ancilla(bool),
}

impl Topology {
    pub fn internal_nodes(&self) -> Vec<NodeId> {
        (0..self.nodes.len())
            .filter(|&i| matches!(self.nodes[i], TopoNode::Internal { .. }))
            .collect()
    }

    pub fn fanin(&self, node: NodeId) -> Vec<Wire> {
        self.edges
            .iter()
            .filter(|(_, t)| *t == node)
            .map(|(w, _)| *w)
            .collect()
    }

    pub fn input_names(&self) -> Vec<String> {
        self.inputs
            .iter()
            .map(|&n| match &self.nodes[n] {
                TopoNode::Input(s) => s.clone(),
                _ => String::new(),
            })
            .collect()
    }

    pub fn output_names(&self) -> Vec<String> {
        self.outputs.iter().map(|(n, _)| n.clone()).collect()
    }

    /// Labels every internal node (in id order) with a function.
    ///
    /// A function with fewer inputs than the node's in-degree reads the first
    /// edges only; the surplus edges are dropped.
    pub fn label(&self, labels: &[BooleanFunction]) -> Result<Circuit, CircuitError> {
        let internal = self.internal_nodes();
        if internal.len() != labels.len() {
            return Err(CircuitError::InterfaceMismatch(format!(
                "{} labels for {} internal nodes",
                labels.len(),
                internal.len()
            )));
        }
        let mut c = Circuit::new();
        let mut label_of = HashMap::new();
        for (&n, f) in internal.iter().zip(labels) {
            label_of.insert(n, f.clone());
        }
        for (id, t) in self.nodes.iter().enumerate() {
            let node = match t {
                TopoNode::Input(s) => Node {
                    kind: NodeKind::Input(s.clone()),
                    name: Some(s.clone()),
                },
                TopoNode::Ancilla(b) => Node {
                    kind: NodeKind::Ancilla(*b),
                    name: None,
                },
                TopoNode::Internal { .. } => Node {
                    kind: NodeKind::Gate(label_of[&id].clone()),
                    name: None,
                },
            };
            c.nodes.push(node);
        }
        c.inputs = self.inputs.clone();
        let mut next_slot = vec![0usize; self.nodes.len()];
        for &(w, t) in &self.edges {
            let slot = next_slot[t];
            next_slot[t] += 1;
            if let Some(f) = label_of.get(&t) {
                if slot >= f.arity_in() {
                    continue;
                }
            }
            c.edges.push(Edge {
                from: w,
                to: t,
                slot,
            });
        }
        c.outputs = self.outputs.clone();
        Ok(c)
    }
}

/// Precomputed evaluation schedule for a valid circuit.
pub struct Evaluator<'a> {
    circuit: &'a Circuit,
    order: Vec<NodeId>,
    fanin: Vec<Vec<Wire>>,
    offset: Vec<usize>,
    width: usize,
}

impl<'a> Evaluator<'a> {
    pub fn new(circuit: &'a Circuit) -> Result<Self, CircuitError> {
        let order = circuit.topo_order()?;
        let mut fanin: Vec<Vec<(usize, Wire)>> = vec![Vec::new(); circuit.nodes.len()];
        for e in &circuit.edges {
            fanin[e.to].push((e.slot, e.from));
        }
        let fanin = fanin
            .into_iter()
            .map(|mut v| {
                v.sort_by_key(|x| x.0);
                v.into_iter().map(|x| x.1).collect()
            })
            .collect();
        let mut offset = Vec::with_capacity(circuit.nodes.len());
        let mut width = 0;
        for n in &circuit.nodes {
            offset.push(width);
            width += n.output_count();
        }
        Ok(Evaluator {
            circuit,
            order,
            fanin,
            offset,
            width,
        })
    }

    pub fn eval_bits(&self, inputs: &[bool]) -> Vec<bool> {
        let words: Vec<u64> = inputs.iter().map(|&b| if b { 1 } else { 0 }).collect();
        self.eval_words(&words)
            .into_iter()
            .map(|w| w & 1 == 1)
            .collect()
    }

    /// Bit-parallel evaluation: one word per primary input (port order),
    /// one word per primary output (declared order).
    pub fn eval_words(&self, inputs: &[u64]) -> Vec<u64> {
        let c = self.circuit;
        let mut val = vec![0u64; self.width];
        for (k, &node) in c.inputs.iter().enumerate() {
            val[self.offset[node]] = inputs[k];
        }
        let mut args = Vec::new();
        for &id in &self.order {
            match &c.nodes[id].kind {
                NodeKind::Input(_) => {}
                NodeKind::Ancilla(b) => val[self.offset[id]] = if *b { u64::MAX } else { 0 },
                NodeKind::Gate(f) => {
                    args.clear();
                    args.extend(
                        self.fanin[id]
                            .iter()
                            .map(|w| val[self.offset[w.node] + w.output]),
                    );
                    for j in 0..f.arity_out() {
                        val[self.offset[id] + j] = f.eval_words(&args, j);
                    }
                }
            }
        }
        c.outputs
            .iter()
            .map(|(_, w)| val[self.offset[w.node] + w.output])
            .collect()
    }
}

/// Checks that two circuits have the same port name sets.
pub fn check_same_interface(a: &Circuit, b: &Circuit) -> Result<(), CircuitError> {
    let ai: HashSet<String> = a.input_names().into_iter().collect();
    let bi: HashSet<String> = b.input_names().into_iter().collect();
    let ao: HashSet<String> = a.output_names().into_iter().collect();
    let bo: HashSet<String> = b.output_names().into_iter().collect();
    if ai != bi || a.input_names().len() != b.input_names().len() {
        return Err(CircuitError::InterfaceMismatch(
            "primary input names differ".into(),
        ));
    }
    if ao != bo || a.output_names().len() != b.output_names().len() {
        return Err(CircuitError::InterfaceMismatch(
            "primary output names differ".into(),
        ));
    }
    Ok(())
}

/// Exhaustive equivalence check by truth-table comparison.
pub fn equivalent_bruteforce(a: &Circuit, b: &Circuit) -> Result<bool, CircuitError> {
    Ok(first_difference(a, b)?.is_none())
}

/// The first input row (in `a`'s port order) on which the circuits differ.
pub fn first_difference(
    a: &Circuit,
    b: &Circuit,
) -> Result<Option<Vec<(String, bool)>>, CircuitError> {
    check_same_interface(a, b)?;
    let ins = a.input_names();
    let outs = a.output_names();
    let ta = a.truth_table_for(&ins, &outs, EVAL_CAP)?;
    let tb = b.truth_table_for(&ins, &outs, EVAL_CAP)?;
    let ra = ta.rows()?;
    let rb = tb.rows()?;
    let m = ins.len();
    Ok(ra.iter().zip(&rb).position(|(x, y)| x != y).map(|r| {
        ins.iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), (r >> (m - 1 - i)) & 1 == 1))
            .collect()
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_adder() -> Circuit {
        let mut c = Circuit::new();
        let i1 = c.add_input("i1");
        let i2 = c.add_input("i2");
        let ci = c.add_input("ci");
        let x1 = c.add_gate(BooleanFunction::xor2(), &[i1.into(), i2.into()]);
        let s = c.add_gate(BooleanFunction::xor2(), &[x1.into(), ci.into()]);
        let a1 = c.add_gate(BooleanFunction::and2(), &[i1.into(), i2.into()]);
        let a2 = c.add_gate(BooleanFunction::and2(), &[x1.into(), ci.into()]);
        let co = c.add_gate(BooleanFunction::or2(), &[a1.into(), a2.into()]);
        c.add_output("sum", s);
        c.add_output("co", co);
        c
    }

    fn eval(c: &Circuit, bits: &[(&str, bool)]) -> BTreeMap<String, bool> {
        let m = bits.iter().map(|(n, b)| (n.to_string(), *b)).collect();
        c.evaluate(&m).unwrap()
    }

    #[test]
    fn full_adder_one_plus_one() {
        let out = eval(&full_adder(), &[("i1", true), ("i2", true), ("ci", false)]);
        assert_eq!(out["sum"], false);
        assert_eq!(out["co"], true);
        let out = eval(
            &full_adder(),
            &[("i1", false), ("i2", false), ("ci", false)],
        );
        assert!(!out["sum"] && !out["co"]);
    }

    #[test]
    fn missing_input_is_an_error() {
        let m: BTreeMap<String, bool> = [("i1".to_string(), true)].into_iter().collect();
        assert!(matches!(
            full_adder().evaluate(&m),
            Err(CircuitError::MissingInput(_))
        ));
    }

    #[test]
    fn single_gate_tables() {
        for (f, hex) in [
            (BooleanFunction::and2(), "0x8"),
            (BooleanFunction::xor2(), "0x6"),
        ] {
            let mut c = Circuit::new();
            let a = c.add_input("a");
            let b = c.add_input("b");
            let g = c.add_gate(f, &[a.into(), b.into()]);
            c.add_output("y", g);
            assert_eq!(c.truth_table().unwrap().hex(0).unwrap(), hex);
        }
    }

    #[test]
    fn validate_reports_cycle_and_duplicate_names() {
        assert!(full_adder().validate().is_ok());

        let mut c = Circuit::new();
        let a = c.add_input("a");
        let g1 = c.add_node(NodeKind::Gate(BooleanFunction::and2()));
        let g2 = c.add_node(NodeKind::Gate(BooleanFunction::and2()));
        c.add_edge(a.into(), g1, 0);
        c.add_edge(g2.into(), g1, 1);
        c.add_edge(a.into(), g2, 0);
        c.add_edge(g1.into(), g2, 1);
        c.add_output("y", g2);
        assert!(c.validate().has_cycle());

        let mut c = Circuit::new();
        let a = c.add_input("x1");
        let b = c.add_input("x1");
        let g = c.add_gate(BooleanFunction::and2(), &[a.into(), b.into()]);
        c.add_output("y", g);
        let r = c.validate();
        assert!(r
            .violations
            .contains(&Violation::DuplicateInputName("x1".into())));
    }

    #[test]
    fn validate_reports_slot_collision() {
        let mut c = Circuit::new();
        let a = c.add_input("a");
        let b = c.add_input("b");
        let g = c.add_node(NodeKind::Gate(BooleanFunction::and2()));
        c.add_edge(a.into(), g, 0);
        c.add_edge(b.into(), g, 0);
        c.add_output("y", g);
        assert!(c
            .validate()
            .violations
            .contains(&Violation::SlotCollision { node: g, slot: 0 }));
    }

    #[test]
    fn topology_of_full_adder() {
        let t = full_adder().topology();
        assert_eq!(t.inputs.len(), 3);
        assert_eq!(t.internal_nodes().len(), 5);
        assert_eq!(t.outputs.len(), 2);
        let labels: Vec<BooleanFunction> = full_adder()
            .nodes()
            .iter()
            .filter_map(|n| n.function().cloned())
            .collect();
        let again = t.label(&labels).unwrap();
        assert_eq!(again.topology(), t);
    }

    #[test]
    fn truth_table_invariant_under_node_permutation() {
        let c = full_adder();
        let n = c.nodes().len();
        let perm: Vec<usize> = (0..n).map(|i| (i * 3 + 1) % n).collect();
        let p = c.permuted(&perm);
        assert_eq!(
            c.truth_table().unwrap().rows().unwrap(),
            p.truth_table().unwrap().rows().unwrap()
        );
    }

    #[test]
    fn and_vs_or_not_equivalent() {
        let mk = |f| {
            let mut c = Circuit::new();
            let a = c.add_input("a");
            let b = c.add_input("b");
            let g = c.add_gate(f, &[a.into(), b.into()]);
            c.add_output("y", g);
            c
        };
        let d =
            first_difference(&mk(BooleanFunction::and2()), &mk(BooleanFunction::or2())).unwrap();
        assert_eq!(d, Some(vec![("a".into(), false), ("b".into(), true)]));
    }
}
