//! Hash-consed gate graphs with constant folding, and their Tseitin encoding.

use std::collections::HashMap;

use super::{Cnf, Lit, Var};

/// Index of a node in a [`GateGraph`]. Children always have smaller indices.
pub type Ref = u32;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GNode {
    Const(bool),
    Var(Var),
    Not(Ref),
    And(Vec<Ref>),
    Or(Vec<Ref>),
    Xor(Ref, Ref),
    /// `Mux(s, t, e)` is `s ? t : e`.
    Mux(Ref, Ref, Ref),
}

/// A structural formula. The asserted roots form a conjunction.
///
/// The smart constructors fold constants and trivial identities and share
/// structurally equal nodes; `add_raw` bypasses both.
#[derive(Clone, Debug)]
pub struct GateGraph {
    nodes: Vec<GNode>,
    table: HashMap<GNode, Ref>,
    assertions: Vec<Ref>,
    max_var: Var,
}

impl Default for GateGraph {
    fn default() -> Self {
        Self::new()
    }
}

impl GateGraph {
    pub const FALSE: Ref = 0;
    pub const TRUE: Ref = 1;

    pub fn new() -> Self {
        let mut g = GateGraph {
            nodes: Vec::new(),
            table: HashMap::new(),
            assertions: Vec::new(),
            max_var: 0,
        };
        g.intern(GNode::Const(false));
        g.intern(GNode::Const(true));
        g
    }

    fn intern(&mut self, n: GNode) -> Ref {
        if let Some(&r) = self.table.get(&n) {
            return r;
        }
        let r = self.nodes.len() as Ref;
        self.nodes.push(n.clone());
        self.table.insert(n, r);
        r
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.len() <= 2
    }

    pub fn node(&self, r: Ref) -> &GNode {
        &self.nodes[r as usize]
    }

    pub fn max_var(&self) -> Var {
        self.max_var
    }

    pub fn assertions(&self) -> &[Ref] {
        &self.assertions
    }

    pub fn assert(&mut self, r: Ref) {
        self.assertions.push(r);
    }

    /// Adds a node verbatim, without folding or sharing.
    pub fn add_raw(&mut self, n: GNode) -> Ref {
        let r = self.nodes.len() as Ref;
        let ok = match &n {
            GNode::Const(_) => true,
            GNode::Var(v) => {
                self.max_var = self.max_var.max(*v);
                *v >= 1
            }
            GNode::Not(a) => *a < r,
            GNode::And(cs) | GNode::Or(cs) => cs.iter().all(|&c| c < r),
            GNode::Xor(a, b) => *a < r && *b < r,
            GNode::Mux(s, t, e) => *s < r && *t < r && *e < r,
        };
        assert!(ok, "raw node refers to a missing child or variable 0");
        self.nodes.push(n);
        r
    }

    pub fn constant(&self, b: bool) -> Ref {
        if b {
            Self::TRUE
        } else {
            Self::FALSE
        }
    }

    pub fn const_value(&self, r: Ref) -> Option<bool> {
        match self.nodes[r as usize] {
            GNode::Const(b) => Some(b),
            _ => None,
        }
    }

    pub fn var(&mut self, v: Var) -> Ref {
        assert!(v >= 1, "variables are numbered from 1");
        self.max_var = self.max_var.max(v);
        self.intern(GNode::Var(v))
    }

    pub fn not(&mut self, a: Ref) -> Ref {
        match self.nodes[a as usize] {
            GNode::Const(b) => self.constant(!b),
            GNode::Not(x) => x,
            _ => self.intern(GNode::Not(a)),
        }
    }

    /// The node `a` negates, if `a` is a negation.
    fn negated(&self, a: Ref) -> Option<Ref> {
        match self.nodes[a as usize] {
            GNode::Not(x) => Some(x),
            _ => None,
        }
    }

    fn complementary(&self, a: Ref, b: Ref) -> bool {
        self.negated(a) == Some(b) || self.negated(b) == Some(a)
    }

    pub fn and(&mut self, xs: impl IntoIterator<Item = Ref>) -> Ref {
        self.junction(xs, true)
    }

    pub fn or(&mut self, xs: impl IntoIterator<Item = Ref>) -> Ref {
        self.junction(xs, false)
    }

    fn junction(&mut self, xs: impl IntoIterator<Item = Ref>, is_and: bool) -> Ref {
        let (unit, zero) = if is_and {
            (Self::TRUE, Self::FALSE)
        } else {
            (Self::FALSE, Self::TRUE)
        };
        let mut cs: Vec<Ref> = Vec::new();
        for x in xs {
            if x == zero {
                return zero;
            }
            if x != unit {
                cs.push(x);
            }
        }
        cs.sort_unstable();
        cs.dedup();
        for &c in &cs {
            if let Some(n) = self.negated(c) {
                if cs.binary_search(&n).is_ok() {
                    return zero;
                }
            }
        }
        match cs.len() {
            0 => unit,
            1 => cs[0],
            _ => self.intern(if is_and {
                GNode::And(cs)
            } else {
                GNode::Or(cs)
            }),
        }
    }

    pub fn and2(&mut self, a: Ref, b: Ref) -> Ref {
        self.and([a, b])
    }

    pub fn or2(&mut self, a: Ref, b: Ref) -> Ref {
        self.or([a, b])
    }

    pub fn implies(&mut self, a: Ref, b: Ref) -> Ref {
        let na = self.not(a);
        self.or([na, b])
    }

    pub fn xor(&mut self, a: Ref, b: Ref) -> Ref {
        match (self.const_value(a), self.const_value(b)) {
            (Some(x), Some(y)) => return self.constant(x ^ y),
            (Some(false), None) => return b,
            (None, Some(false)) => return a,
            (Some(true), None) => return self.not(b),
            (None, Some(true)) => return self.not(a),
            _ => {}
        }
        if a == b {
            return Self::FALSE;
        }
        if self.complementary(a, b) {
            return Self::TRUE;
        }
        // keep negations on the outside so that equal parities share nodes
        let (a, na) = match self.negated(a) {
            Some(x) => (x, true),
            None => (a, false),
        };
        let (b, nb) = match self.negated(b) {
            Some(x) => (x, true),
            None => (b, false),
        };
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let x = self.intern(GNode::Xor(lo, hi));
        if na ^ nb {
            self.not(x)
        } else {
            x
        }
    }

    pub fn xnor(&mut self, a: Ref, b: Ref) -> Ref {
        let x = self.xor(a, b);
        self.not(x)
    }

    pub fn iff(&mut self, a: Ref, b: Ref) -> Ref {
        self.xnor(a, b)
    }

    /// `s ? t : e`
    pub fn mux(&mut self, s: Ref, t: Ref, e: Ref) -> Ref {
        if let Some(b) = self.const_value(s) {
            return if b { t } else { e };
        }
        if t == e {
            return t;
        }
        if let Some(ns) = self.negated(s) {
            return self.mux(ns, e, t);
        }
        match (self.const_value(t), self.const_value(e)) {
            (Some(true), Some(false)) => return s,
            (Some(false), Some(true)) => return self.not(s),
            (Some(false), None) => {
                let ns = self.not(s);
                return self.and([ns, e]);
            }
            (Some(true), None) => return self.or([s, e]),
            (None, Some(false)) => return self.and([s, t]),
            (None, Some(true)) => {
                let ns = self.not(s);
                return self.or([ns, t]);
            }
            _ => {}
        }
        if self.complementary(t, e) {
            return self.xor(s, e);
        }
        if t == s {
            return self.or([s, e]);
        }
        if e == s {
            return self.and([s, t]);
        }
        self.intern(GNode::Mux(s, t, e))
    }

    /// Evaluates every node; `assignment` is indexed by variable and must
    /// cover `max_var`.
    pub fn eval_all(&self, assignment: &[bool]) -> Vec<bool> {
        let mut v: Vec<bool> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let x = match n {
                GNode::Const(b) => *b,
                GNode::Var(x) => assignment[*x as usize],
                GNode::Not(a) => !v[*a as usize],
                GNode::And(cs) => cs.iter().all(|&c| v[c as usize]),
                GNode::Or(cs) => cs.iter().any(|&c| v[c as usize]),
                GNode::Xor(a, b) => v[*a as usize] ^ v[*b as usize],
                GNode::Mux(s, t, e) => {
                    if v[*s as usize] {
                        v[*t as usize]
                    } else {
                        v[*e as usize]
                    }
                }
            };
            v.push(x);
        }
        v
    }

    pub fn eval(&self, r: Ref, assignment: &[bool]) -> bool {
        self.eval_all(assignment)[r as usize]
    }

    /// True iff every assertion holds.
    pub fn satisfied(&self, assignment: &[bool]) -> bool {
        let v = self.eval_all(assignment);
        self.assertions.iter().all(|&r| v[r as usize])
    }

    /// Variables occurring in nodes reachable from the assertions, sorted.
    pub fn support(&self) -> Vec<Var> {
        let live = self.reachable(&self.assertions);
        let mut vs: Vec<Var> = (0..self.nodes.len())
            .filter(|&i| live[i])
            .filter_map(|i| match self.nodes[i] {
                GNode::Var(v) => Some(v),
                _ => None,
            })
            .collect();
        vs.sort_unstable();
        vs.dedup();
        vs
    }

    pub fn children(&self, r: Ref) -> Vec<Ref> {
        match &self.nodes[r as usize] {
            GNode::Const(_) | GNode::Var(_) => Vec::new(),
            GNode::Not(a) => vec![*a],
            GNode::And(cs) | GNode::Or(cs) => cs.clone(),
            GNode::Xor(a, b) => vec![*a, *b],
            GNode::Mux(s, t, e) => vec![*s, *t, *e],
        }
    }

    pub(crate) fn reachable(&self, roots: &[Ref]) -> Vec<bool> {
        let mut live = vec![false; self.nodes.len()];
        let mut stack: Vec<Ref> = roots.to_vec();
        while let Some(r) = stack.pop() {
            if std::mem::replace(&mut live[r as usize], true) {
                continue;
            }
            stack.extend(self.children(r));
        }
        live
    }

    /// Copies the nodes reachable from `roots` into `target` with the smart
    /// constructors, replacing each variable by `map_var(v)`. Returns the image
    /// of every copied node.
    pub fn rebuild_into(
        &self,
        target: &mut GateGraph,
        roots: &[Ref],
        map_var: &mut dyn FnMut(&mut GateGraph, Var) -> Ref,
    ) -> Vec<Option<Ref>> {
        let live = self.reachable(roots);
        let mut img: Vec<Option<Ref>> = vec![None; self.nodes.len()];
        for (i, n) in self.nodes.iter().enumerate() {
            if !live[i] {
                continue;
            }
            let m = |r: &Ref| img[*r as usize].expect("children precede parents");
            let r = match n {
                GNode::Const(b) => target.constant(*b),
                GNode::Var(v) => map_var(target, *v),
                GNode::Not(a) => {
                    let a = m(a);
                    target.not(a)
                }
                GNode::And(cs) => {
                    let cs: Vec<Ref> = cs.iter().map(m).collect();
                    target.and(cs)
                }
                GNode::Or(cs) => {
                    let cs: Vec<Ref> = cs.iter().map(m).collect();
                    target.or(cs)
                }
                GNode::Xor(a, b) => {
                    let (a, b) = (m(a), m(b));
                    target.xor(a, b)
                }
                GNode::Mux(s, t, e) => {
                    let (s, t, e) = (m(s), m(t), m(e));
                    target.mux(s, t, e)
                }
            };
            img[i] = Some(r);
        }
        img
    }

    /// Substitutes `fixed` and propagates constants. Assertions that fold to
    /// true disappear; one folding to false leaves a single false assertion.
    pub fn constant_fold(&self, fixed: &HashMap<Var, bool>) -> GateGraph {
        let mut g = GateGraph::new();
        let img = self.rebuild_into(&mut g, &self.assertions, &mut |t, v| match fixed.get(&v) {
            Some(&b) => t.constant(b),
            None => t.var(v),
        });
        for &a in &self.assertions {
            let r = img[a as usize].unwrap();
            if r == Self::FALSE {
                g.assertions = vec![Self::FALSE];
                return g;
            }
            if r != Self::TRUE {
                g.assertions.push(r);
            }
        }
        g
    }

    /// Builds the graph of a clause set.
    pub fn from_cnf(cnf: &Cnf) -> GateGraph {
        let mut g = GateGraph::new();
        for c in &cnf.clauses {
            let lits: Vec<Ref> = c
                .iter()
                .map(|l| {
                    let v = g.var(l.var());
                    if l.is_negated() {
                        g.not(v)
                    } else {
                        v
                    }
                })
                .collect();
            let r = g.or(lits);
            g.assert(r);
        }
        g.max_var = g.max_var.max(cnf.num_vars);
        g
    }
}

pub struct TseitinResult {
    pub cnf: Cnf,
    /// Literal of each encoded node.
    pub lits: Vec<Option<Lit>>,
}

impl TseitinResult {
    pub fn lit(&self, r: Ref) -> Option<Lit> {
        self.lits.get(r as usize).copied().flatten()
    }
}

/// Full definitional encoding; every assertion becomes a unit clause.
pub fn tseitin(g: &GateGraph) -> TseitinResult {
    tseitin_with(g, false, g.max_var() + 1)
}

/// Definitional encoding with fresh variables from `first_aux` on.
///
/// With `split_roots`, asserted conjunctions are split into their conjuncts
/// and asserted disjunctions become a single clause over their children.
pub fn tseitin_with(g: &GateGraph, split_roots: bool, first_aux: Var) -> TseitinResult {
    let mut enc = Encoder {
        g,
        cnf: Cnf::new(first_aux.max(1) - 1),
        lits: vec![None; g.len()],
        true_var: None,
    };
    enc.cnf.num_vars = enc.cnf.num_vars.max(g.max_var());
    let mut work: Vec<(Ref, bool)> = g.assertions().iter().rev().map(|&r| (r, true)).collect();
    while let Some((r, pol)) = work.pop() {
        match (g.node(r), split_roots) {
            (GNode::Const(b), _) => {
                if *b != pol {
                    enc.cnf.clauses.push(Vec::new());
                }
            }
            (GNode::Not(a), true) => work.push((*a, !pol)),
            (GNode::And(cs), true) if pol => work.extend(cs.iter().rev().map(|&c| (c, true))),
            (GNode::Or(cs), true) if !pol => work.extend(cs.iter().rev().map(|&c| (c, false))),
            (GNode::Or(cs), true) | (GNode::And(cs), true) => {
                // Or asserted true, or And asserted false: one clause
                let clause: Vec<Lit> = cs
                    .iter()
                    .map(|&c| {
                        let l = enc.encode(c);
                        if pol {
                            l
                        } else {
                            !l
                        }
                    })
                    .collect();
                enc.cnf.add_clause(clause);
            }
            _ => {
                let l = enc.encode(r);
                enc.cnf.add_clause([if pol { l } else { !l }]);
            }
        }
    }
    TseitinResult {
        cnf: enc.cnf,
        lits: enc.lits,
    }
}

struct Encoder<'a> {
    g: &'a GateGraph,
    cnf: Cnf,
    lits: Vec<Option<Lit>>,
    true_var: Option<Var>,
}

impl Encoder<'_> {
    fn encode(&mut self, root: Ref) -> Lit {
        if let Some(l) = self.lits[root as usize] {
            return l;
        }
        // collect the unencoded cone, then encode children first
        let mut cone = Vec::new();
        let mut stack = vec![root];
        let mut seen = std::collections::HashSet::new();
        while let Some(r) = stack.pop() {
            if self.lits[r as usize].is_some() || !seen.insert(r) {
                continue;
            }
            cone.push(r);
            stack.extend(self.g.children(r));
        }
        cone.sort_unstable();
        for r in cone {
            let l = self.define(r);
            self.lits[r as usize] = Some(l);
        }
        self.lits[root as usize].unwrap()
    }

    fn lit(&self, r: &Ref) -> Lit {
        self.lits[*r as usize].expect("children encoded first")
    }

    fn define(&mut self, r: Ref) -> Lit {
        let g = self.g;
        match g.node(r) {
            GNode::Const(b) => {
                let t = match self.true_var {
                    Some(t) => t,
                    None => {
                        let t = self.cnf.new_var();
                        self.cnf.add_clause([Lit::pos(t)]);
                        self.true_var = Some(t);
                        t
                    }
                };
                Lit::new(t, !b)
            }
            GNode::Var(v) => Lit::pos(*v),
            GNode::Not(a) => !self.lit(a),
            GNode::And(cs) => {
                let a = Lit::pos(self.cnf.new_var());
                let ls: Vec<Lit> = cs.iter().map(|c| self.lit(c)).collect();
                for &l in &ls {
                    self.cnf.add_clause([!a, l]);
                }
                self.cnf
                    .add_clause(std::iter::once(a).chain(ls.iter().map(|&l| !l)));
                a
            }
            GNode::Or(cs) => {
                let o = Lit::pos(self.cnf.new_var());
                let ls: Vec<Lit> = cs.iter().map(|c| self.lit(c)).collect();
                for &l in &ls {
                    self.cnf.add_clause([o, !l]);
                }
                self.cnf
                    .add_clause(std::iter::once(!o).chain(ls.iter().copied()));
                o
            }
            GNode::Xor(a, b) => {
                let (a, b) = (self.lit(a), self.lit(b));
                let x = Lit::pos(self.cnf.new_var());
                self.cnf.add_clause([!x, a, b]);
                self.cnf.add_clause([!x, !a, !b]);
                self.cnf.add_clause([x, !a, b]);
                self.cnf.add_clause([x, a, !b]);
                x
            }
            GNode::Mux(s, t, e) => {
                let (s, t, e) = (self.lit(s), self.lit(t), self.lit(e));
                let m = Lit::pos(self.cnf.new_var());
                self.cnf.add_clause([!s, !t, m]);
                self.cnf.add_clause([!s, t, !m]);
                self.cnf.add_clause([s, !e, m]);
                self.cnf.add_clause([s, e, !m]);
                self.cnf.add_clause([!t, !e, m]);
                self.cnf.add_clause([t, e, !m]);
                m
            }
        }
    }
}
