//! Propositional and quantified formulas.

mod dimacs;
mod graph;
mod qbf;

use std::fmt;
use std::ops::Not;

pub use dimacs::{parse_dimacs, parse_qdimacs, DimacsError, Qdimacs};
pub use graph::{tseitin, tseitin_with, GNode, GateGraph, Ref, TseitinResult};
pub use qbf::{
    eval_qbf_recursive, expand_universal, to_qdimacs, Expansion, GeneralQbf, Qbf2, QbfError, Quant,
    EXPANSION_CAP, QBF_EVAL_CAP,
};

/// Propositional variable, numbered from 1.
pub type Var = u32;

/// A literal packed as `2 * var + negated`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Self {
        debug_assert!(var >= 1);
        Lit((var << 1) | negated as u32)
    }

    pub fn pos(var: Var) -> Self {
        Self::new(var, false)
    }

    pub fn neg(var: Var) -> Self {
        Self::new(var, true)
    }

    pub fn var(self) -> Var {
        self.0 >> 1
    }

    pub fn is_negated(self) -> bool {
        self.0 & 1 == 1
    }

    /// Dense index usable for per-literal arrays (`2 * var + negated`).
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Lit(code as u32)
    }

    pub fn from_dimacs(x: i64) -> Self {
        Self::new(x.unsigned_abs() as Var, x < 0)
    }

    pub fn to_dimacs(self) -> i64 {
        if self.is_negated() {
            -(self.var() as i64)
        } else {
            self.var() as i64
        }
    }

    /// Value under a total assignment indexed by variable.
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var() as usize] != self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

/// Clause list over variables `1..=num_vars`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Cnf {
    pub num_vars: u32,
    pub clauses: Vec<Vec<Lit>>,
}

impl Cnf {
    pub fn new(num_vars: u32) -> Self {
        Cnf {
            num_vars,
            clauses: Vec::new(),
        }
    }

    pub fn new_var(&mut self) -> Var {
        self.num_vars += 1;
        self.num_vars
    }

    /// Adds a clause after sorting and deduplication; tautologies are dropped.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) -> bool {
        match normalize_clause(lits) {
            Some(c) => {
                if let Some(max) = c.iter().map(|l| l.var()).max() {
                    self.num_vars = self.num_vars.max(max);
                }
                self.clauses.push(c);
                true
            }
            None => false,
        }
    }

    /// Evaluates under an assignment indexed by variable (index 0 unused).
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses
            .iter()
            .all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for c in &self.clauses {
            write_clause(&mut s, c);
        }
        s
    }
}

pub(crate) fn write_clause(s: &mut String, c: &[Lit]) {
    use std::fmt::Write;
    for l in c {
        let _ = write!(s, "{} ", l.to_dimacs());
    }
    s.push_str("0\n");
}

/// Sorted, duplicate-free clause, or `None` for a tautology.
pub fn normalize_clause(lits: impl IntoIterator<Item = Lit>) -> Option<Vec<Lit>> {
    let mut c: Vec<Lit> = lits.into_iter().collect();
    c.sort_unstable();
    c.dedup();
    if c.windows(2).any(|w| w[0].var() == w[1].var()) {
        return None;
    }
    Some(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literal_packing() {
        let l = Lit::neg(7);
        assert_eq!(l.var(), 7);
        assert!(l.is_negated());
        assert_eq!(!l, Lit::pos(7));
        assert_eq!(l.to_dimacs(), -7);
        assert_eq!(Lit::from_dimacs(-7), l);
    }

    #[test]
    fn tautologies_are_dropped() {
        let mut c = Cnf::new(0);
        assert!(!c.add_clause([Lit::pos(1), Lit::neg(1)]));
        assert!(c.add_clause([Lit::pos(2), Lit::pos(1), Lit::pos(2)]));
        assert_eq!(c.clauses, vec![vec![Lit::pos(1), Lit::pos(2)]]);
        assert_eq!(c.num_vars, 2);
        assert_eq!(Cnf::new(3).to_dimacs(), "p cnf 3 0\n");
    }
}
