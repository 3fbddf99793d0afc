//! Quantified formulas: two-block `∃S ∀X ∃Z` instances, general prefixes,
//! a recursive reference evaluator and universal expansion.

use std::collections::HashSet;

use thiserror::Error;

use super::dimacs::Qdimacs;
use super::graph::{tseitin_with, GateGraph, Ref};
use super::{Cnf, Var};

/// Largest variable count accepted by [`eval_qbf_recursive`].
pub const QBF_EVAL_CAP: usize = 24;
/// Default largest universal block accepted by [`expand_universal`].
pub const EXPANSION_CAP: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QbfError {
    #[error("{vars} variables exceed the cap of {cap}")]
    CapExceeded { vars: usize, cap: usize },
    #[error("variable {0} appears in more than one quantifier block")]
    NotDisjoint(Var),
    #[error("variable {0} occurs in the matrix but is not quantified")]
    Unquantified(Var),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quant {
    Exists,
    Forall,
}

/// `∃S ∀X ∃Z. matrix`, where the matrix is the conjunction of the graph's assertions.
#[derive(Clone, Debug)]
pub struct Qbf2 {
    pub matrix: GateGraph,
    pub s: Vec<Var>,
    pub x: Vec<Var>,
    pub z: Vec<Var>,
}

impl Qbf2 {
    /// Checks that the blocks are disjoint and cover the matrix support.
    pub fn check(&self) -> Result<(), QbfError> {
        let mut seen = HashSet::new();
        for &v in self.s.iter().chain(&self.x).chain(&self.z) {
            if !seen.insert(v) {
                return Err(QbfError::NotDisjoint(v));
            }
        }
        for v in self.matrix.support() {
            if !seen.contains(&v) {
                return Err(QbfError::Unquantified(v));
            }
        }
        Ok(())
    }

    pub fn to_general(&self) -> GeneralQbf {
        let mut prefix = Vec::new();
        prefix.extend(self.s.iter().map(|&v| (Quant::Exists, v)));
        prefix.extend(self.x.iter().map(|&v| (Quant::Forall, v)));
        prefix.extend(self.z.iter().map(|&v| (Quant::Exists, v)));
        GeneralQbf {
            prefix,
            matrix: self.matrix.clone(),
        }
    }
}

/// `Q1 x1 ... Qn xn. matrix`.
#[derive(Clone, Debug)]
pub struct GeneralQbf {
    pub prefix: Vec<(Quant, Var)>,
    pub matrix: GateGraph,
}

/// Truth value by peeling the outermost quantifier: `∀x.φ = φ[0] ∧ φ[1]`,
/// `∃x.φ = φ[0] ∨ φ[1]`.
pub fn eval_qbf_recursive(q: &GeneralQbf) -> Result<bool, QbfError> {
    if q.prefix.len() > QBF_EVAL_CAP {
        return Err(QbfError::CapExceeded {
            vars: q.prefix.len(),
            cap: QBF_EVAL_CAP,
        });
    }
    let mut seen = HashSet::new();
    for &(_, v) in &q.prefix {
        if !seen.insert(v) {
            return Err(QbfError::NotDisjoint(v));
        }
    }
    for v in q.matrix.support() {
        if !seen.contains(&v) {
            return Err(QbfError::Unquantified(v));
        }
    }
    let top = q
        .prefix
        .iter()
        .map(|&(_, v)| v)
        .max()
        .unwrap_or(0)
        .max(q.matrix.max_var());
    let mut asg = vec![false; top as usize + 1];
    Ok(peel(q, 0, &mut asg))
}

fn peel(q: &GeneralQbf, i: usize, asg: &mut [bool]) -> bool {
    if i == q.prefix.len() {
        return q.matrix.satisfied(asg);
    }
    let (quant, v) = q.prefix[i];
    for b in [false, true] {
        asg[v as usize] = b;
        let r = peel(q, i + 1, asg);
        match quant {
            Quant::Exists if r => return true,
            Quant::Forall if !r => return false,
            _ => {}
        }
    }
    quant == Quant::Forall
}

/// SAT instance equivalent to a [`Qbf2`] with the universal block expanded.
///
/// Variable numbering: `S[i]` becomes `i + 1`; copy `c` of `Z[j]` becomes
/// `|S| + 1 + c·|Z| + j`; Tseitin variables follow.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub cnf: Cnf,
    pub s_count: usize,
    pub copies: usize,
    pub z_count: usize,
}

impl Expansion {
    /// Variable of `S[i]` in the expanded instance.
    pub fn s_var(&self, i: usize) -> Var {
        i as Var + 1
    }

    /// Variable of `Z[j]` in copy `c`.
    pub fn z_var(&self, c: usize, j: usize) -> Var {
        (self.s_count + 1 + c * self.z_count + j) as Var
    }
}

/// Conjunction over every assignment to `X` of the matrix with `X` fixed,
/// each copy constant-folded before clausification. Copy `c` fixes
/// `X[i]` to bit `|X|-1-i` of `c`.
pub fn expand_universal(q: &Qbf2, cap: usize) -> Result<Expansion, QbfError> {
    q.check()?;
    if q.x.len() > cap {
        return Err(QbfError::CapExceeded {
            vars: q.x.len(),
            cap,
        });
    }
    let copies = 1usize << q.x.len();
    let (ns, nx, nz) = (q.s.len(), q.x.len(), q.z.len());
    let top =
        q.s.iter()
            .chain(&q.x)
            .chain(&q.z)
            .copied()
            .max()
            .unwrap_or(0)
            .max(q.matrix.max_var());
    // role[v] = (block, index)
    let mut role = vec![(0u8, 0usize); top as usize + 1];
    for (i, &v) in q.s.iter().enumerate() {
        role[v as usize] = (1, i);
    }
    for (i, &v) in q.x.iter().enumerate() {
        role[v as usize] = (2, i);
    }
    for (i, &v) in q.z.iter().enumerate() {
        role[v as usize] = (3, i);
    }
    let mut arena = GateGraph::new();
    let mut roots: Vec<Ref> = Vec::new();
    for c in 0..copies {
        let img = q
            .matrix
            .rebuild_into(&mut arena, q.matrix.assertions(), &mut |t, v| {
                let (block, i) = role[v as usize];
                match block {
                    1 => t.var(i as Var + 1),
                    2 => t.constant((c >> (nx - 1 - i)) & 1 == 1),
                    _ => t.var((ns + 1 + c * nz + i) as Var),
                }
            });
        for &a in q.matrix.assertions() {
            roots.push(img[a as usize].unwrap());
        }
    }
    // constraints over S alone are identical in every copy
    let mut seen = HashSet::new();
    for r in roots {
        if seen.insert(r) {
            arena.assert(r);
        }
    }
    let first_aux = (ns + copies * nz + 1) as Var;
    let t = tseitin_with(&arena, true, first_aux);
    let mut cnf = t.cnf;
    cnf.num_vars = cnf.num_vars.max(first_aux - 1);
    Ok(Expansion {
        cnf,
        s_count: ns,
        copies,
        z_count: nz,
    })
}

/// Clausal form with prefix `∃S ∀X ∃(Z ∪ Tseitin)`; empty blocks are omitted.
/// Variables are renumbered `S`, `X`, `Z` in order from 1.
pub fn to_qdimacs(q: &Qbf2) -> Result<Qdimacs, QbfError> {
    q.check()?;
    let top =
        q.s.iter()
            .chain(&q.x)
            .chain(&q.z)
            .copied()
            .max()
            .unwrap_or(0)
            .max(q.matrix.max_var());
    let mut new_id = vec![0 as Var; top as usize + 1];
    for (i, &v) in q.s.iter().chain(&q.x).chain(&q.z).enumerate() {
        new_id[v as usize] = i as Var + 1;
    }
    let mut g = GateGraph::new();
    let img = q
        .matrix
        .rebuild_into(&mut g, q.matrix.assertions(), &mut |t, v| {
            t.var(new_id[v as usize])
        });
    for &a in q.matrix.assertions() {
        g.assert(img[a as usize].unwrap());
    }
    let n = (q.s.len() + q.x.len() + q.z.len()) as Var;
    let t = tseitin_with(&g, true, n + 1);
    let mut cnf = t.cnf;
    cnf.num_vars = cnf.num_vars.max(n);
    let ns = q.s.len() as Var;
    let nx = q.x.len() as Var;
    let mut prefix = Vec::new();
    let s: Vec<Var> = (1..=ns).collect();
    let x: Vec<Var> = (ns + 1..=ns + nx).collect();
    let z: Vec<Var> = (ns + nx + 1..=cnf.num_vars).collect();
    for (qt, block) in [(Quant::Exists, s), (Quant::Forall, x), (Quant::Exists, z)] {
        if !block.is_empty() {
            prefix.push((qt, block));
        }
    }
    Ok(Qdimacs {
        num_vars: cnf.num_vars,
        prefix,
        clauses: cnf.clauses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Lit;

    fn general(prefix: &[(Quant, Var)], build: impl FnOnce(&mut GateGraph) -> Ref) -> GeneralQbf {
        let mut g = GateGraph::new();
        let r = build(&mut g);
        g.assert(r);
        GeneralQbf {
            prefix: prefix.to_vec(),
            matrix: g,
        }
    }

    #[test]
    fn small_prefixes() {
        let q = general(&[(Quant::Exists, 1)], |g| g.var(1));
        assert!(eval_qbf_recursive(&q).unwrap());
        let q = general(&[(Quant::Forall, 1)], |g| g.var(1));
        assert!(!eval_qbf_recursive(&q).unwrap());
        let q = general(&[(Quant::Forall, 1), (Quant::Exists, 2)], |g| {
            let (x, y) = (g.var(1), g.var(2));
            g.iff(x, y)
        });
        assert!(eval_qbf_recursive(&q).unwrap());
        let q = general(&[(Quant::Exists, 2), (Quant::Forall, 1)], |g| {
            let (x, y) = (g.var(1), g.var(2));
            g.iff(x, y)
        });
        assert!(!eval_qbf_recursive(&q).unwrap());
    }

    #[test]
    fn unquantified_variable_is_rejected() {
        let q = general(&[(Quant::Exists, 1)], |g| {
            let (a, b) = (g.var(1), g.var(2));
            g.and2(a, b)
        });
        assert_eq!(eval_qbf_recursive(&q), Err(QbfError::Unquantified(2)));
    }

    #[test]
    fn qdimacs_of_single_clause() {
        let mut cnf = Cnf::new(2);
        cnf.add_clause([Lit::pos(1), Lit::pos(2)]);
        let q = Qbf2 {
            matrix: GateGraph::from_cnf(&cnf),
            s: vec![1],
            x: vec![2],
            z: vec![],
        };
        assert_eq!(
            to_qdimacs(&q).unwrap().to_string(),
            "p cnf 2 1\ne 1 0\na 2 0\n1 2 0\n"
        );
    }

    #[test]
    fn expansion_copies_and_numbering() {
        // ∃s ∀x1 x2 ∃z. z ↔ (x1 ∧ s), z ∨ x2 ∨ !s
        let mut g = GateGraph::new();
        let (s, x1, x2, z) = (g.var(10), g.var(20), g.var(21), g.var(30));
        let a = g.and2(x1, s);
        let e = g.iff(z, a);
        g.assert(e);
        let ns = g.not(s);
        let c = g.or([z, x2, ns]);
        g.assert(c);
        let q = Qbf2 {
            matrix: g,
            s: vec![10],
            x: vec![20, 21],
            z: vec![30],
        };
        let ex = expand_universal(&q, EXPANSION_CAP).unwrap();
        assert_eq!(ex.copies, 4);
        assert_eq!(ex.z_var(3, 0), 5);
        assert!(ex.cnf.num_vars >= 5);
        // s = 1 fails on x = (0, 0), so only s = 0 survives
        let sat = |sv: bool| {
            (0..1u32 << (ex.cnf.num_vars - 1)).any(|m| {
                let mut asg = vec![false; ex.cnf.num_vars as usize + 1];
                asg[1] = sv;
                for v in 2..=ex.cnf.num_vars {
                    asg[v as usize] = (m >> (v - 2)) & 1 == 1;
                }
                ex.cnf.eval(&asg)
            })
        };
        assert!(sat(false));
        assert!(!sat(true));
        assert!(eval_qbf_recursive(&q.to_general()).unwrap());
    }

    #[test]
    fn expansion_cap() {
        let mut g = GateGraph::new();
        let v = g.var(1);
        g.assert(v);
        let q = Qbf2 {
            matrix: g,
            s: vec![],
            x: vec![1],
            z: vec![],
        };
        assert!(matches!(
            expand_universal(&q, 0),
            Err(QbfError::CapExceeded { .. })
        ));
    }
}
