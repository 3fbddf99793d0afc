//! SAT and 2-QBF decision procedures.

mod cdcl;
mod external;

use thiserror::Error;

pub use cdcl::{Budget, SatStatus, Solver, Stats};
pub use external::{solve_sat_external, ExternalError, SOLVER_ENV};

use crate::formula::{expand_universal, Cnf, Expansion, GateGraph, Lit, Qbf2, QbfError, Var};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("model fails clause {0} of the formula")]
    Verification(usize),
    #[error(transparent)]
    Qbf(#[from] QbfError),
    #[error(transparent)]
    External(#[from] ExternalError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveStatus {
    /// Total model indexed by variable (index 0 unused).
    Sat(Vec<bool>),
    Unsat,
    Timeout,
}

#[derive(Clone, Debug)]
pub struct SolveResult {
    pub status: SolveStatus,
    pub stats: Stats,
}

impl SolveResult {
    pub fn is_sat(&self) -> bool {
        matches!(self.status, SolveStatus::Sat(_))
    }
}

/// Index of the first clause a model falsifies.
pub fn first_falsified(cnf: &Cnf, model: &[bool]) -> Option<usize> {
    cnf.clauses.iter().position(|c| {
        !c.iter()
            .any(|l| model.get(l.var() as usize).copied().unwrap_or(false) != l.is_negated())
    })
}

pub fn solve_sat(cnf: &Cnf, budget: &Budget) -> Result<SolveResult, SolverError> {
    solve_sat_seeded(cnf, budget, 0)
}

pub fn solve_sat_seeded(cnf: &Cnf, budget: &Budget, seed: u64) -> Result<SolveResult, SolverError> {
    let mut s = Solver::with_seed(seed);
    s.ensure_vars(cnf.num_vars as usize);
    let status = if s.add_cnf(cnf) {
        s.solve(budget)
    } else {
        SatStatus::Unsat
    };
    let status = match status {
        SatStatus::Sat => {
            let mut m = s.model().to_vec();
            m.resize(cnf.num_vars as usize + 1, false);
            if let Some(i) = first_falsified(cnf, &m) {
                return Err(SolverError::Verification(i));
            }
            SolveStatus::Sat(m)
        }
        SatStatus::Unsat => SolveStatus::Unsat,
        SatStatus::Unknown => SolveStatus::Timeout,
    };
    Ok(SolveResult {
        status,
        stats: *s.stats(),
    })
}

/// Assignment to the outer existential block, in the order of `Qbf2::s`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Witness(pub Vec<bool>);

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QbfStatus {
    Sat(Witness),
    Unsat,
    Timeout,
}

#[derive(Clone, Debug)]
pub struct QbfResult {
    pub status: QbfStatus,
    pub stats: Stats,
}

/// An expanded 2-QBF held open for repeated solving and blocking.
///
/// Blocking clauses are added to the expanded instance directly, so the
/// matrix is expanded once no matter how many solutions are enumerated.
pub struct QbfSession {
    expansion: Expansion,
    solver: Solver,
    blocked: Vec<Vec<Lit>>,
}

impl QbfSession {
    pub fn new(q: &Qbf2, cap: usize, seed: u64) -> Result<Self, SolverError> {
        let expansion = expand_universal(q, cap)?;
        let mut solver = Solver::with_seed(seed);
        solver.ensure_vars(expansion.cnf.num_vars as usize);
        solver.add_cnf(&expansion.cnf);
        Ok(QbfSession {
            expansion,
            solver,
            blocked: Vec::new(),
        })
    }

    pub fn expansion(&self) -> &Expansion {
        &self.expansion
    }

    pub fn stats(&self) -> &Stats {
        self.solver.stats()
    }

    /// Adds a clause over the outer block; `lits` use positions in `Qbf2::s` as variables (from 1).
    pub fn add_outer_clause(&mut self, lits: &[Lit]) {
        let mapped: Vec<Lit> = lits
            .iter()
            .map(|l| Lit::new(self.expansion.s_var(l.var() as usize - 1), l.is_negated()))
            .collect();
        self.solver.add_clause(&mapped);
        self.blocked.push(mapped);
    }

    pub fn solve(&mut self, budget: &Budget) -> Result<QbfResult, SolverError> {
        let before = *self.solver.stats();
        let st = self.solver.solve(budget);
        let mut stats = *self.solver.stats();
        stats.conflicts -= before.conflicts;
        stats.decisions -= before.decisions;
        stats.propagations -= before.propagations;
        stats.restarts -= before.restarts;
        stats.learnts -= before.learnts;
        stats.deleted -= before.deleted;
        stats.time -= before.time;
        let status = match st {
            SatStatus::Sat => {
                let mut m = self.solver.model().to_vec();
                m.resize(self.expansion.cnf.num_vars as usize + 1, false);
                if let Some(i) = first_falsified(&self.expansion.cnf, &m) {
                    return Err(SolverError::Verification(i));
                }
                if self
                    .blocked
                    .iter()
                    .any(|c| !c.iter().any(|l| m[l.var() as usize] != l.is_negated()))
                {
                    return Err(SolverError::Verification(usize::MAX));
                }
                let w = (0..self.expansion.s_count)
                    .map(|i| m[self.expansion.s_var(i) as usize])
                    .collect();
                QbfStatus::Sat(Witness(w))
            }
            SatStatus::Unsat => QbfStatus::Unsat,
            SatStatus::Unknown => QbfStatus::Timeout,
        };
        Ok(QbfResult { status, stats })
    }

    /// Excludes exactly this witness from later solves.
    pub fn block(&mut self, w: &Witness) {
        let clause: Vec<Lit> =
            w.0.iter()
                .enumerate()
                .map(|(i, &b)| Lit::new(i as Var + 1, b))
                .collect();
        self.add_outer_clause(&clause);
    }
}

/// Decides `∃S ∀X ∃Z` by full expansion of `X` and one SAT call.
pub fn solve_2qbf(q: &Qbf2, budget: &Budget, cap: usize) -> Result<QbfResult, SolverError> {
    QbfSession::new(q, cap, 0)?.solve(budget)
}

/// Conjoins the negation of `w` (over the `S` variables only).
pub fn block(q: &Qbf2, w: &Witness) -> Qbf2 {
    let mut out = q.clone();
    let g: &mut GateGraph = &mut out.matrix;
    let lits: Vec<_> =
        q.s.iter()
            .zip(&w.0)
            .map(|(&v, &b)| {
                let r = g.var(v);
                if b {
                    g.not(r)
                } else {
                    r
                }
            })
            .collect();
    let c = g.or(lits);
    g.assert(c);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::EXPANSION_CAP;

    #[test]
    fn empty_cnf_is_sat() {
        let r = solve_sat(&Cnf::new(0), &Budget::unlimited()).unwrap();
        assert_eq!(r.status, SolveStatus::Sat(vec![false]));
    }

    #[test]
    fn two_solution_toy_is_exhausted_by_blocking() {
        // ∃s1 s2 ∀x. (s1 xor s2) ∨ (x ∧ !x)   -- two witnesses
        let mut g = GateGraph::new();
        let (a, b) = (g.var(1), g.var(2));
        let x = g.var(3);
        let r = g.xor(a, b);
        let nx = g.not(x);
        let k = g.and2(x, nx);
        let r = g.or2(r, k);
        g.assert(r);
        let q = Qbf2 {
            matrix: g,
            s: vec![1, 2],
            x: vec![3],
            z: vec![],
        };
        let mut q2 = q.clone();
        let mut seen = Vec::new();
        loop {
            let res = solve_2qbf(&q2, &Budget::unlimited(), EXPANSION_CAP).unwrap();
            match res.status {
                QbfStatus::Sat(w) => {
                    assert!(!seen.contains(&w));
                    q2 = block(&q2, &w);
                    seen.push(w);
                }
                QbfStatus::Unsat => break,
                QbfStatus::Timeout => unreachable!(),
            }
        }
        assert_eq!(seen.len(), 2);

        let mut s = QbfSession::new(&q, EXPANSION_CAP, 0).unwrap();
        let mut n = 0;
        while let QbfStatus::Sat(w) = s.solve(&Budget::unlimited()).unwrap().status {
            s.block(&w);
            n += 1;
        }
        assert_eq!(n, 2);
    }
}
