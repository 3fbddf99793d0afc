//! Conflict-driven clause-learning SAT solver.
//!
//! Two watched literals with blockers, first-UIP learning with recursive
//! minimization, VSIDS with a binary heap, phase saving, Luby restarts and
//! LBD-based learnt clause deletion (binary clauses are never deleted).

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::formula::{Cnf, Lit, Var};

const UNDEF: u8 = 2;
const NO_REASON: u32 = u32::MAX;
const LUBY_BASE: f64 = 64.0;
const VAR_DECAY: f64 = 0.95;
const CLA_DECAY: f64 = 0.999;

/// Resource limits for one `solve` call.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Budget {
    pub conflicts: Option<u64>,
    pub deadline: Option<Instant>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn time(limit: Duration) -> Self {
        Budget {
            conflicts: None,
            deadline: Some(Instant::now() + limit),
        }
    }

    pub fn conflicts(n: u64) -> Self {
        Budget {
            conflicts: Some(n),
            deadline: None,
        }
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = match (self.deadline, deadline) {
            (Some(a), Some(b)) => Some(a.min(b)),
            (a, b) => a.or(b),
        };
        self
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SatStatus {
    Sat,
    Unsat,
    Unknown,
}

/// Cumulative search statistics.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
    pub learnts: u64,
    pub deleted: u64,
    pub time: Duration,
}

impl Stats {
    pub fn merge(&mut self, o: &Stats) {
        self.conflicts += o.conflicts;
        self.decisions += o.decisions;
        self.propagations += o.propagations;
        self.restarts += o.restarts;
        self.learnts += o.learnts;
        self.deleted += o.deleted;
        self.time += o.time;
    }
}

impl fmt::Display for Stats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "conflicts={} decisions={} propagations={} restarts={} learnts={} deleted={} time_ms={}",
            self.conflicts,
            self.decisions,
            self.propagations,
            self.restarts,
            self.learnts,
            self.deleted,
            self.time.as_millis()
        )
    }
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    lbd: u32,
    activity: f32,
}

#[derive(Clone, Copy)]
struct Watcher {
    cref: u32,
    blocker: Lit,
}

/// Max-heap of variables keyed by activity.
#[derive(Default)]
struct VarHeap {
    heap: Vec<Var>,
    pos: Vec<u32>,
}

const NOT_IN_HEAP: u32 = u32::MAX;

impl VarHeap {
    fn grow(&mut self, n: usize) {
        self.pos.resize(n + 1, NOT_IN_HEAP);
    }

    fn contains(&self, v: Var) -> bool {
        self.pos[v as usize] != NOT_IN_HEAP
    }

    fn insert(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v as usize] = self.heap.len() as u32;
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn increased(&mut self, v: Var, act: &[f64]) {
        if self.contains(v) {
            self.up(self.pos[v as usize] as usize, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<Var> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top as usize] = NOT_IN_HEAP;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let p = (i - 1) / 2;
            if act[self.heap[p] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[p];
            self.pos[self.heap[i] as usize] = i as u32;
            i = p;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        let n = self.heap.len();
        loop {
            let l = 2 * i + 1;
            if l >= n {
                break;
            }
            let r = l + 1;
            let c = if r < n && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i as u32;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i as u32;
    }
}

#[inline]
fn lit_value(assigns: &[u8], l: Lit) -> u8 {
    let a = assigns[l.var() as usize];
    if a == UNDEF {
        UNDEF
    } else {
        a ^ l.is_negated() as u8
    }
}

/// Incremental CDCL solver. Clauses may be added between `solve` calls.
pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    free: Vec<u32>,
    learnts: Vec<u32>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    phase: Vec<bool>,
    seen: Vec<u8>,
    analyze_stack: Vec<Lit>,
    analyze_clear: Vec<Var>,
    ok: bool,
    model: Vec<bool>,
    max_learnts: f64,
    stats: Stats,
    rng: Option<ChaCha8Rng>,
}

impl Default for Solver {
    fn default() -> Self {
        Self::new()
    }
}

impl Solver {
    pub fn new() -> Self {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            free: Vec::new(),
            learnts: Vec::new(),
            watches: vec![Vec::new(); 2],
            assigns: vec![UNDEF],
            level: vec![0],
            reason: vec![NO_REASON],
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            activity: vec![0.0],
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap {
                heap: Vec::new(),
                pos: vec![NOT_IN_HEAP],
            },
            phase: vec![false],
            seen: vec![0],
            analyze_stack: Vec::new(),
            analyze_clear: Vec::new(),
            ok: true,
            model: Vec::new(),
            max_learnts: 0.0,
            stats: Stats::default(),
            rng: None,
        }
    }

    /// A solver whose initial variable order is perturbed by `seed`.
    /// Seed 0 leaves the natural order.
    pub fn with_seed(seed: u64) -> Self {
        let mut s = Self::new();
        if seed != 0 {
            s.rng = Some(ChaCha8Rng::seed_from_u64(seed));
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len() - self.free.len()
    }

    pub fn stats(&self) -> &Stats {
        &self.stats
    }

    /// Model of the last satisfiable call, indexed by variable (index 0 unused).
    pub fn model(&self) -> &[bool] {
        &self.model
    }

    pub fn new_var(&mut self) -> Var {
        self.ensure_vars(self.num_vars + 1);
        self.num_vars as Var
    }

    pub fn ensure_vars(&mut self, n: usize) {
        while self.num_vars < n {
            self.num_vars += 1;
            let v = self.num_vars;
            self.assigns.push(UNDEF);
            self.level.push(0);
            self.reason.push(NO_REASON);
            let jitter = match &mut self.rng {
                Some(r) => r.gen::<f64>() * 1e-3,
                None => 0.0,
            };
            self.activity.push(jitter);
            self.phase.push(false);
            self.seen.push(0);
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.heap.grow(v);
            self.heap.insert(v as Var, &self.activity);
        }
    }

    pub fn add_cnf(&mut self, cnf: &Cnf) -> bool {
        self.ensure_vars(cnf.num_vars as usize);
        for c in &cnf.clauses {
            if !self.add_clause(c) {
                return false;
            }
        }
        true
    }

    /// Adds a clause at decision level 0. Returns false once the formula is
    /// known to be unsatisfiable.
    pub fn add_clause(&mut self, lits: &[Lit]) -> bool {
        if !self.ok {
            return false;
        }
        self.cancel_until(0);
        if let Some(m) = lits.iter().map(|l| l.var() as usize).max() {
            self.ensure_vars(m);
        }
        let mut c: Vec<Lit> = lits.to_vec();
        c.sort_unstable();
        c.dedup();
        let mut out = Vec::with_capacity(c.len());
        for (i, &l) in c.iter().enumerate() {
            if i + 1 < c.len() && c[i + 1] == !l {
                return true;
            }
            match lit_value(&self.assigns, l) {
                1 => return true,
                0 => {}
                _ => out.push(l),
            }
        }
        match out.len() {
            0 => {
                self.ok = false;
                false
            }
            1 => {
                self.enqueue(out[0], NO_REASON);
                if self.propagate().is_some() {
                    self.ok = false;
                }
                self.ok
            }
            _ => {
                self.attach(out, false, 0);
                true
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let (a, b) = (lits[0], lits[1]);
        let clause = Clause {
            lits,
            learnt,
            deleted: false,
            lbd,
            activity: 0.0,
        };
        let cref = match self.free.pop() {
            Some(i) => {
                self.clauses[i as usize] = clause;
                i
            }
            None => {
                self.clauses.push(clause);
                (self.clauses.len() - 1) as u32
            }
        };
        self.watches[a.code()].push(Watcher { cref, blocker: b });
        self.watches[b.code()].push(Watcher { cref, blocker: a });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn decision_level(&self) -> usize {
        self.trail_lim.len()
    }

    fn enqueue(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        self.assigns[v] = !l.is_negated() as u8;
        self.level[v] = self.decision_level() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    fn cancel_until(&mut self, lvl: usize) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl];
        for i in (lim..self.trail.len()).rev() {
            let l = self.trail[i];
            let v = l.var();
            self.phase[v as usize] = !l.is_negated();
            self.assigns[v as usize] = UNDEF;
            self.reason[v as usize] = NO_REASON;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl);
        self.qhead = lim;
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[false_lit.code()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if lit_value(&self.assigns, w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let c = &mut self.clauses[w.cref as usize];
                if c.lits[0] == false_lit {
                    c.lits.swap(0, 1);
                }
                let first = c.lits[0];
                if first != w.blocker && lit_value(&self.assigns, first) == 1 {
                    ws[j] = Watcher {
                        cref: w.cref,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..c.lits.len() {
                    if lit_value(&self.assigns, c.lits[k]) != 0 {
                        c.lits.swap(1, k);
                        let nw = c.lits[1];
                        self.watches[nw.code()].push(Watcher {
                            cref: w.cref,
                            blocker: first,
                        });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = Watcher {
                    cref: w.cref,
                    blocker: first,
                };
                j += 1;
                if lit_value(&self.assigns, first) == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        j += 1;
                        i += 1;
                    }
                } else {
                    self.enqueue(first, w.cref);
                }
            }
            ws.truncate(j);
            self.watches[false_lit.code()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: Var) {
        let a = &mut self.activity[v as usize];
        *a += self.var_inc;
        if *a > 1e100 {
            for x in self.activity.iter_mut() {
                *x *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.increased(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: u32) {
        let c = &mut self.clauses[cref as usize];
        if !c.learnt {
            return;
        }
        c.activity += self.cla_inc as f32;
        if c.activity > 1e20 {
            for &l in &self.learnts {
                self.clauses[l as usize].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn abstract_level(&self, v: Var) -> u32 {
        1 << (self.level[v as usize] & 31)
    }

    /// First-UIP conflict analysis. Returns the learnt clause (asserting
    /// literal first) and the backjump level.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, usize) {
        let mut learnt: Vec<Lit> = vec![Lit::pos(1)];
        let mut path = 0usize;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        let cur = self.decision_level() as u32;
        loop {
            self.bump_clause(confl);
            let start = if p.is_some() { 1 } else { 0 };
            let n = self.clauses[confl as usize].lits.len();
            for k in start..n {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var();
                if self.seen[v as usize] == 0 && self.level[v as usize] > 0 {
                    self.bump_var(v);
                    self.seen[v as usize] = 1;
                    if self.level[v as usize] >= cur {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var() as usize] != 0 {
                    break;
                }
            }
            let pl = self.trail[idx];
            self.seen[pl.var() as usize] = 0;
            p = Some(pl);
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[pl.var() as usize];
        }
        learnt[0] = !p.unwrap();

        // recursive minimization
        self.analyze_clear.clear();
        self.analyze_clear.extend(learnt.iter().map(|l| l.var()));
        let levels = learnt[1..]
            .iter()
            .fold(0u32, |a, l| a | self.abstract_level(l.var()));
        let mut keep = 1;
        for i in 1..learnt.len() {
            let l = learnt[i];
            if self.reason[l.var() as usize] == NO_REASON || !self.redundant(l, levels) {
                learnt[keep] = l;
                keep += 1;
            }
        }
        learnt.truncate(keep);
        for k in 0..self.analyze_clear.len() {
            let v = self.analyze_clear[k];
            self.seen[v as usize] = 0;
        }

        let bt = if learnt.len() == 1 {
            0
        } else {
            let mut max_i = 1;
            for i in 2..learnt.len() {
                if self.level[learnt[i].var() as usize] > self.level[learnt[max_i].var() as usize] {
                    max_i = i;
                }
            }
            learnt.swap(1, max_i);
            self.level[learnt[1].var() as usize] as usize
        };
        (learnt, bt)
    }

    fn redundant(&mut self, p: Lit, levels: u32) -> bool {
        self.analyze_stack.clear();
        self.analyze_stack.push(p);
        let top = self.analyze_clear.len();
        while let Some(q) = self.analyze_stack.pop() {
            let cref = self.reason[q.var() as usize];
            let n = self.clauses[cref as usize].lits.len();
            for k in 1..n {
                let l = self.clauses[cref as usize].lits[k];
                let v = l.var();
                if self.seen[v as usize] == 0 && self.level[v as usize] > 0 {
                    if self.reason[v as usize] != NO_REASON
                        && (self.abstract_level(v) & levels) != 0
                    {
                        self.seen[v as usize] = 1;
                        self.analyze_stack.push(l);
                        self.analyze_clear.push(v);
                    } else {
                        for k in top..self.analyze_clear.len() {
                            let v = self.analyze_clear[k];
                            self.seen[v as usize] = 0;
                        }
                        self.analyze_clear.truncate(top);
                        return false;
                    }
                }
            }
        }
        true
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var() as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn locked(&self, cref: u32) -> bool {
        let l = self.clauses[cref as usize].lits[0];
        self.reason[l.var() as usize] == cref && lit_value(&self.assigns, l) == 1
    }

    fn reduce_db(&mut self) {
        let mut ls = std::mem::take(&mut self.learnts);
        ls.sort_by(|&a, &b| {
            let (ca, cb) = (&self.clauses[a as usize], &self.clauses[b as usize]);
            cb.lbd.cmp(&ca.lbd).then(
                ca.activity
                    .partial_cmp(&cb.activity)
                    .unwrap_or(std::cmp::Ordering::Equal),
            )
        });
        let half = ls.len() / 2;
        let mut kept = Vec::with_capacity(ls.len());
        for (i, &cref) in ls.iter().enumerate() {
            let c = &self.clauses[cref as usize];
            if i < half && c.lits.len() > 2 && c.lbd > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref as usize];
                c.deleted = true;
                self.stats.deleted += 1;
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
        let clauses = &self.clauses;
        for ws in self.watches.iter_mut() {
            ws.retain(|w| !clauses[w.cref as usize].deleted);
        }
        for (i, c) in self.clauses.iter_mut().enumerate() {
            if c.deleted && !c.lits.is_empty() {
                c.lits = Vec::new();
                self.free.push(i as u32);
            }
        }
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v as usize] == UNDEF {
                return Some(Lit::new(v, !self.phase[v as usize]));
            }
        }
        None
    }

    /// Decides satisfiability of all clauses added so far.
    pub fn solve(&mut self, budget: &Budget) -> SatStatus {
        let started = Instant::now();
        let r = self.solve_inner(budget);
        self.stats.time += started.elapsed();
        r
    }

    fn solve_inner(&mut self, budget: &Budget) -> SatStatus {
        if !self.ok {
            return SatStatus::Unsat;
        }
        self.cancel_until(0);
        if self.propagate().is_some() {
            self.ok = false;
            return SatStatus::Unsat;
        }
        if self.max_learnts == 0.0 {
            self.max_learnts = (self.num_clauses() as f64 / 3.0).max(2000.0);
        }
        let start_conflicts = self.stats.conflicts;
        let mut restarts = 0u32;
        loop {
            let limit = (luby(2.0, restarts) * LUBY_BASE) as u64;
            match self.search(limit, budget, start_conflicts) {
                Some(s) => {
                    if s != SatStatus::Sat {
                        self.cancel_until(0);
                    }
                    return s;
                }
                None => {
                    restarts += 1;
                    self.stats.restarts += 1;
                }
            }
        }
    }

    fn search(&mut self, limit: u64, budget: &Budget, start_conflicts: u64) -> Option<SatStatus> {
        let mut local = 0u64;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                local += 1;
                if self.decision_level() == 0 {
                    self.ok = false;
                    return Some(SatStatus::Unsat);
                }
                let (learnt, bt) = self.analyze(confl);
                self.cancel_until(bt);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let first = learnt[0];
                    let cref = self.attach(learnt, true, lbd);
                    self.bump_clause(cref);
                    self.enqueue(first, cref);
                }
                self.stats.learnts += 1;
                self.var_inc /= VAR_DECAY;
                self.cla_inc /= CLA_DECAY;
                let used = self.stats.conflicts - start_conflicts;
                if budget.conflicts.is_some_and(|c| used >= c) {
                    return Some(SatStatus::Unknown);
                }
                if used % 128 == 0 && budget.expired() {
                    return Some(SatStatus::Unknown);
                }
            } else {
                if local >= limit {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts.len() as f64 >= self.max_learnts + self.trail.len() as f64 {
                    self.reduce_db();
                    self.max_learnts *= 1.1;
                }
                match self.pick_branch() {
                    None => {
                        self.model = self.assigns.iter().map(|&a| a == 1).collect();
                        self.cancel_until(0);
                        return Some(SatStatus::Sat);
                    }
                    Some(l) => {
                        self.stats.decisions += 1;
                        if self.stats.decisions % 4096 == 0 && budget.expired() {
                            return Some(SatStatus::Unknown);
                        }
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(l, NO_REASON);
                    }
                }
            }
        }
    }
}

/// The Luby sequence scaled by `y`: 1, 1, 2, 1, 1, 2, 4, ...
fn luby(y: f64, mut x: u32) -> f64 {
    let (mut size, mut seq) = (1u32, 0i32);
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    y.powi(seq)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lits(xs: &[i64]) -> Vec<Lit> {
        xs.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    #[test]
    fn luby_prefix() {
        let seq: Vec<f64> = (0..15).map(|i| luby(2.0, i)).collect();
        assert_eq!(
            seq,
            vec![1., 1., 2., 1., 1., 2., 4., 1., 1., 2., 1., 1., 2., 4., 8.]
        );
    }

    #[test]
    fn trivial_unsat_and_sat() {
        let mut s = Solver::new();
        s.add_clause(&lits(&[1, 2]));
        s.add_clause(&lits(&[-1]));
        s.add_clause(&lits(&[-2]));
        assert_eq!(s.solve(&Budget::unlimited()), SatStatus::Unsat);

        let mut s = Solver::new();
        assert_eq!(s.solve(&Budget::unlimited()), SatStatus::Sat);
    }

    #[test]
    fn pigeonhole_is_unsat() {
        // 6 pigeons, 5 holes
        let (p, h) = (6, 5);
        let var = |i: i64, j: i64| i * h + j + 1;
        let mut s = Solver::new();
        for i in 0..p {
            s.add_clause(&lits(&(0..h).map(|j| var(i, j)).collect::<Vec<_>>()));
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add_clause(&lits(&[-var(a, j), -var(b, j)]));
                }
            }
        }
        assert_eq!(s.solve(&Budget::unlimited()), SatStatus::Unsat);
    }

    #[test]
    fn incremental_blocking_enumerates_all_models() {
        // x1 xor x2 xor x3 has 4 models
        let mut s = Solver::new();
        for c in [[1, 2, 3], [1, -2, -3], [-1, 2, -3], [-1, -2, 3]] {
            s.add_clause(&lits(&c));
        }
        let mut n = 0;
        while s.solve(&Budget::unlimited()) == SatStatus::Sat {
            n += 1;
            let m = s.model().to_vec();
            let block: Vec<Lit> = (1..=3).map(|v| Lit::new(v, m[v as usize])).collect();
            s.add_clause(&block);
        }
        assert_eq!(n, 4);
    }

    #[test]
    fn conflict_budget_gives_unknown() {
        let (p, h) = (9, 8);
        let var = |i: i64, j: i64| i * h + j + 1;
        let mut s = Solver::new();
        for i in 0..p {
            s.add_clause(&lits(&(0..h).map(|j| var(i, j)).collect::<Vec<_>>()));
        }
        for j in 0..h {
            for a in 0..p {
                for b in a + 1..p {
                    s.add_clause(&lits(&[-var(a, j), -var(b, j)]));
                }
            }
        }
        assert_eq!(s.solve(&Budget::conflicts(10)), SatStatus::Unknown);
    }
}
