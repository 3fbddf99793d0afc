//! Label selection and counting, brute-force topology search, and
//! single-encoding exact synthesis, with independent verification.

use std::collections::BTreeMap;
use std::fmt;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::bases::Basis;
use crate::circuit::{
    check_same_interface, first_difference, BooleanFunction, Circuit, CircuitError, NaryOp,
    NodeKind, Wire, EVAL_CAP,
};
use crate::encoder::{
    circuit_into_graph, create_miter, encode_synthesis, EncodeError, FabricSpec, Mode, Symmetry,
    SynthEncoding, VarAlloc,
};
use crate::formula::{tseitin_with, GateGraph, Lit, Var, EXPANSION_CAP};
use crate::solver::{
    solve_sat, Budget, QbfSession, QbfStatus, SolveStatus, SolverError, Stats, Witness,
};

#[derive(Debug, Error)]
pub enum SynthesisError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("no solution exists")]
    NoSolution,
    #[error("budget exhausted before an answer")]
    Timeout,
    #[error("solution failed verification: {0}")]
    Unsound(String),
    #[error("search space of 2^{edges} subsets exceeds the cap")]
    SearchTooLarge { edges: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
}

/// Per-solve resource limits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Limits {
    pub time: Option<Duration>,
    pub conflicts: Option<u64>,
}

impl Limits {
    pub fn unlimited() -> Self {
        Limits::default()
    }

    pub fn time(d: Duration) -> Self {
        Limits {
            time: Some(d),
            conflicts: None,
        }
    }

    fn budget(&self) -> Budget {
        let mut b = Budget::unlimited();
        b.conflicts = self.conflicts;
        if let Some(t) = self.time {
            b.deadline = Some(Instant::now() + t);
        }
        b
    }
}

/// Equivalence of `candidate` and `psi` on matching port names.
///
/// Uses truth tables up to the evaluation cap and a SAT miter above it.
pub fn verify(candidate: &Circuit, psi: &Circuit) -> Result<bool, SynthesisError> {
    check_same_interface(candidate, psi)?;
    if psi.input_names().len() <= EVAL_CAP {
        Ok(first_difference(candidate, psi)?.is_none())
    } else {
        verify_sat(candidate, psi)
    }
}

/// Both circuits with their ports renamed by position (`i0..`, `o0..`).
pub fn positional_pair(a: &Circuit, b: &Circuit) -> Result<(Circuit, Circuit), SynthesisError> {
    let ins: Vec<String> = (0..a.input_names().len())
        .map(|i| format!("i{i}"))
        .collect();
    let outs: Vec<String> = (0..a.outputs().len()).map(|i| format!("o{i}")).collect();
    let ins: Vec<&str> = ins.iter().map(String::as_str).collect();
    let outs: Vec<&str> = outs.iter().map(String::as_str).collect();
    Ok((
        a.with_port_names(&ins, &outs)?,
        b.with_port_names(&ins, &outs)?,
    ))
}

/// Equivalence with ports matched by position instead of by name.
pub fn verify_positional(candidate: &Circuit, psi: &Circuit) -> Result<bool, SynthesisError> {
    let (a, b) = positional_pair(candidate, psi)?;
    verify(&a, &b)
}

/// Equivalence by SAT on the XOR miter (unsat means equivalent).
pub fn verify_sat(candidate: &Circuit, psi: &Circuit) -> Result<bool, SynthesisError> {
    check_same_interface(candidate, psi)?;
    let names = psi.input_names();
    let mut alloc = VarAlloc::new();
    let mut g = GateGraph::new();
    let xs: Vec<_> = alloc
        .fresh_n(names.len())
        .into_iter()
        .map(|v| g.var(v))
        .collect();
    let by_name: BTreeMap<&String, _> = names.iter().zip(xs.iter().copied()).collect();
    let cand_ins: Vec<_> = candidate.input_names().iter().map(|n| by_name[n]).collect();
    let a = circuit_into_graph(&mut g, candidate, &cand_ins)?;
    let b = circuit_into_graph(&mut g, psi, &xs)?;
    let a_by: BTreeMap<String, _> = candidate.output_names().into_iter().zip(a).collect();
    let diffs: Vec<_> = psi
        .output_names()
        .iter()
        .zip(b)
        .map(|(n, r)| g.xor(a_by[n], r))
        .collect();
    let any = g.or(diffs);
    g.assert(any);
    let cnf = tseitin_with(&g, true, g.max_var().max(alloc.count() as u32) + 1).cnf;
    match solve_sat(&cnf, &Budget::unlimited())?.status {
        SolveStatus::Unsat => Ok(true),
        SolveStatus::Sat(_) => Ok(false),
        SolveStatus::Timeout => Err(SynthesisError::Timeout),
    }
}

fn ensure_sound(c: &Circuit, psi: &Circuit) -> Result<(), SynthesisError> {
    let report = c.validate();
    if !report.is_ok() {
        return Err(SynthesisError::Unsound(report.to_string()));
    }
    if !verify(c, psi)? {
        return Err(SynthesisError::Unsound(
            "not equivalent to the requirements".into(),
        ));
    }
    Ok(())
}

/// Relabels the gates of `psi` with functions from `basis` so that the
/// result is equivalent to `psi`.
pub fn label_select(
    basis: &Basis,
    psi: &Circuit,
    limits: Limits,
) -> Result<Circuit, SynthesisError> {
    let miter = create_miter(basis, &psi.topology(), psi)?;
    let mut s = QbfSession::new(&miter.qbf, EXPANSION_CAP, 0)?;
    match s.solve(&limits.budget())?.status {
        QbfStatus::Sat(w) => {
            let c = miter.reconstruct(&w)?;
            ensure_sound(&c, psi)?;
            Ok(c)
        }
        QbfStatus::Unsat => Err(SynthesisError::NoSolution),
        QbfStatus::Timeout => Err(SynthesisError::Timeout),
    }
}

/// Result of counting labelings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabelCount {
    pub count: usize,
    /// False when the limit or the budget stopped the enumeration early; `count` is then a lower bound.
    pub complete: bool,
    /// Basis indices per internal node (id order), one entry per counted labeling.
    pub labelings: Vec<Vec<usize>>,
    pub stats: Stats,
}

/// Counts the labelings of `psi`'s topology over `basis` that are equivalent
/// to `psi`. Labelings are distinct when their selector assignments differ.
pub fn label_count(
    basis: &Basis,
    psi: &Circuit,
    limit: Option<usize>,
    limits: Limits,
) -> Result<LabelCount, SynthesisError> {
    let miter = create_miter(basis, &psi.topology(), psi)?;
    let mut s = QbfSession::new(&miter.qbf, EXPANSION_CAP, 0)?;
    let budget = limits.budget();
    let mut out = LabelCount {
        count: 0,
        complete: false,
        labelings: Vec::new(),
        stats: Stats::default(),
    };
    loop {
        if limit.is_some_and(|l| out.count >= l) {
            break;
        }
        let r = s.solve(&budget)?;
        out.stats.merge(&r.stats);
        match r.status {
            QbfStatus::Sat(w) => {
                let c = miter.reconstruct(&w)?;
                ensure_sound(&c, psi)?;
                out.labelings.push(miter.decode(&w)?);
                out.count += 1;
                s.block(&w);
            }
            QbfStatus::Unsat => {
                out.complete = true;
                break;
            }
            QbfStatus::Timeout => break,
        }
    }
    Ok(out)
}

/// Outcome of one candidate size.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SizeStatus {
    Sat,
    Unsat,
    Timeout,
}

impl fmt::Display for SizeStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SizeStatus::Sat => "sat",
            SizeStatus::Unsat => "unsat",
            SizeStatus::Timeout => "timeout",
        })
    }
}

/// Lower and upper bounds on the minimal gate count.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SizeBounds {
    pub per_k: BTreeMap<usize, SizeStatus>,
}

impl SizeBounds {
    pub fn record(&mut self, k: usize, s: SizeStatus) {
        self.per_k.insert(k, s);
    }

    /// Largest size proven impossible, plus one.
    pub fn lower(&self) -> usize {
        self.per_k
            .iter()
            .filter(|(_, &s)| s == SizeStatus::Unsat)
            .map(|(&k, _)| k + 1)
            .max()
            .unwrap_or(0)
    }

    /// Smallest size with a solution.
    pub fn upper(&self) -> Option<usize> {
        self.per_k
            .iter()
            .find(|(_, &s)| s == SizeStatus::Sat)
            .map(|(&k, _)| k)
    }

    /// The minimum, when every smaller size was proven impossible.
    pub fn optimum(&self) -> Option<usize> {
        let u = self.upper()?;
        (0..u)
            .all(|k| self.per_k.get(&k) == Some(&SizeStatus::Unsat))
            .then_some(u)
    }

    /// No unsat size lies above a sat size.
    pub fn is_consistent(&self) -> bool {
        match self.upper() {
            Some(u) => self
                .per_k
                .iter()
                .all(|(&k, &s)| !(k > u && s == SizeStatus::Unsat)),
            None => true,
        }
    }
}

/// One row of the results ledger.
#[derive(Clone, Debug)]
pub struct SizeRecord {
    pub k: usize,
    pub status: SizeStatus,
    pub solutions: usize,
    pub time: Duration,
    pub stats: Stats,
}

pub const RESULTS_HEADER: &str = "family,n,k,status,gates,wall_time_s,conflicts";

impl SizeRecord {
    pub fn csv_row(&self, family: &str, n: usize) -> String {
        let gates = if self.status == SizeStatus::Sat {
            self.k.to_string()
        } else {
            String::new()
        };
        format!(
            "{family},{n},{},{},{gates},{:.3},{}",
            self.k,
            self.status,
            self.time.as_secs_f64(),
            self.stats.conflicts
        )
    }
}

/// Renders records as CSV with a header line.
pub fn results_csv(family: &str, n: usize, records: &[SizeRecord]) -> String {
    let mut s = String::from(RESULTS_HEADER);
    s.push('\n');
    for r in records {
        s.push_str(&r.csv_row(family, n));
        s.push('\n');
    }
    s
}

#[derive(Clone, Debug)]
pub struct SynthesisConfig {
    pub basis: Basis,
    pub mode: Mode,
    pub symmetry: Symmetry,
    pub min_k: usize,
    pub max_k: usize,
    pub per_size: Limits,
    /// Solutions to enumerate per satisfiable size (at least 1).
    pub enumerate: usize,
    /// Constant-line polarities to try; an empty list means no ancillae.
    pub ancilla_sets: Vec<Vec<bool>>,
    /// Stop after the first satisfiable size.
    pub stop_at_first: bool,
    pub seed: u64,
    /// Exact number of cells per function name; sizes whose cell count
    /// differs from the total are skipped as unsat.
    pub gate_counts: Option<BTreeMap<String, usize>>,
}

impl SynthesisConfig {
    pub fn new(basis: Basis, mode: Mode, max_k: usize) -> Self {
        SynthesisConfig {
            basis,
            mode,
            symmetry: Symmetry::NonStrict,
            min_k: 0,
            max_k,
            per_size: Limits::unlimited(),
            enumerate: 1,
            ancilla_sets: Vec::new(),
            stop_at_first: true,
            seed: 0,
            gate_counts: None,
        }
    }

    /// Tries every polarity of `n` ancillae.
    pub fn with_ancillae(mut self, n: usize) -> Self {
        self.ancilla_sets = all_polarities(n);
        self
    }
}

/// All `2^n` constant vectors, all-false first.
pub fn all_polarities(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n)
        .map(|m| (0..n).map(|i| (m >> i) & 1 == 1).collect())
        .collect()
}

#[derive(Clone, Debug, Default)]
pub struct SynthesisOutcome {
    /// Verified circuits with their sizes, in discovery order.
    pub circuits: Vec<(usize, Circuit)>,
    pub bounds: SizeBounds,
    pub records: Vec<SizeRecord>,
}

/// Tries `k = min_k, min_k + 1, ...` cells until a solution is found (or
/// through `max_k` when `stop_at_first` is off). Timeouts are recorded and
/// do not end the sweep.
pub fn synthesize(
    cfg: &SynthesisConfig,
    psi: &Circuit,
) -> Result<SynthesisOutcome, SynthesisError> {
    synthesize_with(cfg, psi, |_| {})
}

/// [`synthesize`] with a callback after each size.
pub fn synthesize_with(
    cfg: &SynthesisConfig,
    psi: &Circuit,
    mut progress: impl FnMut(&SizeRecord),
) -> Result<SynthesisOutcome, SynthesisError> {
    if cfg.enumerate == 0 {
        return Err(SynthesisError::Config(
            "enumerate must be at least 1".into(),
        ));
    }
    if cfg.min_k > cfg.max_k {
        return Err(SynthesisError::Config("min_k exceeds max_k".into()));
    }
    let sets: Vec<Vec<bool>> = if cfg.ancilla_sets.is_empty() {
        vec![Vec::new()]
    } else {
        cfg.ancilla_sets.clone()
    };
    let mut out = SynthesisOutcome::default();
    for k in cfg.min_k..=cfg.max_k {
        let started = Instant::now();
        let budget = cfg.per_size.budget();
        let mut stats = Stats::default();
        let mut found = 0;
        let mut timed_out = false;
        for anc in &sets {
            let spec = FabricSpec {
                k,
                mode: cfg.mode,
                symmetry: cfg.symmetry,
                ancillae: anc.clone(),
            };
            let enc = encode_synthesis(&cfg.basis, psi, &spec)?;
            let mut s = QbfSession::new(&enc.qbf, EXPANSION_CAP, cfg.seed)?;
            if let Some(want) = &cfg.gate_counts {
                restrict_histogram(&mut s, &enc, want)?;
            }
            while found < cfg.enumerate {
                let r = s.solve(&budget)?;
                stats.merge(&r.stats);
                match r.status {
                    QbfStatus::Sat(w) => {
                        let c = enc.reconstruct(&w)?;
                        ensure_sound(&c, psi)?;
                        out.circuits.push((k, c));
                        found += 1;
                        s.block(&w);
                    }
                    QbfStatus::Unsat => break,
                    QbfStatus::Timeout => {
                        timed_out = true;
                        break;
                    }
                }
            }
            if found >= cfg.enumerate || timed_out {
                break;
            }
        }
        let status = if found > 0 {
            SizeStatus::Sat
        } else if timed_out {
            SizeStatus::Timeout
        } else {
            SizeStatus::Unsat
        };
        out.bounds.record(k, status);
        let rec = SizeRecord {
            k,
            status,
            solutions: found,
            time: started.elapsed(),
            stats,
        };
        progress(&rec);
        out.records.push(rec);
        if status == SizeStatus::Sat && cfg.stop_at_first {
            break;
        }
    }
    Ok(out)
}

/// Largest `|B|^k` for which a gate-count restriction is enumerated.
const HISTOGRAM_CAP: usize = 1 << 16;

/// Blocks every combination of cell codes whose multiset of function names
/// differs from `want`.
fn restrict_histogram(
    s: &mut QbfSession,
    enc: &SynthEncoding,
    want: &BTreeMap<String, usize>,
) -> Result<(), SynthesisError> {
    let (b, k) = (enc.basis.len(), enc.cells.len());
    let combos = b.checked_pow(k as u32).filter(|&c| c <= HISTOGRAM_CAP);
    let combos = combos
        .ok_or_else(|| SynthesisError::Config("gate-count restriction is too large".into()))?;
    let pos: BTreeMap<Var, usize> = enc
        .qbf
        .s
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i + 1))
        .collect();
    for mut idx in 0..combos {
        let mut codes = Vec::with_capacity(k);
        for _ in 0..k {
            codes.push(idx % b);
            idx /= b;
        }
        let mut hist: BTreeMap<String, usize> = BTreeMap::new();
        for &c in &codes {
            *hist
                .entry(enc.basis.functions()[c].name().to_string())
                .or_insert(0) += 1;
        }
        if &hist == want {
            continue;
        }
        let mut clause = Vec::new();
        for (cell, &code) in enc.cells.iter().zip(&codes) {
            for (bit, &(v, val)) in cell
                .encode(code)
                .expect("all codes allowed")
                .iter()
                .enumerate()
            {
                debug_assert_eq!(v, cell.sel[bit]);
                clause.push(Lit::new(pos[&v] as Var, val));
            }
        }
        s.add_outer_clause(&clause);
    }
    Ok(())
}

/// Decodes an arbitrary witness of a `k`-cell encoding; exposed for tooling.
pub fn reconstruct(
    basis: &Basis,
    psi: &Circuit,
    spec: &FabricSpec,
    w: &Witness,
) -> Result<Circuit, SynthesisError> {
    Ok(encode_synthesis(basis, psi, spec)?.reconstruct(w)?)
}

/// A size that certainly admits a solution in the standard sense: the
/// requirement's own gate count if every gate is in the basis, otherwise
/// the gate count of a two-level sum of minterms over 2-input gates.
pub fn default_upper_bound(basis: &Basis, psi: &Circuit) -> Result<usize, SynthesisError> {
    let all_in = psi.nodes().iter().all(|n| match &n.kind {
        NodeKind::Gate(f) => basis.contains(f),
        _ => true,
    });
    if all_in {
        return Ok(psi.gate_count());
    }
    let t = psi.truth_table_capped(EVAL_CAP)?;
    let m = t.arity_in();
    let mut total = m;
    for j in 0..t.arity_out() {
        let mt = t.column(j)?.iter().filter(|&&b| b).count();
        total += if mt == 0 {
            1
        } else {
            mt * m.saturating_sub(1) + mt - 1
        };
    }
    Ok(total)
}

/// Result of the brute-force topology search.
#[derive(Clone, Debug, Default)]
pub struct ExhaustiveOutcome {
    pub min_size: Option<usize>,
    /// One verified circuit per solvable topology at the minimal size.
    pub circuits: Vec<Circuit>,
    pub subsets_examined: u64,
    pub topologies_solved: u64,
    pub bounds: SizeBounds,
}

/// Directed edge count of the complete `m`-input, `n`-output, `k`-gate
/// fabric graph: `k(m + n + k - 1)`.
pub fn complete_fabric_edges(m: usize, n: usize, k: usize) -> usize {
    k * (m + n + k - 1)
}

/// Enumerates edge subsets of the complete fabric graph for `k = 1, 2, ...`
/// up to `max_k`, labels each well-formed topology, and stops at the first
/// size with a solution. Sizes whose subset count exceeds `2^max_edges` are
/// refused. Gate fan-ins are tried in every slot order; the basis must be
/// single-output.
pub fn exhaustive_search(
    basis: &Basis,
    psi: &Circuit,
    max_k: usize,
    max_edges: usize,
) -> Result<ExhaustiveOutcome, SynthesisError> {
    if basis.max_arity_out() != 1 {
        return Err(SynthesisError::Config(
            "exhaustive search needs single-output functions".into(),
        ));
    }
    check_same_interface(psi, psi)?;
    let (m, n) = (psi.input_nodes().len(), psi.outputs().len());
    let mut out = ExhaustiveOutcome::default();
    if let Some(c) = wire_solution(psi)? {
        ensure_sound(&c, psi)?;
        out.bounds.record(0, SizeStatus::Sat);
        out.min_size = Some(0);
        out.circuits.push(c);
        return Ok(out);
    }
    out.bounds.record(0, SizeStatus::Unsat);
    for k in 1..=max_k {
        let edges = enumerate_edges(m, n, k);
        if edges.len() > max_edges {
            return Err(SynthesisError::SearchTooLarge { edges: edges.len() });
        }
        for mask in 0u64..(1u64 << edges.len()) {
            out.subsets_examined += 1;
            let chosen: Vec<&FabricEdge> = edges
                .iter()
                .enumerate()
                .filter(|(i, _)| (mask >> i) & 1 == 1)
                .map(|(_, e)| e)
                .collect();
            let Some((fanins, out_driver)) = well_formed(&chosen, n, k) else {
                continue;
            };
            for order in slot_orders(&fanins) {
                let c = skeleton(psi, &order, &out_driver);
                let miter = match create_miter(basis, &c.topology(), psi) {
                    Ok(x) => x,
                    Err(EncodeError::Incompatible { .. }) => continue,
                    Err(e) => return Err(e.into()),
                };
                let mut s = QbfSession::new(&miter.qbf, EXPANSION_CAP, 0)?;
                if let QbfStatus::Sat(w) = s.solve(&Budget::unlimited())?.status {
                    let sol = miter.reconstruct(&w)?;
                    ensure_sound(&sol, psi)?;
                    out.circuits.push(sol);
                    out.topologies_solved += 1;
                }
            }
        }
        if out.circuits.is_empty() {
            out.bounds.record(k, SizeStatus::Unsat);
        } else {
            out.bounds.record(k, SizeStatus::Sat);
            out.min_size = Some(k);
            break;
        }
    }
    Ok(out)
}

/// The gate-free realization of `psi`, if every output copies some input.
fn wire_solution(psi: &Circuit) -> Result<Option<Circuit>, SynthesisError> {
    let m = psi.input_nodes().len();
    let rows: Vec<Vec<bool>> = (0..1usize << m)
        .map(|r| (0..m).map(|i| (r >> (m - 1 - i)) & 1 == 1).collect())
        .collect();
    let outs = rows
        .iter()
        .map(|bits| psi.evaluate_bits(bits))
        .collect::<Result<Vec<_>, _>>()?;
    let mut c = Circuit::new();
    let ins: Vec<usize> = psi
        .input_names()
        .into_iter()
        .map(|nm| c.add_input(nm))
        .collect();
    for (o, name) in psi.output_names().into_iter().enumerate() {
        let Some(i) = (0..m).find(|&i| rows.iter().zip(&outs).all(|(b, y)| b[i] == y[o])) else {
            return Ok(None);
        };
        c.add_output(name, ins[i]);
    }
    Ok(Some(c))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FabricEdge {
    InputToGate(usize, usize),
    GateToGate(usize, usize),
    GateToOutput(usize, usize),
}

fn enumerate_edges(m: usize, n: usize, k: usize) -> Vec<FabricEdge> {
    let mut e = Vec::new();
    for g in 0..k {
        e.extend((0..m).map(|i| FabricEdge::InputToGate(i, g)));
        e.extend(
            (0..k)
                .filter(|&h| h != g)
                .map(|h| FabricEdge::GateToGate(h, g)),
        );
        e.extend((0..n).map(|o| FabricEdge::GateToOutput(g, o)));
    }
    e
}

/// Source of a gate input: `Ok(pi)` or `Err(gate)`.
type Driver = Result<usize, usize>;

/// Per-gate fan-in lists if the subset is a usable topology: every output
/// driven exactly once, no two outputs on one gate, every gate driven,
/// and no cycle.
fn well_formed(
    edges: &[&FabricEdge],
    n: usize,
    k: usize,
) -> Option<(Vec<Vec<Driver>>, Vec<usize>)> {
    let mut fanin: Vec<Vec<Driver>> = vec![Vec::new(); k];
    let mut out_driver = vec![None; n];
    let mut drives_output = vec![false; k];
    for e in edges {
        match **e {
            FabricEdge::InputToGate(i, g) => fanin[g].push(Ok(i)),
            FabricEdge::GateToGate(h, g) => fanin[g].push(Err(h)),
            FabricEdge::GateToOutput(g, o) => {
                if out_driver[o].is_some() || drives_output[g] {
                    return None;
                }
                out_driver[o] = Some(g);
                drives_output[g] = true;
            }
        }
    }
    if out_driver.iter().any(Option::is_none) || fanin.iter().any(Vec::is_empty) {
        return None;
    }
    // Kahn's algorithm over gate-to-gate edges
    let mut indeg: Vec<usize> = fanin
        .iter()
        .map(|f| f.iter().filter(|d| d.is_err()).count())
        .collect();
    let mut ready: Vec<usize> = (0..k).filter(|&g| indeg[g] == 0).collect();
    let mut seen = 0;
    while let Some(h) = ready.pop() {
        seen += 1;
        for g in 0..k {
            if fanin[g].contains(&Err(h)) {
                indeg[g] -= 1;
                if indeg[g] == 0 {
                    ready.push(g);
                }
            }
        }
    }
    (seen == k).then(|| {
        (
            fanin,
            out_driver
                .into_iter()
                .map(|d| d.expect("checked above"))
                .collect(),
        )
    })
}

/// Every combination of per-gate fan-in permutations.
fn slot_orders(fanins: &[Vec<Driver>]) -> Vec<Vec<Vec<Driver>>> {
    let mut acc: Vec<Vec<Vec<Driver>>> = vec![Vec::new()];
    for f in fanins {
        let perms = permutations(f);
        acc = acc
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.push(p.clone());
                    v
                })
            })
            .collect();
    }
    acc
}

fn permutations<T: Clone>(xs: &[T]) -> Vec<Vec<T>> {
    if xs.len() <= 1 {
        return vec![xs.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..xs.len() {
        let mut rest = xs.to_vec();
        let head = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, head.clone());
            out.push(p);
        }
    }
    out
}

/// A circuit with placeholder gates realizing the chosen topology.
fn skeleton(psi: &Circuit, fanins: &[Vec<Driver>], out_driver: &[usize]) -> Circuit {
    let mut c = Circuit::new();
    let ins: Vec<usize> = psi
        .input_names()
        .into_iter()
        .map(|nm| c.add_input(nm))
        .collect();
    let gates: Vec<usize> = fanins
        .iter()
        .map(|f| c.add_node(NodeKind::Gate(BooleanFunction::nary(NaryOp::And, f.len()))))
        .collect();
    for (g, f) in fanins.iter().enumerate() {
        for (slot, d) in f.iter().enumerate() {
            let from = match *d {
                Ok(i) => Wire::new(ins[i], 0),
                Err(h) => Wire::new(gates[h], 0),
            };
            c.add_edge(from, gates[g], slot);
        }
    }
    for (name, &g) in psi.output_names().into_iter().zip(out_driver) {
        c.add_output(name, Wire::new(gates[g], 0));
    }
    c
}
