//! `qsynth`: batch front end for exact circuit synthesis.
//!
//! Exit codes: 0 success or equivalent, 1 definitive negative (unsat or
//! inequivalent), 2 usage or input error, 3 timeout or unknown.

mod manifest;
mod requirement;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use qbf_synth::bases::resolve_basis;
use qbf_synth::benchgen::{gen_alu, Family, FamilySpec};
use qbf_synth::circuit::bench::serialize_bench;
use qbf_synth::circuit::first_difference;
use qbf_synth::encoder::{create_miter, encode_synthesis, FabricSpec, Mode, Symmetry};
use qbf_synth::formula::{expand_universal, parse_dimacs, to_qdimacs, EXPANSION_CAP};
use qbf_synth::solver::{solve_sat_external, solve_sat_seeded, Budget, SolveStatus, SOLVER_ENV};
use qbf_synth::synthesis::{
    default_upper_bound, exhaustive_search, label_count, label_select, positional_pair,
    results_csv, synthesize_with, verify, Limits, SizeStatus, SynthesisConfig, SynthesisError,
};
use qbf_synth::{Basis, Circuit};

use manifest::Manifest;
use requirement::{parse_range, resolve, Requirement};

const OK: u8 = 0;
const NEGATIVE: u8 = 1;
const USAGE: u8 = 2;
const UNKNOWN: u8 = 3;

#[derive(Parser)]
#[command(
    name = "qsynth",
    version,
    about = "Exact circuit synthesis by 2-QBF expansion"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Common {
    /// Seed for solver tie-breaking
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Wall-clock budget per solve, in seconds
    #[arg(long, global = true, value_name = "SECS")]
    budget: Option<f64>,
    /// Conflict budget per solve
    #[arg(long, global = true)]
    conflicts: Option<u64>,
    /// Drop wall-clock budgets and timings so reruns give identical output
    #[arg(long, global = true)]
    deterministic: bool,
    /// key=value file with defaults (seed, budget, conflicts, basis, mode, symmetry, solver)
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Where to write the run manifest
    #[arg(long, global = true, value_name = "FILE")]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write ALU family members as BENCH files under OUT/family/n.bench
    BenchGen {
        family: String,
        /// `n`, `a..b` or `a,b,c`
        range: String,
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Pick basis functions for the requirement's own topology
    LabelSelect {
        requirement: String,
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Count the equivalent labelings of the requirement's topology
    LabelCount {
        requirement: String,
        #[command(flatten)]
        basis: BasisArg,
        /// Stop after this many labelings
        #[arg(long)]
        limit: Option<usize>,
        /// Print each labeling
        #[arg(long)]
        list: bool,
    },
    /// Search for a minimum-size circuit
    Synthesize {
        requirement: String,
        #[command(flatten)]
        basis: BasisArg,
        #[command(flatten)]
        fabric: FabricArgs,
        #[arg(long, default_value_t = 0)]
        min_k: usize,
        /// Largest size to try; defaults to a size known to be feasible
        #[arg(long)]
        max_k: Option<usize>,
        /// Solutions to enumerate at each satisfiable size
        #[arg(long, default_value_t = 1)]
        enumerate: usize,
        /// Keep sweeping sizes after the first satisfiable one
        #[arg(long)]
        all_sizes: bool,
        /// Require exactly N cells of a function, as NAME=N (repeatable)
        #[arg(long = "gate-count", value_name = "NAME=N")]
        gate_counts: Vec<String>,
        /// Per-size results CSV
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Directory for the BENCH files of every circuit found
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Brute-force search over fabric subgraphs (small instances only)
    Search {
        requirement: String,
        #[command(flatten)]
        basis: BasisArg,
        #[arg(long, default_value_t = 2)]
        max_k: usize,
        #[arg(long, default_value_t = 20)]
        max_edges: usize,
    },
    /// Check two circuits for equivalence
    Verify {
        a: String,
        b: String,
        /// Match ports by position instead of by name
        #[arg(long)]
        positional: bool,
    },
    /// Write the synthesis (or labeling) formula for an external solver
    Export {
        requirement: String,
        #[command(flatten)]
        basis: BasisArg,
        #[command(flatten)]
        fabric: FabricArgs,
        #[arg(long, short, default_value_t = 0)]
        k: usize,
        #[arg(long, value_enum, default_value_t = Format::Qdimacs)]
        format: Format,
        /// Export the labeling formula of the requirement's topology instead
        #[arg(long)]
        label: bool,
        /// Ancilla values as a bit string such as `00`
        #[arg(long, value_name = "BITS")]
        ancilla_values: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Also write the meaning of every selector variable
        #[arg(long, value_name = "FILE")]
        dump: Option<PathBuf>,
    },
    /// Solve a DIMACS CNF with the bundled solver or an external one
    Sat {
        file: PathBuf,
        /// External solver command; defaults to $QSYNTH_SAT_SOLVER
        #[arg(long)]
        solver: Option<String>,
        /// Use the bundled solver even if $QSYNTH_SAT_SOLVER is set
        #[arg(long)]
        internal: bool,
    },
}

#[derive(Args)]
struct BasisArg {
    /// Built-in basis, basis file, or gate list such as NOT,AND,OR
    #[arg(long)]
    basis: Option<String>,
}

#[derive(Args)]
struct FabricArgs {
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    symmetry: Option<SymmetryArg>,
    /// Number of constant ancilla lines (all polarities are tried)
    #[arg(long, default_value_t = 0)]
    ancilla: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Circuit,
    BooleanFunction,
    Network,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymmetryArg {
    Off,
    NonStrict,
    Strict,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Qdimacs,
    DimacsExpanded,
}

/// Flags merged with the config file.
struct Settings {
    seed: u64,
    limits: Limits,
    deterministic: bool,
    file: BTreeMap<String, String>,
    manifest: Option<PathBuf>,
}

impl Settings {
    fn load(c: &Common) -> Result<Self> {
        let file = match &c.config {
            Some(p) => read_config(p)?,
            None => BTreeMap::new(),
        };
        let get = |k: &str| file.get(k).map(String::as_str);
        let seed = match (c.seed, get("seed")) {
            (Some(s), _) => s,
            (None, Some(s)) => s.parse().context("config key seed")?,
            (None, None) => 0,
        };
        let deterministic = c.deterministic || get("deterministic") == Some("true");
        let budget = match (c.budget, get("budget")) {
            (Some(b), _) => Some(b),
            (None, Some(b)) => Some(b.parse().context("config key budget")?),
            (None, None) => None,
        };
        let conflicts = match (c.conflicts, get("conflicts")) {
            (Some(n), _) => Some(n),
            (None, Some(n)) => Some(n.parse().context("config key conflicts")?),
            (None, None) => None,
        };
        if deterministic && budget.is_some() {
            eprintln!("note: --deterministic ignores the wall-clock budget");
        }
        let time = budget
            .filter(|_| !deterministic)
            .map(|s| {
                if s.is_finite() && s >= 0.0 {
                    Ok(Duration::from_secs_f64(s))
                } else {
                    Err(anyhow!("budget must be a non-negative number of seconds"))
                }
            })
            .transpose()?;
        Ok(Settings {
            seed,
            limits: Limits { time, conflicts },
            deterministic,
            file,
            manifest: c.manifest.clone(),
        })
    }

    fn basis(&self, arg: &BasisArg) -> Result<Basis> {
        let spec = arg
            .basis
            .clone()
            .or_else(|| self.file.get("basis").cloned())
            .unwrap_or_else(|| "standard".into());
        Ok(resolve_basis(&spec)?)
    }

    fn mode(&self, arg: &FabricArgs) -> Result<Mode> {
        Ok(match (arg.mode, self.file.get("mode")) {
            (Some(ModeArg::Circuit), _) => Mode::Circuit,
            (Some(ModeArg::BooleanFunction), _) => Mode::BooleanFunction,
            (Some(ModeArg::Network), _) => Mode::Network,
            (None, Some(m)) => m.parse().map_err(|e: String| anyhow!(e))?,
            (None, None) => Mode::Circuit,
        })
    }

    fn symmetry(&self, arg: &FabricArgs) -> Result<Symmetry> {
        let name = match arg.symmetry {
            Some(SymmetryArg::Off) => "off",
            Some(SymmetryArg::NonStrict) => "non-strict",
            Some(SymmetryArg::Strict) => "strict",
            None => self
                .file
                .get("symmetry")
                .map_or("non-strict", String::as_str),
        };
        Ok(match name {
            "off" => Symmetry::Off,
            "non-strict" => Symmetry::NonStrict,
            "strict" => Symmetry::Strict,
            other => bail!("unknown symmetry setting {other:?}"),
        })
    }

    fn echo(&self, m: &mut Manifest) {
        m.config("seed", self.seed);
        m.config("deterministic", self.deterministic);
        m.config("budget_s", self.limits.time.map(|t| t.as_secs_f64()));
        m.config("conflicts", self.limits.conflicts);
    }

    fn save(&self, m: &Manifest, default: Option<PathBuf>) -> Result<()> {
        if let Some(p) = self.manifest.clone().or(default) {
            m.save(&p)?;
        }
        Ok(())
    }

    fn seconds(&self, d: Duration) -> Value {
        if self.deterministic {
            Value::Null
        } else {
            json!((d.as_secs_f64() * 1000.0).round() / 1000.0)
        }
    }
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .with_context(|| format!("{}:{}: expected key=value", path.display(), i + 1))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

/// Maps library errors to exit codes: timeouts are 3, everything else 2.
fn fail(e: anyhow::Error) -> u8 {
    eprintln!("error: {e:#}");
    match e.downcast_ref::<SynthesisError>() {
        Some(SynthesisError::Timeout) => UNKNOWN,
        _ => USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match Settings::load(&cli.common).and_then(|s| run(cli.cmd, &s)) {
        Ok(c) => c,
        Err(e) => fail(e),
    };
    ExitCode::from(code)
}

fn run(cmd: Cmd, s: &Settings) -> Result<u8> {
    match cmd {
        Cmd::BenchGen { family, range, out } => bench_gen(s, &family, &range, &out),
        Cmd::LabelSelect {
            requirement,
            basis,
            out,
        } => cmd_label_select(s, &resolve(&requirement)?, &s.basis(&basis)?, out),
        Cmd::LabelCount {
            requirement,
            basis,
            limit,
            list,
        } => cmd_label_count(s, &resolve(&requirement)?, &s.basis(&basis)?, limit, list),
        Cmd::Synthesize {
            requirement,
            basis,
            fabric,
            min_k,
            max_k,
            enumerate,
            all_sizes,
            gate_counts,
            csv,
            out,
        } => {
            let req = resolve(&requirement)?;
            let basis = s.basis(&basis)?;
            let max_k = match max_k {
                Some(k) => k,
                None => default_upper_bound(&basis, &req.circuit)?,
            };
            let mut cfg =
                SynthesisConfig::new(basis, s.mode(&fabric)?, max_k).with_ancillae(fabric.ancilla);
            cfg.symmetry = s.symmetry(&fabric)?;
            cfg.min_k = min_k;
            cfg.enumerate = enumerate.max(1);
            cfg.stop_at_first = !all_sizes;
            cfg.seed = s.seed;
            cfg.per_size = s.limits;
            if !gate_counts.is_empty() {
                cfg.gate_counts = Some(parse_gate_counts(&gate_counts)?);
            }
            cmd_synthesize(s, &req, &cfg, csv, out)
        }
        Cmd::Search {
            requirement,
            basis,
            max_k,
            max_edges,
        } => {
            let req = resolve(&requirement)?;
            let out = exhaustive_search(&s.basis(&basis)?, &req.circuit, max_k, max_edges)?;
            println!(
                "subsets={} topologies_solved={}",
                out.subsets_examined, out.topologies_solved
            );
            match out.min_size {
                Some(k) => {
                    println!("min_size={k}");
                    if let Some(c) = out.circuits.first() {
                        print!("{}", serialize_bench(c));
                    }
                    Ok(OK)
                }
                None => {
                    println!("min_size=none up to {max_k}");
                    Ok(NEGATIVE)
                }
            }
        }
        Cmd::Verify { a, b, positional } => cmd_verify(&a, &b, positional),
        Cmd::Export {
            requirement,
            basis,
            fabric,
            k,
            format,
            label,
            ancilla_values,
            out,
            dump,
        } => {
            let req = resolve(&requirement)?;
            let basis = s.basis(&basis)?;
            let (qbf, listing) = if label {
                let m = create_miter(&basis, &req.circuit.topology(), &req.circuit)?;
                let d = m.dump();
                (m.qbf, d)
            } else {
                let ancillae = match ancilla_values {
                    Some(bits) => parse_bits(&bits)?,
                    None => vec![false; fabric.ancilla],
                };
                let spec = FabricSpec {
                    k,
                    mode: s.mode(&fabric)?,
                    symmetry: s.symmetry(&fabric)?,
                    ancillae,
                };
                let e = encode_synthesis(&basis, &req.circuit, &spec)?;
                let d = e.dump();
                (e.qbf, d)
            };
            let text = match format {
                Format::Qdimacs => to_qdimacs(&qbf)?.to_string(),
                Format::DimacsExpanded => expand_universal(&qbf, EXPANSION_CAP)?.cnf.to_dimacs(),
            };
            match out {
                Some(p) => {
                    std::fs::write(&p, text).with_context(|| format!("writing {}", p.display()))?
                }
                None => print!("{text}"),
            }
            if let Some(p) = dump {
                std::fs::write(&p, listing).with_context(|| format!("writing {}", p.display()))?;
            }
            Ok(OK)
        }
        Cmd::Sat {
            file,
            solver,
            internal,
        } => cmd_sat(s, &file, solver, internal),
    }
}

fn bench_gen(s: &Settings, family: &str, range: &str, out: &Path) -> Result<u8> {
    let family: Family = family.parse()?;
    let specs = parse_range(range)?
        .into_iter()
        .map(|n| FamilySpec::new(family, n))
        .collect::<Result<Vec<_>, _>>()?;
    let mut m = Manifest::new("bench-gen");
    s.echo(&mut m);
    m.config("family", family.name());
    m.config("range", range);
    let dir = out.join(family.name());
    for spec in specs {
        let c = gen_alu(spec);
        let (pi, po, gates) = spec.expected_size();
        let path = dir.join(format!("{}.bench", spec.n()));
        m.write_artifact(&path, &serialize_bench(&c), c.validate().is_ok())?;
        m.rows.push(row([
            ("n", json!(spec.n())),
            ("inputs", json!(pi)),
            ("outputs", json!(po)),
            ("gates", json!(gates)),
        ]));
        println!("{} {} gates", path.display(), c.gate_count());
    }
    s.save(&m, Some(dir.join("manifest.json")))?;
    Ok(OK)
}

fn row<const N: usize>(kv: [(&str, Value); N]) -> BTreeMap<String, Value> {
    kv.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

fn cmd_label_select(
    s: &Settings,
    req: &Requirement,
    basis: &Basis,
    out: Option<PathBuf>,
) -> Result<u8> {
    let mut m = Manifest::new("label-select");
    s.echo(&mut m);
    m.config("basis", basis.name());
    m.input(&req.name, &req.content);
    let code = match label_select(basis, &req.circuit, s.limits) {
        Ok(c) => {
            let text = serialize_bench(&c);
            match &out {
                Some(p) => m.write_artifact(p, &text, true)?,
                None => print!("{text}"),
            }
            OK
        }
        Err(SynthesisError::NoSolution) => {
            eprintln!("no labeling over {} exists", basis.name());
            NEGATIVE
        }
        Err(SynthesisError::Timeout) => {
            eprintln!("budget exhausted");
            UNKNOWN
        }
        Err(e) => return Err(e.into()),
    };
    s.save(&m, None)?;
    Ok(code)
}

fn cmd_label_count(
    s: &Settings,
    req: &Requirement,
    basis: &Basis,
    limit: Option<usize>,
    list: bool,
) -> Result<u8> {
    let r = label_count(basis, &req.circuit, limit, s.limits)?;
    println!("count={} complete={}", r.count, r.complete);
    if list {
        for l in &r.labelings {
            let names: Vec<&str> = l.iter().map(|&f| basis.functions()[f].name()).collect();
            println!("{}", names.join(" "));
        }
    }
    let mut m = Manifest::new("label-count");
    s.echo(&mut m);
    m.config("basis", basis.name());
    m.config("limit", limit);
    m.input(&req.name, &req.content);
    m.rows.push(row([
        ("count", json!(r.count)),
        ("complete", json!(r.complete)),
        ("conflicts", json!(r.stats.conflicts)),
    ]));
    s.save(&m, None)?;
    let stopped_by_limit = limit.is_some_and(|l| r.count >= l);
    Ok(if r.complete || stopped_by_limit {
        OK
    } else {
        UNKNOWN
    })
}

fn parse_gate_counts(items: &[String]) -> Result<BTreeMap<String, usize>> {
    items
        .iter()
        .map(|it| {
            let (name, n) = it
                .split_once('=')
                .with_context(|| format!("{it:?}: expected NAME=N"))?;
            Ok((
                name.to_string(),
                n.parse().with_context(|| format!("bad count in {it:?}"))?,
            ))
        })
        .collect()
}

fn parse_bits(bits: &str) -> Result<Vec<bool>> {
    bits.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(anyhow!("ancilla values must be 0 or 1, got {c:?}")),
        })
        .collect()
}

fn cmd_synthesize(
    s: &Settings,
    req: &Requirement,
    cfg: &SynthesisConfig,
    csv: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<u8> {
    let outcome = synthesize_with(cfg, &req.circuit, |r| {
        eprintln!("k={} {} solutions={}", r.k, r.status, r.solutions);
    })?;
    let mut m = Manifest::new("synthesize");
    s.echo(&mut m);
    m.config("basis", cfg.basis.name());
    m.config("mode", cfg.mode.to_string());
    m.config("symmetry", format!("{:?}", cfg.symmetry));
    m.config("min_k", cfg.min_k);
    m.config("max_k", cfg.max_k);
    m.config("enumerate", cfg.enumerate);
    m.config("ancillae", cfg.ancilla_sets.first().map_or(0, Vec::len));
    m.input(&req.name, &req.content);
    for r in &outcome.records {
        m.rows.push(row([
            ("k", json!(r.k)),
            ("status", json!(r.status.to_string())),
            ("solutions", json!(r.solutions)),
            ("conflicts", json!(r.stats.conflicts)),
            ("wall_time_s", s.seconds(r.time)),
        ]));
    }
    if let Some(p) = &csv {
        let mut records = outcome.records.clone();
        if s.deterministic {
            for r in &mut records {
                r.time = Duration::ZERO;
            }
        }
        std::fs::write(p, results_csv(&req.name, req.n, &records))
            .with_context(|| format!("writing {}", p.display()))?;
    }
    if let Some(dir) = &out {
        for (i, (k, c)) in outcome.circuits.iter().enumerate() {
            let path = dir.join(format!("{}_k{k}_{i}.bench", req.name));
            m.write_artifact(&path, &serialize_bench(c), verify(c, &req.circuit)?)?;
        }
    }
    let b = &outcome.bounds;
    eprintln!(
        "lower={} upper={} optimum={}",
        b.lower(),
        b.upper().map_or("none".into(), |u| u.to_string()),
        b.optimum().map_or("unknown".into(), |u| u.to_string())
    );
    if out.is_none() {
        if let Some((k, c)) = outcome.circuits.first() {
            println!("# {} gates", k);
            print!("{}", serialize_bench(c));
        }
    }
    s.save(&m, out.map(|d| d.join("manifest.json")))?;
    Ok(if !outcome.circuits.is_empty() {
        OK
    } else if b.per_k.values().any(|&st| st == SizeStatus::Timeout) {
        UNKNOWN
    } else {
        NEGATIVE
    })
}

fn load_circuit(spec: &str) -> Result<Circuit> {
    Ok(resolve(spec)?.circuit)
}

fn cmd_verify(a: &str, b: &str, positional: bool) -> Result<u8> {
    let (mut ca, mut cb) = (load_circuit(a)?, load_circuit(b)?);
    if positional {
        match positional_pair(&ca, &cb) {
            Ok(p) => (ca, cb) = p,
            Err(e) => {
                eprintln!("{e}");
                return Ok(USAGE);
            }
        }
    }
    if let Err(e) = qbf_synth::circuit::check_same_interface(&ca, &cb) {
        eprintln!("{e}");
        return Ok(USAGE);
    }
    if !verify(&ca, &cb)? {
        println!("inequivalent");
        if let Ok(Some(row)) = first_difference(&ca, &cb) {
            let assignment: Vec<String> = row
                .iter()
                .map(|(n, v)| format!("{n}={}", u8::from(*v)))
                .collect();
            println!("counterexample: {}", assignment.join(" "));
        }
        return Ok(NEGATIVE);
    }
    println!("equivalent");
    Ok(OK)
}

fn cmd_sat(s: &Settings, file: &Path, solver: Option<String>, internal: bool) -> Result<u8> {
    let text =
        std::fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let cnf = parse_dimacs(&text)?;
    let mut budget = Budget::unlimited();
    budget.conflicts = s.limits.conflicts;
    if let Some(t) = s.limits.time {
        budget = budget.with_deadline(Some(std::time::Instant::now() + t));
    }
    let command = solver
        .or_else(|| std::env::var(SOLVER_ENV).ok())
        .or_else(|| s.file.get("solver").cloned())
        .filter(|c| !internal && !c.trim().is_empty());
    let r = match &command {
        Some(cmd) => solve_sat_external(&cnf, cmd, &budget)?,
        None => solve_sat_seeded(&cnf, &budget, s.seed)?,
    };
    eprintln!("solver={}", command.as_deref().unwrap_or("internal"));
    eprintln!("conflicts={}", r.stats.conflicts);
    eprintln!("decisions={}", r.stats.decisions);
    eprintln!("propagations={}", r.stats.propagations);
    Ok(match r.status {
        SolveStatus::Sat(model) => {
            println!("s SATISFIABLE");
            let lits: Vec<String> = (1..model.len())
                .map(|v| {
                    if model[v] {
                        format!("{v}")
                    } else {
                        format!("-{v}")
                    }
                })
                .collect();
            println!("v {} 0", lits.join(" "));
            OK
        }
        SolveStatus::Unsat => {
            println!("s UNSATISFIABLE");
            NEGATIVE
        }
        SolveStatus::Timeout => {
            println!("s UNKNOWN");
            UNKNOWN
        }
    })
}
