//! BENCH netlist reader and writer.
//!
//! Besides the ISCAS-style `INPUT`, `OUTPUT` and `sig = GATE(args)` lines the
//! dialect accepts:
//!
//! * `sig[0..2] = CSWAP(c, a, b)` or plain `sig = CSWAP(...)` for multi-output
//!   gates; output `j` is referenced as `sig.j`;
//! * `CONST0()` / `CONST1()` zero-input gates;
//! * `ANC0()` / `ANC1()` constant ancilla sources, which are not gates;
//! * alias lines `name = signal`, used for outputs tied to other signals.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use super::{BooleanFunction, Circuit, NaryOp, NodeKind, Wire};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BenchError {
    #[error("line {line}: syntax error: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: unknown gate {name:?} with {arity} inputs")]
    UnknownGate {
        line: usize,
        name: String,
        arity: usize,
    },
    #[error("line {line}: signal {name:?} is defined twice")]
    Redefinition { line: usize, name: String },
    #[error("signal {0:?} is used but never defined")]
    Undefined(String),
    #[error("combinational loop through signal {0:?}")]
    Loop(String),
}

/// Resolves a mnemonic of the built-in gate library at the given input count.
pub fn builtin_gate(mnemonic: &str, arity: usize) -> Option<BooleanFunction> {
    let upper = mnemonic.to_ascii_uppercase();
    if let Some(op) = NaryOp::from_mnemonic(&upper) {
        return (arity >= 1).then(|| BooleanFunction::nary(op, arity));
    }
    let f = match (upper.as_str(), arity) {
        ("NOT" | "INV", 1) => BooleanFunction::not(),
        ("BUF" | "BUFF", 1) => BooleanFunction::buf(),
        ("IMPL", 2) => BooleanFunction::implication(),
        ("ITE", 3) => BooleanFunction::ite(),
        ("CSWAP" | "FREDKIN", 3) => BooleanFunction::fredkin(),
        ("CCNOT" | "TOFFOLI", 3) => BooleanFunction::toffoli(),
        ("CMP", 2) => BooleanFunction::comparator(),
        ("CONST0", 0) => BooleanFunction::constant(false),
        ("CONST1", 0) => BooleanFunction::constant(true),
        _ => return None,
    };
    Some(f)
}

pub fn parse_bench(text: &str) -> Result<Circuit, BenchError> {
    parse_bench_with(text, &[])
}

enum Def {
    Gate {
        mnemonic: String,
        args: Vec<String>,
        outputs: Option<usize>,
    },
    Alias(String),
    Ancilla(bool),
}

/// Parses a netlist; `library` functions are matched by name before the built-ins.
pub fn parse_bench_with(text: &str, library: &[BooleanFunction]) -> Result<Circuit, BenchError> {
    let mut inputs: Vec<String> = Vec::new();
    let mut outputs: Vec<String> = Vec::new();
    let mut defs: Vec<(usize, String, Def)> = Vec::new();
    let mut defined: HashSet<String> = HashSet::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let syntax = |msg: &str| BenchError::Syntax {
            line,
            msg: msg.to_string(),
        };
        if let Some(eq) = content.find('=') {
            let lhs = content[..eq].trim();
            let rhs = content[eq + 1..].trim();
            let (name, range) = parse_lhs(lhs).ok_or_else(|| syntax("bad signal name"))?;
            if !defined.insert(name.clone()) {
                return Err(BenchError::Redefinition { line, name });
            }
            let def = if let Some(open) = rhs.find('(') {
                if !rhs.ends_with(')') {
                    return Err(syntax("missing ')'"));
                }
                let mnemonic = rhs[..open].trim().to_string();
                if !is_ident(&mnemonic) {
                    return Err(syntax("bad gate mnemonic"));
                }
                let inner = rhs[open + 1..rhs.len() - 1].trim();
                let args: Vec<String> = if inner.is_empty() {
                    Vec::new()
                } else {
                    inner.split(',').map(|s| s.trim().to_string()).collect()
                };
                if args.iter().any(|a| !is_signal(a)) {
                    return Err(syntax("bad argument list"));
                }
                match mnemonic.to_ascii_uppercase().as_str() {
                    "ANC0" if args.is_empty() => Def::Ancilla(false),
                    "ANC1" if args.is_empty() => Def::Ancilla(true),
                    _ => Def::Gate {
                        mnemonic,
                        args,
                        outputs: range,
                    },
                }
            } else if is_signal(rhs) {
                Def::Alias(rhs.to_string())
            } else {
                return Err(syntax("expected GATE(args) or a signal name"));
            };
            defs.push((line, name, def));
        } else if let Some(arg) = keyword_arg(content, "INPUT") {
            let name = arg.ok_or_else(|| syntax("bad INPUT line"))?;
            if !defined.insert(name.clone()) {
                return Err(BenchError::Redefinition { line, name });
            }
            inputs.push(name);
        } else if let Some(arg) = keyword_arg(content, "OUTPUT") {
            outputs.push(arg.ok_or_else(|| syntax("bad OUTPUT line"))?);
        } else {
            return Err(syntax("unrecognized line"));
        }
    }

    let mut c = Circuit::new();
    let mut wire_of: HashMap<String, Wire> = HashMap::new();
    for name in &inputs {
        let id = c.add_input(name.clone());
        wire_of.insert(name.clone(), id.into());
    }
    let index: HashMap<&str, usize> = defs
        .iter()
        .enumerate()
        .map(|(i, (_, n, _))| (n.as_str(), i))
        .collect();
    // 0 = unvisited, 1 = in progress, 2 = done
    let mut state = vec![0u8; defs.len()];

    fn base_name(sig: &str) -> (&str, Option<usize>) {
        if let Some(dot) = sig.rfind('.') {
            if let Ok(j) = sig[dot + 1..].parse::<usize>() {
                return (&sig[..dot], Some(j));
            }
        }
        (sig, None)
    }

    struct Ctx<'a> {
        defs: &'a [(usize, String, Def)],
        index: &'a HashMap<&'a str, usize>,
        library: &'a [BooleanFunction],
    }

    fn build(
        i: usize,
        ctx: &Ctx<'_>,
        state: &mut [u8],
        c: &mut Circuit,
        wire_of: &mut HashMap<String, Wire>,
    ) -> Result<(), BenchError> {
        if state[i] == 2 {
            return Ok(());
        }
        let (line, name, def) = &ctx.defs[i];
        if state[i] == 1 {
            return Err(BenchError::Loop(name.clone()));
        }
        state[i] = 1;
        let resolve =
            |sig: &str, state: &mut [u8], c: &mut Circuit, wire_of: &mut HashMap<String, Wire>| {
                if let Some(w) = wire_of.get(sig) {
                    return Ok(*w);
                }
                let (base, _) = base_name(sig);
                let j = ctx
                    .index
                    .get(sig)
                    .or_else(|| ctx.index.get(base))
                    .copied()
                    .ok_or_else(|| BenchError::Undefined(sig.to_string()))?;
                build(j, ctx, state, c, wire_of)?;
                wire_of
                    .get(sig)
                    .copied()
                    .ok_or_else(|| BenchError::Undefined(sig.to_string()))
            };
        match def {
            Def::Alias(target) => {
                let w = resolve(target, state, c, wire_of)?;
                wire_of.insert(name.clone(), w);
            }
            Def::Ancilla(v) => {
                let id = c.add_ancilla(*v);
                c.set_node_name(id, name.clone());
                wire_of.insert(name.clone(), id.into());
            }
            Def::Gate {
                mnemonic,
                args,
                outputs,
            } => {
                let mut ws = Vec::with_capacity(args.len());
                for a in args {
                    ws.push(resolve(a, state, c, wire_of)?);
                }
                let f = ctx
                    .library
                    .iter()
                    .find(|f| f.name().eq_ignore_ascii_case(mnemonic) && f.arity_in() == args.len())
                    .cloned()
                    .or_else(|| builtin_gate(mnemonic, args.len()))
                    .ok_or_else(|| BenchError::UnknownGate {
                        line: *line,
                        name: mnemonic.clone(),
                        arity: args.len(),
                    })?;
                if let Some(n) = outputs {
                    if *n != f.arity_out() {
                        return Err(BenchError::Syntax {
                            line: *line,
                            msg: format!(
                                "{mnemonic} has {} outputs, range declares {n}",
                                f.arity_out()
                            ),
                        });
                    }
                }
                let n_out = f.arity_out();
                let id = c.add_named_gate(f, &ws, Some(name.clone()));
                if n_out == 1 {
                    wire_of.insert(name.clone(), id.into());
                } else {
                    for j in 0..n_out {
                        wire_of.insert(format!("{name}.{j}"), Wire::new(id, j));
                    }
                }
            }
        }
        state[i] = 2;
        Ok(())
    }

    let ctx = Ctx {
        defs: &defs,
        index: &index,
        library,
    };
    for i in 0..defs.len() {
        build(i, &ctx, &mut state, &mut c, &mut wire_of)?;
    }
    for name in outputs {
        let w = wire_of
            .get(&name)
            .copied()
            .ok_or_else(|| BenchError::Undefined(name.clone()))?;
        c.add_output(name, w);
    }
    Ok(c)
}

fn keyword_arg(content: &str, kw: &str) -> Option<Option<String>> {
    let upper = content.to_ascii_uppercase();
    if !upper.starts_with(kw) {
        return None;
    }
    let rest = content[kw.len()..].trim();
    let arg = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .map(|a| a.trim().to_string())
        .filter(|a| is_signal(a));
    Some(arg)
}

/// `name` or `name[0..k]` (the latter declares k+1 outputs).
fn parse_lhs(lhs: &str) -> Option<(String, Option<usize>)> {
    if let Some(open) = lhs.find('[') {
        let name = lhs[..open].trim();
        let inner = lhs[open + 1..].strip_suffix(']')?;
        let (lo, hi) = inner.split_once("..")?;
        let lo: usize = lo.trim().parse().ok()?;
        let hi: usize = hi.trim().parse().ok()?;
        if lo != 0 || !is_ident(name) {
            return None;
        }
        Some((name.to_string(), Some(hi + 1)))
    } else if is_ident(lhs) {
        Some((lhs.to_string(), None))
    } else {
        None
    }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|ch| {
            ch.is_ascii_alphanumeric() || matches!(ch, '_' | '$' | '\'' | '<' | '>' | '-')
        })
}

fn is_signal(s: &str) -> bool {
    match s.rsplit_once('.') {
        Some((base, idx)) => is_ident(base) && idx.parse::<usize>().is_ok(),
        None => is_ident(s),
    }
}

/// Writes a circuit in the BENCH dialect. Nodes are emitted in topological order.
pub fn serialize_bench(c: &Circuit) -> String {
    let order = c
        .topo_order()
        .unwrap_or_else(|_| (0..c.nodes().len()).collect());
    let mut used: HashSet<String> = c.input_names().into_iter().collect();
    let mut sig: Vec<String> = vec![String::new(); c.nodes().len()];
    for &i in c.input_nodes() {
        if let NodeKind::Input(n) = &c.node(i).kind {
            sig[i] = n.clone();
        }
    }
    let output_names: HashSet<&str> = c.outputs().iter().map(|(n, _)| n.as_str()).collect();
    // Single-output gates that drive an output take its name when free.
    let mut takes: HashMap<usize, String> = HashMap::new();
    for (name, w) in c.outputs() {
        let node = c.node(w.node);
        if matches!(node.kind, NodeKind::Gate(_))
            && node.output_count() == 1
            && !takes.contains_key(&w.node)
            && !used.contains(name)
        {
            takes.insert(w.node, name.clone());
            used.insert(name.clone());
        }
    }
    for &id in &order {
        if matches!(c.node(id).kind, NodeKind::Input(_)) {
            continue;
        }
        if let Some(n) = takes.get(&id) {
            sig[id] = n.clone();
            continue;
        }
        let preferred = c
            .node(id)
            .name
            .clone()
            .filter(|n| is_ident(n) && !used.contains(n) && !output_names.contains(n.as_str()));
        let mut name = preferred.unwrap_or_else(|| format!("n{id}"));
        let mut bump = 0;
        while used.contains(&name) || output_names.contains(name.as_str()) {
            bump += 1;
            name = format!("n{id}_{bump}");
        }
        used.insert(name.clone());
        sig[id] = name;
    }
    let wire_name = |w: Wire| {
        if c.node(w.node).output_count() > 1 {
            format!("{}.{}", sig[w.node], w.output)
        } else {
            sig[w.node].clone()
        }
    };

    let mut out = String::new();
    for n in c.input_names() {
        let _ = writeln!(out, "INPUT({n})");
    }
    for (n, _) in c.outputs() {
        let _ = writeln!(out, "OUTPUT({n})");
    }
    for &id in &order {
        match &c.node(id).kind {
            NodeKind::Input(_) => {}
            NodeKind::Ancilla(v) => {
                let _ = writeln!(out, "{} = ANC{}()", sig[id], *v as u8);
            }
            NodeKind::Gate(f) => {
                let args: Vec<String> = c.fanin(id).into_iter().map(wire_name).collect();
                let lhs = if f.arity_out() > 1 {
                    format!("{}[0..{}]", sig[id], f.arity_out() - 1)
                } else {
                    sig[id].clone()
                };
                let _ = writeln!(out, "{lhs} = {}({})", f.name(), args.join(", "));
            }
        }
    }
    for (n, w) in c.outputs() {
        let s = wire_name(*w);
        if &s != n {
            let _ = writeln!(out, "{n} = {s}");
        }
    }
    out
}
