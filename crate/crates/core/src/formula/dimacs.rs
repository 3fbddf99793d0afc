//! DIMACS and QDIMACS text formats.

use std::fmt;

use thiserror::Error;

use super::qbf::Quant;
use super::{write_clause, Cnf, Lit, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

/// A prenex clausal QBF.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Qdimacs {
    pub num_vars: Var,
    pub prefix: Vec<(Quant, Vec<Var>)>,
    pub clauses: Vec<Vec<Lit>>,
}

impl fmt::Display for Qdimacs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = format!("p cnf {} {}\n", self.num_vars, self.clauses.len());
        for (q, vars) in &self.prefix {
            s.push(if *q == Quant::Exists { 'e' } else { 'a' });
            for v in vars {
                s.push_str(&format!(" {v}"));
            }
            s.push_str(" 0\n");
        }
        for c in &self.clauses {
            write_clause(&mut s, c);
        }
        f.write_str(&s)
    }
}

struct Parsed {
    num_vars: Var,
    prefix: Vec<(Quant, Vec<Var>)>,
    clauses: Vec<Vec<Lit>>,
}

fn parse(text: &str, allow_prefix: bool) -> Result<Parsed, DimacsError> {
    let mut header: Option<(Var, usize)> = None;
    let mut prefix = Vec::new();
    let mut clauses = Vec::new();
    let mut current: Vec<Lit> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        let err = |msg: &str| DimacsError::Parse {
            line,
            msg: msg.to_string(),
        };
        if t.is_empty() || t.starts_with('c') || t.starts_with('%') {
            continue;
        }
        if t.starts_with('p') {
            let tok: Vec<&str> = t.split_whitespace().collect();
            if tok.len() != 4 || tok[1] != "cnf" {
                return Err(err("malformed header"));
            }
            let nv = tok[2].parse().map_err(|_| err("bad variable count"))?;
            let nc = tok[3].parse().map_err(|_| err("bad clause count"))?;
            header = Some((nv, nc));
            continue;
        }
        let Some((nv, _)) = header else {
            return Err(DimacsError::MissingHeader);
        };
        if t.starts_with('e') || t.starts_with('a') {
            if !allow_prefix {
                return Err(err("quantifier line in plain DIMACS"));
            }
            if !clauses.is_empty() {
                return Err(err("quantifier line after clauses"));
            }
            let q = if t.starts_with('e') {
                Quant::Exists
            } else {
                Quant::Forall
            };
            let mut vars = Vec::new();
            let mut closed = false;
            for tok in t[1..].split_whitespace() {
                let v: Var = tok.parse().map_err(|_| err("bad variable"))?;
                if v == 0 {
                    closed = true;
                    break;
                }
                if v > nv {
                    return Err(err("variable exceeds header count"));
                }
                vars.push(v);
            }
            if !closed {
                return Err(err("quantifier line not terminated by 0"));
            }
            prefix.push((q, vars));
            continue;
        }
        for tok in t.split_whitespace() {
            let x: i64 = tok.parse().map_err(|_| err("bad literal"))?;
            if x == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if x.unsigned_abs() > nv as u64 {
                    return Err(err("literal exceeds header variable count"));
                }
                current.push(Lit::from_dimacs(x));
            }
        }
    }
    let Some((num_vars, nc)) = header else {
        return Err(DimacsError::MissingHeader);
    };
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != nc {
        return Err(DimacsError::ClauseCount {
            declared: nc,
            found: clauses.len(),
        });
    }
    Ok(Parsed {
        num_vars,
        prefix,
        clauses,
    })
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let p = parse(text, false)?;
    Ok(Cnf {
        num_vars: p.num_vars,
        clauses: p.clauses,
    })
}

pub fn parse_qdimacs(text: &str) -> Result<Qdimacs, DimacsError> {
    let p = parse(text, true)?;
    Ok(Qdimacs {
        num_vars: p.num_vars,
        prefix: p.prefix,
        clauses: p.clauses,
    })
}
