//! Runs a DIMACS-speaking solver as a child process.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use thiserror::Error;
use wait_timeout::ChildExt;

use super::{first_falsified, Budget, SolveResult, SolveStatus, Stats};
use crate::formula::{Cnf, Lit};

/// Environment variable naming the default external solver command.
pub const SOLVER_ENV: &str = "QSYNTH_SAT_SOLVER";

#[derive(Debug, Error)]
pub enum ExternalError {
    #[error("empty solver command")]
    EmptyCommand,
    #[error("could not run solver: {0}")]
    Io(#[from] std::io::Error),
    #[error("solver output has no status line")]
    NoStatus,
    #[error("cannot parse solver output: {0}")]
    Parse(String),
    #[error("solver model fails clause {0}")]
    Verification(usize),
}

/// Writes `cnf` to a temporary file, runs `command <file>`, and parses the
/// `s`/`v` lines of its output. The model is checked against `cnf`.
pub fn solve_sat_external(
    cnf: &Cnf,
    command: &str,
    budget: &Budget,
) -> Result<SolveResult, ExternalError> {
    let mut parts = command.split_whitespace();
    let program = parts.next().ok_or(ExternalError::EmptyCommand)?;
    let mut file = tempfile::Builder::new().suffix(".cnf").tempfile()?;
    file.write_all(cnf.to_dimacs().as_bytes())?;
    file.flush()?;

    let started = Instant::now();
    let mut child = Command::new(program)
        .args(parts)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()?;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        stdout.read_to_string(&mut s).map(|_| s)
    });
    let timed_out = match budget.deadline {
        Some(d) => {
            let left = d
                .saturating_duration_since(Instant::now())
                .max(Duration::from_millis(1));
            match child.wait_timeout(left)? {
                Some(_) => false,
                None => {
                    let _ = child.kill();
                    let _ = child.wait();
                    true
                }
            }
        }
        None => {
            child.wait()?;
            false
        }
    };
    let out = reader
        .join()
        .map_err(|_| ExternalError::Parse("reader thread panicked".into()))??;
    let stats = Stats {
        time: started.elapsed(),
        ..Stats::default()
    };
    if timed_out {
        return Ok(SolveResult {
            status: SolveStatus::Timeout,
            stats,
        });
    }
    let status = parse_output(&out, cnf)?;
    Ok(SolveResult { status, stats })
}

fn parse_output(out: &str, cnf: &Cnf) -> Result<SolveStatus, ExternalError> {
    let mut status = None;
    let mut model = vec![false; cnf.num_vars as usize + 1];
    for line in out.lines() {
        let t = line.trim();
        if let Some(rest) = t.strip_prefix("s ") {
            status = Some(match rest.trim() {
                "SATISFIABLE" => 10,
                "UNSATISFIABLE" => 20,
                "UNKNOWN" => 0,
                other => return Err(ExternalError::Parse(format!("unknown status {other:?}"))),
            });
        } else if let Some(rest) = t.strip_prefix("v") {
            for tok in rest.split_whitespace() {
                let x: i64 = tok
                    .parse()
                    .map_err(|_| ExternalError::Parse(format!("bad literal {tok:?}")))?;
                if x == 0 {
                    continue;
                }
                let l = Lit::from_dimacs(x);
                if let Some(slot) = model.get_mut(l.var() as usize) {
                    *slot = !l.is_negated();
                }
            }
        }
    }
    match status.ok_or(ExternalError::NoStatus)? {
        10 => {
            if let Some(i) = first_falsified(cnf, &model) {
                return Err(ExternalError::Verification(i));
            }
            Ok(SolveStatus::Sat(model))
        }
        20 => Ok(SolveStatus::Unsat),
        _ => Ok(SolveStatus::Timeout),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_standard_output() {
        let mut cnf = Cnf::new(2);
        cnf.add_clause([Lit::pos(1)]);
        cnf.add_clause([Lit::neg(2)]);
        let s = parse_output("c hi\ns SATISFIABLE\nv 1 -2 0\n", &cnf).unwrap();
        assert_eq!(s, SolveStatus::Sat(vec![false, true, false]));
        assert!(matches!(
            parse_output("garbage", &cnf),
            Err(ExternalError::NoStatus)
        ));
        assert!(matches!(
            parse_output("s SATISFIABLE\nv -1 0\n", &cnf),
            Err(ExternalError::Verification(0))
        ));
        assert_eq!(
            parse_output("s UNSATISFIABLE\n", &cnf).unwrap(),
            SolveStatus::Unsat
        );
    }

    #[test]
    fn missing_program_is_an_error() {
        let r = solve_sat_external(
            &Cnf::new(1),
            "/nonexistent/solver-binary",
            &Budget::unlimited(),
        );
        assert!(matches!(r, Err(ExternalError::Io(_))));
    }
}
