//! Component libraries.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::circuit::{BooleanFunction, NaryOp};

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("unknown basis {0:?}")]
    Unknown(String),
    #[error("basis is empty")]
    Empty,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An ordered, non-empty set of functions. Selector code `i` picks `functions[i]`.
#[derive(Clone, PartialEq, Eq)]
pub struct Basis {
    name: String,
    functions: Vec<BooleanFunction>,
}

impl fmt::Debug for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Basis({}: {:?})", self.name, self.functions)
    }
}

impl Basis {
    pub fn new(
        name: impl Into<String>,
        functions: Vec<BooleanFunction>,
    ) -> Result<Self, BasisError> {
        if functions.is_empty() {
            return Err(BasisError::Empty);
        }
        Ok(Basis {
            name: name.into(),
            functions,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn functions(&self) -> &[BooleanFunction] {
        &self.functions
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn max_arity_in(&self) -> usize {
        self.functions
            .iter()
            .map(|f| f.arity_in())
            .max()
            .unwrap_or(0)
    }

    pub fn max_arity_out(&self) -> usize {
        self.functions
            .iter()
            .map(|f| f.arity_out())
            .max()
            .unwrap_or(1)
    }

    /// True iff all functions share one input and one output arity.
    pub fn is_homogeneous(&self) -> bool {
        let f0 = &self.functions[0];
        self.functions
            .iter()
            .all(|f| f.arity_in() == f0.arity_in() && f.arity_out() == f0.arity_out())
    }

    /// Index of a function with the same semantics as `f`.
    pub fn position(&self, f: &BooleanFunction) -> Option<usize> {
        self.functions.iter().position(|g| g.same_semantics(f))
    }

    pub fn contains(&self, f: &BooleanFunction) -> bool {
        self.position(f).is_some()
    }
}

pub const BUILTIN_BASES: &[&str] = &[
    "standard",
    "reversible",
    "comparator",
    "ite",
    "nand",
    "nor",
    "netlist",
];

/// Widest gate in the `netlist` library.
pub const NETLIST_MAX_ARITY: usize = 5;

/// Named built-in libraries.
///
/// `netlist` is the gate library of ISCAS-style netlists: NOT, BUF and
/// AND/OR/NAND/NOR/XOR/XNOR at every width from 2 to [`NETLIST_MAX_ARITY`].
pub fn builtin_basis(name: &str) -> Result<Basis, BasisError> {
    use BooleanFunction as F;
    let fs = match name {
        "standard" => vec![
            F::not(),
            F::and2(),
            F::or2(),
            F::xor2(),
            F::implication(),
            F::xnor2(),
        ],
        "reversible" => vec![F::fredkin(), F::toffoli()],
        "comparator" => vec![F::comparator()],
        "ite" => vec![F::ite(), F::constant(true), F::constant(false)],
        "nand" => vec![F::nand2()],
        "nor" => vec![F::nor2()],
        "netlist" => {
            let mut v = vec![F::not(), F::buf()];
            for k in 2..=NETLIST_MAX_ARITY {
                for op in [
                    NaryOp::And,
                    NaryOp::Or,
                    NaryOp::Nand,
                    NaryOp::Nor,
                    NaryOp::Xor,
                    NaryOp::Xnor,
                ] {
                    v.push(F::nary(op, k));
                }
            }
            v
        }
        _ => return Err(BasisError::Unknown(name.to_string())),
    };
    Basis::new(name, fs)
}

/// Number of selector lines needed to address every function: `ceil(log2 |B|)`.
pub fn selector_width(b: &Basis) -> usize {
    bits_for(b.len())
}

/// `ceil(log2 n)`, with 0 for `n <= 1`.
pub fn bits_for(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Unordered input-slot pairs `(i, j)`, `i < j`, whose swap leaves the output tuple unchanged.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommutationMap {
    pub pairs: Vec<BTreeSet<(usize, usize)>>,
}

impl CommutationMap {
    pub fn commutes(&self, function: usize, i: usize, j: usize) -> bool {
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.pairs[function].contains(&(a, b))
    }
}

pub fn commuting_pairs(f: &BooleanFunction) -> BTreeSet<(usize, usize)> {
    let m = f.arity_in();
    let mut out = BTreeSet::new();
    if f.nary_op().is_some() {
        for i in 0..m {
            for j in i + 1..m {
                out.insert((i, j));
            }
        }
        return out;
    }
    let rows = f.rows().expect("basis functions fit the table cap");
    for i in 0..m {
        for j in i + 1..m {
            let (si, sj) = (m - 1 - i, m - 1 - j);
            let ok = (0..rows.len()).all(|r| {
                let bi = (r >> si) & 1;
                let bj = (r >> sj) & 1;
                let swapped = (r & !(1 << si) & !(1 << sj)) | (bj << si) | (bi << sj);
                rows[r] == rows[swapped]
            });
            if ok {
                out.insert((i, j));
            }
        }
    }
    out
}

pub fn commuting_input_pairs(b: &Basis) -> CommutationMap {
    CommutationMap {
        pairs: b.functions().iter().map(commuting_pairs).collect(),
    }
}

/// Parses a basis description: one function per line as `name m n hex...`
/// with one hex table per output. `#` starts a comment.
pub fn parse_basis(name: &str, text: &str) -> Result<Basis, BasisError> {
    let mut fs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| BasisError::Parse { line, msg };
        let tok: Vec<&str> = content.split_whitespace().collect();
        if tok.len() < 4 {
            return Err(err("expected `name m n hex...`".into()));
        }
        let m: usize = tok[1]
            .parse()
            .map_err(|_| err(format!("bad input count {:?}", tok[1])))?;
        let n: usize = tok[2]
            .parse()
            .map_err(|_| err(format!("bad output count {:?}", tok[2])))?;
        if tok.len() != 3 + n {
            return Err(err(format!(
                "expected {n} truth tables, found {}",
                tok.len() - 3
            )));
        }
        let f = BooleanFunction::from_hex(tok[0], m, &tok[3..]).map_err(|e| err(e.to_string()))?;
        fs.push(f);
    }
    Basis::new(name, fs)
}

pub fn load_basis(path: &Path) -> Result<Basis, BasisError> {
    let text = std::fs::read_to_string(path)?;
    let name = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("custom");
    parse_basis(name, &text)
}

/// A basis from gate mnemonics separated by commas, e.g. `NOT,AND,OR3`.
///
/// A trailing number sets the input count; otherwise NOT and BUF take one
/// input, ITE and the reversible gates three, the rest two.
pub fn basis_from_gates(list: &str) -> Result<Basis, BasisError> {
    let mut fs = Vec::new();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let digits = tok.len() - tok.trim_end_matches(|c: char| c.is_ascii_digit()).len();
        let (name, arity) = if digits > 0 && digits < tok.len() {
            let (n, a) = tok.split_at(tok.len() - digits);
            (n, a.parse::<usize>().ok())
        } else {
            (tok, None)
        };
        let f = match arity {
            Some(a) => crate::circuit::bench::builtin_gate(name, a),
            None => [2, 1, 3, 0]
                .into_iter()
                .find_map(|a| crate::circuit::bench::builtin_gate(name, a)),
        };
        fs.push(f.ok_or_else(|| BasisError::Unknown(tok.to_string()))?);
    }
    Basis::new(list, fs)
}

/// A built-in name, a path to a basis file, or a comma-separated gate list.
pub fn resolve_basis(spec: &str) -> Result<Basis, BasisError> {
    match builtin_basis(spec) {
        Ok(b) => Ok(b),
        Err(BasisError::Unknown(_)) if Path::new(spec).exists() => load_basis(Path::new(spec)),
        Err(BasisError::Unknown(_)) if spec.contains(',') => basis_from_gates(spec),
        Err(e) => Err(e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gate_lists() {
        let b = resolve_basis("NOT,AND,OR").unwrap();
        assert_eq!(b.len(), 3);
        assert_eq!(b.functions()[0].arity_in(), 1);
        assert_eq!(b.functions()[2].arity_in(), 2);
        let w = basis_from_gates("AND3,CSWAP").unwrap();
        assert_eq!(w.functions()[0].arity_in(), 3);
        assert_eq!(w.functions()[1].arity_out(), 3);
        assert!(resolve_basis("NOT,FOO").is_err());
    }

    #[test]
    fn builtin_sizes() {
        assert_eq!(builtin_basis("standard").unwrap().len(), 6);
        let r = builtin_basis("reversible").unwrap();
        assert_eq!(r.len(), 2);
        assert!(r
            .functions()
            .iter()
            .all(|f| f.arity_in() == 3 && f.arity_out() == 3));
        assert_eq!(builtin_basis("comparator").unwrap().len(), 1);
        assert_eq!(builtin_basis("nand").unwrap().len(), 1);
        assert!(matches!(builtin_basis("xyz"), Err(BasisError::Unknown(_))));
    }

    #[test]
    fn selector_widths() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(6), 3);
        assert_eq!(bits_for(8), 3);
        assert_eq!(bits_for(9), 4);
    }

    #[test]
    fn commutation() {
        let s = builtin_basis("standard").unwrap();
        let cm = commuting_input_pairs(&s);
        for (i, f) in s.functions().iter().enumerate() {
            match f.name() {
                "NOT" => assert!(cm.pairs[i].is_empty()),
                "IMPL" => assert!(cm.pairs[i].is_empty()),
                _ => assert!(cm.commutes(i, 0, 1), "{}", f.name()),
            }
        }
        let r = commuting_input_pairs(&builtin_basis("reversible").unwrap());
        assert!(r.pairs[0].is_empty());
        // the controls are passed through positionally, so swapping them changes the tuple
        assert!(r.pairs[1].is_empty());
        let c = commuting_input_pairs(&builtin_basis("comparator").unwrap());
        assert!(c.commutes(0, 0, 1));
    }

    #[test]
    fn basis_file() {
        let b = parse_basis("t", "# demo\nAND 2 1 0x8\nHA 2 2 0x6 0x8\n").unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.functions()[1].arity_out(), 2);
        assert!(parse_basis("t", "AND 2 1").is_err());
        assert!(parse_basis("t", "AND 2 1 0x18").is_err());
        assert!(matches!(parse_basis("t", ""), Err(BasisError::Empty)));
    }
}
