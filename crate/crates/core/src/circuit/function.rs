//! Multi-output Boolean functions.
//!
//! Row convention: the row index of an input vector reads input 0 as the
//! most significant bit. Output `j` of a row is bit `j` of the stored word.

use std::fmt;
use std::sync::Arc;

use super::CircuitError;

/// Largest input count for which a full truth table is materialized.
pub const TABLE_CAP: usize = 20;

/// Largest output count a function may have (outputs are packed in a `u64`).
pub const MAX_OUTPUTS: usize = 64;

/// Associative gate families that are stored symbolically so that wide gates
/// (a 16-input OR in a multiplexer, say) do not need a 2^16 row table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NaryOp {
    And,
    Or,
    Nand,
    Nor,
    Xor,
    Xnor,
}

impl NaryOp {
    pub fn mnemonic(self) -> &'static str {
        match self {
            NaryOp::And => "AND",
            NaryOp::Or => "OR",
            NaryOp::Nand => "NAND",
            NaryOp::Nor => "NOR",
            NaryOp::Xor => "XOR",
            NaryOp::Xnor => "XNOR",
        }
    }

    pub fn from_mnemonic(s: &str) -> Option<Self> {
        Some(match s {
            "AND" => NaryOp::And,
            "OR" => NaryOp::Or,
            "NAND" => NaryOp::Nand,
            "NOR" => NaryOp::Nor,
            "XOR" => NaryOp::Xor,
            "XNOR" => NaryOp::Xnor,
            _ => return None,
        })
    }

    /// Applies the operator to `k` inputs packed in `row` (any bit order).
    fn apply(self, row: u64, k: usize) -> bool {
        let all = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
        let row = row & all;
        match self {
            NaryOp::And => row == all,
            NaryOp::Or => row != 0,
            NaryOp::Nand => row != all,
            NaryOp::Nor => row == 0,
            NaryOp::Xor => row.count_ones() % 2 == 1,
            NaryOp::Xnor => row.count_ones() % 2 == 0,
        }
    }

    /// Bit-parallel application over 64 rows at once.
    pub fn apply_words(self, words: &[u64]) -> u64 {
        match self {
            NaryOp::And => words.iter().fold(u64::MAX, |a, w| a & w),
            NaryOp::Or => words.iter().fold(0, |a, w| a | w),
            NaryOp::Nand => !words.iter().fold(u64::MAX, |a, w| a & w),
            NaryOp::Nor => !words.iter().fold(0, |a, w| a | w),
            NaryOp::Xor => words.iter().fold(0, |a, w| a ^ w),
            NaryOp::Xnor => !words.iter().fold(0, |a, w| a ^ w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Repr {
    Table(Arc<[u64]>),
    Nary(NaryOp),
}

/// A finite function `{0,1}^m -> {0,1}^n`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BooleanFunction {
    name: String,
    arity_in: usize,
    arity_out: usize,
    repr: Repr,
}

impl fmt::Debug for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}->{})", self.name, self.arity_in, self.arity_out)
    }
}

impl BooleanFunction {
    /// Builds a function from explicit rows; `rows[r]` holds the outputs of row `r`.
    pub fn from_rows(
        name: impl Into<String>,
        arity_in: usize,
        arity_out: usize,
        rows: Vec<u64>,
    ) -> Result<Self, CircuitError> {
        if arity_out == 0 || arity_out > MAX_OUTPUTS {
            return Err(CircuitError::BadFunction(format!(
                "output arity {arity_out} out of range 1..={MAX_OUTPUTS}"
            )));
        }
        if arity_in > TABLE_CAP {
            return Err(CircuitError::CapExceeded {
                inputs: arity_in,
                cap: TABLE_CAP,
            });
        }
        if rows.len() != 1usize << arity_in {
            return Err(CircuitError::BadFunction(format!(
                "expected {} rows, got {}",
                1usize << arity_in,
                rows.len()
            )));
        }
        let mask = out_mask(arity_out);
        if rows.iter().any(|r| r & !mask != 0) {
            return Err(CircuitError::BadFunction(
                "row has bits beyond the output arity".into(),
            ));
        }
        Ok(BooleanFunction {
            name: name.into(),
            arity_in,
            arity_out,
            repr: Repr::Table(rows.into()),
        })
    }

    /// Builds a function from one hex truth table per output.
    ///
    /// Bit `r` of each table is the output on row `r`.
    pub fn from_hex(
        name: impl Into<String>,
        arity_in: usize,
        tables: &[&str],
    ) -> Result<Self, CircuitError> {
        if tables.is_empty() {
            return Err(CircuitError::BadFunction("no output tables given".into()));
        }
        if arity_in > TABLE_CAP {
            return Err(CircuitError::CapExceeded {
                inputs: arity_in,
                cap: TABLE_CAP,
            });
        }
        let nrows = 1usize << arity_in;
        let mut rows = vec![0u64; nrows];
        for (j, t) in tables.iter().enumerate() {
            let bits = parse_hex_bits(t, nrows)?;
            for (r, b) in bits.into_iter().enumerate() {
                if b {
                    rows[r] |= 1 << j;
                }
            }
        }
        Self::from_rows(name, arity_in, tables.len(), rows)
    }

    /// Builds a single-output function from a closure over the input bits.
    pub fn from_fn(
        name: impl Into<String>,
        arity_in: usize,
        arity_out: usize,
        f: impl Fn(&[bool]) -> Vec<bool>,
    ) -> Self {
        let mut bits = vec![false; arity_in];
        let rows = (0..1u64 << arity_in)
            .map(|r| {
                for (i, b) in bits.iter_mut().enumerate() {
                    *b = (r >> (arity_in - 1 - i)) & 1 == 1;
                }
                let out = f(&bits);
                assert_eq!(out.len(), arity_out);
                out.iter()
                    .enumerate()
                    .fold(0u64, |acc, (j, &o)| acc | (o as u64) << j)
            })
            .collect();
        Self::from_rows(name, arity_in, arity_out, rows)
            .expect("closure-built table is well formed")
    }

    /// An n-ary associative gate. Any `k >= 1` is accepted.
    pub fn nary(op: NaryOp, k: usize) -> Self {
        assert!(k >= 1, "n-ary gates need at least one input");
        BooleanFunction {
            name: op.mnemonic().to_string(),
            arity_in: k,
            arity_out: 1,
            repr: Repr::Nary(op),
        }
    }

    pub fn and2() -> Self {
        Self::nary(NaryOp::And, 2)
    }
    pub fn or2() -> Self {
        Self::nary(NaryOp::Or, 2)
    }
    pub fn xor2() -> Self {
        Self::nary(NaryOp::Xor, 2)
    }
    pub fn xnor2() -> Self {
        Self::nary(NaryOp::Xnor, 2)
    }
    pub fn nand2() -> Self {
        Self::nary(NaryOp::Nand, 2)
    }
    pub fn nor2() -> Self {
        Self::nary(NaryOp::Nor, 2)
    }

    pub fn not() -> Self {
        Self::from_rows("NOT", 1, 1, vec![1, 0]).unwrap()
    }

    pub fn buf() -> Self {
        Self::from_rows("BUF", 1, 1, vec![0, 1]).unwrap()
    }

    /// `a -> b`
    pub fn implication() -> Self {
        Self::from_rows("IMPL", 2, 1, vec![1, 1, 0, 1]).unwrap()
    }

    /// `c ? t : e` with inputs ordered `(c, t, e)`.
    pub fn ite() -> Self {
        Self::from_fn("ITE", 3, 1, |x| vec![if x[0] { x[1] } else { x[2] }])
    }

    pub fn constant(value: bool) -> Self {
        let name = if value { "CONST1" } else { "CONST0" };
        Self::from_rows(name, 0, 1, vec![value as u64]).unwrap()
    }

    /// Controlled swap `(c, a, b) -> (c, c ? b : a, c ? a : b)`.
    pub fn fredkin() -> Self {
        Self::from_fn("CSWAP", 3, 3, |x| {
            if x[0] {
                vec![x[0], x[2], x[1]]
            } else {
                vec![x[0], x[1], x[2]]
            }
        })
    }

    /// Controlled-controlled-not `(a, b, c) -> (a, b, c ^ (a & b))`.
    pub fn toffoli() -> Self {
        Self::from_fn("CCNOT", 3, 3, |x| vec![x[0], x[1], x[2] ^ (x[0] & x[1])])
    }

    /// One-bit comparator `(a, b) -> (min, max)`.
    pub fn comparator() -> Self {
        Self::from_fn("CMP", 2, 2, |x| vec![x[0] & x[1], x[0] | x[1]])
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn arity_in(&self) -> usize {
        self.arity_in
    }

    pub fn arity_out(&self) -> usize {
        self.arity_out
    }

    pub fn nary_op(&self) -> Option<NaryOp> {
        match self.repr {
            Repr::Nary(op) => Some(op),
            Repr::Table(_) => None,
        }
    }

    /// Evaluates row `row` (input 0 is the most significant bit).
    pub fn eval_row(&self, row: u64) -> u64 {
        match &self.repr {
            Repr::Table(t) => t[row as usize],
            Repr::Nary(op) => op.apply(row, self.arity_in) as u64,
        }
    }

    /// Evaluates on input bits given in slot order.
    pub fn eval(&self, inputs: &[bool]) -> Vec<bool> {
        debug_assert_eq!(inputs.len(), self.arity_in);
        let row = inputs.iter().fold(0u64, |acc, &b| (acc << 1) | b as u64);
        let out = self.eval_row(row);
        (0..self.arity_out).map(|j| (out >> j) & 1 == 1).collect()
    }

    /// Bit-parallel evaluation of output `j` given one 64-row word per input.
    pub fn eval_words(&self, inputs: &[u64], j: usize) -> u64 {
        match &self.repr {
            Repr::Nary(op) => op.apply_words(inputs),
            Repr::Table(t) => {
                let mut acc = 0u64;
                for (r, &row) in t.iter().enumerate() {
                    if (row >> j) & 1 == 0 {
                        continue;
                    }
                    let mut term = u64::MAX;
                    for (i, w) in inputs.iter().enumerate() {
                        let bit = (r >> (self.arity_in - 1 - i)) & 1;
                        term &= if bit == 1 { *w } else { !*w };
                    }
                    acc |= term;
                }
                acc
            }
        }
    }

    /// Materializes the full row table.
    pub fn rows(&self) -> Result<Vec<u64>, CircuitError> {
        if self.arity_in > TABLE_CAP {
            return Err(CircuitError::CapExceeded {
                inputs: self.arity_in,
                cap: TABLE_CAP,
            });
        }
        Ok(match &self.repr {
            Repr::Table(t) => t.to_vec(),
            Repr::Nary(op) => (0..1u64 << self.arity_in)
                .map(|r| op.apply(r, self.arity_in) as u64)
                .collect(),
        })
    }

    /// The truth table of output `j` as a bit vector indexed by row.
    pub fn column(&self, j: usize) -> Result<Vec<bool>, CircuitError> {
        Ok(self
            .rows()?
            .into_iter()
            .map(|r| (r >> j) & 1 == 1)
            .collect())
    }

    /// Hex rendering of output `j`, padded to `2^m` bits.
    pub fn hex(&self, j: usize) -> Result<String, CircuitError> {
        Ok(bits_to_hex(&self.column(j)?))
    }

    /// True iff both functions compute the same map (names are ignored).
    pub fn same_semantics(&self, other: &BooleanFunction) -> bool {
        if self.arity_in != other.arity_in || self.arity_out != other.arity_out {
            return false;
        }
        if let (Repr::Nary(a), Repr::Nary(b)) = (&self.repr, &other.repr) {
            if a == b {
                return true;
            }
        }
        match (self.rows(), other.rows()) {
            (Ok(a), Ok(b)) => a == b,
            _ => false,
        }
    }

    /// True iff every input influences some output.
    pub fn depends_on(&self, input: usize) -> bool {
        if let Repr::Nary(_) = self.repr {
            return true;
        }
        let shift = self.arity_in - 1 - input;
        let rows = self.rows().expect("table functions are within the cap");
        (0..rows.len()).any(|r| (r >> shift) & 1 == 0 && rows[r] != rows[r | (1 << shift)])
    }
}

fn out_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Parses a hex string (optional `0x`) into `nrows` bits, bit `r` = row `r`.
pub fn parse_hex_bits(s: &str, nrows: usize) -> Result<Vec<bool>, CircuitError> {
    let digits = s.trim().trim_start_matches("0x").trim_start_matches("0X");
    if digits.is_empty() {
        return Err(CircuitError::BadFunction(format!(
            "empty truth table {s:?}"
        )));
    }
    let mut bits = vec![false; nrows];
    for (pos, ch) in digits.chars().rev().enumerate() {
        let v = ch.to_digit(16).ok_or_else(|| {
            CircuitError::BadFunction(format!("invalid hex digit {ch:?} in {s:?}"))
        })?;
        for b in 0..4 {
            if (v >> b) & 1 == 1 {
                let idx = pos * 4 + b;
                if idx >= nrows {
                    return Err(CircuitError::BadFunction(format!(
                        "truth table {s:?} has more than {nrows} bits"
                    )));
                }
                bits[idx] = true;
            }
        }
    }
    Ok(bits)
}

/// Renders bits (bit `r` = row `r`) as `0x...` padded to the row count.
pub fn bits_to_hex(bits: &[bool]) -> String {
    let ndigits = bits.len().div_ceil(4).max(1);
    let mut s = String::with_capacity(ndigits + 2);
    s.push_str("0x");
    for d in (0..ndigits).rev() {
        let mut v = 0u32;
        for b in 0..4 {
            if bits.get(d * 4 + b).copied().unwrap_or(false) {
                v |= 1 << b;
            }
        }
        s.push(std::char::from_digit(v, 16).unwrap().to_ascii_uppercase());
    }
    s
}
