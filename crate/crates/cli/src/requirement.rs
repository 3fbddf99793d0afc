//! Resolution of requirement arguments.
//!
//! A requirement is one of:
//!
//! * a path to a BENCH file;
//! * `family:n`, e.g. `add:1`, for a generated ALU circuit;
//! * `chip:NAME`, e.g. `chip:74182`, for a bundled netlist;
//! * `tt:HEX[,HEX...]/m`, e.g. `tt:12D/4`, for a table-specified function.

use std::path::Path;

use anyhow::{bail, Context, Result};
use qbf_synth::benchgen::{chip_bench, gen_alu, truth_table_requirement, Family, FamilySpec};
use qbf_synth::circuit::bench::{parse_bench, serialize_bench};
use qbf_synth::Circuit;

pub struct Requirement {
    pub circuit: Circuit,
    /// Label for manifests and CSV rows.
    pub name: String,
    pub n: usize,
    /// Bytes that identify the input, hashed into manifests.
    pub content: Vec<u8>,
}

pub fn resolve(spec: &str) -> Result<Requirement> {
    if Path::new(spec).is_file() {
        let text = std::fs::read_to_string(spec).with_context(|| format!("reading {spec}"))?;
        let circuit = parse_bench(&text).with_context(|| format!("parsing {spec}"))?;
        let name = Path::new(spec)
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or(spec)
            .to_string();
        return Ok(Requirement {
            circuit,
            name,
            n: 0,
            content: text.into_bytes(),
        });
    }
    let Some((kind, arg)) = spec.split_once(':') else {
        bail!("{spec:?} is neither a file nor a family:n, chip:NAME or tt:HEX/m requirement");
    };
    match kind {
        "chip" => {
            let text = chip_bench(arg)?;
            Ok(Requirement {
                circuit: parse_bench(text)?,
                name: arg.to_string(),
                n: 0,
                content: text.as_bytes().to_vec(),
            })
        }
        "tt" => {
            let (tables, m) = arg
                .split_once('/')
                .with_context(|| format!("{spec:?}: expected tt:HEX[,HEX...]/m"))?;
            let m: usize = m
                .parse()
                .with_context(|| format!("bad input count {m:?}"))?;
            let tables: Vec<&str> = tables.split(',').collect();
            let circuit = truth_table_requirement(&tables, m)?;
            Ok(Requirement {
                content: spec.as_bytes().to_vec(),
                circuit,
                name: format!("tt-{}", tables.join("-")),
                n: m,
            })
        }
        family => {
            let family: Family = family.parse()?;
            let n: usize = arg
                .parse()
                .with_context(|| format!("bad parameter {arg:?}"))?;
            let circuit = gen_alu(FamilySpec::new(family, n)?);
            Ok(Requirement {
                content: serialize_bench(&circuit).into_bytes(),
                circuit,
                name: family.to_string(),
                n,
            })
        }
    }
}

/// Parses `n`, `a..b` (inclusive) or `a,b,c`.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: usize = a
            .trim()
            .parse()
            .with_context(|| format!("bad range {s:?}"))?;
        let b: usize = b
            .trim()
            .trim_start_matches('=')
            .parse()
            .with_context(|| format!("bad range {s:?}"))?;
        if a > b {
            bail!("empty range {s:?}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .with_context(|| format!("bad parameter {t:?}"))
        })
        .collect()
}
