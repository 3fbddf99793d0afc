//! Seeded cases checking the encoders and drivers against brute-force oracles.

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qbf_synth::bases::{commuting_pairs, Basis};
use qbf_synth::circuit::bench::serialize_bench;
use qbf_synth::circuit::{equivalent_bruteforce, BooleanFunction, Circuit, NaryOp, Wire};
use qbf_synth::encoder::{
    create_miter, encode_synthesis, FabricSpec, Mode, Sink, Symmetry, SynthEncoding,
};
use qbf_synth::formula::{Qbf2, EXPANSION_CAP};
use qbf_synth::solver::{solve_2qbf, Budget, QbfSession, QbfStatus, Witness};
use qbf_synth::synthesis::{exhaustive_search, label_count, synthesize, Limits, SynthesisConfig};

fn pool() -> Vec<BooleanFunction> {
    vec![
        BooleanFunction::not(),
        BooleanFunction::and2(),
        BooleanFunction::or2(),
        BooleanFunction::xor2(),
        BooleanFunction::implication(),
        BooleanFunction::xnor2(),
        BooleanFunction::nand2(),
        BooleanFunction::nor2(),
        BooleanFunction::nary(NaryOp::And, 3),
    ]
}

/// A random circuit with `m` inputs, `g` gates and one or two outputs.
fn random_circuit(rng: &mut ChaCha8Rng, m: usize, g: usize, fs: &[BooleanFunction]) -> Circuit {
    let mut c = Circuit::new();
    let mut wires: Vec<Wire> = (0..m)
        .map(|i| c.add_input(format!("x{i}")).into())
        .collect();
    for _ in 0..g {
        let f = fs[rng.gen_range(0..fs.len())].clone();
        let ins: Vec<Wire> = (0..f.arity_in())
            .map(|_| wires[rng.gen_range(0..wires.len())])
            .collect();
        wires.push(c.add_gate(f, &ins).into());
    }
    let outs = if g >= 2 && rng.gen_bool(0.3) { 2 } else { 1 };
    for o in 0..outs {
        c.add_output(format!("y{o}"), wires[wires.len() - 1 - o]);
    }
    c
}

fn random_basis(rng: &mut ChaCha8Rng, max: usize) -> Basis {
    let mut fs = pool();
    let n = rng.gen_range(1..=max);
    let mut chosen = Vec::new();
    for _ in 0..n {
        chosen.push(fs.swap_remove(rng.gen_range(0..fs.len())));
    }
    Basis::new("random", chosen).unwrap()
}

/// Every labeling of `psi`'s topology with matching arities that is equivalent to `psi`.
fn brute_force_labelings(basis: &Basis, psi: &Circuit) -> usize {
    let topo = psi.topology();
    let nodes = topo.internal_nodes();
    let indeg: Vec<usize> = nodes.iter().map(|&n| topo.fanin(n).len()).collect();
    let b = basis.len();
    let mut count = 0;
    for code in 0..b.pow(nodes.len() as u32) {
        let labels: Vec<BooleanFunction> = (0..nodes.len())
            .map(|i| basis.functions()[(code / b.pow(i as u32)) % b].clone())
            .collect();
        if labels.iter().zip(&indeg).any(|(f, &d)| f.arity_in() != d) {
            continue;
        }
        let c = topo.label(&labels).unwrap();
        if equivalent_bruteforce(&c, psi).unwrap() {
            count += 1;
        }
    }
    count
}

fn all_witnesses(q: &Qbf2) -> Vec<Witness> {
    let mut s = QbfSession::new(q, EXPANSION_CAP, 0).unwrap();
    let mut out = Vec::new();
    loop {
        match s.solve(&Budget::unlimited()).unwrap().status {
            QbfStatus::Sat(w) => {
                s.block(&w);
                out.push(w);
            }
            QbfStatus::Unsat => return out,
            QbfStatus::Timeout => panic!("unbounded solve timed out"),
        }
    }
}

/// Structure of a witness: per cell its function, per sink its source.
type Shape = (Vec<usize>, Vec<usize>);

fn shape(enc: &SynthEncoding, w: &Witness) -> Shape {
    let vals: HashMap<_, _> = enc.qbf.s.iter().copied().zip(w.0.iter().copied()).collect();
    let codes = enc
        .cells
        .iter()
        .map(|c| c.decode(|v| vals[&v]).unwrap())
        .collect();
    let srcs = enc
        .fabric
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .find(|(_, v)| vals[v])
                .map_or(usize::MAX, |&(s, _)| s)
        })
        .collect();
    (codes, srcs)
}

/// Sorts adjacent commuting fanins of every cell by source index.
fn canonical(enc: &SynthEncoding, (codes, mut srcs): Shape) -> Shape {
    let pairs: Vec<BTreeSet<(usize, usize)>> =
        enc.basis.functions().iter().map(commuting_pairs).collect();
    let mut slots: HashMap<(usize, usize), usize> = HashMap::new();
    for (t, sink) in enc.fabric.sinks.iter().enumerate() {
        if let Sink::Cell { cell, slot } = sink {
            slots.insert((*cell, *slot), t);
        }
    }
    for (cell, &f) in codes.iter().enumerate() {
        let width = enc.basis.functions()[f].arity_in();
        for _ in 0..width {
            for a in 0..width.saturating_sub(1) {
                let (ta, tb) = (slots[&(cell, a)], slots[&(cell, a + 1)]);
                if pairs[f].contains(&(a, a + 1)) && srcs[ta] > srcs[tb] {
                    srcs.swap(ta, tb);
                }
            }
        }
    }
    (codes, srcs)
}

fn repeats_fanin(c: &Circuit) -> bool {
    c.topo_order().unwrap().into_iter().any(|n| {
        let f = c.fanin(n);
        f.iter().collect::<BTreeSet<_>>().len() < f.len()
    })
}

/// `label_count` against enumeration of every labeling.
pub fn label_count_case(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=3);
    let g = rng.gen_range(1..=3);
    let psi = random_circuit(&mut rng, m, g, &pool());
    let basis = random_basis(&mut rng, 4);
    let expected = brute_force_labelings(&basis, &psi);
    match label_count(&basis, &psi, None, Limits::unlimited()) {
        Ok(r) => {
            prop_assert!(r.complete);
            prop_assert_eq!(r.count, expected);
            let distinct: BTreeSet<_> = r.labelings.iter().collect();
            prop_assert_eq!(distinct.len(), r.count);
        }
        // no basis function fits some node: nothing to count
        Err(_) => prop_assert_eq!(expected, 0),
    }
    Ok(())
}

/// A miter with its labels fixed is valid exactly when the labeled circuit is equivalent.
pub fn miter_case(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(1..=3);
    let g = rng.gen_range(1..=3);
    let psi = random_circuit(&mut rng, m, g, &pool());
    let basis = Basis::new("pool", pool()).unwrap();
    let miter = create_miter(&basis, &psi.topology(), &psi).unwrap();
    let topo = psi.topology();
    let labels: Vec<usize> = topo
        .internal_nodes()
        .iter()
        .map(|&n| {
            let fits: Vec<usize> = (0..basis.len())
                .filter(|&f| basis.functions()[f].arity_in() == topo.fanin(n).len())
                .collect();
            fits[rng.gen_range(0..fits.len())]
        })
        .collect();
    let phi = topo
        .label(
            &labels
                .iter()
                .map(|&f| basis.functions()[f].clone())
                .collect::<Vec<_>>(),
        )
        .unwrap();
    let w = miter.witness_for_labels(&labels).unwrap();
    let mut q = miter.qbf.clone();
    for (&v, &b) in miter.qbf.s.iter().zip(&w.0) {
        let r = q.matrix.var(v);
        let lit = if b { r } else { q.matrix.not(r) };
        q.matrix.assert(lit);
    }
    let valid = matches!(
        solve_2qbf(&q, &Budget::unlimited(), EXPANSION_CAP)
            .unwrap()
            .status,
        QbfStatus::Sat(_)
    );
    prop_assert_eq!(valid, equivalent_bruteforce(&phi, &psi).unwrap());
    Ok(())
}

/// Symmetry breaking keeps exactly one representative per commutation class.
pub fn symmetry_case(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = rng.gen_range(2..=3);
    let k = rng.gen_range(1..=2);
    let fs = [
        BooleanFunction::not(),
        BooleanFunction::and2(),
        BooleanFunction::or2(),
        BooleanFunction::xor2(),
    ];
    let psi = random_circuit(&mut rng, m, k, &fs);
    let basis = Basis::new("naox", fs.to_vec()).unwrap();
    let mode = if rng.gen_bool(0.5) {
        Mode::Circuit
    } else {
        Mode::BooleanFunction
    };
    let encode = |symmetry| {
        let mut spec = FabricSpec::new(k, mode);
        spec.symmetry = symmetry;
        encode_synthesis(&basis, &psi, &spec).unwrap()
    };
    let off = encode(Symmetry::Off);
    let on = encode(Symmetry::NonStrict);
    let strict = encode(Symmetry::Strict);
    let all: BTreeSet<Shape> = all_witnesses(&off.qbf)
        .iter()
        .map(|w| shape(&off, w))
        .collect();
    let kept: BTreeSet<Shape> = all_witnesses(&on.qbf)
        .iter()
        .map(|w| shape(&on, w))
        .collect();
    let strict_kept = all_witnesses(&strict.qbf).len();
    prop_assert!(kept.is_subset(&all));
    prop_assert!(strict_kept <= kept.len());
    let canon: BTreeSet<Shape> = all.iter().map(|s| canonical(&off, s.clone())).collect();
    prop_assert_eq!(canon, kept);
    for w in all_witnesses(&off.qbf) {
        let c = off.reconstruct(&w).unwrap();
        // cycle breaking: every decoded design is a valid DAG
        prop_assert!(c.validate().is_ok());
        prop_assert!(equivalent_bruteforce(&c, &psi).unwrap());
        // completeness: the symmetric encoding can express a commuted copy of it
        prop_assert!(on.witness_for_circuit(&c).is_some() || mode == Mode::Circuit);
    }
    Ok(())
}

/// Graph enumeration and fabric synthesis agree on the minimal size.
pub fn exhaustive_case(seed: u64) -> Result<(), TestCaseError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fs = [
        BooleanFunction::not(),
        BooleanFunction::and2(),
        BooleanFunction::or2(),
        BooleanFunction::xor2(),
    ];
    let m = rng.gen_range(1..=2);
    let g = rng.gen_range(1..=2);
    let mut psi = random_circuit(&mut rng, m, g, &fs);
    if psi.outputs().len() > 1 {
        psi = random_circuit(&mut rng, m, 1, &fs);
    }
    let basis = Basis::new("naox", fs.to_vec()).unwrap();
    let brute = exhaustive_search(&basis, &psi, 2, 20).unwrap();
    let mut cfg = SynthesisConfig::new(basis, Mode::Circuit, 2);
    cfg.enumerate = 64;
    let qbf = synthesize(&cfg, &psi).unwrap();
    let optimum = qbf.bounds.optimum().unwrap();
    // the graph search has no parallel edges, so a gate cannot read one wire twice
    let simple = qbf
        .circuits
        .iter()
        .any(|(k, c)| *k == optimum && !repeats_fanin(c));
    let bench = serialize_bench(&psi);
    if simple {
        prop_assert_eq!(brute.min_size, Some(optimum), "{}", bench);
    } else {
        prop_assert!(brute.min_size.is_none_or(|b| b > optimum), "{}", bench);
    }
    for c in &brute.circuits {
        prop_assert!(equivalent_bruteforce(c, &psi).unwrap());
    }
    Ok(())
}
