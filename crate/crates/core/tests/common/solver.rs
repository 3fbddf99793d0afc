//! Single random trials of the SAT and 2-QBF procedures against enumeration.

use qbf_synth::formula::{eval_qbf_recursive, Cnf, GateGraph, Lit, Qbf2, Ref, EXPANSION_CAP};
use qbf_synth::solver::{solve_2qbf, solve_sat, Budget, QbfStatus, SolveStatus};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

fn random_cnf(rng: &mut ChaCha8Rng) -> Cnf {
    let n = rng.gen_range(1..=12u32);
    let m = rng.gen_range(1..=(5 * n as usize));
    let mut cnf = Cnf::new(n);
    for _ in 0..m {
        let len = rng.gen_range(1..=3.min(n as usize));
        let c: Vec<Lit> = (0..len)
            .map(|_| Lit::new(rng.gen_range(1..=n), rng.gen()))
            .collect();
        cnf.add_clause(c);
    }
    cnf
}

fn brute_sat(cnf: &Cnf) -> bool {
    let n = cnf.num_vars as usize;
    (0..1u32 << n).any(|m| {
        let asg: Vec<bool> = (0..=n).map(|v| v > 0 && (m >> (v - 1)) & 1 == 1).collect();
        cnf.eval(&asg)
    })
}

/// Solves one random CNF and checks it against enumeration; returns satisfiability.
pub fn sat_trial(rng: &mut ChaCha8Rng) -> bool {
    let cnf = random_cnf(rng);
    let expected = brute_sat(&cnf);
    match solve_sat(&cnf, &Budget::unlimited()).unwrap().status {
        SolveStatus::Sat(m) => {
            assert!(expected, "solver found a model of an unsat formula");
            assert!(cnf.eval(&m));
        }
        SolveStatus::Unsat => assert!(!expected, "solver missed a model:\n{}", cnf.to_dimacs()),
        SolveStatus::Timeout => panic!("unbounded solve timed out"),
    }
    expected
}

fn random_graph(rng: &mut ChaCha8Rng, nvars: u32, size: usize) -> (GateGraph, Ref) {
    let mut g = GateGraph::new();
    let mut pool: Vec<Ref> = (1..=nvars).map(|v| g.var(v)).collect();
    for _ in 0..size {
        let a = pool[rng.gen_range(0..pool.len())];
        let b = pool[rng.gen_range(0..pool.len())];
        let c = pool[rng.gen_range(0..pool.len())];
        let r = match rng.gen_range(0..5) {
            0 => g.and2(a, b),
            1 => g.or2(a, b),
            2 => g.xor(a, b),
            3 => g.mux(a, b, c),
            _ => g.not(a),
        };
        pool.push(r);
    }
    let root = *pool.last().unwrap();
    (g, root)
}

/// Solves one random 2-QBF and checks it against recursive evaluation; returns its truth.
pub fn qbf_trial(rng: &mut ChaCha8Rng) -> bool {
    let ns = rng.gen_range(1..=4u32);
    let nx = rng.gen_range(1..=4u32);
    let nz = rng.gen_range(0..=4u32);
    let n = ns + nx + nz;
    let size = rng.gen_range(3..=14);
    let (mut g, root) = random_graph(rng, n, size);
    g.assert(root);
    let q = Qbf2 {
        matrix: g,
        s: (1..=ns).collect(),
        x: (ns + 1..=ns + nx).collect(),
        z: (ns + nx + 1..=n).collect(),
    };
    let expected = eval_qbf_recursive(&q.to_general()).unwrap();
    match solve_2qbf(&q, &Budget::unlimited(), EXPANSION_CAP)
        .unwrap()
        .status
    {
        QbfStatus::Sat(w) => {
            assert!(expected);
            // the witness itself must make the rest of the prefix true
            let mut fixed = q.clone();
            for (&v, &b) in q.s.iter().zip(&w.0) {
                let x = fixed.matrix.var(v);
                let lit = if b { x } else { fixed.matrix.not(x) };
                fixed.matrix.assert(lit);
            }
            assert!(eval_qbf_recursive(&fixed.to_general()).unwrap());
        }
        QbfStatus::Unsat => assert!(!expected),
        QbfStatus::Timeout => panic!("timeout"),
    }
    expected
}
