//! Random cross-checks of the SAT and 2-QBF procedures against enumeration.

mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::solver::{qbf_trial, sat_trial};

#[test]
fn cdcl_agrees_with_enumeration_on_random_3cnf() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sat = (0..10_000).filter(|_| sat_trial(&mut rng)).count();
    // both outcomes are exercised
    assert!(sat > 1000 && sat < 9000, "{sat}");
}

#[test]
fn expansion_solver_agrees_with_recursive_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let trues = (0..1000).filter(|_| qbf_trial(&mut rng)).count();
    assert!(trues > 50 && trues < 950, "{trues}");
}
