//! Seeded instance generators shared by the integration suites.
#![allow(dead_code)]

use aacsp::csp::{BooleanConstraint, BooleanCspInstance, Predicate};
use aacsp::lin2::{Lin2Equation, Lin2System};
use aacsp::ordering::{OrderingInstance, PermConstraint, PermCspInstance, PermPredicate};
use itertools::Itertools;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_tuple(rng: &mut ChaCha8Rng, n: usize, arity: usize) -> Vec<u32> {
    let mut vars: Vec<u32> = (0..n as u32).collect();
    vars.shuffle(rng);
    vars.truncate(arity);
    vars
}

pub fn random_lin2(
    rng: &mut ChaCha8Rng,
    max_vars: usize,
    max_eqs: usize,
    arity_bounds: &[usize],
    max_weight: u64,
) -> Lin2System {
    let n = rng.gen_range(1..=max_vars);
    let c = *arity_bounds.choose(rng).unwrap();
    let m = rng.gen_range(0..=max_eqs);
    let equations = (0..m)
        .map(|_| {
            let arity = rng.gen_range(1..=c.min(n));
            Lin2Equation::new(
                random_tuple(rng, n, arity),
                rng.gen_bool(0.5),
                rng.gen_range(1..=max_weight),
            )
        })
        .collect();
    Lin2System::new(n, c, equations)
}

pub fn random_csp(
    rng: &mut ChaCha8Rng,
    max_vars: usize,
    max_constraints: usize,
    max_arity: usize,
    max_weight: u64,
) -> BooleanCspInstance {
    let n = rng.gen_range(1..=max_vars);
    let c = rng.gen_range(1..=max_arity);
    let m = rng.gen_range(0..=max_constraints);
    let constraints = (0..m)
        .map(|_| {
            let arity = rng.gen_range(1..=c.min(n));
            let table = (0..1usize << arity).map(|_| rng.gen_bool(0.5)).collect();
            BooleanConstraint::new(
                Predicate::new(arity, table),
                random_tuple(rng, n, arity),
                rng.gen_range(1..=max_weight),
            )
        })
        .collect();
    BooleanCspInstance::new(n, c, constraints)
}

pub fn random_ordering(
    rng: &mut ChaCha8Rng,
    max_vars: usize,
    max_constraints: usize,
    max_weight: u64,
) -> OrderingInstance {
    let n = rng.gen_range(2..=max_vars);
    let m = rng.gen_range(0..=max_constraints);
    let constraints = (0..m).map(|_| {
        let arity = if n >= 3 && rng.gen_bool(0.5) { 3 } else { 2 };
        (random_tuple(rng, n, arity), rng.gen_range(1..=max_weight))
    });
    OrderingInstance::from_constraints(n, constraints)
}

pub fn random_perm(
    rng: &mut ChaCha8Rng,
    max_vars: usize,
    max_constraints: usize,
    max_weight: u64,
) -> PermCspInstance {
    let n = rng.gen_range(2..=max_vars);
    let m = rng.gen_range(0..=max_constraints);
    let constraints = (0..m)
        .map(|_| {
            let arity = if n >= 3 && rng.gen_bool(0.6) { 3 } else { 2 };
            let predicate = if arity == 3 && rng.gen_bool(0.4) {
                PermPredicate::betweenness()
            } else {
                let perms: Vec<Vec<u8>> = (1..=arity as u8)
                    .permutations(arity)
                    .filter(|_| rng.gen_bool(0.5))
                    .collect();
                let perms = if perms.is_empty() {
                    vec![(1..=arity as u8).collect()]
                } else {
                    perms
                };
                PermPredicate::new(arity, perms)
            };
            PermConstraint::new(
                predicate,
                random_tuple(rng, n, arity),
                rng.gen_range(1..=max_weight),
            )
        })
        .collect();
    PermCspInstance::new(n, constraints)
}

pub fn directed_cycle(n: u32) -> OrderingInstance {
    OrderingInstance::from_constraints(n as usize, (0..n).map(|v| (vec![v, (v + 1) % n], 1)))
}
