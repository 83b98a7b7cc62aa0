//! Permutation CSPs of arity at most 3 and linear ordering instances.
//!
//! Permutation constraints normalize to linear ordering constraints, which
//! are simplified by reduction rules, relaxed to bucket orderings, and
//! finally solved through a weighted XOR system or exact search.

mod rules;
mod solve;
mod tord;

pub use rules::ReducedOrdering;
pub use solve::{solve_ordering_aa, solve_perm_aa, KernelRecord, OrderingBranch, OrderingOutcome};
pub use tord::{
    aggregate_polynomial, bucket_payoff, build_lin2, ordering_from_buckets, payoff_polynomial,
    representation_check, LIN2_SCALE, PIPELINE_T,
};

use std::collections::HashMap;

use thiserror::Error;

use crate::arith::Rational;
use crate::exact::ExactError;
use crate::lin2::{Assignment, Lin2Error};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrderingError {
    #[error("parameter k must be at least 1")]
    ZeroParameter,
    #[error("payoff transform over {bits} bits exceeds the supported 12")]
    PayoffGuard { bits: usize },
    #[error(transparent)]
    Lin2(#[from] Lin2Error),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// A linear ordering constraint on 2 or 3 distinct variables, satisfied when
/// the ordering strictly increases along the tuple.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingConstraint {
    tuple: Vec<u32>,
    weight: u64,
}

impl OrderingConstraint {
    pub fn new(tuple: Vec<u32>, weight: u64) -> Self {
        assert!(
            tuple.len() == 2 || tuple.len() == 3,
            "ordering constraints have arity 2 or 3"
        );
        let mut sorted = tuple.clone();
        sorted.sort_unstable();
        assert!(
            sorted.windows(2).all(|w| w[0] != w[1]),
            "tuple variables must be distinct"
        );
        assert!(weight >= 1, "constraint weight must be positive");
        OrderingConstraint { tuple, weight }
    }

    pub fn tuple(&self) -> &[u32] {
        &self.tuple
    }

    pub fn arity(&self) -> usize {
        self.tuple.len()
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }
}

/// A linear ordering given as the sequence of variables from first to last.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ordering {
    vars: Vec<u32>,
}

impl Ordering {
    pub fn new(vars: Vec<u32>) -> Self {
        let mut check = vars.clone();
        check.sort_unstable();
        assert!(
            check.iter().enumerate().all(|(i, &v)| v as usize == i),
            "ordering must be a permutation of 0..n"
        );
        Ordering { vars }
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    /// Position of each variable in the ordering.
    pub fn positions(&self) -> Vec<u32> {
        let mut pos = vec![0u32; self.vars.len()];
        for (i, &v) in self.vars.iter().enumerate() {
            pos[v as usize] = i as u32;
        }
        pos
    }
}

/// A weighted collection of ordering constraints, deduplicated by tuple.
///
/// `weight_shift` tracks reduction-rule bookkeeping: for every ordering,
/// `weight(original) = weight(self) + weight_shift`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderingInstance {
    num_vars: usize,
    constraints: Vec<OrderingConstraint>,
    weight_shift: i64,
    irreducible: bool,
}

impl OrderingInstance {
    pub fn from_constraints<I>(num_vars: usize, constraints: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, u64)>,
    {
        let mut list: Vec<OrderingConstraint> = Vec::new();
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        for (tuple, weight) in constraints {
            assert!(
                tuple.iter().all(|&v| (v as usize) < num_vars),
                "constraint variable out of range"
            );
            if let Some(&i) = index.get(&tuple) {
                list[i].weight += weight;
            } else {
                index.insert(tuple.clone(), list.len());
                list.push(OrderingConstraint::new(tuple, weight));
            }
        }
        OrderingInstance {
            num_vars,
            constraints: list,
            weight_shift: 0,
            irreducible: false,
        }
    }

    pub fn empty(num_vars: usize) -> Self {
        Self::from_constraints(num_vars, std::iter::empty())
    }

    pub(crate) fn with_parts(
        num_vars: usize,
        constraints: Vec<OrderingConstraint>,
        weight_shift: i64,
        irreducible: bool,
    ) -> Self {
        OrderingInstance {
            num_vars,
            constraints,
            weight_shift,
            irreducible,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[OrderingConstraint] {
        &self.constraints
    }

    pub fn weight_shift(&self) -> i64 {
        self.weight_shift
    }

    pub fn is_irreducible(&self) -> bool {
        self.irreducible
    }

    pub fn total_weight(&self) -> u64 {
        self.constraints.iter().map(|c| c.weight).sum()
    }

    pub fn has_ternary(&self) -> bool {
        self.constraints.iter().any(|c| c.arity() == 3)
    }

    /// Expected weight `rho * W` of a uniform random ordering: each arity-s
    /// constraint is satisfied with probability `1/s!`.
    pub fn average_weight(&self) -> Rational {
        self.constraints
            .iter()
            .map(|c| {
                let fact = (1..=c.arity() as i64).product::<i64>();
                Rational::new(c.weight as i64, fact)
            })
            .sum()
    }

    /// Satisfied weight of the ordering in this instance's own units.
    pub fn weight_of(&self, ordering: &Ordering) -> u64 {
        assert_eq!(ordering.len(), self.num_vars, "ordering length mismatch");
        let pos = ordering.positions();
        self.constraints
            .iter()
            .filter(|c| {
                c.tuple
                    .windows(2)
                    .all(|w| pos[w[0] as usize] < pos[w[1] as usize])
            })
            .map(|c| c.weight)
            .sum()
    }

    /// Satisfied weight with the reduction shift re-added.
    pub fn original_weight_of(&self, ordering: &Ordering) -> i64 {
        self.weight_of(ordering) as i64 + self.weight_shift
    }

    /// Average in original units: shifting every ordering shifts the mean.
    pub fn original_average_weight(&self) -> Rational {
        self.average_weight() + Rational::from_integer(self.weight_shift)
    }
}

/// A permutation predicate: the set of local orderings it accepts, each
/// written as the ranks of the tuple positions (`132` accepts orderings that
/// place the first variable lowest, the third in the middle, the second
/// highest).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PermPredicate {
    arity: usize,
    satisfying_perms: Vec<Vec<u8>>,
}

impl PermPredicate {
    pub fn new(arity: usize, mut satisfying_perms: Vec<Vec<u8>>) -> Self {
        assert!(arity == 2 || arity == 3, "permutation arity must be 2 or 3");
        for perm in &satisfying_perms {
            let mut sorted = perm.clone();
            sorted.sort_unstable();
            assert!(
                sorted.iter().enumerate().all(|(i, &r)| r as usize == i + 1),
                "not a permutation of 1..=arity"
            );
            assert_eq!(perm.len(), arity);
        }
        satisfying_perms.sort_unstable();
        satisfying_perms.dedup();
        PermPredicate {
            arity,
            satisfying_perms,
        }
    }

    /// Betweenness: the middle tuple element lies between the outer two.
    pub fn betweenness() -> Self {
        PermPredicate::new(3, vec![vec![1, 2, 3], vec![3, 2, 1]])
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn satisfying_perms(&self) -> &[Vec<u8>] {
        &self.satisfying_perms
    }

    pub fn accepts(&self, pattern: &[u8]) -> bool {
        self.satisfying_perms.iter().any(|p| p == pattern)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermConstraint {
    pub predicate: PermPredicate,
    pub tuple: Vec<u32>,
    pub weight: u64,
}

impl PermConstraint {
    pub fn new(predicate: PermPredicate, tuple: Vec<u32>, weight: u64) -> Self {
        assert_eq!(predicate.arity(), tuple.len(), "tuple length mismatch");
        let mut sorted = tuple.clone();
        sorted.sort_unstable();
        assert!(
            sorted.windows(2).all(|w| w[0] != w[1]),
            "tuple variables must be distinct"
        );
        assert!(weight >= 1, "constraint weight must be positive");
        PermConstraint {
            predicate,
            tuple,
            weight,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermCspInstance {
    num_vars: usize,
    constraints: Vec<PermConstraint>,
}

impl PermCspInstance {
    pub fn new(num_vars: usize, constraints: Vec<PermConstraint>) -> Self {
        for c in &constraints {
            assert!(
                c.tuple.iter().all(|&v| (v as usize) < num_vars),
                "constraint variable out of range"
            );
        }
        PermCspInstance {
            num_vars,
            constraints,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn constraints(&self) -> &[PermConstraint] {
        &self.constraints
    }

    pub fn total_weight(&self) -> u64 {
        self.constraints.iter().map(|c| c.weight).sum()
    }

    pub fn average_weight(&self) -> Rational {
        self.constraints
            .iter()
            .map(|c| {
                let fact = (1..=c.predicate.arity() as i64).product::<i64>();
                Rational::new(
                    c.weight as i64 * c.predicate.satisfying_perms().len() as i64,
                    fact,
                )
            })
            .sum()
    }

    /// Satisfied weight under `ordering`, evaluated directly against the
    /// permutation predicates.
    pub fn weight_of(&self, ordering: &Ordering) -> u64 {
        assert_eq!(ordering.len(), self.num_vars, "ordering length mismatch");
        let pos = ordering.positions();
        self.constraints
            .iter()
            .filter(|c| {
                let tuple_pos: Vec<u32> = c.tuple.iter().map(|&v| pos[v as usize]).collect();
                let mut pattern = vec![0u8; tuple_pos.len()];
                for (i, p) in tuple_pos.iter().enumerate() {
                    let rank = tuple_pos.iter().filter(|q| *q < p).count() + 1;
                    pattern[i] = rank as u8;
                }
                c.predicate.accepts(&pattern)
            })
            .map(|c| c.weight)
            .sum()
    }

    /// Expands every constraint into one linear ordering constraint per
    /// accepted pattern: pattern `pi` contributes the tuple listing the
    /// variables in the order the pattern ranks them. Exactly one expansion
    /// member per original constraint is satisfied iff the original is, so
    /// weights and averages transfer unchanged.
    pub fn to_linear_ordering(&self) -> OrderingInstance {
        let mut expanded: Vec<(Vec<u32>, u64)> = Vec::new();
        for c in &self.constraints {
            for perm in c.predicate.satisfying_perms() {
                let mut tuple = vec![0u32; perm.len()];
                for rank in 1..=perm.len() as u8 {
                    let position = perm.iter().position(|&r| r == rank).unwrap();
                    tuple[rank as usize - 1] = c.tuple[position];
                }
                expanded.push((tuple, c.weight));
            }
        }
        OrderingInstance::from_constraints(self.num_vars, expanded)
    }
}

/// A map from variables to one of `2^t` lexicographically ordered buckets;
/// component bit 1 encodes -1, and the first component is most significant,
/// so `(+1,+1) < (+1,-1) < (-1,+1) < (-1,-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BucketAssignment {
    t: u32,
    buckets: Vec<u32>,
}

impl BucketAssignment {
    pub fn new(t: u32, buckets: Vec<u32>) -> Self {
        assert!(t >= 1, "bucket resolution t must be at least 1");
        assert!(
            buckets.iter().all(|&b| b < (1 << t)),
            "bucket index out of range"
        );
        BucketAssignment { t, buckets }
    }

    /// Decodes the bucket of each variable from `t` consecutive bits per
    /// variable, first bit most significant.
    pub fn from_assignment(t: u32, num_vars: usize, bits: &Assignment) -> Self {
        assert_eq!(bits.len(), num_vars * t as usize);
        let buckets = (0..num_vars)
            .map(|i| {
                (0..t).fold(0u32, |acc, r| {
                    (acc << 1) | bits.bit(i * t as usize + r as usize) as u32
                })
            })
            .collect();
        BucketAssignment::new(t, buckets)
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn bucket(&self, var: u32) -> u32 {
        self.buckets[var as usize]
    }

    pub fn num_vars(&self) -> usize {
        self.buckets.len()
    }

    /// Whether component `r` (0-based) of `var` is -1.
    pub fn component_minus_one(&self, var: u32, r: u32) -> bool {
        (self.buckets[var as usize] >> (self.t - 1 - r)) & 1 == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use itertools::Itertools;

    #[test]
    fn betweenness_expands_to_forward_and_reverse_tuples() {
        let inst = PermCspInstance::new(
            3,
            vec![PermConstraint::new(
                PermPredicate::betweenness(),
                vec![0, 1, 2],
                1,
            )],
        );
        let ord = inst.to_linear_ordering();
        let tuples: Vec<&[u32]> = ord.constraints().iter().map(|c| c.tuple()).collect();
        assert!(tuples.contains(&[0, 1, 2].as_slice()));
        assert!(tuples.contains(&[2, 1, 0].as_slice()));
        assert_eq!(tuples.len(), 2);
    }

    #[test]
    fn full_predicate_expands_to_all_six_and_any_ordering_satisfies_one() {
        let all: Vec<Vec<u8>> = (1..=3u8).permutations(3).collect();
        let inst = PermCspInstance::new(
            3,
            vec![PermConstraint::new(PermPredicate::new(3, all), vec![0, 1, 2], 1)],
        );
        let ord = inst.to_linear_ordering();
        assert_eq!(ord.constraints().len(), 6);
        for perm in (0..3u32).permutations(3) {
            let phi = Ordering::new(perm);
            assert_eq!(ord.weight_of(&phi), 1);
        }
    }

    #[test]
    fn expansion_preserves_weight_of_every_ordering() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let n = rng.gen_range(3..=6);
            let constraints = (0..rng.gen_range(1..=6))
                .map(|_| {
                    let arity = if rng.gen_bool(0.5) { 2 } else { 3 };
                    let mut vars: Vec<u32> = (0..n as u32).collect();
                    vars.shuffle(&mut rng);
                    vars.truncate(arity);
                    let perms: Vec<Vec<u8>> = (1..=arity as u8)
                        .permutations(arity)
                        .filter(|_| rng.gen_bool(0.6))
                        .collect();
                    let perms = if perms.is_empty() {
                        vec![(1..=arity as u8).collect()]
                    } else {
                        perms
                    };
                    PermConstraint::new(
                        PermPredicate::new(arity, perms),
                        vars,
                        rng.gen_range(1..=4),
                    )
                })
                .collect();
            let inst = PermCspInstance::new(n, constraints);
            let expanded = inst.to_linear_ordering();
            assert_eq!(inst.average_weight(), expanded.average_weight());
            for perm in (0..n as u32).permutations(n) {
                let phi = Ordering::new(perm);
                assert_eq!(inst.weight_of(&phi), expanded.weight_of(&phi));
            }
        }
    }

    #[test]
    fn average_weight_of_ternary_and_cycle() {
        let one = OrderingInstance::from_constraints(3, vec![(vec![0, 1, 2], 6)]);
        assert_eq!(one.average_weight(), Rational::from_integer(1));

        let n = 8;
        let cycle = OrderingInstance::from_constraints(
            n,
            (0..n as u32).map(|i| (vec![i, (i + 1) % n as u32], 1)),
        );
        assert_eq!(cycle.average_weight(), Rational::new(n as i64, 2));
    }

    #[test]
    fn average_weight_matches_enumeration() {
        use rand::prelude::*;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..10 {
            let n = rng.gen_range(3..=6);
            let m = rng.gen_range(1..=8);
            let constraints = (0..m).map(|_| {
                let arity = if rng.gen_bool(0.5) { 2 } else { 3 };
                let mut vars: Vec<u32> = (0..n as u32).collect();
                vars.shuffle(&mut rng);
                vars.truncate(arity);
                (vars, rng.gen_range(1..=4))
            });
            let inst = OrderingInstance::from_constraints(n, constraints);
            let mut total = Rational::from_integer(0);
            let mut count = 0i64;
            for perm in (0..n as u32).permutations(n) {
                total += Rational::from_integer(inst.weight_of(&Ordering::new(perm)) as i64);
                count += 1;
            }
            assert_eq!(inst.average_weight(), total / Rational::from_integer(count));
        }
    }

    #[test]
    fn bucket_assignment_decodes_most_significant_first() {
        let bits = Assignment::new(vec![false, true, true, false]);
        let buckets = BucketAssignment::from_assignment(2, 2, &bits);
        assert_eq!(buckets.bucket(0), 0b01);
        assert_eq!(buckets.bucket(1), 0b10);
        assert!(!buckets.component_minus_one(0, 0));
        assert!(buckets.component_minus_one(0, 1));
    }
}
