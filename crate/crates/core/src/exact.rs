//! Ground-truth oracles by full enumeration, plus the `O*(2^n)` subset
//! dynamic program for exact linear ordering.
//!
//! The evaluators here deliberately do not share code with the solver
//! modules: they are the independent second route that cross-checks every
//! reported weight.

use itertools::Itertools;
use thiserror::Error;

use crate::csp::BooleanCspInstance;
use crate::lin2::{Assignment, Lin2System};
use crate::ordering::{Ordering, OrderingInstance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactError {
    #[error("{op} over {vars} variables exceeds the limit of {limit}")]
    GuardExceeded {
        op: &'static str,
        vars: usize,
        limit: usize,
    },
}

/// Independent evaluation of an assignment against a system.
pub fn eval_lin2(system: &Lin2System, a: &Assignment) -> u64 {
    let mut total = 0;
    for eq in system.equations() {
        let mut parity = false;
        for &v in eq.vars() {
            if a.bit(v as usize) {
                parity = !parity;
            }
        }
        if parity == eq.rhs() {
            total += eq.weight();
        }
    }
    total
}

/// Independent evaluation of an assignment against a CSP instance.
pub fn eval_csp(inst: &BooleanCspInstance, a: &Assignment) -> u64 {
    let mut total = 0;
    for c in inst.constraints() {
        let mut index = 0usize;
        for (i, &v) in c.tuple.iter().enumerate() {
            if a.bit(v as usize) {
                index |= 1 << i;
            }
        }
        if c.predicate.value_at(index) {
            total += c.weight;
        }
    }
    total
}

/// Independent evaluation of an ordering against an ordering instance.
pub fn eval_ordering(inst: &OrderingInstance, phi: &Ordering) -> u64 {
    let mut pos = vec![0u32; phi.len()];
    for (i, &v) in phi.vars().iter().enumerate() {
        pos[v as usize] = i as u32;
    }
    let mut total = 0;
    for c in inst.constraints() {
        let increasing = c
            .tuple()
            .windows(2)
            .all(|w| pos[w[0] as usize] < pos[w[1] as usize]);
        if increasing {
            total += c.weight();
        }
    }
    total
}

/// Exact optimum by enumerating every setting of the occurring variables;
/// ties resolve to the lexicographically smallest assignment and
/// non-occurring variables stay 0.
pub fn brute_force_lin2(system: &Lin2System) -> Result<(Assignment, u64), ExactError> {
    let occurring = system.occurring_vars();
    if occurring.len() > 20 {
        return Err(ExactError::GuardExceeded {
            op: "lin2 enumeration",
            vars: occurring.len(),
            limit: 20,
        });
    }
    let mut best: Option<(Assignment, u64)> = None;
    for mask in 0..(1u64 << occurring.len()) {
        let mut bits = vec![false; system.num_vars()];
        for (i, &v) in occurring.iter().enumerate() {
            bits[v as usize] = mask >> i & 1 == 1;
        }
        let a = Assignment::new(bits);
        let w = eval_lin2(system, &a);
        let better = match &best {
            None => true,
            Some((cur, cw)) => w > *cw || (w == *cw && a.bits() < cur.bits()),
        };
        if better {
            best = Some((a, w));
        }
    }
    Ok(best.expect("at least the empty mask is enumerated"))
}

/// Exact optimum over all `2^n` assignments of a CSP instance.
pub fn brute_force_csp(inst: &BooleanCspInstance) -> Result<(Assignment, u64), ExactError> {
    let n = inst.num_vars();
    if n > 20 {
        return Err(ExactError::GuardExceeded {
            op: "csp enumeration",
            vars: n,
            limit: 20,
        });
    }
    let mut best: Option<(Assignment, u64)> = None;
    for mask in 0..(1u64 << n) {
        let a = Assignment::new((0..n).map(|i| mask >> i & 1 == 1).collect());
        let w = eval_csp(inst, &a);
        let better = match &best {
            None => true,
            Some((cur, cw)) => w > *cw || (w == *cw && a.bits() < cur.bits()),
        };
        if better {
            best = Some((a, w));
        }
    }
    Ok(best.expect("at least the zero assignment is enumerated"))
}

/// Exact optimum over all `n!` orderings, lexicographically smallest witness.
pub fn brute_force_ordering(inst: &OrderingInstance) -> Result<(Ordering, u64), ExactError> {
    let n = inst.num_vars();
    if n > 10 {
        return Err(ExactError::GuardExceeded {
            op: "ordering enumeration",
            vars: n,
            limit: 10,
        });
    }
    let mut best: Option<(Ordering, u64)> = None;
    for perm in (0..n as u32).permutations(n) {
        let phi = Ordering::new(perm);
        let w = eval_ordering(inst, &phi);
        if best.as_ref().map_or(true, |(_, cw)| w > *cw) {
            best = Some((phi, w));
        }
    }
    Ok(best.unwrap_or_else(|| (Ordering::new(Vec::new()), 0)))
}

/// Weight charged to placing `v` directly after the set `placed`: ternary
/// constraints with `v` in the middle whose first element is placed and last
/// is not, plus binary constraints with `v` second and the first placed.
pub fn prefix_charge(inst: &OrderingInstance, placed: u64, v: u32) -> u64 {
    let mut total = 0;
    for c in inst.constraints() {
        let t = c.tuple();
        let hit = match t.len() {
            2 => t[1] == v && placed >> t[0] & 1 == 1,
            3 => {
                t[1] == v
                    && placed >> t[0] & 1 == 1
                    && placed >> t[2] & 1 == 0
                    && t[2] != v
            }
            _ => unreachable!(),
        };
        if hit {
            total += c.weight();
        }
    }
    total
}

/// Held-Karp style subset dynamic program for exact linear ordering:
/// `best(S) = max_{v in S} best(S - v) + charge(S - v, v)`.
///
/// The per-vertex charges partition the constraint set, so `best(V)` is the
/// maximum ordering weight; the witness is rebuilt from the argmax choices.
pub fn held_karp_ordering(
    inst: &OrderingInstance,
    guard: usize,
) -> Result<(Ordering, u64), ExactError> {
    // Subsets are u64 masks.
    let guard = guard.min(62);
    let n = inst.num_vars();
    if n > guard {
        return Err(ExactError::GuardExceeded {
            op: "held-karp ordering",
            vars: n,
            limit: guard,
        });
    }
    // Constraints indexed by the variable they are charged to.
    let mut charged: Vec<Vec<(u64, u64, u64)>> = vec![Vec::new(); n];
    for c in inst.constraints() {
        let t = c.tuple();
        match t.len() {
            2 => charged[t[1] as usize].push((1u64 << t[0], 0, c.weight())),
            3 => charged[t[1] as usize].push((1u64 << t[0], 1u64 << t[2], c.weight())),
            _ => unreachable!(),
        }
    }
    let full = (1u64 << n) - 1;
    let mut best = vec![0u64; 1 << n];
    let mut parent = vec![0u8; 1 << n];
    for mask in 1..=full {
        let mut best_here = 0;
        let mut arg = u8::MAX;
        let mut bits = mask;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let prev = mask & !(1u64 << v);
            let charge: u64 = charged[v]
                .iter()
                .filter(|&&(before, after, _)| before & prev == before && after & mask == 0)
                .map(|&(_, _, w)| w)
                .sum();
            let cand = best[prev as usize] + charge;
            if arg == u8::MAX || cand > best_here {
                best_here = cand;
                arg = v as u8;
            }
        }
        best[mask as usize] = best_here;
        parent[mask as usize] = arg;
    }
    let mut order = vec![0u32; n];
    let mut mask = full;
    for slot in (0..n).rev() {
        let v = parent[mask as usize] as u32;
        order[slot] = v;
        mask &= !(1u64 << v);
    }
    Ok((Ordering::new(order), best[full as usize]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lin2::Lin2Equation;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_ordering_instance(
        rng: &mut ChaCha8Rng,
        n: usize,
        m: usize,
        max_w: u64,
    ) -> OrderingInstance {
        let constraints = (0..m).map(|_| {
            let arity = if n >= 3 && rng.gen_bool(0.5) { 3 } else { 2 };
            let mut vars: Vec<u32> = (0..n as u32).collect();
            vars.shuffle(rng);
            vars.truncate(arity);
            (vars, rng.gen_range(1..=max_w))
        });
        OrderingInstance::from_constraints(n, constraints)
    }

    #[test]
    fn brute_force_lin2_unit_equation() {
        let sys = Lin2System::new(1, 2, vec![Lin2Equation::new(vec![0], true, 1)]);
        let (a, w) = brute_force_lin2(&sys).unwrap();
        assert!(a.bit(0));
        assert_eq!(w, 1);
    }

    #[test]
    fn brute_force_lin2_complementary_pair() {
        let sys = Lin2System::new(
            2,
            2,
            vec![
                Lin2Equation::new(vec![0, 1], false, 2),
                Lin2Equation::new(vec![0, 1], true, 5),
            ],
        );
        let (_, w) = brute_force_lin2(&sys).unwrap();
        assert_eq!(w, 5);
    }

    #[test]
    fn brute_force_agrees_with_exhaustive_solve() {
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..100 {
            let n = rng.gen_range(2..=8usize);
            let equations = (0..rng.gen_range(1..=10))
                .map(|_| {
                    let arity = rng.gen_range(1..=3.min(n));
                    let mut vars: Vec<u32> = (0..n as u32).collect();
                    vars.shuffle(&mut rng);
                    vars.truncate(arity);
                    Lin2Equation::new(vars, rng.gen_bool(0.5), rng.gen_range(1..=8))
                })
                .collect();
            let sys = Lin2System::new(n, 3, equations);
            let red = sys.reduce();
            let (_, opt_red) = red.exhaustive_solve(30).unwrap();
            let (_, opt) = brute_force_lin2(&sys).unwrap();
            assert_eq!(opt as i64, opt_red as i64 + red.offset());
        }
    }

    #[test]
    fn brute_force_csp_prefers_lexicographically_smallest() {
        use crate::csp::{BooleanConstraint, BooleanCspInstance, Predicate};
        // x0 xor x1: two optimal assignments, 01 beats 10.
        let xor = Predicate::new(2, vec![false, true, true, false]);
        let inst = BooleanCspInstance::new(
            2,
            2,
            vec![BooleanConstraint::new(xor, vec![0, 1], 3)],
        );
        let (a, w) = brute_force_csp(&inst).unwrap();
        assert_eq!(w, 3);
        assert_eq!(a.bits(), &[false, true]);
    }

    #[test]
    fn brute_force_ordering_basics() {
        let single = OrderingInstance::from_constraints(2, vec![(vec![0, 1], 1)]);
        let (phi, w) = brute_force_ordering(&single).unwrap();
        assert_eq!(w, 1);
        assert_eq!(phi.vars(), &[0, 1]);

        let all_six = OrderingInstance::from_constraints(
            3,
            (0..3u32)
                .permutations(3)
                .map(|t| (t, 1)),
        );
        let (_, w) = brute_force_ordering(&all_six).unwrap();
        assert_eq!(w, 1);
    }

    #[test]
    fn directed_cycle_optimum_is_n_minus_one() {
        for n in [4u32, 6, 8] {
            let inst = OrderingInstance::from_constraints(
                n as usize,
                (0..n).map(|v| (vec![v, (v + 1) % n], 1)),
            );
            let (_, brute) = brute_force_ordering(&inst).unwrap();
            assert_eq!(brute, n as u64 - 1);
            let (_, dp) = held_karp_ordering(&inst, 24).unwrap();
            assert_eq!(dp, n as u64 - 1);
        }
    }

    #[test]
    fn held_karp_chain() {
        let inst =
            OrderingInstance::from_constraints(3, vec![(vec![0, 1], 1), (vec![1, 2], 1)]);
        let (phi, w) = held_karp_ordering(&inst, 24).unwrap();
        assert_eq!(w, 2);
        assert_eq!(phi.vars(), &[0, 1, 2]);
    }

    #[test]
    fn held_karp_guard() {
        let inst = OrderingInstance::from_constraints(5, vec![(vec![0, 1], 1)]);
        assert!(matches!(
            held_karp_ordering(&inst, 4),
            Err(ExactError::GuardExceeded { vars: 5, .. })
        ));
    }

    #[test]
    fn held_karp_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        for _ in 0..60 {
            let n = rng.gen_range(2..=7usize);
            let m = rng.gen_range(1..=12);
            let inst = random_ordering_instance(&mut rng, n, m, 8);
            let (_, brute) = brute_force_ordering(&inst).unwrap();
            let (phi, dp) = held_karp_ordering(&inst, 24).unwrap();
            assert_eq!(dp, brute);
            assert_eq!(eval_ordering(&inst, &phi), dp);
        }
    }

    #[test]
    fn prefix_charges_partition_every_ordering_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for _ in 0..20 {
            let n = rng.gen_range(2..=6usize);
            let m = rng.gen_range(1..=10);
            let inst = random_ordering_instance(&mut rng, n, m, 4);
            for perm in (0..n as u32).permutations(n) {
                let phi = Ordering::new(perm.clone());
                let mut placed = 0u64;
                let mut total = 0;
                for &v in &perm {
                    total += prefix_charge(&inst, placed, v);
                    placed |= 1 << v;
                }
                assert_eq!(total, eval_ordering(&inst, &phi));
            }
        }
    }
}
