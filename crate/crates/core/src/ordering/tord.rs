//! Bucket orderings: payoff functions, their Fourier expansions, the
//! aggregate polynomial, the weighted XOR system built from it, and the
//! derandomized extension of a bucket assignment to a full ordering.

use std::collections::{BTreeMap, HashMap};

use num_traits::Zero;

use crate::arith::Rational;
use crate::lin2::{Lin2Equation, Lin2System};
use crate::poly::{walsh_hadamard_i64, MultilinearPolynomial, RationalPolynomial};

use super::{BucketAssignment, Ordering, OrderingConstraint, OrderingError, OrderingInstance};

/// Resolution used by the solving pipeline. `t = 1` loses variables (a
/// directed cycle produces a constant polynomial); two bits per variable are
/// enough to keep every variable of an irreducible instance represented.
pub const PIPELINE_T: u32 = 2;

/// Scale `3! * 2^(3t)` at `t = 2` that makes every equation weight integral.
pub const LIN2_SCALE: i64 = 384;

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Probability that a uniformly random extension of the bucket assignment
/// satisfies `e`: zero unless the tuple's buckets are non-decreasing, else
/// `1 / prod_b n_b!` over the tuple's per-bucket multiplicities.
pub fn bucket_payoff(
    e: &OrderingConstraint,
    buckets: &BucketAssignment,
) -> Rational {
    let seq: Vec<u32> = e.tuple().iter().map(|&v| buckets.bucket(v)).collect();
    payoff_of_bucket_sequence(&seq)
}

fn payoff_of_bucket_sequence(seq: &[u32]) -> Rational {
    if seq.windows(2).any(|w| w[0] > w[1]) {
        return Rational::zero();
    }
    let mut denom = 1i64;
    let mut run = 1usize;
    for w in seq.windows(2) {
        if w[0] == w[1] {
            run += 1;
        } else {
            denom *= factorial(run);
            run = 1;
        }
    }
    denom *= factorial(run);
    Rational::new(1, denom)
}

/// Exact Fourier expansion of the arity-`s` payoff function over `s*t`
/// local `{-1,+1}` components (variable `j` owns components `j*t..(j+1)*t`,
/// first component most significant). Coefficients are multiples of
/// `1/(s! 2^(st))`.
pub fn payoff_polynomial(arity: usize, t: u32) -> Result<RationalPolynomial, OrderingError> {
    let bits = arity * t as usize;
    if bits > 12 {
        return Err(OrderingError::PayoffGuard { bits });
    }
    let fact = factorial(arity);
    // Tabulate s! * g over all component vectors; bit i of the point index
    // corresponds to local component i taking the value -1.
    let mut values = vec![0i64; 1 << bits];
    for (point, value) in values.iter_mut().enumerate() {
        let seq: Vec<u32> = (0..arity)
            .map(|j| {
                (0..t).fold(0u32, |acc, r| {
                    (acc << 1) | ((point >> (j as u32 * t + r)) & 1) as u32
                })
            })
            .collect();
        let payoff = payoff_of_bucket_sequence(&seq) * Rational::from_integer(fact);
        debug_assert!(payoff.is_integer());
        *value = payoff.to_integer();
    }
    walsh_hadamard_i64(&mut values);
    let mut poly = MultilinearPolynomial::new();
    let denom = fact * (1i64 << bits);
    for (subset, &v) in values.iter().enumerate() {
        if v == 0 {
            continue;
        }
        let vars: Vec<u32> = (0..bits as u32).filter(|i| subset >> i & 1 == 1).collect();
        poly.add_term(vars, Rational::new(v, denom));
    }
    Ok(poly)
}

/// Weighted sum of per-constraint payoff polynomials over the `t*n` global
/// components; variable `i` owns components `t*i..t*(i+1)`.
pub fn aggregate_polynomial(
    inst: &OrderingInstance,
    t: u32,
) -> Result<RationalPolynomial, OrderingError> {
    let mut by_arity: HashMap<usize, RationalPolynomial> = HashMap::new();
    let mut aggregate = MultilinearPolynomial::new();
    for c in inst.constraints() {
        let payoff = match by_arity.entry(c.arity()) {
            std::collections::hash_map::Entry::Occupied(o) => o.into_mut(),
            std::collections::hash_map::Entry::Vacant(v) => {
                v.insert(payoff_polynomial(c.arity(), t)?)
            }
        };
        let tuple = c.tuple().to_vec();
        aggregate.add_scaled_mapped(payoff, c.weight() as i64, |local| {
            let var = tuple[(local / t) as usize];
            var * t + local % t
        });
    }
    Ok(aggregate)
}

/// Variables with no surviving monomial at `t = 2`; empty on every
/// irreducible instance.
pub fn representation_check(inst: &OrderingInstance) -> Result<Vec<u32>, OrderingError> {
    let poly = aggregate_polynomial(inst, PIPELINE_T)?;
    let mut represented = vec![false; inst.num_vars()];
    for (vars, _) in poly.non_constant_terms() {
        for &component in vars {
            represented[(component / PIPELINE_T) as usize] = true;
        }
    }
    Ok((0..inst.num_vars() as u32)
        .filter(|&v| !represented[v as usize])
        .collect())
}

/// Builds the weighted XOR system of the aggregate polynomial at `t = 2`:
/// each non-constant monomial `S` becomes an equation over the component
/// bits with weight `384 * |coefficient|`, right-hand side by sign. For
/// every bucket assignment and its bit vector,
/// `384 * (w_t - rho W) = 2 * sat - W_F`.
pub fn build_lin2(inst: &OrderingInstance) -> Result<Lin2System, OrderingError> {
    let poly = aggregate_polynomial(inst, PIPELINE_T)?;
    debug_assert_eq!(poly.constant(), inst.average_weight());
    let mut equations = Vec::new();
    for (vars, coeff) in poly.non_constant_terms() {
        let scaled = coeff * Rational::from_integer(LIN2_SCALE);
        debug_assert!(scaled.is_integer());
        let w = scaled.to_integer();
        if w > 0 {
            equations.push(Lin2Equation::new(vars.to_vec(), false, w as u64));
        } else {
            equations.push(Lin2Equation::new(vars.to_vec(), true, (-w) as u64));
        }
    }
    let num_bits = inst.num_vars() * PIPELINE_T as usize;
    // Monomials are unique; the reduce pass only sets the flag.
    Ok(Lin2System::new(num_bits, 3 * PIPELINE_T as usize, equations).reduce())
}

/// How a constraint variable relates to the partial placement.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Spot {
    Placed(u32),
    Pending(u32),
}

/// Extends a bucket assignment to a full ordering of weight at least the
/// bucket payoff `w_t`: buckets are emitted in order and within each bucket
/// the next variable is chosen to maximize the exact conditional expected
/// weight over uniform completions (ties to the smallest index).
pub fn ordering_from_buckets(inst: &OrderingInstance, buckets: &BucketAssignment) -> Ordering {
    assert_eq!(buckets.num_vars(), inst.num_vars());
    let n = inst.num_vars();
    let mut by_bucket: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for v in 0..n as u32 {
        by_bucket.entry(buckets.bucket(v)).or_default().push(v);
    }

    let mut spot: Vec<Spot> = (0..n as u32)
        .map(|v| Spot::Pending(buckets.bucket(v)))
        .collect();
    let mut order: Vec<u32> = Vec::with_capacity(n);

    for (_, members) in by_bucket {
        let mut remaining: Vec<u32> = members;
        while !remaining.is_empty() {
            let mut best: Option<(Rational, usize)> = None;
            for (idx, &candidate) in remaining.iter().enumerate() {
                spot[candidate as usize] = Spot::Placed(order.len() as u32);
                let expected = conditional_expectation(inst, &spot);
                spot[candidate as usize] = Spot::Pending(buckets.bucket(candidate));
                if best.as_ref().map_or(true, |(e, _)| expected > *e) {
                    best = Some((expected, idx));
                }
            }
            let (_, idx) = best.unwrap();
            let chosen = remaining.remove(idx);
            spot[chosen as usize] = Spot::Placed(order.len() as u32);
            order.push(chosen);
        }
    }
    Ordering::new(order)
}

/// Expected satisfied weight when pending variables are completed uniformly
/// at random within their buckets (placed variables precede pending ones).
fn conditional_expectation(inst: &OrderingInstance, spot: &[Spot]) -> Rational {
    let mut total = Rational::zero();
    for c in inst.constraints() {
        let p = constraint_probability(c, spot);
        if !p.is_zero() {
            total += p * Rational::from_integer(c.weight() as i64);
        }
    }
    total
}

fn constraint_probability(c: &OrderingConstraint, spot: &[Spot]) -> Rational {
    let spots: Vec<Spot> = c.tuple().iter().map(|&v| spot[v as usize]).collect();
    for w in spots.windows(2) {
        let ok = match (w[0], w[1]) {
            (Spot::Placed(a), Spot::Placed(b)) => a < b,
            // Placed variables come before every pending one.
            (Spot::Placed(_), Spot::Pending(_)) => true,
            (Spot::Pending(_), Spot::Placed(_)) => false,
            (Spot::Pending(a), Spot::Pending(b)) => a <= b,
        };
        if !ok {
            return Rational::zero();
        }
    }
    // Pending variables sharing a bucket must land in tuple order: one
    // `1/len!` factor per maximal same-bucket pending run.
    let mut denom = 1i64;
    let mut run = 0usize;
    let mut run_bucket = u32::MAX;
    for s in &spots {
        match s {
            Spot::Placed(_) => {
                denom *= factorial(run);
                run = 0;
            }
            Spot::Pending(b) => {
                if run > 0 && *b == run_bucket {
                    run += 1;
                } else {
                    denom *= factorial(run);
                    run = 1;
                    run_bucket = *b;
                }
            }
        }
    }
    denom *= factorial(run);
    Rational::new(1, denom)
}
