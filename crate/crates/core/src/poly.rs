//! Multilinear polynomials over `{-1,+1}` variables with exact coefficients.
//!
//! Points are addressed by bit vectors under the global sign convention:
//! bit 1 stands for the input value `-1` (True), bit 0 for `+1` (False).

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::arith::{DyadicRational, Rational};

/// A multilinear polynomial `sum_S c_S * prod_{i in S} x_i` stored as a map
/// from sorted variable-index subsets to non-zero coefficients.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPolynomial<C> {
    terms: BTreeMap<Vec<u32>, C>,
}

pub type DyadicPolynomial = MultilinearPolynomial<DyadicRational>;
pub type RationalPolynomial = MultilinearPolynomial<Rational>;

impl<C> Default for MultilinearPolynomial<C> {
    fn default() -> Self {
        MultilinearPolynomial {
            terms: BTreeMap::new(),
        }
    }
}

impl<C: Zero + Clone> MultilinearPolynomial<C> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `coeff` to the monomial on `vars` (must be sorted and duplicate
    /// free); zero results are removed so the term map stays sparse.
    pub fn add_term(&mut self, vars: Vec<u32>, coeff: C) {
        debug_assert!(vars.windows(2).all(|w| w[0] < w[1]));
        if coeff.is_zero() {
            return;
        }
        let entry = self.terms.entry(vars);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + coeff;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn coefficient(&self, vars: &[u32]) -> C {
        self.terms.get(vars).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant(&self) -> C {
        self.coefficient(&[])
    }

    /// Terms in lexicographic subset order (the empty monomial first).
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], &C)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn non_constant_terms(&self) -> impl Iterator<Item = (&[u32], &C)> {
        self.terms().filter(|(vars, _)| !vars.is_empty())
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Vec::len).max().unwrap_or(0)
    }

    /// Accumulates `weight * poly` with each local variable `i` renamed to
    /// `map(i)`.
    pub fn add_scaled_mapped<F>(&mut self, poly: &MultilinearPolynomial<C>, weight: i64, map: F)
    where
        F: Fn(u32) -> u32,
        C: ScaleBy,
    {
        for (vars, coeff) in poly.terms() {
            let mut mapped: Vec<u32> = vars.iter().map(|&v| map(v)).collect();
            mapped.sort_unstable();
            self.add_term(mapped, coeff.scale_by(weight));
        }
    }
}

impl<C> MultilinearPolynomial<C>
where
    C: Zero + Clone + std::ops::Neg<Output = C>,
{
    /// Evaluates at the `{-1,+1}` point encoded by `minus_one`, where
    /// `minus_one(i)` is true when variable `i` takes the value `-1`.
    pub fn evaluate<F: Fn(u32) -> bool>(&self, minus_one: F) -> C {
        let mut total = C::zero();
        for (vars, coeff) in self.terms() {
            let negatives = vars.iter().filter(|&&v| minus_one(v)).count();
            let term = if negatives % 2 == 0 {
                coeff.clone()
            } else {
                -coeff.clone()
            };
            total = total + term;
        }
        total
    }
}

/// Coefficient scaling by an integer weight.
pub trait ScaleBy {
    fn scale_by(&self, k: i64) -> Self;
}

impl ScaleBy for DyadicRational {
    fn scale_by(&self, k: i64) -> Self {
        self.scale(k)
    }
}

impl ScaleBy for Rational {
    fn scale_by(&self, k: i64) -> Self {
        self * Rational::from_integer(k)
    }
}

/// Exact Walsh-Hadamard transform of a table of `2^n` values indexed by the
/// point convention above; entry `S` of the result is `E_x[f(x) chi_S(x)]`.
///
/// The forward direction (values to coefficients) and the inverse differ only
/// by the `1/2^n` factor, which the caller applies through `scale`.
pub fn walsh_hadamard_i64(values: &mut [i64]) {
    let n = values.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in (0..n).step_by(half * 2) {
            for i in block..block + half {
                let (a, b) = (values[i], values[i + half]);
                values[i] = a + b;
                values[i + half] = a - b;
            }
        }
        half *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;

    #[test]
    fn add_term_cancels_to_sparse_zero() {
        let mut p: DyadicPolynomial = MultilinearPolynomial::new();
        p.add_term(vec![0, 2], DyadicRational::new(1, 1));
        p.add_term(vec![0, 2], DyadicRational::new(-1, 1));
        assert_eq!(p.num_terms(), 0);
        assert!(p.coefficient(&[0, 2]).is_zero());
    }

    #[test]
    fn evaluate_respects_sign_convention() {
        // p = 1/2 - 1/2 * x0 x1
        let mut p: DyadicPolynomial = MultilinearPolynomial::new();
        p.add_term(vec![], DyadicRational::new(1, 1));
        p.add_term(vec![0, 1], DyadicRational::new(-1, 1));
        // x0 = -1, x1 = +1  =>  1/2 + 1/2 = 1
        let v = p.evaluate(|i| i == 0);
        assert_eq!(v, DyadicRational::from_integer(1));
        // x0 = x1 = -1  =>  0
        let v = p.evaluate(|_| true);
        assert!(v.is_zero());
    }

    #[test]
    fn walsh_hadamard_matches_direct_sum() {
        let table = [3i64, -1, 4, 1, -5, 9, 2, 6];
        let mut t = table;
        walsh_hadamard_i64(&mut t);
        for (s, &transformed) in t.iter().enumerate() {
            let direct: i64 = (0..8)
                .map(|b| {
                    let sign = if (s & b).count_ones() % 2 == 0 { 1 } else { -1 };
                    table[b] * sign
                })
                .sum();
            assert_eq!(transformed, direct);
        }
    }
}
