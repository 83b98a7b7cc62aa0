//! Weighted Max-c-Lin-2 systems over GF(2) and their above-average solver.
//!
//! The pipeline is: canonical reduction (merge duplicates, cancel
//! complementary pairs), a layered greedy choice of independent equation
//! collections, and then either a derandomized witness beating the average by
//! the heaviest layer's weight, or an exhaustive search over the few
//! remaining variables.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;

use thiserror::Error;

use crate::Limits;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Lin2Error {
    #[error("parameter k must be at least 1")]
    ZeroParameter,
    #[error("exhaustive search over {occurring} occurring variables exceeds the guard of {guard}")]
    ExhaustiveGuard { occurring: usize, guard: usize },
    #[error("exhaustive search requires a reduced system")]
    NotReduced,
    #[error("independent collection layer {arity} is empty")]
    EmptyLayer { arity: usize },
    #[error("assignment has {got} bits but the system has {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
}

/// A single weighted XOR constraint `x_{v_1} + ... + x_{v_s} = rhs (mod 2)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Lin2Equation {
    vars: Vec<u32>,
    rhs: bool,
    weight: u64,
}

impl Lin2Equation {
    /// Variables are sorted on construction; duplicates and zero weights are
    /// contract violations.
    pub fn new(mut vars: Vec<u32>, rhs: bool, weight: u64) -> Self {
        vars.sort_unstable();
        assert!(!vars.is_empty(), "equation needs at least one variable");
        assert!(
            vars.windows(2).all(|w| w[0] != w[1]),
            "duplicate variable in equation"
        );
        assert!(weight >= 1, "equation weight must be positive");
        Lin2Equation { vars, rhs, weight }
    }

    pub fn vars(&self) -> &[u32] {
        &self.vars
    }

    pub fn rhs(&self) -> bool {
        self.rhs
    }

    pub fn weight(&self) -> u64 {
        self.weight
    }

    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        let parity = self
            .vars
            .iter()
            .fold(false, |acc, &v| acc ^ a.bit(v as usize));
        parity == self.rhs
    }
}

/// A 0/1 assignment, one bit per variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn zeros(n: usize) -> Self {
        Assignment {
            bits: vec![false; n],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bit(&self, i: usize) -> bool {
        self.bits[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

/// Uniform decision result: either a witness beating the threshold, or the
/// true optimum with an optimal witness. Weights are in original-instance
/// units, i.e. with any reduction offset already re-added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict<W> {
    Yes { witness: W, weight: i64 },
    No { optimum: i64, witness: W },
}

impl<W> Verdict<W> {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes { .. })
    }

    pub fn witness(&self) -> &W {
        match self {
            Verdict::Yes { witness, .. } | Verdict::No { witness, .. } => witness,
        }
    }

    /// Achieved weight of the witness (the optimum on the No side).
    pub fn achieved(&self) -> i64 {
        match self {
            Verdict::Yes { weight, .. } => *weight,
            Verdict::No { optimum, .. } => *optimum,
        }
    }
}

/// Which branch of the above-average algorithm produced the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AaBranch {
    /// Some layer weighed at least `k`; the witness came from conditional
    /// expectation over assignments satisfying that layer.
    Certificate { layer: usize },
    /// All layers were light, so the occurring variables form a kernel that
    /// was searched exhaustively.
    Exhaustive { kernel_vars: usize },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AaOutcome {
    pub verdict: Verdict<Assignment>,
    pub branch: AaBranch,
}

/// Result of running the algorithm up to (not including) exhaustive search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Kernelized {
    /// Witness with weight at least `W/2 + k/2`, in original units.
    Certificate { witness: Assignment, weight: i64 },
    /// Reduced equivalent system with at most `c(c+1)k/2` occurring variables.
    Kernel(Lin2System),
}

/// A weighted system of XOR constraints with at most `arity_bound` variables
/// per equation.
///
/// `offset` records the total weight stripped from every assignment by
/// reductions, so `weight(original, a) = weight(self, a) + offset` holds for
/// each assignment `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lin2System {
    num_vars: usize,
    arity_bound: usize,
    equations: Vec<Lin2Equation>,
    offset: i64,
    reduced: bool,
}

impl Lin2System {
    pub fn new(num_vars: usize, arity_bound: usize, equations: Vec<Lin2Equation>) -> Self {
        assert!(arity_bound >= 2, "arity bound must be at least 2");
        for eq in &equations {
            assert!(eq.vars.len() <= arity_bound, "equation exceeds arity bound");
            assert!(
                eq.vars.iter().all(|&v| (v as usize) < num_vars),
                "equation variable out of range"
            );
        }
        Lin2System {
            num_vars,
            arity_bound,
            equations,
            offset: 0,
            reduced: false,
        }
    }

    pub fn empty(num_vars: usize, arity_bound: usize) -> Self {
        Self::new(num_vars, arity_bound, Vec::new())
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn equations(&self) -> &[Lin2Equation] {
        &self.equations
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Total weight W of all equations.
    pub fn total_weight(&self) -> u64 {
        self.equations.iter().map(|e| e.weight).sum()
    }

    /// Distinct variables occurring in some equation, ascending.
    pub fn occurring_vars(&self) -> Vec<u32> {
        let set: BTreeSet<u32> = self
            .equations
            .iter()
            .flat_map(|e| e.vars.iter().copied())
            .collect();
        set.into_iter().collect()
    }

    /// Satisfied weight of `a` in this system's own units.
    pub fn weight_of(&self, a: &Assignment) -> u64 {
        self.equations
            .iter()
            .filter(|e| e.satisfied_by(a))
            .map(|e| e.weight)
            .sum()
    }

    /// Satisfied weight with the reduction offset re-added when
    /// `original_units` is set.
    pub fn eval_weight(&self, a: &Assignment, original_units: bool) -> Result<i64, Lin2Error> {
        if a.len() != self.num_vars {
            return Err(Lin2Error::LengthMismatch {
                expected: self.num_vars,
                got: a.len(),
            });
        }
        let w = self.weight_of(a) as i64;
        Ok(if original_units { w + self.offset } else { w })
    }

    /// Canonical reduction: identical equations merge by summing weights; of
    /// a complementary pair the lighter side is removed and its weight both
    /// subtracted from the heavier side and added to the offset (equal
    /// weights remove both). The result carries no duplicate variable sets.
    pub fn reduce(&self) -> Lin2System {
        let mut order: Vec<&[u32]> = Vec::new();
        let mut agg: HashMap<&[u32], (u64, u64)> = HashMap::new();
        for eq in &self.equations {
            let slot = agg.entry(&eq.vars).or_insert_with(|| {
                order.push(&eq.vars);
                (0, 0)
            });
            if eq.rhs {
                slot.1 += eq.weight;
            } else {
                slot.0 += eq.weight;
            }
        }
        let mut offset = self.offset;
        let mut equations = Vec::new();
        for vars in order {
            let (w0, w1) = agg[vars];
            offset += w0.min(w1) as i64;
            if w0 > w1 {
                equations.push(Lin2Equation::new(vars.to_vec(), false, w0 - w1));
            } else if w1 > w0 {
                equations.push(Lin2Equation::new(vars.to_vec(), true, w1 - w0));
            }
        }
        Lin2System {
            num_vars: self.num_vars,
            arity_bound: self.arity_bound,
            equations,
            offset,
            reduced: true,
        }
    }

    /// Renumbers variables so that exactly the occurring ones remain; returns
    /// the new system together with the new-to-old index map.
    pub fn compact(&self) -> (Lin2System, Vec<u32>) {
        let occurring = self.occurring_vars();
        let back: HashMap<u32, u32> = occurring
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let equations = self
            .equations
            .iter()
            .map(|e| {
                Lin2Equation::new(
                    e.vars.iter().map(|v| back[v]).collect(),
                    e.rhs,
                    e.weight,
                )
            })
            .collect();
        let sys = Lin2System {
            num_vars: occurring.len(),
            arity_bound: self.arity_bound,
            equations,
            offset: self.offset,
            reduced: self.reduced,
        };
        (sys, occurring)
    }

    /// Greedy layered choice of independent collections `S_c, ..., S_1`.
    ///
    /// Equations are scanned in stored order; an equation joins layer `j`
    /// when exactly `j` of its variables survive removal of all higher-layer
    /// variables and those fresh variables are disjoint from the fresh
    /// variables already chosen in the layer.
    pub fn build_collections(&self) -> IndependentCollections {
        assert!(self.reduced, "collections require a reduced system");
        let mut taken = vec![false; self.equations.len()];
        let mut higher: HashSet<u32> = HashSet::new();
        let mut layers = Vec::with_capacity(self.arity_bound);
        for arity in (1..=self.arity_bound).rev() {
            let mut members = Vec::new();
            let mut layer_fresh: HashSet<u32> = HashSet::new();
            let mut weight = 0u64;
            for (idx, eq) in self.equations.iter().enumerate() {
                if taken[idx] {
                    continue;
                }
                let fresh: Vec<u32> = eq
                    .vars
                    .iter()
                    .copied()
                    .filter(|v| !higher.contains(v))
                    .collect();
                if fresh.len() == arity && fresh.iter().all(|v| !layer_fresh.contains(v)) {
                    taken[idx] = true;
                    layer_fresh.extend(fresh.iter().copied());
                    weight += eq.weight;
                    members.push(LayerMember {
                        equation: idx,
                        fresh_vars: fresh,
                    });
                }
            }
            for member in &members {
                higher.extend(self.equations[member.equation].vars.iter().copied());
            }
            layers.push(CollectionLayer {
                arity,
                members,
                weight,
            });
        }
        IndependentCollections { layers }
    }

    /// Deterministic witness satisfying all of layer `j` with total weight at
    /// least `(W - w(S_j))/2 + w(S_j)` (conditional expectation over the
    /// assignments consistent with the layer).
    pub fn assignment_above_average(
        &self,
        collections: &IndependentCollections,
        layer_arity: usize,
    ) -> Result<Assignment, Lin2Error> {
        let layer = collections
            .layer(layer_arity)
            .filter(|l| !l.members.is_empty())
            .ok_or(Lin2Error::EmptyLayer { arity: layer_arity })?;

        // One fresh variable per layer equation is forced: the highest-index
        // fresh variable, substituted away in every other equation.
        let mut forced: HashMap<u32, usize> = HashMap::new();
        let mut in_layer: HashSet<usize> = HashSet::new();
        for member in &layer.members {
            forced.insert(*member.fresh_vars.last().unwrap(), member.equation);
            in_layer.insert(member.equation);
        }

        struct Residual {
            weight: u64,
            rhs: bool,
            vars: Vec<u32>,
            remaining: usize,
            parity: bool,
        }

        let mut residuals: Vec<Residual> = Vec::new();
        for (idx, eq) in self.equations.iter().enumerate() {
            if in_layer.contains(&idx) {
                continue;
            }
            let mut rhs = eq.rhs;
            let mut varset: BTreeSet<u32> = BTreeSet::new();
            let toggle = |set: &mut BTreeSet<u32>, v: u32| {
                if !set.remove(&v) {
                    set.insert(v);
                }
            };
            for &v in &eq.vars {
                if let Some(&src) = forced.get(&v) {
                    let def = &self.equations[src];
                    rhs ^= def.rhs;
                    for &u in &def.vars {
                        if u != v {
                            toggle(&mut varset, u);
                        }
                    }
                } else {
                    toggle(&mut varset, v);
                }
            }
            let vars: Vec<u32> = varset.into_iter().collect();
            residuals.push(Residual {
                weight: eq.weight,
                rhs,
                remaining: vars.len(),
                parity: false,
                vars,
            });
        }

        let mut occurs: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, r) in residuals.iter().enumerate() {
            for &v in &r.vars {
                occurs.entry(v).or_default().push(i);
            }
        }
        let free_vars: BTreeSet<u32> = occurs.keys().copied().collect();

        let mut bits = vec![false; self.num_vars];
        for v in free_vars {
            // Only equations where v is the last unassigned variable are
            // decided by this choice; all others keep expectation weight/2.
            let mut gain = [0u64; 2];
            for &i in &occurs[&v] {
                let r = &residuals[i];
                if r.remaining == 1 {
                    for (b, g) in gain.iter_mut().enumerate() {
                        if (r.parity ^ (b == 1)) == r.rhs {
                            *g += r.weight;
                        }
                    }
                }
            }
            let choice = gain[1] > gain[0];
            bits[v as usize] = choice;
            for &i in &occurs[&v] {
                let r = &mut residuals[i];
                r.remaining -= 1;
                r.parity ^= choice;
            }
        }

        // Forced variables follow from their defining layer equation.
        for member in &layer.members {
            let eq = &self.equations[member.equation];
            let f = *member.fresh_vars.last().unwrap();
            let mut val = eq.rhs;
            for &u in &eq.vars {
                if u != f {
                    val ^= bits[u as usize];
                }
            }
            bits[f as usize] = val;
        }

        Ok(Assignment::new(bits))
    }

    /// Optimal assignment over all settings of the occurring variables;
    /// non-occurring variables are set to 0 and weight ties resolve to the
    /// lexicographically smallest assignment.
    pub fn exhaustive_solve(&self, guard: usize) -> Result<(Assignment, u64), Lin2Error> {
        if !self.reduced {
            return Err(Lin2Error::NotReduced);
        }
        // Assignments are enumerated through u64 masks.
        let guard = guard.min(62);
        let occurring = self.occurring_vars();
        if occurring.len() > guard {
            return Err(Lin2Error::ExhaustiveGuard {
                occurring: occurring.len(),
                guard,
            });
        }
        let v = occurring.len();
        // The first occurring variable is the most significant bit, so
        // ascending masks enumerate assignments in lexicographic order.
        let shift: HashMap<u32, usize> = occurring
            .iter()
            .enumerate()
            .map(|(i, &var)| (var, v - 1 - i))
            .collect();
        let eqs: Vec<(u64, bool, u64)> = self
            .equations
            .iter()
            .map(|e| {
                let mask = e.vars.iter().fold(0u64, |m, var| m | (1u64 << shift[var]));
                (mask, e.rhs, e.weight)
            })
            .collect();
        let mut best_mask = 0u64;
        let mut best_weight = 0u64;
        let mut first = true;
        for mask in 0..(1u64 << v) {
            let weight: u64 = eqs
                .iter()
                .filter(|&&(m, rhs, _)| ((mask & m).count_ones() % 2 == 1) == rhs)
                .map(|&(_, _, w)| w)
                .sum();
            if first || weight > best_weight {
                best_mask = mask;
                best_weight = weight;
                first = false;
            }
        }
        let mut bits = vec![false; self.num_vars];
        for (i, &var) in occurring.iter().enumerate() {
            bits[var as usize] = (best_mask >> (v - 1 - i)) & 1 == 1;
        }
        Ok((Assignment::new(bits), best_weight))
    }

    /// Decides whether some assignment has weight at least `W/2 + k/2` in
    /// original units, producing a witness either way.
    pub fn solve_aa(&self, k: u64, limits: &Limits) -> Result<AaOutcome, Lin2Error> {
        if k == 0 {
            return Err(Lin2Error::ZeroParameter);
        }
        let reduced = self.reduce();
        let collections = reduced.build_collections();
        if let Some(layer) = collections.heaviest_layer_at_least(k) {
            let witness = reduced.assignment_above_average(&collections, layer)?;
            let in_reduced = reduced.weight_of(&witness);
            debug_assert!(
                2 * in_reduced >= reduced.total_weight() + collections.layer_weight(layer)
            );
            let weight = in_reduced as i64 + reduced.offset;
            return Ok(AaOutcome {
                verdict: Verdict::Yes { witness, weight },
                branch: AaBranch::Certificate { layer },
            });
        }
        let kernel_vars = reduced.occurring_vars().len();
        let (witness, opt) = reduced.exhaustive_solve(limits.exhaustive_vars)?;
        let optimum = opt as i64 + reduced.offset;
        let verdict = if 2 * (opt as u128) >= reduced.total_weight() as u128 + k as u128 {
            Verdict::Yes {
                witness,
                weight: optimum,
            }
        } else {
            Verdict::No { optimum, witness }
        };
        Ok(AaOutcome {
            verdict,
            branch: AaBranch::Exhaustive { kernel_vars },
        })
    }

    /// Polynomial-time part of the solver: either a certified witness of
    /// weight at least `W/2 + k/2`, or an equivalent reduced system with at
    /// most `c(c+1)k/2` occurring variables.
    pub fn kernelize(&self, k: u64) -> Result<Kernelized, Lin2Error> {
        if k == 0 {
            return Err(Lin2Error::ZeroParameter);
        }
        let reduced = self.reduce();
        let collections = reduced.build_collections();
        if let Some(layer) = collections.heaviest_layer_at_least(k) {
            let witness = reduced.assignment_above_average(&collections, layer)?;
            let weight = reduced.weight_of(&witness) as i64 + reduced.offset;
            return Ok(Kernelized::Certificate { witness, weight });
        }
        Ok(Kernelized::Kernel(reduced))
    }
}

/// Per-equation record of a layer: the equation index and its fresh
/// variables (those outside every higher layer).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LayerMember {
    pub equation: usize,
    pub fresh_vars: Vec<u32>,
}

/// Layer `S_j`: a maximal collection of equations with exactly `arity` fresh
/// variables each, pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CollectionLayer {
    pub arity: usize,
    pub members: Vec<LayerMember>,
    pub weight: u64,
}

/// The layers `S_c, S_{c-1}, ..., S_1` in that order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndependentCollections {
    layers: Vec<CollectionLayer>,
}

impl IndependentCollections {
    pub fn layers(&self) -> &[CollectionLayer] {
        &self.layers
    }

    pub fn layer(&self, arity: usize) -> Option<&CollectionLayer> {
        self.layers.iter().find(|l| l.arity == arity)
    }

    pub fn layer_weight(&self, arity: usize) -> u64 {
        self.layer(arity).map_or(0, |l| l.weight)
    }

    /// Largest `j` with `w(S_j) >= k`, if any.
    pub fn heaviest_layer_at_least(&self, k: u64) -> Option<usize> {
        self.layers
            .iter()
            .filter(|l| l.weight >= k)
            .map(|l| l.arity)
            .max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn eq(vars: &[u32], rhs: u8, weight: u64) -> Lin2Equation {
        Lin2Equation::new(vars.to_vec(), rhs == 1, weight)
    }

    fn random_system(rng: &mut ChaCha8Rng, n: usize, m: usize, c: usize) -> Lin2System {
        let equations = (0..m)
            .map(|_| {
                let arity = rng.gen_range(1..=c.min(n));
                let mut vars: Vec<u32> = (0..n as u32).collect();
                vars.shuffle(rng);
                vars.truncate(arity);
                Lin2Equation::new(vars, rng.gen_bool(0.5), rng.gen_range(1..=8))
            })
            .collect();
        Lin2System::new(n, c, equations)
    }

    fn all_assignments(n: usize) -> impl Iterator<Item = Assignment> {
        (0..(1u32 << n)).map(move |mask| {
            Assignment::new((0..n).map(|i| (mask >> (n - 1 - i)) & 1 == 1).collect())
        })
    }

    #[test]
    fn reduce_cancels_complementary_pair() {
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 0, 3), eq(&[0, 1], 1, 1)]);
        let red = sys.reduce();
        assert_eq!(red.equations(), &[eq(&[0, 1], 0, 2)]);
        assert_eq!(red.offset(), 1);
        assert!(red.is_reduced());
    }

    #[test]
    fn reduce_merges_identical_equations() {
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 0, 2), eq(&[0, 1], 0, 5)]);
        let red = sys.reduce();
        assert_eq!(red.equations(), &[eq(&[0, 1], 0, 7)]);
        assert_eq!(red.offset(), 0);
    }

    #[test]
    fn reduce_preserves_weights_up_to_offset() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let sys = random_system(&mut rng, 6, 20, 3);
            let red = sys.reduce();
            for a in all_assignments(6) {
                assert_eq!(
                    sys.weight_of(&a) as i64,
                    red.weight_of(&a) as i64 + red.offset()
                );
            }
        }
    }

    #[test]
    fn collections_follow_greedy_scan() {
        let sys = Lin2System::new(
            7,
            3,
            vec![
                eq(&[0, 1, 2], 0, 1),
                eq(&[3, 4, 5], 1, 1),
                eq(&[0, 3, 6], 0, 1),
            ],
        )
        .reduce();
        let cols = sys.build_collections();
        let s3 = cols.layer(3).unwrap();
        assert_eq!(
            s3.members.iter().map(|m| m.equation).collect::<Vec<_>>(),
            vec![0, 1]
        );
        assert!(cols.layer(2).unwrap().members.is_empty());
        let s1 = cols.layer(1).unwrap();
        assert_eq!(s1.members.len(), 1);
        assert_eq!(s1.members[0].equation, 2);
        assert_eq!(s1.members[0].fresh_vars, vec![6]);
    }

    #[test]
    fn collections_unit_equation_lands_in_layer_one() {
        let sys = Lin2System::new(1, 2, vec![eq(&[0], 0, 1)]).reduce();
        let cols = sys.build_collections();
        assert!(cols.layer(2).unwrap().members.is_empty());
        assert_eq!(cols.layer(1).unwrap().members.len(), 1);
    }

    #[test]
    fn collections_of_empty_system_are_empty() {
        let cols = Lin2System::empty(3, 2).reduce().build_collections();
        assert!(cols.layers().iter().all(|l| l.members.is_empty()));
    }

    #[test]
    fn higher_layer_removal_bounds_every_equation() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let sys = random_system(&mut rng, 10, 15, 4).reduce();
            let cols = sys.build_collections();
            let mut higher: HashSet<u32> = HashSet::new();
            for layer in cols.layers() {
                for eq in sys.equations() {
                    let left = eq.vars().iter().filter(|v| !higher.contains(v)).count();
                    assert!(left <= layer.arity);
                }
                for member in &layer.members {
                    assert_eq!(member.fresh_vars.len(), layer.arity);
                    higher.extend(sys.equations()[member.equation].vars().iter().copied());
                }
            }
        }
    }

    /// GF(2) row rank over u64 variable masks.
    fn gf2_rank(rows: &[u64]) -> usize {
        let mut basis: Vec<u64> = Vec::new();
        for &row in rows {
            let mut r = row;
            for &b in &basis {
                r = r.min(r ^ b);
            }
            if r != 0 {
                basis.push(r);
                basis.sort_unstable_by(|a, b| b.cmp(a));
            }
        }
        basis.len()
    }

    #[test]
    fn layer_equations_stay_linearly_independent_of_rest() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let sys = random_system(&mut rng, 12, 18, 3).reduce();
            let cols = sys.build_collections();
            let mask =
                |e: &Lin2Equation| e.vars().iter().fold(0u64, |m, &v| m | (1 << v));
            for layer in cols.layers() {
                if layer.members.is_empty() {
                    continue;
                }
                let rows: Vec<u64> = layer
                    .members
                    .iter()
                    .map(|m| mask(&sys.equations()[m.equation]))
                    .collect();
                let base = gf2_rank(&rows);
                let in_layer: HashSet<usize> =
                    layer.members.iter().map(|m| m.equation).collect();
                for (idx, eq) in sys.equations().iter().enumerate() {
                    if in_layer.contains(&idx) {
                        continue;
                    }
                    let mut extended = rows.clone();
                    extended.push(mask(eq));
                    assert_eq!(gf2_rank(&extended), base + 1);
                }
            }
        }
    }

    #[test]
    fn witness_forces_unit_variable() {
        let sys = Lin2System::new(1, 2, vec![eq(&[0], 0, 5)]).reduce();
        let cols = sys.build_collections();
        let a = sys.assignment_above_average(&cols, 1).unwrap();
        assert!(!a.bit(0));
        assert_eq!(sys.weight_of(&a), 5);
    }

    #[test]
    fn witness_beats_average_by_layer_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..60 {
            let sys = random_system(&mut rng, 9, 14, 3).reduce();
            let cols = sys.build_collections();
            let Some(best) = cols
                .layers()
                .iter()
                .filter(|l| !l.members.is_empty())
                .max_by_key(|l| l.weight)
            else {
                continue;
            };
            let a = sys.assignment_above_average(&cols, best.arity).unwrap();
            for member in &cols.layer(best.arity).unwrap().members {
                assert!(sys.equations()[member.equation].satisfied_by(&a));
            }
            assert!(2 * sys.weight_of(&a) >= sys.total_weight() + best.weight);
        }
    }

    #[test]
    fn witness_when_layer_covers_whole_system() {
        let sys = Lin2System::new(4, 2, vec![eq(&[0, 1], 1, 2), eq(&[2, 3], 0, 3)]).reduce();
        let cols = sys.build_collections();
        let a = sys.assignment_above_average(&cols, 2).unwrap();
        assert_eq!(sys.weight_of(&a), sys.total_weight());
    }

    #[test]
    fn witness_rejects_empty_layer() {
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 0, 1)]).reduce();
        let cols = sys.build_collections();
        assert_eq!(
            sys.assignment_above_average(&cols, 1),
            Err(Lin2Error::EmptyLayer { arity: 1 })
        );
    }

    #[test]
    fn exhaustive_finds_unit_optimum() {
        let sys = Lin2System::new(1, 2, vec![eq(&[0], 1, 5)]).reduce();
        let (a, w) = sys.exhaustive_solve(30).unwrap();
        assert!(a.bit(0));
        assert_eq!(w, 5);
    }

    #[test]
    fn exhaustive_requires_reduction() {
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 0, 2), eq(&[0, 1], 1, 3)]);
        assert_eq!(sys.exhaustive_solve(30), Err(Lin2Error::NotReduced));
        let red = sys.reduce();
        assert_eq!(red.equations(), &[eq(&[0, 1], 1, 1)]);
        assert_eq!(red.offset(), 2);
        let (_, w) = red.exhaustive_solve(30).unwrap();
        assert_eq!(w as i64 + red.offset(), 3);
    }

    #[test]
    fn exhaustive_guard_reports_variable_count() {
        let sys = Lin2System::new(3, 3, vec![eq(&[0, 1, 2], 0, 1)]).reduce();
        assert_eq!(
            sys.exhaustive_solve(2),
            Err(Lin2Error::ExhaustiveGuard {
                occurring: 3,
                guard: 2
            })
        );
    }

    #[test]
    fn solve_aa_single_equation() {
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 1, 1)]);
        let out = sys.solve_aa(1, &Limits::default()).unwrap();
        match out.verdict {
            Verdict::Yes { witness, weight } => {
                assert_eq!(weight, 1);
                assert_eq!(witness.bits(), &[false, true]);
            }
            Verdict::No { .. } => panic!("expected yes"),
        }
    }

    #[test]
    fn solve_aa_balanced_pairs_are_no_instances() {
        let sys = Lin2System::new(
            4,
            2,
            vec![
                eq(&[0, 1], 0, 1),
                eq(&[0, 1], 1, 1),
                eq(&[2, 3], 0, 1),
                eq(&[2, 3], 1, 1),
            ],
        );
        let out = sys.solve_aa(1, &Limits::default()).unwrap();
        match out.verdict {
            Verdict::No { optimum, .. } => assert_eq!(optimum, 2),
            Verdict::Yes { .. } => panic!("expected no"),
        }
    }

    #[test]
    fn kernelize_returns_certificate_or_small_kernel() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let sys = random_system(&mut rng, 12, 16, 3);
            let k = rng.gen_range(1..=4);
            match sys.kernelize(k).unwrap() {
                Kernelized::Certificate { witness, weight } => {
                    assert_eq!(sys.weight_of(&witness) as i64, weight);
                    assert!(2 * weight as u128 >= (sys.total_weight() + k) as u128);
                }
                Kernelized::Kernel(kernel) => {
                    let c = kernel.arity_bound() as u64;
                    assert!(kernel.occurring_vars().len() as u64 <= c * (c + 1) * k / 2);
                }
            }
        }
    }

    #[test]
    fn kernelize_empty_system() {
        let sys = Lin2System::empty(2, 2);
        match sys.kernelize(1).unwrap() {
            Kernelized::Kernel(kernel) => assert!(kernel.equations().is_empty()),
            _ => panic!("expected kernel"),
        }
    }

    #[test]
    fn solvers_reject_zero_parameter() {
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 1, 1)]);
        assert_eq!(
            sys.solve_aa(0, &Limits::default()),
            Err(Lin2Error::ZeroParameter)
        );
        assert_eq!(sys.kernelize(0), Err(Lin2Error::ZeroParameter));
    }

    #[test]
    fn eval_weight_examples() {
        let sys = Lin2System::new(1, 2, vec![eq(&[0], 0, 7)]);
        assert_eq!(
            sys.eval_weight(&Assignment::new(vec![false]), false).unwrap(),
            7
        );
        // Original units re-add the reduction offset.
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 0, 2), eq(&[0, 1], 1, 3)]).reduce();
        let a = Assignment::new(vec![false, true]);
        assert_eq!(sys.eval_weight(&a, false).unwrap(), 1);
        assert_eq!(sys.eval_weight(&a, true).unwrap(), 3);
        let sys = Lin2System::new(2, 2, vec![eq(&[0, 1], 1, 3)]);
        assert_eq!(
            sys.eval_weight(&Assignment::new(vec![true, true]), false)
                .unwrap(),
            0
        );
        assert_eq!(
            sys.eval_weight(&Assignment::new(vec![true]), false),
            Err(Lin2Error::LengthMismatch {
                expected: 2,
                got: 1
            })
        );
    }

    #[test]
    fn compact_renumbers_occurring_variables() {
        let sys = Lin2System::new(6, 2, vec![eq(&[1, 4], 1, 2)]).reduce();
        let (small, map) = sys.compact();
        assert_eq!(small.num_vars(), 2);
        assert_eq!(map, vec![1, 4]);
        assert_eq!(small.equations()[0].vars(), &[0, 1]);
    }
}
