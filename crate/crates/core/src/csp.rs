//! Boolean Max-c-CSP instances, their exact Fourier expansions, and the
//! reductions to and from weighted XOR systems.
//!
//! Sign convention throughout: boolean 1 (True) corresponds to the input
//! value -1, boolean 0 (False) to +1. Truth tables are indexed so that bit
//! `i` of the table position is the boolean value of input `i`.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::arith::{DyadicRational, Rational};
use crate::lin2::{AaBranch, Assignment, Kernelized, Lin2Equation, Lin2Error, Lin2System, Verdict};
use crate::poly::{walsh_hadamard_i64, DyadicPolynomial, MultilinearPolynomial};
use crate::Limits;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CspError {
    #[error("parameter k must be at least 1")]
    ZeroParameter,
    #[error("eps must satisfy 0 < eps <= 1")]
    InvalidEps,
    #[error("exact branch would search {occurring} variables (guard {guard}); raise eps or the guard")]
    HybridGuard { occurring: usize, guard: usize },
    #[error(transparent)]
    Lin2(#[from] Lin2Error),
}

/// A predicate given by its full truth table over `{-1,+1}^arity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Predicate {
    arity: usize,
    table: Vec<bool>,
}

impl Predicate {
    /// Predicates beyond arity 16 are unsupported (the table would not fit).
    pub const MAX_ARITY: usize = 16;

    pub fn new(arity: usize, table: Vec<bool>) -> Self {
        assert!((1..=Self::MAX_ARITY).contains(&arity), "unsupported arity");
        assert_eq!(table.len(), 1 << arity, "truth table length mismatch");
        Predicate { arity, table }
    }

    /// The clause of width `arity` falsified exactly at `violating_index`.
    pub fn clause_excluding(arity: usize, violating_index: usize) -> Self {
        let mut table = vec![true; 1 << arity];
        table[violating_index] = false;
        Predicate::new(arity, table)
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[bool] {
        &self.table
    }

    pub fn value_at(&self, index: usize) -> bool {
        self.table[index]
    }

    /// Number of satisfying points.
    pub fn ones(&self) -> u64 {
        self.table.iter().filter(|&&b| b).count() as u64
    }

    /// Expected satisfied fraction under a uniform random assignment.
    pub fn satisfied_fraction(&self) -> Rational {
        Rational::new(self.ones() as i64, 1i64 << self.arity)
    }

    /// Exact Fourier expansion: the unique multilinear polynomial over
    /// `{-1,+1}` inputs that reproduces the truth table. Coefficients are
    /// integer multiples of `1/2^arity`.
    pub fn fourier_expansion(&self) -> DyadicPolynomial {
        let mut values: Vec<i64> = self.table.iter().map(|&b| b as i64).collect();
        walsh_hadamard_i64(&mut values);
        let mut poly = MultilinearPolynomial::new();
        for (subset, &v) in values.iter().enumerate() {
            if v == 0 {
                continue;
            }
            let vars: Vec<u32> = (0..self.arity as u32)
                .filter(|i| subset >> i & 1 == 1)
                .collect();
            poly.add_term(vars, DyadicRational::new(v, self.arity as u32));
        }
        poly
    }
}

/// A weighted application of a predicate to an ordered tuple of distinct
/// variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanConstraint {
    pub predicate: Predicate,
    pub tuple: Vec<u32>,
    pub weight: u64,
}

impl BooleanConstraint {
    pub fn new(predicate: Predicate, tuple: Vec<u32>, weight: u64) -> Self {
        assert_eq!(predicate.arity(), tuple.len(), "tuple length mismatch");
        assert!(weight >= 1, "constraint weight must be positive");
        let mut seen = tuple.clone();
        seen.sort_unstable();
        assert!(
            seen.windows(2).all(|w| w[0] != w[1]),
            "tuple variables must be distinct"
        );
        BooleanConstraint {
            predicate,
            tuple,
            weight,
        }
    }

    pub fn satisfied_by(&self, a: &Assignment) -> bool {
        let index = self
            .tuple
            .iter()
            .enumerate()
            .fold(0usize, |acc, (i, &v)| acc | ((a.bit(v as usize) as usize) << i));
        self.predicate.value_at(index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BooleanCspInstance {
    num_vars: usize,
    arity_bound: usize,
    constraints: Vec<BooleanConstraint>,
}

/// Outcome of a hybrid run: an exact optimum, or a polynomial-time
/// witness beating the average by `eps * W / 2^(c+1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HybridOutcome {
    Exact { witness: Assignment, weight: u64 },
    Approx { witness: Assignment, weight: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CspKernelized {
    Certificate {
        witness: Assignment,
        weight: u64,
    },
    /// Equivalent instance with at most `c(c+1)k/2` occurring variables and
    /// rescaled parameter.
    Kernel {
        instance: BooleanCspInstance,
        parameter: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CspOutcome {
    pub verdict: Verdict<Assignment>,
    pub branch: AaBranch,
}

impl BooleanCspInstance {
    pub fn new(
        num_vars: usize,
        arity_bound: usize,
        constraints: Vec<BooleanConstraint>,
    ) -> Self {
        assert!(
            (1..=Predicate::MAX_ARITY).contains(&arity_bound),
            "unsupported arity bound"
        );
        for c in &constraints {
            assert!(c.predicate.arity() <= arity_bound, "constraint exceeds arity bound");
            assert!(
                c.tuple.iter().all(|&v| (v as usize) < num_vars),
                "constraint variable out of range"
            );
        }
        BooleanCspInstance {
            num_vars,
            arity_bound,
            constraints,
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn arity_bound(&self) -> usize {
        self.arity_bound
    }

    pub fn constraints(&self) -> &[BooleanConstraint] {
        &self.constraints
    }

    pub fn total_weight(&self) -> u64 {
        self.constraints.iter().map(|c| c.weight).sum()
    }

    pub fn weight_of(&self, a: &Assignment) -> u64 {
        self.constraints
            .iter()
            .filter(|c| c.satisfied_by(a))
            .map(|c| c.weight)
            .sum()
    }

    /// Exact expected weight `rho * W` of a uniform random assignment.
    pub fn average_weight(&self) -> Rational {
        self.constraints
            .iter()
            .map(|c| c.predicate.satisfied_fraction() * Rational::from_integer(c.weight as i64))
            .sum()
    }

    /// Reduction to a weighted XOR system: the non-constant Fourier terms of
    /// `sum_i w_i p_i` aggregate per monomial `T` into one equation
    /// `sum_{v in T} y_v = 0` (positive coefficient, weight `2^c gamma_T`) or
    /// `= 1` (negative, weight `-2^c gamma_T`).
    ///
    /// For every assignment `a`, `2^c (weight(a) - rho W)` equals the
    /// satisfied minus falsified equation weight, so the above-average
    /// question transfers with the same parameter.
    pub fn to_lin2(&self) -> Lin2System {
        let scale = self.arity_bound as u32;
        let mut aggregate: BTreeMap<Vec<u32>, DyadicRational> = BTreeMap::new();
        for constraint in &self.constraints {
            let poly = constraint.predicate.fourier_expansion();
            for (local, coeff) in poly.non_constant_terms() {
                let mut global: Vec<u32> = local
                    .iter()
                    .map(|&i| constraint.tuple[i as usize])
                    .collect();
                global.sort_unstable();
                let entry = aggregate.entry(global).or_insert(DyadicRational::ZERO);
                *entry += coeff.scale(constraint.weight as i64);
            }
        }
        let mut equations = Vec::new();
        for (vars, gamma) in aggregate {
            if gamma.is_zero() {
                continue;
            }
            let scaled = gamma
                .times_pow2(scale)
                .expect("fourier denominators divide 2^c");
            if scaled > 0 {
                equations.push(Lin2Equation::new(vars, false, scaled as u64));
            } else {
                equations.push(Lin2Equation::new(vars, true, (-scaled) as u64));
            }
        }
        // Monomials are unique, so this pass only sets the reduced flag.
        Lin2System::new(self.num_vars, self.arity_bound.max(2), equations).reduce()
    }

    /// Decides whether some assignment has weight at least `rho W + k/2^c`.
    pub fn solve_aa(&self, k: u64, limits: &Limits) -> Result<CspOutcome, CspError> {
        if k == 0 {
            return Err(CspError::ZeroParameter);
        }
        let outcome = self.to_lin2().solve_aa(k, limits)?;
        let verdict = match outcome.verdict {
            Verdict::Yes { witness, .. } => {
                let weight = self.weight_of(&witness) as i64;
                debug_assert!(
                    (Rational::from_integer(weight) - self.average_weight())
                        * Rational::from_integer(1i64 << self.arity_bound)
                        >= Rational::from_integer(k as i64)
                );
                Verdict::Yes { witness, weight }
            }
            Verdict::No { witness, .. } => {
                // The pointwise correspondence is monotone, so the optimal
                // equation assignment is an optimal CSP assignment.
                let optimum = self.weight_of(&witness) as i64;
                Verdict::No { optimum, witness }
            }
        };
        Ok(CspOutcome {
            verdict,
            branch: outcome.branch,
        })
    }

    /// Hybrid run with target `k = ceil(eps W)`: a heavy layer yields a
    /// polynomial-time `rho W + eps W / 2^(c+1)` witness, otherwise the
    /// reduced system is small enough to search exhaustively.
    pub fn hybrid_solve(&self, eps: Rational, limits: &Limits) -> Result<HybridOutcome, CspError> {
        if eps <= Rational::zero() || eps > Rational::from_integer(1) {
            return Err(CspError::InvalidEps);
        }
        let total = Rational::from_integer(self.total_weight() as i64);
        let k = (eps * total).ceil().to_integer().max(1) as u64;
        let lin = self.to_lin2();
        let collections = lin.build_collections();
        if let Some(layer) = collections.heaviest_layer_at_least(k) {
            let witness = lin.assignment_above_average(&collections, layer)?;
            let weight = self.weight_of(&witness);
            debug_assert!(
                Rational::from_integer(weight as i64)
                    >= self.average_weight()
                        + eps * total / Rational::from_integer(1i64 << (self.arity_bound + 1))
            );
            Ok(HybridOutcome::Approx { witness, weight })
        } else {
            let (witness, _) =
                lin.exhaustive_solve(limits.exhaustive_vars)
                    .map_err(|e| match e {
                        Lin2Error::ExhaustiveGuard { occurring, guard } => {
                            CspError::HybridGuard { occurring, guard }
                        }
                        other => CspError::Lin2(other),
                    })?;
            let weight = self.weight_of(&witness);
            Ok(HybridOutcome::Exact { witness, weight })
        }
    }

    /// Renumbers variables so that exactly the occurring ones remain;
    /// returns the new instance with the new-to-old index map.
    pub fn compact(&self) -> (BooleanCspInstance, Vec<u32>) {
        let occurring: std::collections::BTreeSet<u32> = self
            .constraints
            .iter()
            .flat_map(|c| c.tuple.iter().copied())
            .collect();
        let occurring: Vec<u32> = occurring.into_iter().collect();
        let back: std::collections::HashMap<u32, u32> = occurring
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let constraints = self
            .constraints
            .iter()
            .map(|c| {
                BooleanConstraint::new(
                    c.predicate.clone(),
                    c.tuple.iter().map(|v| back[v]).collect(),
                    c.weight,
                )
            })
            .collect();
        (
            BooleanCspInstance::new(occurring.len().max(1), self.arity_bound, constraints),
            occurring,
        )
    }

    /// Polynomial-time kernel: a certificate, or an equivalent instance with
    /// at most `c(c+1)k/2` occurring variables and parameter `2^(c-1) k`.
    pub fn kernelize(&self, k: u64) -> Result<CspKernelized, CspError> {
        match self.to_lin2().kernelize(k)? {
            Kernelized::Certificate { witness, .. } => {
                let weight = self.weight_of(&witness);
                Ok(CspKernelized::Certificate { witness, weight })
            }
            Kernelized::Kernel(system) => {
                let (instance, scale) = lin2_to_csp(&system);
                Ok(CspKernelized::Kernel {
                    instance,
                    parameter: scale * k,
                })
            }
        }
    }
}

/// Maps a reduced XOR system back to a CSP: an equation of arity `s` becomes
/// the `2^(s-1)` width-`s` clauses forbidding exactly its violating
/// assignments, each of the equation's weight.
///
/// Satisfying assignments gain `w/2` over the clause-set average and
/// violating ones lose `w/2`, so `csp_weight(a) - AVG = sat(a) - W/2`
/// pointwise. The returned scale `2^(c-1)` converts the parameter under the
/// `rho W + k/2^c` threshold convention.
pub fn lin2_to_csp(system: &Lin2System) -> (BooleanCspInstance, u64) {
    assert!(system.is_reduced(), "lin2_to_csp requires a reduced system");
    let c = system.arity_bound();
    let mut constraints = Vec::new();
    for eq in system.equations() {
        let s = eq.vars().len();
        for index in 0..(1usize << s) {
            let parity = index.count_ones() % 2 == 1;
            if parity != eq.rhs() {
                constraints.push(BooleanConstraint::new(
                    Predicate::clause_excluding(s, index),
                    eq.vars().to_vec(),
                    eq.weight(),
                ));
            }
        }
    }
    let instance = BooleanCspInstance::new(system.num_vars(), c, constraints);
    (instance, 1u64 << (c - 1))
}
