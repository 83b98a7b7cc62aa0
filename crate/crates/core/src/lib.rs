//! Solvers for constraint satisfaction parameterized above the
//! random-assignment average.
//!
//! Given weighted constraints whose uniform random assignment satisfies an
//! expected weight `rho W`, the solvers decide whether some assignment beats
//! that average by a parameter `k`, producing witnesses, linear-variable
//! kernels, or hybrid approximate/exact outcomes:
//!
//! * [`lin2`] — weighted XOR systems (Max-c-Lin-2) with threshold
//!   `W/2 + k/2`, the universal intermediate representation;
//! * [`csp`] — boolean CSPs with threshold `rho W + k/2^c`, reduced to XOR
//!   systems through exact Fourier expansions;
//! * [`ordering`] — permutation CSPs of arity 2 and 3 with threshold
//!   `rho W + k`, via reduction rules and bucket orderings;
//! * [`exact`] — enumeration oracles and the `O*(2^n)` ordering dynamic
//!   program backing the exact branches;
//! * [`io`] — the text formats shared by the command-line tools.
//!
//! All arithmetic on thresholds and Fourier coefficients is exact (dyadic or
//! general rationals); no floating point is involved anywhere.

pub mod arith;
pub mod csp;
pub mod exact;
pub mod io;
pub mod lin2;
pub mod ordering;
pub mod poly;

/// Variable ceilings for the exponential-time branches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Maximum occurring variables for exhaustive XOR search.
    pub exhaustive_vars: usize,
    /// Maximum variables for the subset dynamic program over orderings.
    pub ordering_vars: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            exhaustive_vars: 30,
            ordering_vars: 24,
        }
    }
}

impl Limits {
    /// One ceiling for both exponential branches.
    pub fn uniform(guard: usize) -> Self {
        Limits {
            exhaustive_vars: guard,
            ordering_vars: guard,
        }
    }
}
