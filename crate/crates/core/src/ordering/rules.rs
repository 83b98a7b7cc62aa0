//! The five reduction rules for 3-linear ordering instances: Redundancy,
//! Merging, Cancellation, Edge Replacement and Cycle Replacement, applied to
//! a fixpoint in that order with triples scanned lexicographically.
//!
//! Every rule preserves, for each ordering, the identity
//! `weight(before) = weight(after) + shift_delta`: Cancellation contributes
//! `+w_min`, Cycle Replacement `-w_min`, the rest `0`.

use std::collections::BTreeMap;

use super::{OrderingConstraint, OrderingInstance};

/// An irreducible instance plus the variable renumbering used to drop unused
/// variables (`kept_vars[new] = old`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedOrdering {
    pub instance: OrderingInstance,
    pub kept_vars: Vec<u32>,
}

impl OrderingInstance {
    /// Runs the reduction rules to a fixpoint, drops unused variables, and
    /// flags the result irreducible.
    pub fn apply_reduction_rules(&self) -> ReducedOrdering {
        let mut work: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for c in self.constraints() {
            *work.entry(c.tuple().to_vec()).or_insert(0) += c.weight();
        }
        let mut shift = self.weight_shift();

        loop {
            if cancellation_pass(&mut work, &mut shift) {
                continue;
            }
            if edge_replacement_pass(&mut work) {
                continue;
            }
            if cycle_replacement_pass(&mut work, &mut shift) {
                continue;
            }
            break;
        }

        // Redundancy on variables: renumber so only used variables remain.
        let mut kept_vars: Vec<u32> = work
            .keys()
            .flat_map(|t| t.iter().copied())
            .collect::<std::collections::BTreeSet<u32>>()
            .into_iter()
            .collect();
        kept_vars.sort_unstable();
        let back: std::collections::HashMap<u32, u32> = kept_vars
            .iter()
            .enumerate()
            .map(|(new, &old)| (old, new as u32))
            .collect();
        let constraints: Vec<OrderingConstraint> = work
            .into_iter()
            .map(|(tuple, weight)| {
                OrderingConstraint::new(tuple.iter().map(|v| back[v]).collect(), weight)
            })
            .collect();
        let instance =
            OrderingInstance::with_parts(kept_vars.len(), constraints, shift, true);
        debug_assert!(instance.irreducibility_violations().is_empty());
        ReducedOrdering {
            instance,
            kept_vars,
        }
    }

    /// Checks the irreducibility invariants directly; empty means the
    /// instance is closed under all five rules.
    pub fn irreducibility_violations(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let mut used = vec![false; self.num_vars()];
        let mut seen: BTreeMap<Vec<u32>, u64> = BTreeMap::new();
        for c in self.constraints() {
            if c.weight() == 0 {
                violations.push(format!("zero-weight constraint {:?}", c.tuple()));
            }
            for &v in c.tuple() {
                used[v as usize] = true;
            }
            if seen.insert(c.tuple().to_vec(), c.weight()).is_some() {
                violations.push(format!("duplicate tuple {:?}", c.tuple()));
            }
        }
        for (v, &u) in used.iter().enumerate() {
            if !u {
                violations.push(format!("unused variable {v}"));
            }
        }
        for tuple in seen.keys().filter(|t| t.len() == 2) {
            let reverse = vec![tuple[1], tuple[0]];
            if tuple[0] < tuple[1] && seen.contains_key(&reverse) {
                violations.push(format!("binary reverse pair {:?}", tuple));
            }
        }
        // Every constrained triple must miss a reverse pair (both
        // orientations of some middle absent), else a ternary rule applies.
        let mut triples: std::collections::BTreeSet<Vec<u32>> = Default::default();
        for tuple in seen.keys().filter(|t| t.len() == 3) {
            let mut sorted = tuple.clone();
            sorted.sort_unstable();
            triples.insert(sorted);
        }
        for triple in triples {
            let absent_pair = triple.iter().any(|&mid| {
                let ends: Vec<u32> = triple.iter().copied().filter(|&v| v != mid).collect();
                let fwd = vec![ends[0], mid, ends[1]];
                let bwd = vec![ends[1], mid, ends[0]];
                !seen.contains_key(&fwd) && !seen.contains_key(&bwd)
            });
            if !absent_pair {
                violations.push(format!("no absent reverse pair on triple {:?}", triple));
            }
        }
        violations
    }
}

/// Cancels every binary reverse pair once; returns whether anything changed.
fn cancellation_pass(work: &mut BTreeMap<Vec<u32>, u64>, shift: &mut i64) -> bool {
    let pairs: Vec<(Vec<u32>, Vec<u32>)> = work
        .keys()
        .filter(|t| t.len() == 2 && t[0] < t[1])
        .filter_map(|t| {
            let reverse = vec![t[1], t[0]];
            work.contains_key(&reverse).then(|| (t.clone(), reverse))
        })
        .collect();
    let mut changed = false;
    for (fwd, bwd) in pairs {
        let w_min = work[&fwd].min(work[&bwd]);
        *shift += w_min as i64;
        subtract(work, &fwd, w_min);
        subtract(work, &bwd, w_min);
        changed = true;
    }
    changed
}

/// Applies the first edge pattern found: ternaries `(x,y,z)`, `(y,x,z)`,
/// `(x,z,y)` lose `w_min` each and the binary `(x,z)` gains it.
fn edge_replacement_pass(work: &mut BTreeMap<Vec<u32>, u64>) -> bool {
    let Some((e1, e2, e3)) = find_pattern(work, |e1| {
        (
            vec![e1[1], e1[0], e1[2]],
            vec![e1[0], e1[2], e1[1]],
        )
    }) else {
        return false;
    };
    let w_min = work[&e1].min(work[&e2]).min(work[&e3]);
    let binary = vec![e1[0], e1[2]];
    subtract(work, &e1, w_min);
    subtract(work, &e2, w_min);
    subtract(work, &e3, w_min);
    *work.entry(binary).or_insert(0) += w_min;
    true
}

/// Applies the first cyclic pattern found: rotations `(x,y,z)`, `(y,z,x)`,
/// `(z,x,y)` lose `w_min` each; the three binaries `(x,y)`, `(y,z)`, `(z,x)`
/// gain it. Every ordering satisfies one extra binary, hence the shift.
fn cycle_replacement_pass(work: &mut BTreeMap<Vec<u32>, u64>, shift: &mut i64) -> bool {
    let Some((e1, e2, e3)) = find_pattern(work, |e1| {
        (
            vec![e1[1], e1[2], e1[0]],
            vec![e1[2], e1[0], e1[1]],
        )
    }) else {
        return false;
    };
    let w_min = work[&e1].min(work[&e2]).min(work[&e3]);
    for binary in [
        vec![e1[0], e1[1]],
        vec![e1[1], e1[2]],
        vec![e1[2], e1[0]],
    ] {
        *work.entry(binary).or_insert(0) += w_min;
    }
    subtract(work, &e1, w_min);
    subtract(work, &e2, w_min);
    subtract(work, &e3, w_min);
    *shift -= w_min as i64;
    true
}

/// First ternary base tuple (lexicographic) whose two derived mates are also
/// present.
fn find_pattern<F>(
    work: &BTreeMap<Vec<u32>, u64>,
    mates: F,
) -> Option<(Vec<u32>, Vec<u32>, Vec<u32>)>
where
    F: Fn(&[u32]) -> (Vec<u32>, Vec<u32>),
{
    for e1 in work.keys().filter(|t| t.len() == 3) {
        let (e2, e3) = mates(e1);
        if work.contains_key(&e2) && work.contains_key(&e3) {
            return Some((e1.clone(), e2, e3));
        }
    }
    None
}

fn subtract(work: &mut BTreeMap<Vec<u32>, u64>, tuple: &[u32], amount: u64) {
    let w = work.get_mut(tuple).expect("tuple present");
    *w -= amount;
    if *w == 0 {
        work.remove(tuple);
    }
}
