//! Worst-case optimal join execution: sorted tries, Generic Join, binary
//! join operators and the Heavy/Light algorithm, with operation counters.

mod gj;
mod heavy_light;
mod trie;

pub use gj::{generic_join, generic_join_par, gj_plan};
pub use heavy_light::{heavy_light, heavy_light_plan};
pub use trie::{TrieNode, TrieRelation};

use std::fmt;
use std::ops::AddAssign;

use crate::relation::Relation;

/// Operation counters. All are monotone during a run and deterministic for a
/// fixed plan and input.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExecStats {
    pub tuples_out: u64,
    /// Keys enumerated from a leader's child list.
    pub leader_keys: u64,
    /// Binary-search probes into follower child lists.
    pub probes: u64,
    /// Value comparisons made by those probes.
    pub comparisons: u64,
    pub recursive_calls: u64,
    /// Tuples read or written by join, semijoin and partition operators.
    pub tuples_touched: u64,
    /// Guards materialized above their `2^⌈h*(Z)⌉` budget.
    pub guard_excess: u64,
}

impl ExecStats {
    /// The instrumented work measure used for running-time checks.
    pub fn work(&self) -> u64 {
        self.tuples_out + self.leader_keys + self.comparisons + self.recursive_calls + self.tuples_touched
    }
}

impl AddAssign for ExecStats {
    fn add_assign(&mut self, o: ExecStats) {
        self.tuples_out += o.tuples_out;
        self.leader_keys += o.leader_keys;
        self.probes += o.probes;
        self.comparisons += o.comparisons;
        self.recursive_calls += o.recursive_calls;
        self.tuples_touched += o.tuples_touched;
        self.guard_excess += o.guard_excess;
    }
}

impl fmt::Display for ExecStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "tuples_out: {}", self.tuples_out)?;
        writeln!(f, "leader_keys: {}", self.leader_keys)?;
        writeln!(f, "probes: {}", self.probes)?;
        writeln!(f, "comparisons: {}", self.comparisons)?;
        writeln!(f, "recursive_calls: {}", self.recursive_calls)?;
        writeln!(f, "tuples_touched: {}", self.tuples_touched)?;
        writeln!(f, "guard_excess: {}", self.guard_excess)?;
        write!(f, "work: {}", self.work())
    }
}

/// Natural join `A ⋈ B`.
pub fn binary_join(a: &Relation, b: &Relation) -> Relation {
    a.natural_join(b)
}

/// Semijoin `A ⋉ B`; the schema is `A`'s.
pub fn semijoin(a: &Relation, b: &Relation) -> Relation {
    a.semijoin(b)
}
