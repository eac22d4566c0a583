//! Event counters for factorizations and triangular solves.
//!
//! The dominant cost of the subspace iteration is the LU factorizations of the
//! shifted matrices `A - μE` and the triangular substitutions applied to their
//! factors. Every factorization and every single-column substitution pair
//! (one forward, one back) is counted here so a run report can state exact
//! event counts. Counts are atomic so concurrent solves against one
//! factorization stay exact.

use std::sync::atomic::{AtomicU64, Ordering};

/// Shared counters for one descriptor system.
///
/// A probe solve performed internally by a factorization to detect numerical
/// singularity is part of the factorization and is *not* counted as a solve.
#[derive(Debug, Default)]
pub struct RunCounters {
    lu: AtomicU64,
    solves: AtomicU64,
}

/// A point-in-time copy of the counters; subtract two snapshots to attribute
/// events to a phase of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterSnapshot {
    pub lu_count: u64,
    pub solve_count: u64,
}

impl RunCounters {
    pub fn record_lu(&self) {
        self.lu.fetch_add(1, Ordering::Relaxed);
    }

    /// Record `k` single-column triangular solves against an existing
    /// factorization.
    pub fn record_solves(&self, k: u64) {
        self.solves.fetch_add(k, Ordering::Relaxed);
    }

    pub fn snapshot(&self) -> CounterSnapshot {
        CounterSnapshot {
            lu_count: self.lu.load(Ordering::Relaxed),
            solve_count: self.solves.load(Ordering::Relaxed),
        }
    }
}

impl CounterSnapshot {
    /// Events that happened since `earlier`.
    pub fn since(&self, earlier: CounterSnapshot) -> CounterSnapshot {
        CounterSnapshot {
            lu_count: self.lu_count - earlier.lu_count,
            solve_count: self.solve_count - earlier.solve_count,
        }
    }
}
