//! Library-global instrumentation counters.
//!
//! The structures in this crate make claims about *how much work they do*
//! (how many suspensions ran, how many nodes were built, how many constraint
//! tests fired), not just about their values. These counters make that
//! observable. They are thread-local: every structure here is single-threaded
//! by construction, and per-thread counters keep parallel test runs from
//! trampling each other.
//!
//! The intended use is bracketing: `reset()`, do the work, `snapshot()`.

use std::cell::Cell;

/// A snapshot of the four work counters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Stats {
    /// Cell computations that actually executed (memoized hits don't count).
    pub forces: u64,
    /// Lazy cells created.
    pub allocations: u64,
    /// Stream/tree nodes constructed.
    pub nodes: u64,
    /// Primitive constraint tests performed by search-tree filters.
    pub tests: u64,
}

impl Stats {
    /// Counter deltas since an earlier snapshot.
    pub fn since(&self, earlier: &Stats) -> Stats {
        Stats {
            forces: self.forces - earlier.forces,
            allocations: self.allocations - earlier.allocations,
            nodes: self.nodes - earlier.nodes,
            tests: self.tests - earlier.tests,
        }
    }
}

thread_local! {
    static FORCES: Cell<u64> = const { Cell::new(0) };
    static ALLOCATIONS: Cell<u64> = const { Cell::new(0) };
    static NODES: Cell<u64> = const { Cell::new(0) };
    static TESTS: Cell<u64> = const { Cell::new(0) };
    // Cell ids are diagnostic only and survive reset() so errors stay
    // attributable across measurement brackets.
    static NEXT_CELL_ID: Cell<u64> = const { Cell::new(1) };
}

/// Current counter values.
pub fn snapshot() -> Stats {
    Stats {
        forces: FORCES.get(),
        allocations: ALLOCATIONS.get(),
        nodes: NODES.get(),
        tests: TESTS.get(),
    }
}

/// Zero all four counters.
pub fn reset() {
    FORCES.set(0);
    ALLOCATIONS.set(0);
    NODES.set(0);
    TESTS.set(0);
}

pub(crate) fn record_force() {
    FORCES.set(FORCES.get() + 1);
}

pub(crate) fn record_allocation() {
    ALLOCATIONS.set(ALLOCATIONS.get() + 1);
}

pub(crate) fn record_node() {
    NODES.set(NODES.get() + 1);
}

pub(crate) fn record_tests(n: u64) {
    TESTS.set(TESTS.get() + n);
}

pub(crate) fn fresh_cell_id() -> u64 {
    let id = NEXT_CELL_ID.get();
    NEXT_CELL_ID.set(id + 1);
    id
}
