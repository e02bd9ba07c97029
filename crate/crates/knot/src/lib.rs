//! Tying the knot in strict Rust: lazy, self-referential data structures
//! with observable evaluation costs.
//!
//! The crate builds three families of structures on one primitive, the
//! evaluate-once [`LazyCell`]:
//!
//! * [`stream`] — memoized lazy lists, including physically cyclic ones and
//!   the classic sorted-merge generators (Hamming numbers and their
//!   generalization to arbitrary factor sets);
//! * [`fib`] — an infinite binary memo tree for Fibonacci numbers with
//!   logarithmic lookup, plus its breadth-first traversal;
//! * [`search`] — lazily grown search trees where each node's subtree is a
//!   filtered copy of a shallower "shadow" subtree, so one cheap test per
//!   candidate replaces a test against the whole path (permutations,
//!   n-queens, square-free sequences).
//!
//! Work done by the structures (computations run, cells and nodes built,
//!constraint tests fired) is counted in thread-local [`Stats`] counters so
//! that sharing and laziness claims are testable, not aspirational.

pub mod cell;
pub mod error;
pub mod fib;
pub mod search;
pub mod stats;
pub mod stream;

pub use cell::LazyCell;
pub use error::{Error, Result};
pub use fib::{BinTree, FibHandle};
pub use search::{Path, SearchTree, ShadowSeq, Symbol};
pub use stats::{reset as reset_stats, snapshot as snapshot_stats, Stats};
pub use stream::Stream;

/// Unbounded natural number; all stream and tree element values use this.
pub type Nat = num_bigint::BigUint;
