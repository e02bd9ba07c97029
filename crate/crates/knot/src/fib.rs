//! Fibonacci via an infinite, self-memoizing binary tree.
//!
//! Nodes are numbered 1, 2, 3, ... with the children of node `n` at `2n`
//! and `2n + 1`, so the path to node `n` from the root reads off the binary
//! digits of `n` after the leading 1 (0 = left, 1 = right): a lookup is
//! O(log n) pointer chasing. Node `n` holds fib(n), and for `n >= 3` its
//! element is a suspension that looks up `n - 2` and `n - 1` *in this same
//! tree*, so every Fibonacci number is computed at most once per tree and
//! repeated lookups are pure navigation.
//!
//! Node visits made by lookups are counted separately from cell forces (see
//! [`visits`]): a warm lookup forces nothing but still walks the path.

use std::cell::Cell;
use std::rc::{Rc, Weak};

use num_traits::One;

use crate::cell::LazyCell;
use crate::error::{Error, Result};
use crate::stats;
use crate::stream::{cons_step, Stream};
use crate::Nat;

struct TreeNode {
    element: Rc<LazyCell<Nat>>,
    left: Rc<LazyCell<BinTree>>,
    right: Rc<LazyCell<BinTree>>,
}

impl TreeNode {
    fn new(
        element: Rc<LazyCell<Nat>>,
        left: Rc<LazyCell<BinTree>>,
        right: Rc<LazyCell<BinTree>>,
    ) -> TreeNode {
        stats::record_node();
        TreeNode { element, left, right }
    }
}

/// A node of the infinite memo tree. Cloning shares the node.
#[derive(Clone)]
pub struct BinTree {
    node: Rc<TreeNode>,
}

impl BinTree {
    /// The value stored at this node, computing it on first demand.
    pub fn element(&self) -> Result<Nat> {
        self.node.element.force()
    }

    /// Child `2n`, constructed on first demand.
    pub fn left(&self) -> Result<BinTree> {
        self.node.left.force()
    }

    /// Child `2n + 1`, constructed on first demand.
    pub fn right(&self) -> Result<BinTree> {
        self.node.right.force()
    }
}

impl std::fmt::Debug for BinTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "BinTree(element cell {})", self.node.element.id())
    }
}

thread_local! {
    static VISITS: Cell<u64> = const { Cell::new(0) };
}

/// Nodes touched by tree navigation since the last [`reset_visits`].
/// A lookup of `n` on a warm tree contributes exactly `floor(log2 n) + 1`.
pub fn visits() -> u64 {
    VISITS.with(Cell::get)
}

pub fn reset_visits() {
    VISITS.with(|v| v.set(0));
}

fn record_visit() {
    VISITS.with(|v| v.set(v.get() + 1));
}

/// Walk from the root to node `n` by the binary digits of `n` below its
/// leading 1, forcing (and thereby constructing) children along the way.
pub fn node_at(root: &BinTree, n: u64) -> Result<BinTree> {
    if n < 1 {
        return Err(Error::Domain(format!("node number {n} out of range; numbering starts at 1")));
    }
    record_visit();
    let mut cur = root.clone();
    let top = 63 - n.leading_zeros() as u64;
    for i in (0..top).rev() {
        cur = if (n >> i) & 1 == 0 { cur.left()? } else { cur.right()? };
        record_visit();
    }
    Ok(cur)
}

/// The cell the whole tree hangs from. Deferred node computations close
/// over it strongly and force it to reach the root, so any live node keeps
/// its tree alive: the structure owns the knot it is tied with.
type RootCell = Rc<LazyCell<BinTree>>;

/// Runs inside the root cell's first force, when the forcer's strong
/// reference guarantees the upgrade.
fn upgrade_root(weak: Weak<LazyCell<BinTree>>) -> RootCell {
    weak.upgrade().expect("root cell alive while being forced")
}

/// Build the tree root: nodes 1 and 2 hold literal 1, everything deeper is
/// deferred. The one force here ties the knot; no element cell runs.
fn fib_tree() -> BinTree {
    let root: RootCell = LazyCell::cyclic(|weak| Ok(build_root(upgrade_root(weak))));
    root.force().expect("root builder only allocates")
}

fn build_root(handle: RootCell) -> BinTree {
    let (h4, h5, h3) = (handle.clone(), handle.clone(), handle);
    let node2 = BinTree {
        node: Rc::new(TreeNode::new(
            LazyCell::ready(Nat::one()),
            LazyCell::new(move || Ok(build_node(4, h4))),
            LazyCell::new(move || Ok(build_node(5, h5))),
        )),
    };
    BinTree {
        node: Rc::new(TreeNode::new(
            LazyCell::ready(Nat::one()),
            LazyCell::ready(node2),
            LazyCell::new(move || Ok(build_node(3, h3))),
        )),
    }
}

fn build_node(n: u64, handle: RootCell) -> BinTree {
    let he = handle.clone();
    let hl = handle.clone();
    let hr = handle;
    BinTree {
        node: Rc::new(TreeNode::new(
            LazyCell::new(move || {
                let root = he.force()?;
                let a = node_at(&root, n - 2)?.element()?;
                let b = node_at(&root, n - 1)?.element()?;
                Ok(a + b)
            }),
            LazyCell::new(move || Ok(build_node(2 * n, hl))),
            LazyCell::new(move || Ok(build_node(2 * n + 1, hr))),
        )),
    }
}

/// One memo tree plus its breadth-first value stream. All lookups through
/// the same handle share one set of computed elements.
pub struct FibHandle {
    root: BinTree,
    values: Stream<Nat>,
}

/// Create a fresh memo tree. Only the two literal nodes exist afterwards;
/// no element computation has run.
pub fn fib_handle() -> FibHandle {
    let root = fib_tree();
    let values = breadth_first(root.clone()).map(|node: BinTree| node.element());
    FibHandle { root, values }
}

impl FibHandle {
    /// fib(n) by tree navigation, memoized in the handle's tree.
    pub fn lookup(&self, n: u64) -> Result<Nat> {
        node_at(&self.root, n)?.element()
    }

    /// The tree's values in node order 1, 2, 3, ... as a lazy stream.
    /// `stream().index(n)` and `lookup(n)` read the same cells.
    pub fn stream(&self) -> Stream<Nat> {
        self.values.clone()
    }

    /// The underlying tree root.
    pub fn tree(&self) -> BinTree {
        self.root.clone()
    }
}

/// Nodes of the tree in breadth-first order: the queue being consumed is
/// the same stream being produced, one level behind.
pub fn breadth_first(t: BinTree) -> Stream<BinTree> {
    Stream::cyclic(move |q| Ok(cons_step(t, traverse(q))))
}

/// For a queue `t . rest`, emit `left(t) . right(t)` and continue with
/// `rest`. Forcing these entries is what constructs the tree level by level.
fn traverse(q: Stream<BinTree>) -> Stream<BinTree> {
    Stream::defer_step(move || {
        let (t, rest) = q.uncons()?.ok_or(Error::EmptyStream)?;
        let t2 = t.clone();
        Ok(cons_step(
            t.left()?,
            Stream::defer_step(move || Ok(cons_step(t2.right()?, traverse(rest)))),
        ))
    })
}

/// Doubly recursive fib: exponential time, no sharing. The reference
/// implementation the structures above are measured against.
pub fn slow_fib(n: u64) -> Result<Nat> {
    if n < 1 {
        return Err(Error::Domain(format!("fib({n}) undefined; domain starts at 1")));
    }
    if n <= 2 {
        return Ok(Nat::one());
    }
    Ok(slow_fib(n - 1)? + slow_fib(n - 2)?)
}

/// Two-accumulator fib: linear time, constant space.
pub fn fast_fib(n: u64) -> Result<Nat> {
    if n < 1 {
        return Err(Error::Domain(format!("fib({n}) undefined; domain starts at 1")));
    }
    let mut a = Nat::from(0u32);
    let mut b = Nat::one();
    for _ in 1..n {
        let next = &a + &b;
        a = b;
        b = next;
    }
    Ok(b)
}

/// fib(n) through a tree that is built, used once, and abandoned. Every
/// call repeats the full computation; the cheap-second-call behavior
/// belongs to a retained [`FibHandle`], not to the algorithm itself.
pub fn fib_oneshot(n: u64) -> Result<Nat> {
    let root = fib_tree();
    node_at(&root, n)?.element()
}
