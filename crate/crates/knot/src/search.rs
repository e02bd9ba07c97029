//! Lazily grown search trees with shadow pruning.
//!
//! A [`SearchTree`] node carries a value, a lazy subtree (ways to extend the
//! path ending here) and lazy siblings (alternatives at the same depth).
//! Depth-k paths are candidate solutions of size k.
//!
//! The builders all share one trick. The subtree of the path `a b c d e` is
//! a filtered copy of the subtree of its *shadow* `b c d e` — the same path
//! with the oldest... newest-but-one prefix dropped by one element. The
//! shadow's subtree has already survived every older constraint, so the
//! filter applies only the one constraint the new first element adds:
//! one cheap test per candidate instead of a test against the whole path.
//! Because the tree is its own shadow (the subtree of a depth-1 path is a
//! filter of the whole tree), the structure is self-referential and
//! memoized exactly like the streams.
//!
//! Per-problem rules plug into the same filtered-copy machinery:
//! permutations ban one value (1 comparison), n-queens ban a row and two
//! diagonals (3 comparisons), square-free sequences test one half-length
//! repeat at even lengths (1 `repeated` call, none at odd lengths).

use std::cell::Cell;
use std::rc::{Rc, Weak};

use crate::cell::LazyCell;
use crate::error::{Error, Result};
use crate::stats;
use crate::stream::{append_lazy, Stream};

pub type Symbol = u32;

/// A root-first sequence of node values.
pub type Path = Vec<Symbol>;

pub struct SearchNode {
    value: Symbol,
    subtree: Rc<LazyCell<SearchTree>>,
    siblings: Rc<LazyCell<SearchTree>>,
}

impl SearchNode {
    pub fn value(&self) -> Symbol {
        self.value
    }

    pub fn subtree(&self) -> Result<SearchTree> {
        self.subtree.force()
    }

    pub fn siblings(&self) -> Result<SearchTree> {
        self.siblings.force()
    }
}

#[derive(Clone)]
pub enum SearchTree {
    Empty,
    Node(Rc<SearchNode>),
}

impl SearchTree {
    fn node(
        value: Symbol,
        subtree: Rc<LazyCell<SearchTree>>,
        siblings: Rc<LazyCell<SearchTree>>,
    ) -> SearchTree {
        stats::record_node();
        SearchTree::Node(Rc::new(SearchNode { value, subtree, siblings }))
    }

    pub fn as_node(&self) -> Option<&SearchNode> {
        match self {
            SearchTree::Empty => None,
            SearchTree::Node(nd) => Some(nd),
        }
    }

    /// Values along this sibling chain, forcing it to its end.
    pub fn chain_values(&self) -> Result<Vec<Symbol>> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        while let SearchTree::Node(nd) = cur {
            out.push(nd.value);
            cur = nd.siblings.force()?;
        }
        Ok(out)
    }
}

impl std::fmt::Debug for SearchTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SearchTree::Empty => write!(f, "Empty"),
            SearchTree::Node(nd) => write!(f, "Node({})", nd.value),
        }
    }
}

thread_local! {
    static FILTER_RESULTS: Cell<u64> = const { Cell::new(0) };
    static EVEN_LENGTH_EXAMS: Cell<u64> = const { Cell::new(0) };
    static SYMBOL_COMPARISONS: Cell<u64> = const { Cell::new(0) };
}

/// Filter-level work counters, separate from the global [`crate::Stats`].
///
/// `filter_results` counts every tree value the shadow filter produces: one
/// per admitted node plus the Empty ending each filtered chain. For the
/// permutation rule this equals the constraint-test count exactly, because
/// each filtered chain contains its banned value exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SearchCounters {
    /// Tree values (nodes and chain-ending empties) built by shadow filters.
    pub filter_results: u64,
    /// Candidate examinations made at even target length by the square-free
    /// rule; each costs exactly one `repeated` invocation.
    pub even_length_exams: u64,
    /// Individual symbol comparisons performed inside [`repeated`].
    pub symbol_comparisons: u64,
}

impl SearchCounters {
    pub fn since(&self, earlier: &SearchCounters) -> SearchCounters {
        SearchCounters {
            filter_results: self.filter_results - earlier.filter_results,
            even_length_exams: self.even_length_exams - earlier.even_length_exams,
            symbol_comparisons: self.symbol_comparisons - earlier.symbol_comparisons,
        }
    }
}

pub fn counters() -> SearchCounters {
    SearchCounters {
        filter_results: FILTER_RESULTS.with(Cell::get),
        even_length_exams: EVEN_LENGTH_EXAMS.with(Cell::get),
        symbol_comparisons: SYMBOL_COMPARISONS.with(Cell::get),
    }
}

pub fn reset_counters() {
    FILTER_RESULTS.with(|c| c.set(0));
    EVEN_LENGTH_EXAMS.with(|c| c.set(0));
    SYMBOL_COMPARISONS.with(|c| c.set(0));
}

fn record_filter_result() {
    FILTER_RESULTS.with(|c| c.set(c.get() + 1));
}

fn record_even_length_exam() {
    EVEN_LENGTH_EXAMS.with(|c| c.set(c.get() + 1));
}

fn record_symbol_comparison() {
    SYMBOL_COMPARISONS.with(|c| c.set(c.get() + 1));
}

fn domain_positive(n: Symbol, what: &str) -> Result<()> {
    if n < 1 {
        return Err(Error::Domain(format!("{what} needs an alphabet of at least 1, got {n}")));
    }
    Ok(())
}

/// The complete tree over values 1..=n: every node's subtree is the whole
/// tree again, physically shared. Walking it to any depth constructs only
/// the n top-level nodes.
pub fn complete_tree(n: Symbol) -> Result<SearchTree> {
    domain_positive(n, "complete_tree")?;
    let root = LazyCell::cyclic(move |weak| complete_level(1, n, upgrade_root(weak)));
    root.force()
}

// Runs inside the root cell's first force, when the forcer's strong
// reference guarantees the upgrade. The nodes then hold the root cell
// strongly: the tree owns the knot it is tied with.
fn upgrade_root(weak: Weak<LazyCell<SearchTree>>) -> Rc<LazyCell<SearchTree>> {
    weak.upgrade().expect("root cell alive while being forced")
}

fn complete_level(m: Symbol, n: Symbol, root: Rc<LazyCell<SearchTree>>) -> Result<SearchTree> {
    if m > n {
        return Ok(SearchTree::Empty);
    }
    let subtree = {
        let root = Rc::clone(&root);
        LazyCell::new(move || root.force())
    };
    let siblings = LazyCell::new(move || complete_level(m + 1, n, root));
    Ok(SearchTree::node(m, subtree, siblings))
}

/// A structural copy of `t` with no sharing: every position becomes a fresh
/// node when reached. Same values on every path as `t`; exponentially more
/// construction work on shared trees. Exists to make the cost of *not*
/// sharing measurable.
pub fn expand(t: &SearchTree) -> SearchTree {
    match t {
        SearchTree::Empty => SearchTree::Empty,
        SearchTree::Node(nd) => {
            let subtree = {
                let nd = Rc::clone(nd);
                LazyCell::new(move || Ok(expand(&nd.subtree.force()?)))
            };
            let siblings = {
                let nd = Rc::clone(nd);
                LazyCell::new(move || Ok(expand(&nd.siblings.force()?)))
            };
            SearchTree::node(nd.value, subtree, siblings)
        }
    }
}

/// A pruning rule: per-path-level state plus the single test a new
/// candidate must pass given that every older constraint is already baked
/// into the shadow being filtered.
trait Rule {
    type State: Clone + 'static;
    /// State attached to the top-level node `m` (a path of length 1).
    fn start(&self, m: Symbol) -> Self::State;
    /// May `candidate` extend a path with this state? Counts its tests.
    fn admits(&self, state: &Self::State, candidate: Symbol) -> Result<bool>;
    /// State one level deeper, after `kept` was admitted.
    fn descend(&self, state: &Self::State, kept: Symbol) -> Self::State;
}

/// Build the self-shadowing tree for a rule: top-level values 1..=n, and
/// each top-level subtree is the filter of the whole tree itself.
fn shadow_tree<R: Rule + 'static>(n: Symbol, rule: Rc<R>) -> Result<SearchTree> {
    let root = LazyCell::cyclic(move |weak| shadow_level(1, n, upgrade_root(weak), rule));
    root.force()
}

fn shadow_level<R: Rule + 'static>(
    m: Symbol,
    n: Symbol,
    root: Rc<LazyCell<SearchTree>>,
    rule: Rc<R>,
) -> Result<SearchTree> {
    if m > n {
        return Ok(SearchTree::Empty);
    }
    let subtree = {
        let root = Rc::clone(&root);
        let rule = Rc::clone(&rule);
        LazyCell::new(move || {
            let whole = root.force()?;
            let state = rule.start(m);
            filter(rule, state, whole)
        })
    };
    let siblings = LazyCell::new(move || shadow_level(m + 1, n, root, rule));
    Ok(SearchTree::node(m, subtree, siblings))
}

/// Copy a shadow chain, keeping the candidates the rule admits. Runs until
/// it can return one tree value: the next admitted node (with the rest of
/// the walk deferred behind its lazy fields) or the Empty that ends the
/// chain. Pruned candidates are skipped inside the same demand.
fn filter<R: Rule + 'static>(
    rule: Rc<R>,
    state: R::State,
    shadow: SearchTree,
) -> Result<SearchTree> {
    let mut cur = shadow;
    loop {
        match cur {
            SearchTree::Empty => {
                record_filter_result();
                return Ok(SearchTree::Empty);
            }
            SearchTree::Node(nd) => {
                if rule.admits(&state, nd.value)? {
                    let subtree = {
                        let rule = Rc::clone(&rule);
                        let state = rule.descend(&state, nd.value);
                        let nd = Rc::clone(&nd);
                        LazyCell::new(move || filter(rule, state, nd.subtree.force()?))
                    };
                    let siblings = {
                        let rule = Rc::clone(&rule);
                        let state = state.clone();
                        let nd = Rc::clone(&nd);
                        LazyCell::new(move || filter(rule, state, nd.siblings.force()?))
                    };
                    record_filter_result();
                    return Ok(SearchTree::node(nd.value, subtree, siblings));
                }
                cur = nd.siblings.force()?;
            }
        }
    }
}

/// Permutations: a value may not reappear, so each level bans exactly the
/// first element of the path being extended. One equality test per
/// candidate; everything older is implicit in the shadow.
struct PermRule;

impl Rule for PermRule {
    type State = Symbol;

    fn start(&self, m: Symbol) -> Symbol {
        m
    }

    fn admits(&self, banned: &Symbol, candidate: Symbol) -> Result<bool> {
        stats::record_tests(1);
        Ok(candidate != *banned)
    }

    fn descend(&self, banned: &Symbol, _kept: Symbol) -> Symbol {
        *banned
    }
}

/// Depth-k paths are the k-permutations of 1..=n; depth-n paths are the
/// permutations.
pub fn perm_tree(n: Symbol) -> Result<SearchTree> {
    domain_positive(n, "perm_tree")?;
    shadow_tree(n, Rc::new(PermRule))
}

/// N-queens: successive path elements are queen rows in successive columns.
/// The first path element bans its row and both its diagonals, checked at
/// the candidate's column distance: three comparisons per candidate.
struct QueensRule;

impl Rule for QueensRule {
    // Banned row and the column distance at which candidates are examined.
    type State = (Symbol, u32);

    fn start(&self, m: Symbol) -> (Symbol, u32) {
        (m, 1)
    }

    fn admits(&self, &(banned, col): &(Symbol, u32), candidate: Symbol) -> Result<bool> {
        stats::record_tests(3);
        let b = i64::from(banned);
        let a = i64::from(candidate);
        let d = i64::from(col);
        Ok(b != a && b != a + d && b != a - d)
    }

    fn descend(&self, &(banned, col): &(Symbol, u32), _kept: Symbol) -> (Symbol, u32) {
        (banned, col + 1)
    }
}

/// Depth-k paths are placements of k mutually non-attacking queens in the
/// first k columns of an n-row board; depth-n paths are n-queens solutions.
pub fn queens_tree(n: Symbol) -> Result<SearchTree> {
    domain_positive(n, "queens_tree")?;
    shadow_tree(n, Rc::new(QueensRule))
}

/// The path being extended, most recent element first, with structural
/// sharing: extending is O(1) and all extensions share their history.
#[derive(Clone)]
pub struct ShadowSeq {
    head: Option<Rc<SeqNode>>,
    len: usize,
}

struct SeqNode {
    sym: Symbol,
    next: Option<Rc<SeqNode>>,
}

impl ShadowSeq {
    pub fn empty() -> ShadowSeq {
        ShadowSeq { head: None, len: 0 }
    }

    pub fn prepend(&self, sym: Symbol) -> ShadowSeq {
        ShadowSeq {
            head: Some(Rc::new(SeqNode { sym, next: self.head.clone() })),
            len: self.len + 1,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Elements, most recent first.
    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        std::iter::successors(self.head.as_deref(), |node| node.next.as_deref())
            .map(|node| node.sym)
    }
}

impl From<&[Symbol]> for ShadowSeq {
    /// Builds from a most-recent-first slice.
    fn from(symbols: &[Symbol]) -> ShadowSeq {
        let mut seq = ShadowSeq::empty();
        for &s in symbols.iter().rev() {
            seq = seq.prepend(s);
        }
        seq
    }
}

impl std::fmt::Debug for ShadowSeq {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(self.iter()).finish()
    }
}

/// Do the first `half` elements of `s` equal the next `half`? One counted
/// invocation plus up to `half` symbol comparisons (early exit on the first
/// mismatch).
pub fn repeated(half: usize, s: &ShadowSeq) -> Result<bool> {
    if half < 1 {
        return Err(Error::Domain(format!("repeat half-length {half} out of range; minimum is 1")));
    }
    if s.len() < 2 * half {
        return Err(Error::Domain(format!(
            "sequence of length {} too short for a repeat test of half-length {half}",
            s.len()
        )));
    }
    stats::record_tests(1);
    let firsts = s.iter().take(half);
    let seconds = s.iter().skip(half).take(half);
    for (a, b) in firsts.zip(seconds) {
        record_symbol_comparison();
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Square-free sequences: a new element can only close a repeat whose
/// second half ends at it and starts at the path's midpoint, so only paths
/// reaching an even length are tested, each with exactly one half-length
/// repeat check. Shorter repeats were excluded when shorter prefixes of the
/// shadow survived.
struct SquareFreeRule;

impl Rule for SquareFreeRule {
    // Path so far, most recent first; a candidate extends it by one.
    type State = ShadowSeq;

    fn start(&self, m: Symbol) -> ShadowSeq {
        ShadowSeq::empty().prepend(m)
    }

    fn admits(&self, seq: &ShadowSeq, candidate: Symbol) -> Result<bool> {
        let extended = seq.prepend(candidate);
        let len = extended.len();
        if len.is_multiple_of(2) {
            record_even_length_exam();
            Ok(!repeated(len / 2, &extended)?)
        } else {
            Ok(true)
        }
    }

    fn descend(&self, seq: &ShadowSeq, kept: Symbol) -> ShadowSeq {
        seq.prepend(kept)
    }
}

/// Depth-k paths are the square-free length-k sequences over 1..=n: no two
/// adjacent equal blocks at any even window ending anywhere in the path.
pub fn squarefree_tree(n: Symbol) -> Result<SearchTree> {
    domain_positive(n, "squarefree_tree")?;
    shadow_tree(n, Rc::new(SquareFreeRule))
}

/// All depth-`len` paths of `t` as a lazy stream, in left-to-right
/// (lexicographic) order. Demanding the first solution explores only the
/// leftmost viable spine; `len == 0` yields the single empty path.
pub fn solutions(t: &SearchTree, len: usize) -> Stream<Path> {
    paths_at(t.clone(), len, Vec::new())
}

fn paths_at(t: SearchTree, remaining: usize, prefix: Path) -> Stream<Path> {
    Stream::suspend(move || {
        if remaining == 0 {
            return Ok(Stream::cons(prefix, Stream::nil()));
        }
        match t {
            SearchTree::Empty => Ok(Stream::nil()),
            SearchTree::Node(nd) => {
                let mut extended = prefix.clone();
                extended.push(nd.value);
                let under = {
                    let nd = Rc::clone(&nd);
                    Stream::suspend(move || {
                        if remaining == 1 {
                            // The path is complete at this node; its subtree
                            // stays untouched.
                            Ok(Stream::cons(extended, Stream::nil()))
                        } else {
                            Ok(paths_at(nd.subtree.force()?, remaining - 1, extended))
                        }
                    })
                };
                Ok(append_lazy(under, move || {
                    Ok(paths_at(nd.siblings.force()?, remaining, prefix))
                }))
            }
        }
    })
}

/// The number of depth-`len` paths. Forces the same tree region the
/// solution stream would, but counts directly instead of materializing
/// paths, so it allocates nothing beyond the tree itself.
pub fn count_solutions(t: &SearchTree, len: usize) -> Result<u64> {
    if len == 0 {
        return Ok(1);
    }
    let mut total = 0u64;
    let mut cur = t.clone();
    while let SearchTree::Node(nd) = cur {
        if len == 1 {
            total += 1;
        } else {
            total += count_solutions(&nd.subtree.force()?, len - 1)?;
        }
        cur = nd.siblings.force()?;
    }
    Ok(total)
}

/// Does `t` contain this root-first path?
pub fn contains_path(t: &SearchTree, path: &[Symbol]) -> Result<bool> {
    let mut level = t.clone();
    'path: for &sym in path {
        let mut cur = level;
        while let SearchTree::Node(nd) = cur {
            if nd.value == sym {
                level = nd.subtree.force()?;
                continue 'path;
            }
            cur = nd.siblings.force()?;
        }
        return Ok(false);
    }
    Ok(true)
}
