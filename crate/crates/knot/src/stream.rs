//! Memoized lazy streams.
//!
//! A [`Stream`] is a lazy cell whose value is either `Nil` or a cons of a
//! head and another stream. Shared suffixes are forced once; walking a
//! stream twice costs one set of computations.
//!
//! The generators at the bottom of the module are definitions of the form
//! `xs = cons(seed, f(xs))`: the stream is an argument to its own producer.
//! [`Stream::cyclic`] ties that knot. Two flavors exist and the counters
//! tell them apart: `ones` is one physically cyclic cell no matter how far
//! it is walked, while `posints` allocates a cell per element because each
//! element is genuinely computed from the previous one.

use std::rc::Rc;

use num_traits::One;

use crate::cell::LazyCell;
use crate::error::{Error, Result};
use crate::stats;
use crate::Nat;

pub(crate) enum Step<T> {
    Nil,
    Cons(T, Stream<T>),
}

impl<T: Clone> Clone for Step<T> {
    fn clone(&self) -> Self {
        match self {
            Step::Nil => Step::Nil,
            Step::Cons(h, t) => Step::Cons(h.clone(), t.clone()),
        }
    }
}

/// Construct a cons step, counting the new stream node.
pub(crate) fn cons_step<T>(head: T, tail: Stream<T>) -> Step<T> {
    stats::record_node();
    Step::Cons(head, tail)
}

pub struct Stream<T> {
    cell: Rc<LazyCell<Step<T>>>,
}

impl<T> Clone for Stream<T> {
    fn clone(&self) -> Self {
        Stream { cell: Rc::clone(&self.cell) }
    }
}

impl<T> std::fmt::Debug for Stream<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Stream(cell {})", self.cell.id())
    }
}

impl<T: Clone + 'static> Stream<T> {
    /// The empty stream.
    pub fn nil() -> Stream<T> {
        Stream { cell: LazyCell::ready(Step::Nil) }
    }

    /// Prepend `head` to an existing stream. The tail is held, not forced.
    pub fn cons(head: T, tail: Stream<T>) -> Stream<T> {
        Stream { cell: LazyCell::ready(cons_step(head, tail)) }
    }

    /// Prepend `head` to a tail whose construction is itself deferred.
    pub fn cons_lazy(
        head: T,
        tail: impl FnOnce() -> Result<Stream<T>> + 'static,
    ) -> Stream<T> {
        Stream::defer_step(move || Ok(cons_step(head, tail()?)))
    }

    /// A stream whose first step is computed on demand.
    pub(crate) fn defer_step(
        f: impl FnOnce() -> Result<Step<T>> + 'static,
    ) -> Stream<T> {
        Stream { cell: LazyCell::new(f) }
    }

    /// Defer the construction of a whole stream. Forcing the result forces
    /// the first step of the inner stream.
    pub(crate) fn suspend(
        f: impl FnOnce() -> Result<Stream<T>> + 'static,
    ) -> Stream<T> {
        Stream::defer_step(move || f()?.step())
    }

    /// A stream that may refer to itself. The closure receives the stream
    /// being defined and runs at first force, when the handle it gets is
    /// already backed by a live cell.
    pub(crate) fn cyclic(
        f: impl FnOnce(Stream<T>) -> Result<Step<T>> + 'static,
    ) -> Stream<T> {
        Stream {
            cell: LazyCell::cyclic(move |weak| {
                let me = Stream { cell: weak.upgrade().expect("stream forced while alive") };
                f(me)
            }),
        }
    }

    pub(crate) fn step(&self) -> Result<Step<T>> {
        self.cell.force()
    }

    /// Force the first step: `None` for the end of the stream, otherwise the
    /// head and the (unforced) tail.
    pub fn uncons(&self) -> Result<Option<(T, Stream<T>)>> {
        match self.step()? {
            Step::Nil => Ok(None),
            Step::Cons(h, t) => Ok(Some((h, t))),
        }
    }

    pub fn head(&self) -> Result<T> {
        self.uncons()?.map(|(h, _)| h).ok_or(Error::EmptyStream)
    }

    pub fn tail(&self) -> Result<Stream<T>> {
        self.uncons()?.map(|(_, t)| t).ok_or(Error::EmptyStream)
    }

    /// Whether the stream is Nil. This must force the first step.
    pub fn is_empty(&self) -> Result<bool> {
        Ok(self.uncons()?.is_none())
    }

    /// The first `n` elements. Fails with [`Error::EmptyStream`] if the
    /// stream ends early; forces exactly the demanded prefix.
    pub fn take(&self, n: usize) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(n);
        let mut cur = self.clone();
        while out.len() < n {
            let (h, t) = cur.uncons()?.ok_or(Error::EmptyStream)?;
            out.push(h);
            cur = t;
        }
        Ok(out)
    }

    /// The `n`th element, 1-based.
    pub fn index(&self, n: u64) -> Result<T> {
        if n < 1 {
            return Err(Error::Domain(format!("index {n} out of range; indices start at 1")));
        }
        let mut cur = self.clone();
        for _ in 1..n {
            cur = cur.tail()?;
        }
        cur.head()
    }

    /// Element-wise transformation. Lazy: element `k` of the result forces
    /// only the first `k` source elements; errors from `f` surface at the
    /// position where they are forced.
    pub fn map<U: Clone + 'static>(
        &self,
        f: impl Fn(T) -> Result<U> + 'static,
    ) -> Stream<U> {
        map_shared(self.clone(), Rc::new(f))
    }
}

fn map_shared<T, U>(s: Stream<T>, f: Rc<dyn Fn(T) -> Result<U>>) -> Stream<U>
where
    T: Clone + 'static,
    U: Clone + 'static,
{
    Stream::defer_step(move || match s.step()? {
        Step::Nil => Ok(Step::Nil),
        Step::Cons(h, t) => Ok(cons_step(f(h)?, map_shared(t, Rc::clone(&f)))),
    })
}

/// `a` followed by the stream `rest` produces, which is not even built
/// until `a` runs out.
pub(crate) fn append_lazy<T: Clone + 'static>(
    a: Stream<T>,
    rest: impl FnOnce() -> Result<Stream<T>> + 'static,
) -> Stream<T> {
    Stream::defer_step(move || match a.step()? {
        Step::Nil => rest()?.step(),
        Step::Cons(h, t) => Ok(cons_step(h, append_lazy(t, rest))),
    })
}

/// Merge two strictly increasing streams into one, collapsing values that
/// appear on both sides into a single occurrence.
pub fn merge_dedup(a: Stream<Nat>, b: Stream<Nat>) -> Stream<Nat> {
    Stream::defer_step(move || {
        match (a.step()?, b.step()?) {
            // One side exhausted: share the other side's step as-is.
            (Step::Nil, sb) => Ok(sb),
            (sa, Step::Nil) => Ok(sa),
            (Step::Cons(x, ta), Step::Cons(y, tb)) => {
                use std::cmp::Ordering::*;
                match x.cmp(&y) {
                    Less => Ok(cons_step(x, merge_dedup(ta, b.clone()))),
                    Greater => Ok(cons_step(y, merge_dedup(a.clone(), tb))),
                    Equal => Ok(cons_step(x, merge_dedup(ta, tb))),
                }
            }
        }
    })
}

/// Merge two strictly increasing streams known to be disjoint. Seeing the
/// same value on both heads means a supposedly impossible duplicate slipped
/// in, and forcing that position reports it as an error.
pub fn merge_nodup(a: Stream<Nat>, b: Stream<Nat>) -> Stream<Nat> {
    Stream::defer_step(move || {
        match (a.step()?, b.step()?) {
            (Step::Nil, sb) => Ok(sb),
            (sa, Step::Nil) => Ok(sa),
            (Step::Cons(x, ta), Step::Cons(y, tb)) => {
                use std::cmp::Ordering::*;
                match x.cmp(&y) {
                    Less => Ok(cons_step(x, merge_nodup(ta, b.clone()))),
                    Greater => Ok(cons_step(y, merge_nodup(a.clone(), tb))),
                    Equal => Err(Error::DuplicateDetected { value: x.to_string() }),
                }
            }
        }
    })
}

/// Three-way deduplicating merge, as two nested two-way merges.
pub fn merge3(a: Stream<Nat>, b: Stream<Nat>, c: Stream<Nat>) -> Stream<Nat> {
    merge_dedup(a, merge_dedup(b, c))
}

fn nat(n: u64) -> Nat {
    Nat::from(n)
}

fn scale(s: &Stream<Nat>, factor: Nat) -> Stream<Nat> {
    s.map(move |x: Nat| Ok(x * &factor))
}

/// `ones = cons(1, ones)`: a single self-referencing cell. Walking it any
/// distance allocates nothing new.
pub fn ones() -> Stream<Nat> {
    Stream::cyclic(|me| Ok(cons_step(Nat::one(), me)))
}

/// `posints = cons(1, map(+1, posints))`: same shape as `ones`, but each
/// element is computed, so walking n elements allocates n cells.
pub fn posints() -> Stream<Nat> {
    Stream::cyclic(|me| Ok(cons_step(Nat::one(), me.map(|n: Nat| Ok(n + 1u32)))))
}

/// The Hamming numbers `2^i * 3^j * 5^k` in increasing order, defined as
/// one stream merged with three scaled copies of itself.
pub fn hamming() -> Stream<Nat> {
    Stream::cyclic(|me| {
        let doubled = scale(&me, nat(2));
        let tripled = scale(&me, nat(3));
        let fived = scale(&me, nat(5));
        Ok(cons_step(Nat::one(), merge3(doubled, tripled, fived)))
    })
}

/// The three stages of the staged Hamming program:
/// powers of two, then multiples of three folded in, then fives.
/// Stages feed forward only, and the merges assert disjointness.
pub fn hamming_stages() -> (Stream<Nat>, Stream<Nat>, Stream<Nat>) {
    let a = Stream::cyclic(|a| Ok(cons_step(Nat::one(), scale(&a, nat(2)))));
    let b = {
        let a = a.clone();
        Stream::cyclic(move |b| {
            Ok(cons_step(Nat::one(), merge_nodup(a.tail()?, scale(&b, nat(3)))))
        })
    };
    let h = {
        let b = b.clone();
        Stream::cyclic(move |h| {
            Ok(cons_step(Nat::one(), merge_nodup(b.tail()?, scale(&h, nat(5)))))
        })
    };
    (a, b, h)
}

/// The staged Hamming stream (final stage of [`hamming_stages`]).
pub fn hamming_staged() -> Stream<Nat> {
    hamming_stages().2
}

/// All products of powers of the given factors, in increasing order,
/// starting with the empty product 1. An empty factor list yields the
/// finite stream `[1]`. Factors must be coprime and ascending for the
/// order (and the duplicate check inside) to be meaningful.
pub fn products(factors: &[Nat]) -> Stream<Nat> {
    match factors.split_first() {
        None => Stream::cons(Nat::one(), Stream::nil()),
        Some((f, rest)) => {
            let f = f.clone();
            let rest = rest.to_vec();
            Stream::cyclic(move |m| {
                let scaled = scale(&m, f);
                let deeper = Stream::suspend(move || products(&rest).tail());
                Ok(cons_step(Nat::one(), merge_nodup(scaled, deeper)))
            })
        }
    }
}

/// [`products`] over an infinite, increasing stream of factors. The
/// recursion into the remaining factors is deferred past each factor's own
/// first two elements, so only as many factor stages exist as the demanded
/// prefix needs: element 1 is always 1 and element 2 is the least factor.
pub fn products_inf(factors: Stream<Nat>) -> Stream<Nat> {
    Stream::cyclic(move |m| {
        Ok(cons_step(
            Nat::one(),
            Stream::defer_step(move || {
                let f = factors.head()?;
                let rest = factors.tail()?;
                let scaled = scale(&m.tail()?, f.clone());
                let deeper = Stream::suspend(move || products_inf(rest).tail());
                Ok(cons_step(f, merge_nodup(scaled, deeper)))
            }),
        ))
    })
}

/// The Fibonacci numbers as a list that reads itself with a lag of two:
/// `fibs = 1 . 1 . zip_sum(fibs)`. Forcing the first n elements runs O(n)
/// computations because every lagged read hits an already-forced cell.
pub fn fib_list() -> Stream<Nat> {
    Stream::cyclic(|me| {
        Ok(cons_step(
            Nat::one(),
            Stream::cons_lazy(Nat::one(), move || Ok(lagged_sums(me))),
        ))
    })
}

/// For source `a . t`, yields `(a + head t) . lagged_sums(t)`.
fn lagged_sums(s: Stream<Nat>) -> Stream<Nat> {
    Stream::defer_step(move || {
        let a = s.head()?;
        let t = s.tail()?;
        let b = t.head()?;
        Ok(cons_step(a + b, lagged_sums(t)))
    })
}

/// The primes in increasing order, by trial division. Plumbing for the
/// factor-stream consumers, not a clever sieve.
pub fn primes() -> Stream<Nat> {
    primes_from(2)
}

fn primes_from(lo: u64) -> Stream<Nat> {
    Stream::defer_step(move || {
        let p = (lo..).find(|&k| is_prime(k)).expect("primes are unbounded");
        Ok(cons_step(nat(p), primes_from(p + 1)))
    })
}

fn is_prime(k: u64) -> bool {
    if k < 2 {
        return false;
    }
    if k.is_multiple_of(2) {
        return k == 2;
    }
    let mut d = 3;
    while d * d <= k {
        if k.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::{reset, snapshot};

    fn nats(xs: &[u64]) -> Vec<Nat> {
        xs.iter().map(|&x| nat(x)).collect()
    }

    fn finite(xs: &[u64]) -> Stream<Nat> {
        let mut s = Stream::nil();
        for &x in xs.iter().rev() {
            s = Stream::cons(nat(x), s);
        }
        s
    }

    #[test]
    fn cons_head_tail_roundtrip() {
        let s = Stream::cons(nat(1), Stream::cons(nat(2), Stream::nil()));
        assert_eq!(s.head().unwrap(), nat(1));
        assert_eq!(s.tail().unwrap().head().unwrap(), nat(2));
        assert!(s.tail().unwrap().tail().unwrap().is_empty().unwrap());
    }

    #[test]
    fn head_of_empty_is_an_error() {
        let s: Stream<Nat> = Stream::nil();
        assert_eq!(s.head().unwrap_err(), Error::EmptyStream);
        assert_eq!(s.tail().unwrap_err(), Error::EmptyStream);
        assert_eq!(s.take(1).unwrap_err(), Error::EmptyStream);
    }

    #[test]
    fn cons_never_forces_its_tail() {
        let poison: Stream<Nat> =
            Stream::defer_step(|| Err(Error::Computation("tail forced".into())));
        let s = Stream::cons(nat(1), poison);
        assert_eq!(s.head().unwrap(), nat(1));
    }

    #[test]
    fn take_and_index_agree() {
        let s = posints();
        let prefix = s.take(10).unwrap();
        assert_eq!(prefix, nats(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]));
        assert_eq!(s.index(7).unwrap(), nat(7));
        assert!(matches!(s.index(0), Err(Error::Domain(_))));
    }

    #[test]
    fn take_past_the_end_fails() {
        assert_eq!(finite(&[1, 2]).take(3).unwrap_err(), Error::EmptyStream);
        assert_eq!(finite(&[1, 2]).index(3).unwrap_err(), Error::EmptyStream);
    }

    #[test]
    fn map_is_lazy_and_positions_errors() {
        let s = finite(&[1, 2, 3]).map(|x: Nat| {
            if x == nat(2) {
                Err(Error::Computation("bad element".into()))
            } else {
                Ok(x * 10u32)
            }
        });
        assert_eq!(s.head().unwrap(), nat(10));
        assert!(matches!(
            s.tail().unwrap().head().unwrap_err(),
            Error::Computation(_)
        ));
    }

    #[test]
    fn merge_dedup_collapses_shared_values() {
        let merged = merge_dedup(finite(&[2, 4, 6]), finite(&[3, 6, 9]));
        assert_eq!(merged.take(5).unwrap(), nats(&[2, 3, 4, 6, 9]));
        assert!(merged.tail().unwrap().take(4).unwrap().len() == 4);
    }

    #[test]
    fn merge3_interleaves_three_scaled_streams() {
        let twos = posints().map(|n: Nat| Ok(n * 2u32));
        let threes = posints().map(|n: Nat| Ok(n * 3u32));
        let fives = posints().map(|n: Nat| Ok(n * 5u32));
        assert_eq!(merge3(twos, threes, fives).take(4).unwrap(), nats(&[2, 3, 4, 5]));
    }

    #[test]
    fn merge_nodup_reports_the_duplicate_position() {
        let merged = merge_nodup(finite(&[1, 5]), finite(&[2, 5]));
        assert_eq!(merged.take(2).unwrap(), nats(&[1, 2]));
        assert_eq!(
            merged.take(3).unwrap_err(),
            Error::DuplicateDetected { value: "5".into() }
        );
        // Poisoning: the duplicate replays rather than re-running the merge.
        assert_eq!(
            merged.take(3).unwrap_err(),
            Error::DuplicateDetected { value: "5".into() }
        );
    }

    #[test]
    fn ones_is_one_cell_forever() {
        reset();
        let s = ones();
        let prefix = s.take(1000).unwrap();
        assert!(prefix.iter().all(|x| *x == nat(1)));
        let st = snapshot();
        assert!(st.allocations <= 2, "ones: {} cells", st.allocations);
        assert_eq!(st.forces, 1);
        assert_eq!(st.nodes, 1);
    }

    #[test]
    fn posints_allocates_per_element() {
        reset();
        let s = posints();
        assert_eq!(s.index(1000).unwrap(), nat(1000));
        assert!(snapshot().allocations >= 1000);
    }

    #[test]
    fn generators_construct_without_forcing() {
        reset();
        let _keep: Vec<Stream<Nat>> = vec![
            ones(),
            posints(),
            hamming(),
            hamming_staged(),
            products(&nats(&[2, 3, 5])),
            products_inf(primes()),
            fib_list(),
            primes(),
        ];
        assert_eq!(snapshot().forces, 0);
    }

    #[test]
    fn hamming_prefix_is_the_classic_eleven() {
        let expected = nats(&[1, 2, 3, 4, 5, 6, 8, 9, 10, 12, 15]);
        assert_eq!(hamming().take(11).unwrap(), expected);
        assert_eq!(hamming_staged().take(11).unwrap(), expected);
        assert_eq!(products(&nats(&[2, 3, 5])).take(11).unwrap(), expected);
    }

    #[test]
    fn staged_first_stage_is_powers_of_two() {
        let (a, b, _) = hamming_stages();
        assert_eq!(a.take(4).unwrap(), nats(&[1, 2, 4, 8]));
        assert_eq!(b.take(6).unwrap(), nats(&[1, 2, 3, 4, 6, 8]));
    }

    #[test]
    fn products_of_nothing_is_the_lone_empty_product() {
        let s = products(&[]);
        assert_eq!(s.take(1).unwrap(), nats(&[1]));
        assert!(s.tail().unwrap().is_empty().unwrap());
    }

    #[test]
    fn products_of_one_factor_is_its_powers() {
        let s = products(&nats(&[3]));
        assert_eq!(s.take(5).unwrap(), nats(&[1, 3, 9, 27, 81]));
    }

    #[test]
    fn products_inf_starts_with_one_then_least_factor() {
        let s = products_inf(primes());
        assert_eq!(s.take(10).unwrap(), nats(&[1, 2, 3, 4, 5, 6, 7, 8, 9, 10]));
    }

    #[test]
    fn fib_list_knows_its_own_history() {
        let s = fib_list();
        assert_eq!(s.take(5).unwrap(), nats(&[1, 1, 2, 3, 5]));
        assert_eq!(s.index(7).unwrap(), nat(13));
        assert_eq!(s.index(30).unwrap(), nat(832040));
    }

    #[test]
    fn fib_list_forcing_is_linear() {
        reset();
        let s = fib_list();
        s.take(400).unwrap();
        let st = snapshot();
        assert!(
            st.forces <= 3 * 400,
            "forcing 400 elements ran {} computations",
            st.forces
        );
    }

    #[test]
    fn primes_start_correctly() {
        assert_eq!(primes().take(6).unwrap(), nats(&[2, 3, 5, 7, 11, 13]));
    }
}
