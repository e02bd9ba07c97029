//! Evaluate-at-most-once suspensions.
//!
//! A [`LazyCell`] starts out holding a deferred computation. The first
//! `force` runs it and caches the result; every later `force` returns the
//! cached value without re-running anything. While the computation runs the
//! cell is marked `Evaluating`, so a computation that (transitively) demands
//! its own cell is answered with [`Error::BlackHole`] instead of looping.
//! A computation that fails poisons the cell: the same error is replayed on
//! every subsequent force.
//!
//! Cells are single-threaded. Share them with `Rc`; the self-referential
//! structures built on top of them tie knots with [`LazyCell::cyclic`].

use std::cell::RefCell;
use std::rc::{Rc, Weak};

use crate::error::{Error, Result};
use crate::stats;

type Thunk<T> = Box<dyn FnOnce() -> Result<T>>;

enum State<T> {
    Deferred(Thunk<T>),
    Evaluating,
    Value(T),
    Poisoned(Error),
}

pub struct LazyCell<T> {
    id: u64,
    state: RefCell<State<T>>,
}

impl<T> LazyCell<T> {
    /// Diagnostic identity; unique per cell within a thread.
    pub fn id(&self) -> u64 {
        self.id
    }

    /// True once the cell holds a value (not a pending or failed state).
    pub fn is_evaluated(&self) -> bool {
        matches!(&*self.state.borrow(), State::Value(_))
    }
}

impl<T: 'static> LazyCell<T> {
    /// Defer a computation. Nothing runs until the first `force`.
    pub fn new(f: impl FnOnce() -> Result<T> + 'static) -> Rc<Self> {
        stats::record_allocation();
        Rc::new(LazyCell {
            id: stats::fresh_cell_id(),
            state: RefCell::new(State::Deferred(Box::new(f))),
        })
    }

    /// A cell that already holds its value. Forcing it never runs a
    /// computation, so it never contributes to the force counter.
    pub fn ready(value: T) -> Rc<Self> {
        stats::record_allocation();
        Rc::new(LazyCell {
            id: stats::fresh_cell_id(),
            state: RefCell::new(State::Value(value)),
        })
    }

    /// Defer a computation that may refer back to its own cell.
    ///
    /// The closure receives a weak handle to the cell being created and runs
    /// at first force, by which time upgrading is guaranteed to succeed
    /// (whoever forces holds a strong reference). This is how every cyclic
    /// structure in the crate is tied.
    pub fn cyclic(f: impl FnOnce(Weak<LazyCell<T>>) -> Result<T> + 'static) -> Rc<Self> {
        stats::record_allocation();
        Rc::new_cyclic(|weak| {
            let weak = weak.clone();
            LazyCell {
                id: stats::fresh_cell_id(),
                state: RefCell::new(State::Deferred(Box::new(move || f(weak)))),
            }
        })
    }
}

impl<T: Clone> LazyCell<T> {
    /// Demand the value, running the deferred computation if it has not run
    /// yet. Errors (including black holes) are cached and replayed.
    pub fn force(&self) -> Result<T> {
        {
            let state = self.state.borrow();
            match &*state {
                State::Value(v) => return Ok(v.clone()),
                State::Poisoned(e) => return Err(e.clone()),
                State::Evaluating => return Err(Error::BlackHole { cell: self.id }),
                State::Deferred(_) => {}
            }
        }
        let thunk = {
            let mut state = self.state.borrow_mut();
            match std::mem::replace(&mut *state, State::Evaluating) {
                State::Deferred(thunk) => thunk,
                // Single-threaded and we just saw Deferred; nothing can have
                // intervened between the two borrows.
                _ => unreachable!("lazy cell state changed between borrows"),
            }
        };
        stats::record_force();
        let outcome = thunk();
        let mut state = self.state.borrow_mut();
        match outcome {
            Ok(v) => {
                *state = State::Value(v.clone());
                Ok(v)
            }
            Err(e) => {
                *state = State::Poisoned(e.clone());
                Err(e)
            }
        }
    }
}
