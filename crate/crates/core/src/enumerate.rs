//! The pausable enumerator contract and its driver.
//!
//! An [`Enumerator`] is a resumable state machine. Each call to
//! [`Enumerator::op`] performs exactly one unit-cost operation (a probe,
//! a pointer advance, a comparison, or an emission) and may emit at most
//! one tuple. The driver [`step`] charges the clock one tick per
//! operation, so advancing by a budget of `b` consumes at most `b` ticks
//! and the machine can be suspended and resumed between any two
//! operations.
//!
//! Combinators drive their children by delegating single operations and
//! intercepting emissions with their own [`Emit`] sinks, so tick
//! accounting stays global while only tuples that reach the top-level
//! sink count as output.

use alloc::borrow::Cow;
use alloc::vec::Vec;

use crate::clock::{DelayReport, OpClock};
use crate::relation::IdTuple;

/// Receives emitted tuples.
pub trait Emit {
    fn emit(&mut self, t: IdTuple);
}

/// Plain buffering sink; the top-level driver counts its growth to log
/// emission ticks.
#[derive(Debug, Default)]
pub struct OutVec {
    pub tuples: Vec<IdTuple>,
}

impl OutVec {
    pub fn new() -> Self {
        OutVec::default()
    }
}

impl Emit for OutVec {
    fn emit(&mut self, t: IdTuple) {
        self.tuples.push(t);
    }
}

/// Sink that rewrites each tuple by prepending a fixed prefix before
/// forwarding. Lets per-value loops reuse inner enumerators that emit
/// only the varying suffix.
pub struct PrefixEmit<'a> {
    pub prefix: &'a [u32],
    pub inner: &'a mut dyn Emit,
}

impl Emit for PrefixEmit<'_> {
    fn emit(&mut self, t: IdTuple) {
        let mut full = IdTuple::from_slice(self.prefix);
        full.extend_from_slice(&t);
        self.inner.emit(full);
    }
}

/// A pausable computation advanced one unit-cost operation at a time.
pub trait Enumerator {
    /// Perform one operation; may emit at most one tuple into `out`.
    /// Must not be called once [`done`](Self::done) returns true.
    fn op(&mut self, out: &mut dyn Emit);

    /// True when no further operations or emissions will occur.
    fn done(&self) -> bool;
}

impl<E: Enumerator + ?Sized> Enumerator for alloc::boxed::Box<E> {
    fn op(&mut self, out: &mut dyn Emit) {
        (**self).op(out)
    }

    fn done(&self) -> bool {
        (**self).done()
    }
}

/// Advance `e` by at most `budget` ticks. Consumes one tick per
/// operation; stops early when the enumerator finishes. Emissions are
/// logged on the clock at the tick of the operation that produced them.
pub fn step<E: Enumerator + ?Sized>(
    e: &mut E,
    clock: &mut OpClock,
    budget: u64,
    out: &mut OutVec,
) -> u64 {
    let mut used = 0;
    while used < budget && !e.done() {
        clock.charge(1);
        used += 1;
        let before = out.tuples.len();
        e.op(out);
        for _ in before..out.tuples.len() {
            clock.log_emission();
        }
    }
    used
}

/// Drive `e` to completion.
pub fn run_to_completion<E: Enumerator + ?Sized>(e: &mut E, clock: &mut OpClock, out: &mut OutVec) {
    while !e.done() {
        step(e, clock, 1 << 16, out);
    }
}

/// Drive `e` to completion and measure its delay profile. Tuples are
/// appended to `out`.
pub fn measure_delay<E: Enumerator + ?Sized>(
    e: &mut E,
    clock: &mut OpClock,
    out: &mut OutVec,
) -> DelayReport {
    let start = clock.now();
    let log_start = clock.emission_log().len();
    run_to_completion(e, clock, out);
    let end = clock.now();
    DelayReport::from_emissions(start, end, &clock.emission_log()[log_start..])
}

/// Constant-delay scan of a materialized tuple list: one emission per tick.
pub struct Scan<'a> {
    items: Cow<'a, [IdTuple]>,
    pos: usize,
}

impl<'a> Scan<'a> {
    pub fn from_vec(items: Vec<IdTuple>) -> Scan<'static> {
        Scan {
            items: Cow::Owned(items),
            pos: 0,
        }
    }

    pub fn from_slice(items: &'a [IdTuple]) -> Scan<'a> {
        Scan {
            items: Cow::Borrowed(items),
            pos: 0,
        }
    }
}

impl Enumerator for Scan<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        if self.pos < self.items.len() {
            out.emit(self.items[self.pos].clone());
            self.pos += 1;
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.items.len()
    }
}

/// Cursor over a sorted id list, emitting each element substituted into a
/// fixed tuple template. One emission per operation.
pub struct TemplateCursor<'a> {
    list: &'a [u32],
    template: IdTuple,
    hole: usize,
    pos: usize,
}

impl<'a> TemplateCursor<'a> {
    pub fn new(list: &'a [u32], template: IdTuple, hole: usize) -> Self {
        TemplateCursor {
            list,
            template,
            hole,
            pos: 0,
        }
    }

    /// Cursor emitting bare singleton tuples.
    pub fn singleton(list: &'a [u32]) -> Self {
        TemplateCursor::new(list, IdTuple::from_slice(&[0]), 0)
    }
}

impl Enumerator for TemplateCursor<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        if self.pos < self.list.len() {
            let mut t = self.template.clone();
            t[self.hole] = self.list[self.pos];
            out.emit(t);
            self.pos += 1;
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.list.len()
    }
}

/// Cartesian product of sorted, nonempty factor lists, emitted in
/// lexicographic order of the hole positions (odometer with the last
/// factor advancing fastest). Emission costs one operation; advancing the
/// odometer costs one operation per carried digit.
pub struct NestedProduct<'a> {
    lists: Vec<&'a [u32]>,
    holes: Vec<usize>,
    template: IdTuple,
    idx: Vec<usize>,
    state: ProductState,
}

enum ProductState {
    Emit,
    Carry(usize),
    Done,
}

impl<'a> NestedProduct<'a> {
    /// `holes[j]` is the output position filled from `lists[j]`; holes
    /// must be ascending for the lexicographic-order guarantee. Empty
    /// factor lists yield an immediately finished enumerator.
    pub fn new(lists: Vec<&'a [u32]>, holes: Vec<usize>, template: IdTuple) -> Self {
        debug_assert_eq!(lists.len(), holes.len());
        debug_assert!(holes.windows(2).all(|w| w[0] < w[1]));
        let empty = lists.iter().any(|l| l.is_empty());
        let idx = alloc::vec![0; lists.len()];
        NestedProduct {
            lists,
            holes,
            template,
            idx,
            state: if empty {
                ProductState::Done
            } else {
                ProductState::Emit
            },
        }
    }
}

impl Enumerator for NestedProduct<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        match self.state {
            ProductState::Emit => {
                let mut t = self.template.clone();
                for (j, &h) in self.holes.iter().enumerate() {
                    t[h] = self.lists[j][self.idx[j]];
                }
                out.emit(t);
                self.state = if self.lists.is_empty() {
                    ProductState::Done
                } else {
                    ProductState::Carry(self.lists.len() - 1)
                };
            }
            ProductState::Carry(j) => {
                self.idx[j] += 1;
                if self.idx[j] < self.lists[j].len() {
                    self.state = ProductState::Emit;
                } else if j == 0 {
                    self.state = ProductState::Done;
                } else {
                    self.idx[j] = 0;
                    self.state = ProductState::Carry(j - 1);
                }
            }
            ProductState::Done => {}
        }
    }

    fn done(&self) -> bool {
        matches!(self.state, ProductState::Done)
    }
}

/// Run a list of enumerators back to back.
pub struct Chain<'a> {
    items: Vec<alloc::boxed::Box<dyn Enumerator + 'a>>,
    pos: usize,
}

impl<'a> Chain<'a> {
    pub fn new(items: Vec<alloc::boxed::Box<dyn Enumerator + 'a>>) -> Self {
        let mut c = Chain { items, pos: 0 };
        c.skip_done();
        c
    }

    fn skip_done(&mut self) {
        while self.pos < self.items.len() && self.items[self.pos].done() {
            self.pos += 1;
        }
    }
}

impl Enumerator for Chain<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        if self.pos < self.items.len() {
            self.items[self.pos].op(out);
            self.skip_done();
        }
    }

    fn done(&self) -> bool {
        self.pos >= self.items.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_emits_every_tick() {
        let items: Vec<IdTuple> = (1..=5u32).map(|i| IdTuple::from_slice(&[i])).collect();
        let mut e = Scan::<'static>::from_vec(items);
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        let report = measure_delay(&mut e, &mut clock, &mut out);
        assert_eq!(report.max_gap, 1);
        assert_eq!(report.emissions, 5);
        assert_eq!(report.total_ticks, 5);
    }

    #[test]
    fn budget_is_respected() {
        let items: Vec<IdTuple> = (1..=100u32).map(|i| IdTuple::from_slice(&[i])).collect();
        let mut e = Scan::<'static>::from_vec(items);
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        for budget in [1u64, 3, 7, 200] {
            let before = clock.now();
            let used = step(&mut e, &mut clock, budget, &mut out);
            assert!(used <= budget);
            assert_eq!(clock.now() - before, used);
        }
        assert!(e.done());
        assert_eq!(out.tuples.len(), 100);
    }

    #[test]
    fn product_is_lexicographic() {
        let a = [1u32, 2];
        let b = [3u32];
        let mut e = NestedProduct::new(
            alloc::vec![&a[..], &b[..]],
            alloc::vec![0, 1],
            IdTuple::from_slice(&[0, 0]),
        );
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        run_to_completion(&mut e, &mut clock, &mut out);
        let got: Vec<_> = out.tuples.iter().map(|t| (t[0], t[1])).collect();
        assert_eq!(got, alloc::vec![(1, 3), (2, 3)]);
    }
}
