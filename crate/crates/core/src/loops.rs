//! Shared loop skeletons the per-shape algorithms are assembled from.
//!
//! Every skeleton keeps the one-operation-per-tick discipline: advancing
//! an outer value pointer, building one child, probing one hash set and
//! emitting one tuple are all single operations. Building a child is
//! constant work (a bounded number of index probes), so charging it one
//! operation keeps tick counts proportional to the real operation count.

use alloc::borrow::Cow;
use alloc::vec::Vec;

use crate::enumerate::{Emit, Enumerator, NestedProduct};
use crate::hash::Set;
use crate::merge::SortedMerge;
use crate::relation::{IdTuple, Vid};

/// Supplies the children of one per-valuation merge.
pub trait ChildSource<'a> {
    type Child: Enumerator + 'a;

    /// Number of candidate children.
    fn total(&self) -> usize;

    /// Build candidate `j`; `None` skips a candidate that provably
    /// produces no output. Constant work per call.
    fn make(&mut self, j: usize) -> Option<Self::Child>;
}

enum BmState<C> {
    Building,
    Running(SortedMerge<C>),
    Finished,
}

/// Builds children one operation at a time, then runs their sorted merge.
pub struct BuildMerge<'a, S: ChildSource<'a>> {
    source: S,
    j: usize,
    staged: Vec<S::Child>,
    state: BmState<S::Child>,
}

impl<'a, S: ChildSource<'a>> BuildMerge<'a, S> {
    pub fn new(source: S) -> Self {
        BuildMerge {
            source,
            j: 0,
            staged: Vec::new(),
            state: BmState::Building,
        }
    }
}

impl<'a, S: ChildSource<'a>> Enumerator for BuildMerge<'a, S> {
    fn op(&mut self, out: &mut dyn Emit) {
        match &mut self.state {
            BmState::Building => {
                if self.j < self.source.total() {
                    if let Some(child) = self.source.make(self.j) {
                        self.staged.push(child);
                    }
                    self.j += 1;
                } else {
                    let children = core::mem::take(&mut self.staged);
                    self.state = BmState::Running(SortedMerge::new(children));
                }
            }
            BmState::Running(m) => {
                if m.done() {
                    self.state = BmState::Finished;
                } else {
                    m.op(out);
                }
            }
            BmState::Finished => {}
        }
    }

    fn done(&self) -> bool {
        matches!(self.state, BmState::Finished)
    }
}

/// Runs one enumerator per outer value, in order. The builder must be
/// shallow: real per-child work happens inside the child's own
/// operations.
pub struct ForEachValue<'a, E, F> {
    values: Cow<'a, [Vid]>,
    build: F,
    pos: usize,
    cur: Option<E>,
    finished: bool,
}

impl<'a, E: Enumerator, F: FnMut(Vid) -> E> ForEachValue<'a, E, F> {
    pub fn new(values: impl Into<Cow<'a, [Vid]>>, build: F) -> Self {
        let values = values.into();
        ForEachValue {
            finished: values.is_empty(),
            values,
            build,
            pos: 0,
            cur: None,
        }
    }
}

impl<'a, E: Enumerator, F: FnMut(Vid) -> E> Enumerator for ForEachValue<'a, E, F> {
    fn op(&mut self, out: &mut dyn Emit) {
        match &mut self.cur {
            None => {
                if self.pos >= self.values.len() {
                    self.finished = true;
                } else {
                    let v = self.values[self.pos];
                    self.pos += 1;
                    self.cur = Some((self.build)(v));
                }
            }
            Some(e) => {
                if e.done() {
                    self.cur = None;
                    if self.pos >= self.values.len() {
                        self.finished = true;
                    }
                } else {
                    e.op(out);
                }
            }
        }
    }

    fn done(&self) -> bool {
        self.finished
    }
}

/// A lazily advanced stream of cartesian products (one per join key).
pub trait ProductStream<'a> {
    /// Outer `None`: exhausted. Inner `None`: candidate skipped.
    /// Constant work per call.
    fn next(&mut self) -> Option<Option<NestedProduct<'a>>>;
}

enum DplPhase {
    Next,
    Step,
    Probe,
    Emit,
    Insert,
    Finished,
}

/// Capture slot for a product's single emission per operation.
struct Slot(Option<IdTuple>);

impl Emit for Slot {
    fn emit(&mut self, t: IdTuple) {
        debug_assert!(self.0.is_none());
        self.0 = Some(t);
    }
}

/// Streams full-join tuples from a product stream and emits each distinct
/// projection once, suppressing repeats with a hash set.
pub struct DedupProductLoop<'a, S> {
    stream: S,
    cur: Option<NestedProduct<'a>>,
    pending: Option<IdTuple>,
    seen: Set<IdTuple>,
    phase: DplPhase,
}

impl<'a, S: ProductStream<'a>> DedupProductLoop<'a, S> {
    pub fn new(stream: S) -> Self {
        DedupProductLoop {
            stream,
            cur: None,
            pending: None,
            seen: Set::default(),
            phase: DplPhase::Next,
        }
    }
}

impl<'a, S: ProductStream<'a>> Enumerator for DedupProductLoop<'a, S> {
    fn op(&mut self, out: &mut dyn Emit) {
        match self.phase {
            DplPhase::Next => match self.stream.next() {
                None => self.phase = DplPhase::Finished,
                Some(None) => {}
                Some(Some(p)) => {
                    self.cur = Some(p);
                    self.phase = DplPhase::Step;
                }
            },
            DplPhase::Step => {
                let p = self.cur.as_mut().expect("product present while stepping");
                if p.done() {
                    self.cur = None;
                    self.phase = DplPhase::Next;
                } else {
                    let mut slot = Slot(None);
                    p.op(&mut slot);
                    if let Some(t) = slot.0 {
                        self.pending = Some(t);
                        self.phase = DplPhase::Probe;
                    }
                }
            }
            DplPhase::Probe => {
                let t = self.pending.as_ref().expect("pending tuple");
                self.phase = if self.seen.contains(t) {
                    self.pending = None;
                    DplPhase::Step
                } else {
                    DplPhase::Emit
                };
            }
            DplPhase::Emit => {
                out.emit(self.pending.clone().expect("pending tuple"));
                self.phase = DplPhase::Insert;
            }
            DplPhase::Insert => {
                self.seen.insert(self.pending.take().expect("pending tuple"));
                self.phase = DplPhase::Step;
            }
            DplPhase::Finished => {}
        }
    }

    fn done(&self) -> bool {
        matches!(self.phase, DplPhase::Finished)
    }
}
