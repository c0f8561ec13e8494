//! Duplicate-eliminating multi-way merge of sorted enumerators.
//!
//! Each child emits tuples in strictly increasing lexicographic order;
//! the merge emits their union, deduplicated, in that same order. Per
//! output tuple it scans the child heads for the minimum, emits it, and
//! advances every child whose head matches — so with `m` children of
//! delay `δ` the merge has delay O(m·δ). Exhausted children drop out of
//! the active set.

use alloc::vec::Vec;

use crate::enumerate::{Emit, Enumerator};
use crate::relation::IdTuple;

struct MergeSlot<C> {
    child: C,
    head: Option<IdTuple>,
}

/// Captures a child's single emission into its merge slot.
struct SlotEmit<'s> {
    slot: &'s mut Option<IdTuple>,
}

impl Emit for SlotEmit<'_> {
    fn emit(&mut self, t: IdTuple) {
        debug_assert!(self.slot.is_none(), "merge child emitted twice in one op");
        *self.slot = Some(t);
    }
}

enum MergePhase {
    /// Ensure child `i` has a head or is dropped.
    Fill(usize),
    /// Find the minimal head among `0..i`, best so far in `best`.
    Scan { i: usize, best: Option<usize> },
    /// Emit the winning head.
    Emit(usize),
    /// Clear every head equal to the last emitted tuple.
    Advance(usize),
    Finished,
}

pub struct SortedMerge<C> {
    active: Vec<MergeSlot<C>>,
    phase: MergePhase,
    last: Option<IdTuple>,
}

impl<C: Enumerator> SortedMerge<C> {
    pub fn new(children: Vec<C>) -> Self {
        let active: Vec<_> = children
            .into_iter()
            .map(|child| MergeSlot { child, head: None })
            .collect();
        SortedMerge {
            phase: if active.is_empty() {
                MergePhase::Finished
            } else {
                MergePhase::Fill(0)
            },
            active,
            last: None,
        }
    }
}

impl<C: Enumerator> Enumerator for SortedMerge<C> {
    fn op(&mut self, out: &mut dyn Emit) {
        match self.phase {
            MergePhase::Fill(i) => {
                if i >= self.active.len() {
                    self.phase = if self.active.is_empty() {
                        MergePhase::Finished
                    } else {
                        MergePhase::Scan { i: 0, best: None }
                    };
                } else if self.active[i].head.is_some() {
                    self.phase = MergePhase::Fill(i + 1);
                } else if self.active[i].child.done() {
                    self.active.swap_remove(i);
                } else {
                    let slot = &mut self.active[i];
                    #[cfg(debug_assertions)]
                    let prev = slot.head.clone();
                    slot.child.op(&mut SlotEmit {
                        slot: &mut slot.head,
                    });
                    #[cfg(debug_assertions)]
                    if let (Some(p), Some(h)) = (&prev, &slot.head) {
                        assert!(p < h, "merge child output out of order");
                    }
                }
            }
            MergePhase::Scan { i, best } => {
                if i >= self.active.len() {
                    self.phase = match best {
                        Some(b) => MergePhase::Emit(b),
                        None => MergePhase::Finished,
                    };
                } else {
                    let better = match best {
                        None => true,
                        Some(b) => self.active[i].head < self.active[b].head,
                    };
                    self.phase = MergePhase::Scan {
                        i: i + 1,
                        best: if better { Some(i) } else { best },
                    };
                }
            }
            MergePhase::Emit(b) => {
                let w = self.active[b].head.clone().expect("winner has a head");
                #[cfg(debug_assertions)]
                if let Some(l) = &self.last {
                    assert!(l < &w, "merge output not strictly increasing");
                }
                out.emit(w.clone());
                self.last = Some(w);
                self.phase = MergePhase::Advance(0);
            }
            MergePhase::Advance(i) => {
                if i >= self.active.len() {
                    self.phase = MergePhase::Fill(0);
                } else {
                    if self.active[i].head == self.last {
                        self.active[i].head = None;
                    }
                    self.phase = MergePhase::Advance(i + 1);
                }
            }
            MergePhase::Finished => {}
        }
    }

    fn done(&self) -> bool {
        matches!(self.phase, MergePhase::Finished)
    }
}

/// Merge plain sorted id lists into singleton-tuple output; the
/// degenerate list-merge primitive.
pub fn merge_sorted_lists<'a>(
    lists: Vec<&'a [u32]>,
) -> SortedMerge<crate::enumerate::TemplateCursor<'a>> {
    SortedMerge::new(
        lists
            .into_iter()
            .map(crate::enumerate::TemplateCursor::singleton)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::OpClock;
    use crate::enumerate::{run_to_completion, OutVec};

    fn run_merge(lists: Vec<&[u32]>) -> Vec<u32> {
        let mut m = merge_sorted_lists(lists);
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        run_to_completion(&mut m, &mut clock, &mut out);
        out.tuples.iter().map(|t| t[0]).collect()
    }

    #[test]
    fn merges_with_dedup() {
        assert_eq!(run_merge(alloc::vec![&[1, 2], &[2], &[3]]), alloc::vec![1, 2, 3]);
    }

    #[test]
    fn single_child_is_identity() {
        assert_eq!(run_merge(alloc::vec![&[1, 4, 9]]), alloc::vec![1, 4, 9]);
    }

    #[test]
    fn empty_children() {
        assert_eq!(run_merge(alloc::vec![]), alloc::vec![] as Vec<u32>);
        assert_eq!(run_merge(alloc::vec![&[][..], &[2][..]]), alloc::vec![2]);
    }
}
