//! Dynamic self-join star enumeration.
//!
//! A single binary relation `R(x, y)` joined with itself `k` times,
//! projected onto `(x_1, …, x_k)`, under single-tuple inserts and
//! deletes. The index keeps both directions as sorted lists plus the
//! diagonal witness set: every live `x` value `a` contributes the output
//! `(a, …, a)`, so the diagonal is a duplicate-free stored output that
//! paces the on-the-fly self-join.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::clock::OpClock;
use crate::enumerate::{Enumerator, NestedProduct};
use crate::hash::Map;
use crate::interleave::{DedupInterleave, StoredWitness};
use crate::loops::ForEachValue;
use crate::relation::Vid;
use crate::star::product_loop_op_constant;

/// Outcome of one update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UpdateReport {
    /// False when the update was a duplicate insert or a missing delete.
    pub applied: bool,
    /// Virtual ticks the update cost.
    pub ticks: u64,
}

/// Bidirectional sorted-list index over a dynamic binary relation.
#[derive(Debug, Clone, Default)]
pub struct SelfJoinIndex {
    by_x: Map<Vid, Vec<Vid>>,
    by_y: Map<Vid, Vec<Vid>>,
    /// Join values in first-insertion order (swap-removed on emptying);
    /// gives the enumeration a deterministic iteration order.
    y_keys: Vec<Vid>,
    y_pos: Map<Vid, usize>,
    /// Live x values: exactly those with nonzero degree.
    diag: Vec<Vid>,
    diag_pos: Map<Vid, usize>,
    len: u64,
}

impl SelfJoinIndex {
    pub fn new() -> Self {
        SelfJoinIndex::default()
    }

    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The diagonal witness values, in maintenance order.
    pub fn diagonal(&self) -> &[Vid] {
        &self.diag
    }

    pub fn contains(&self, x: Vid, y: Vid) -> bool {
        self.by_x
            .get(&x)
            .is_some_and(|l| l.binary_search(&y).is_ok())
    }

    /// `Σ_u deg(u)^k`, the self-join's full join size.
    pub fn full_join_size(&self, k: usize) -> u64 {
        self.y_keys
            .iter()
            .map(|u| {
                let d = self.by_y.get(u).map(|l| l.len() as u64).unwrap_or(0);
                (0..k).fold(1u64, |acc, _| acc.saturating_mul(d))
            })
            .fold(0u64, |acc, p| acc.saturating_add(p))
    }

    pub fn insert(&mut self, x: Vid, y: Vid, clock: &mut OpClock) -> UpdateReport {
        let start = clock.now();
        clock.charge(1); // by_x probe
        let list = self.by_x.entry(x).or_default();
        let pos = match charged_search(list, y, clock) {
            Ok(_) => {
                return UpdateReport {
                    applied: false,
                    ticks: clock.now() - start,
                }
            }
            Err(pos) => pos,
        };
        let was_empty = list.is_empty();
        clock.charge((list.len() - pos) as u64 + 1); // shift + write
        list.insert(pos, y);
        if was_empty {
            clock.charge(2);
            self.diag_pos.insert(x, self.diag.len());
            self.diag.push(x);
        }

        clock.charge(1); // by_y probe
        let list = self.by_y.entry(y).or_default();
        let was_empty = list.is_empty();
        let pos = charged_search(list, x, clock).unwrap_err();
        clock.charge((list.len() - pos) as u64 + 1);
        list.insert(pos, x);
        if was_empty {
            clock.charge(2);
            self.y_pos.insert(y, self.y_keys.len());
            self.y_keys.push(y);
        }
        self.len += 1;
        UpdateReport {
            applied: true,
            ticks: clock.now() - start,
        }
    }

    pub fn delete(&mut self, x: Vid, y: Vid, clock: &mut OpClock) -> UpdateReport {
        let start = clock.now();
        clock.charge(1);
        let Some(list) = self.by_x.get_mut(&x) else {
            return UpdateReport {
                applied: false,
                ticks: clock.now() - start,
            };
        };
        let Ok(pos) = charged_search(list, y, clock) else {
            return UpdateReport {
                applied: false,
                ticks: clock.now() - start,
            };
        };
        clock.charge((list.len() - pos) as u64);
        list.remove(pos);
        if list.is_empty() {
            self.by_x.remove(&x);
            clock.charge(3);
            let at = self.diag_pos.remove(&x).expect("diagonal entry exists");
            self.diag.swap_remove(at);
            if let Some(&moved) = self.diag.get(at) {
                self.diag_pos.insert(moved, at);
            }
        }

        clock.charge(1);
        let list = self.by_y.get_mut(&y).expect("reverse entry exists");
        let pos = charged_search(list, x, clock).expect("reverse entry exists");
        clock.charge((list.len() - pos) as u64);
        list.remove(pos);
        if list.is_empty() {
            self.by_y.remove(&y);
            clock.charge(3);
            let at = self.y_pos.remove(&y).expect("key entry exists");
            self.y_keys.swap_remove(at);
            if let Some(&moved) = self.y_keys.get(at) {
                self.y_pos.insert(moved, at);
            }
        }
        self.len -= 1;
        UpdateReport {
            applied: true,
            ticks: clock.now() - start,
        }
    }

    /// Enumerate `π_{x_1..x_k}(R ⋈ … ⋈ R)`: the diagonal paces the
    /// on-the-fly k-fold self-join.
    pub fn enumerator(&self, k: usize) -> Box<dyn Enumerator + '_> {
        let stored = StoredWitness::diagonal(&self.diag, k);
        let by_y = &self.by_y;
        let full_join = ForEachValue::new(self.y_keys.as_slice(), move |u| {
            let list: &[Vid] = by_y.get(&u).map(|l| l.as_slice()).unwrap_or(&[]);
            let lists = alloc::vec![list; k];
            NestedProduct::new(lists, (0..k).collect(), core::iter::repeat_n(0, k).collect())
        });
        let t_bound =
            product_loop_op_constant(k).saturating_mul(self.full_join_size(k).max(1));
        Box::new(DedupInterleave::new(stored, Box::new(full_join), t_bound))
    }

    /// `ceil(full join / |diagonal|)`, the delay bound of the paced
    /// enumeration.
    pub fn delay_bound(&self, k: usize) -> u64 {
        crate::stats::ceil_div(self.full_join_size(k).max(1), (self.diag.len() as u64).max(1))
    }
}

/// Binary search charged at one tick per probe step.
fn charged_search(list: &[Vid], v: Vid, clock: &mut OpClock) -> core::result::Result<usize, usize> {
    let steps = (usize::BITS - list.len().leading_zeros()) as u64 + 1;
    clock.charge(steps);
    list.binary_search(&v)
}

/// Parse and apply a list of `(insert?, x, y)` updates.
pub fn apply_script(
    idx: &mut SelfJoinIndex,
    ops: &[(bool, Vid, Vid)],
    clock: &mut OpClock,
) -> Vec<UpdateReport> {
    ops.iter()
        .map(|&(ins, x, y)| {
            if ins {
                idx.insert(x, y, clock)
            } else {
                idx.delete(x, y, clock)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{measure_delay, OutVec};

    #[test]
    fn diagonal_tracks_live_values() {
        let mut idx = SelfJoinIndex::new();
        let mut clock = OpClock::new();
        let r = idx.insert(1, 2, &mut clock);
        assert!(r.applied);
        assert_eq!(idx.diagonal(), &[1]);
        // duplicate insert is a flagged no-op
        assert!(!idx.insert(1, 2, &mut clock).applied);
        idx.delete(1, 2, &mut clock);
        assert!(idx.diagonal().is_empty());
        assert!(!idx.delete(1, 2, &mut clock).applied);
    }

    #[test]
    fn two_tuple_self_join() {
        let mut idx = SelfJoinIndex::new();
        let mut clock = OpClock::new();
        idx.insert(1, 5, &mut clock);
        idx.insert(2, 5, &mut clock);
        let mut e = idx.enumerator(2);
        let mut out = OutVec::new();
        measure_delay(&mut *e, &mut clock, &mut out);
        let mut got: Vec<(Vid, Vid)> = out.tuples.iter().map(|t| (t[0], t[1])).collect();
        got.sort_unstable();
        assert_eq!(got, alloc::vec![(1, 1), (1, 2), (2, 1), (2, 2)]);
    }

    #[test]
    fn singleton_relation() {
        let mut idx = SelfJoinIndex::new();
        let mut clock = OpClock::new();
        idx.insert(1, 5, &mut clock);
        let mut e = idx.enumerator(2);
        let mut out = OutVec::new();
        measure_delay(&mut *e, &mut clock, &mut out);
        let got: Vec<(Vid, Vid)> = out.tuples.iter().map(|t| (t[0], t[1])).collect();
        assert_eq!(got, alloc::vec![(1, 1)]);
    }

    #[test]
    fn empty_index_enumerates_nothing() {
        let idx = SelfJoinIndex::new();
        let mut clock = OpClock::new();
        let mut e = idx.enumerator(3);
        let mut out = OutVec::new();
        measure_delay(&mut *e, &mut clock, &mut out);
        assert!(out.tuples.is_empty());
    }
}
