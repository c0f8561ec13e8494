//! Interleaving combinators: pace an unguaranteed computation with a
//! delay-guaranteed stream.
//!
//! [`InterleaveUnion`] alternates a delay-guaranteed enumerator `A'` with
//! an unguaranteed one `A` in fixed operation quanta, so the union of
//! their (disjoint) outputs inherits a delay bound. [`DedupInterleave`]
//! paces an unguaranteed enumerator with a pre-materialized duplicate-free
//! output set, emitting one stored tuple per budget window and
//! suppressing rediscoveries with hash probes.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::enumerate::{Emit, Enumerator};
use crate::hash::Set;
use crate::relation::{IdTuple, Vid};
use crate::stats::ceil_div;
use crate::{Error, Result};

/// Alternation quanta for [`InterleaveUnion`].
///
/// `t` bounds the total operations of the unguaranteed side from above,
/// `t_prime` bounds the guaranteed side from below. The plan is valid
/// when `eta * t_prime <= t * gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InterleavePlan {
    pub t: u64,
    pub t_prime: u64,
    pub eta: u64,
    pub gamma: u64,
}

impl InterleavePlan {
    /// Fix `eta = 1` and take the smallest valid `gamma`:
    /// `ceil(t_prime / t)` when `t < t_prime`, else 1.
    pub fn balanced(t: u64, t_prime: u64) -> InterleavePlan {
        let t = t.max(1);
        let t_prime = t_prime.max(1);
        let gamma = if t < t_prime { ceil_div(t_prime, t) } else { 1 };
        InterleavePlan {
            t,
            t_prime,
            eta: 1,
            gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.eta == 0 || self.gamma == 0 {
            return Err(Error::InvalidParameter("interleave quanta must be positive"));
        }
        // eta <= t * gamma / t_prime, kept in integers.
        if self.eta.saturating_mul(self.t_prime) > self.t.saturating_mul(self.gamma) {
            return Err(Error::InvalidPlan {
                eta: self.eta,
                gamma: self.gamma,
                t: self.t,
                t_prime: self.t_prime,
            });
        }
        Ok(())
    }
}

/// Union of two enumerators with disjoint outputs: `guaranteed` runs for
/// `gamma` operations, then `unguaranteed` for `eta`, round-robin. Once
/// either side finishes the other runs uninterrupted.
pub struct InterleaveUnion<'a> {
    unguaranteed: Box<dyn Enumerator + 'a>,
    guaranteed: Box<dyn Enumerator + 'a>,
    plan: InterleavePlan,
    delay_hint: u64,
    on_guaranteed: bool,
    left: u64,
}

impl<'a> InterleaveUnion<'a> {
    /// `delay_hint` is the certified delay of the guaranteed side, kept
    /// for reporting; the combinator does not depend on it.
    pub fn new(
        unguaranteed: Box<dyn Enumerator + 'a>,
        guaranteed: Box<dyn Enumerator + 'a>,
        plan: InterleavePlan,
        delay_hint: u64,
    ) -> Result<Self> {
        plan.validate()?;
        Ok(InterleaveUnion {
            unguaranteed,
            guaranteed,
            on_guaranteed: true,
            left: plan.gamma,
            plan,
            delay_hint,
        })
    }

    pub fn plan(&self) -> InterleavePlan {
        self.plan
    }

    /// `delay_hint * max(1, ceil(t / t_prime))`, the combined delay bound.
    pub fn delay_bound(&self) -> u64 {
        self.delay_hint
            .max(1)
            .saturating_mul(ceil_div(self.plan.t, self.plan.t_prime).max(1))
    }
}

impl Enumerator for InterleaveUnion<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        let g_done = self.guaranteed.done();
        let u_done = self.unguaranteed.done();
        if g_done && u_done {
            return;
        }
        if g_done {
            self.unguaranteed.op(out);
            return;
        }
        if u_done {
            self.guaranteed.op(out);
            return;
        }
        if self.on_guaranteed {
            self.guaranteed.op(out);
        } else {
            self.unguaranteed.op(out);
        }
        self.left -= 1;
        if self.left == 0 {
            self.on_guaranteed = !self.on_guaranteed;
            self.left = if self.on_guaranteed {
                self.plan.gamma
            } else {
                self.plan.eta
            };
        }
    }

    fn done(&self) -> bool {
        self.guaranteed.done() && self.unguaranteed.done()
    }
}

/// A duplicate-free set of output tuples materialized during
/// preprocessing, scannable in order and probeable for membership.
pub enum StoredWitness<'a> {
    /// Explicit tuple list.
    List { tuples: Vec<IdTuple>, set: Set<IdTuple> },
    /// Factorized cartesian product of per-coordinate sorted lists.
    Product {
        lists: Vec<&'a [Vid]>,
        sets: Vec<Set<Vid>>,
    },
    /// Diagonal tuples `(a, a, …, a)` of arity `k`, one per listed value.
    Diagonal {
        values: &'a [Vid],
        set: Set<Vid>,
        k: usize,
    },
}

impl<'a> StoredWitness<'a> {
    pub fn from_list(tuples: Vec<IdTuple>) -> StoredWitness<'static> {
        let set = tuples.iter().cloned().collect();
        StoredWitness::List { tuples, set }
    }

    pub fn from_product(lists: Vec<&'a [Vid]>) -> StoredWitness<'a> {
        let sets = lists
            .iter()
            .map(|l| l.iter().copied().collect())
            .collect();
        StoredWitness::Product { lists, sets }
    }

    pub fn diagonal(values: &'a [Vid], k: usize) -> StoredWitness<'a> {
        StoredWitness::Diagonal {
            values,
            set: values.iter().copied().collect(),
            k,
        }
    }

    pub fn len(&self) -> u64 {
        match self {
            StoredWitness::List { tuples, .. } => tuples.len() as u64,
            StoredWitness::Product { lists, .. } => lists
                .iter()
                .fold(1u64, |acc, l| acc.saturating_mul(l.len() as u64)),
            StoredWitness::Diagonal { values, .. } => values.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn contains(&self, t: &IdTuple) -> bool {
        match self {
            StoredWitness::List { set, .. } => set.contains(t),
            StoredWitness::Product { sets, .. } => {
                t.len() == sets.len() && t.iter().zip(sets).all(|(v, s)| s.contains(v))
            }
            StoredWitness::Diagonal { set, k, .. } => {
                t.len() == *k && t.iter().all(|v| *v == t[0]) && set.contains(&t[0])
            }
        }
    }

    /// Tuple at scan position `pos`, if any.
    fn get(&self, pos: usize) -> Option<IdTuple> {
        match self {
            StoredWitness::List { tuples, .. } => tuples.get(pos).cloned(),
            StoredWitness::Product { lists, .. } => {
                if lists.iter().any(|l| l.is_empty()) {
                    return None;
                }
                let mut rem = pos;
                let mut t = IdTuple::with_capacity(lists.len());
                // Row-major decode, last coordinate fastest.
                let mut strides: Vec<usize> = Vec::with_capacity(lists.len());
                let mut acc = 1usize;
                for l in lists.iter().rev() {
                    strides.push(acc);
                    acc = acc.saturating_mul(l.len());
                }
                if pos >= acc {
                    return None;
                }
                strides.reverse();
                for (l, s) in lists.iter().zip(strides) {
                    t.push(l[rem / s]);
                    rem %= s;
                }
                Some(t)
            }
            StoredWitness::Diagonal { values, k, .. } => values
                .get(pos)
                .map(|&v| core::iter::repeat_n(v, *k).collect()),
        }
    }
}

enum DedupPhase {
    EmitStored,
    RunInner { left: u64 },
    ProbeStored { t: IdTuple, left: u64 },
    ProbeSeen { t: IdTuple, left: u64 },
    EmitInner { t: IdTuple, left: u64 },
    InsertSeen { t: IdTuple, left: u64 },
    Finished,
}

/// Capture slot for the inner enumerator's emission.
struct Capture(Option<IdTuple>);

impl Emit for Capture {
    fn emit(&mut self, t: IdTuple) {
        debug_assert!(self.0.is_none());
        self.0 = Some(t);
    }
}

/// Interleave a stored output list with an on-the-fly computation.
///
/// One stored tuple is emitted, then the inner enumerator runs for a
/// window of `ceil(t_bound / |stored|)` operations (probes and emissions
/// included), and so on. Inner emissions already present in the stored
/// set or previously seen are suppressed; fresh ones are emitted and
/// remembered.
pub struct DedupInterleave<'a> {
    stored: StoredWitness<'a>,
    inner: Box<dyn Enumerator + 'a>,
    seen: Set<IdTuple>,
    window: u64,
    scan_pos: usize,
    phase: DedupPhase,
    fallback: bool,
}

impl<'a> DedupInterleave<'a> {
    /// `t_bound` is the upper bound on the inner enumerator's total
    /// operations. An empty stored set falls back to running the inner
    /// enumerator with no delay guarantee, reported by [`fallback`](Self::fallback).
    pub fn new(
        stored: StoredWitness<'a>,
        inner: Box<dyn Enumerator + 'a>,
        t_bound: u64,
    ) -> Self {
        let stored_len = stored.len();
        let fallback = stored_len == 0;
        let window = ceil_div(t_bound.max(1), stored_len.max(1)).max(1);
        let phase = if fallback {
            DedupPhase::RunInner { left: u64::MAX }
        } else {
            DedupPhase::EmitStored
        };
        DedupInterleave {
            stored,
            inner,
            seen: Set::default(),
            window,
            scan_pos: 0,
            phase,
            fallback,
        }
    }

    /// True when the stored set was empty and pacing is disabled.
    pub fn fallback(&self) -> bool {
        self.fallback
    }

    /// The pacing window `ceil(T / |J|)`.
    pub fn window(&self) -> u64 {
        self.window
    }

    fn after_window_op(&mut self, left: u64) -> DedupPhase {
        if left == 0 {
            if self.scan_pos < self.stored.len() as usize {
                DedupPhase::EmitStored
            } else if self.inner.done() {
                DedupPhase::Finished
            } else {
                // Stored tuples ran out before the inner enumerator
                // finished; keep running it to completion.
                DedupPhase::RunInner { left: u64::MAX }
            }
        } else {
            DedupPhase::RunInner { left }
        }
    }
}

impl Enumerator for DedupInterleave<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        match core::mem::replace(&mut self.phase, DedupPhase::Finished) {
            DedupPhase::EmitStored => {
                match self.stored.get(self.scan_pos) {
                    Some(t) => {
                        self.scan_pos += 1;
                        out.emit(t);
                        self.phase = if self.inner.done() && self.scan_pos >= self.stored.len() as usize
                        {
                            DedupPhase::Finished
                        } else if self.inner.done() {
                            DedupPhase::EmitStored
                        } else {
                            DedupPhase::RunInner { left: self.window }
                        };
                    }
                    None => {
                        self.phase = if self.inner.done() {
                            DedupPhase::Finished
                        } else {
                            DedupPhase::RunInner { left: u64::MAX }
                        };
                    }
                }
            }
            DedupPhase::RunInner { left } => {
                if self.inner.done() {
                    self.phase = if self.scan_pos < self.stored.len() as usize {
                        DedupPhase::EmitStored
                    } else {
                        DedupPhase::Finished
                    };
                    return;
                }
                let mut cap = Capture(None);
                self.inner.op(&mut cap);
                let left = left.saturating_sub(1);
                self.phase = match cap.0 {
                    Some(t) => DedupPhase::ProbeStored { t, left },
                    None => {
                        if self.inner.done() && self.scan_pos < self.stored.len() as usize {
                            DedupPhase::EmitStored
                        } else if self.inner.done() {
                            DedupPhase::Finished
                        } else {
                            self.after_window_op(left)
                        }
                    }
                };
            }
            DedupPhase::ProbeStored { t, left } => {
                let left = left.saturating_sub(1);
                self.phase = if self.stored.contains(&t) {
                    self.after_window_op(left)
                } else {
                    DedupPhase::ProbeSeen { t, left }
                };
            }
            DedupPhase::ProbeSeen { t, left } => {
                let left = left.saturating_sub(1);
                self.phase = if self.seen.contains(&t) {
                    self.after_window_op(left)
                } else {
                    DedupPhase::EmitInner { t, left }
                };
            }
            DedupPhase::EmitInner { t, left } => {
                out.emit(t.clone());
                let left = left.saturating_sub(1);
                self.phase = DedupPhase::InsertSeen { t, left };
            }
            DedupPhase::InsertSeen { t, left } => {
                self.seen.insert(t);
                let left = left.saturating_sub(1);
                self.phase = self.after_window_op(left);
            }
            DedupPhase::Finished => {}
        }
    }

    fn done(&self) -> bool {
        matches!(self.phase, DedupPhase::Finished)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::OpClock;
    use crate::enumerate::{measure_delay, OutVec, Scan};

    fn tuples(vals: &[u32]) -> Vec<IdTuple> {
        vals.iter().map(|&v| IdTuple::from_slice(&[v])).collect()
    }

    #[test]
    fn union_of_empty_and_stream() {
        let a = Box::new(Scan::<'static>::from_vec(Vec::new()));
        let a_prime = Box::new(Scan::<'static>::from_vec(tuples(&[1, 2, 3])));
        let plan = InterleavePlan::balanced(1, 3);
        let mut u = InterleaveUnion::new(a, a_prime, plan, 1).unwrap();
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        let report = measure_delay(&mut u, &mut clock, &mut out);
        assert_eq!(out.tuples.len(), 3);
        assert!(report.max_gap <= 3);
    }

    #[test]
    fn invalid_plan_rejected() {
        let plan = InterleavePlan {
            t: 1,
            t_prime: 10,
            eta: 2,
            gamma: 1,
        };
        assert!(plan.validate().is_err());
    }

    #[test]
    fn dedup_suppresses_stored_duplicates() {
        // Stored J = {(1,1)}, inner emits (1,1) then (2,2).
        let stored = StoredWitness::from_list(alloc::vec![
            IdTuple::from_slice(&[1, 1])
        ]);
        let inner = Box::new(Scan::<'static>::from_vec(alloc::vec![
            IdTuple::from_slice(&[1, 1]),
            IdTuple::from_slice(&[2, 2]),
        ]));
        let mut d = DedupInterleave::new(stored, inner, 16);
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        measure_delay(&mut d, &mut clock, &mut out);
        let mut got: Vec<_> = out.tuples.iter().map(|t| (t[0], t[1])).collect();
        got.sort_unstable();
        assert_eq!(got, alloc::vec![(1, 1), (2, 2)]);
    }

    #[test]
    fn dedup_full_overlap_emits_stored_only() {
        let stored = StoredWitness::from_list(tuples(&[1, 2, 3]));
        let inner = Box::new(Scan::<'static>::from_vec(tuples(&[1, 2, 3])));
        let mut d = DedupInterleave::new(stored, inner, 3);
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        measure_delay(&mut d, &mut clock, &mut out);
        let mut got: Vec<_> = out.tuples.iter().map(|t| t[0]).collect();
        got.sort_unstable();
        assert_eq!(got, alloc::vec![1, 2, 3]);
    }

    #[test]
    fn empty_stored_falls_back() {
        let stored = StoredWitness::from_list(Vec::new());
        let inner = Box::new(Scan::<'static>::from_vec(tuples(&[7])));
        let mut d = DedupInterleave::new(stored, inner, 4);
        assert!(d.fallback());
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        measure_delay(&mut d, &mut clock, &mut out);
        assert_eq!(out.tuples.len(), 1);
    }

    #[test]
    fn product_witness_scan_and_probe() {
        let xs = [1u32, 2];
        let zs = [5u32, 6];
        let stored = StoredWitness::from_product(alloc::vec![&xs[..], &zs[..]]);
        assert_eq!(stored.len(), 4);
        assert!(stored.contains(&IdTuple::from_slice(&[2, 5])));
        assert!(!stored.contains(&IdTuple::from_slice(&[3, 5])));
        assert_eq!(stored.get(0), Some(IdTuple::from_slice(&[1, 5])));
        assert_eq!(stored.get(3), Some(IdTuple::from_slice(&[2, 6])));
        assert_eq!(stored.get(4), None);
    }
}
