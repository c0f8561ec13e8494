//! Contract tests for the enumeration substrate: budget compliance,
//! sorted-merge semantics against a concat-sort-dedup reference, the
//! interleave-union delay bound, and delay measurement edge cases.

mod common;

use proptest::prelude::*;
use qenum_core::enumerate::{Chain, Scan, TemplateCursor};
use qenum_core::interleave::{DedupInterleave, InterleavePlan, InterleaveUnion, StoredWitness};
use qenum_core::merge::merge_sorted_lists;
use qenum_core::{measure_delay, run_to_completion, step, Emit, Enumerator, IdTuple, OpClock, OutVec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn singleton_tuples(vals: &[u32]) -> Vec<IdTuple> {
    vals.iter().map(|&v| IdTuple::from_slice(&[v])).collect()
}

/// An enumerator that emits one tuple every `period` operations, `count`
/// times; a controllable synthetic load.
struct Ticker {
    period: u64,
    count: u64,
    phase: u64,
    emitted: u64,
    tag: u32,
}

impl Ticker {
    fn new(period: u64, count: u64, tag: u32) -> Self {
        Ticker {
            period,
            count,
            phase: 0,
            emitted: 0,
            tag,
        }
    }
}

impl Enumerator for Ticker {
    fn op(&mut self, out: &mut dyn Emit) {
        self.phase += 1;
        if self.phase == self.period {
            self.phase = 0;
            self.emitted += 1;
            out.emit(IdTuple::from_slice(&[self.tag, self.emitted as u32]));
        }
    }

    fn done(&self) -> bool {
        self.emitted >= self.count
    }
}

#[test]
fn ticker_emitting_every_tick_has_unit_gap() {
    let mut e = Ticker::new(1, 10, 1);
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    let report = measure_delay(&mut e, &mut clock, &mut out);
    assert_eq!(report.max_gap, 1);
    assert_eq!(report.emissions, 10);
}

#[test]
fn empty_enumerator_gap_is_total_runtime() {
    // Consumes 7 ops without emitting, then finishes.
    struct Silent(u64);
    impl Enumerator for Silent {
        fn op(&mut self, _out: &mut dyn Emit) {
            self.0 -= 1;
        }
        fn done(&self) -> bool {
            self.0 == 0
        }
    }
    let mut e = Silent(7);
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    let report = measure_delay(&mut e, &mut clock, &mut out);
    assert_eq!(report.max_gap, 7);
    assert_eq!(report.total_ticks, 7);
    assert_eq!(report.emissions, 0);
}

#[test]
fn measured_delay_is_deterministic_across_runs() {
    let lists: Vec<Vec<u32>> = vec![vec![1, 3, 5, 9], vec![2, 3, 8], vec![3, 9, 11]];
    let run = || {
        let mut m = merge_sorted_lists(lists.iter().map(|l| l.as_slice()).collect());
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        let r = measure_delay(&mut m, &mut clock, &mut out);
        (r.max_gap, r.total_ticks, out.tuples)
    };
    assert_eq!(run(), run());
}

proptest! {
    /// step(b) consumes at most b ticks and exactly as many as it reports.
    #[test]
    fn budget_never_exceeded(budgets in proptest::collection::vec(1u64..40, 1..30)) {
        let lists: Vec<Vec<u32>> = vec![(1..60).collect(), (5..40).step_by(3).collect()];
        let mut m = merge_sorted_lists(lists.iter().map(|l| l.as_slice()).collect());
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        for b in budgets {
            let before = clock.now();
            let used = step(&mut m, &mut clock, b, &mut out);
            prop_assert!(used <= b);
            prop_assert_eq!(clock.now() - before, used);
        }
    }

    /// merge output equals sort(dedup(concat(children))), strictly
    /// increasing.
    #[test]
    fn merge_matches_concat_sort_dedup(
        lists in proptest::collection::vec(
            proptest::collection::btree_set(1u32..80, 0..25),
            0..6,
        )
    ) {
        let lists: Vec<Vec<u32>> = lists.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut m = merge_sorted_lists(lists.iter().map(|l| l.as_slice()).collect());
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        run_to_completion(&mut m, &mut clock, &mut out);
        let got: Vec<u32> = out.tuples.iter().map(|t| t[0]).collect();
        let mut expect: Vec<u32> = lists.concat();
        expect.sort_unstable();
        expect.dedup();
        prop_assert_eq!(got, expect);
    }
}

#[test]
fn thousand_randomized_merges_match_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6d65_7267);
    for _ in 0..1000 {
        let m = rng.gen_range(1..=6);
        let lists: Vec<Vec<u32>> = (0..m)
            .map(|_| {
                let len = rng.gen_range(0..20);
                let mut s = std::collections::BTreeSet::new();
                for _ in 0..len {
                    s.insert(rng.gen_range(1..200u32));
                }
                s.into_iter().collect()
            })
            .collect();
        let mut merge = merge_sorted_lists(lists.iter().map(|l| l.as_slice()).collect());
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        run_to_completion(&mut merge, &mut clock, &mut out);
        let got: Vec<u32> = out.tuples.iter().map(|t| t[0]).collect();
        assert!(got.windows(2).all(|w| w[0] < w[1]), "not strictly increasing");
        let mut expect: Vec<u32> = lists.concat();
        expect.sort_unstable();
        expect.dedup();
        assert_eq!(got, expect);
    }
}

#[test]
fn interleave_union_respects_lemma_bound() {
    // A needs 4x the ticks of A'; certified delay of A' is 2. The union
    // must stay within c * delta * max(1, T/T') for a small c.
    let t_prime = 400u64;
    let t = 4 * t_prime;
    let a = Ticker::new(8, t / 8, 1); // emits every 8 ops, total 4*T'
    let a_prime = Ticker::new(2, t_prime / 2, 2); // delay 2, total T'
    let plan = InterleavePlan::balanced(t, t_prime);
    assert_eq!((plan.eta, plan.gamma), (1, 1));
    let mut u = InterleaveUnion::new(Box::new(a), Box::new(a_prime), plan, 2).unwrap();
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    let report = measure_delay(&mut u, &mut clock, &mut out);
    let bound = 2 * (t / t_prime); // delta * T/T'
    assert!(
        report.max_gap <= 2 * bound,
        "gap {} exceeds c*{bound}",
        report.max_gap
    );
    assert_eq!(report.emissions, t / 8 + t_prime / 2);
}

#[test]
fn interleave_union_is_disjoint_union() {
    let a = Scan::from_vec(singleton_tuples(&[10, 20, 30]));
    let b = Scan::from_vec(singleton_tuples(&[1, 2, 3, 4]));
    let plan = InterleavePlan::balanced(6, 8);
    let mut u = InterleaveUnion::new(Box::new(a), Box::new(b), plan, 1).unwrap();
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    run_to_completion(&mut u, &mut clock, &mut out);
    let mut got: Vec<u32> = out.tuples.iter().map(|t| t[0]).collect();
    got.sort_unstable();
    assert_eq!(got, vec![1, 2, 3, 4, 10, 20, 30]);
}

#[test]
fn dedup_interleave_window_paces_stored_output() {
    // Stored set of 10, inner runs 100 ops emitting nothing new:
    // window = ceil(100/10) = 10, so gaps stay near the window size.
    let stored = StoredWitness::from_list(singleton_tuples(&(1..=10).collect::<Vec<_>>()));
    let inner = Ticker::new(100, 1, 99); // one late emission
    let mut d = DedupInterleave::new(stored, Box::new(inner), 100);
    assert_eq!(d.window(), 10);
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    let report = measure_delay(&mut d, &mut clock, &mut out);
    assert_eq!(out.tuples.len(), 11);
    assert!(
        report.max_gap <= 2 * d.window() + 4,
        "gap {} vs window {}",
        report.max_gap,
        d.window()
    );
}

#[test]
fn chain_runs_parts_in_order() {
    let parts: Vec<Box<dyn Enumerator>> = vec![
        Box::new(Scan::from_vec(singleton_tuples(&[5, 6]))),
        Box::new(Scan::from_vec(vec![])),
        Box::new(Scan::from_vec(singleton_tuples(&[7]))),
    ];
    let mut c = Chain::new(parts);
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    run_to_completion(&mut c, &mut clock, &mut out);
    let got: Vec<u32> = out.tuples.iter().map(|t| t[0]).collect();
    assert_eq!(got, vec![5, 6, 7]);
}

#[test]
fn template_cursor_fills_hole() {
    let list = [4u32, 9];
    let mut c = TemplateCursor::new(&list, IdTuple::from_slice(&[7, 0]), 1);
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    run_to_completion(&mut c, &mut clock, &mut out);
    assert_eq!(out.tuples[0].as_slice(), &[7, 4]);
    assert_eq!(out.tuples[1].as_slice(), &[7, 9]);
}
