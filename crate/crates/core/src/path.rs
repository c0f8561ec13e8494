//! Path-query endpoint enumeration with a preprocessing/delay tradeoff.
//!
//! For `π_{x_1,x_{k+1}}(R_1(x_1,x_2) ⋈ … ⋈ R_k(x_k,x_{k+1}))` and a
//! parameter ε ∈ [0,1), preprocessing materializes, for every value of
//! degree above `Δ = ⌊|D|^{ε/(k-1)}⌋` at any level, the sorted set of
//! endpoints reachable from it (a semijoin sweep per view). Enumeration
//! recurses level by level: stored views scan with constant gaps, light
//! values merge at most Δ child enumerators — all children emit
//! endpoints in the same ascending order — giving delay O(Δ^{k-1}).

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::clock::OpClock;
use crate::enumerate::{Emit, Enumerator, PrefixEmit, Scan, TemplateCursor};
use crate::hash::Map;
use crate::loops::{BuildMerge, ChildSource};
use crate::merge::SortedMerge;
use crate::query::PathQuery;
use crate::relation::{BinaryAdj, IdTuple, Vid};
use crate::stats::JoinStats;
use crate::{Error, Result};

/// Suffix views keyed by (level, value): the sorted endpoint list of
/// every high-degree value.
pub struct SuffixViewStore {
    delta: u64,
    epsilon: f64,
    views: Map<u64, Vec<Vid>>,
    store_entries: u64,
    preprocessing_ticks: u64,
}

impl SuffixViewStore {
    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// Total stored endpoint entries across all views.
    pub fn entries(&self) -> u64 {
        self.store_entries
    }

    pub fn view_count(&self) -> usize {
        self.views.len()
    }

    pub fn preprocessing_ticks(&self) -> u64 {
        self.preprocessing_ticks
    }

    /// The stored endpoint list for value `a` at 0-based level `i`.
    pub fn view(&self, i: usize, a: Vid) -> Option<&[Vid]> {
        self.views.get(&view_key(i, a)).map(|v| v.as_slice())
    }
}

fn view_key(i: usize, a: Vid) -> u64 {
    ((i as u64) << 32) | a as u64
}

/// A preprocessed path instance.
pub struct Path {
    k: usize,
    adj: Vec<BinaryAdj>,
    store: SuffixViewStore,
    stats: JoinStats,
}

impl Path {
    /// Preprocess a reduced, compressed path query with tradeoff
    /// parameter `epsilon ∈ [0, 1)`.
    pub fn preprocess(
        q: &PathQuery,
        domain: usize,
        epsilon: f64,
        clock: &mut OpClock,
    ) -> Result<Path> {
        if !(0.0..1.0).contains(&epsilon) {
            return Err(Error::InvalidParameter("epsilon must be in [0, 1)"));
        }
        let k = q.k();
        let input = q.input_size();
        let out_join =
            crate::stats::full_join_size(&q.relations, crate::QueryShape::Path { k }, domain)?;
        let delta = if input == 0 {
            1
        } else {
            (libm::floor(libm::pow(input as f64, epsilon / (k - 1) as f64)) as u64).max(1)
        };

        let adj: Vec<BinaryAdj> = q
            .relations
            .iter()
            .map(|r| r.binary_adj(0, 1, domain))
            .collect();

        let start_ticks = clock.now();
        let mut views: Map<u64, Vec<Vid>> = Map::default();
        let mut store_entries = 0u64;
        for i in 0..k {
            for &a in adj[i].keys() {
                if adj[i].degree(a) as u64 <= delta {
                    continue;
                }
                // Semijoin sweep from level i+1 to the endpoints.
                let mut frontier = vec![false; domain + 1];
                for &b in adj[i].list(a) {
                    frontier[b as usize] = true;
                }
                clock.charge(adj[i].degree(a) as u64);
                for next_rel in adj.iter().take(k).skip(i + 1) {
                    let mut next = vec![false; domain + 1];
                    clock.charge(domain as u64);
                    for b in 1..=domain {
                        if frontier[b] {
                            let list = next_rel.list(b as Vid);
                            clock.charge(list.len() as u64);
                            for &c in list {
                                next[c as usize] = true;
                            }
                        }
                    }
                    frontier = next;
                }
                clock.charge(domain as u64);
                let view: Vec<Vid> = (1..=domain as Vid)
                    .filter(|&c| frontier[c as usize])
                    .collect();
                store_entries += view.len() as u64;
                views.insert(view_key(i, a), view);
            }
        }

        Ok(Path {
            k,
            adj,
            store: SuffixViewStore {
                delta,
                epsilon,
                views,
                store_entries,
                preprocessing_ticks: clock.now() - start_ticks,
            },
            stats: JoinStats {
                input_size: input,
                full_join_size: out_join,
                projection_size_hint: None,
                degree_sorted: Vec::new(),
            },
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn store(&self) -> &SuffixViewStore {
        &self.store
    }

    pub fn stats(&self) -> &JoinStats {
        &self.stats
    }

    /// `Δ^{k-1}`, the theorem-level delay bound.
    pub fn delay_bound(&self) -> u64 {
        (0..self.k - 1).fold(1u64, |acc, _| acc.saturating_mul(self.store.delta))
    }

    /// Endpoint enumerator for value `a` at 0-based level `i`, emitting
    /// singleton endpoint tuples in ascending order.
    fn level(&self, i: usize, a: Vid) -> LevelEnum<'_> {
        if let Some(view) = self.store.view(i, a) {
            return LevelEnum::Scan(TemplateCursor::singleton(view));
        }
        if i == self.k - 1 {
            return LevelEnum::Scan(TemplateCursor::singleton(self.adj[i].list(a)));
        }
        LevelEnum::Merge(BuildMerge::new(LevelSource {
            path: self,
            next_level: i + 1,
            bs: self.adj[i].list(a),
        }))
    }

    /// Enumerate `(x_1, x_{k+1})` pairs, grouped by ascending `x_1`.
    pub fn enumerator(&self) -> Box<dyn Enumerator + '_> {
        Box::new(PathTop {
            path: self,
            values: self.adj[0].keys(),
            pos: 0,
            cur: None,
            finished: self.adj[0].keys().is_empty(),
        })
    }
}

enum LevelEnum<'a> {
    Scan(TemplateCursor<'a>),
    Merge(BuildMerge<'a, LevelSource<'a>>),
}

impl Enumerator for LevelEnum<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        match self {
            LevelEnum::Scan(s) => s.op(out),
            LevelEnum::Merge(m) => m.op(out),
        }
    }

    fn done(&self) -> bool {
        match self {
            LevelEnum::Scan(s) => s.done(),
            LevelEnum::Merge(m) => m.done(),
        }
    }
}

/// Children of a light value's merge: one level-(i+1) enumerator per
/// neighbor. All emit endpoints in the same ascending order.
struct LevelSource<'a> {
    path: &'a Path,
    next_level: usize,
    bs: &'a [Vid],
}

impl<'a> ChildSource<'a> for LevelSource<'a> {
    type Child = Box<dyn Enumerator + 'a>;

    fn total(&self) -> usize {
        self.bs.len()
    }

    fn make(&mut self, j: usize) -> Option<Box<dyn Enumerator + 'a>> {
        Some(Box::new(self.path.level(self.next_level, self.bs[j])))
    }
}

/// Outer loop over `x_1` values, prefixing each endpoint with its source.
struct PathTop<'a> {
    path: &'a Path,
    values: &'a [Vid],
    pos: usize,
    cur: Option<(Vid, LevelEnum<'a>)>,
    finished: bool,
}

impl Enumerator for PathTop<'_> {
    fn op(&mut self, out: &mut dyn Emit) {
        match &mut self.cur {
            None => {
                if self.pos >= self.values.len() {
                    self.finished = true;
                } else {
                    let a = self.values[self.pos];
                    self.pos += 1;
                    self.cur = Some((a, self.path.level(0, a)));
                }
            }
            Some((a, e)) => {
                if e.done() {
                    self.cur = None;
                    if self.pos >= self.values.len() {
                        self.finished = true;
                    }
                } else {
                    let prefix = [*a];
                    e.op(&mut PrefixEmit {
                        prefix: &prefix,
                        inner: out,
                    });
                }
            }
        }
    }

    fn done(&self) -> bool {
        self.finished
    }
}

/// Merge wrapper reused by tests: endpoint lists merged in sorted order.
pub fn merge_endpoint_lists<'a>(lists: Vec<&'a [Vid]>) -> SortedMerge<TemplateCursor<'a>> {
    crate::merge::merge_sorted_lists(lists)
}

#[allow(dead_code)]
fn _scan_type_check(s: Scan<'_>) -> Scan<'_> {
    s
}

#[allow(dead_code)]
fn _tuple_type(t: IdTuple) -> IdTuple {
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{measure_delay, OutVec};
    use crate::relation::Relation;

    fn rel(name: &str, tuples: &[[Vid; 2]]) -> Relation {
        Relation::new(
            name,
            alloc::vec!["a".into(), "b".into()],
            tuples.iter().map(|t| IdTuple::from_slice(t)).collect(),
        )
    }

    fn run(path: &Path) -> Vec<(Vid, Vid)> {
        let mut e = path.enumerator();
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        measure_delay(&mut *e, &mut clock, &mut out);
        out.tuples.iter().map(|t| (t[0], t[1])).collect()
    }

    #[test]
    fn single_chain() {
        let q = PathQuery::new(alloc::vec![
            rel("r1", &[[1, 2]]),
            rel("r2", &[[2, 3]]),
            rel("r3", &[[3, 4]]),
        ])
        .unwrap();
        let mut clock = OpClock::new();
        let path = Path::preprocess(&q, 4, 0.5, &mut clock).unwrap();
        assert_eq!(run(&path), alloc::vec![(1, 4)]);
    }

    #[test]
    fn epsilon_one_rejected() {
        let q = PathQuery::new(alloc::vec![rel("r1", &[[1, 2]]), rel("r2", &[[2, 3]])]).unwrap();
        let mut clock = OpClock::new();
        assert!(Path::preprocess(&q, 3, 1.0, &mut clock).is_err());
    }

    #[test]
    fn no_heavy_values_means_empty_store() {
        // Disjoint unit chains: all degrees 1.
        let q = PathQuery::new(alloc::vec![
            rel("r1", &[[1, 2], [3, 4]]),
            rel("r2", &[[2, 5], [4, 6]]),
        ])
        .unwrap();
        let mut clock = OpClock::new();
        let path = Path::preprocess(&q, 6, 0.5, &mut clock).unwrap();
        assert_eq!(path.store().view_count(), 0);
        assert_eq!(run(&path), alloc::vec![(1, 5), (3, 6)]);
    }

    #[test]
    fn all_heavy_at_epsilon_zero_uses_views() {
        // Delta = 1: values of degree 2 get views.
        let q = PathQuery::new(alloc::vec![
            rel("r1", &[[1, 2], [1, 3]]),
            rel("r2", &[[2, 4], [3, 5]]),
        ])
        .unwrap();
        let mut clock = OpClock::new();
        let path = Path::preprocess(&q, 5, 0.0, &mut clock).unwrap();
        assert_eq!(path.store().delta(), 1);
        assert!(path.store().view(0, 1).is_some());
        assert_eq!(run(&path), alloc::vec![(1, 4), (1, 5)]);
    }
}
