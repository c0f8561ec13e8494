//! Star-query enumeration with data-dependent delay.
//!
//! Three algorithms over `π_{x_1..x_k}(R_1(x_1,y) ⋈ … ⋈ R_k(x_k,y))`:
//!
//! * [`TwoPath`] — the k = 2 case. Preprocessing sorts the `x` values of
//!   `R` by degree and finds the smallest prefix whose join contribution
//!   reaches the suffix's; enumeration interleaves a per-valuation sorted
//!   merge over the low-degree prefix (the delay-guaranteed side) with
//!   the same loop over the high-degree suffix.
//! * [`Star`] — general k. A degree threshold Δ splits each relation
//!   into heavy and light tuples; the k light subqueries enumerate with
//!   delay O(Δ) while the all-heavy subquery's join is computed on the
//!   fly and interleaved in.
//! * [`StarAlternate`] — stores a duplicate-free witness set J during
//!   preprocessing (one output per x-value of the widest column, or the
//!   factorized product of the best join value) and paces the full join
//!   computation against it.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::clock::OpClock;
use crate::enumerate::{run_to_completion, Enumerator, NestedProduct, OutVec, Scan, TemplateCursor};
use crate::interleave::{DedupInterleave, InterleavePlan, InterleaveUnion, StoredWitness};
use crate::loops::{BuildMerge, ChildSource, DedupProductLoop, ForEachValue, ProductStream};
use crate::query::StarQuery;
use crate::relation::{BinaryAdj, IdTuple, Relation, Vid};
use crate::stats::{
    ceil_div, ceil_root_of_ratio, count_sort_by_degree, find_split_index, DegreeOrder, JoinStats,
    SplitPoint,
};
use crate::{Error, Result};

/// Children of one per-valuation merge: for each neighbor `u` of the
/// fixed outer value, the sorted inner list of `u` emitted as pairs.
pub(crate) struct PairSource<'a> {
    pub v: Vid,
    pub us: &'a [Vid],
    pub inner: &'a BinaryAdj,
    /// Position of the fixed outer value in the emitted pair.
    pub fixed_pos: usize,
}

impl<'a> ChildSource<'a> for PairSource<'a> {
    type Child = TemplateCursor<'a>;

    fn total(&self) -> usize {
        self.us.len()
    }

    fn make(&mut self, j: usize) -> Option<TemplateCursor<'a>> {
        let list = self.inner.list(self.us[j]);
        if list.is_empty() {
            return None;
        }
        let (template, hole) = if self.fixed_pos == 0 {
            (IdTuple::from_slice(&[self.v, 0]), 1)
        } else {
            (IdTuple::from_slice(&[0, self.v]), 0)
        };
        Some(TemplateCursor::new(list, template, hole))
    }
}

pub(crate) fn pair_merge_loop<'a>(
    values: &'a [Vid],
    outer: &'a BinaryAdj,
    inner: &'a BinaryAdj,
    fixed_pos: usize,
) -> impl Enumerator + 'a {
    ForEachValue::new(values, move |v| {
        BuildMerge::new(PairSource {
            v,
            us: outer.list(v),
            inner,
            fixed_pos,
        })
    })
}

/// Two-path instance after preprocessing: reduced, compressed, indexed.
pub struct TwoPath {
    adj_x: BinaryAdj,
    adj_y: BinaryAdj,
    order: Vec<Vid>,
    split: SplitPoint,
    light_delay: u64,
    op_constant: u64,
    stats: JoinStats,
    bypass: Option<Vec<IdTuple>>,
}

impl TwoPath {
    /// Preprocess reduced, compressed relations `r(x,y)` and `s(y,z)`.
    ///
    /// When the full join is smaller than `2|D|` the projection is
    /// materialized outright and enumerated by constant-delay scan.
    pub fn preprocess(r: &Relation, s: &Relation, domain: usize) -> Result<TwoPath> {
        for rel in [r, s] {
            if rel.arity() != 2 {
                return Err(Error::Arity {
                    relation: rel.name().into(),
                    expected: 2,
                    got: rel.arity(),
                });
            }
        }
        let adj_x = r.binary_adj(0, 1, domain);
        let adj_y = s.binary_adj(0, 1, domain);
        let deg_x = r.degrees(0, domain);
        let order = count_sort_by_degree(&deg_x);
        let deg_sy = s.degrees(0, domain);
        let contribs: Vec<u64> = order
            .iter()
            .map(|&v| {
                adj_x
                    .list(v)
                    .iter()
                    .map(|&u| deg_sy[u as usize] as u64)
                    .sum()
            })
            .collect();
        let out_join: u64 = contribs.iter().sum();
        let input = (r.len() + s.len()) as u64;
        let split = find_split_index(&contribs);
        let light_delay = if split.i_star > 0 && !order.is_empty() {
            adj_x.degree(order[split.i_star - 1]) as u64
        } else {
            0
        };
        let mut stats = JoinStats {
            input_size: input,
            full_join_size: out_join,
            projection_size_hint: None,
            degree_sorted: alloc::vec![DegreeOrder {
                relation: r.name().into(),
                attr: r.schema()[0].clone(),
                values: order.clone(),
            }],
        };

        let bypass = if out_join < 2 * input || input == 0 {
            let mut materialized = Vec::new();
            for &v in &order {
                let mut zs = BTreeSet::new();
                for &u in adj_x.list(v) {
                    zs.extend(adj_y.list(u).iter().copied());
                }
                materialized.extend(zs.into_iter().map(|z| IdTuple::from_slice(&[v, z])));
            }
            stats.projection_size_hint = Some(materialized.len() as u64);
            Some(materialized)
        } else {
            None
        };

        Ok(TwoPath {
            adj_x,
            adj_y,
            order,
            split,
            light_delay,
            op_constant: two_path_op_constant(),
            stats,
            bypass,
        })
    }

    pub fn stats(&self) -> &JoinStats {
        &self.stats
    }

    pub fn split(&self) -> SplitPoint {
        self.split
    }

    /// Degree of the split valuation; the light side's certified delay.
    pub fn light_delay(&self) -> u64 {
        self.light_delay
    }

    pub fn op_constant(&self) -> u64 {
        self.op_constant
    }

    pub fn bypassed(&self) -> bool {
        self.bypass.is_some()
    }

    /// `ceil(|D|² / |OUT⋈|)`, the theorem-level delay bound.
    pub fn delay_bound(&self) -> u64 {
        let d = self.stats.input_size as u128;
        let out = self.stats.full_join_size.max(1) as u128;
        (d.saturating_mul(d).div_ceil(out))
            .max(1)
            .min(u64::MAX as u128) as u64
    }

    /// The enumerator: the high-degree loop paced by the low-degree loop.
    pub fn enumerator(&self) -> Result<Box<dyn Enumerator + '_>> {
        if let Some(m) = &self.bypass {
            return Ok(Box::new(Scan::from_slice(m)));
        }
        let (light_vals, heavy_vals) = self.order.split_at(self.split.i_star);
        let light = pair_merge_loop(light_vals, &self.adj_x, &self.adj_y, 0);
        let heavy = pair_merge_loop(heavy_vals, &self.adj_x, &self.adj_y, 0);
        let plan = InterleavePlan::balanced(
            self.op_constant.saturating_mul(self.split.j_heavy),
            self.split.j_light,
        );
        Ok(Box::new(InterleaveUnion::new(
            Box::new(heavy),
            Box::new(light),
            plan,
            self.light_delay.max(1),
        )?))
    }
}

/// Measured upper bound on the operations one merge-loop iteration
/// spends per full-join tuple, taken once on a fixed calibration
/// instance.
pub fn two_path_op_constant() -> u64 {
    // Mix of degrees: x=1 joins three y's with overlapping z-lists,
    // x=2 joins one.
    let r = Relation::new(
        "calib_r",
        alloc::vec!["x".into(), "y".into()],
        alloc::vec![
            IdTuple::from_slice(&[1, 4]),
            IdTuple::from_slice(&[1, 5]),
            IdTuple::from_slice(&[1, 6]),
            IdTuple::from_slice(&[2, 4]),
        ],
    );
    let s = Relation::new(
        "calib_s",
        alloc::vec!["y".into(), "z".into()],
        alloc::vec![
            IdTuple::from_slice(&[4, 7]),
            IdTuple::from_slice(&[4, 8]),
            IdTuple::from_slice(&[5, 8]),
            IdTuple::from_slice(&[6, 9]),
        ],
    );
    let adj_x = r.binary_adj(0, 1, 9);
    let adj_y = s.binary_adj(0, 1, 9);
    let full_join = 6u64;
    let values: Vec<Vid> = alloc::vec![1, 2];
    let mut merge_loop = pair_merge_loop(&values, &adj_x, &adj_y, 0);
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    run_to_completion(&mut merge_loop, &mut clock, &mut out);
    ceil_div(clock.now(), full_join) + 1
}

/// Measured upper bound on operations per full-join tuple of the
/// dedup-filtered product loop, per star width `k`.
pub fn product_loop_op_constant(k: usize) -> u64 {
    struct CalStream<'a> {
        list: &'a [Vid],
        k: usize,
        pos: usize,
    }
    impl<'a> ProductStream<'a> for CalStream<'a> {
        fn next(&mut self) -> Option<Option<NestedProduct<'a>>> {
            if self.pos >= 2 {
                return None;
            }
            self.pos += 1;
            let lists = alloc::vec![self.list; self.k];
            let holes = (0..self.k).collect();
            let template: IdTuple = core::iter::repeat_n(0, self.k).collect();
            Some(Some(NestedProduct::new(lists, holes, template)))
        }
    }
    let list: Vec<Vid> = alloc::vec![1, 2];
    let full_join = 2u64 << k; // two join values, 2^k combinations each
    let mut dedup_loop = DedupProductLoop::new(CalStream {
        list: &list,
        k,
        pos: 0,
    });
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    run_to_completion(&mut dedup_loop, &mut clock, &mut out);
    ceil_div(clock.now(), full_join) + 1
}

/// General star instance after preprocessing.
pub struct Star {
    k: usize,
    delta: u64,
    adj_x: Vec<BinaryAdj>,
    adj_y_all: Vec<BinaryAdj>,
    adj_y_heavy: Vec<BinaryAdj>,
    /// `alive[i][u]`: the heavy neighbor lists of every relation before
    /// `i` are nonempty at join value `u`.
    alive: Vec<Vec<bool>>,
    /// Light values of `x_i` with at least one output in subquery `i`.
    fertile_light: Vec<Vec<Vid>>,
    /// Join values whose heavy lists are all nonempty.
    heavy_y: Vec<Vid>,
    qh_size: u64,
    op_constant: u64,
    stats: JoinStats,
    bypass: Option<Vec<IdTuple>>,
}

impl Star {
    /// Preprocess a normalized, reduced star query.
    pub fn preprocess(q: &StarQuery, domain: usize) -> Result<Star> {
        let k = q.k();
        let input = q.input_size();
        let out_join =
            crate::stats::full_join_size(&q.relations, crate::QueryShape::Star { k }, domain)?;
        let delta = ceil_root_of_ratio(
            2u128.saturating_mul(pow_u128(input as u128, k as u32)),
            out_join.max(1) as u128,
            (k - 1) as u32,
        );

        let adj_x: Vec<BinaryAdj> = q
            .relations
            .iter()
            .map(|r| r.binary_adj(0, 1, domain))
            .collect();
        let adj_y_all: Vec<BinaryAdj> = q
            .relations
            .iter()
            .map(|r| r.binary_adj(1, 0, domain))
            .collect();
        let degs: Vec<Vec<u32>> = q.relations.iter().map(|r| r.degrees(0, domain)).collect();
        let adj_y_heavy: Vec<BinaryAdj> = q
            .relations
            .iter()
            .zip(&degs)
            .map(|(r, deg)| {
                r.binary_adj_filtered(1, 0, domain, |t| deg[t[0] as usize] as u64 > delta)
            })
            .collect();

        let mut alive: Vec<Vec<bool>> = Vec::with_capacity(k + 1);
        alive.push(alloc::vec![true; domain + 1]);
        for i in 0..k {
            let prev = &alive[i];
            let mut next = alloc::vec![false; domain + 1];
            for u in 1..=domain {
                next[u] = prev[u] && !adj_y_heavy[i].list(u as Vid).is_empty();
            }
            alive.push(next);
        }

        let mut fertile_light: Vec<Vec<Vid>> = Vec::with_capacity(k);
        for i in 0..k {
            let mut vals = Vec::new();
            for &v in adj_x[i].keys() {
                if degs[i][v as usize] as u64 <= delta
                    && adj_x[i].list(v).iter().any(|&u| alive[i][u as usize])
                {
                    vals.push(v);
                }
            }
            fertile_light.push(vals);
        }

        let heavy_y: Vec<Vid> = (1..=domain as Vid)
            .filter(|&u| alive[k][u as usize])
            .collect();
        let qh_size: u64 = heavy_y
            .iter()
            .map(|&u| {
                adj_y_heavy
                    .iter()
                    .fold(1u64, |acc, adj| acc.saturating_mul(adj.degree(u) as u64))
            })
            .fold(0u64, |acc, p| acc.saturating_add(p));

        let mut stats = JoinStats {
            input_size: input,
            full_join_size: out_join,
            projection_size_hint: None,
            degree_sorted: Vec::new(),
        };

        let bypass = if out_join < 2 * input || input == 0 {
            let mut seen = crate::hash::Set::default();
            let mut materialized = Vec::new();
            for u in 1..=domain as Vid {
                let lists: Vec<&[Vid]> = adj_y_all.iter().map(|adj| adj.list(u)).collect();
                if lists.iter().any(|l| l.is_empty()) {
                    continue;
                }
                let mut p = NestedProduct::new(
                    lists,
                    (0..k).collect(),
                    core::iter::repeat_n(0, k).collect(),
                );
                let mut clock = OpClock::new();
                let mut buf = OutVec::new();
                run_to_completion(&mut p, &mut clock, &mut buf);
                for t in buf.tuples {
                    if seen.insert(t.clone()) {
                        materialized.push(t);
                    }
                }
            }
            stats.projection_size_hint = Some(materialized.len() as u64);
            Some(materialized)
        } else {
            None
        };

        Ok(Star {
            k,
            delta,
            adj_x,
            adj_y_all,
            adj_y_heavy,
            alive,
            fertile_light,
            heavy_y,
            qh_size,
            op_constant: product_loop_op_constant(k),
            stats,
            bypass,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The heavy/light degree threshold Δ.
    pub fn delta(&self) -> u64 {
        self.delta
    }

    /// Full join size of the all-heavy subquery.
    pub fn heavy_join_size(&self) -> u64 {
        self.qh_size
    }

    pub fn stats(&self) -> &JoinStats {
        &self.stats
    }

    pub fn op_constant(&self) -> u64 {
        self.op_constant
    }

    pub fn bypassed(&self) -> bool {
        self.bypass.is_some()
    }

    pub fn is_heavy(&self, i: usize, v: Vid) -> bool {
        self.adj_x[i].degree(v) as u64 > self.delta
    }

    /// Per-valuation enumerator: all outputs through `x_i = v`, joining
    /// heavy tuples of relations before `i` and all tuples after, in
    /// lexicographic order. Delay O(degree of `v`).
    pub fn one_valuation(&self, i: usize, v: Vid) -> BuildMerge<'_, StarValSource<'_>> {
        BuildMerge::new(StarValSource {
            star: self,
            i,
            v,
            us: self.adj_x[i].list(v),
        })
    }

    /// The interleaved enumerator for the whole query.
    pub fn enumerator(&self) -> Result<Box<dyn Enumerator + '_>> {
        if let Some(m) = &self.bypass {
            return Ok(Box::new(Scan::from_slice(m)));
        }
        let light_parts: Vec<Box<dyn Enumerator + '_>> = (0..self.k)
            .map(|i| {
                Box::new(ForEachValue::new(
                    self.fertile_light[i].as_slice(),
                    move |v| self.one_valuation(i, v),
                )) as Box<dyn Enumerator + '_>
            })
            .collect();
        let light = crate::enumerate::Chain::new(light_parts);
        let heavy = DedupProductLoop::new(HeavyYStream { star: self, pos: 0 });
        let out = self.stats.full_join_size;
        let plan =
            InterleavePlan::balanced(self.op_constant.saturating_mul(out / 2), out / 2);
        Ok(Box::new(InterleaveUnion::new(
            Box::new(heavy),
            Box::new(light),
            plan,
            self.delta.max(1),
        )?))
    }
}

fn pow_u128(base: u128, exp: u32) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// Children for [`Star::one_valuation`]: per neighbor `u`, the factorized
/// product of the other relations' lists at `u`.
pub struct StarValSource<'a> {
    star: &'a Star,
    i: usize,
    v: Vid,
    us: &'a [Vid],
}

impl<'a> ChildSource<'a> for StarValSource<'a> {
    type Child = NestedProduct<'a>;

    fn total(&self) -> usize {
        self.us.len()
    }

    fn make(&mut self, j: usize) -> Option<NestedProduct<'a>> {
        let u = self.us[j];
        if !self.star.alive[self.i][u as usize] {
            return None;
        }
        let k = self.star.k;
        let mut lists = Vec::with_capacity(k - 1);
        let mut holes = Vec::with_capacity(k - 1);
        for jj in 0..k {
            if jj == self.i {
                continue;
            }
            let list = if jj < self.i {
                self.star.adj_y_heavy[jj].list(u)
            } else {
                self.star.adj_y_all[jj].list(u)
            };
            debug_assert!(!list.is_empty(), "reduced relations leave no empty factor");
            lists.push(list);
            holes.push(jj);
        }
        let mut template: IdTuple = core::iter::repeat_n(0, k).collect();
        template[self.i] = self.v;
        Some(NestedProduct::new(lists, holes, template))
    }
}

/// Full join of the all-heavy subquery, one product per join value.
struct HeavyYStream<'a> {
    star: &'a Star,
    pos: usize,
}

impl<'a> ProductStream<'a> for HeavyYStream<'a> {
    fn next(&mut self) -> Option<Option<NestedProduct<'a>>> {
        if self.pos >= self.star.heavy_y.len() {
            return None;
        }
        let u = self.star.heavy_y[self.pos];
        self.pos += 1;
        let k = self.star.k;
        let lists: Vec<&[Vid]> = (0..k).map(|j| self.star.adj_y_heavy[j].list(u)).collect();
        Some(Some(NestedProduct::new(
            lists,
            (0..k).collect(),
            core::iter::repeat_n(0, k).collect(),
        )))
    }
}

/// Which witness set the alternate algorithm stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WitnessKind {
    /// One output tuple per value of column `rel`.
    PerValue { rel: usize },
    /// The factorized product of all lists at join value `u`.
    ProductAt { u: Vid },
}

/// The alternate star algorithm: pace the full join against a stored
/// witness set of `J = max(max_i |dom(x_i)|, max_u Π_i deg_i(u))` outputs.
pub struct StarAlternate {
    k: usize,
    adj_y_all: Vec<BinaryAdj>,
    witness: WitnessKind,
    witness_list: Vec<IdTuple>,
    witness_u: Vid,
    j_len: u64,
    op_constant: u64,
    stats: JoinStats,
}

impl StarAlternate {
    pub fn preprocess(q: &StarQuery, domain: usize) -> Result<StarAlternate> {
        let k = q.k();
        let input = q.input_size();
        let out_join =
            crate::stats::full_join_size(&q.relations, crate::QueryShape::Star { k }, domain)?;
        let adj_x: Vec<BinaryAdj> = q
            .relations
            .iter()
            .map(|r| r.binary_adj(0, 1, domain))
            .collect();
        let adj_y_all: Vec<BinaryAdj> = q
            .relations
            .iter()
            .map(|r| r.binary_adj(1, 0, domain))
            .collect();

        let (best_rel, best_dom) = adj_x
            .iter()
            .enumerate()
            .map(|(i, adj)| (i, adj.keys().len() as u64))
            .max_by_key(|&(i, n)| (n, core::cmp::Reverse(i)))
            .unwrap_or((0, 0));
        let (best_u, best_prod) = adj_y_all
            .first()
            .map(|adj0| {
                adj0.keys()
                    .iter()
                    .map(|&u| {
                        (
                            u,
                            adj_y_all
                                .iter()
                                .fold(1u64, |acc, adj| acc.saturating_mul(adj.degree(u) as u64)),
                        )
                    })
                    .max_by_key(|&(u, p)| (p, core::cmp::Reverse(u)))
                    .unwrap_or((0, 0))
            })
            .unwrap_or((0, 0));

        // Ties prefer the factorized product: same count, cheaper storage.
        let (witness, j_len) = if best_prod >= best_dom {
            (WitnessKind::ProductAt { u: best_u }, best_prod)
        } else {
            (WitnessKind::PerValue { rel: best_rel }, best_dom)
        };

        let witness_list = match witness {
            WitnessKind::PerValue { rel } => {
                let mut list = Vec::with_capacity(adj_x[rel].keys().len());
                for &v in adj_x[rel].keys() {
                    let u = adj_x[rel].list(v)[0];
                    let mut t: IdTuple = core::iter::repeat_n(0, k).collect();
                    t[rel] = v;
                    for (j, adj) in adj_y_all.iter().enumerate() {
                        if j != rel {
                            t[j] = adj.list(u)[0];
                        }
                    }
                    list.push(t);
                }
                list
            }
            WitnessKind::ProductAt { .. } => Vec::new(),
        };

        Ok(StarAlternate {
            k,
            adj_y_all,
            witness,
            witness_list,
            witness_u: best_u,
            j_len,
            op_constant: product_loop_op_constant(k),
            stats: JoinStats {
                input_size: input,
                full_join_size: out_join,
                projection_size_hint: None,
                degree_sorted: Vec::new(),
            },
        })
    }

    pub fn witness_kind(&self) -> &WitnessKind {
        &self.witness
    }

    /// The witness set size J.
    pub fn j_quantity(&self) -> u64 {
        self.j_len
    }

    pub fn stats(&self) -> &JoinStats {
        &self.stats
    }

    pub fn op_constant(&self) -> u64 {
        self.op_constant
    }

    /// `ceil(|OUT⋈| / J)`, the theorem-level delay bound.
    pub fn delay_bound(&self) -> u64 {
        ceil_div(self.stats.full_join_size.max(1), self.j_len.max(1))
    }

    pub fn enumerator(&self) -> Box<dyn Enumerator + '_> {
        let stored = match self.witness {
            WitnessKind::PerValue { .. } => StoredWitness::from_list(self.witness_list.clone()),
            WitnessKind::ProductAt { .. } => StoredWitness::from_product(
                self.adj_y_all
                    .iter()
                    .map(|adj| adj.list(self.witness_u))
                    .collect(),
            ),
        };
        let k = self.k;
        let adj = &self.adj_y_all;
        let keys: &[Vid] = adj.first().map(|a| a.keys()).unwrap_or(&[]);
        let full_join = ForEachValue::new(keys, move |u| {
            let lists: Vec<&[Vid]> = adj.iter().map(|a| a.list(u)).collect();
            NestedProduct::new(lists, (0..k).collect(), core::iter::repeat_n(0, k).collect())
        });
        let t_bound = self
            .op_constant
            .saturating_mul(self.stats.full_join_size.max(1));
        Box::new(DedupInterleave::new(stored, Box::new(full_join), t_bound))
    }
}
