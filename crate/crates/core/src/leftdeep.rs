//! Left-deep hierarchical query enumeration.
//!
//! `π_{w_1..w_k}(R_1(w_1,x_1) ⋈ R_2(w_2,x_1,x_2) ⋈ … ⋈ R_k(w_k,x_1..x_k))`
//! with delay proportional to `|D|^k / |OUT⋈|`. Low-degree `w_k`
//! valuations enumerate by merging at most δ per-tuple factorized
//! cartesian products in lexicographic `(w_1..w_{k-1})` order; the
//! high-degree valuations' full join is computed on the fly and
//! interleaved in.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use crate::enumerate::{Enumerator, NestedProduct, Scan};
use crate::interleave::{InterleavePlan, InterleaveUnion};
use crate::loops::{BuildMerge, ChildSource, DedupProductLoop, ForEachValue, ProductStream};
use crate::query::LeftDeepQuery;
use crate::relation::{IdTuple, PrefixIndex, Vid};
use crate::stats::{count_sort_by_degree, DegreeOrder, JoinStats};
use crate::Result;

/// A preprocessed left-deep instance.
pub struct LeftDeep {
    k: usize,
    delta: u64,
    /// `prefix[i]` indexes relation `i` by its join columns `(x_1..x_{i+1})`,
    /// listing the `w_{i+1}` values.
    prefix: Vec<PrefixIndex>,
    /// Per `w_k` value: its join-column vectors, lexicographically sorted.
    rows_k: Vec<Vec<IdTuple>>,
    /// Light `w_k` values in ascending degree order.
    light_vals: Vec<Vid>,
    /// Heavy `w_k` values in ascending id order.
    heavy_vals: Vec<Vid>,
    qh_size: u64,
    op_constant: u64,
    stats: JoinStats,
    bypass: Option<Vec<IdTuple>>,
}

impl LeftDeep {
    /// Preprocess a reduced, compressed left-deep query.
    pub fn preprocess(q: &LeftDeepQuery, domain: usize) -> Result<LeftDeep> {
        let k = q.k();
        let input = q.input_size();
        let out_join = crate::stats::full_join_size(
            &q.relations,
            crate::QueryShape::LeftDeep { k },
            domain,
        )?;
        // Smallest integer with delta * |OUT| >= 2 |D|^k.
        let delta = ceil_div_u128(
            2u128.saturating_mul(pow_u128(input as u128, k as u32)),
            out_join.max(1) as u128,
        );

        let prefix: Vec<PrefixIndex> = (0..k)
            .map(|i| {
                let key_cols: Vec<usize> = (1..=i + 1).collect();
                q.relations[i].prefix_index(&key_cols, 0)
            })
            .collect();
        let rows_k = q.relations[k - 1].group_rows(0, domain);
        let deg_wk = q.relations[k - 1].degrees(0, domain);
        let order = count_sort_by_degree(&deg_wk);
        let light_vals: Vec<Vid> = order
            .iter()
            .copied()
            .take_while(|&v| deg_wk[v as usize] as u64 <= delta)
            .collect();
        let heavy_vals: Vec<Vid> = (1..=domain as Vid)
            .filter(|&v| deg_wk[v as usize] as u64 > delta)
            .collect();

        let product_size = |u: &IdTuple| -> u64 {
            (0..k - 1).fold(1u64, |acc, i| {
                acc.saturating_mul(prefix[i].degree(&u[0..=i]) as u64)
            })
        };
        let qh_size: u64 = heavy_vals
            .iter()
            .flat_map(|&v| rows_k[v as usize].iter())
            .map(product_size)
            .fold(0u64, |acc, p| acc.saturating_add(p));

        let mut stats = JoinStats {
            input_size: input,
            full_join_size: out_join,
            projection_size_hint: None,
            degree_sorted: alloc::vec![DegreeOrder {
                relation: q.relations[k - 1].name().into(),
                attr: q.relations[k - 1].schema()[0].clone(),
                values: order,
            }],
        };

        let bypass = if out_join < 2 * input || input == 0 {
            let mut materialized = Vec::new();
            for &v in stats.degree_sorted[0].values.iter() {
                let mut per_v: BTreeSet<IdTuple> = BTreeSet::new();
                for u in &rows_k[v as usize] {
                    let lists: Vec<&[Vid]> =
                        (0..k - 1).map(|i| prefix[i].list(&u[0..=i])).collect();
                    collect_product(&lists, v, &mut per_v);
                }
                materialized.extend(per_v);
            }
            stats.projection_size_hint = Some(materialized.len() as u64);
            Some(materialized)
        } else {
            None
        };

        Ok(LeftDeep {
            k,
            delta,
            prefix,
            rows_k,
            light_vals,
            heavy_vals,
            qh_size,
            op_constant: crate::star::product_loop_op_constant(k),
            stats,
            bypass,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The light/heavy degree threshold `ceil(2 |D|^k / |OUT⋈|)`.
    pub fn delta(&self) -> u64 {
        self.delta
    }

    /// Full join size of the heavy-valuation subquery.
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

    /// `ceil(|D|^k / |OUT⋈|)`, the theorem-level delay bound.
    pub fn delay_bound(&self) -> u64 {
        ceil_div_u128(
            pow_u128(self.stats.input_size as u128, self.k as u32),
            self.stats.full_join_size.max(1) as u128,
        )
        .max(1)
    }

    /// The factorized cartesian product of one `R_k` tuple: emits
    /// `(w_1, …, w_{k-1})` in lexicographic order with O(1) gaps.
    pub fn per_u_cartesian(&self, u: &IdTuple) -> NestedProduct<'_> {
        let lists: Vec<&[Vid]> = (0..self.k - 1)
            .map(|i| self.prefix[i].list(&u[0..=i]))
            .collect();
        debug_assert!(
            lists.iter().all(|l| !l.is_empty()),
            "reduced relations leave no empty factor"
        );
        NestedProduct::new(
            lists,
            (0..self.k - 1).collect(),
            core::iter::repeat_n(0, self.k - 1).collect(),
        )
    }

    fn per_u_with_wk(&self, u: &IdTuple, wk: Vid) -> NestedProduct<'_> {
        let lists: Vec<&[Vid]> = (0..self.k - 1)
            .map(|i| self.prefix[i].list(&u[0..=i]))
            .collect();
        debug_assert!(lists.iter().all(|l| !l.is_empty()));
        let mut template: IdTuple = core::iter::repeat_n(0, self.k).collect();
        template[self.k - 1] = wk;
        NestedProduct::new(lists, (0..self.k - 1).collect(), template)
    }

    pub fn enumerator(&self) -> Result<Box<dyn Enumerator + '_>> {
        if let Some(m) = &self.bypass {
            return Ok(Box::new(Scan::from_slice(m)));
        }
        let light = ForEachValue::new(self.light_vals.as_slice(), move |v| {
            BuildMerge::new(RowSource {
                ld: self,
                v,
                rows: &self.rows_k[v as usize],
            })
        });
        let heavy = DedupProductLoop::new(HeavyRowStream {
            ld: self,
            vi: 0,
            ui: 0,
        });
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

fn ceil_div_u128(num: u128, denom: u128) -> u64 {
    num.div_ceil(denom.max(1)).min(u64::MAX as u128) as u64
}

fn collect_product(lists: &[&[Vid]], wk: Vid, into: &mut BTreeSet<IdTuple>) {
    if lists.iter().any(|l| l.is_empty()) {
        return;
    }
    let mut idx = alloc::vec![0usize; lists.len()];
    loop {
        let mut t: IdTuple = idx.iter().zip(lists).map(|(&i, l)| l[i]).collect();
        t.push(wk);
        into.insert(t);
        let mut level = lists.len();
        loop {
            if level == 0 {
                return;
            }
            level -= 1;
            idx[level] += 1;
            if idx[level] < lists[level].len() {
                break;
            }
            idx[level] = 0;
        }
    }
}

/// Children for one light `w_k` valuation: the factorized products of
/// its tuples.
struct RowSource<'a> {
    ld: &'a LeftDeep,
    v: Vid,
    rows: &'a [IdTuple],
}

impl<'a> ChildSource<'a> for RowSource<'a> {
    type Child = NestedProduct<'a>;

    fn total(&self) -> usize {
        self.rows.len()
    }

    fn make(&mut self, j: usize) -> Option<NestedProduct<'a>> {
        Some(self.ld.per_u_with_wk(&self.rows[j], self.v))
    }
}

/// Full join of the heavy valuations, one product per `R_k` tuple.
struct HeavyRowStream<'a> {
    ld: &'a LeftDeep,
    vi: usize,
    ui: usize,
}

impl<'a> ProductStream<'a> for HeavyRowStream<'a> {
    fn next(&mut self) -> Option<Option<NestedProduct<'a>>> {
        loop {
            if self.vi >= self.ld.heavy_vals.len() {
                return None;
            }
            let v = self.ld.heavy_vals[self.vi];
            let rows = &self.ld.rows_k[v as usize];
            if self.ui >= rows.len() {
                self.vi += 1;
                self.ui = 0;
                continue;
            }
            let u = &rows[self.ui];
            self.ui += 1;
            return Some(Some(self.ld.per_u_with_wk(u, v)));
        }
    }
}
