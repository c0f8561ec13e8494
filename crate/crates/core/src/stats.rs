//! Input statistics driving every threshold choice: linear-time full
//! join size, degree-ordered value lists (count sort) and the prefix-sum
//! split point that separates low- from high-degree values.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::query::QueryShape;
use crate::relation::{Relation, Vid};
use crate::Result;

/// Per-instance statistics. `full_join_size` is the size of the join
/// without projection, computed without materializing it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinStats {
    pub input_size: u64,
    pub full_join_size: u64,
    pub projection_size_hint: Option<u64>,
    pub degree_sorted: Vec<DegreeOrder>,
}

/// A degree-sorted value list for one attribute of one relation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DegreeOrder {
    pub relation: String,
    pub attr: String,
    pub values: Vec<Vid>,
}

/// The prefix/suffix split of a degree-ordered value list: `i_star` is
/// the smallest count of low-degree values whose total join contribution
/// reaches at least the remaining values' total.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitPoint {
    pub i_star: usize,
    pub j_light: u64,
    pub j_heavy: u64,
}

/// Sort the ids with nonzero degree by ascending degree, ties by
/// ascending id. Runs in O(domain + max_degree) using count sort; no
/// comparison sort is involved.
pub fn count_sort_by_degree(degrees: &[u32]) -> Vec<Vid> {
    let max_deg = degrees.iter().copied().max().unwrap_or(0) as usize;
    if max_deg == 0 {
        return Vec::new();
    }
    let mut counts = vec![0usize; max_deg + 1];
    let mut present = 0usize;
    for &d in degrees {
        if d > 0 {
            counts[d as usize] += 1;
            present += 1;
        }
    }
    let mut offsets = vec![0usize; max_deg + 1];
    let mut acc = 0usize;
    for d in 1..=max_deg {
        offsets[d] = acc;
        acc += counts[d];
    }
    let mut out = vec![0 as Vid; present];
    // Ascending id scan keeps the placement stable, which yields the
    // ascending-id tie-break within equal degrees.
    for (id, &d) in degrees.iter().enumerate() {
        if d > 0 {
            out[offsets[d as usize]] = id as Vid;
            offsets[d as usize] += 1;
        }
    }
    out
}

/// Smallest `i_star` with `sum(contribs[..i_star]) >= sum(contribs[i_star..])`,
/// found in one prefix-sum pass.
pub fn find_split_index(contribs: &[u64]) -> SplitPoint {
    let total: u64 = contribs.iter().sum();
    let mut prefix = 0u64;
    for (i, &c) in contribs.iter().enumerate() {
        prefix += c;
        let suffix = total - prefix;
        if prefix >= suffix {
            return SplitPoint {
                i_star: i + 1,
                j_light: prefix,
                j_heavy: suffix,
            };
        }
    }
    SplitPoint {
        i_star: contribs.len(),
        j_light: total,
        j_heavy: 0,
    }
}

/// |OUT⋈| in O(|D|) index operations, per shape.
///
/// * star (normal form `(x_i, y)`): `Σ_y Π_i deg_i(y)`,
/// * path: suffix completion counts folded right to left,
/// * left-deep: `Σ_{u ∈ R_k} Π_{i<k} deg_i(prefix_i(u))`.
pub fn full_join_size(relations: &[Relation], shape: QueryShape, domain: usize) -> Result<u64> {
    shape.validate(relations)?;
    Ok(match shape {
        QueryShape::Star { .. } => {
            let degs: Vec<Vec<u32>> = relations.iter().map(|r| r.degrees(1, domain)).collect();
            let mut total = 0u64;
            for y in 1..=domain {
                let mut prod = 1u64;
                for d in &degs {
                    prod = prod.saturating_mul(d[y] as u64);
                    if prod == 0 {
                        break;
                    }
                }
                total = total.saturating_add(prod);
            }
            total
        }
        QueryShape::Path { k } => {
            // completions[a] = number of full suffix paths from a value of x_{i+1}.
            let mut completions = vec![1u64; domain + 1];
            for i in (1..k).rev() {
                let mut next = vec![0u64; domain + 1];
                for t in relations[i].tuples() {
                    next[t[0] as usize] =
                        next[t[0] as usize].saturating_add(completions[t[1] as usize]);
                }
                completions = next;
            }
            relations[0]
                .tuples()
                .iter()
                .fold(0u64, |acc, t| acc.saturating_add(completions[t[1] as usize]))
        }
        QueryShape::LeftDeep { k } => {
            let idx: Vec<_> = (0..k - 1)
                .map(|i| {
                    let key_cols: Vec<usize> = (1..=i + 1).collect();
                    relations[i].prefix_index(&key_cols, 0)
                })
                .collect();
            let mut total = 0u64;
            for t in relations[k - 1].tuples() {
                let mut prod = 1u64;
                for (i, pidx) in idx.iter().enumerate() {
                    let key = &t[1..=i + 1];
                    prod = prod.saturating_mul(pidx.degree(key) as u64);
                    if prod == 0 {
                        break;
                    }
                }
                total = total.saturating_add(prod);
            }
            total
        }
    })
}

pub fn input_size(relations: &[Relation]) -> u64 {
    relations.iter().map(|r| r.len() as u64).sum()
}

impl JoinStats {
    pub fn compute(relations: &[Relation], shape: QueryShape, domain: usize) -> Result<JoinStats> {
        Ok(JoinStats {
            input_size: input_size(relations),
            full_join_size: full_join_size(relations, shape, domain)?,
            projection_size_hint: None,
            degree_sorted: Vec::new(),
        })
    }
}

/// Smallest positive integer `t` with `t^exp * denom >= num`; the exact
/// ceiling of `(num / denom)^(1/exp)` without floating point.
pub fn ceil_root_of_ratio(num: u128, denom: u128, exp: u32) -> u64 {
    assert!(denom > 0 && exp > 0);
    let mut lo = 1u128;
    let mut hi = 2u128;
    while pow_saturating(hi, exp).saturating_mul(denom) < num {
        hi *= 2;
    }
    while lo < hi {
        let mid = (lo + hi) / 2;
        if pow_saturating(mid, exp).saturating_mul(denom) >= num {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo as u64
}

fn pow_saturating(base: u128, exp: u32) -> u128 {
    let mut acc = 1u128;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// `ceil(num / denom)`, with zero denominators mapped to `num`.
pub fn ceil_div(num: u64, denom: u64) -> u64 {
    if denom == 0 {
        num
    } else {
        num.div_ceil(denom)
    }
}
