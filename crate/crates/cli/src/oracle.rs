//! Reference semantics: materialize the full join with plain nested
//! loops over BTree-grouped tuples, project, deduplicate. Shares no
//! index or enumeration machinery with the library, so it can arbitrate
//! every algorithm's output.

use std::collections::{BTreeMap, BTreeSet};

use qenum_core::{QueryShape, Relation, Vid};
use thiserror::Error;

/// Hard cap on materialized full-join tuples.
pub const ORACLE_GUARD: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("full join too large to materialize: estimated {estimate} tuples (guard {ORACLE_GUARD})")]
    TooLarge { estimate: u64 },
    #[error("oracle shape mismatch: {0}")]
    Shape(String),
}

/// Projected result set plus the exact sizes the delay formulas need.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub projected: BTreeSet<Vec<Vid>>,
    pub full_join: u64,
    pub projection: u64,
}

/// Full-join, project, deduplicate. Star relations must be in normal
/// form `(x_i, y)`; outputs are `(x_1..x_k)`, `(w_1..w_k)` or
/// `(x_1, x_{k+1})` respectively.
pub fn oracle_project_join(
    shape: QueryShape,
    relations: &[Relation],
) -> Result<OracleResult, OracleError> {
    shape
        .validate(relations)
        .map_err(|e| OracleError::Shape(e.to_string()))?;
    let estimate = estimate_full_join(shape, relations);
    if estimate > ORACLE_GUARD {
        return Err(OracleError::TooLarge { estimate });
    }
    let (projected, full_join) = match shape {
        QueryShape::Star { .. } => star_join(relations),
        QueryShape::Path { .. } => path_join(relations),
        QueryShape::LeftDeep { .. } => leftdeep_join(relations),
    };
    Ok(OracleResult {
        projection: projected.len() as u64,
        projected,
        full_join,
    })
}

/// Cheap upper estimate used only for the guard.
fn estimate_full_join(shape: QueryShape, relations: &[Relation]) -> u64 {
    match shape {
        QueryShape::Star { .. } => {
            let mut per_y: BTreeMap<Vid, u64> = BTreeMap::new();
            for t in relations[0].tuples() {
                *per_y.entry(t[1]).or_default() += 1;
            }
            let mut total = 0u64;
            for (&y, &d0) in &per_y {
                let mut prod = d0;
                for r in &relations[1..] {
                    let d = r.tuples().iter().filter(|t| t[1] == y).count() as u64;
                    prod = prod.saturating_mul(d);
                }
                total = total.saturating_add(prod);
            }
            total
        }
        QueryShape::Path { k } => {
            let mut counts: BTreeMap<Vid, u64> =
                relations[k - 1].tuples().iter().fold(BTreeMap::new(), |mut m, t| {
                    *m.entry(t[0]).or_default() += 1;
                    m
                });
            for r in relations[..k - 1].iter().rev() {
                let mut next: BTreeMap<Vid, u64> = BTreeMap::new();
                for t in r.tuples() {
                    let c = counts.get(&t[1]).copied().unwrap_or(0);
                    *next.entry(t[0]).or_default() += c;
                }
                counts = next;
            }
            counts.values().fold(0u64, |a, &b| a.saturating_add(b))
        }
        QueryShape::LeftDeep { k } => {
            let mut total = 0u64;
            for anchor in relations[k - 1].tuples() {
                let mut prod = 1u64;
                for (i, r) in relations[..k - 1].iter().enumerate() {
                    let d = r
                        .tuples()
                        .iter()
                        .filter(|t| t[1..] == anchor[1..=i + 1])
                        .count() as u64;
                    prod = prod.saturating_mul(d);
                }
                total = total.saturating_add(prod);
            }
            total
        }
    }
}

fn product_rec(
    lists: &[&Vec<Vid>],
    acc: &mut Vec<Vid>,
    out: &mut BTreeSet<Vec<Vid>>,
    full: &mut u64,
) {
    match lists.split_first() {
        None => {
            *full += 1;
            out.insert(acc.clone());
        }
        Some((first, rest)) => {
            for &v in *first {
                acc.push(v);
                product_rec(rest, acc, out, full);
                acc.pop();
            }
        }
    }
}

fn star_join(relations: &[Relation]) -> (BTreeSet<Vec<Vid>>, u64) {
    let groups: Vec<BTreeMap<Vid, Vec<Vid>>> = relations
        .iter()
        .map(|r| {
            let mut g: BTreeMap<Vid, Vec<Vid>> = BTreeMap::new();
            for t in r.tuples() {
                g.entry(t[1]).or_default().push(t[0]);
            }
            g
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut full = 0u64;
    let ys: BTreeSet<Vid> = groups.iter().flat_map(|g| g.keys().copied()).collect();
    for y in ys {
        let lists: Option<Vec<&Vec<Vid>>> = groups.iter().map(|g| g.get(&y)).collect();
        if let Some(lists) = lists {
            product_rec(&lists, &mut Vec::new(), &mut out, &mut full);
        }
    }
    (out, full)
}

fn path_join(relations: &[Relation]) -> (BTreeSet<Vec<Vid>>, u64) {
    let adjs: Vec<BTreeMap<Vid, Vec<Vid>>> = relations
        .iter()
        .map(|r| {
            let mut g: BTreeMap<Vid, Vec<Vid>> = BTreeMap::new();
            for t in r.tuples() {
                g.entry(t[0]).or_default().push(t[1]);
            }
            g
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut full = 0u64;
    fn walk(
        adjs: &[BTreeMap<Vid, Vec<Vid>>],
        level: usize,
        start: Vid,
        at: Vid,
        out: &mut BTreeSet<Vec<Vid>>,
        full: &mut u64,
    ) {
        if level == adjs.len() {
            *full += 1;
            out.insert(vec![start, at]);
            return;
        }
        if let Some(next) = adjs[level].get(&at) {
            for &b in next {
                walk(adjs, level + 1, start, b, out, full);
            }
        }
    }
    for (&a, bs) in &adjs[0] {
        for &b in bs {
            walk(&adjs, 1, a, b, &mut out, &mut full);
        }
    }
    (out, full)
}

fn leftdeep_join(relations: &[Relation]) -> (BTreeSet<Vec<Vid>>, u64) {
    let k = relations.len();
    let prefix_groups: Vec<BTreeMap<Vec<Vid>, Vec<Vid>>> = relations[..k - 1]
        .iter()
        .map(|r| {
            let mut g: BTreeMap<Vec<Vid>, Vec<Vid>> = BTreeMap::new();
            for t in r.tuples() {
                g.entry(t[1..].to_vec()).or_default().push(t[0]);
            }
            g
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut full = 0u64;
    for anchor in relations[k - 1].tuples() {
        let lists: Option<Vec<&Vec<Vid>>> = prefix_groups
            .iter()
            .enumerate()
            .map(|(i, g)| g.get(&anchor[1..=i + 1].to_vec()))
            .collect();
        let Some(lists) = lists else { continue };
        let mut local = BTreeSet::new();
        product_rec(&lists, &mut Vec::new(), &mut local, &mut full);
        for mut t in local {
            t.push(anchor[0]);
            out.insert(t);
        }
    }
    (out, full)
}

#[cfg(test)]
mod tests {
    use super::*;
    use qenum_core::IdTuple;

    fn rel(name: &str, arity: usize, tuples: &[&[Vid]]) -> Relation {
        let schema = (0..arity).map(|i| format!("c{i}")).collect();
        Relation::new(
            name,
            schema,
            tuples.iter().map(|t| IdTuple::from_slice(t)).collect(),
        )
    }

    #[test]
    fn running_example_counts() {
        // Normal form of the running two-path example: R(x,y), S(z,y).
        let r = rel("r", 2, &[&[1, 2], &[1, 3], &[1, 4], &[5, 2]]);
        let s = rel("s", 2, &[&[6, 2], &[7, 2], &[7, 3], &[8, 4]]);
        let res = oracle_project_join(QueryShape::Star { k: 2 }, &[r, s]).unwrap();
        assert_eq!(res.full_join, 6);
        assert_eq!(res.projection, 5);
    }

    #[test]
    fn empty_relation_empty_output() {
        let r = rel("r", 2, &[&[1, 2]]);
        let s = rel("s", 2, &[]);
        let res = oracle_project_join(QueryShape::Star { k: 2 }, &[r, s]).unwrap();
        assert_eq!(res.full_join, 0);
        assert!(res.projected.is_empty());
    }

    #[test]
    fn guard_rejects_blowup() {
        // Hub instance with 4000 x 4000 = 16M join results.
        let n = 4000;
        let r_rows: Vec<Vec<Vid>> = (0..n).map(|i| vec![2 + i, 1]).collect();
        let s_rows: Vec<Vec<Vid>> = (0..n).map(|i| vec![5000 + i, 1]).collect();
        let r = Relation::new(
            "r",
            vec!["x".into(), "y".into()],
            r_rows.iter().map(|t| IdTuple::from_slice(t)).collect(),
        );
        let s = Relation::new(
            "s",
            vec!["z".into(), "y".into()],
            s_rows.iter().map(|t| IdTuple::from_slice(t)).collect(),
        );
        let err = oracle_project_join(QueryShape::Star { k: 2 }, &[r, s]).unwrap_err();
        assert!(matches!(err, OracleError::TooLarge { .. }));
    }
}
