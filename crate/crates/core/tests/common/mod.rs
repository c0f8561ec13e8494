//! Brute-force reference semantics and instance helpers shared by the
//! integration tests. Deliberately index-free: plain tuple scans and
//! BTree grouping, so the oracle shares no code path with the library.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use qenum_core::{IdTuple, Relation, Vid};
use rand::Rng;

pub fn rel(name: &str, arity: usize, tuples: Vec<Vec<Vid>>) -> Relation {
    let schema = (0..arity).map(|i| format!("c{i}")).collect();
    Relation::new(
        name,
        schema,
        tuples.iter().map(|t| IdTuple::from_slice(t)).collect(),
    )
}

/// Full join + projection of a star query in normal form `(x_i, y)`.
/// Returns (projected set, full join size).
pub fn brute_star(rels: &[Relation]) -> (BTreeSet<Vec<Vid>>, u64) {
    let groups: Vec<BTreeMap<Vid, Vec<Vid>>> = rels
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
    fn rec(
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
                    rec(rest, acc, out, full);
                    acc.pop();
                }
            }
        }
    }
    let ys: BTreeSet<Vid> = groups.iter().flat_map(|g| g.keys().copied()).collect();
    for y in ys {
        let lists: Option<Vec<&Vec<Vid>>> = groups.iter().map(|g| g.get(&y)).collect();
        let Some(lists) = lists else { continue };
        rec(&lists, &mut Vec::new(), &mut out, &mut full);
    }
    (out, full)
}

/// Endpoint pairs + full join size of a path query.
pub fn brute_path(rels: &[Relation]) -> (BTreeSet<Vec<Vid>>, u64) {
    let mut out = BTreeSet::new();
    let mut full = 0u64;
    fn walk(
        rels: &[Relation],
        level: usize,
        start: Vid,
        at: Vid,
        out: &mut BTreeSet<Vec<Vid>>,
        full: &mut u64,
    ) {
        if level == rels.len() {
            *full += 1;
            out.insert(vec![start, at]);
            return;
        }
        for t in rels[level].tuples() {
            if t[0] == at {
                walk(rels, level + 1, start, t[1], out, full);
            }
        }
    }
    for t in rels[0].tuples() {
        walk(rels, 1, t[0], t[1], &mut out, &mut full);
    }
    (out, full)
}

/// Projection + full join size of a left-deep query.
pub fn brute_leftdeep(rels: &[Relation]) -> (BTreeSet<Vec<Vid>>, u64) {
    let k = rels.len();
    let mut out = BTreeSet::new();
    let mut full = 0u64;
    fn walk(
        rels: &[Relation],
        level: usize,
        anchor: &IdTuple,
        ws: &mut Vec<Vid>,
        out: &mut BTreeSet<Vec<Vid>>,
        full: &mut u64,
    ) {
        if level == rels.len() - 1 {
            *full += 1;
            let mut t: Vec<Vid> = ws.clone();
            t.push(anchor[0]);
            out.insert(t);
            return;
        }
        for t in rels[level].tuples() {
            if t[1..] == anchor[1..=level + 1] {
                ws.push(t[0]);
                walk(rels, level + 1, anchor, ws, out, full);
                ws.pop();
            }
        }
    }
    for anchor in rels[k - 1].tuples() {
        walk(rels, 0, anchor, &mut Vec::new(), &mut out, &mut full);
    }
    (out, full)
}

/// A tuple survives reduction iff it appears in some full join result.
pub fn brute_participating_star(rels: &[Relation]) -> Vec<BTreeSet<IdTuple>> {
    let groups: Vec<BTreeMap<Vid, Vec<Vid>>> = rels
        .iter()
        .map(|r| {
            let mut g: BTreeMap<Vid, Vec<Vid>> = BTreeMap::new();
            for t in r.tuples() {
                g.entry(t[1]).or_default().push(t[0]);
            }
            g
        })
        .collect();
    let mut keep: Vec<BTreeSet<IdTuple>> = vec![BTreeSet::new(); rels.len()];
    let ys: BTreeSet<Vid> = groups.iter().flat_map(|g| g.keys().copied()).collect();
    for y in ys {
        if groups.iter().all(|g| g.contains_key(&y)) {
            for (i, g) in groups.iter().enumerate() {
                for &x in &g[&y] {
                    keep[i].insert(IdTuple::from_slice(&[x, y]));
                }
            }
        }
    }
    keep
}

/// Sorted projected tuples of enumerator output, for set comparison.
pub fn as_set(tuples: &[IdTuple]) -> BTreeSet<Vec<Vid>> {
    tuples.iter().map(|t| t.to_vec()).collect()
}

pub fn assert_no_duplicates(tuples: &[IdTuple]) {
    let set: BTreeSet<&IdTuple> = tuples.iter().collect();
    assert_eq!(set.len(), tuples.len(), "enumerator emitted a duplicate");
}

/// Uniform random binary relation with `n` distinct tuples over
/// `xs × ys` (id offsets keep attribute domains disjoint).
pub fn random_pairs(
    rng: &mut impl Rng,
    n: usize,
    x_lo: Vid,
    x_hi: Vid,
    y_lo: Vid,
    y_hi: Vid,
) -> Vec<Vec<Vid>> {
    let mut set = BTreeSet::new();
    let cap = ((x_hi - x_lo + 1) as usize) * ((y_hi - y_lo + 1) as usize);
    let want = n.min(cap);
    while set.len() < want {
        let x = rng.gen_range(x_lo..=x_hi);
        let y = rng.gen_range(y_lo..=y_hi);
        set.insert(vec![x, y]);
    }
    set.into_iter().collect()
}
