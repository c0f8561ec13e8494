//! Semijoin reduction: remove every dangling tuple, leaving the unique
//! maximal sub-database in which each tuple participates in at least one
//! full join result. All three supported shapes are acyclic, so two
//! passes along a join tree suffice.

use alloc::vec;
use alloc::vec::Vec;

use crate::hash::Set;
use crate::query::QueryShape;
use crate::relation::{IdTuple, Relation, Vid};
use crate::Result;

/// Reduce `relations` under `shape`. Relations must already be validated
/// against the shape (count and arities).
pub fn full_reducer(relations: &[Relation], shape: QueryShape, domain: usize) -> Result<Vec<Relation>> {
    shape.validate(relations)?;
    Ok(match shape {
        QueryShape::Star { .. } => reduce_star(relations, domain),
        QueryShape::Path { .. } => reduce_path(relations, domain),
        QueryShape::LeftDeep { .. } => reduce_leftdeep(relations),
    })
}

/// Star relations in normal form `(x_i, y)`: a tuple survives iff its
/// `y` value occurs in every relation.
fn reduce_star(relations: &[Relation], domain: usize) -> Vec<Relation> {
    let mut alive = vec![true; domain + 1];
    for rel in relations {
        let mut present = vec![false; domain + 1];
        for t in rel.tuples() {
            present[t[1] as usize] = true;
        }
        for (a, p) in alive.iter_mut().zip(&present) {
            *a &= *p;
        }
    }
    relations
        .iter()
        .map(|rel| {
            rel.with_tuples(
                rel.tuples()
                    .iter()
                    .filter(|t| alive[t[1] as usize])
                    .cloned()
                    .collect(),
            )
        })
        .collect()
}

/// Chain `R_1(x_1,x_2), …, R_k(x_k,x_{k+1})`: one backward and one
/// forward pass over the chain.
fn reduce_path(relations: &[Relation], domain: usize) -> Vec<Relation> {
    let k = relations.len();
    // can[i][a]: a value `a` of x_{i+1} extends to the end of the chain.
    let mut can: Vec<Vec<bool>> = vec![vec![false; domain + 1]; k + 1];
    can[k] = vec![true; domain + 1];
    for i in (0..k).rev() {
        for t in relations[i].tuples() {
            if can[i + 1][t[1] as usize] {
                can[i][t[0] as usize] = true;
            }
        }
    }
    let mut from = can[0].clone();
    let mut out = Vec::with_capacity(k);
    for (i, rel) in relations.iter().enumerate() {
        let mut next_from = vec![false; domain + 1];
        let tuples: Vec<IdTuple> = rel
            .tuples()
            .iter()
            .filter(|t| from[t[0] as usize] && can[i + 1][t[1] as usize])
            .cloned()
            .collect();
        for t in &tuples {
            next_from[t[1] as usize] = true;
        }
        out.push(rel.with_tuples(tuples));
        from = next_from;
    }
    out
}

/// Left-deep chain, join tree `R_1 — R_2 — … — R_k`; edge `R_i — R_{i+1}`
/// joins on `(x_1..x_i)`. Upward pass filters by prefix presence in the
/// previous relation, downward pass by presence in the next.
fn reduce_leftdeep(relations: &[Relation]) -> Vec<Relation> {
    let k = relations.len();
    let mut reduced: Vec<Vec<IdTuple>> =
        relations.iter().map(|r| r.tuples().to_vec()).collect();

    // Upward: R_i keeps tuples whose (x_1..x_{i-1}) prefix appears in R_{i-1}.
    for i in 1..k {
        let prev: Set<IdTuple> = reduced[i - 1]
            .iter()
            .map(|t| prefix_of(t, i))
            .collect();
        reduced[i].retain(|t| prev.contains(&prefix_of(t, i)));
    }
    // Downward: R_i keeps tuples whose (x_1..x_i) prefix appears in R_{i+1}.
    for i in (0..k - 1).rev() {
        let next: Set<IdTuple> = reduced[i + 1]
            .iter()
            .map(|t| prefix_of(t, i + 1))
            .collect();
        reduced[i].retain(|t| next.contains(&prefix_of(t, i + 1)));
    }

    relations
        .iter()
        .zip(reduced)
        .map(|(rel, tuples)| rel.with_tuples(tuples))
        .collect()
}

/// First `len` join columns of a left-deep tuple `(w_i, x_1, …)`.
fn prefix_of(t: &IdTuple, len: usize) -> IdTuple {
    t[1..=len].iter().copied().collect()
}

/// True when some relation is empty; every shape short-circuits to an
/// empty result in that case.
pub fn any_empty(relations: &[Relation]) -> bool {
    relations.iter().any(|r| r.is_empty())
}

/// Convenience for callers that track the domain implicitly.
pub fn max_domain(relations: &[Relation]) -> usize {
    relations.iter().map(|r| r.max_id()).max().unwrap_or(0) as usize
}

#[allow(dead_code)]
fn _assert_vid_is_u32(v: Vid) -> u32 {
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::String;

    fn rel(name: &str, arity: usize, tuples: &[&[Vid]]) -> Relation {
        let schema: Vec<String> = (0..arity).map(|i| alloc::format!("c{i}")).collect();
        Relation::new(
            name,
            schema,
            tuples.iter().map(|t| IdTuple::from_slice(t)).collect(),
        )
    }

    #[test]
    fn star_no_overlap_empties_both() {
        // R = {(1,2)}, S = {(3,4)} as a two-path: star normal form (x,y), (z,y).
        let r = rel("r", 2, &[&[1, 2]]);
        let s = rel("s", 2, &[&[4, 3]]);
        let red = full_reducer(&[r, s], QueryShape::Star { k: 2 }, 4).unwrap();
        assert!(red[0].is_empty());
        assert!(red[1].is_empty());
    }

    #[test]
    fn star_drops_dangling() {
        let r = rel("r", 2, &[&[1, 2], &[5, 6]]);
        let s = rel("s", 2, &[&[3, 2]]);
        let red = full_reducer(&[r, s], QueryShape::Star { k: 2 }, 6).unwrap();
        assert_eq!(red[0].len(), 1);
        assert_eq!(red[0].tuples()[0].as_slice(), &[1, 2]);
        assert_eq!(red[1].len(), 1);
    }

    #[test]
    fn path_two_sided() {
        // 1 -> 2 -> 3 survives; 1 -> 9 (no continuation) and 8 -> 3 (no start... 8 is a start) cases:
        let r1 = rel("r1", 2, &[&[1, 2], &[1, 9]]);
        let r2 = rel("r2", 2, &[&[2, 3], &[7, 3]]);
        let red = full_reducer(&[r1, r2], QueryShape::Path { k: 2 }, 9).unwrap();
        assert_eq!(red[0].len(), 1);
        assert_eq!(red[0].tuples()[0].as_slice(), &[1, 2]);
        assert_eq!(red[1].len(), 1);
        assert_eq!(red[1].tuples()[0].as_slice(), &[2, 3]);
    }

    #[test]
    fn leftdeep_prefix_filtering() {
        // R1(w1, x1), R2(w2, x1, x2): R2 tuple with x1=9 dangles.
        let r1 = rel("r1", 2, &[&[1, 5]]);
        let r2 = rel("r2", 3, &[&[2, 5, 6], &[2, 9, 6]]);
        let red = full_reducer(&[r1, r2], QueryShape::LeftDeep { k: 2 }, 9).unwrap();
        assert_eq!(red[1].len(), 1);
        assert_eq!(red[1].tuples()[0].as_slice(), &[2, 5, 6]);
        assert_eq!(red[0].len(), 1);
    }
}
