//! Instance generators: the adversarial families used to separate the
//! delay bounds (a single high-degree hub, balanced bicliques, their
//! parameterized interpolation and the log-layered composite), plus
//! seeded uniform-random instances per query shape.

use std::collections::BTreeSet;

use qenum_core::RawRelation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GenError {
    #[error("d1 requires n to be a perfect square, got {0}")]
    NotSquare(u64),
    #[error("quadratic-family requires n to be a power of two >= 2, got {0}")]
    NotPowerOfTwo(u64),
    #[error("alpha must be in (0, 1), got {0}")]
    BadAlpha(f64),
    #[error("invalid parameter: {0}")]
    Invalid(&'static str),
}

/// What to generate.
#[derive(Debug, Clone, PartialEq)]
pub enum GenKind {
    /// One hub join value connected to `n` x's and `n` z's; full join n².
    D0 { n: u64 },
    /// √n × √n bicliques on both sides; full join n^{3/2}.
    D1 { n: u64 },
    /// Cross products of n^alpha x's × n^(1-alpha) y's (and z's alike).
    DAlpha { n: u64, alpha: f64 },
    /// Hub over n·log n values unioned with cross products at every
    /// power-of-two skew; full join Θ(|D|²).
    QuadraticFamily { n: u64 },
    /// Seeded uniform star relations.
    RandomStar {
        k: usize,
        tuples: usize,
        x_domain: u64,
        y_domain: u64,
        seed: u64,
    },
    /// Seeded left-deep relations over a shared join-prefix pool.
    RandomLeftDeep {
        k: usize,
        tuples: usize,
        w_domain: u64,
        prefix_pool: usize,
        seed: u64,
    },
    /// Seeded layered chain.
    RandomPath {
        k: usize,
        tuples: usize,
        level_domain: u64,
        seed: u64,
    },
}

fn pair_rel(name: &str, x: &str, y: &str, rows: Vec<(String, String)>) -> RawRelation<String> {
    RawRelation::new(
        name,
        vec![x.into(), y.into()],
        rows.into_iter().map(|(a, b)| vec![a, b]).collect(),
    )
}

/// Generate the relations for `kind`.
pub fn gen_instance(kind: &GenKind) -> Result<Vec<RawRelation<String>>, GenError> {
    match *kind {
        GenKind::D0 { n } => {
            let r = (0..n).map(|i| (format!("xh{i}"), "yh0".to_string())).collect();
            let s = (0..n).map(|i| ("yh0".to_string(), format!("zh{i}"))).collect();
            Ok(vec![pair_rel("r1", "x", "y", r), pair_rel("r2", "y", "z", s)])
        }
        GenKind::D1 { n } => {
            let g = (n as f64).sqrt().round() as u64;
            if g * g != n {
                return Err(GenError::NotSquare(n));
            }
            let mut r = Vec::new();
            let mut s = Vec::new();
            for i in 0..g {
                for j in 0..g {
                    r.push((format!("xb{i}"), format!("yb{j}")));
                    s.push((format!("yb{j}"), format!("zb{i}")));
                }
            }
            Ok(vec![pair_rel("r1", "x", "y", r), pair_rel("r2", "y", "z", s)])
        }
        GenKind::DAlpha { n, alpha } => {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(GenError::BadAlpha(alpha));
            }
            let nx = ((n as f64).powf(alpha).round() as u64).max(1);
            let ny = ((n as f64).powf(1.0 - alpha).round() as u64).max(1);
            let mut r = Vec::new();
            let mut s = Vec::new();
            for i in 0..nx {
                for j in 0..ny {
                    r.push((format!("xa{i}"), format!("ya{j}")));
                    s.push((format!("ya{j}"), format!("za{i}")));
                }
            }
            Ok(vec![pair_rel("r1", "x", "y", r), pair_rel("r2", "y", "z", s)])
        }
        GenKind::QuadraticFamily { n } => {
            if n < 2 || !n.is_power_of_two() {
                return Err(GenError::NotPowerOfTwo(n));
            }
            let logn = n.ilog2() as u64;
            let pool = n * logn;
            let mut r = Vec::new();
            let mut s = Vec::new();
            // Hub block: one join value over the whole x/z pool.
            for i in 0..pool {
                r.push((format!("xq{i}"), "yq*".to_string()));
                s.push(("yq*".to_string(), format!("zq{i}")));
            }
            // Cross-product block at every skew 2^i.
            for lvl in 1..=logn {
                let nx = 1u64 << lvl;
                let ny = n / nx;
                for j in 0..nx {
                    for l in 0..ny {
                        r.push((format!("xq{j}"), format!("yq{lvl}_{l}")));
                        s.push((format!("yq{lvl}_{l}"), format!("zq{j}")));
                    }
                }
            }
            Ok(vec![pair_rel("r1", "x", "y", r), pair_rel("r2", "y", "z", s)])
        }
        GenKind::RandomStar {
            k,
            tuples,
            x_domain,
            y_domain,
            seed,
        } => {
            if k < 2 || x_domain == 0 || y_domain == 0 {
                return Err(GenError::Invalid("star needs k >= 2 and nonzero domains"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rels = Vec::new();
            for i in 0..k {
                let rows = random_pairs(&mut rng, tuples, x_domain, y_domain)
                    .into_iter()
                    .map(|(a, b)| (format!("x{i}_{a}"), format!("y{b}")))
                    .collect();
                rels.push(pair_rel(
                    &format!("r{}", i + 1),
                    &format!("x{i}"),
                    "y",
                    rows,
                ));
            }
            Ok(rels)
        }
        GenKind::RandomLeftDeep {
            k,
            tuples,
            w_domain,
            prefix_pool,
            seed,
        } => {
            if k < 1 || w_domain == 0 || prefix_pool == 0 {
                return Err(GenError::Invalid("left-deep needs nonzero parameters"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pool: Vec<Vec<u64>> = {
                let mut set = BTreeSet::new();
                while set.len() < prefix_pool {
                    set.insert((0..k).map(|_| rng.gen_range(0..4u64)).collect::<Vec<_>>());
                }
                set.into_iter().collect()
            };
            let mut rels = Vec::new();
            for i in 0..k {
                let mut rows = BTreeSet::new();
                for _ in 0..tuples {
                    let w = rng.gen_range(0..w_domain);
                    let xs = &pool[rng.gen_range(0..pool.len())];
                    let mut row = vec![format!("w{i}_{w}")];
                    row.extend((0..=i).map(|lvl| format!("x{lvl}_{}", xs[lvl])));
                    rows.insert(row);
                }
                let mut schema = vec![format!("w{i}")];
                schema.extend((0..=i).map(|lvl| format!("x{lvl}")));
                rels.push(RawRelation::new(
                    format!("r{}", i + 1),
                    schema,
                    rows.into_iter().collect(),
                ));
            }
            Ok(rels)
        }
        GenKind::RandomPath {
            k,
            tuples,
            level_domain,
            seed,
        } => {
            if k < 2 || level_domain == 0 {
                return Err(GenError::Invalid("path needs k >= 2 and a nonzero domain"));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut rels = Vec::new();
            for i in 0..k {
                let rows = random_pairs(&mut rng, tuples, level_domain, level_domain)
                    .into_iter()
                    .map(|(a, b)| (format!("v{i}_{a}"), format!("v{}_{b}", i + 1)))
                    .collect();
                rels.push(pair_rel(
                    &format!("r{}", i + 1),
                    &format!("x{}", i + 1),
                    &format!("x{}", i + 2),
                    rows,
                ));
            }
            Ok(rels)
        }
    }
}

fn random_pairs(rng: &mut ChaCha8Rng, n: usize, da: u64, db: u64) -> Vec<(u64, u64)> {
    let cap = (da * db) as usize;
    let want = n.min(cap);
    let mut set = BTreeSet::new();
    while set.len() < want {
        set.insert((rng.gen_range(0..da), rng.gen_range(0..db)));
    }
    set.into_iter().collect()
}

/// Merge two instances relation-wise (rows concatenated, duplicates
/// collapse downstream). Relation counts must match.
pub fn union_instances(
    mut a: Vec<RawRelation<String>>,
    b: Vec<RawRelation<String>>,
) -> Vec<RawRelation<String>> {
    for (ra, rb) in a.iter_mut().zip(b) {
        ra.rows.extend(rb.rows);
    }
    a
}

/// Exact full join size of the closed-form families.
pub fn expected_full_join(kind: &GenKind) -> Option<u64> {
    match *kind {
        GenKind::D0 { n } => Some(n * n),
        GenKind::D1 { n } => {
            let g = (n as f64).sqrt().round() as u64;
            Some(g * g * g)
        }
        GenKind::DAlpha { n, alpha } => {
            let nx = ((n as f64).powf(alpha).round() as u64).max(1);
            let ny = ((n as f64).powf(1.0 - alpha).round() as u64).max(1);
            Some(ny * nx * nx)
        }
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn d0_shape_and_size() {
        let rels = gen_instance(&GenKind::D0 { n: 4 }).unwrap();
        assert_eq!(rels[0].rows.len(), 4);
        assert_eq!(rels[1].rows.len(), 4);
        // all rows share one join value
        let ys: BTreeSet<_> = rels[0].rows.iter().map(|r| r[1].clone()).collect();
        assert_eq!(ys.len(), 1);
        assert_eq!(expected_full_join(&GenKind::D0 { n: 4 }), Some(16));
    }

    #[test]
    fn d1_shape_and_size() {
        let rels = gen_instance(&GenKind::D1 { n: 4 }).unwrap();
        assert_eq!(rels[0].rows.len(), 4);
        assert_eq!(expected_full_join(&GenKind::D1 { n: 4 }), Some(8));
        assert!(gen_instance(&GenKind::D1 { n: 5 }).is_err());
    }

    #[test]
    fn quadratic_family_validates() {
        assert!(gen_instance(&GenKind::QuadraticFamily { n: 6 }).is_err());
        let rels = gen_instance(&GenKind::QuadraticFamily { n: 8 }).unwrap();
        // |R| = n log n (hub) + n log n (cross blocks)
        assert_eq!(rels[0].rows.len(), 48);
    }

    #[test]
    fn random_star_is_deterministic() {
        let kind = GenKind::RandomStar {
            k: 3,
            tuples: 40,
            x_domain: 10,
            y_domain: 8,
            seed: 7,
        };
        assert_eq!(gen_instance(&kind).unwrap(), gen_instance(&kind).unwrap());
    }
}
