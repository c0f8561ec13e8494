//! Preprocessing-primitive properties: compression round-trips and
//! preserves degrees, the reducer matches brute-force participation,
//! linear join counting matches the materialized count, count sort
//! matches a comparison sort, and split points survive an exhaustive
//! scan of all candidate indices.

mod common;

use std::collections::BTreeSet;

use common::{brute_participating_star, brute_star, random_pairs, rel};
use proptest::prelude::*;
use qenum_core::reduce::full_reducer;
use qenum_core::stats::{count_sort_by_degree, find_split_index, full_join_size};
use qenum_core::{DomainMap, QueryShape, RawRelation, Vid};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn raw(name: &str, rows: Vec<Vec<&str>>) -> RawRelation<String> {
    RawRelation::new(
        name,
        vec!["a".into(), "b".into()],
        rows.into_iter()
            .map(|r| r.into_iter().map(String::from).collect())
            .collect(),
    )
}

#[test]
fn compression_assigns_first_encounter_ids() {
    // Row-major scan of R = {(a1,b1),(a2,b1)}: a1 -> 1, b1 -> 2, a2 -> 3.
    let (rels, map) = DomainMap::compress(&[raw("r", vec![vec!["a1", "b1"], vec!["a2", "b1"]])]);
    assert_eq!(map.id(&"a1".to_string()), Some(1));
    assert_eq!(map.id(&"b1".to_string()), Some(2));
    assert_eq!(map.id(&"a2".to_string()), Some(3));
    assert_eq!(rels[0].len(), 2);
}

#[test]
fn empty_input_empty_map() {
    let (rels, map) = DomainMap::compress(&[raw("r", vec![])]);
    assert!(map.is_empty());
    assert!(rels[0].is_empty());
}

#[test]
fn paper_instance_round_trips() {
    let r = raw(
        "r",
        vec![
            vec!["a1", "b1"],
            vec!["a1", "b2"],
            vec!["a1", "b3"],
            vec!["a2", "b1"],
        ],
    );
    let s = raw(
        "s",
        vec![
            vec!["b1", "c1"],
            vec!["b1", "c2"],
            vec!["b2", "c2"],
            vec!["b3", "c3"],
        ],
    );
    let (rels, map) = DomainMap::compress(&[r.clone(), s.clone()]);
    for (orig, compressed) in [r, s].iter().zip(&rels) {
        let back = map.decompress_relation(compressed);
        let orig_rows: BTreeSet<_> = orig.rows.iter().cloned().collect();
        let back_rows: BTreeSet<_> = back.rows.iter().cloned().collect();
        assert_eq!(orig_rows, back_rows);
    }
    // f^-1(f(v)) = v across the whole active domain.
    for v in ["a1", "a2", "b1", "b2", "b3", "c1", "c2", "c3"] {
        let v = v.to_string();
        assert_eq!(map.value(map.id(&v).unwrap()), &v);
    }
}

proptest! {
    /// Compression preserves per-value degrees under relabeling.
    #[test]
    fn compression_preserves_degrees(
        rows in proptest::collection::btree_set((0u32..30, 0u32..30), 1..60)
    ) {
        let rows: Vec<Vec<String>> = rows
            .into_iter()
            .map(|(x, y)| vec![format!("x{x}"), format!("y{y}")])
            .collect();
        let mut ext_deg: std::collections::BTreeMap<String, usize> = Default::default();
        for row in &rows {
            *ext_deg.entry(row[0].clone()).or_default() += 1;
        }
        let (rels, map) = DomainMap::compress(&[RawRelation::new(
            "r",
            vec!["x".into(), "y".into()],
            rows,
        )]);
        let domain = map.len();
        let deg = rels[0].degrees(0, domain);
        for (v, d) in ext_deg {
            let id = map.id(&v).unwrap();
            prop_assert_eq!(deg[id as usize] as usize, d);
        }
    }

    /// Count sort agrees with a comparison sort under the same tie-break.
    #[test]
    fn count_sort_matches_comparison_oracle(
        degs in proptest::collection::vec(0u32..50, 1..200)
    ) {
        let mut with_zero = vec![0u32];
        with_zero.extend(degs);
        let got = count_sort_by_degree(&with_zero);
        let mut expect: Vec<Vid> = (0..with_zero.len() as Vid)
            .filter(|&id| with_zero[id as usize] > 0)
            .collect();
        expect.sort_by_key(|&id| (with_zero[id as usize], id));
        prop_assert_eq!(got, expect);
    }

    /// The one-pass split point agrees with scanning every index.
    #[test]
    fn split_point_matches_exhaustive_scan(
        contribs in proptest::collection::vec(1u64..50, 1..200)
    ) {
        let sp = find_split_index(&contribs);
        let total: u64 = contribs.iter().sum();
        let mut best = None;
        let mut prefix = 0u64;
        for i in 0..contribs.len() {
            prefix += contribs[i];
            if prefix >= total - prefix {
                best = Some((i + 1, prefix, total - prefix));
                break;
            }
        }
        let (i_star, j_light, j_heavy) = best.unwrap();
        prop_assert_eq!(sp.i_star, i_star);
        prop_assert_eq!(sp.j_light, j_light);
        prop_assert_eq!(sp.j_heavy, j_heavy);
        prop_assert!(sp.j_light >= sp.j_heavy);
        prop_assert_eq!(sp.j_light + sp.j_heavy, total);
    }
}

#[test]
fn count_sort_thousand_keys_matches_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let degs: Vec<u32> = (0..1000).map(|_| rng.gen_range(0..200)).collect();
    let got = count_sort_by_degree(&degs);
    let mut expect: Vec<Vid> = (0..degs.len() as Vid)
        .filter(|&id| degs[id as usize] > 0)
        .collect();
    expect.sort_by_key(|&id| (degs[id as usize], id));
    assert_eq!(got, expect);
}

#[test]
fn reducer_matches_brute_participation() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..40 {
        let n = 4 + (round % 12) * 8;
        // star normal form: both relations (value, join) with join col 1
        let r = rel("r", 2, random_pairs(&mut rng, n, 1, 15, 16, 30));
        let s = rel("s", 2, random_pairs(&mut rng, n, 31, 45, 16, 30));
        let rels = [r, s];
        let reduced = full_reducer(&rels, QueryShape::Star { k: 2 }, 45).unwrap();
        let expect = brute_participating_star(&rels);
        for (i, red) in reduced.iter().enumerate() {
            let got: BTreeSet<_> = red.tuples().iter().cloned().collect();
            assert_eq!(got, expect[i], "relation {i} mismatch");
        }
    }
}

#[test]
fn join_size_matches_brute_force_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..30 {
        let r = rel("r", 2, random_pairs(&mut rng, 25, 1, 10, 11, 20));
        let s = rel("s", 2, random_pairs(&mut rng, 25, 21, 30, 11, 20));
        let rels = [r, s];
        let reduced = full_reducer(&rels, QueryShape::Star { k: 2 }, 30).unwrap();
        let (_, brute_full) = brute_star(&reduced);
        let counted = full_join_size(&reduced, QueryShape::Star { k: 2 }, 30).unwrap();
        assert_eq!(counted, brute_full);
    }
}

#[test]
fn two_path_reduction_via_path_shape() {
    // R = {(1,2),(5,6)}, S = {(2,3)}: R loses (5,6).
    let r = rel("r", 2, vec![vec![1, 2], vec![5, 6]]);
    let s = rel("s", 2, vec![vec![2, 3]]);
    let reduced = full_reducer(&[r, s], QueryShape::Path { k: 2 }, 6).unwrap();
    assert_eq!(reduced[0].len(), 1);
    assert_eq!(reduced[0].tuples()[0].as_slice(), &[1, 2]);
}
