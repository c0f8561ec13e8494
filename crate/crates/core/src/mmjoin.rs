//! Matrix-multiplication-assisted two-path enumeration.
//!
//! For a chosen degree threshold δ, tuples split by whether their `x`
//! (in `R`) or `z` (in `S`) value has degree above δ. The heavy-x /
//! heavy-z outputs are materialized during preprocessing — via an
//! explicit join through low-degree join values, and via boolean matrix
//! multiplication of the heavy-x × heavy-y and heavy-y × heavy-z
//! incidence matrices — and scanned with constant delay. The remaining
//! outputs enumerate by per-valuation merges with delay O(δ). The
//! multiplier is pluggable; the default is the straightforward cubic
//! algorithm over packed words.

use alloc::boxed::Box;
use alloc::vec;
use alloc::vec::Vec;

use crate::clock::OpClock;
use crate::enumerate::{Chain, Enumerator, Scan};
use crate::hash::Set;
use crate::loops::{BuildMerge, ForEachValue};
use crate::relation::{BinaryAdj, IdTuple, Relation, Vid};
use crate::star::PairSource;
use crate::stats::JoinStats;
use crate::{Error, Result};

/// Dense boolean matrix with packed rows and labeled dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
    pub row_labels: Vec<Vid>,
    pub col_labels: Vec<Vid>,
}

impl BoolMatrix {
    pub fn new(row_labels: Vec<Vid>, col_labels: Vec<Vid>) -> Self {
        let rows = row_labels.len();
        let cols = col_labels.len();
        let words_per_row = cols.div_ceil(64).max(1);
        BoolMatrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
            row_labels,
            col_labels,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words_per_row + j / 64] |= 1u64 << (j % 64);
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }
}

/// A boolean matrix multiplication algorithm. Implementations charge the
/// clock for the work they do.
pub trait BoolMatMul {
    fn name(&self) -> &'static str;
    fn multiply(&self, a: &BoolMatrix, b: &BoolMatrix, clock: &mut OpClock)
        -> Result<BoolMatrix>;
}

/// The cubic schoolbook algorithm, OR-ing packed rows.
pub struct NaiveMatMul;

impl BoolMatMul for NaiveMatMul {
    fn name(&self) -> &'static str {
        "naive-cubic"
    }

    fn multiply(
        &self,
        a: &BoolMatrix,
        b: &BoolMatrix,
        clock: &mut OpClock,
    ) -> Result<BoolMatrix> {
        if a.cols != b.rows {
            return Err(Error::DimensionMismatch {
                left: (a.rows, a.cols),
                right: (b.rows, b.cols),
            });
        }
        let mut c = BoolMatrix::new(a.row_labels.clone(), b.col_labels.clone());
        for i in 0..a.rows {
            for kk in 0..a.cols {
                clock.charge(1);
                if a.get(i, kk) {
                    clock.charge(c.words_per_row as u64);
                    let start = i * c.words_per_row;
                    for (w, &src) in b.row(kk).iter().enumerate() {
                        c.bits[start + w] |= src;
                    }
                }
            }
        }
        Ok(c)
    }
}

/// `C[i][j] = OR_k (A[i][k] AND B[k][j])` with the default multiplier.
pub fn bool_matmul(a: &BoolMatrix, b: &BoolMatrix) -> Result<BoolMatrix> {
    NaiveMatMul.multiply(a, b, &mut OpClock::new())
}

/// Size summary of a preprocessing run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MmPlanInfo {
    pub delta: u64,
    pub heavy_x: u64,
    pub heavy_z: u64,
    pub heavy_y: u64,
    pub materialized: u64,
    pub preprocessing_ticks: u64,
}

/// A two-path instance preprocessed at threshold δ.
pub struct MmTwoPath {
    delta: u64,
    adj_x: BinaryAdj,
    adj_y: BinaryAdj,
    adj_z: BinaryAdj,
    adj_y_to_heavy_x: BinaryAdj,
    light_x: Vec<Vid>,
    light_z_fertile: Vec<Vid>,
    heavy_x_flag: Vec<bool>,
    heavy_z_flag: Vec<bool>,
    materialized: Vec<IdTuple>,
    info: MmPlanInfo,
    stats: JoinStats,
}

impl MmTwoPath {
    /// Preprocess reduced, compressed `r(x,y)`, `s(y,z)` at threshold
    /// `delta` using `multiplier` for the heavy-y block.
    pub fn preprocess(
        r: &Relation,
        s: &Relation,
        delta: u64,
        domain: usize,
        multiplier: &dyn BoolMatMul,
        clock: &mut OpClock,
    ) -> Result<MmTwoPath> {
        if delta < 1 {
            return Err(Error::InvalidParameter("delta must be at least 1"));
        }
        for rel in [r, s] {
            if rel.arity() != 2 {
                return Err(Error::Arity {
                    relation: rel.name().into(),
                    expected: 2,
                    got: rel.arity(),
                });
            }
        }
        let start_ticks = clock.now();
        let adj_x = r.binary_adj(0, 1, domain);
        let adj_y = s.binary_adj(0, 1, domain);
        let adj_z = s.binary_adj(1, 0, domain);
        let deg_x = r.degrees(0, domain);
        let deg_z = s.degrees(1, domain);
        let deg_y_r = r.degrees(1, domain);
        let deg_y_s = s.degrees(0, domain);
        clock.charge((r.len() + s.len()) as u64);

        let heavy_x_flag: Vec<bool> = deg_x.iter().map(|&d| d as u64 > delta).collect();
        let heavy_z_flag: Vec<bool> = deg_z.iter().map(|&d| d as u64 > delta).collect();
        // A join value is light only when its degree is at most delta on
        // both sides; heavy otherwise.
        let light_y_flag: Vec<bool> = deg_y_r
            .iter()
            .zip(&deg_y_s)
            .map(|(&dr, &ds)| dr as u64 <= delta && ds as u64 <= delta)
            .collect();

        let adj_y_to_heavy_x =
            r.binary_adj_filtered(1, 0, domain, |t| heavy_x_flag[t[0] as usize]);
        let adj_y_to_heavy_z =
            s.binary_adj_filtered(0, 1, domain, |t| heavy_z_flag[t[1] as usize]);

        let mut seen: Set<IdTuple> = Set::default();
        let mut materialized: Vec<IdTuple> = Vec::new();

        // Heavy-x / heavy-z pairs witnessed by a light join value.
        for u in 1..=domain as Vid {
            if !light_y_flag[u as usize] {
                continue;
            }
            for &a in adj_y_to_heavy_x.list(u) {
                for &c in adj_y_to_heavy_z.list(u) {
                    clock.charge(2);
                    let t = IdTuple::from_slice(&[a, c]);
                    if seen.insert(t.clone()) {
                        materialized.push(t);
                    }
                }
            }
        }

        // Heavy-x / heavy-z pairs witnessed by a heavy join value, via
        // boolean matrix multiplication.
        let heavy_x_vals: Vec<Vid> = (1..=domain as Vid)
            .filter(|&v| heavy_x_flag[v as usize])
            .collect();
        let heavy_z_vals: Vec<Vid> = (1..=domain as Vid)
            .filter(|&v| heavy_z_flag[v as usize])
            .collect();
        let heavy_y_vals: Vec<Vid> = (1..=domain as Vid)
            .filter(|&u| {
                !light_y_flag[u as usize]
                    && (deg_y_r[u as usize] > 0 || deg_y_s[u as usize] > 0)
            })
            .collect();
        if !heavy_x_vals.is_empty() && !heavy_y_vals.is_empty() && !heavy_z_vals.is_empty() {
            let mut x_index = vec![usize::MAX; domain + 1];
            for (i, &v) in heavy_x_vals.iter().enumerate() {
                x_index[v as usize] = i;
            }
            let mut y_index = vec![usize::MAX; domain + 1];
            for (i, &u) in heavy_y_vals.iter().enumerate() {
                y_index[u as usize] = i;
            }
            let mut z_index = vec![usize::MAX; domain + 1];
            for (i, &v) in heavy_z_vals.iter().enumerate() {
                z_index[v as usize] = i;
            }
            let mut a = BoolMatrix::new(heavy_x_vals.clone(), heavy_y_vals.clone());
            for t in r.tuples() {
                clock.charge(1);
                let (x, y) = (t[0] as usize, t[1] as usize);
                if x_index[x] != usize::MAX && y_index[y] != usize::MAX {
                    a.set(x_index[x], y_index[y]);
                }
            }
            let mut b = BoolMatrix::new(heavy_y_vals.clone(), heavy_z_vals.clone());
            for t in s.tuples() {
                clock.charge(1);
                let (y, z) = (t[0] as usize, t[1] as usize);
                if y_index[y] != usize::MAX && z_index[z] != usize::MAX {
                    b.set(y_index[y], z_index[z]);
                }
            }
            let c = multiplier.multiply(&a, &b, clock)?;
            for i in 0..c.rows() {
                for j in 0..c.cols() {
                    clock.charge(1);
                    if c.get(i, j) {
                        let t = IdTuple::from_slice(&[c.row_labels[i], c.col_labels[j]]);
                        if seen.insert(t.clone()) {
                            materialized.push(t);
                        }
                    }
                }
            }
        }

        let light_x: Vec<Vid> = adj_x
            .keys()
            .iter()
            .copied()
            .filter(|&v| !heavy_x_flag[v as usize])
            .collect();
        // A light z emits only through join values with heavy-x partners.
        let light_z_fertile: Vec<Vid> = adj_z
            .keys()
            .iter()
            .copied()
            .filter(|&w| {
                !heavy_z_flag[w as usize]
                    && adj_z
                        .list(w)
                        .iter()
                        .any(|&u| !adj_y_to_heavy_x.list(u).is_empty())
            })
            .collect();
        clock.charge(s.len() as u64);

        let info = MmPlanInfo {
            delta,
            heavy_x: heavy_x_vals.len() as u64,
            heavy_z: heavy_z_vals.len() as u64,
            heavy_y: heavy_y_vals.len() as u64,
            materialized: materialized.len() as u64,
            preprocessing_ticks: clock.now() - start_ticks,
        };
        let stats = JoinStats {
            input_size: (r.len() + s.len()) as u64,
            full_join_size: crate::stats::full_join_size(
                &[r.clone(), s.clone()],
                crate::QueryShape::Path { k: 2 },
                domain,
            )?,
            projection_size_hint: None,
            degree_sorted: Vec::new(),
        };

        Ok(MmTwoPath {
            delta,
            adj_x,
            adj_y,
            adj_z,
            adj_y_to_heavy_x,
            light_x,
            light_z_fertile,
            heavy_x_flag,
            heavy_z_flag,
            materialized,
            info,
            stats,
        })
    }

    pub fn info(&self) -> MmPlanInfo {
        self.info
    }

    pub fn stats(&self) -> &JoinStats {
        &self.stats
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn materialized(&self) -> &[IdTuple] {
        &self.materialized
    }

    /// Which of the three enumeration cases a projected pair belongs to:
    /// 0 light-x, 1 heavy-x/light-z, 2 heavy-x/heavy-z.
    pub fn case_of(&self, x: Vid, z: Vid) -> usize {
        if !self.heavy_x_flag[x as usize] {
            0
        } else if !self.heavy_z_flag[z as usize] {
            1
        } else {
            2
        }
    }

    /// Chained enumeration of the three disjoint cases: light-x merges,
    /// heavy-x/light-z merges, then the materialized heavy/heavy scan.
    pub fn enumerator(&self) -> Box<dyn Enumerator + '_> {
        let light_x_loop = ForEachValue::new(self.light_x.as_slice(), move |v| {
            BuildMerge::new(PairSource {
                v,
                us: self.adj_x.list(v),
                inner: &self.adj_y,
                fixed_pos: 0,
            })
        });
        let light_z_loop = ForEachValue::new(self.light_z_fertile.as_slice(), move |w| {
            BuildMerge::new(PairSource {
                v: w,
                us: self.adj_z.list(w),
                inner: &self.adj_y_to_heavy_x,
                fixed_pos: 1,
            })
        });
        Box::new(Chain::new(vec![
            Box::new(light_x_loop),
            Box::new(light_z_loop),
            Box::new(Scan::from_slice(&self.materialized)),
        ]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{measure_delay, OutVec};

    fn matrix_from(rows: &[Vid], cols: &[Vid], ones: &[(usize, usize)]) -> BoolMatrix {
        let mut m = BoolMatrix::new(rows.to_vec(), cols.to_vec());
        for &(i, j) in ones {
            m.set(i, j);
        }
        m
    }

    #[test]
    fn identity_times_matrix() {
        let id = matrix_from(&[1, 2], &[1, 2], &[(0, 0), (1, 1)]);
        let m = matrix_from(&[1, 2], &[3, 4], &[(0, 1), (1, 0)]);
        let c = bool_matmul(&id, &m).unwrap();
        assert_eq!(c.get(0, 0), false);
        assert_eq!(c.get(0, 1), true);
        assert_eq!(c.get(1, 0), true);
        assert_eq!(c.get(1, 1), false);
    }

    #[test]
    fn one_by_one() {
        let a = matrix_from(&[1], &[2], &[(0, 0)]);
        let b = matrix_from(&[2], &[3], &[(0, 0)]);
        let c = bool_matmul(&a, &b).unwrap();
        assert!(c.get(0, 0));
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let a = BoolMatrix::new(vec![1], vec![2, 3]);
        let b = BoolMatrix::new(vec![9], vec![4]);
        assert!(bool_matmul(&a, &b).is_err());
    }

    #[test]
    fn delta_zero_rejected() {
        let r = Relation::new(
            "r",
            vec!["x".into(), "y".into()],
            vec![IdTuple::from_slice(&[1, 2])],
        );
        let s = Relation::new(
            "s",
            vec!["y".into(), "z".into()],
            vec![IdTuple::from_slice(&[2, 3])],
        );
        let err = MmTwoPath::preprocess(&r, &s, 0, 3, &NaiveMatMul, &mut OpClock::new());
        assert!(err.is_err());
    }

    #[test]
    fn all_light_instance_has_empty_plan() {
        let r = Relation::new(
            "r",
            vec!["x".into(), "y".into()],
            vec![IdTuple::from_slice(&[1, 2])],
        );
        let s = Relation::new(
            "s",
            vec!["y".into(), "z".into()],
            vec![IdTuple::from_slice(&[2, 3])],
        );
        let mm = MmTwoPath::preprocess(&r, &s, 5, 3, &NaiveMatMul, &mut OpClock::new()).unwrap();
        assert_eq!(mm.info().materialized, 0);
        assert_eq!(mm.info().heavy_x, 0);
        let mut e = mm.enumerator();
        let mut clock = OpClock::new();
        let mut out = OutVec::new();
        measure_delay(&mut *e, &mut clock, &mut out);
        assert_eq!(out.tuples.len(), 1);
        assert_eq!(out.tuples[0].as_slice(), &[1, 3]);
    }
}
