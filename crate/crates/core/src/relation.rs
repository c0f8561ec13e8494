//! Relations over the compressed domain, with the index structures the
//! enumeration algorithms use: dense per-attribute adjacency lists and
//! hash indexes keyed by column prefixes.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use smallvec::SmallVec;

use crate::hash::Map;

/// A compressed domain value (ids are dense, starting at 1).
pub type Vid = u32;

/// A tuple of compressed ids. Inline up to arity 4, which covers every
/// query shape exercised here.
pub type IdTuple = SmallVec<[Vid; 4]>;

/// A set of tuples over the compressed domain.
///
/// Tuples are deduplicated and kept in lexicographic order, so scans and
/// index builds are deterministic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    name: String,
    schema: Vec<String>,
    tuples: Vec<IdTuple>,
}

impl Relation {
    pub fn new(name: impl Into<String>, schema: Vec<String>, mut tuples: Vec<IdTuple>) -> Self {
        tuples.sort_unstable();
        tuples.dedup();
        Relation {
            name: name.into(),
            schema,
            tuples,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn schema(&self) -> &[String] {
        &self.schema
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn tuples(&self) -> &[IdTuple] {
        &self.tuples
    }

    /// Largest id appearing anywhere in the relation (0 when empty).
    pub fn max_id(&self) -> Vid {
        self.tuples
            .iter()
            .flat_map(|t| t.iter().copied())
            .max()
            .unwrap_or(0)
    }

    /// Replace the tuple set, keeping name and schema.
    pub fn with_tuples(&self, tuples: Vec<IdTuple>) -> Relation {
        Relation::new(self.name.clone(), self.schema.clone(), tuples)
    }

    /// Degree of every id in column `col`; index = id, length `domain + 1`.
    pub fn degrees(&self, col: usize, domain: usize) -> Vec<u32> {
        let mut deg = vec![0u32; domain + 1];
        for t in &self.tuples {
            deg[t[col] as usize] += 1;
        }
        deg
    }

    /// Dense adjacency from column `key` to column `val`.
    pub fn binary_adj(&self, key: usize, val: usize, domain: usize) -> BinaryAdj {
        let mut lists: Vec<Vec<Vid>> = vec![Vec::new(); domain + 1];
        for t in &self.tuples {
            lists[t[key] as usize].push(t[val]);
        }
        BinaryAdj::from_lists(lists)
    }

    /// Like [`binary_adj`](Self::binary_adj) but keeping only tuples the
    /// filter accepts. Used for heavy/light splits.
    pub fn binary_adj_filtered(
        &self,
        key: usize,
        val: usize,
        domain: usize,
        mut keep: impl FnMut(&IdTuple) -> bool,
    ) -> BinaryAdj {
        let mut lists: Vec<Vec<Vid>> = vec![Vec::new(); domain + 1];
        for t in &self.tuples {
            if keep(t) {
                lists[t[key] as usize].push(t[val]);
            }
        }
        BinaryAdj::from_lists(lists)
    }

    /// Hash index from the composite key `key_cols` to the sorted list of
    /// `val_col` values.
    pub fn prefix_index(&self, key_cols: &[usize], val_col: usize) -> PrefixIndex {
        let mut map: Map<IdTuple, Vec<Vid>> = Map::default();
        for t in &self.tuples {
            let key: IdTuple = key_cols.iter().map(|&c| t[c]).collect();
            map.entry(key).or_default().push(t[val_col]);
        }
        for list in map.values_mut() {
            list.sort_unstable();
            list.dedup();
        }
        PrefixIndex { map }
    }

    /// Group tuples by the value in `col`; entry `v` holds the remaining
    /// columns (schema order, `col` removed) of every tuple with `t[col] = v`,
    /// sorted lexicographically.
    pub fn group_rows(&self, col: usize, domain: usize) -> Vec<Vec<IdTuple>> {
        let mut groups: Vec<Vec<IdTuple>> = vec![Vec::new(); domain + 1];
        for t in &self.tuples {
            let rest: IdTuple = t
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != col)
                .map(|(_, &v)| v)
                .collect();
            groups[t[col] as usize].push(rest);
        }
        for g in &mut groups {
            g.sort_unstable();
        }
        groups
    }
}

/// Dense single-attribute adjacency: id -> sorted neighbor list.
#[derive(Debug, Clone)]
pub struct BinaryAdj {
    lists: Vec<Vec<Vid>>,
    keys: Vec<Vid>,
}

impl BinaryAdj {
    fn from_lists(mut lists: Vec<Vec<Vid>>) -> Self {
        let mut keys = Vec::new();
        for (id, list) in lists.iter_mut().enumerate() {
            if !list.is_empty() {
                list.sort_unstable();
                list.dedup();
                keys.push(id as Vid);
            }
        }
        BinaryAdj { lists, keys }
    }

    /// Sorted neighbors of `key` (empty slice when absent).
    pub fn list(&self, key: Vid) -> &[Vid] {
        self.lists
            .get(key as usize)
            .map(|l| l.as_slice())
            .unwrap_or(&[])
    }

    pub fn degree(&self, key: Vid) -> usize {
        self.list(key).len()
    }

    /// Distinct keys with nonempty lists, ascending.
    pub fn keys(&self) -> &[Vid] {
        &self.keys
    }

    pub fn domain(&self) -> usize {
        self.lists.len().saturating_sub(1)
    }
}

/// Hash index keyed by a column-prefix tuple.
#[derive(Debug, Clone)]
pub struct PrefixIndex {
    map: Map<IdTuple, Vec<Vid>>,
}

impl PrefixIndex {
    pub fn list(&self, key: &[Vid]) -> &[Vid] {
        self.map
            .get(key)
            .map(|l| l.as_slice())
            .unwrap_or(&[])
    }

    pub fn degree(&self, key: &[Vid]) -> usize {
        self.list(key).len()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(tuples: &[[Vid; 2]]) -> Relation {
        Relation::new(
            "r",
            alloc::vec!["x".into(), "y".into()],
            tuples.iter().map(|t| IdTuple::from_slice(t)).collect(),
        )
    }

    #[test]
    fn dedups_and_sorts() {
        let r = rel(&[[2, 1], [1, 1], [2, 1]]);
        assert_eq!(r.len(), 2);
        assert_eq!(r.tuples()[0], IdTuple::from_slice(&[1, 1]));
    }

    #[test]
    fn adjacency_lists_sorted() {
        let r = rel(&[[1, 3], [1, 2], [2, 9]]);
        let adj = r.binary_adj(0, 1, 9);
        assert_eq!(adj.list(1), &[2, 3]);
        assert_eq!(adj.degree(2), 1);
        assert_eq!(adj.keys(), &[1, 2]);
        assert!(adj.list(5).is_empty());
    }
}
