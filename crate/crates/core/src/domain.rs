//! Domain compression: the bijection between external values and the
//! dense integer domain `1..=n` that all enumeration algorithms run on.
//!
//! Mapping every value of the active domain to a small integer keeps
//! degrees in a bounded range (enabling count sort) and makes adjacency
//! lists plain integer arrays. The relabeling preserves degrees, so every
//! degree-based decision is unaffected.

use alloc::string::String;
use alloc::vec::Vec;
use core::hash::Hash;

use crate::hash::Map;
use crate::relation::{IdTuple, Relation, Vid};

/// A relation over external (uncompressed) values, as parsed or generated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawRelation<V> {
    pub name: String,
    pub schema: Vec<String>,
    pub rows: Vec<Vec<V>>,
}

impl<V> RawRelation<V> {
    pub fn new(name: impl Into<String>, schema: Vec<String>, rows: Vec<Vec<V>>) -> Self {
        RawRelation {
            name: name.into(),
            schema,
            rows,
        }
    }

    pub fn arity(&self) -> usize {
        self.schema.len()
    }
}

/// The bijection `f` / `f⁻¹` between external values and `1..=n`.
///
/// Ids are assigned in first-encounter order during a row-major scan of
/// the relations in declaration order, which makes the mapping (and
/// everything downstream of it) deterministic.
#[derive(Debug, Clone)]
pub struct DomainMap<V> {
    forward: Map<V, Vid>,
    inverse: Vec<V>,
}

impl<V: Eq + Hash + Clone> DomainMap<V> {
    /// Compress a database: replace every external value by its id.
    pub fn compress(relations: &[RawRelation<V>]) -> (Vec<Relation>, DomainMap<V>) {
        let mut map = DomainMap {
            forward: Map::default(),
            inverse: Vec::new(),
        };
        let mut out = Vec::with_capacity(relations.len());
        for raw in relations {
            let mut tuples: Vec<IdTuple> = Vec::with_capacity(raw.rows.len());
            for row in &raw.rows {
                tuples.push(row.iter().map(|v| map.intern(v)).collect());
            }
            out.push(Relation::new(raw.name.clone(), raw.schema.clone(), tuples));
        }
        (out, map)
    }

    fn intern(&mut self, v: &V) -> Vid {
        if let Some(&id) = self.forward.get(v) {
            return id;
        }
        let id = (self.inverse.len() + 1) as Vid;
        self.forward.insert(v.clone(), id);
        self.inverse.push(v.clone());
        id
    }

    /// `f(v)`, if `v` is in the active domain.
    pub fn id(&self, v: &V) -> Option<Vid> {
        self.forward.get(v).copied()
    }

    /// `f⁻¹(id)`. Panics on ids outside `1..=len`.
    pub fn value(&self, id: Vid) -> &V {
        &self.inverse[(id - 1) as usize]
    }

    /// Size of the active domain.
    pub fn len(&self) -> usize {
        self.inverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.inverse.is_empty()
    }

    /// Apply `f⁻¹` coordinate-wise.
    pub fn decompress(&self, t: &[Vid]) -> Vec<V> {
        t.iter().map(|&id| self.value(id).clone()).collect()
    }

    /// Map a compressed relation back to external rows (used by tests and
    /// the CLI; tuple order is the relation's canonical order).
    pub fn decompress_relation(&self, rel: &Relation) -> RawRelation<V> {
        RawRelation {
            name: rel.name().into(),
            schema: rel.schema().to_vec(),
            rows: rel.tuples().iter().map(|t| self.decompress(t)).collect(),
        }
    }
}
