//! Query shapes and validated query descriptors.
//!
//! Three acyclic shapes are supported, all with projection onto the
//! non-join variables:
//!
//! * star: `R_1(x_1, y) ⋈ … ⋈ R_k(x_k, y)`, projected onto `x_1..x_k`,
//! * left-deep: `R_1(w_1, x_1) ⋈ R_2(w_2, x_1, x_2) ⋈ … ⋈ R_k(w_k, x_1..x_k)`,
//!   projected onto `w_1..w_k`,
//! * path: `R_1(x_1, x_2) ⋈ … ⋈ R_k(x_k, x_{k+1})`, projected onto the
//!   endpoints `(x_1, x_{k+1})`.

use alloc::vec::Vec;

use crate::relation::Relation;
use crate::{Error, Result};

/// The join shape of a query, with its relation count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryShape {
    Star { k: usize },
    LeftDeep { k: usize },
    Path { k: usize },
}

impl QueryShape {
    pub fn k(&self) -> usize {
        match *self {
            QueryShape::Star { k } | QueryShape::LeftDeep { k } | QueryShape::Path { k } => k,
        }
    }

    /// Arity relation `i` (0-based) must have under this shape.
    pub fn expected_arity(&self, i: usize) -> usize {
        match self {
            QueryShape::Star { .. } | QueryShape::Path { .. } => 2,
            QueryShape::LeftDeep { .. } => i + 2,
        }
    }

    /// Check relation count and arities.
    pub fn validate(&self, relations: &[Relation]) -> Result<()> {
        if relations.len() != self.k() {
            return Err(Error::InvalidParameter("relation count does not match k"));
        }
        for (i, r) in relations.iter().enumerate() {
            let expected = self.expected_arity(i);
            if r.arity() != expected {
                return Err(Error::Arity {
                    relation: r.name().into(),
                    expected,
                    got: r.arity(),
                });
            }
        }
        Ok(())
    }
}

/// A star query in normal form: every relation is binary `(x_i, y)` with
/// the join variable in column 1.
#[derive(Debug, Clone)]
pub struct StarQuery {
    pub relations: Vec<Relation>,
}

impl StarQuery {
    /// Build from binary relations, flipping columns where the join
    /// variable sits in column 0 (`y_col[i]` names its position).
    pub fn new(relations: Vec<Relation>, y_col: &[usize]) -> Result<StarQuery> {
        if relations.len() < 2 || y_col.len() != relations.len() {
            return Err(Error::InvalidParameter("star query needs k >= 2 relations"));
        }
        let mut normalized = Vec::with_capacity(relations.len());
        for (rel, &yc) in relations.iter().zip(y_col) {
            if rel.arity() != 2 {
                return Err(Error::Arity {
                    relation: rel.name().into(),
                    expected: 2,
                    got: rel.arity(),
                });
            }
            if yc == 1 {
                normalized.push(rel.clone());
            } else {
                let schema = alloc::vec![rel.schema()[1].clone(), rel.schema()[0].clone()];
                let tuples = rel
                    .tuples()
                    .iter()
                    .map(|t| crate::relation::IdTuple::from_slice(&[t[1], t[0]]))
                    .collect();
                normalized.push(Relation::new(rel.name(), schema, tuples));
            }
        }
        Ok(StarQuery {
            relations: normalized,
        })
    }

    pub fn k(&self) -> usize {
        self.relations.len()
    }

    /// Total tuple count |D|.
    pub fn input_size(&self) -> u64 {
        self.relations.iter().map(|r| r.len() as u64).sum()
    }
}

/// A path query `R_1(x_1,x_2), …, R_k(x_k,x_{k+1})`.
#[derive(Debug, Clone)]
pub struct PathQuery {
    pub relations: Vec<Relation>,
}

impl PathQuery {
    pub fn new(relations: Vec<Relation>) -> Result<PathQuery> {
        if relations.len() < 2 {
            return Err(Error::InvalidParameter("path query needs k >= 2 relations"));
        }
        QueryShape::Path {
            k: relations.len(),
        }
        .validate(&relations)?;
        Ok(PathQuery { relations })
    }

    pub fn k(&self) -> usize {
        self.relations.len()
    }

    pub fn input_size(&self) -> u64 {
        self.relations.iter().map(|r| r.len() as u64).sum()
    }
}

/// A left-deep hierarchical query: relation `i` (1-based) has schema
/// `(w_i, x_1, …, x_i)`.
#[derive(Debug, Clone)]
pub struct LeftDeepQuery {
    pub relations: Vec<Relation>,
}

impl LeftDeepQuery {
    pub fn new(relations: Vec<Relation>) -> Result<LeftDeepQuery> {
        if relations.is_empty() {
            return Err(Error::InvalidParameter("left-deep query needs k >= 1"));
        }
        QueryShape::LeftDeep {
            k: relations.len(),
        }
        .validate(&relations)?;
        Ok(LeftDeepQuery { relations })
    }

    pub fn k(&self) -> usize {
        self.relations.len()
    }

    pub fn input_size(&self) -> u64 {
        self.relations.iter().map(|r| r.len() as u64).sum()
    }
}
