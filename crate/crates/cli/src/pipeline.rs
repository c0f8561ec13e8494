//! The shared preparation pipeline (compress, normalize, reduce) and
//! algorithm dispatch, used by the CLI, the benchmark suite and the
//! acceptance tests.

use anyhow::{bail, Context, Result};
use qenum_core::leftdeep::LeftDeep;
use qenum_core::mmjoin::{MmTwoPath, NaiveMatMul};
use qenum_core::path::Path;
use qenum_core::query::{LeftDeepQuery, PathQuery, StarQuery};
use qenum_core::reduce::full_reducer;
use qenum_core::star::{Star, StarAlternate, TwoPath};
use qenum_core::{
    measure_delay, DelayReport, DomainMap, IdTuple, OpClock, OutVec, QueryShape, RawRelation,
    Relation,
};

/// A compressed, normalized, reduced instance ready for any algorithm of
/// its shape.
#[derive(Clone)]
pub struct Prepared {
    pub shape: QueryShape,
    pub map: DomainMap<String>,
    pub domain: usize,
    /// Star relations are in normal form `(x_i, y)`.
    pub relations: Vec<Relation>,
}

impl Prepared {
    pub fn input_size(&self) -> u64 {
        self.relations.iter().map(|r| r.len() as u64).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.iter().any(|r| r.is_empty())
    }

    /// The two-path relations in natural orientation `(x,y)`, `(y,z)`.
    pub fn two_path_pair(&self) -> Result<(Relation, Relation)> {
        let QueryShape::Star { k: 2 } = self.shape else {
            bail!("two-path algorithms need a star shape with k = 2");
        };
        let s = &self.relations[1];
        let flipped = Relation::new(
            s.name(),
            vec![s.schema()[1].clone(), s.schema()[0].clone()],
            s.tuples()
                .iter()
                .map(|t| IdTuple::from_slice(&[t[1], t[0]]))
                .collect(),
        );
        Ok((self.relations[0].clone(), flipped))
    }
}

/// Find the join variable of a star query: the column name common to
/// every relation schema.
fn star_join_positions(raw: &[RawRelation<String>]) -> Result<Vec<usize>> {
    let first = &raw[0];
    let mut shared: Vec<&String> = first.schema.iter().collect();
    for r in &raw[1..] {
        shared.retain(|v| r.schema.contains(v));
    }
    if shared.len() != 1 {
        bail!(
            "expected exactly one shared join variable across star relations, found {:?}",
            shared
        );
    }
    let join = shared[0].clone();
    raw.iter()
        .map(|r| {
            r.schema
                .iter()
                .position(|v| *v == join)
                .context("join variable missing")
        })
        .collect()
}

/// Compress, normalize and reduce `raw` under `shape`.
pub fn prepare(shape: QueryShape, raw: &[RawRelation<String>]) -> Result<Prepared> {
    if raw.len() != shape.k() {
        bail!("shape needs {} relations, got {}", shape.k(), raw.len());
    }
    let (compressed, map) = DomainMap::compress(raw);
    let domain = map.len();
    let relations = match shape {
        QueryShape::Star { k } => {
            let y_cols = star_join_positions(raw)?;
            let q = StarQuery::new(compressed, &y_cols)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            full_reducer(&q.relations, QueryShape::Star { k }, domain)
                .map_err(|e| anyhow::anyhow!("{e}"))?
        }
        shape => {
            shape
                .validate(&compressed)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            full_reducer(&compressed, shape, domain).map_err(|e| anyhow::anyhow!("{e}"))?
        }
    };
    Ok(Prepared {
        shape,
        map,
        domain,
        relations,
    })
}

/// Which enumerator to run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Algorithm {
    TwoPath,
    Star,
    StarAlt,
    Fmm { delta: u64 },
    LeftDeep,
    Path { epsilon: f64 },
}

impl Algorithm {
    pub fn name(&self) -> &'static str {
        match self {
            Algorithm::TwoPath => "two-path",
            Algorithm::Star => "star",
            Algorithm::StarAlt => "star-alt",
            Algorithm::Fmm { .. } => "fmm",
            Algorithm::LeftDeep => "leftdeep",
            Algorithm::Path { .. } => "path",
        }
    }
}

/// One measured enumeration run.
pub struct RunOutcome {
    pub algorithm: &'static str,
    pub tuples: Vec<IdTuple>,
    pub delay: DelayReport,
    /// The theorem-level delay bound for this instance.
    pub bound: f64,
    /// The algorithm's tuning parameter (Δ, δ, ε, or J).
    pub param: f64,
    pub d_size: u64,
    pub out_join: u64,
    pub notes: Vec<String>,
}

/// Preprocess and run `algo` on a prepared instance, measuring delay.
pub fn run_algorithm(prep: &Prepared, algo: Algorithm) -> Result<RunOutcome> {
    let mut notes = Vec::new();
    let mut clock = OpClock::new();
    let mut out = OutVec::new();
    let d_size = prep.input_size();

    let (delay, bound, param, out_join) = match algo {
        Algorithm::TwoPath => {
            let (r, s) = prep.two_path_pair()?;
            let tp = TwoPath::preprocess(&r, &s, prep.domain).map_err(|e| anyhow::anyhow!("{e}"))?;
            if tp.bypassed() {
                notes.push("small-output materialization".into());
            }
            let mut e = tp.enumerator().map_err(|e| anyhow::anyhow!("{e}"))?;
            let report = measure_delay(&mut *e, &mut clock, &mut out);
            (
                report,
                tp.delay_bound() as f64,
                tp.light_delay() as f64,
                tp.stats().full_join_size,
            )
        }
        Algorithm::Star => {
            let q = StarQuery {
                relations: prep.relations.clone(),
            };
            let star = Star::preprocess(&q, prep.domain).map_err(|e| anyhow::anyhow!("{e}"))?;
            if star.bypassed() {
                notes.push("small-output materialization".into());
            }
            let mut e = star.enumerator().map_err(|e| anyhow::anyhow!("{e}"))?;
            let report = measure_delay(&mut *e, &mut clock, &mut out);
            (
                report,
                star.delta() as f64,
                star.delta() as f64,
                star.stats().full_join_size,
            )
        }
        Algorithm::StarAlt => {
            let q = StarQuery {
                relations: prep.relations.clone(),
            };
            let alt =
                StarAlternate::preprocess(&q, prep.domain).map_err(|e| anyhow::anyhow!("{e}"))?;
            let mut e = alt.enumerator();
            let report = measure_delay(&mut *e, &mut clock, &mut out);
            (
                report,
                alt.delay_bound() as f64,
                alt.j_quantity() as f64,
                alt.stats().full_join_size,
            )
        }
        Algorithm::Fmm { delta } => {
            let (r, s) = prep.two_path_pair()?;
            let mm = MmTwoPath::preprocess(&r, &s, delta, prep.domain, &NaiveMatMul, &mut clock)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            notes.push(format!(
                "plan: heavy_x={} heavy_z={} heavy_y={} materialized={} prep_ticks={}",
                mm.info().heavy_x,
                mm.info().heavy_z,
                mm.info().heavy_y,
                mm.info().materialized,
                mm.info().preprocessing_ticks
            ));
            let mut e = mm.enumerator();
            let report = measure_delay(&mut *e, &mut clock, &mut out);
            (
                report,
                delta as f64,
                delta as f64,
                mm.stats().full_join_size,
            )
        }
        Algorithm::LeftDeep => {
            let q = LeftDeepQuery::new(prep.relations.clone()).map_err(|e| anyhow::anyhow!("{e}"))?;
            let ld = LeftDeep::preprocess(&q, prep.domain).map_err(|e| anyhow::anyhow!("{e}"))?;
            if ld.bypassed() {
                notes.push("small-output materialization".into());
            }
            let mut e = ld.enumerator().map_err(|e| anyhow::anyhow!("{e}"))?;
            let report = measure_delay(&mut *e, &mut clock, &mut out);
            (
                report,
                ld.delay_bound() as f64,
                ld.delta() as f64,
                ld.stats().full_join_size,
            )
        }
        Algorithm::Path { epsilon } => {
            let q = PathQuery::new(prep.relations.clone()).map_err(|e| anyhow::anyhow!("{e}"))?;
            let path = Path::preprocess(&q, prep.domain, epsilon, &mut clock)
                .map_err(|e| anyhow::anyhow!("{e}"))?;
            notes.push(format!(
                "store: views={} entries={} delta={} prep_ticks={}",
                path.store().view_count(),
                path.store().entries(),
                path.store().delta(),
                path.store().preprocessing_ticks()
            ));
            let mut e = path.enumerator();
            let report = measure_delay(&mut *e, &mut clock, &mut out);
            (
                report,
                path.delay_bound() as f64,
                path.store().delta() as f64,
                path.stats().full_join_size,
            )
        }
    };

    Ok(RunOutcome {
        algorithm: algo.name(),
        tuples: out.tuples,
        delay,
        bound: bound.max(1.0),
        param,
        d_size,
        out_join,
        notes,
    })
}
