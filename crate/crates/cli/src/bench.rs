//! Delay-bound verification: run an enumerator under the virtual clock,
//! check set-equality against the oracle, and compare the measured
//! maximum gap against the theorem-level bound scaled by a calibrated
//! constant.
//!
//! Calibration protocol: for each algorithm, the first few suite
//! instances fix `c_measured = max(max_gap / bound)`; that single
//! constant is then applied to every instance of the suite.

use anyhow::{bail, Result};
use serde::Serialize;

use crate::gen::{gen_instance, union_instances, GenKind};
use crate::oracle::oracle_project_join;
use crate::pipeline::{prepare, run_algorithm, Algorithm, Prepared};
use crate::report::DelayReportJson;
use qenum_core::QueryShape;

/// One verified run.
#[derive(Debug, Clone, Serialize)]
pub struct BenchReport {
    pub instance: String,
    pub seed: u64,
    pub d_size: u64,
    pub out_join: u64,
    pub out_pi: u64,
    pub algorithm: String,
    /// The algorithm's tuning parameter (Δ, δ, ε-derived Δ, or J).
    pub param: f64,
    pub delay: DelayReportJson,
    pub c_measured: f64,
    pub pass: bool,
    pub notes: Vec<String>,
}

/// Run `algo`, verify set-equality with the oracle, and evaluate the
/// delay bound under the calibrated constant.
pub fn verify_delay(
    prep: &Prepared,
    algo: Algorithm,
    instance: &str,
    seed: u64,
    c_measured: f64,
) -> Result<BenchReport> {
    let outcome = run_algorithm(prep, algo)?;
    let oracle = oracle_project_join(prep.shape, &prep.relations)?;

    let got: std::collections::BTreeSet<Vec<u32>> =
        outcome.tuples.iter().map(|t| t.to_vec()).collect();
    if got.len() != outcome.tuples.len() {
        bail!("{instance}/{}: enumerator emitted duplicates", algo.name());
    }
    if got != oracle.projected {
        let missing: Vec<_> = oracle.projected.difference(&got).take(10).collect();
        let extra: Vec<_> = got.difference(&oracle.projected).take(10).collect();
        bail!(
            "{instance}/{}: output set mismatch; missing {missing:?}, extra {extra:?}",
            algo.name()
        );
    }

    let delay = DelayReportJson::new(&outcome.delay, outcome.bound, c_measured);
    Ok(BenchReport {
        instance: instance.into(),
        seed,
        d_size: outcome.d_size,
        out_join: outcome.out_join,
        out_pi: oracle.projection,
        algorithm: outcome.algorithm.into(),
        param: outcome.param,
        delay: delay.clone(),
        c_measured,
        pass: delay.bound_satisfied,
        notes: outcome.notes,
    })
}

/// A suite instance: name, prepared relations, algorithm.
pub struct SuiteCase {
    pub name: String,
    pub seed: u64,
    pub prep: Prepared,
    pub algo: Algorithm,
}

/// The default verification suite: per algorithm, `seeds` seeded random
/// instances of its shape (|D| kept small enough for the oracle), plus
/// the adversarial closed-form families for the two-path algorithms.
pub fn default_suite(seeds: u64) -> Result<Vec<SuiteCase>> {
    let mut cases = Vec::new();
    let star2 = QueryShape::Star { k: 2 };

    for seed in 1..=seeds {
        let raw = gen_instance(&GenKind::RandomStar {
            k: 2,
            tuples: 90 + (seed as usize % 4) * 15,
            x_domain: 24,
            y_domain: 14,
            seed,
        })?;
        let prep = prepare(star2, &raw)?;
        let fmm = Algorithm::Fmm {
            delta: 1 + (seed % 4) * 2,
        };
        for algo in [Algorithm::TwoPath, Algorithm::StarAlt, fmm] {
            cases.push(SuiteCase {
                name: format!("random-star2-{seed}"),
                seed,
                prep: prep.clone(),
                algo,
            });
        }

        let k = 2 + (seed as usize % 3);
        let raw = gen_instance(&GenKind::RandomStar {
            k,
            tuples: 70,
            x_domain: 18,
            y_domain: 10,
            seed,
        })?;
        cases.push(SuiteCase {
            name: format!("random-star{k}-{seed}"),
            seed,
            prep: prepare(QueryShape::Star { k }, &raw)?,
            algo: Algorithm::Star,
        });

        let k = 2 + (seed as usize % 2);
        let raw = gen_instance(&GenKind::RandomLeftDeep {
            k,
            tuples: 60,
            w_domain: 10,
            prefix_pool: 6,
            seed,
        })?;
        cases.push(SuiteCase {
            name: format!("random-leftdeep{k}-{seed}"),
            seed,
            prep: prepare(QueryShape::LeftDeep { k }, &raw)?,
            algo: Algorithm::LeftDeep,
        });

        let k = 2 + (seed as usize % 3);
        let raw = gen_instance(&GenKind::RandomPath {
            k,
            tuples: 40,
            level_domain: 12,
            seed,
        })?;
        cases.push(SuiteCase {
            name: format!("random-path{k}-{seed}"),
            seed,
            prep: prepare(QueryShape::Path { k }, &raw)?,
            algo: Algorithm::Path {
                epsilon: [0.0, 0.25, 0.5][seed as usize % 3],
            },
        });
    }

    // Adversarial families for the two-path split.
    for n in [64u64, 256] {
        let raw = union_instances(
            gen_instance(&GenKind::D0 { n })?,
            gen_instance(&GenKind::D1 { n })?,
        );
        cases.push(SuiteCase {
            name: format!("d0d1-{n}"),
            seed: 0,
            prep: prepare(star2, &raw)?,
            algo: Algorithm::TwoPath,
        });
    }

    Ok(cases)
}

/// Run a suite with per-algorithm calibration over the first
/// `calibration_per_algo` instances of each algorithm.
pub fn run_suite(cases: &[SuiteCase], calibration_per_algo: usize) -> Result<Vec<BenchReport>> {
    let mut c_measured: std::collections::BTreeMap<&'static str, (f64, usize)> =
        Default::default();
    for case in cases {
        let entry = c_measured.entry(case.algo.name()).or_insert((1.0, 0));
        if entry.1 >= calibration_per_algo {
            continue;
        }
        let outcome = run_algorithm(&case.prep, case.algo)?;
        let ratio = outcome.delay.max_gap as f64 / outcome.bound.max(1.0);
        entry.0 = entry.0.max(ratio);
        entry.1 += 1;
    }
    let mut reports = Vec::with_capacity(cases.len());
    for case in cases {
        let c = c_measured.get(case.algo.name()).map(|e| e.0).unwrap_or(1.0);
        reports.push(verify_delay(
            &case.prep,
            case.algo,
            &case.name,
            case.seed,
            c,
        )?);
    }
    Ok(reports)
}
