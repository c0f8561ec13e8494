//! JSON and CSV report serialization.

use serde::Serialize;

use qenum_core::DelayReport;

/// Wire form of a delay measurement, with the checked bound attached.
#[derive(Debug, Clone, Serialize)]
pub struct DelayReportJson {
    pub max_gap: u64,
    pub mean_gap: f64,
    pub emissions: u64,
    pub total_ticks: u64,
    pub bound: f64,
    pub bound_satisfied: bool,
}

impl DelayReportJson {
    /// Attach a bound scaled by the calibrated constant.
    pub fn new(report: &DelayReport, bound: f64, c_measured: f64) -> Self {
        let scaled = c_measured * bound;
        DelayReportJson {
            max_gap: report.max_gap,
            mean_gap: report.mean_gap,
            emissions: report.emissions,
            total_ticks: report.total_ticks,
            bound: scaled,
            bound_satisfied: (report.max_gap as f64) <= scaled,
        }
    }
}

/// Flat CSV header matching [`csv_row`].
pub const CSV_HEADER: &str =
    "instance,seed,algorithm,d_size,out_join,out_pi,param,max_gap,mean_gap,emissions,total_ticks,bound,c_measured,pass";

pub fn csv_row(r: &crate::bench::BenchReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{:.3},{},{},{:.3},{:.3},{}",
        r.instance,
        r.seed,
        r.algorithm,
        r.d_size,
        r.out_join,
        r.out_pi,
        r.param,
        r.delay.max_gap,
        r.delay.mean_gap,
        r.delay.emissions,
        r.delay.total_ticks,
        r.delay.bound,
        r.c_measured,
        r.pass
    )
}
