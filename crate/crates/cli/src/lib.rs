//! Harness around `qenum-core`: CSV relation IO, a brute-force oracle,
//! adversarial and random instance generators, delay-bound verification,
//! and the `qenum` command-line interface.

pub mod bench;
pub mod csvio;
pub mod gen;
pub mod oracle;
pub mod pipeline;
pub mod report;
pub mod update_script;

pub use bench::{verify_delay, BenchReport};
pub use gen::{gen_instance, GenKind};
pub use oracle::{oracle_project_join, OracleResult};
pub use pipeline::{prepare, run_algorithm, Algorithm, Prepared, RunOutcome};
