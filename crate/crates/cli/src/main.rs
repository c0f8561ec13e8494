//! `qenum`: generate instances, run delay-instrumented enumerations,
//! compare against the brute-force oracle, and run the verification
//! bench suite.

use std::fs;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use qenum::bench::{default_suite, run_suite};
use qenum::csvio::{load_dir, write_csv};
use qenum::gen::{gen_instance, GenKind};
use qenum::oracle::oracle_project_join;
use qenum::pipeline::{prepare, run_algorithm, Algorithm};
use qenum::report::{csv_row, DelayReportJson, CSV_HEADER};
use qenum::update_script::{apply, Script};
use qenum_core::QueryShape;

#[derive(Parser)]
#[command(name = "qenum", about = "Delay-guaranteed join-project enumeration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ShapeArg {
    Star,
    Leftdeep,
    Path,
}

impl ShapeArg {
    fn to_shape(self, k: usize) -> QueryShape {
        match self {
            ShapeArg::Star => QueryShape::Star { k },
            ShapeArg::Leftdeep => QueryShape::LeftDeep { k },
            ShapeArg::Path => QueryShape::Path { k },
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    #[value(name = "two-path")]
    TwoPath,
    Star,
    #[value(name = "star-alt")]
    StarAlt,
    Fmm,
    Leftdeep,
    Path,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    D0,
    D1,
    #[value(name = "d-alpha")]
    DAlpha,
    #[value(name = "quadratic-family")]
    QuadraticFamily,
    Random,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance into a directory of CSV files.
    Gen {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long, value_enum, default_value = "star")]
        shape: ShapeArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 100)]
        tuples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run one enumeration algorithm under the virtual clock.
    Run {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, value_enum)]
        algo: AlgoArg,
        #[arg(long)]
        inputs: PathBuf,
        /// Heavy/light threshold for --algo fmm.
        #[arg(long, default_value_t = 2)]
        delta: u64,
        /// Tradeoff parameter for --algo path.
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Write the delay report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Suppress tuple output.
        #[arg(long)]
        quiet: bool,
    },
    /// Brute-force reference result and sizes.
    Oracle {
        #[arg(long, value_enum)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        inputs: PathBuf,
        #[arg(long)]
        quiet: bool,
    },
    /// Run the verification suite.
    Bench {
        #[arg(long, default_value = "default")]
        suite: String,
        #[arg(long, default_value_t = 30)]
        seeds: u64,
        #[arg(long)]
        report: PathBuf,
        /// Also write flat CSV rows.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Apply a dynamic self-join update script and enumerate.
    Update {
        #[arg(long)]
        script: PathBuf,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        quiet: bool,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Gen {
            kind,
            n,
            alpha,
            shape,
            k,
            tuples,
            seed,
            out,
        } => {
            let kind = match kind {
                KindArg::D0 => GenKind::D0 {
                    n: n.context("--n required for d0")?,
                },
                KindArg::D1 => GenKind::D1 {
                    n: n.context("--n required for d1")?,
                },
                KindArg::DAlpha => GenKind::DAlpha {
                    n: n.context("--n required for d-alpha")?,
                    alpha: alpha.context("--alpha required for d-alpha")?,
                },
                KindArg::QuadraticFamily => GenKind::QuadraticFamily {
                    n: n.context("--n required for quadratic-family")?,
                },
                KindArg::Random => match shape {
                    ShapeArg::Star => GenKind::RandomStar {
                        k,
                        tuples,
                        x_domain: 24,
                        y_domain: 14,
                        seed,
                    },
                    ShapeArg::Leftdeep => GenKind::RandomLeftDeep {
                        k,
                        tuples,
                        w_domain: 10,
                        prefix_pool: 6,
                        seed,
                    },
                    ShapeArg::Path => GenKind::RandomPath {
                        k,
                        tuples,
                        level_domain: 12,
                        seed,
                    },
                },
            };
            let rels = gen_instance(&kind)?;
            fs::create_dir_all(&out)?;
            for rel in &rels {
                write_csv(&out.join(format!("{}.csv", rel.name)), rel)?;
            }
            println!(
                "wrote {} relations ({} tuples) to {}",
                rels.len(),
                rels.iter().map(|r| r.rows.len()).sum::<usize>(),
                out.display()
            );
            Ok(())
        }
        Command::Run {
            shape,
            k,
            algo,
            inputs,
            delta,
            epsilon,
            report,
            quiet,
        } => {
            let raw = load_dir(&inputs)?;
            if raw.len() != k {
                bail!("expected {k} relation files, found {}", raw.len());
            }
            let prep = prepare(shape.to_shape(k), &raw)?;
            let algo = match algo {
                AlgoArg::TwoPath => Algorithm::TwoPath,
                AlgoArg::Star => Algorithm::Star,
                AlgoArg::StarAlt => Algorithm::StarAlt,
                AlgoArg::Fmm => Algorithm::Fmm { delta },
                AlgoArg::Leftdeep => Algorithm::LeftDeep,
                AlgoArg::Path => Algorithm::Path { epsilon },
            };
            let outcome = run_algorithm(&prep, algo)?;
            if !quiet {
                for t in &outcome.tuples {
                    println!("{}", prep.map.decompress(t).join(","));
                }
            }
            let json = DelayReportJson::new(&outcome.delay, outcome.bound, 1.0);
            eprintln!(
                "{}: |D|={} |OUT_join|={} emitted={} max_gap={} bound={} param={}",
                outcome.algorithm,
                outcome.d_size,
                outcome.out_join,
                outcome.delay.emissions,
                outcome.delay.max_gap,
                outcome.bound,
                outcome.param
            );
            for note in &outcome.notes {
                eprintln!("note: {note}");
            }
            if let Some(path) = report {
                fs::write(&path, serde_json::to_string_pretty(&json)?)?;
                eprintln!("report written to {}", path.display());
            }
            Ok(())
        }
        Command::Oracle {
            shape,
            k,
            inputs,
            quiet,
        } => {
            let raw = load_dir(&inputs)?;
            if raw.len() != k {
                bail!("expected {k} relation files, found {}", raw.len());
            }
            let prep = prepare(shape.to_shape(k), &raw)?;
            let res = oracle_project_join(prep.shape, &prep.relations)?;
            if !quiet {
                for t in &res.projected {
                    println!("{}", prep.map.decompress(t).join(","));
                }
            }
            eprintln!(
                "|D|={} |OUT_join|={} |OUT_pi|={}",
                prep.input_size(),
                res.full_join,
                res.projection
            );
            Ok(())
        }
        Command::Bench {
            suite,
            seeds,
            report,
            csv,
        } => {
            if suite != "default" {
                bail!("unknown suite {suite:?}");
            }
            let cases = default_suite(seeds)?;
            let reports = run_suite(&cases, 5)?;
            let passed = reports.iter().filter(|r| r.pass).count();
            println!(
                "{} runs, {} within calibrated bound ({:.1}%)",
                reports.len(),
                passed,
                100.0 * passed as f64 / reports.len().max(1) as f64
            );
            fs::write(&report, serde_json::to_string_pretty(&reports)?)?;
            println!("report written to {}", report.display());
            if let Some(path) = csv {
                let mut text = String::from(CSV_HEADER);
                text.push('\n');
                for r in &reports {
                    text.push_str(&csv_row(r));
                    text.push('\n');
                }
                fs::write(&path, text)?;
                println!("csv written to {}", path.display());
            }
            Ok(())
        }
        Command::Update {
            script,
            k,
            report,
            quiet,
        } => {
            let text = fs::read_to_string(&script)
                .with_context(|| format!("reading {}", script.display()))?;
            let script = Script::parse(&text)?;
            let (idx, update_reports, total_ticks) = apply(&script);
            let applied = update_reports.iter().filter(|r| r.applied).count();
            let noops = update_reports.len() - applied;
            eprintln!(
                "{} updates applied, {} no-ops, {} update ticks, |R|={}, |diag|={}",
                applied,
                noops,
                total_ticks,
                idx.len(),
                idx.diagonal().len()
            );
            let mut clock = qenum_core::OpClock::new();
            let mut out = qenum_core::OutVec::new();
            let mut e = idx.enumerator(k);
            let delay = qenum_core::measure_delay(&mut *e, &mut clock, &mut out);
            if !quiet {
                for t in &out.tuples {
                    let vals: Vec<&str> = t.iter().map(|&id| script.value(id)).collect();
                    println!("{}", vals.join(","));
                }
            }
            let bound = idx.delay_bound(k) as f64;
            let json = DelayReportJson::new(&delay, bound, 1.0);
            eprintln!(
                "enumerated {} tuples, max_gap={}, bound={}",
                delay.emissions, delay.max_gap, bound
            );
            if let Some(path) = report {
                fs::write(&path, serde_json::to_string_pretty(&json)?)?;
            }
            Ok(())
        }
    }
}
