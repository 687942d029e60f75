//! `repbasis` command-line front end.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::construct::{build, ConstructionTrace, SearchConfig, DEFAULT_SEARCH_CAP};
use crate::repcore::{counting_closed, density_bound, Phi, RepTarget};
use crate::sidon::{erdos_turan_sidon, greedy_sidon, sidon_for_density, SidonMethod, SidonSet};
use crate::verify::{check_equality_coverage, check_invariants};

#[derive(Debug, Parser)]
#[command(name = "repbasis", version, about = "Dense bases of the integers with a prescribed representation function")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Greedy,
    ErdosTuran,
    Auto,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a construction trace and write it as JSON.
    Build {
        /// Target function JSON file.
        #[arg(long = "f", value_name = "FILE")]
        f: PathBuf,
        #[arg(long, default_value = "log2")]
        phi: String,
        /// Number of extension/densification rounds L (2L+1 stages).
        #[arg(long)]
        stages: usize,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "REPBASIS_SEARCH_CAP")]
        search_cap: Option<u64>,
    },
    /// Re-check every invariant of a trace; exit status 0 iff all pass.
    Verify {
        #[arg(long)]
        trace: PathBuf,
        /// Report destination; printed to stdout when omitted.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Print a Sidon set in [1, n] as JSON.
    Sidon {
        #[arg(long, value_enum, default_value = "auto")]
        method: MethodArg,
        #[arg(long)]
        n: u64,
    },
    /// Density table with one CSV row per checkpoint.
    Stats {
        #[arg(long)]
        trace: PathBuf,
        /// CSV destination; printed to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Serialize)]
struct SidonOutput<'a> {
    dense: bool,
    half_sqrt_n: f64,
    method: SidonMethod,
    n: u64,
    set: &'a [u64],
    size: usize,
}

fn read_trace(path: &Path) -> Result<ConstructionTrace> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    ConstructionTrace::from_json(&text).with_context(|| format!("parsing trace {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => stdout.write_all(text.as_bytes()).context("writing to stdout"),
    }
}

/// One CSV row per checkpoint: `x, A(-x,x), √x/φ(x), ratio, √(2r(4x+1))`,
/// where `r` is the largest finite value of `f`.
pub fn stats_csv(trace: &ConstructionTrace) -> String {
    let r = trace.f.max_finite();
    let mut csv = String::from("stage,x,count,bound,ratio,ceiling\n");
    for stage in &trace.stages {
        let Some(x) = stage.checkpoint else { continue };
        let count = counting_closed(&stage.set, -x, x);
        let bound = density_bound(x, &trace.phi);
        let ratio = count as f64 / bound;
        let ceiling = match r {
            Some(r) => format!("{:.6}", (2.0 * r as f64 * (4.0 * x as f64 + 1.0)).sqrt()),
            None => "inf".to_string(),
        };
        csv.push_str(&format!(
            "{},{x},{count},{bound:.6},{ratio:.6},{ceiling}\n",
            stage.index
        ));
    }
    csv
}

/// Runs one subcommand and returns the process exit status.
pub fn run(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Build {
            f,
            phi,
            stages,
            out,
            search_cap,
        } => {
            if stages == 0 {
                bail!("--stages must be at least 1");
            }
            let text = fs::read_to_string(&f).with_context(|| format!("reading {}", f.display()))?;
            let target: RepTarget = serde_json::from_str(&text)
                .with_context(|| format!("parsing target {}", f.display()))?;
            let phi: Phi = phi.parse()?;
            let config = SearchConfig {
                cap: search_cap.unwrap_or(DEFAULT_SEARCH_CAP),
            };
            let trace = build(&target, &phi, stages, &config)?;
            fs::write(&out, trace.to_json()).with_context(|| format!("writing {}", out.display()))?;
            Ok(0)
        }
        Command::Verify { trace, report } => {
            let trace = read_trace(&trace)?;
            let mut result = check_invariants(&trace)?;
            if result.pass {
                result = result.merge(check_equality_coverage(&trace));
            }
            emit(report.as_deref(), &result.to_json(), stdout)?;
            Ok(if result.pass { 0 } else { 1 })
        }
        Command::Sidon { method, n } => {
            if n == 0 {
                bail!("--n must be at least 1");
            }
            let set: SidonSet = match method {
                MethodArg::Greedy => greedy_sidon(n),
                MethodArg::ErdosTuran => erdos_turan_sidon(n)?,
                MethodArg::Auto => sidon_for_density(n)?,
            };
            let output = SidonOutput {
                dense: set.is_dense(),
                half_sqrt_n: (n as f64).sqrt() / 2.0,
                method: set.method(),
                n,
                set: set.elements(),
                size: set.len(),
            };
            let mut text = serde_json::to_string(&output)?;
            text.push('\n');
            stdout.write_all(text.as_bytes())?;
            Ok(0)
        }
        Command::Stats { trace, out } => {
            let trace = read_trace(&trace)?;
            emit(out.as_deref(), &stats_csv(&trace), stdout)?;
            Ok(0)
        }
    }
}
