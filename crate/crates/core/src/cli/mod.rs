//! Command-line front end: `beltrami <command> [flags]`.

mod commands;
mod suite;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{NormalizationKind, ProbeSource, RunConfig};
use crate::error::Result;
use crate::report::RunReport;

pub use commands::{default_manufactured, manufactured_problem, ManufacturedProblem, DEFAULT_MANUFACTURED};

#[derive(Parser, Debug)]
#[command(name = "beltrami", version, about = "Nonlinear Beltrami and Leray-Lions solvers with regularity probes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Subcommand, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Solve f_z̄ = H(z, f_z) + G on the periodic window.
    SolveBeltrami,
    /// Solve div A(z, ∇u) = div g through the Beltrami conversion.
    SolveLerayLions,
    /// Solve the frozen-coefficient Riemann-Hilbert problem in a disk.
    SolveRh,
    /// Convert a Leray-Lions field and certify both sides.
    ConvertField,
    /// Run the inequality suite on a corpus entry.
    ProbeSuite,
    /// Tabulate the Hölder exponent α_K.
    ProbeAlphaTable,
    /// Morrey and Campanato decay profiles of a corpus entry.
    ProbeMorrey,
    /// Caccioppoli ratios on a manufactured solve.
    ProbeCaccioppoli,
    /// List corpus entries and built-in fields.
    CorpusList,
}

impl Command {
    pub const ALL: [Command; 9] = [
        Command::SolveBeltrami,
        Command::SolveLerayLions,
        Command::SolveRh,
        Command::ConvertField,
        Command::ProbeSuite,
        Command::ProbeAlphaTable,
        Command::ProbeMorrey,
        Command::ProbeCaccioppoli,
        Command::CorpusList,
    ];

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.name() == name)
    }

    pub fn name(self) -> &'static str {
        match self {
            Command::SolveBeltrami => "solve-beltrami",
            Command::SolveLerayLions => "solve-leray-lions",
            Command::SolveRh => "solve-rh",
            Command::ConvertField => "convert-field",
            Command::ProbeSuite => "probe-suite",
            Command::ProbeAlphaTable => "probe-alpha-table",
            Command::ProbeMorrey => "probe-morrey",
            Command::ProbeCaccioppoli => "probe-caccioppoli",
            Command::CorpusList => "corpus-list",
        }
    }
}

#[derive(Args, Debug, Default, Clone)]
pub struct Common {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory (default `out`).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long = "grid-n", global = true)]
    pub grid_n: Option<usize>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ellipticity constant k of an H field.
    #[arg(long = "k", global = true)]
    pub k: Option<f64>,
    /// Distortion K of an A field or of a probe.
    #[arg(long = "K", global = true)]
    pub big_k: Option<f64>,
    /// Corpus selector, e.g. `power:K=2`.
    #[arg(long, global = true)]
    pub corpus: Option<String>,
    /// Field selector, e.g. `holder-cubic:k=1/3` or `diag:K=2`.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Expression in z for G or g.
    #[arg(long, global = true)]
    pub data: Option<String>,
    /// Expression in z for a manufactured solution.
    #[arg(long, global = true)]
    pub manufactured: Option<String>,
    #[arg(long, global = true, value_enum)]
    pub normalization: Option<NormalizationKind>,
    #[arg(long, global = true, value_enum)]
    pub source: Option<ProbeSource>,
}

impl Common {
    /// Loads the config file (if any) and applies flag overrides.
    pub fn resolve(&self, command: Command) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        cfg.command = Some(command.name().into());
        if let Some(v) = &self.out {
            cfg.out = Some(v.clone());
        }
        if let Some(v) = self.grid_n {
            cfg.grid.n = v;
        }
        if let Some(v) = self.tol {
            cfg.solver.tol = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if self.k.is_some() {
            cfg.k = self.k;
        }
        if self.big_k.is_some() {
            cfg.big_k = self.big_k;
        }
        if self.corpus.is_some() {
            cfg.corpus = self.corpus.clone();
        }
        if self.field.is_some() {
            cfg.field = self.field.clone();
        }
        if self.data.is_some() {
            cfg.data = self.data.clone();
        }
        if self.manufactured.is_some() {
            cfg.manufactured = self.manufactured.clone();
        }
        if let Some(v) = self.normalization {
            cfg.solver.normalization = v;
        }
        if let Some(v) = self.source {
            cfg.probes.source = v;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs a command and writes its report into the configured output directory.
pub fn run(command: Command, cfg: &RunConfig) -> Result<RunReport> {
    let mut report = RunReport::new(command.name(), cfg);
    let dir = cfg.out_dir();
    match command {
        Command::SolveBeltrami => commands::solve_beltrami(cfg, &mut report)?,
        Command::SolveLerayLions => commands::solve_leray_lions(cfg, &mut report)?,
        Command::SolveRh => commands::solve_rh(cfg, &mut report)?,
        Command::ConvertField => commands::convert_field(cfg, &mut report)?,
        Command::ProbeSuite => suite::probe_suite(cfg, &mut report)?,
        Command::ProbeAlphaTable => commands::alpha_table(cfg, &mut report)?,
        Command::ProbeMorrey => suite::probe_morrey(cfg, &mut report)?,
        Command::ProbeCaccioppoli => suite::probe_caccioppoli(cfg, &mut report)?,
        Command::CorpusList => commands::corpus_list(cfg, &mut report)?,
    }
    report.write(&dir)?;
    Ok(report)
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match cli.common.resolve(cli.command) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    match run(cli.command, &cfg) {
        Ok(report) => {
            let failures = report.failures();
            let n = report.records.iter().filter(|r| r.assertion).count();
            println!(
                "{}: {} of {} checks passed; report in {}",
                report.command,
                n - failures.len(),
                n,
                cfg.out_dir().join("run.json").display()
            );
            for f in &failures {
                println!("FAIL {} ({}): value {:.3e}, tolerance {:.3e}", f.probe, f.reference, f.value, f.tolerance);
            }
            if failures.is_empty() { 0 } else { 1 }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}
