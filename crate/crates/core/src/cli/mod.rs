//! Command-line driver: configuration, subcommands and report files.

mod commands;
mod config;
mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use commands::{run_command, Command, EXPANSION_EPS, KAPPAS};
pub use config::{OutFormat, RunConfig};
pub use report::{svg, Cell, Check, Plot, Report, Series, Table, SCHEMA_VERSION};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "sobolev-stab", version, about = "Numerical checks around the extremals of the sharp Sobolev inequality")]
pub struct Args {
    #[command(subcommand)]
    pub command: Command,
    #[arg(long, global = true)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Finite elements per radial channel.
    #[arg(long, global = true)]
    pub mesh: Option<usize>,
    #[arg(long, global = true)]
    pub rmax: Option<f64>,
    /// Radial quadrature node count.
    #[arg(long, global = true)]
    pub quad: Option<usize>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub tol_eigen: Option<f64>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutFormat>,
    /// Also write SVG plots.
    #[arg(long, global = true)]
    pub plot: bool,
    /// `key = value` file; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

impl Args {
    pub fn run_config(&self) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Configuration(format!("{}: {e}", path.display())))?;
            cfg.apply_text(&text)?;
        }
        if let Some(v) = self.n {
            cfg.n = v;
        }
        if let Some(v) = self.p {
            cfg.p = v;
        }
        if let Some(v) = self.mesh {
            cfg.mesh_elements = v;
        }
        if let Some(v) = self.rmax {
            cfg.rmax = v;
        }
        if let Some(v) = self.quad {
            cfg.quad_count = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.tol_eigen {
            cfg.tol_eigen = v;
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = self.format {
            cfg.out_format = v;
        }
        cfg.plot |= self.plot;
        Ok(cfg)
    }
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    AllPass = 0,
    Violation = 1,
    Usage = 2,
}

/// Runs a command and writes its reports; returns the reports and the files written.
pub fn execute(cmd: Command, cfg: &RunConfig) -> Result<(Vec<Report>, Vec<PathBuf>)> {
    let reports = run_command(cmd, cfg)?;
    let mut files = Vec::new();
    for r in &reports {
        files.extend(r.write(&cfg.out, cfg.out_format, cfg.plot)?);
    }
    Ok((reports, files))
}

/// Entry point shared by the binary and the tests.
pub fn main_with<I, T>(argv: I) -> Exit
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let usage = e.use_stderr();
            let _ = e.print();
            return if usage { Exit::Usage } else { Exit::AllPass };
        }
    };
    let cfg = match args.run_config().and_then(|c| c.validate().map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return Exit::Usage;
        }
    };
    match execute(args.command, &cfg) {
        Ok((reports, files)) => {
            for r in &reports {
                print!("{}", r.summary());
            }
            for f in &files {
                println!("wrote {}", f.display());
            }
            if reports.iter().all(Report::all_pass) {
                Exit::AllPass
            } else {
                Exit::Violation
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            Exit::Violation
        }
    }
}
