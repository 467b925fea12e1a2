use std::path::PathBuf;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::integrate::{build_rule_with_angular, QuadratureRule};
use crate::params::Params;
use crate::spectrum::MeshSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutFormat {
    Csv,
    Json,
}

/// Everything a run depends on. Reports are a pure function of this.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub n: usize,
    pub p: f64,
    pub mesh_elements: usize,
    pub rmax: f64,
    pub rmin: f64,
    pub quad_count: usize,
    pub angular: usize,
    pub seed: u64,
    pub tol_eigen: f64,
    pub tol_quad: f64,
    pub multistarts: usize,
    /// Random samples per inequality verification.
    pub samples: usize,
    pub out_format: OutFormat,
    pub plot: bool,
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            n: 4,
            p: 2.5,
            mesh_elements: 3000,
            rmax: 1e4,
            rmin: 1e-6,
            quad_count: 512,
            angular: 16,
            seed: 1,
            tol_eigen: 1e-3,
            tol_quad: 1e-8,
            multistarts: 8,
            samples: 1_000_000,
            out_format: OutFormat::Csv,
            plot: false,
            out: PathBuf::from("report"),
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse { line, msg: format!("bad value `{value}` for `{key}`") })
}

impl RunConfig {
    /// Applies one `key = value` setting; `line` is 0 for settings that did not come from a file.
    pub fn set(&mut self, key: &str, value: &str, line: usize) -> Result<()> {
        match key {
            "n" => self.n = parse_value(key, value, line)?,
            "p" => self.p = parse_value(key, value, line)?,
            "mesh" | "mesh_elements" => self.mesh_elements = parse_value(key, value, line)?,
            "rmax" => self.rmax = parse_value(key, value, line)?,
            "rmin" => self.rmin = parse_value(key, value, line)?,
            "quad" | "quad_count" => self.quad_count = parse_value(key, value, line)?,
            "angular" => self.angular = parse_value(key, value, line)?,
            "seed" => self.seed = parse_value(key, value, line)?,
            "tol_eigen" => self.tol_eigen = parse_value(key, value, line)?,
            "tol_quad" => self.tol_quad = parse_value(key, value, line)?,
            "multistarts" => self.multistarts = parse_value(key, value, line)?,
            "samples" => self.samples = parse_value(key, value, line)?,
            "plot" => self.plot = parse_value(key, value, line)?,
            "out" => self.out = PathBuf::from(value),
            "format" | "out_format" => {
                self.out_format = match value {
                    "csv" => OutFormat::Csv,
                    "json" => OutFormat::Json,
                    _ => return Err(Error::Parse { line, msg: format!("format must be csv or json, got `{value}`") }),
                }
            }
            _ => return Err(Error::Parse { line, msg: format!("unknown key `{key}`") }),
        }
        Ok(())
    }

    /// Applies a config file: one `key = value` per line, `#` starts a comment.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| Error::Parse { line, msg: format!("expected `key = value`, got `{body}`") })?;
            self.set(key.trim(), value.trim(), line)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<Params> {
        let params = Params::new(self.n, self.p)?;
        let bad = |what: &str| Err(Error::Configuration(what.to_string()));
        if self.mesh_elements < 500 {
            return bad("mesh_elements must be at least 500");
        }
        if !(self.tol_eigen > 0.0 && self.tol_quad > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.rmin > 0.0 && self.rmax > self.rmin) {
            return bad("need 0 < rmin < rmax");
        }
        if self.quad_count < 64 || self.angular < 2 {
            return bad("quad_count must be at least 64 and angular at least 2");
        }
        if self.multistarts == 0 {
            return bad("multistarts must be positive");
        }
        Ok(params)
    }

    pub fn mesh(&self) -> MeshSpec {
        MeshSpec { elements: self.mesh_elements, r_min: self.rmin, r_max: self.rmax, tol: self.tol_eigen }
    }

    pub fn rule(&self, params: &Params, count: usize) -> Result<QuadratureRule> {
        build_rule_with_angular(params, count, self.rmax, self.angular)
    }
}
