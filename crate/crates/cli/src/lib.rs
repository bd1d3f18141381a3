//! Library side of the `hwm` command-line tool: datum files, run
//! configuration and the table-producing commands.

pub mod commands;
pub mod datum;

use std::path::PathBuf;

use hwm_core::Tolerances;
use thiserror::Error;

pub use commands::run;
pub use datum::{datum_to_toml, load_datum, parse_datum, parse_datum_str};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },

    #[error("validation failed: {0}")]
    ValidationFailed(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] hwm_core::Error),
}

impl CliError {
    /// 2 for bad input data, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Schema { .. } | CliError::ValidationFailed(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Evolve,
    Poles,
    Conserved,
    OracleCompare,
    SolitonGen,
}

/// Everything a command needs besides the datum itself.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub input: Option<PathBuf>,
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
    pub xmin: f64,
    pub xmax: f64,
    pub nx: usize,
    pub h: f64,
    /// Overrides the algebra and constraint tolerances.
    pub tol: Option<f64>,
    pub force: bool,
    pub seed: Option<u64>,
    /// Largest power in `Tr L^k`; defaults to `2N`.
    pub kmax: Option<usize>,
    /// Number of poles for `soliton-gen`.
    pub n: usize,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            input: None,
            t0: 0.0,
            t1: 1.0,
            nt: 11,
            xmin: -10.0,
            xmax: 10.0,
            nx: 201,
            h: 1e-3,
            tol: None,
            force: false,
            seed: None,
            kmax: None,
            n: 1,
        }
    }

    pub fn check(&self) -> Result<(), CliError> {
        let bad = |m: &str| Err(CliError::Config(m.to_string()));
        if self.nt < 1 || self.nx < 1 {
            return bad("nt and nx must be at least 1");
        }
        if !(self.t0 <= self.t1) {
            return bad("t0 must not exceed t1");
        }
        if !(self.xmin < self.xmax) {
            return bad("xmin must be below xmax");
        }
        if !(self.h > 0.0) {
            return bad("h must be positive");
        }
        if let Some(t) = self.tol {
            if !(t > 0.0) {
                return bad("tol must be positive");
            }
        }
        Ok(())
    }

    pub fn tolerances(&self) -> Tolerances<f64> {
        match self.tol {
            Some(t) => Tolerances::default().with_tol(t),
            None => Tolerances::default(),
        }
    }

    pub fn times(&self) -> Vec<f64> {
        linspace(self.t0, self.t1, self.nt)
    }

    pub fn xs(&self) -> Vec<f64> {
        linspace(self.xmin, self.xmax, self.nx)
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}
