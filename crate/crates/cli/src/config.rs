use std::path::PathBuf;

use opuc_core::Precision;
use serde::Serialize;

use crate::CliError;

pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_N_LIST: [usize; 6] = [16, 32, 64, 128, 256, 512];
pub const LARGE_N: usize = 1024;

/// Validated parameters of one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub epsilon: f64,
    pub n: Option<usize>,
    pub n_list: Vec<usize>,
    /// Grid size; `None` lets each stage pick its default.
    pub m: Option<usize>,
    pub precision: Precision,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl RunConfig {
    pub fn validate(self) -> Result<Self, CliError> {
        if !(self.epsilon > 0.0 && self.epsilon <= 0.3) {
            return Err(CliError::Config(format!("epsilon = {} is outside (0, 0.3]", self.epsilon)));
        }
        if let Some(m) = self.m {
            if m == 0 || m % 4 != 0 {
                return Err(CliError::Config(format!("grid size {m} is not a positive multiple of 4")));
            }
        }
        if self.n == Some(0) || self.n_list.contains(&0) {
            return Err(CliError::Config("n must be at least 1".into()));
        }
        Ok(self)
    }

    pub fn n_or(&self, default: usize) -> usize {
        self.n.unwrap_or(default)
    }
}

/// Parses `16,32,64` into a sorted, deduplicated list.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, String> {
    let mut v = s
        .split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("{t:?}: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    v.sort_unstable();
    v.dedup();
    Ok(v)
}

/// `0.1` renders as `0.1`, never with a locale or exponent.
pub fn format_epsilon(eps: f64) -> String {
    format!("{eps}")
}
