pub mod ca;
pub mod eca;
pub mod mu;
pub mod qg;

use std::path::Path;

use qgca::format::Loader;
use qgca::{Alphabet, Prob, Symbol};

use crate::error::CliError;
use crate::report::Report;

/// Shared state for one invocation.
pub struct Ctx {
    pub loader: Loader,
    pub depth: Option<usize>,
    pub mass_floor: Prob,
    pub seed: u64,
    pub report: Report,
}

/// `Ok(true)` on success, `Ok(false)` when the analysis found a failure.
pub type Outcome = Result<bool, CliError>;

impl Ctx {
    pub fn depth_or(&self, default: usize) -> usize {
        self.depth.unwrap_or(default)
    }
}

/// References on the command line resolve against the working directory.
pub fn here() -> &'static Path {
    Path::new("")
}

pub fn parse_word(alphabet: &Alphabet, parts: &[String]) -> Result<Vec<Symbol>, CliError> {
    alphabet.parse_word(&parts.join(" ")).map_err(|e| CliError::Input(e.to_string()))
}
