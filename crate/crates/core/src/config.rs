//! Limits shared by the comparison, descent and retraction procedures.

use serde::{Deserialize, Serialize};

/// Environment variable overriding [`Limits::lmax`].
pub const LMAX_ENV: &str = "OUTERSPINE_LMAX";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Longest class length streamed when deciding a lexicographic
    /// comparison. Reaching it raises `UndeterminedComparison`.
    pub lmax: usize,
    /// Cap on crossing-elimination rounds in the retraction pipeline.
    pub pipeline_iterations: usize,
    /// Cap on norm-descent steps.
    pub descent_steps: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits {
            lmax: 12,
            pipeline_iterations: 256,
            descent_steps: 256,
        }
    }
}

impl Limits {
    /// Defaults, with `lmax` taken from `OUTERSPINE_LMAX` when set.
    pub fn from_env() -> Limits {
        let mut limits = Limits::default();
        if let Some(v) = std::env::var(LMAX_ENV).ok().and_then(|s| s.parse().ok()) {
            limits.lmax = v;
        }
        limits
    }

    pub fn with_lmax(mut self, lmax: usize) -> Limits {
        self.lmax = lmax;
        self
    }
}
