use crate::error::{Error, Result};

/// Environment variable overriding [`Budget::default`].
pub const BUDGET_ENV: &str = "CDSLAB_BUDGET";

/// Upper bound on the number of states (or search nodes) an enumeration may visit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_states: usize,
}

impl Budget {
    pub const DEFAULT_MAX_STATES: usize = 200_000;

    pub fn new(max_states: usize) -> Self {
        Budget { max_states }
    }

    /// Reads `CDSLAB_BUDGET`, falling back to the default when unset or unparsable.
    pub fn from_env() -> Self {
        std::env::var(BUDGET_ENV)
            .ok()
            .and_then(|s| s.trim().parse().ok())
            .map(Budget::new)
            .unwrap_or_default()
    }

    pub(crate) fn check(&self, used: usize) -> Result<()> {
        if used > self.max_states {
            Err(Error::BudgetExceeded(self.max_states))
        } else {
            Ok(())
        }
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(Self::DEFAULT_MAX_STATES)
    }
}
