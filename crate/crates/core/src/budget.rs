use std::time::{Duration, Instant};

use thiserror::Error;

/// Default cap on materialized states (DFA construction and arena product).
pub const DEFAULT_STATE_CAP: usize = 200_000;

/// Environment variable overriding [`DEFAULT_STATE_CAP`].
pub const STATE_CAP_ENV: &str = "BESYNTH_STATE_CAP";

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ResourceError {
    #[error("{what} exceeded the state budget of {cap}")]
    StateCap { what: &'static str, cap: usize },
    #[error("time budget exhausted")]
    Timeout,
}

/// Resource limits threaded through the pipeline.
#[derive(Clone, Copy, Debug)]
pub struct Budget {
    pub state_cap: usize,
    pub deadline: Option<Instant>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            state_cap: DEFAULT_STATE_CAP,
            deadline: None,
        }
    }
}

impl Budget {
    /// Default budget with the state cap taken from `BESYNTH_STATE_CAP` when set.
    pub fn from_env() -> Self {
        let state_cap = std::env::var(STATE_CAP_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_STATE_CAP);
        Budget {
            state_cap,
            deadline: None,
        }
    }

    pub fn with_state_cap(mut self, cap: usize) -> Self {
        self.state_cap = cap;
        self
    }

    pub fn with_timeout(mut self, timeout: Duration) -> Self {
        self.deadline = Some(Instant::now() + timeout);
        self
    }

    pub fn check_states(&self, count: usize, what: &'static str) -> Result<(), ResourceError> {
        if count > self.state_cap {
            return Err(ResourceError::StateCap {
                what,
                cap: self.state_cap,
            });
        }
        Ok(())
    }

    pub fn check_time(&self) -> Result<(), ResourceError> {
        match self.deadline {
            Some(d) if Instant::now() >= d => Err(ResourceError::Timeout),
            _ => Ok(()),
        }
    }
}
