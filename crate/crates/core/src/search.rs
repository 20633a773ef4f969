//! Search bookkeeping: node budgets and worker configuration.
//!
//! Every exhaustive routine charges the shared [`Search`] context per
//! candidate it examines. Exhausting the budget surfaces as
//! [`Error::BudgetExceeded`], a distinct outcome from "no witness exists".

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

#[derive(Debug)]
pub struct Search {
    limit: Option<u64>,
    used: AtomicU64,
    /// Worker count; 1 is the strictly sequential reference mode.
    pub jobs: usize,
}

impl Default for Search {
    fn default() -> Self {
        Search::unlimited()
    }
}

impl Search {
    pub fn unlimited() -> Self {
        Search { limit: None, used: AtomicU64::new(0), jobs: 1 }
    }

    pub fn with_budget(limit: u64) -> Self {
        Search { limit: Some(limit), used: AtomicU64::new(0), jobs: 1 }
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs.max(1);
        self
    }

    /// Record `n` examined candidates.
    pub fn charge(&self, n: u64) -> Result<()> {
        let used = self.used.fetch_add(n, Ordering::Relaxed) + n;
        match self.limit {
            Some(limit) if used > limit => Err(Error::BudgetExceeded),
            _ => Ok(()),
        }
    }

    pub fn examined(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }
}
