//! Applying learned patterns to a failing program and validating the
//! resulting candidates.

mod apply;
mod enumerate;
mod matching;
pub mod scope;
mod variables;

use std::sync::Arc;

use rayon::prelude::*;

use crate::ast::Ast;
use crate::judge::{JudgeError, Verdict};
use crate::merge::MergeTreePool;

pub use apply::{apply_pattern, apply_sites, ApplyError};
pub use enumerate::{
    enumerate_candidates, CandidateStream, RankKey, RepairCandidate, DEFAULT_COMBINATION_CAP, MAX_ARITY,
};
pub use matching::{find_matches, Emit, MatchSite};
pub use variables::{align_variables, align_variables_capped, filter_spurious, MAX_ASSIGNMENTS};

/// Default number of judged candidates per target.
pub const DEFAULT_BUDGET: usize = 1000;

/// Decides whether a candidate program is correct.
pub trait Validator: Sync {
    fn validate(&self, source: &str) -> Result<Verdict, JudgeError>;
}

pub type Observer = Arc<dyn Fn(&RepairCandidate, &Verdict) + Send + Sync>;

#[derive(Clone)]
pub struct RepairOptions {
    pub budget: usize,
    /// Candidates judged concurrently.
    pub parallelism: usize,
    /// Combinations examined per arity.
    pub combination_cap: usize,
    /// Most patterns combined into one candidate, at most [`MAX_ARITY`].
    pub max_arity: usize,
    /// Most variable assignments per candidate before it is dropped.
    pub alignment_cap: usize,
    /// Called with every judged candidate and its verdict.
    pub observer: Option<Observer>,
}

impl Default for RepairOptions {
    fn default() -> Self {
        RepairOptions {
            budget: DEFAULT_BUDGET,
            parallelism: 1,
            combination_cap: DEFAULT_COMBINATION_CAP,
            max_arity: MAX_ARITY,
            alignment_cap: MAX_ASSIGNMENTS,
            observer: None,
        }
    }
}

impl std::fmt::Debug for RepairOptions {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("RepairOptions")
            .field("budget", &self.budget)
            .field("parallelism", &self.parallelism)
            .field("combination_cap", &self.combination_cap)
            .field("max_arity", &self.max_arity)
            .field("alignment_cap", &self.alignment_cap)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum RepairOutcome {
    Repaired {
        ast: Ast,
        source: String,
        repair_cost: f64,
        applied: Vec<MatchSite>,
        candidates_tried: usize,
    },
    Failure {
        candidates_tried: usize,
        /// The verdict that got furthest through the suite.
        best_verdict: Option<Verdict>,
    },
}

impl RepairOutcome {
    pub fn is_repaired(&self) -> bool {
        matches!(self, RepairOutcome::Repaired { .. })
    }

    pub fn candidates_tried(&self) -> usize {
        match self {
            RepairOutcome::Repaired { candidates_tried, .. } | RepairOutcome::Failure { candidates_tried, .. } => {
                *candidates_tried
            }
        }
    }
}

fn progress(v: &Verdict) -> u32 {
    v.first_failed_test.unwrap_or(0)
}

/// Judge candidates in rank order and return the first accepted one.
/// Batches run concurrently, but a candidate wins only if every earlier
/// one was rejected, so the result does not depend on `parallelism`.
pub fn repair(
    target: &Ast,
    pool: &MergeTreePool,
    validator: &dyn Validator,
    opts: &RepairOptions,
) -> Result<RepairOutcome, JudgeError> {
    let mut stream = CandidateStream::new(target, pool, &RepairOptions { budget: opts.budget.max(1), ..opts.clone() });
    let batch = opts.parallelism.max(1);
    let mut tried = 0;
    let mut best: Option<Verdict> = None;
    loop {
        let chunk: Vec<RepairCandidate> = stream.by_ref().take(batch).collect();
        if chunk.is_empty() {
            break;
        }
        let verdicts: Vec<Result<Verdict, JudgeError>> =
            chunk.par_iter().map(|c| validator.validate(&c.source)).collect();
        for (c, v) in chunk.into_iter().zip(verdicts) {
            let v = v?;
            tried += 1;
            if let Some(obs) = &opts.observer {
                obs(&c, &v);
            }
            if v.is_accepted() {
                return Ok(RepairOutcome::Repaired {
                    ast: c.ast,
                    source: c.source,
                    repair_cost: c.repair_cost,
                    applied: c.applied,
                    candidates_tried: tried,
                });
            }
            if best.as_ref().is_none_or(|b| progress(&v) > progress(b)) {
                best = Some(v);
            }
        }
    }
    Ok(RepairOutcome::Failure { candidates_tried: tried, best_verdict: best })
}
